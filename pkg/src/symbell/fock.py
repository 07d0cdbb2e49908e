"""Exact bosonic state algebra over labelled polarization modes.

States are finite superpositions of multimode Fock vectors.  Amplitudes are
stored with the bosonic normalization absorbed, so a term created by
``(a^dag)^n / sqrt(n!)`` has unit norm and probabilities are plain
``|amplitude|^2``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

MERGE_TOL = 1e-12
ISOMETRY_TOL = 1e-12


class Pol(str, enum.Enum):
    H = "H"
    V = "V"


@dataclass(frozen=True, order=True)
class ModeLabel:
    """A single bosonic mode: spatial path, polarization and temporal bin."""

    spatial: str
    polarization: Pol
    temporal: int = 0

    def __post_init__(self):
        if not isinstance(self.polarization, Pol):
            object.__setattr__(self, "polarization", Pol(self.polarization))
        if self.temporal < 0:
            raise ValueError(f"temporal bin must be non-negative, got {self.temporal}")

    def __str__(self) -> str:
        return f"{self.spatial}_{self.polarization.value}@{self.temporal}"

    @classmethod
    def parse(cls, text: str) -> "ModeLabel":
        """Inverse of ``str(mode)``; the ``@bin`` suffix is optional."""
        body, _, tbin = text.partition("@")
        spatial, _, pol = body.rpartition("_")
        if not spatial or pol not in ("H", "V"):
            raise ValueError(f"cannot parse mode label {text!r}")
        return cls(spatial, Pol(pol), int(tbin) if tbin else 0)

    def with_spatial(self, spatial: str) -> "ModeLabel":
        return ModeLabel(spatial, self.polarization, self.temporal)

    def with_pol(self, pol: Pol | str) -> "ModeLabel":
        return ModeLabel(self.spatial, Pol(pol), self.temporal)


def mode(spatial: str, pol: Pol | str, temporal: int = 0) -> ModeLabel:
    return ModeLabel(spatial, Pol(pol), temporal)


# An occupation is a canonical tuple of (mode, count) pairs with count >= 1.
Occupation = tuple[tuple[ModeLabel, int], ...]


def canonical_occupation(occ: Mapping[ModeLabel, int] | Iterable[tuple[ModeLabel, int]]) -> Occupation:
    items = occ.items() if isinstance(occ, Mapping) else occ
    merged: dict[ModeLabel, int] = {}
    for m, n in items:
        if not isinstance(m, ModeLabel):
            raise TypeError(f"occupation keys must be ModeLabel, got {type(m).__name__}")
        if n < 0 or int(n) != n:
            raise ValueError(f"photon count must be a non-negative integer, got {n}")
        merged[m] = merged.get(m, 0) + int(n)
    return tuple(sorted((m, n) for m, n in merged.items() if n > 0))


def occupation_from_modes(modes: Iterable[ModeLabel]) -> Occupation:
    counts: dict[ModeLabel, int] = {}
    for m in modes:
        counts[m] = counts.get(m, 0) + 1
    return canonical_occupation(counts)


def photon_number(occ: Occupation) -> int:
    return sum(n for _, n in occ)


def _factorial_weight(occ: Occupation) -> float:
    return math.prod(math.factorial(n) for _, n in occ)


@dataclass(frozen=True)
class FockTerm:
    occupation: Occupation
    amplitude: complex


class PhotonicState:
    """Immutable superposition of Fock vectors with a fixed photon number.

    Use :func:`make_state` or :meth:`from_operators` to build one; the
    constructor itself does not normalize.
    """

    __slots__ = ("_amps", "_n", "input_norm")

    def __init__(self, amplitudes: Mapping[Occupation, complex], *, input_norm: float = 1.0):
        amps = {}
        n_photons = None
        for occ, amp in amplitudes.items():
            if abs(amp) <= MERGE_TOL:
                continue
            n = photon_number(occ)
            if n_photons is None:
                n_photons = n
            elif n != n_photons:
                raise ValueError(
                    f"mixed total photon numbers in one state: {n_photons} and {n}"
                )
            amps[occ] = complex(amp)
        self._amps = dict(sorted(amps.items()))
        self._n = 0 if n_photons is None else n_photons
        self.input_norm = float(input_norm)

    @classmethod
    def from_operators(
        cls,
        monomials: Iterable[tuple[Sequence[ModeLabel], complex]],
        normalize: bool = False,
    ) -> "PhotonicState":
        """Build a state from creation-operator monomials acting on vacuum.

        ``[((g_H, g_H), c)]`` means ``c * g_H^dag^2 |0>``, which carries
        amplitude ``c * sqrt(2)`` on the occupation ``{g_H: 2}``.
        """
        amps: dict[Occupation, complex] = {}
        for modes, coeff in monomials:
            occ = occupation_from_modes(modes)
            amps[occ] = amps.get(occ, 0) + coeff * math.sqrt(_factorial_weight(occ))
        state = cls(amps)
        return state.normalized() if normalize else state

    @property
    def photon_number(self) -> int:
        return self._n

    @property
    def amplitudes(self) -> Mapping[Occupation, complex]:
        return dict(self._amps)

    @property
    def terms(self) -> list[FockTerm]:
        return [FockTerm(o, a) for o, a in self._amps.items()]

    def modes(self) -> set[ModeLabel]:
        return {m for occ in self._amps for m, _ in occ}

    def amplitude(self, occ: Mapping[ModeLabel, int] | Occupation) -> complex:
        return self._amps.get(canonical_occupation(occ), 0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self._amps.values()))

    def normalized(self) -> "PhotonicState":
        nrm = self.norm()
        if nrm <= MERGE_TOL:
            raise ValueError("cannot normalize a zero-norm state")
        return PhotonicState({o: a / nrm for o, a in self._amps.items()}, input_norm=nrm)

    def __len__(self) -> int:
        return len(self._amps)

    def __iter__(self) -> Iterator[tuple[Occupation, complex]]:
        return iter(self._amps.items())

    def __add__(self, other: "PhotonicState") -> "PhotonicState":
        out = dict(self._amps)
        for o, a in other._amps.items():
            out[o] = out.get(o, 0) + a
        return PhotonicState(out)

    def __mul__(self, scalar: complex) -> "PhotonicState":
        return PhotonicState({o: a * scalar for o, a in self._amps.items()})

    __rmul__ = __mul__

    def __repr__(self) -> str:
        parts = [f"({a.real:+.6g}{a.imag:+.6g}j)|{occupation_str(o)}>" for o, a in self._amps.items()]
        return "PhotonicState(" + " ".join(parts) + ")"

    def to_json(self) -> str:
        """Debug form: ``{"a_H@0:1,b_H@0:1": [re, im], ...}``."""
        return json.dumps(
            {occupation_str(o): [a.real, a.imag] for o, a in self._amps.items()},
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "PhotonicState":
        raw = json.loads(text)
        return cls({parse_occupation(k): complex(re, im) for k, (re, im) in raw.items()})


def occupation_str(occ: Occupation) -> str:
    return ",".join(f"{m}:{n}" for m, n in occ)


def parse_occupation(text: str) -> Occupation:
    pairs = []
    for chunk in text.split(","):
        label, _, count = chunk.rpartition(":")
        pairs.append((ModeLabel.parse(label), int(count)))
    return canonical_occupation(pairs)


def make_state(terms: Iterable[tuple[Mapping[ModeLabel, int], complex]]) -> PhotonicState:
    """Canonicalize, merge and normalize ``(occupation, amplitude)`` pairs.

    The norm before normalization is kept on ``state.input_norm``.
    """
    amps: dict[Occupation, complex] = {}
    numbers = set()
    for occ, amp in terms:
        c = canonical_occupation(occ)
        if not c:
            raise ValueError("occupations must be non-empty")
        numbers.add(photon_number(c))
        amps[c] = amps.get(c, 0) + complex(amp)
    if not amps:
        raise ValueError("no terms given")
    if len(numbers) > 1:
        raise ValueError(f"mixed total photon numbers: {sorted(numbers)}")
    return PhotonicState(amps).normalized()


class TransferMap:
    """Linear map on creation operators, ``a_i^dag -> sum_j U[j, i] b_j^dag``.

    Modes not in ``modes_in`` pass through unchanged.  Columns of ``matrix``
    are indexed by ``modes_in`` and rows by ``modes_out``.
    """

    __slots__ = ("modes_in", "modes_out", "matrix", "name", "_index_out")

    def __init__(
        self,
        modes_in: Sequence[ModeLabel],
        modes_out: Sequence[ModeLabel],
        matrix,
        name: str = "",
        check: bool = True,
    ):
        self.modes_in = tuple(modes_in)
        self.modes_out = tuple(modes_out)
        if len(set(self.modes_in)) != len(self.modes_in):
            raise ValueError("duplicate input modes")
        if len(set(self.modes_out)) != len(self.modes_out):
            raise ValueError("duplicate output modes")
        mat = np.array(matrix, dtype=complex)
        mat.setflags(write=False)
        if mat.shape != (len(self.modes_out), len(self.modes_in)):
            raise ValueError(
                f"matrix shape {mat.shape} does not match "
                f"{len(self.modes_out)} outputs x {len(self.modes_in)} inputs"
            )
        self.matrix = mat
        self.name = name
        self._index_out = {m: j for j, m in enumerate(self.modes_out)}
        if check:
            dev = self.isometry_deviation()
            if dev > ISOMETRY_TOL:
                raise ValueError(f"map {name or ''} is not an isometry: max |U^dag U - I| = {dev:.3e}")

    def isometry_deviation(self) -> float:
        u = self.matrix
        if u.size == 0:
            return 0.0
        return float(np.abs(u.conj().T @ u - np.eye(u.shape[1])).max())

    def image(self, m: ModeLabel) -> dict[ModeLabel, complex]:
        """Image of one creation operator as ``{output mode: coefficient}``."""
        try:
            i = self.modes_in.index(m)
        except ValueError:
            return {m: 1.0 + 0j}
        col = self.matrix[:, i]
        return {self.modes_out[j]: complex(c) for j, c in enumerate(col) if abs(c) > MERGE_TOL}

    def then(self, other: "TransferMap", name: str = "") -> "TransferMap":
        """Compose: apply ``self`` first, then ``other``."""
        ins = list(self.modes_in)
        ins += [m for m in other.modes_in if m not in self.modes_out and m not in ins]
        images = []
        for m in ins:
            img: dict[ModeLabel, complex] = {}
            for mid, c in self.image(m).items():
                for out, d in other.image(mid).items():
                    img[out] = img.get(out, 0) + c * d
            images.append(img)
        return TransferMap.from_images(ins, images, name=name or f"{self.name}>{other.name}")

    @classmethod
    def from_images(
        cls,
        modes_in: Sequence[ModeLabel],
        images: Sequence[Mapping[ModeLabel, complex]],
        name: str = "",
        check: bool = True,
    ) -> "TransferMap":
        outs = sorted({m for img in images for m, c in img.items() if abs(c) > MERGE_TOL})
        idx = {m: j for j, m in enumerate(outs)}
        mat = np.zeros((len(outs), len(modes_in)), dtype=complex)
        for i, img in enumerate(images):
            for m, c in img.items():
                if abs(c) > MERGE_TOL:
                    mat[idx[m], i] = c
        return cls(modes_in, outs, mat, name=name, check=check)

    def __repr__(self) -> str:
        return f"TransferMap({self.name!r}, {len(self.modes_in)} in -> {len(self.modes_out)} out)"


def identity_map(modes: Sequence[ModeLabel]) -> TransferMap:
    return TransferMap(modes, modes, np.eye(len(modes)), name="identity")


def compose(maps: Iterable[TransferMap], name: str = "") -> TransferMap:
    maps = list(maps)
    if not maps:
        raise ValueError("nothing to compose")
    out = maps[0]
    for m in maps[1:]:
        out = out.then(m)
    if name:
        out = TransferMap(out.modes_in, out.modes_out, out.matrix, name=name, check=False)
    return out


def _expand_product(factors: list[dict[ModeLabel, complex]]) -> dict[Occupation, complex]:
    """Multiply linear forms in creation operators into monomial coefficients."""
    poly: dict[tuple[ModeLabel, ...], complex] = {(): 1.0 + 0j}
    for factor in factors:
        nxt: dict[tuple[ModeLabel, ...], complex] = {}
        for mono, c in poly.items():
            for m, d in factor.items():
                key = tuple(sorted(mono + (m,)))
                nxt[key] = nxt.get(key, 0) + c * d
        poly = nxt
    return {occupation_from_modes(k): v for k, v in poly.items()}


def apply_transfer(state: PhotonicState, tmap: TransferMap) -> PhotonicState:
    """Substitute every creation operator by its image and expand."""
    dev = tmap.isometry_deviation()
    if dev > ISOMETRY_TOL:
        raise ValueError(f"refusing non-isometric map: max |U^dag U - I| = {dev:.3e}")
    images: dict[ModeLabel, dict[ModeLabel, complex]] = {}
    out: dict[Occupation, complex] = {}
    for occ, amp in state:
        factors = []
        for m, n in occ:
            if m not in images:
                images[m] = tmap.image(m)
            factors.extend([images[m]] * n)
        # strip the input sqrt(n!) then restore it for each output monomial
        scale = amp / math.sqrt(_factorial_weight(occ))
        for out_occ, c in _expand_product(factors).items():
            out[out_occ] = out.get(out_occ, 0) + scale * c * math.sqrt(_factorial_weight(out_occ))
    return PhotonicState(out)


def inner_product(s1: PhotonicState, s2: PhotonicState) -> complex:
    """Return ``<s1|s2>``; zero if the photon numbers differ."""
    if s1.photon_number != s2.photon_number:
        return 0j
    a2 = s2.amplitudes
    return complex(sum(a.conjugate() * a2.get(o, 0) for o, a in s1))


def equal_up_to_phase(s1: PhotonicState, s2: PhotonicState, tol: float = 1e-10) -> bool:
    """True when the two states agree amplitude-wise after removing a global phase."""
    ov = inner_product(s2, s1)
    phase = ov / abs(ov) if abs(ov) > tol else 1.0
    keys = set(s1.amplitudes) | set(s2.amplitudes)
    return all(abs(s1.amplitude(k) - phase * s2.amplitude(k)) <= tol for k in keys)


def detector_key(m: ModeLabel) -> tuple[str, Pol]:
    return (m.spatial, m.polarization)


def pattern_probability(
    state: PhotonicState,
    pattern: Mapping[tuple[str, Pol | str], int],
    trace_out_temporal: bool = True,
) -> float:
    """Probability of a photon-number pattern over (spatial, polarization) detectors.

    With ``trace_out_temporal`` the detectors cannot resolve temporal bins, so
    every temporal assignment consistent with the pattern is summed.
    Otherwise ``pattern`` keys may be :class:`ModeLabel` and only bin 0 is
    implied for plain ``(spatial, pol)`` keys.
    """
    want: dict = {}
    for k, n in pattern.items():
        if n <= 0:
            continue
        if isinstance(k, ModeLabel):
            key = k if not trace_out_temporal else detector_key(k)
        else:
            key = (k[0], Pol(k[1]))
            if not trace_out_temporal:
                key = ModeLabel(key[0], key[1], 0)
        want[key] = want.get(key, 0) + int(n)
    total = sum(want.values())
    if total != state.photon_number:
        raise ValueError(
            f"pattern holds {total} photons but the state has {state.photon_number}"
        )
    prob = 0.0
    for occ, amp in state:
        seen: dict = {}
        for m, n in occ:
            key = detector_key(m) if trace_out_temporal else m
            seen[key] = seen.get(key, 0) + n
        if seen == want:
            prob += abs(amp) ** 2
    return prob


def all_patterns(detectors: Sequence, n_photons: int) -> Iterator[dict]:
    """Every way of placing ``n_photons`` indistinguishable clicks on ``detectors``."""
    k = len(detectors)
    for counts in product(range(n_photons + 1), repeat=k):
        if sum(counts) == n_photons:
            yield {d: c for d, c in zip(detectors, counts) if c}
