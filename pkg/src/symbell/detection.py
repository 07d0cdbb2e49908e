"""Detector read-out, Bell-verdict classification and heralded post-selection."""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .circuits import CircuitSpec, detector_index
from .fock import MERGE_TOL, PhotonicState, Pol, detector_key
from .io import SCHEMA_VERSION, strip_comments


@dataclass(frozen=True, order=True)
class DetectionPattern:
    """Photon counts per detector id, canonically ordered by detector number."""

    counts: tuple[tuple[str, int], ...]

    @classmethod
    def of(cls, counts: Mapping[str, int] | Iterable[str]) -> "DetectionPattern":
        if not isinstance(counts, Mapping):
            tally: dict[str, int] = {}
            for d in counts:
                tally[d] = tally.get(d, 0) + 1
            counts = tally
        for d, n in counts.items():
            detector_index(d)
            if n < 0:
                raise ValueError(f"negative count for {d}")
        items = sorted(((d, int(n)) for d, n in counts.items() if n > 0), key=lambda x: detector_index(x[0]))
        return cls(tuple(items))

    @classmethod
    def parse(cls, text: str) -> "DetectionPattern":
        """Parse ``D1,D3`` (comma list, repeats allowed) or the short ``D13`` form."""
        text = text.strip()
        if "," in text or text.count("D") > 1:
            return cls.of([t.strip() for t in text.split(",") if t.strip()])
        if not text.startswith("D") or not text[1:].isdigit():
            raise ValueError(f"cannot parse detection pattern {text!r}")
        digits = text[1:]
        if len(digits) == 1:
            return cls.of([text])
        # short form: one digit per detector, only unambiguous below D10
        return cls.of([f"D{c}" for c in digits])

    @property
    def total(self) -> int:
        return sum(n for _, n in self.counts)

    def as_dict(self) -> dict[str, int]:
        return dict(self.counts)

    def detectors(self) -> list[str]:
        return [d for d, n in self.counts for _ in range(n)]

    def __str__(self) -> str:
        return ",".join(self.detectors())

    def short(self) -> str:
        """``D13``/``D11`` style label used in coincidence plots."""
        return "D" + "".join(d[1:] for d in self.detectors())


PatternLike = DetectionPattern | str | Mapping[str, int]


def as_pattern(p: PatternLike) -> DetectionPattern:
    if isinstance(p, DetectionPattern):
        return p
    if isinstance(p, str):
        return DetectionPattern.parse(p)
    return DetectionPattern.of(p)


def parse_class(text: str) -> frozenset[DetectionPattern]:
    """``D13+D24`` -> the set of the two coincidence patterns."""
    return frozenset(DetectionPattern.parse(t) for t in text.split("+") if t.strip())


class OutcomeDistribution:
    """Probability per detection pattern; zero-probability patterns are not stored."""

    def __init__(self, entries: Mapping[DetectionPattern, float]):
        self.entries = dict(sorted((as_pattern(k), float(v)) for k, v in entries.items()))

    def __getitem__(self, pattern: PatternLike) -> float:
        return self.entries.get(as_pattern(pattern), 0.0)

    def probability(self, pattern: PatternLike) -> float:
        return self[pattern]

    def class_probability(self, patterns: Iterable[PatternLike] | str) -> float:
        if isinstance(patterns, str):
            patterns = parse_class(patterns)
        return sum(self[p] for p in set(as_pattern(p) for p in patterns))

    def total(self) -> float:
        return sum(self.entries.values())

    def items(self):
        return self.entries.items()

    def __len__(self):
        return len(self.entries)

    def support(self, tol: float = 1e-12) -> dict[DetectionPattern, float]:
        return {k: v for k, v in self.entries.items() if v > tol}

    def to_rows(self) -> list[tuple[str, float]]:
        return [(str(k), v) for k, v in self.entries.items()]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["pattern", "probability"])
        for k, v in self.to_rows():
            w.writerow([k, repr(v)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "OutcomeDistribution":
        rows = list(csv.DictReader(io.StringIO(strip_comments(text))))
        return cls({DetectionPattern.parse(r["pattern"]): float(r["probability"]) for r in rows})

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema_version": SCHEMA_VERSION,
                "outcomes": [{"pattern": k, "probability": v} for k, v in self.to_rows()],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "OutcomeDistribution":
        raw = json.loads(text)
        return cls({DetectionPattern.parse(r["pattern"]): r["probability"] for r in raw["outcomes"]})


def measure(state: PhotonicState, spec: CircuitSpec) -> OutcomeDistribution:
    """Number-resolving, temporal-bin-blind read-out of a circuit output state."""
    probs: dict[DetectionPattern, float] = {}
    for occ, amp in state:
        tally: dict[str, int] = {}
        for m, n in occ:
            det = spec.wiring.get(detector_key(m))
            if det is None:
                raise ValueError(f"mode {m} carries amplitude but is not wired to a detector")
            tally[det] = tally.get(det, 0) + n
        pat = DetectionPattern.of(tally)
        probs[pat] = probs.get(pat, 0.0) + abs(amp) ** 2
    return OutcomeDistribution({k: min(v, 1.0) for k, v in probs.items()})


def simulate(input_state: PhotonicState, spec: CircuitSpec) -> OutcomeDistribution:
    return measure(spec.propagate(input_state), spec)


class BsmVerdict(str, enum.Enum):
    PhiPlus = "phi+"
    PhiMinus = "phi-"
    PsiPlus = "psi+"
    PsiMinus = "psi-"
    Inconclusive = "inconclusive"


_TABLES = {
    "symmetric_bsm": {
        ("D1", "D3"): BsmVerdict.PhiPlus,
        ("D2", "D4"): BsmVerdict.PhiPlus,
        ("D1", "D4"): BsmVerdict.PhiMinus,
        ("D2", "D3"): BsmVerdict.PhiMinus,
    },
    "standard_bsm": {
        ("D1", "D2"): BsmVerdict.PsiPlus,
        ("D3", "D4"): BsmVerdict.PsiPlus,
        ("D1", "D4"): BsmVerdict.PsiMinus,
        ("D2", "D3"): BsmVerdict.PsiMinus,
    },
}


def _scheme_name(scheme) -> str:
    name = scheme.name if isinstance(scheme, CircuitSpec) else str(scheme)
    return {"standard": "standard_bsm", "symmetric": "symmetric_bsm", "ghz": "ghz_n"}.get(name, name)


def classify(pattern: PatternLike, scheme: str | CircuitSpec) -> BsmVerdict:
    """Table-driven verdict; the ring (GHZ) scheme uses V-detector parity.

    For ``ghz_n`` a pattern with exactly one click per party is ``PhiPlus``
    when an even number of V detectors fired and ``PhiMinus`` otherwise.
    """
    pattern = as_pattern(pattern)
    name = _scheme_name(scheme)
    if name == "ghz_n":
        parity = v_parity(pattern)
        if parity is None:
            return BsmVerdict.Inconclusive
        return BsmVerdict.PhiPlus if parity == 0 else BsmVerdict.PhiMinus
    if name not in _TABLES:
        raise ValueError(f"unknown scheme {scheme!r}")
    return _TABLES[name].get(tuple(pattern.detectors()), BsmVerdict.Inconclusive)


def v_parity(pattern: PatternLike, parties: int | None = None) -> int | None:
    """V-click parity for one-click-per-party patterns of the ring circuits, else None.

    Party k owns D(2k+1) (H) and D(2k+2) (V).
    """
    pattern = as_pattern(pattern)
    seen: dict[int, int] = {}
    v_count = 0
    for d, n in pattern.counts:
        idx = detector_index(d) - 1
        party = idx // 2
        seen[party] = seen.get(party, 0) + n
        if idx % 2 == 1:
            v_count += n
    if any(n != 1 for n in seen.values()):
        return None
    if parties is not None and len(seen) != parties:
        return None
    return v_count % 2


def verdict_probabilities(dist: OutcomeDistribution, scheme) -> dict[BsmVerdict, float]:
    out = {v: 0.0 for v in BsmVerdict}
    for pat, p in dist.items():
        out[classify(pat, scheme)] += p
    return out


@dataclass(frozen=True)
class HeraldResult:
    """Post-selected polarization state; ``rho`` is None when nothing heralds."""

    rho: np.ndarray | None
    probability: float

    @property
    def heralded(self) -> bool:
        return self.rho is not None


def herald_projection(state: PhotonicState, ports) -> tuple[np.ndarray, float]:
    """Project a prepared state onto one photon per port and trace out temporal bins.

    Returns the unnormalized density matrix over the port qubits (H=0, V=1,
    first port most significant) and its trace.
    """
    ports = list(ports)
    n = len(ports)
    port_idx = {p: k for k, p in enumerate(ports)}
    # environment (temporal bins of each port) -> qubit amplitude vector
    branches: dict[tuple[int, ...], np.ndarray] = {}
    for occ, amp in state:
        slots: list = [None] * n
        ok = True
        for m, cnt in occ:
            k = port_idx.get(m.spatial)
            if k is None or cnt != 1 or slots[k] is not None:
                ok = False
                break
            slots[k] = m
        if not ok or any(s is None for s in slots):
            continue
        index = 0
        for m in slots:
            index = 2 * index + (1 if m.polarization is Pol.V else 0)
        env = tuple(m.temporal for m in slots)
        vec = branches.setdefault(env, np.zeros(2**n, dtype=complex))
        vec[index] += amp
    rho = np.zeros((2**n, 2**n), dtype=complex)
    for vec in branches.values():
        rho += np.outer(vec, vec.conj())
    return rho, float(np.real(np.trace(rho)))


def heralded_state(input_state: PhotonicState, spec: CircuitSpec) -> HeraldResult:
    """Run the preparation section and post-select one photon per output port."""
    prepared = spec.prepare(input_state)
    rho, prob = herald_projection(prepared, spec.herald_ports)
    if prob <= MERGE_TOL:
        return HeraldResult(None, 0.0)
    rho = rho / prob
    return HeraldResult((rho + rho.conj().T) / 2, prob)
