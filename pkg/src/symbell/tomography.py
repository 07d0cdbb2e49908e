"""Simulated two-qubit polarization tomography and linear-inversion reconstruction.

The 36 projectors are all pairs from {H, V, D, A, R, L}.  They are grouped
into nine basis settings (Z, X, Y on each qubit) with four outcomes each;
counts for one setting are multinomial.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from itertools import product

import numpy as np

from .io import strip_comments
from .states import POLARIZATIONS

BASES = {"Z": ("H", "V"), "X": ("D", "A"), "Y": ("R", "L")}
SETTINGS = tuple(b1 + b2 for b1 in BASES for b2 in BASES)


def outcomes(setting: str) -> list[str]:
    b1, b2 = setting
    return [p + q for p in BASES[b1] for q in BASES[b2]]


def projector(pair: str) -> np.ndarray:
    v = np.kron(POLARIZATIONS[pair[0]], POLARIZATIONS[pair[1]])
    return np.outer(v, v.conj())


def born_probabilities(rho: np.ndarray, settings=SETTINGS) -> dict[str, np.ndarray]:
    out = {}
    for s in settings:
        p = np.array([np.real(np.trace(projector(o) @ rho)) for o in outcomes(s)])
        out[s] = np.clip(p, 0.0, None)
    return out


@dataclass
class TomographyCounts:
    """Counts per (setting, outcome); ``shots`` is None for exact probabilities."""

    counts: dict[str, np.ndarray]
    shots: int | None = None

    def frequencies(self) -> dict[str, float]:
        freqs = {}
        for s, c in self.counts.items():
            total = c.sum()
            for o, n in zip(outcomes(s), c):
                freqs[o] = float(n / total) if total > 0 else 0.0
        return freqs

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["setting", "outcome", "count"])
        for s, c in self.counts.items():
            for o, n in zip(outcomes(s), c):
                w.writerow([s, o, int(n) if self.shots is not None else repr(float(n))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TomographyCounts":
        rows = list(csv.DictReader(io.StringIO(strip_comments(text))))
        table: dict[str, dict[str, float]] = {}
        exact = False
        for r in rows:
            val = float(r["count"])
            exact |= not r["count"].lstrip("-").isdigit()
            table.setdefault(r["setting"], {})[r["outcome"]] = val
        counts = {s: np.array([table[s].get(o, 0.0) for o in outcomes(s)]) for s in table}
        shots = None if exact else int(max(c.sum() for c in counts.values()))
        return cls(counts, shots)


def simulate_tomography(rho: np.ndarray, shots: int | None, seed: int = 0, settings=SETTINGS) -> TomographyCounts:
    """Multinomial counts per basis setting from the Born rule.

    Each setting draws from its own stream spawned from ``seed``, so the
    result does not depend on evaluation order.  ``shots=None`` (or 0)
    returns the exact probabilities instead.
    """
    probs = born_probabilities(rho, settings)
    if not shots:
        return TomographyCounts(probs, None)
    if shots < 0:
        raise ValueError("shots must be positive")
    streams = np.random.SeedSequence(seed).spawn(len(settings))
    counts = {}
    for s, ss in zip(settings, streams):
        p = probs[s] / probs[s].sum()
        counts[s] = np.random.default_rng(ss).multinomial(shots, p)
    return TomographyCounts(counts, shots)


def _hermitian_basis() -> list[np.ndarray]:
    paulis = [
        np.eye(2),
        np.array([[0, 1], [1, 0]]),
        np.array([[0, -1j], [1j, 0]]),
        np.array([[1, 0], [0, -1]]),
    ]
    return [np.kron(a, b) / 2 for a, b in product(paulis, repeat=2)]


def physical_projection(rho: np.ndarray) -> np.ndarray:
    """Nearest-spectrum PSD, unit-trace matrix: clip negative eigenvalues, renormalize."""
    rho = (rho + rho.conj().T) / 2
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        raise ValueError("reconstruction has no positive spectrum")
    w = w / w.sum()
    return (v * w) @ v.conj().T


def reconstruct(data: TomographyCounts) -> np.ndarray:
    """Least-squares linear inversion followed by physical projection."""
    freqs = data.frequencies()
    pairs = sorted(freqs)
    basis = _hermitian_basis()
    design = np.array([[np.real(np.trace(projector(o) @ b)) for b in basis] for o in pairs])
    rank = np.linalg.matrix_rank(design)
    if rank < len(basis):
        missing = [s for s in SETTINGS if s not in data.counts]
        raise ValueError(
            f"settings are not informationally complete (rank {rank} < {len(basis)}); "
            f"missing settings: {', '.join(missing) or 'none'}"
        )
    coeffs, *_ = np.linalg.lstsq(design, np.array([freqs[o] for o in pairs]), rcond=None)
    rho = sum(c * b for c, b in zip(coeffs, basis))
    return physical_projection(rho)
