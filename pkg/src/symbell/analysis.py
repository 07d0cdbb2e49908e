"""HOM delay scans, visibility, QBER and two-qubit entanglement metrics."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .circuits import CircuitSpec
from .detection import (
    BsmVerdict,
    DetectionPattern,
    as_pattern,
    parse_class,
    simulate,
    verdict_probabilities,
)
from .fock import PhotonicState
from .optics import DelayModel

_PAULI_Y = np.array([[0, -1j], [1j, 0]])


def class_label(patterns) -> str:
    return "+".join(sorted(as_pattern(p).short() for p in patterns))


def _normalize_classes(classes) -> dict[str, frozenset[DetectionPattern]]:
    if isinstance(classes, Mapping):
        items = classes.items()
    else:
        items = []
        for c in classes:
            if isinstance(c, str):
                items.append((c, parse_class(c)))
            else:
                pats = frozenset(as_pattern(p) for p in c)
                items.append((class_label(pats), pats))
    out = {}
    for label, pats in items:
        pats = parse_class(pats) if isinstance(pats, str) else frozenset(as_pattern(p) for p in pats)
        out[label] = pats
    seen: set = set()
    for pats in out.values():
        if seen & pats:
            raise ValueError("coincidence classes must be disjoint")
        seen |= pats
    return out


def visibility(c_zero: float, c_far: float) -> float:
    """Relative depth of a dip, or height of a peak, against the distinguishable baseline.

    A class that is empty at both points carries no interference signal and
    gets visibility 0.
    """
    if c_far <= 0.0:
        if c_zero <= 0.0:
            return 0.0
        raise ValueError("visibility undefined: zero baseline but non-zero signal")
    return abs(c_far - c_zero) / c_far


@dataclass
class HomScan:
    delays: np.ndarray
    series: dict[str, np.ndarray]
    c_zero: dict[str, float]
    c_far: dict[str, float]
    visibility: dict[str, float] = field(init=False)
    kind: dict[str, str] = field(init=False)

    def __post_init__(self):
        self.visibility = {k: visibility(self.c_zero[k], self.c_far[k]) for k in self.series}
        self.kind = {}
        for k in self.series:
            if self.c_zero[k] < self.c_far[k]:
                self.kind[k] = "dip"
            elif self.c_zero[k] > self.c_far[k]:
                self.kind[k] = "peak"
            else:
                self.kind[k] = "flat"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["l", "class", "probability"])
        for label, values in self.series.items():
            for l, p in zip(self.delays, values):
                w.writerow([repr(float(l)), label, repr(float(p))])
        return buf.getvalue()


def hom_scan(
    circuit: CircuitSpec,
    state: PhotonicState,
    delays: Sequence[float],
    classes,
    coherence_length: float | None = None,
    workers: int = 1,
) -> HomScan:
    """Class probabilities as the delay on input b is scanned.

    ``classes`` is a list of ``"D13+D24"`` strings, a list of pattern sets,
    or a label -> patterns mapping.  The baseline for visibility is taken at
    zero overlap exactly.
    """
    delays = np.asarray(list(delays), dtype=float)
    if delays.size == 0:
        raise ValueError("empty delay list")
    classes = _normalize_classes(classes)
    lc = coherence_length if coherence_length is not None else circuit.delay.coherence_length

    def point(model: DelayModel) -> dict[str, float]:
        dist = simulate(state, circuit.with_delay(model))
        return {k: min(1.0, dist.class_probability(p)) for k, p in classes.items()}

    models = [DelayModel(delay=float(l), coherence_length=lc) for l in delays]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(point, models))
    else:
        rows = [point(m) for m in models]
    series = {k: np.array([r[k] for r in rows]) for k in classes}
    at_zero = point(DelayModel.from_overlap(1.0))
    at_far = point(DelayModel.from_overlap(0.0))
    return HomScan(delays, series, at_zero, at_far)


def qber(circuit: CircuitSpec, state: PhotonicState, gamma: float | None = None) -> float:
    """Wrong verdicts over conclusive verdicts for a phi+ or phi- input."""
    if gamma is not None:
        circuit = circuit.with_delay(gamma)
    dist = simulate(state, circuit)
    verdicts = verdict_probabilities(dist, circuit)
    plus, minus = verdicts[BsmVerdict.PhiPlus], verdicts[BsmVerdict.PhiMinus]
    conclusive = plus + minus
    if conclusive <= 1e-12:
        raise ValueError("no conclusive BSM outcomes for this input")
    # the intended verdict is the majority one at perfect overlap
    ideal = verdict_probabilities(simulate(state, circuit.with_delay(1.0)), circuit)
    right = BsmVerdict.PhiPlus if ideal[BsmVerdict.PhiPlus] >= ideal[BsmVerdict.PhiMinus] else BsmVerdict.PhiMinus
    wrong = minus if right is BsmVerdict.PhiPlus else plus
    return wrong / conclusive


def fidelity(rho: np.ndarray, target: np.ndarray) -> float:
    """Overlap ``<target|rho|target>`` with a pure target state."""
    target = np.asarray(target, dtype=complex)
    target = target / np.linalg.norm(target)
    return float(np.real(target.conj() @ rho @ target))


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    Uses the singular values of ``tau_ij = w_i^T (Y x Y) w_j`` over the
    subnormalized eigenvectors ``w_i`` of rho, which equal the square roots
    of the eigenvalues of ``rho rho_tilde`` without taking square roots of
    round-off.
    """
    rho = np.asarray(rho, dtype=complex)
    rho = (rho + rho.conj().T) / 2
    p, vecs = np.linalg.eigh(rho)
    p = np.where(p > 1e-14, p, 0.0)
    w = vecs * np.sqrt(p)
    tau = w.T @ np.kron(_PAULI_Y, _PAULI_Y) @ w
    lam = np.linalg.svd(tau, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1:].sum()))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return float(0.5 * np.abs(np.linalg.eigvalsh(rho - sigma)).sum())


def success_probability(circuit: CircuitSpec, inputs: Mapping[str, PhotonicState]) -> float:
    """Average conclusive-verdict probability over the given inputs."""
    total = 0.0
    for state in inputs.values():
        v = verdict_probabilities(simulate(state, circuit), circuit)
        total += 1.0 - v[BsmVerdict.Inconclusive]
    return total / len(inputs)
