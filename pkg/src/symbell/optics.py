"""Transfer maps for the optical elements of the Bell-measurement circuits.

Phase conventions: PBS reflection picks up ``i``, BS reflection picks up
``i`` on both sides, transmission is phase free.  Every factory acts
identically on each temporal bin listed in ``bins``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock import ModeLabel, Pol, TransferMap

H, V = Pol.H, Pol.V
DEFAULT_BINS = (0, 1)


@dataclass(frozen=True)
class DelayModel:
    """Gaussian wavepacket overlap ``exp(-l^2 / (2 l_c^2))`` for a delay ``l``.

    ``gamma`` overrides the wavepacket model when given.
    """

    delay: float = 0.0
    coherence_length: float = 1.0
    gamma: float | None = None

    def __post_init__(self):
        if self.gamma is not None and not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"overlap must lie in [0, 1], got {self.gamma}")
        if self.gamma is None and self.coherence_length <= 0:
            raise ValueError("coherence length must be positive")

    @classmethod
    def from_overlap(cls, gamma: float) -> "DelayModel":
        return cls(gamma=float(gamma))

    @property
    def overlap(self) -> float:
        if self.gamma is not None:
            return self.gamma
        return math.exp(-self.delay**2 / (2 * self.coherence_length**2))

    def at(self, delay: float) -> "DelayModel":
        return DelayModel(delay=delay, coherence_length=self.coherence_length)


def _check_labels(ins: Sequence[str], outs: Sequence[str]):
    labels = list(ins) + list(outs)
    if len(set(labels)) != len(labels):
        raise ValueError(f"spatial label collision among {labels}")


def pbs(in1: str, in2: str, out1: str, out2: str, bins: Sequence[int] = DEFAULT_BINS) -> TransferMap:
    """Polarizing beamsplitter: H transmitted, V reflected with phase ``i``.

    ``in1_H -> out1_H``, ``in1_V -> i out2_V``, ``in2_H -> out2_H``,
    ``in2_V -> i out1_V``.
    """
    _check_labels((in1, in2), (out1, out2))
    ins, cols = [], []
    for t in bins:
        ins += [ModeLabel(in1, H, t), ModeLabel(in1, V, t), ModeLabel(in2, H, t), ModeLabel(in2, V, t)]
        cols += [
            {ModeLabel(out1, H, t): 1},
            {ModeLabel(out2, V, t): 1j},
            {ModeLabel(out2, H, t): 1},
            {ModeLabel(out1, V, t): 1j},
        ]
    return TransferMap.from_images(ins, cols, name=f"PBS({in1},{in2}->{out1},{out2})")


def hwp(theta: float, spatial: str, bins: Sequence[int] = DEFAULT_BINS) -> TransferMap:
    """Half-wave plate with its fast axis at ``theta`` degrees.

    Jones matrix ``[[cos 2t, sin 2t], [sin 2t, -cos 2t]]`` on (H, V).
    """
    t2 = math.radians(2 * theta)
    c, s = math.cos(t2), math.sin(t2)
    jones = np.array([[c, s], [s, -c]])
    modes = [ModeLabel(spatial, p, t) for t in bins for p in (H, V)]
    mat = np.kron(np.eye(len(bins)), jones)
    return TransferMap(modes, modes, mat, name=f"HWP({theta:g},{spatial})")


def bs(in1: str, in2: str, out1: str, out2: str, bins: Sequence[int] = DEFAULT_BINS) -> TransferMap:
    """Symmetric 50:50 beamsplitter, polarization independent.

    ``in1 -> (out1 + i out2)/sqrt2``, ``in2 -> (i out1 + out2)/sqrt2``.
    """
    _check_labels((in1, in2), (out1, out2))
    r = 1 / math.sqrt(2)
    ins, cols = [], []
    for t in bins:
        for p in (H, V):
            ins += [ModeLabel(in1, p, t), ModeLabel(in2, p, t)]
            cols += [
                {ModeLabel(out1, p, t): r, ModeLabel(out2, p, t): 1j * r},
                {ModeLabel(out1, p, t): 1j * r, ModeLabel(out2, p, t): r},
            ]
    return TransferMap.from_images(ins, cols, name=f"BS({in1},{in2}->{out1},{out2})")


def ring_exchange(paths: Sequence[str], bins: Sequence[int] = DEFAULT_BINS) -> TransferMap:
    """Cyclic relabelling ``paths[k] -> paths[k+1]`` with unit coefficient."""
    if len(set(paths)) != len(paths) or len(paths) < 2:
        raise ValueError(f"ring exchange needs at least two distinct paths, got {list(paths)}")
    n = len(paths)
    ins, cols = [], []
    for t in bins:
        for p in (H, V):
            for k, path in enumerate(paths):
                ins.append(ModeLabel(path, p, t))
                cols.append({ModeLabel(paths[(k + 1) % n], p, t): 1})
    return TransferMap.from_images(ins, cols, name="C(" + "->".join(paths) + ")")


def circulator_exchange(path_a: str, path_b: str, bins: Sequence[int] = DEFAULT_BINS) -> TransferMap:
    """Lossless, phase-free swap of two paths (a pair of circulators)."""
    if path_a == path_b:
        raise ValueError("circulator exchange needs two distinct paths")
    return ring_exchange((path_a, path_b), bins)


def delay(model: DelayModel | float, spatial: str) -> TransferMap:
    """Optical delay on ``spatial``: bin 0 -> gamma bin 0 + sqrt(1 - gamma^2) bin 1."""
    gamma = model.overlap if isinstance(model, DelayModel) else float(model)
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"overlap must lie in [0, 1], got {gamma}")
    rest = math.sqrt(max(0.0, 1.0 - gamma**2))
    ins, cols = [], []
    for p in (H, V):
        ins.append(ModeLabel(spatial, p, 0))
        cols.append({ModeLabel(spatial, p, 0): gamma, ModeLabel(spatial, p, 1): rest})
    return TransferMap.from_images(ins, cols, name=f"delay({gamma:.6g},{spatial})")
