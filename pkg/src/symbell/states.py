"""Named polarization-qubit inputs encoded as single photons on input paths."""

from __future__ import annotations

import math
from itertools import product
from typing import Sequence

import numpy as np

from .fock import ModeLabel, Pol, PhotonicState, make_state

R2 = 1 / math.sqrt(2)

# single-qubit polarization vectors on (H, V)
POLARIZATIONS = {
    "H": np.array([1, 0], dtype=complex),
    "V": np.array([0, 1], dtype=complex),
    "D": np.array([R2, R2], dtype=complex),
    "A": np.array([R2, -R2], dtype=complex),
    "R": np.array([R2, -1j * R2], dtype=complex),
    "L": np.array([R2, 1j * R2], dtype=complex),
}

BELL_NAMES = ("phi+", "phi-", "psi+", "psi-")


def ghz_vector(n: int, sign: int = +1) -> np.ndarray:
    vec = np.zeros(2**n, dtype=complex)
    vec[0] = R2
    vec[-1] = sign * R2
    return vec


def bell_vector(name: str) -> np.ndarray:
    """Qubit vector in the HH, HV, VH, VV basis."""
    vecs = {
        "phi+": [R2, 0, 0, R2],
        "phi-": [R2, 0, 0, -R2],
        "psi+": [0, R2, R2, 0],
        "psi-": [0, R2, -R2, 0],
    }
    try:
        return np.array(vecs[name], dtype=complex)
    except KeyError:
        raise ValueError(f"unknown Bell state {name!r}") from None


def product_vector(pols: str) -> np.ndarray:
    vec = np.ones(1, dtype=complex)
    for ch in pols:
        if ch not in POLARIZATIONS:
            raise ValueError(f"unknown polarization {ch!r} in {pols!r}")
        vec = np.kron(vec, POLARIZATIONS[ch])
    return vec


def named_vector(name: str, n: int = 2) -> np.ndarray:
    """Resolve ``phi+``/``psi-``/``ghz+``/``ghz-`` or a product string such as ``DA``."""
    if name in BELL_NAMES:
        if n != 2:
            raise ValueError(f"{name} is a two-qubit state but {n} parties were requested")
        return bell_vector(name)
    if name in ("ghz+", "ghz-"):
        return ghz_vector(n, +1 if name.endswith("+") else -1)
    if len(name) == 1 and name in POLARIZATIONS:
        name = name * n
    if len(name) != n:
        raise ValueError(f"product state {name!r} does not have {n} qubits")
    return product_vector(name)


def photons_from_qubits(vec: Sequence[complex], ports: Sequence[str]) -> PhotonicState:
    """One photon per port; qubit k (H=0, V=1) lives on ``ports[k]``."""
    vec = np.asarray(vec, dtype=complex)
    n = len(ports)
    if vec.shape != (2**n,):
        raise ValueError(f"expected {2**n} amplitudes for {n} ports, got {vec.shape}")
    terms = []
    for idx, bits in enumerate(product((Pol.H, Pol.V), repeat=n)):
        if vec[idx] != 0:
            occ = {ModeLabel(port, b, 0): 1 for port, b in zip(ports, bits)}
            terms.append((occ, vec[idx]))
    return make_state(terms)


def input_state(name: str, ports: Sequence[str]) -> PhotonicState:
    return photons_from_qubits(named_vector(name, len(ports)), ports)
