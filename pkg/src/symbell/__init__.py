"""Exact Fock-space simulation of polarization Bell-state measurement and preparation."""

from .analysis import concurrence, fidelity, hom_scan, qber
from .circuits import CircuitSpec, ghz_circuit, standard_bsm, symmetric_bsm
from .detection import (
    BsmVerdict,
    DetectionPattern,
    OutcomeDistribution,
    classify,
    heralded_state,
    measure,
    simulate,
)
from .fock import (
    ModeLabel,
    PhotonicState,
    Pol,
    TransferMap,
    apply_transfer,
    inner_product,
    make_state,
    pattern_probability,
)
from .optics import DelayModel, bs, circulator_exchange, delay, hwp, pbs
from .states import input_state
from .tomography import reconstruct, simulate_tomography

__version__ = "0.1.0"

__all__ = [
    "BsmVerdict",
    "CircuitSpec",
    "DelayModel",
    "DetectionPattern",
    "ModeLabel",
    "OutcomeDistribution",
    "PhotonicState",
    "Pol",
    "TransferMap",
    "apply_transfer",
    "bs",
    "circulator_exchange",
    "classify",
    "concurrence",
    "delay",
    "fidelity",
    "ghz_circuit",
    "heralded_state",
    "hom_scan",
    "hwp",
    "inner_product",
    "input_state",
    "make_state",
    "measure",
    "pattern_probability",
    "pbs",
    "qber",
    "reconstruct",
    "simulate",
    "simulate_tomography",
    "standard_bsm",
    "symmetric_bsm",
]
