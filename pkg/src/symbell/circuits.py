"""The three named linear-optical circuits and their detector wiring.

``symmetric_bsm`` is the two-party member of the ring family built by
``ghz_circuit``: each party splits its photon on a PBS, the vertical
amplitudes travel one step around the ring, and every party recombines its
own horizontal amplitude with the incoming vertical one before a 22.5 degree
wave plate and a final PBS in front of two detectors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .fock import ModeLabel, Pol, PhotonicState, TransferMap, apply_transfer
from .optics import DelayModel, bs, delay, hwp, pbs, ring_exchange

H, V = Pol.H, Pol.V

SCHEMES = ("standard_bsm", "symmetric_bsm", "ghz_n")


@dataclass(frozen=True)
class Stage:
    name: str
    maps: tuple[TransferMap, ...]


@dataclass(frozen=True)
class CircuitSpec:
    """A compiled circuit plus the metadata needed to read it out.

    ``prepare_stage`` names the last stage of the state-preparation section;
    ``herald_ports`` are the per-party spatial paths right after it.
    """

    name: str
    parties: int
    delay: DelayModel
    inputs: tuple[str, ...]
    herald_ports: tuple[str, ...]
    wiring: dict[tuple[str, Pol], str]
    stages: tuple[Stage, ...]
    prepare_stage: str
    compiled: TransferMap = field(repr=False, compare=False)

    def __post_init__(self):
        ids = sorted(self.wiring.values(), key=detector_index)
        expected = [f"D{k}" for k in range(1, 2 * self.parties + 1)]
        if ids != expected:
            raise ValueError(f"detector wiring must be a bijection onto {expected}, got {ids}")

    @property
    def detectors(self) -> list[str]:
        return sorted(self.wiring.values(), key=detector_index)

    def input_modes(self) -> list[ModeLabel]:
        return [ModeLabel(s, p, 0) for s in self.inputs for p in (H, V)]

    def step_through(self, state: PhotonicState, upto: str | None = None) -> Iterator[tuple[str, PhotonicState]]:
        """Yield ``(stage name, state after that stage)`` element by element."""
        for stage in self.stages:
            for m in stage.maps:
                state = apply_transfer(state, m)
            yield stage.name, state
            if stage.name == upto:
                return

    def propagate(self, state: PhotonicState, upto: str | None = None) -> PhotonicState:
        """Run ``state`` through the compiled map, or stage by stage up to ``upto``."""
        if upto is None:
            return apply_transfer(state, self.compiled)
        names = [s.name for s in self.stages]
        if upto not in names:
            raise KeyError(f"unknown stage {upto!r}; stages are {names}")
        out = state
        for _, out in self.step_through(state, upto):
            pass
        return out

    def prepare(self, state: PhotonicState) -> PhotonicState:
        return self.propagate(state, upto=self.prepare_stage)

    def with_delay(self, model: DelayModel | float) -> "CircuitSpec":
        if not isinstance(model, DelayModel):
            model = DelayModel.from_overlap(model)
        if self.name == "standard_bsm":
            return standard_bsm(model)
        if self.name == "symmetric_bsm":
            return symmetric_bsm(model)
        return ghz_circuit(self.parties, model)

    def topology(self) -> dict:
        return {
            "name": self.name,
            "parties": self.parties,
            "overlap": self.delay.overlap,
            "inputs": list(self.inputs),
            "herald_ports": list(self.herald_ports),
            "prepare_stage": self.prepare_stage,
            "stages": [
                {
                    "name": s.name,
                    "elements": [
                        {
                            "element": m.name,
                            "modes_in": [str(x) for x in m.modes_in],
                            "modes_out": [str(x) for x in m.modes_out],
                        }
                        for m in s.maps
                    ],
                }
                for s in self.stages
            ],
            "wiring": {f"{sp}_{p.value}": d for (sp, p), d in sorted(self.wiring.items())},
        }

    def topology_json(self) -> str:
        return json.dumps(self.topology(), indent=2)


def detector_index(det: str) -> int:
    if not det.startswith("D") or not det[1:].isdigit():
        raise ValueError(f"bad detector id {det!r}")
    return int(det[1:])


def _compile(inputs: Sequence[ModeLabel], stages: Sequence[Stage], name: str) -> TransferMap:
    images = []
    for m in inputs:
        img: dict[ModeLabel, complex] = {m: 1.0 + 0j}
        for stage in stages:
            for t in stage.maps:
                nxt: dict[ModeLabel, complex] = {}
                for mid, c in img.items():
                    for out, d in t.image(mid).items():
                        nxt[out] = nxt.get(out, 0) + c * d
                img = nxt
        images.append(img)
    return TransferMap.from_images(list(inputs), images, name=name)


def _build(name, parties, model, inputs, herald_ports, wiring, stages, prepare_stage) -> CircuitSpec:
    stages = tuple(stages)
    in_modes = [ModeLabel(s, p, 0) for s in inputs for p in (H, V)]
    return CircuitSpec(
        name=name,
        parties=parties,
        delay=model,
        inputs=tuple(inputs),
        herald_ports=tuple(herald_ports),
        wiring=wiring,
        stages=stages,
        prepare_stage=prepare_stage,
        compiled=_compile(in_modes, stages, name),
    )


def _as_model(model: DelayModel | float | None) -> DelayModel:
    if model is None:
        return DelayModel.from_overlap(1.0)
    if isinstance(model, DelayModel):
        return model
    return DelayModel.from_overlap(model)


def standard_bsm(model: DelayModel | float | None = None) -> CircuitSpec:
    """BS followed by one PBS per output; u -> D1(H), D2(V); v -> D3(H), D4(V)."""
    model = _as_model(model)
    stages = [
        Stage("delay", (delay(model, "b"),)),
        Stage("BS", (bs("a", "b", "u", "v"),)),
        Stage("PBS", (pbs("u", "_u", "u.t", "u.r"), pbs("v", "_v", "v.t", "v.r"))),
    ]
    wiring = {("u.t", H): "D1", ("u.r", V): "D2", ("v.t", H): "D3", ("v.r", V): "D4"}
    return _build("standard_bsm", 2, model, ("a", "b"), ("u", "v"), wiring, stages, "BS")


def _ring_labels(n: int) -> list[dict[str, str]]:
    if n == 2:
        # path names of the two-party drawing
        return [
            {"in": "a", "h": "c", "v": "d", "out": "g"},
            {"in": "b", "h": "f", "v": "e", "out": "h"},
        ]
    return [{"in": f"a{k}", "h": f"c{k}", "v": f"v{k}", "out": f"g{k}"} for k in range(n)]


def _ring_circuit(n: int, model: DelayModel, name: str) -> CircuitSpec:
    parties = _ring_labels(n)
    pbs1, h1, pbs2, h2, pbs3 = [], [], [], [], []
    wiring = {}
    for k, p in enumerate(parties):
        pbs1.append(pbs(p["in"], "_" + p["in"], p["h"], p["v"]))
        # after the ring step, path p["v"] carries the previous party's V amplitude
        h1 += [hwp(45, p["h"]), hwp(45, p["v"])]
        pbs2.append(pbs(p["h"], p["v"], "_" + p["out"], p["out"]))
        h2.append(hwp(22.5, p["out"]))
        t, r = p["out"] + ".t", p["out"] + ".r"
        pbs3.append(pbs(p["out"], "_" + t, t, r))
        wiring[(t, H)] = f"D{2 * k + 1}"
        wiring[(r, V)] = f"D{2 * k + 2}"
    stages = [
        Stage("delay", (delay(model, parties[1]["in"]),)),
        Stage("PBS1", tuple(pbs1)),
        Stage("C", (ring_exchange([p["v"] for p in parties]),)),
        Stage("H1", tuple(h1)),
        Stage("PBS2", tuple(pbs2)),
        Stage("H2", tuple(h2)),
        Stage("PBS3", tuple(pbs3)),
    ]
    return _build(
        name,
        n,
        model,
        [p["in"] for p in parties],
        [p["out"] for p in parties],
        wiring,
        stages,
        "PBS2",
    )


def symmetric_bsm(model: DelayModel | float | None = None) -> CircuitSpec:
    """Two-party circuit: g -> D1(H), D2(V); h -> D3(H), D4(V)."""
    return _ring_circuit(2, _as_model(model), "symmetric_bsm")


def ghz_circuit(n: int, model: DelayModel | float | None = None) -> CircuitSpec:
    """``n``-party ring; party k reads out on D(2k+1) (H) and D(2k+2) (V)."""
    if int(n) != n or n < 2:
        raise ValueError(f"GHZ circuit needs N >= 2 parties, got {n}")
    return _ring_circuit(int(n), _as_model(model), "ghz_n")


def build(scheme: str, parties: int = 2, model: DelayModel | float | None = None) -> CircuitSpec:
    if scheme in ("standard", "standard_bsm"):
        return standard_bsm(model)
    if scheme in ("symmetric", "symmetric_bsm"):
        return symmetric_bsm(model)
    if scheme in ("ghz", "ghz_n"):
        return ghz_circuit(parties, model)
    raise ValueError(f"unknown scheme {scheme!r}")
