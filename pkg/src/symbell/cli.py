"""Command-line runner for the canonical experiments.

Examples::

    symbell bsm --scheme symmetric --input phi-
    symbell hom-scan --input psi- --class D11 --lc 0.085 --delays -0.4:0.4:81
    symbell prepare --input DD --gamma 1.0 --tomography --shots 0
    symbell ghz --n 3 --input ghz-

Settings may also come from ``--config file.json``; flags override the file.
Artifacts go to ``--output-dir`` (default: ``$SYMBELL_OUTPUT_DIR``); without
either, results are only printed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, circuits, detection, states, tomography
from .io import atomic_write, dumps_json, versioned_csv
from .optics import DelayModel

EXPERIMENTS = ("bsm", "hom-scan", "prepare", "tomography", "ghz")
SCHEMES = ("standard", "symmetric")
OUTPUT_ENV = "SYMBELL_OUTPUT_DIR"

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

DEFAULT_INPUT = {"bsm": "phi+", "hom-scan": "phi-", "prepare": "DD", "tomography": "DD", "ghz": "ghz+"}
DEFAULT_CLASSES = ["D13+D24", "D14+D23", "D11", "D24"]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    scheme: str = "symmetric"
    input: str | None = None
    amplitudes: list[complex] | None = None
    gamma: float | None = None
    delay: float = 0.0
    lc: float = 0.085
    delays: str = "-0.4:0.4:81"
    classes: list[str] = field(default_factory=lambda: list(DEFAULT_CLASSES))
    n: int = 2
    shots: int = 0
    seed: int = 0
    tomography: bool = False
    target: str | None = None
    output_dir: str | None = None
    format: str = "csv"

    @property
    def parties(self) -> int:
        return self.n if self.experiment == "ghz" else 2

    def delay_model(self) -> DelayModel:
        if self.gamma is not None:
            return DelayModel.from_overlap(self.gamma)
        return DelayModel(delay=self.delay, coherence_length=self.lc)

    def circuit(self) -> circuits.CircuitSpec:
        if self.experiment == "ghz":
            return circuits.ghz_circuit(self.n, self.delay_model())
        return circuits.build(self.scheme, model=self.delay_model())

    def qubit_vector(self) -> np.ndarray:
        if self.amplitudes is not None:
            return np.asarray(self.amplitudes, dtype=complex)
        return states.named_vector(self.input, self.parties)

    def input_label(self) -> str:
        return self.input if self.amplitudes is None else "amplitudes"


CONFIG_KEYS = tuple(f.name for f in dataclasses.fields(ExperimentConfig))


def parse_grid(text: str) -> np.ndarray:
    try:
        start, stop, count = text.split(":")
        count = int(count)
        grid = np.linspace(float(start), float(stop), count)
    except ValueError:
        raise ConfigError(f"delay grid must be start:stop:count, got {text!r}") from None
    if count < 1:
        raise ConfigError("delay grid needs at least one point")
    return grid


def _parse_amplitudes(value) -> list[complex]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    try:
        return [complex(str(v).replace(" ", "")) for v in value]
    except ValueError as exc:
        raise ConfigError(f"bad amplitude list: {exc}") from None


def validate(raw: dict) -> ExperimentConfig:
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if raw.get("experiment") not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {', '.join(EXPERIMENTS)}, got {raw.get('experiment')!r}")
    raw = dict(raw)
    if raw.get("amplitudes") is not None:
        raw["amplitudes"] = _parse_amplitudes(raw["amplitudes"])
    if isinstance(raw.get("classes"), str):
        raw["classes"] = [raw["classes"]]
    cfg = ExperimentConfig(**raw)
    if cfg.scheme not in SCHEMES:
        raise ConfigError(f"scheme must be one of {', '.join(SCHEMES)}, got {cfg.scheme!r}")
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg.format!r}")
    if cfg.experiment == "ghz" and cfg.n < 2:
        raise ConfigError(f"GHZ experiment needs N >= 2, got {cfg.n}")
    if cfg.gamma is not None and not 0.0 <= cfg.gamma <= 1.0:
        raise ConfigError(f"gamma must lie in [0, 1], got {cfg.gamma}")
    if cfg.lc <= 0:
        raise ConfigError("lc must be positive")
    if cfg.shots < 0:
        raise ConfigError("shots must be >= 0")
    if cfg.input is None and cfg.amplitudes is None:
        cfg.input = DEFAULT_INPUT[cfg.experiment]
    try:
        vec = cfg.qubit_vector()
    except ValueError as exc:
        raise ConfigError(f"invalid input state: {exc}") from None
    if vec.shape != (2**cfg.parties,):
        raise ConfigError(f"expected {2**cfg.parties} amplitudes, got {vec.size}")
    if np.linalg.norm(vec) == 0:
        raise ConfigError("input amplitudes are all zero")
    if cfg.target is not None:
        try:
            states.named_vector(cfg.target, cfg.parties)
        except ValueError as exc:
            raise ConfigError(f"invalid target: {exc}") from None
    if cfg.experiment == "hom-scan":
        parse_grid(cfg.delays)
        try:
            analysis._normalize_classes(cfg.classes)
        except ValueError as exc:
            raise ConfigError(f"invalid classes: {exc}") from None
    return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_CONFIG, f"{self.prog}: config error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="symbell",
        description="Simulate linear-optical Bell/GHZ measurement and preparation circuits.",
        argument_default=argparse.SUPPRESS,
    )
    p.add_argument("experiment", nargs="?", default=None, choices=EXPERIMENTS, help="experiment to run")
    p.add_argument("--config", help="JSON file with any of the keys below; flags override it")
    p.add_argument("--scheme", choices=SCHEMES, help="BSM layout (default: symmetric)")
    p.add_argument("--input", help="phi+/phi-/psi+/psi-, ghz+/ghz-, or a product such as DA")
    p.add_argument("--amplitudes", help="comma-separated complex qubit amplitudes (HH, HV, VH, VV order)")
    p.add_argument("--gamma", type=float, help="wavepacket overlap in [0, 1]; bypasses the delay model")
    p.add_argument("--delay", type=float, help="optical delay l when --gamma is not given (default 0)")
    p.add_argument("--lc", type=float, help="coherence length of the Gaussian overlap (default 0.085)")
    p.add_argument("--delays", help="hom-scan grid start:stop:count (default -0.4:0.4:81)")
    p.add_argument("--class", "--classes", dest="classes", action="append", help="coincidence class such as D13+D24; repeatable")
    p.add_argument("--n", type=int, help="number of parties for ghz (default 2)")
    p.add_argument("--shots", type=int, help="tomography shots per setting; 0 uses exact probabilities")
    p.add_argument("--seed", type=int, help="tomography seed (default 0)")
    p.add_argument("--tomography", action="store_true", help="prepare: also simulate tomography")
    p.add_argument("--target", help="reference state for fidelity (default: best Bell/GHZ match)")
    p.add_argument("--output-dir", dest="output_dir", help=f"artifact directory (default ${OUTPUT_ENV})")
    p.add_argument("--format", choices=("csv", "json"), help="format of the main table (default csv)")
    return p


def _join_grid_values(argv: list[str]) -> list[str]:
    # a grid such as -0.4:0.4:81 would otherwise be taken for an option
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--delays":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--delays={nxt}")
        else:
            out.append(tok)
    return out


def load_config(argv) -> ExperimentConfig:
    argv = _join_grid_values(list(sys.argv[1:] if argv is None else argv))
    args = vars(build_parser().parse_args(argv))
    raw: dict = {}
    path = args.pop("config", None)
    if path is not None:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    raw.update({k: v for k, v in args.items() if v is not None})
    if raw.get("output_dir") is None and os.environ.get(OUTPUT_ENV):
        raw["output_dir"] = os.environ[OUTPUT_ENV]
    if "experiment" not in raw:
        raise ConfigError("no experiment given")
    return validate(raw)


def _round(x: float) -> float:
    # strip float noise so repeated runs and platforms print the same digits
    return float(f"{x:.12g}")


def _best_target(rho: np.ndarray, n: int) -> str:
    names = list(states.BELL_NAMES) if n == 2 else ["ghz+", "ghz-"]
    return max(names, key=lambda nm: analysis.fidelity(rho, states.named_vector(nm, n)))


def _density_rows(rho: np.ndarray) -> str:
    lines = ["row,col,re,im"]
    for i in range(rho.shape[0]):
        for j in range(rho.shape[1]):
            lines.append(f"{i},{j},{_round(rho[i, j].real)!r},{_round(rho[i, j].imag)!r}")
    return "\n".join(lines) + "\n"


def _outcome_table(dist: detection.OutcomeDistribution, scheme, fmt: str) -> str:
    rows = [
        {"pattern": str(k), "probability": _round(v), "verdict": detection.classify(k, scheme).value}
        for k, v in dist.items()
    ]
    if fmt == "json":
        return dumps_json({"outcomes": rows})
    body = "pattern,probability,verdict\n" + "".join(
        f"{r['pattern']},{r['probability']!r},{r['verdict']}\n" for r in rows
    )
    return versioned_csv(body)


def run_bsm(cfg: ExperimentConfig):
    circ = cfg.circuit()
    state = states.photons_from_qubits(cfg.qubit_vector(), circ.inputs)
    dist = detection.simulate(state, circ)
    verdicts = detection.verdict_probabilities(dist, circ)
    metrics = {
        "overlap": _round(circ.delay.overlap),
        "verdicts": {v.value: _round(p) for v, p in verdicts.items()},
        "conclusive_probability": _round(1 - verdicts[detection.BsmVerdict.Inconclusive]),
    }
    if circ.name != "standard_bsm" and cfg.input in ("phi+", "phi-", "ghz+", "ghz-"):
        metrics["qber"] = _round(analysis.qber(circ, state))
    if cfg.experiment == "ghz":
        even = sum(p for k, p in dist.items() if detection.v_parity(k, cfg.n) == 0)
        odd = sum(p for k, p in dist.items() if detection.v_parity(k, cfg.n) == 1)
        metrics.update(parties=cfg.n, even_parity=_round(even), odd_parity=_round(odd))
    table = _outcome_table(dist, circ, cfg.format)
    summary = "\n".join(f"{k}  {v:.6f}" for k, v in dist.to_rows())
    return {"outcomes": table}, metrics, summary


def run_hom_scan(cfg: ExperimentConfig):
    circ = cfg.circuit()
    state = states.photons_from_qubits(cfg.qubit_vector(), circ.inputs)
    scan = analysis.hom_scan(circ, state, parse_grid(cfg.delays), cfg.classes, coherence_length=cfg.lc)
    metrics = {
        "coherence_length": cfg.lc,
        "classes": {
            k: {
                "visibility": _round(scan.visibility[k]),
                "kind": scan.kind[k],
                "c_zero": _round(scan.c_zero[k]),
                "c_far": _round(scan.c_far[k]),
            }
            for k in scan.series
        },
    }
    if cfg.format == "json":
        table = dumps_json(
            {
                "delays": [_round(x) for x in scan.delays],
                "series": {k: [_round(x) for x in v] for k, v in scan.series.items()},
            }
        )
    else:
        lines = ["l,class,probability"]
        for k, v in scan.series.items():
            lines += [f"{_round(l)!r},{k},{_round(p)!r}" for l, p in zip(scan.delays, v)]
        table = versioned_csv("\n".join(lines) + "\n")
    summary = "\n".join(
        f"{k}: {scan.kind[k]} {scan.c_far[k]:.6f} -> {scan.c_zero[k]:.6f}, V = {scan.visibility[k]:.6f}"
        for k in scan.series
    )
    return {"hom_scan": table}, metrics, summary


def run_prepare(cfg: ExperimentConfig):
    circ = cfg.circuit()
    state = states.photons_from_qubits(cfg.qubit_vector(), circ.inputs)
    result = detection.heralded_state(state, circ)
    metrics: dict = {"overlap": _round(circ.delay.overlap), "heralding_probability": _round(result.probability)}
    if not result.heralded:
        metrics["heralded"] = False
        return {}, metrics, "no heralding events"
    rho = result.rho
    n = len(circ.herald_ports)
    target = cfg.target or _best_target(rho, n)
    tvec = states.named_vector(target, n)
    metrics.update(heralded=True, target=target, fidelity=_round(analysis.fidelity(rho, tvec)))
    if n == 2:
        metrics["concurrence"] = _round(analysis.concurrence(rho))
    files = {}
    if cfg.format == "json":
        files["density"] = dumps_json({"re": np.round(rho.real, 12).tolist(), "im": np.round(rho.imag, 12).tolist()})
    else:
        files["density"] = versioned_csv(_density_rows(rho))
    if cfg.tomography or cfg.experiment == "tomography":
        if n != 2:
            raise ValueError("tomography is implemented for two qubits only")
        counts = tomography.simulate_tomography(rho, cfg.shots, cfg.seed)
        est = tomography.reconstruct(counts)
        metrics["tomography"] = {
            "shots": cfg.shots,
            "seed": cfg.seed,
            "fidelity": _round(analysis.fidelity(est, tvec)),
            "concurrence": _round(analysis.concurrence(est)),
            "trace_distance": _round(analysis.trace_distance(est, rho)),
        }
        files["tomography_counts"] = versioned_csv(counts.to_csv())
    summary = "\n".join(f"{k}: {v}" for k, v in metrics.items())
    return files, metrics, summary


RUNNERS = {"bsm": run_bsm, "ghz": run_bsm, "hom-scan": run_hom_scan, "prepare": run_prepare, "tomography": run_prepare}


def run(cfg: ExperimentConfig) -> dict[str, Path]:
    """Run one experiment; write artifacts if an output directory is set."""
    files, metrics, summary = RUNNERS[cfg.experiment](cfg)
    metrics = {"experiment": cfg.experiment, "input": cfg.input_label(), **metrics}
    if cfg.experiment != "ghz":
        metrics["scheme"] = cfg.scheme
    print(summary)
    written: dict[str, Path] = {}
    if cfg.output_dir:
        out = Path(cfg.output_dir)
        if not out.is_dir():
            raise OSError(f"output directory {out} does not exist")
        stem = cfg.experiment.replace("-", "_")
        for name, text in files.items():
            ext = "json" if text.lstrip().startswith("{") else "csv"
            written[name] = atomic_write(out / f"{stem}.{name}.{ext}", text)
        written["metrics"] = atomic_write(out / f"{stem}.metrics.json", dumps_json(metrics))
    else:
        print(json.dumps(metrics, indent=2, sort_keys=True))
    return written


def main(argv=None) -> int:
    try:
        cfg = load_config(argv)
    except ConfigError as exc:
        print(f"symbell: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        run(cfg)
    except (OSError, ValueError) as exc:
        print(f"symbell: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
