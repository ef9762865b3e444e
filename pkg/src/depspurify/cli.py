"""Command-line runner: ``recursion``, ``simulate`` and ``compare``.

Exit codes: 0 success, 1 runtime error, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Sequence

from . import montecarlo, protocol

ENGINES = ("exact", "mc", "both")
FORMATS = ("csv", "json")

SIMULATE_COLUMNS = (
    "f0",
    "round",
    "fidelity_exact",
    "fidelity_mc",
    "mc_stderr",
    "pass_prob",
    "cumulative_yield",
)
RECURSION_COLUMNS = ("f0", "f_prime", "sector_fidelity", "verdict")
COMPARE_COLUMNS = (
    "f0",
    "modified_yield",
    "modified_fidelity",
    "baseline_yield",
    "baseline_fidelity",
)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    f0: Optional[float] = None
    sweep: Optional[list[float]] = None
    rounds: int = 5
    engine: str = "both"
    trials: int = 100_000
    seed: int = 0
    eta: float = 1.0
    format: str = "csv"
    out: Optional[str] = None
    workers: int = 1

    @property
    def f0_values(self) -> list[float]:
        return list(self.sweep) if self.sweep else [self.f0]

    def validate(self) -> "ExperimentConfig":
        if self.f0 is None and not self.sweep:
            raise ConfigError("one of --f0 or --sweep is required")
        for value in self.f0_values:
            if not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
                raise ConfigError(f"initial fidelity must lie in [0, 1], got {value!r}")
        if not isinstance(self.rounds, int) or self.rounds < 0:
            raise ConfigError(f"rounds must be a nonnegative integer, got {self.rounds!r}")
        if self.engine not in ENGINES:
            raise ConfigError(f"engine must be one of {ENGINES}, got {self.engine!r}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not isinstance(self.eta, (int, float)) or not 0.0 < self.eta <= 1.0:
            raise ConfigError(f"eta must lie in (0, 1], got {self.eta!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError(f"workers must be a positive integer, got {self.workers!r}")
        return self


def _parse_sweep(value) -> list[float]:
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip()]
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        raise ConfigError(f"sweep must be a comma-separated list, got {value!r}")
    try:
        return [float(p) for p in parts]
    except (TypeError, ValueError):
        raise ConfigError(f"sweep values must be numbers, got {value!r}") from None


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge an optional JSON config file with command-line flags (flags win)."""
    known = {f.name for f in fields(ExperimentConfig)}
    values: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for name in known:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    if "sweep" in values and values["sweep"] is not None:
        values["sweep"] = _parse_sweep(values["sweep"])
    return ExperimentConfig(**values).validate()


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        return float(format(value, ".12g"))
    return value


def render(rows: list[dict], columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        payload = [{c: _json_value(row.get(c)) for c in columns} for row in rows]
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def recursion_rows(config: ExperimentConfig) -> list[dict]:
    return [
        {
            "f0": F,
            "f_prime": protocol.fidelity_recursion(F),
            "sector_fidelity": protocol.sector_fidelity(F),
            "verdict": protocol.threshold_verdict(F),
        }
        for F in config.f0_values
    ]


def compare_rows(config: ExperimentConfig) -> list[dict]:
    rows = []
    for F in config.f0_values:
        c = protocol.compare_schemes(F)
        rows.append({name: getattr(c, name) for name in COMPARE_COLUMNS})
    return rows


def _finite(value: float) -> Optional[float]:
    return None if math.isnan(value) else value


def simulate_rows(config: ExperimentConfig) -> list[dict]:
    rows = []
    for F in config.f0_values:
        exact = mc = None
        if config.engine in ("exact", "both"):
            exact = protocol.iterate(F, config.rounds, config.eta)
        if config.engine in ("mc", "both"):
            mc = montecarlo.run_experiment(
                F, config.rounds, config.trials, config.seed, config.eta, config.workers
            )
        for k in range(config.rounds + 1):
            row = {"f0": F, "round": k}
            if exact is not None:
                row.update(
                    fidelity_exact=exact[k].fidelity,
                    pass_prob=exact[k].pass_probability,
                    cumulative_yield=exact[k].cumulative_yield,
                )
            if mc is not None:
                row.update(
                    fidelity_mc=_finite(mc[k].fidelity_estimate),
                    mc_stderr=_finite(mc[k].standard_error),
                )
                if exact is None:
                    row.update(
                        pass_prob=_finite(mc[k].pass_rate),
                        cumulative_yield=mc[k].cumulative_yield,
                    )
            rows.append(row)
    return rows


COMMANDS = {
    "recursion": (recursion_rows, RECURSION_COLUMNS),
    "simulate": (simulate_rows, SIMULATE_COLUMNS),
    "compare": (compare_rows, COMPARE_COLUMNS),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deps-purify",
        description="Two-step purification of doubly entangled photon pairs.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--f0", type=float, help="initial Werner fidelity")
    common.add_argument("--sweep", type=str, help="comma-separated list of initial fidelities")
    common.add_argument("--rounds", type=int, help="purification rounds (default 5)")
    common.add_argument("--engine", choices=ENGINES, help="exact, mc or both (default both)")
    common.add_argument("--trials", type=int, help="Monte Carlo initial pairs (default 100000)")
    common.add_argument("--seed", type=int, help="master seed (default 0)")
    common.add_argument("--eta", type=float, help="wavelength conversion efficiency (default 1)")
    common.add_argument("--workers", type=int, help="Monte Carlo worker threads (default 1)")
    common.add_argument("--format", choices=FORMATS, help="output format (default csv)")
    common.add_argument("--out", type=str, help="output file (default stdout)")
    common.add_argument("--config", type=str, help="JSON file with any of the above keys")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("recursion", parents=[common], help="closed-form fidelity map and threshold verdict")
    sub.add_parser("simulate", parents=[common], help="run the protocol round by round")
    sub.add_parser("compare", parents=[common], help="step-1 yield and fidelity vs the discarding scheme")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
    except ConfigError as exc:
        print(f"deps-purify: error: {exc}", file=sys.stderr)
        return 2
    compute, columns = COMMANDS[args.command]
    try:
        text = render(compute(config), columns, config.format)
        if config.out:
            Path(config.out).write_text(text)
        else:
            sys.stdout.write(text)
    except (OSError, RuntimeError, ValueError) as exc:
        print(f"deps-purify: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
