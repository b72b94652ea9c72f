"""Command-line front end for the canonical experiments.

Examples::

    fockcontext kcbs
    fockcontext hom --theta 1.5707963
    fockcontext sweep-eta --witness yu-oh --grid 0:1:11 --output yu_oh_sweep.csv
    fockcontext rho-ab --pair 0 --format json

Settings may also come from ``--config file.json``; explicit flags win.
Relative output paths are resolved under ``$FOCKCONTEXT_OUTPUT_DIR`` when set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import distinguishability as dist
from .fock_core import enumerate_basis, expectation
from .measurement import ancilla_pair_density, observable_of, sigma_x_correlation
from .optics import bosonic_state_from_unit_vector, prepare_two_photon_state
from .witnesses import evaluate_operator, noncontextual_bound, witness_by_name

OUTPUT_DIR_ENV = "FOCKCONTEXT_OUTPUT_DIR"
FLOAT_FMT = ".15g"
WITNESS_COMMANDS = ("kcbs", "ncycle", "yu-oh", "opt3")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    witness: str | None = None
    n: int = 5
    theta: float = 0.0
    phi: float = 0.0
    eta: float = 0.0
    grid: str = "0:1:101"
    pair: int = 0
    random_states: int = 0
    seed: int = 0
    output: str | None = None
    format: str = "csv"

    def validate(self) -> None:
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.format!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise ConfigError(f"eta must lie in [0, 1], got {self.eta}")
        if self.random_states < 0:
            raise ConfigError("random-states must be non-negative")
        parse_grid(self.grid)


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:count`` with ``0 <= start <= stop <= 1`` and ``count >= 1``."""
    try:
        start_s, stop_s, count_s = str(text).split(":")
        start, stop, count = float(start_s), float(stop_s), int(count_s)
    except ValueError:
        raise ConfigError(f"malformed grid {text!r}; expected start:stop:count") from None
    if count < 1:
        raise ConfigError("grid count must be >= 1")
    if not 0.0 <= start <= stop <= 1.0:
        raise ConfigError("grid must satisfy 0 <= start <= stop <= 1")
    if count == 1:
        return np.array([start])
    if start == stop:
        raise ConfigError("grid with count > 1 needs start < stop")
    return np.linspace(start, stop, count)


def _fmt(x: float) -> str:
    return format(float(x), FLOAT_FMT)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def random_real_states(count: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        v = rng.normal(size=3)
        yield bosonic_state_from_unit_vector(v / np.linalg.norm(v))


# --- commands ---------------------------------------------------------------


def run_witness(cfg: ExperimentConfig) -> dict:
    name = "ncycle" if cfg.command == "ncycle" else cfg.command
    spec = witness_by_name(name, cfg.n)
    psi = prepare_two_photon_state(cfg.theta, cfg.phi)
    value = evaluate_operator(spec, psi)
    correlators = [c / t.coeff for c, t in zip(value.per_term, spec.terms)]
    result = {
        "value": value.value,
        "nc_bound": noncontextual_bound(spec),
        "per_term": [
            {"indices": list(t.indices), "coeff": t.coeff, "correlator": c}
            for t, c in zip(spec.terms, correlators)
        ],
    }
    if cfg.random_states:
        result["rows"] = [
            {"state": k, "value": evaluate_operator(spec, s).value}
            for k, s in enumerate(random_real_states(cfg.random_states, cfg.seed))
        ]
    return result


def run_hom(cfg: ExperimentConfig, thetas: np.ndarray | None) -> dict:
    thetas = np.array([cfg.theta]) if thetas is None else thetas
    rows = []
    for theta in thetas:
        p_plus = min(max(dist.simulated_coincidence(cfg.eta, theta, cfg.phi), 0.0), 1.0)
        rows.append({"theta": float(theta), "p_plus": p_plus, "p_minus": 1.0 - p_plus})
    return {"rows": rows}


def run_sweep(cfg: ExperimentConfig) -> dict:
    spec = witness_by_name(cfg.witness or "kcbs", cfg.n)
    sweep = dist.witness_vs_eta(spec, parse_grid(cfg.grid), (cfg.theta, cfg.phi))
    return {"rows": sweep.to_dict()["rows"], "csv": sweep.to_csv(FLOAT_FMT)}


def run_rho_ab(cfg: ExperimentConfig) -> dict:
    spec = witness_by_name("kcbs")
    basis = enumerate_basis(2, 2)
    meas = spec.measurements(basis)
    j = cfg.pair % len(meas)
    k = (j + 1) % len(meas)
    psi = prepare_two_photon_state(cfg.theta, cfg.phi)
    rho = ancilla_pair_density(psi, meas[j], meas[k])
    labels = ["++", "+-", "-+", "--"]
    rows = [
        {"row": labels[r], "col": labels[c], "re": float(rho[r, c].real), "im": float(rho[r, c].imag)}
        for r in range(4)
        for c in range(4)
    ]
    corr = expectation(psi, observable_of(meas[j]) @ observable_of(meas[k])).real
    return {
        "rows": rows,
        "value": sigma_x_correlation(rho),
        "per_term": [{"indices": [j, k], "correlator": float(corr)}],
    }


def render(cfg: ExperimentConfig, result: dict) -> str:
    if cfg.format == "json":
        doc = {"command": cfg.command, "config": asdict(cfg)}
        doc.update({k: v for k, v in result.items() if k != "csv"})
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if cfg.command == "sweep-eta":
        return result["csv"]
    if cfg.command == "hom":
        return _csv(["theta", "p_plus", "p_minus"], [(r["theta"], r["p_plus"], r["p_minus"]) for r in result["rows"]])
    if cfg.command == "rho-ab":
        body = [(f"{r['row']}|{r['col']}", r["re"], r["im"]) for r in result["rows"]]
        body.append(("tr(rho XX)", result["value"], 0.0))
        return _csv(["entry", "re", "im"], body)
    rows = [("value", result["value"]), ("nc_bound", result["nc_bound"])]
    rows += [("corr(" + ";".join(map(str, t["indices"])) + ")", t["correlator"]) for t in result["per_term"]]
    rows += [(f"state[{r['state']}]", r["value"]) for r in result.get("rows", [])]
    return _csv(["quantity", "value"], rows)


def resolve_output(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def run(cfg: ExperimentConfig, thetas: np.ndarray | None = None) -> str:
    cfg.validate()
    if cfg.command in WITNESS_COMMANDS:
        result = run_witness(cfg)
    elif cfg.command == "hom":
        result = run_hom(cfg, thetas)
    elif cfg.command == "sweep-eta":
        result = run_sweep(cfg)
    elif cfg.command == "rho-ab":
        result = run_rho_ab(cfg)
    else:
        raise ConfigError(f"unknown command {cfg.command!r}")
    text = render(cfg, result)
    if cfg.output:
        out = resolve_output(cfg.output)
        try:
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot write {out}: {exc}") from exc
    return text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default settings")
    common.add_argument("--output", "-o", help="write the result to this path")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--theta", type=float, help="preparation splitter angle theta")
    common.add_argument("--phi", type=float, help="preparation splitter phase phi")
    common.add_argument("--seed", type=int)

    parser = argparse.ArgumentParser(prog="fockcontext", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("kcbs", "yu-oh", "opt3"):
        p = sub.add_parser(name, parents=[common], help=f"evaluate the {name} witness")
        p.add_argument("--random-states", type=int, dest="random_states")
    p = sub.add_parser("ncycle", parents=[common], help="evaluate an odd n-cycle witness")
    p.add_argument("--n", type=int)
    p.add_argument("--random-states", type=int, dest="random_states")

    p = sub.add_parser("hom", parents=[common], help="coincidence/bunching probabilities vs theta")
    p.add_argument("--eta", type=float)
    p.add_argument("--thetas", help="theta grid start:stop:count in radians")

    p = sub.add_parser("sweep-eta", parents=[common], help="witness value against distinguishability")
    p.add_argument("--witness")
    p.add_argument("--n", type=int)
    p.add_argument("--grid", help="eta grid start:stop:count")

    p = sub.add_parser("rho-ab", parents=[common], help="two-ancilla density matrix for a KCBS pair")
    p.add_argument("--pair", type=int)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values: dict = {}
    if args.config:
        try:
            values.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    values.pop("command", None)
    for key, val in vars(args).items():
        if key in ("config", "thetas") or val is None:
            continue
        values[key] = val
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**values)


def _theta_grid(text: str) -> np.ndarray:
    try:
        start, stop, count = text.split(":")
        return np.linspace(float(start), float(stop), int(count))
    except ValueError:
        raise ConfigError(f"malformed theta grid {text!r}") from None


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        thetas = _theta_grid(args.thetas) if getattr(args, "thetas", None) else None
        text = run(cfg, thetas)
    except (ConfigError, ValueError) as exc:
        print(f"fockcontext: error: {exc}", file=sys.stderr)
        return 2
    if not cfg.output:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
