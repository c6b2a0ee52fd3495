"""Command line driver: ``hotqubo {gen,derive,scaling,solve,export}``.

Human-readable text goes to stdout; CSV/JSON/PNG artifacts go to ``--out``.
Exit codes: 1 data error, 2 configuration error, 3 solver cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from hotqubo import plots, synthetic
from hotqubo.encode import baseline_encoding, bounded_encoding, encode_value
from hotqubo.hotstart import compute_box, qubit_counts
from hotqubo.market import (
    Calibration,
    MarketDataError,
    TickerMismatch,
    initial_portfolio,
    load_universe,
    scale_to_units,
    weights_from_units,
)
from hotqubo.model import build_with_transaction_costs, evaluate
from hotqubo.numerics import NotPositiveDefinite
from hotqubo.qubo import build_qubo, export
from hotqubo.solve import AnnealSchedule, TooLarge, brute_force, random_search, simulated_annealing

EXIT_DATA, EXIT_CONFIG, EXIT_SOLVER = 1, 2, 3
DEFAULT_SIZES = (4, 10, 20, 40, 60, 80, 100)


class ConfigError(ValueError):
    pass


class SizeExceedsUniverse(ConfigError):
    pass


@dataclass
class RunConfig:
    returns_path: str | None = None
    prices_path: str | None = None
    budget: float = 250_000.0
    risk_free: float = 0.0
    gamma: float = 3.0
    kappa_scale: float = 50.0
    mode: str = "hotstart"
    baseline_k: int = 10
    solver: str = "anneal"
    sweeps: int = 2000
    restarts: int = 8
    beta_start: float = 0.1
    beta_end: float = 50.0
    samples: int | None = None
    workers: int = 1
    warm_start: bool = False
    seed: int = 0
    output_dir: str = "out"
    export_qubo: bool = False

    def __post_init__(self):
        if self.mode not in ("hotstart", "baseline"):
            raise ConfigError(f"mode must be hotstart or baseline, not {self.mode!r}")
        if self.solver not in ("bruteforce", "anneal", "random"):
            raise ConfigError(f"unknown solver {self.solver!r}")
        if self.baseline_k < 1:
            raise ConfigError("--k must be at least 1")
        try:
            self.calibration()
            self.schedule()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def calibration(self) -> Calibration:
        return Calibration(self.budget, self.risk_free, self.gamma, self.kappa_scale)

    def schedule(self) -> AnnealSchedule:
        return AnnealSchedule(self.sweeps, self.beta_start, self.beta_end, self.restarts, self.seed)

    def echo(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("output_dir")
        d.pop("workers")
        return d


# key = value config files use the flag names (dashes or underscores)
CONFIG_KEYS = {
    "returns": "returns_path", "prices": "prices_path", "budget": "budget",
    "risk_free": "risk_free", "gamma": "gamma", "kappa_scale": "kappa_scale",
    "mode": "mode", "k": "baseline_k", "solver": "solver", "sweeps": "sweeps",
    "restarts": "restarts", "beta_start": "beta_start", "beta_end": "beta_end",
    "samples": "samples", "workers": "workers", "warm_start": "warm_start",
    "seed": "seed", "out": "output_dir", "export": "export_qubo",
}


def read_config_file(path) -> dict:
    types = {f.name: f.type for f in dataclasses.fields(RunConfig)}
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            name = CONFIG_KEYS.get(key.replace("-", "_"))
            if name is None:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            values[name] = _coerce(value, types[name], f"{path}:{lineno}")
    return values


def _coerce(value: str, typ: str, where: str):
    try:
        if typ == "bool":
            if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(value)
            return value.lower() in ("true", "1", "yes")
        if typ.startswith("int"):
            return int(value)
        if typ == "float":
            return float(value)
    except ValueError:
        raise ConfigError(f"{where}: bad value {value!r}") from None
    return value


# ---------------------------------------------------------------------------
# pipeline


def _model_and_box(cfg: RunConfig, universe):
    cal = cfg.calibration()
    mu_f, sigma_t, gamma_t, kappa_t = scale_to_units(universe, cal)
    x0 = initial_portfolio(universe, cal)
    model = build_with_transaction_costs(mu_f, sigma_t, gamma_t, kappa_t, x0)
    return model, x0, compute_box(model)


def _load(cfg: RunConfig):
    if not cfg.returns_path or not cfg.prices_path:
        raise ConfigError("--returns and --prices are required")
    for p in (cfg.returns_path, cfg.prices_path):
        if not Path(p).is_file():
            raise ConfigError(f"no such file: {p}")
    return load_universe(cfg.returns_path, cfg.prices_path)


def derivation_rows(cfg: RunConfig, universe=None):
    universe = universe if universe is not None else _load(cfg)
    model, x0, box = _model_and_box(cfg, universe)
    per_asset, total = qubit_counts(box)
    rows = []
    for i, t in enumerate(universe.tickers):
        rows.append({
            "ticker": t,
            "x0": int(x0[i]),
            "x_star": float(box.x_star_cont[i]),
            "rounded": int(box.rounded[i]),
            "lower": int(box.lower[i]),
            "upper": int(box.upper[i]),
            "integers": int(box.counts[i]),
            "qubits": per_asset[i],
        })
    return rows, total, box


def cmd_derive(cfg: RunConfig, stdout=None):
    stdout = stdout or sys.stdout
    rows, total, box = derivation_rows(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = ["ticker", "x0", "x_star", "smallest", "largest", "integers", "qubits"]
    with open(out / "derive.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([r["ticker"], r["x0"], f'{r["x_star"]:.6f}', r["lower"], r["upper"], r["integers"], r["qubits"]])
        w.writerow(["total", "", "", "", "", "", total])
    text = format_derivation(rows, total, box.integral_shortcut)
    (out / "derive.txt").write_text(text, encoding="utf-8")
    plots.box_figure(rows, out / "derive.png")
    stdout.write(text)
    return rows, total


def format_derivation(rows, total, shortcut=False) -> str:
    lines = [f'{"Asset":<10} {"x0":>8} {"x*":>12} {"Smallest":>9} {"Largest":>9} {"#integers":>10} {"#qubits":>8}']
    for r in rows:
        lines.append(
            f'{r["ticker"]:<10} {r["x0"]:>8d} {r["x_star"]:>12.1f} {r["lower"]:>9d} '
            f'{r["upper"]:>9d} {r["integers"]:>10d} {r["qubits"]:>8d}'
        )
    lines.append(f'{"Total":<10} {"":>8} {"":>12} {"":>9} {"":>9} {"":>10} {total:>8d}')
    if shortcut:
        lines.append("optimal by rounding shortcut, 0 qubits")
    return "\n".join(lines) + "\n"


def scaling_rows(cfg: RunConfig, sizes, universe=None):
    universe = universe if universe is not None else _load(cfg)
    sizes = list(sizes)
    if sizes != sorted(sizes) or not sizes or sizes[0] < 1:
        raise ConfigError("sizes must be ascending positive integers")
    if sizes[-1] > universe.n:
        raise SizeExceedsUniverse(f"size {sizes[-1]} exceeds the {universe.n} available assets")
    rows = []
    for s in sizes:
        sub = universe.head(s)
        _, _, box = _model_and_box(cfg, sub)
        _, total = qubit_counts(box)
        covered = bool(np.all(box.lower >= 0) and np.all(box.upper <= (1 << cfg.baseline_k) - 1))
        rows.append({"n": s, "hotstart_qubits": total, "baseline_qubits": s * cfg.baseline_k, "covered": covered})
    return rows


def cmd_scaling(cfg: RunConfig, sizes=DEFAULT_SIZES, stdout=None):
    """Assets are taken in input order (first s tickers)."""
    stdout = stdout or sys.stdout
    rows = scaling_rows(cfg, sizes)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "scaling.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "hotstart_qubits", "baseline_qubits"])
        for r in rows:
            w.writerow([r["n"], r["hotstart_qubits"], r["baseline_qubits"]])
    plots.scaling_figure(rows, out / "scaling.png", k=cfg.baseline_k)
    stdout.write(f'{"n":>5} {"hotstart":>9} {"baseline":>9}\n')
    for r in rows:
        flag = "" if r["covered"] else "  (baseline range does not cover box)"
        stdout.write(f'{r["n"]:>5d} {r["hotstart_qubits"]:>9d} {r["baseline_qubits"]:>9d}{flag}\n')
    return rows


def _instance(cfg: RunConfig, universe, model, box):
    names = universe.tickers
    if cfg.mode == "baseline":
        enc = baseline_encoding(universe.n, cfg.baseline_k, names)
    else:
        enc = bounded_encoding(box, names)
    return build_qubo(model, enc, cfg.mode)


def _floats(v):
    return [float(x) for x in v]


def _ints(v):
    return [int(x) for x in v]


def cmd_solve(cfg: RunConfig, stdout=None):
    stdout = stdout or sys.stdout
    universe = _load(cfg)
    cal = cfg.calibration()
    model, x0, box = _model_and_box(cfg, universe)
    per_asset, total = qubit_counts(box)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = {
        "config": cfg.echo(),
        "tickers": list(universe.tickers),
        "shrinkage": universe.shrinkage,
        "x0": _ints(x0),
        "x_star": _floats(box.x_star_cont),
        "f_star": box.f_star,
        "rounded": _ints(box.rounded),
        "rounded_objective": evaluate(model, box.rounded),
        "gap_c": box.gap_c,
        "box": {"lower": _ints(box.lower), "upper": _ints(box.upper)},
        "hotstart_qubits": {"per_asset": per_asset, "total": total},
        "baseline_qubits": universe.n * cfg.baseline_k,
    }
    wall_time = 0.0
    if cfg.mode == "hotstart" and box.integral_shortcut:
        units = box.rounded
        report["result"] = {"solver": "shortcut", "units": _ints(units), "objective": box.f_star, "bits": 0}
    else:
        qi = _instance(cfg, universe, model, box)
        if cfg.export_qubo:
            export(qi, out / "qubo.txt")
        result = _run_solver(cfg, qi, box)
        wall_time = result.wall_time
        units = result.best_units
        report["result"] = {
            "solver": result.solver,
            "seed": result.seed,
            "bits": qi.total_bits,
            "best_bits": "".join(str(int(b)) for b in result.best_bits),
            "units": _ints(units),
            "energy": result.best_energy,
            "objective": result.objective_value,
            "evaluations": result.evaluations,
        }
    w, rf_weight = weights_from_units(units, universe, cal)
    report["result"]["weights"] = _floats(w)
    report["result"]["risk_free_weight"] = rf_weight
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    (out / "report.json").write_text(text, encoding="utf-8")
    stdout.write(format_solve(report, wall_time))
    return report


def _run_solver(cfg: RunConfig, qi, box):
    if cfg.solver == "bruteforce":
        return brute_force(qi)
    sched = cfg.schedule()
    if cfg.solver == "random":
        samples = cfg.samples or sched.restarts * sched.sweeps * max(qi.total_bits, 1)
        return random_search(qi, samples, cfg.seed)
    warm = None
    enc = qi.encoding
    if cfg.warm_start and np.all(box.rounded >= enc.offsets) and np.all(box.rounded <= enc.upper):
        warm = encode_value(enc, box.rounded)
    return simulated_annealing(qi, sched, warm_start=warm, workers=cfg.workers)


def format_solve(report, wall_time) -> str:
    res = report["result"]
    lines = [
        f'assets: {len(report["tickers"])}   mode: {report["config"]["mode"]}   solver: {res["solver"]}',
        f'continuous optimum f* = {report["f_star"]:.6f}, gap C = {report["gap_c"]:.6g}',
        f'hot-start qubits: {report["hotstart_qubits"]["total"]}   baseline qubits: {report["baseline_qubits"]}',
        f'rounded objective:  {report["rounded_objective"]:.6f}',
        f'solution objective: {res["objective"]:.6f}',
    ]
    if "evaluations" in res:
        lines.append(f'evaluations: {res["evaluations"]}   wall time: {wall_time:.3f} s')
    lines.append(f'{"asset":<10} {"x0":>8} {"x*":>12} {"units":>8} {"weight":>9}')
    for t, x0, xs, u, w in zip(report["tickers"], report["x0"], report["x_star"], res["units"], res["weights"]):
        lines.append(f"{t:<10} {x0:>8d} {xs:>12.2f} {u:>8d} {w:>9.4f}")
    lines.append(f'risk-free weight: {res["risk_free_weight"]:.4f}')
    return "\n".join(lines) + "\n"


def cmd_export(cfg: RunConfig, path=None, stdout=None):
    stdout = stdout or sys.stdout
    universe = _load(cfg)
    model, _, box = _model_and_box(cfg, universe)
    if cfg.mode == "hotstart" and box.integral_shortcut:
        stdout.write("continuous optimum is integral: optimal by rounding shortcut, no QUBO written\n")
        return None
    qi = _instance(cfg, universe, model, box)
    target = Path(path) if path else Path(cfg.output_dir) / "qubo.txt"
    target.parent.mkdir(parents=True, exist_ok=True)
    export(qi, target)
    stdout.write(f"wrote {qi.total_bits}-bit {cfg.mode} QUBO to {target}\n")
    return target


def cmd_gen(seed: int, n: int, periods: int, out_dir, stdout=None):
    stdout = stdout or sys.stdout
    if n < 1:
        raise ConfigError("--n must be at least 1")
    returns, prices = synthetic.write_dataset(out_dir, seed, n, periods)
    stdout.write(f"wrote {returns} and {prices}\n")
    return returns, prices


# ---------------------------------------------------------------------------
# argument parsing


def _add_run_flags(p):
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--returns", dest="returns_path")
    p.add_argument("--prices", dest="prices_path")
    p.add_argument("--budget", type=float)
    p.add_argument("--risk-free", type=float, help="per-period rate (monthly data: annual/12 or (1+r)**(1/12)-1)")
    p.add_argument("--gamma", type=float)
    p.add_argument("--kappa-scale", type=float, help="transaction cost kappa = kappa_scale * gamma / budget")
    p.add_argument("--mode", choices=["hotstart", "baseline"])
    p.add_argument("--k", dest="baseline_k", type=int, help="bits per asset for the baseline")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", dest="output_dir")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hotqubo", description="Hot-started QUBOs for integer mean-variance portfolios.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a seeded synthetic dataset")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--periods", type=int, default=600)
    g.add_argument("--out", default="data")

    d = sub.add_parser("derive", help="per-asset box and qubit derivation table")
    _add_run_flags(d)

    s = sub.add_parser("scaling", help="qubit totals for growing universes")
    _add_run_flags(s)
    s.add_argument("--sizes", default=",".join(map(str, DEFAULT_SIZES)))

    for name, helptext in (("solve", "build and solve the QUBO"), ("export", "write the QUBO text file")):
        p = sub.add_parser(name, help=helptext)
        _add_run_flags(p)
        if name == "solve":
            p.add_argument("--solver", choices=["bruteforce", "anneal", "random"])
            p.add_argument("--sweeps", type=int)
            p.add_argument("--restarts", type=int)
            p.add_argument("--beta-start", type=float)
            p.add_argument("--beta-end", type=float)
            p.add_argument("--samples", type=int)
            p.add_argument("--workers", type=int)
            p.add_argument("--warm-start", action="store_const", const=True)
            p.add_argument("--export", dest="export_qubo", action="store_const", const=True)
        else:
            p.add_argument("--qubo-out", help="output file (default <out>/qubo.txt)")
    return parser


def config_from_args(args) -> RunConfig:
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    names = {f.name for f in dataclasses.fields(RunConfig)}
    for key, value in vars(args).items():
        if key in names and value is not None:
            values[key] = value
    return RunConfig(**values)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            cmd_gen(args.seed, args.n, args.periods, args.out)
            return 0
        cfg = config_from_args(args)
        if args.command == "derive":
            cmd_derive(cfg)
        elif args.command == "scaling":
            try:
                sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
            except ValueError:
                raise ConfigError(f"bad --sizes {args.sizes!r}") from None
            cmd_scaling(cfg, sizes)
        elif args.command == "solve":
            cmd_solve(cfg)
        elif args.command == "export":
            cmd_export(cfg, args.qubo_out)
    except TooLarge as exc:
        print(f"TooLarge: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (TickerMismatch, ConfigError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MarketDataError, NotPositiveDefinite) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
