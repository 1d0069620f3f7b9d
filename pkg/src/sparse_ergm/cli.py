"""Command line front end.

    sparse-ergm exact       --model M --n N [--override] [--threads T]
    sparse-ergm variational (--model M --n N | --beta1 B1 --beta2 B2 --p P --alpha A)
    sparse-ergm sample      --model M --n N [--burn-in B --samples S --thin K]
    sparse-ergm sweep       --model M --theorem ID --n-grid 4,5,6 [--method exact|mcmc]
    sparse-ergm regimes     --model M --n-grid 10,100,1000

Result files are deterministic for a fixed config and seed. Wall-clock data
goes to a ``<out>.meta.json`` sidecar so the result itself stays
byte-identical across runs.

Exit codes: 0 ok, 1 config error, 2 resource cap, 3 numerical defect.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .asymptotics import THEOREMS, _jsonable, run_sweep
from .errors import CapExceeded, ConfigError, NumericalDefect
from .exact import exact
from .model import ModelSpec, ParamSchedule, load_model, regime_report, regime_trends
from .sampler import estimate_directed_edge, run_chain
from .variational import BoundParams, chatterjee_dembo_bound, variational_value

log = logging.getLogger("sparse_ergm")

EXIT_OK, EXIT_CONFIG, EXIT_CAP, EXIT_NUMERIC = 0, 1, 2, 3


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    vals = []
    for t in text.split(","):
        t = t.strip()
        if t:
            v = float(t)
            if not v.is_integer():
                raise argparse.ArgumentTypeError(f"grid value {t} is not an integer")
            vals.append(int(v))
    return vals


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", type=Path, help="TOML model config")
    common.add_argument("--out", type=Path, help="output file (stdout if omitted)")
    common.add_argument("--force", action="store_true", help="overwrite --out")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--beta", type=_float_list, help="override beta, e.g. --beta=-1,-1")
    common.add_argument("--schedule-kind", choices=["constant", "log", "power", "linear"])
    common.add_argument("--schedule-coeff", type=float)
    common.add_argument("--schedule-exponent", type=float)
    common.add_argument("--allow-diagonal", type=_bool)

    p = argparse.ArgumentParser(prog="sparse-ergm", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("exact", parents=[common], help="exact log Z and marginals")
    ex.add_argument("--n", type=int, required=True)
    ex.add_argument("--cap", type=int, help="enumeration cap (undirected)")
    ex.add_argument("--override", action="store_true", help="ignore the enumeration cap")

    va = sub.add_parser("variational", parents=[common], help="scalar free energy")
    va.add_argument("--n", type=int)
    va.add_argument("--beta1", type=float)
    va.add_argument("--beta2", type=float)
    va.add_argument("--p", type=int)
    va.add_argument("--alpha", type=float)
    va.add_argument("--c", type=float, default=1.0)
    va.add_argument("--C", dest="C", type=float, default=1.0)

    sa = sub.add_parser("sample", parents=[common], help="Monte Carlo estimates")
    sa.add_argument("--n", type=int, required=True)
    sa.add_argument("--burn-in", type=int, default=10_000)
    sa.add_argument("--samples", type=int, default=100_000)
    sa.add_argument("--thin", type=int, default=10)

    sw = sub.add_parser("sweep", parents=[common], help="limit-theorem sweep")
    sw.add_argument("--theorem", required=True, type=str.upper, choices=THEOREMS)
    sw.add_argument("--n-grid", type=_int_list, required=True)
    sw.add_argument("--method", choices=["exact", "mcmc"], default="exact")
    sw.add_argument("--burn-in", type=int, default=10_000)
    sw.add_argument("--samples", type=int, default=20_000)
    sw.add_argument("--thin", type=int, default=10)

    rg = sub.add_parser("regimes", parents=[common], help="regime diagnostics table")
    rg.add_argument("--n-grid", type=_int_list, required=True)
    return p


def resolve_model(args) -> ModelSpec:
    """Model from --model with command-line overrides applied on top."""
    if args.model is None:
        raise ConfigError("--model is required for this command")
    m = load_model(args.model)
    if args.beta is not None:
        m = m.with_beta(args.beta)
    if args.schedule_kind or args.schedule_coeff is not None or args.schedule_exponent is not None:
        s = m.schedule.to_dict()
        if args.schedule_kind:
            s["kind"] = args.schedule_kind
        if args.schedule_coeff is not None:
            s["coeff"] = args.schedule_coeff
        if args.schedule_exponent is not None:
            s["exponent"] = args.schedule_exponent
        m = m.with_schedule(ParamSchedule.from_dict(s))
    if args.allow_diagonal is not None:
        m = ModelSpec(m.flavor, m.statistics, m.beta, m.schedule, args.allow_diagonal)
    return m


def _envelope(command: str, method: str, seed, model: ModelSpec | None, body: dict) -> dict:
    return {
        "tool": "sparse-ergm",
        "version": __version__,
        "command": command,
        "method": method,
        "seed": seed,
        "config": None if model is None else model.to_config(),
        **body,
    }


def _check_out(path: Path | None, force: bool, *extra: Path) -> None:
    for p in (path, *extra):
        if p is not None and p.exists() and not force:
            raise FileExistsError(f"{p} exists; pass --force to overwrite")


def _write(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def _write_meta(path: Path | None, args, started: float, wall: str) -> None:
    if path is None:
        return
    meta = {
        "tool": "sparse-ergm",
        "version": __version__,
        "command": args.command,
        "argv": sys.argv[1:],
        "seed": args.seed,
        "started": wall,
        "elapsed_s": time.perf_counter() - started,
    }
    Path(str(path) + ".meta.json").write_text(_dump(meta), encoding="utf-8")


def cmd_exact(args) -> int:
    m = resolve_model(args)
    _check_out(args.out, args.force)
    kw = {} if m.directed_flavor else {"cap": args.cap, "override": args.override,
                                       "threads": args.threads}
    r = exact(m, args.n, **kw)
    body = r.to_dict(m)
    _write(args.out, _dump(_envelope("exact", r.method, None, m, body)))
    return EXIT_OK


def cmd_variational(args) -> int:
    _check_out(args.out, args.force)
    m = None
    if args.model is not None:
        m = resolve_model(args)
        if m.directed_flavor:
            raise ConfigError("variational needs an undirected edge-p-star model")
        p = m.edge_star_order()
        if args.n is None:
            raise ConfigError("--n is required with --model")
        rates = m.schedule.term_rates(args.n, 2)
        if rates[0] != rates[1]:
            raise ConfigError("variational needs a shared schedule")
        b1, b2, alpha = m.beta[0], m.beta[1], rates[0]
    else:
        if None in (args.beta1, args.beta2, args.p, args.alpha):
            raise ConfigError("give --model and --n, or all of --beta1 --beta2 --p --alpha")
        b1, b2, p, alpha = args.beta1, args.beta2, args.p, args.alpha
    try:
        res = variational_value(b1, b2, p, alpha)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    body = res.to_dict()
    if args.n is not None:
        bp = BoundParams(args.c, args.C)
        lo, up = chatterjee_dembo_bound(alpha * (abs(b1) + abs(b2)), args.n, bp)
        body["bounds"] = {"lower_gap": lo, "upper_gap": up, "c": bp.c, "C": bp.C,
                          "note": "up to unspecified constants"}
    else:
        body["bounds"] = None
    body["inputs"] = {"beta1": b1, "beta2": b2, "p": p, "alpha": alpha, "n": args.n}
    _write(args.out, _dump(_envelope("variational", "bisection", None, m, body)))
    return EXIT_OK


def cmd_sample(args) -> int:
    m = resolve_model(args)
    _check_out(args.out, args.force)
    if m.directed_flavor:
        edge, joint = estimate_directed_edge(m, args.n, args.samples, args.seed)
        method = "direct"
    else:
        edge, joint = run_chain(m, args.n, args.burn_in, args.samples, args.thin, args.seed)
        method = "glauber"
    body = {"n": args.n, "edge": edge.to_dict(), "joint": joint.to_dict(),
            "model_echo": m.to_config()}
    _write(args.out, _dump(_envelope("sample", method, args.seed, m, body)))
    return EXIT_OK


def cmd_sweep(args) -> int:
    m = resolve_model(args)
    json_path = None if args.out is None else args.out.with_suffix(".json")
    _check_out(args.out, args.force, *([json_path] if json_path else []))
    mcmc = {"burn_in": args.burn_in, "samples": args.samples, "thin": args.thin,
            "seed": args.seed}
    rep = run_sweep(args.theorem, m, args.n_grid, args.method, threads=args.threads, mcmc=mcmc)
    _write(args.out, rep.to_csv())
    if json_path is not None:
        body = rep.to_dict()
        json_path.write_text(_dump(_envelope("sweep", args.method, args.seed, m, body)),
                             encoding="utf-8")
    return EXIT_OK


def cmd_regimes(args) -> int:
    m = resolve_model(args)
    _check_out(args.out, args.force)
    reps = [regime_report(m, n) for n in args.n_grid]
    lines = [f"{'n':>10} {'alpha_n':>12} {'n2e^2ab1':>12} {'ne^ab1':>12} "
             f"{'alpha/n':>12} {'ln2/|b1|':>10} {'beta<0':>6}"]
    for r in reps:
        lines.append(f"{r.n:>10} {r.alpha_n:>12.6g} {r.sparse_undirected[0]:>12.6g} "
                     f"{r.lambda_estimate:>12.6g} {r.fast_directed[0]:>12.6g} "
                     f"{r.fast_directed[1]:>10.6g} {str(r.all_beta_negative):>6}")
    trends = regime_trends(m, args.n_grid)
    lines.append("trends: " + ", ".join(f"{k}={v}" for k, v in trends.items()))
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        body = {"rows": [r.as_dict() for r in reps], "trends": trends}
        _write(args.out, _dump(_envelope("regimes", "diagnostic", None, m, body)))
    return EXIT_OK


COMMANDS = {"exact": cmd_exact, "variational": cmd_variational, "sample": cmd_sample,
            "sweep": cmd_sweep, "regimes": cmd_regimes}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    started = time.perf_counter()
    wall = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    try:
        code = COMMANDS[args.command](args)
    except CapExceeded as exc:
        log.error("%s", exc)
        return EXIT_CAP
    except NumericalDefect as exc:
        log.error("numerical defect: %s", exc)
        return EXIT_NUMERIC
    except (ConfigError, ValueError, OSError, KeyError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    _write_meta(args.out, args, started, wall)
    return code


if __name__ == "__main__":
    sys.exit(main())
