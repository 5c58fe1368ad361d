"""Command-line front end: ``besselcall {price,curve,laplace,mc,verify}``.

Exit codes: 0 success, 1 usage or domain error, 2 numerical failure.
Option precedence: command-line flags, then ``--config FILE`` (key=value lines
named after the long flags), then built-in defaults. The default absolute
quadrature tolerance can be overridden with $BESSELCALL_TOL.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from . import __version__, analytic, curves, mc, quad
from .errors import DomainError, QuadratureError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
Z_LIMIT = 4.0
LAPLACE_GAP = 1e-5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in str(text).replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _words(text: str) -> list[str]:
    return [w for w in str(text).replace(" ", "").split(",") if w]


def _fmt(x: float) -> str:
    return f"{x:.11e}"


def _level_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--strike", type=float, help="strike K >= 0")
    g.add_argument("--k", type=float, help="dual level k = K^(-1/(delta-2)) > 0")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="besselcall", description="Call prices on strict local Bessel martingales.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--config", help="key=value file supplying defaults for the chosen subcommand")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("price", help="one price")
    p.add_argument("--delta", type=float)
    _level_args(p)
    p.add_argument("--t", type=float, help="maturity")
    p.add_argument("--method", choices=analytic.METHODS)
    p.add_argument("--tol", type=float, help="absolute quadrature tolerance")

    c = sub.add_parser("curve", help="price curves as CSV (and SVG)")
    c.add_argument("--preset", choices=("fig1", "fig2"))
    c.add_argument("--delta", type=_floats, help="comma-separated dimensions")
    lv = c.add_mutually_exclusive_group()
    lv.add_argument("--k", type=_floats, help="comma-separated dual levels")
    lv.add_argument("--strike", type=_floats, help="comma-separated strikes")
    c.add_argument("--grid", choices=("log", "linear"), default="log")
    c.add_argument("--tmin", type=float, default=1e-3)
    c.add_argument("--tmax", type=float, default=1e3)
    c.add_argument("--points", type=int, default=200)
    c.add_argument("--methods", type=_words, default=["auto"], help="subset of auto,closed3,integral,last_passage,mc")
    c.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    c.add_argument("--svg", help="also write an SVG chart to this path")
    c.add_argument("--tol", type=float)
    c.add_argument("--n", type=int, default=100_000, help="samples per point for the mc method")
    c.add_argument("--seed", type=int, default=42)

    la = sub.add_parser("laplace", help="Laplace transform of the normalised price curve")
    la.add_argument("--delta", type=float)
    _level_args(la)
    la.add_argument("--lambda", dest="lam", type=float)
    la.add_argument("--numeric", action="store_true", help="also integrate numerically and compare")
    la.add_argument("--tol", type=float)

    m = sub.add_parser("mc", help="Monte Carlo price against the analytic value")
    m.add_argument("--delta", type=float)
    _level_args(m)
    m.add_argument("--t", type=float)
    m.add_argument("--n", type=int, default=1_000_000)
    m.add_argument("--seed", type=int, default=42)
    m.add_argument("--streams", type=int, default=8)
    m.add_argument("--workers", type=int, default=1)

    v = sub.add_parser("verify", help="run the invariant suite and acceptance criteria")
    v.add_argument("--level", choices=("fast", "full"), default="fast")
    return ap


def _read_config(path: str) -> dict:
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}")
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = val
    return out


def parse(argv) -> argparse.Namespace:
    ap = build_parser()
    cfg_path = None
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            cfg_path = argv[i + 1]
        elif a.startswith("--config="):
            cfg_path = a.split("=", 1)[1]
    if cfg_path:
        values = _read_config(cfg_path)
        subs = next(x for x in ap._actions if isinstance(x, argparse._SubParsersAction))
        for sp in subs.choices.values():
            known = {a.dest: a for a in sp._actions}
            keys = {("lam" if k == "lambda" else k): v for k, v in values.items()}
            for key, val in keys.items():
                if key not in known:
                    continue
                act = known[key]
                if isinstance(act, argparse._StoreTrueAction):
                    val = val.lower() in ("1", "true", "yes", "on")
                sp.set_defaults(**{key: val})
    args = ap.parse_args(argv)
    if args.command is None:
        ap.print_usage(sys.stderr)
        raise UsageError("a subcommand is required")
    return args


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + ("lambda" if n == "lam" else n) for n in missing)
        raise UsageError(f"missing required option(s): {flags}")


def _params(args) -> analytic.ModelParams:
    if args.delta is None:
        raise UsageError("missing required option: --delta")
    if not args.delta > 2.0:
        raise DomainError("delta must exceed 2")
    if args.k is not None:
        return analytic.ModelParams.from_level(args.delta, args.k)
    if args.strike is None:
        raise UsageError("one of --strike or --k is required")
    return analytic.make_params(args.delta, args.strike)


def _quad_spec(args) -> quad.QuadratureSpec:
    tol = getattr(args, "tol", None)
    try:
        return quad.QuadratureSpec.from_env(**({"abs_tol": tol} if tol is not None else {}))
    except ValueError as exc:
        raise DomainError(f"bad tolerance: {exc}")


def _row(p, t, method, value) -> str:
    return f"{p.delta!r},{p.strike!r},{p.dual_level!r},{float(t)!r},{method},{_fmt(value)}"


def cmd_price(args, out) -> int:
    p = _params(args)
    _need(args, "t")
    point = analytic.price_point(p, args.t, args.method, _quad_spec(args))
    out.write(curves.CSV_HEADER + "\n" + _row(p, point.t, point.method, point.value) + "\n")
    return EXIT_OK


def _curve_request(args) -> curves.CurveRequest:
    if args.preset:
        base = curves.preset(args.preset)
        return curves.CurveRequest(base.deltas, base.levels, base.grid, tuple(args.methods))
    _need(args, "delta")
    if args.k is None and args.strike is None:
        raise UsageError("one of --k or --strike is required without --preset")
    grid = curves.TimeGrid(args.grid, args.tmin, args.tmax, args.points)
    levels = args.k if args.k is not None else args.strike
    return curves.CurveRequest(tuple(args.delta), tuple(levels), grid, tuple(args.methods), by_strike=args.k is None)


def _atomic_write(path: str, text: str):
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".besselcall-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def cmd_curve(args, out) -> int:
    req = _curve_request(args)
    cfg = mc.MCConfig(n_samples=args.n, seed=args.seed) if "mc" in req.methods else None
    result = curves.evaluate(req, _quad_spec(args), cfg)
    text = curves.to_csv(result)
    svg = curves.to_svg(result) if args.svg else None
    if args.out == "-":
        out.write(text)
    else:
        _atomic_write(args.out, text)
    if svg is not None:
        _atomic_write(args.svg, svg)
    return EXIT_OK


def cmd_laplace(args, out) -> int:
    p = _params(args)
    _need(args, "lam")
    closed = analytic.laplace_lambda_closed(p, args.lam)
    if not args.numeric:
        out.write(f"closed\n{_fmt(closed)}\n")
        return EXIT_OK
    numeric = quad.laplace_numeric(p, args.lam)
    diff = closed - numeric
    out.write(f"closed,numeric,difference\n{_fmt(closed)},{_fmt(numeric)},{_fmt(diff)}\n")
    return EXIT_OK if abs(diff) <= LAPLACE_GAP else EXIT_NUMERIC


def cmd_mc(args, out) -> int:
    p = _params(args)
    _need(args, "t")
    cfg = mc.MCConfig(n_samples=args.n, seed=args.seed, n_streams=args.streams, workers=args.workers)
    est = mc.estimate_price_mc(p, args.t, cfg)
    ref = analytic.price(p, args.t)
    z = est.z_score(ref)
    out.write("mean,std_err,n,reference,z\n")
    out.write(f"{_fmt(est.mean)},{_fmt(est.std_err)},{est.n},{_fmt(ref)},{z:.4f}\n")
    return EXIT_OK if abs(z) <= Z_LIMIT else EXIT_NUMERIC


def cmd_verify(args, out) -> int:
    from . import verify

    def echo(line):
        out.write(line + "\n")
        out.flush()

    out.write(f"# invariants ({args.level})\n")
    results = verify.run_invariants(args.level, echo)
    out.write(f"# acceptance criteria ({args.level})\n")
    results += verify.run_criteria(args.level, echo)
    failed = [r.name for r in results if not r.passed]
    out.write(f"# {len(results) - len(failed)} passed, {len(failed)} failed\n")
    return EXIT_OK if not failed else EXIT_NUMERIC


COMMANDS = {"price": cmd_price, "curve": cmd_curve, "laplace": cmd_laplace, "mc": cmd_mc, "verify": cmd_verify}


def main(argv=None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    try:
        args = parse(argv)
        return COMMANDS[args.command](args, out)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return EXIT_OK if code == 0 else EXIT_USAGE
    except (UsageError, DomainError) as exc:
        sys.stderr.write(f"besselcall: {exc}\n")
        return EXIT_USAGE
    except (QuadratureError, OverflowError, ArithmeticError) as exc:
        sys.stderr.write(f"besselcall: numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
