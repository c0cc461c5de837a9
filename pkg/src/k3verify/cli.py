"""Command-line driver: every verification is a subcommand emitting one JSON report.

Exit codes: 0 all checks pass, 1 mathematical failure (counterexample),
2 inconclusive (quadrature did not converge), 3 usage error.

The report goes to ``--report FILE`` when given and to stdout otherwise; a
one-line summary is always written to stderr.  ``kernel-eval`` prints the
kernel value on stdout and sends its report to ``--report`` or stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .algebra.scalar import Field, Mode, format_scalar, parse_scalar
from .errors import K3Error, UnconvergedError, UsageError
from .kernel.config import PointConfig, random_config, trial_rng
from .parallel import ENV_THREADS, default_workers
from .report import Report, Status

EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- helpers ------------------------------------------------------------------

def _field(args) -> Field:
    return Field(Mode(args.mode), args.precision)


def _load_config(args, *, required=False) -> PointConfig | None:
    if args.config is None:
        if required:
            raise UsageError(f"{args.command} needs --config FILE")
        return None
    cfg = PointConfig.load(args.config, _field(args))
    lam = _parse_lambda(args.lam, _field(args))
    if lam is not None:
        if len(lam) != cfg.n:
            raise UsageError(f"--lambda has {len(lam)} entries, config has {cfg.n} points")
        cfg = cfg.with_lambda(lam)
    cfg.check_distinct_t()
    return cfg


def _parse_lambda(text, fld: Field):
    """--lambda accepts 'a,b,c' inline or a file holding a JSON list / separated values."""
    if text is None:
        return None
    path = Path(text)
    if path.is_file():
        raw = path.read_text().strip()
        try:
            items = json.loads(raw)
        except json.JSONDecodeError:
            items = raw.replace(",", " ").split()
        if isinstance(items, dict):
            items = items.get("lambda", [])
    else:
        items = [v for v in text.split(",") if v.strip()]
    return tuple(parse_scalar(str(v).strip(), fld) for v in items)


def _require_exact(args):
    if args.mode != "exact":
        raise UsageError(f"{args.command} is an exact-arithmetic check; use --mode exact")


def _parse_complex(text: str) -> complex | float:
    try:
        z = complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"cannot parse number {text!r}") from exc
    return z.real if z.imag == 0 else z


def _matrix(data, name):
    try:
        M = [[Fraction(str(v)) if not isinstance(v, float) else v for v in row] for row in data[name]]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"wick config needs a square matrix {name!r}") from exc
    if any(len(row) != len(M) for row in M):
        raise UsageError(f"matrix {name!r} is not square")
    return M


# -- subcommands ----------------------------------------------------------------

def cmd_intertwine(args) -> Report:
    from .gaudin import intertwining_check

    cfg = _load_config(args)
    return intertwining_check(args.n, args.trials, args.seed, cfg=cfg, mode=args.mode,
                              precision=args.precision, include_constant=args.include_constant,
                              convention=args.convention, tolerance=args.tolerance or 1e-9,
                              workers=args.threads)


def cmd_trace_equiv(args) -> Report:
    from .gaudin import omega_direct
    from .omega import omega_trace, trace_equivalence_check

    _require_exact(args)
    cfg = _load_config(args)
    if cfg is None:
        return trace_equivalence_check(args.n, args.trials, args.seed,
                                       restrict_indices=args.restrict_indices, workers=args.threads)
    rep = Report("trace-equiv", config=cfg.to_dict(), trials=1,
                 conventions={"convention": "paper_s3", "include_constant": False,
                              "restrict_indices": args.restrict_indices, "index_base": 0})
    for r in range(cfg.n):
        a = omega_trace(cfg, r, restrict_indices=args.restrict_indices)
        b = omega_direct(cfg, r, "y")
        rep.add_check(f"r={r}", Status.PASS if a == b else Status.FAIL, trace=a, direct=b)
    rep.finalize()
    if rep.status is Status.FAIL:
        rep.counterexample = {"config": cfg.to_dict()}
    return rep


def cmd_decompose(args) -> Report:
    from .omega import decomposition_check

    _require_exact(args)
    return decomposition_check(args.n, args.trials, args.seed, workers=args.threads,
                               h_vectors=args.h_vectors)


def cmd_commute(args) -> Report:
    from .gaudin import commutativity_check

    _require_exact(args)
    return commutativity_check(args.n, args.trials, args.seed, degree=args.degree,
                               workers=args.threads)


def cmd_twisted(args) -> Report:
    from .twisted import twisted_check, twisted_symmetry_check

    _require_exact(args)
    cfg = _load_config(args)
    if cfg is None:
        return twisted_check(args.n, args.trials, args.seed, workers=args.threads)
    if cfg.lam is None:
        raise UsageError("twisted needs lambda values (config field 'lambda' or --lambda)")
    rep = Report("twisted", config=cfg.to_dict(), trials=1)
    for r in range(cfg.n):
        sub = twisted_symmetry_check(cfg, r)
        rep.conventions = sub.conventions
        for c in sub.checks:
            rep.add_check(f"r={r}:{c['name']}", c["status"],
                          **{k: v for k, v in c.items() if k not in ("name", "status")})
    rep.finalize()
    if rep.status is Status.FAIL:
        rep.counterexample = {"config": cfg.to_dict()}
    return rep


def _random_wick_problem(n: int, seed: int, generic: bool):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    A = Q @ np.diag(rng.uniform(0.5, 2.0, n)) @ Q.T
    A = (A + A.T) / 2
    sym = lambda: (lambda M: (M + M.T) / 2)(rng.standard_normal((n, n)))
    if generic:
        return A, sym(), sym()
    S = np.linalg.inv(A)
    return A, S @ sym(), S @ sym()


def cmd_wick(args) -> Report:
    from .analysis.gaussian import wick_check
    from .analysis.quadrature import QuadratureConfig

    q = QuadratureConfig(args.scheme, args.order, args.seed, tolerance=args.tolerance or 1e-5)
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read wick config {args.config}: {exc}") from exc
        A = _matrix(data, "A")
        B = _matrix(data, "B")
        C = _matrix(data, "C") if "C" in data else None
        origin = {"config": str(args.config)}
    else:
        A, B, C = _random_wick_problem(args.n, args.seed, args.generic)
        origin = {"random": {"n": args.n, "seed": args.seed,
                             "B": "random symmetric" if args.generic else "A^{-1} D, D symmetric"}}
    try:
        rep = wick_check(A, B, C, q)
    except ValueError as exc:
        if isinstance(exc, K3Error):
            raise
        raise UsageError(str(exc)) from exc
    rep.diagnostics.update(origin)
    rep.diagnostics["matrices"] = {"A": A, "B": B, "C": C if C is not None else B}
    return rep


def cmd_regint(args) -> Report:
    from .analysis import regularized as rg

    s = _parse_complex(args.s)
    m = rg.minimal_depth(s) if args.m is None else args.m
    tol = args.tolerance or 1e-6
    constant = rg.c_coefficient_shifted if args.shifted_constant else rg.c_coefficient
    f = rg.gaussian() if args.function is None else rg.gaussian_times(args.function)
    rep = Report("regint", mode="f64",
                 conventions={"measure": rg.MEASURE, "delta": "d_u d_ubar = (1/4)(d_x^2 + d_y^2)",
                              "constant": "shifted product (planted)" if args.shifted_constant
                              else "4^m / prod_{k=1}^m (s+2k)^2",
                              "test_function": f.name})
    parts = rg.reg_integral_parts(rg.RegIntSpec(s, m, args.r1, args.r2), f, constant=constant)
    value = parts["value"]
    rep.diagnostics.update({k: v for k, v in parts.items() if k != "value"})
    rep.diagnostics.update({"s": s, "value": value})
    if args.function is None:
        ref, ref_name = rg.gaussian_reference(s), "pi Gamma((s+2)/2)"
    elif complex(s).real > -2:
        ref, ref_name = rg.direct_integral(s, f), "direct polar quadrature"
    else:
        ref = ref_name = None
    if ref is not None:
        dev = abs(value - ref) / abs(ref)
        rep.add_check("reference", Status.PASS if dev <= tol else Status.FAIL, value=value,
                      expected=ref, oracle=ref_name, relative_deviation=dev)
        rep.max_deviation = dev
    other = rg.reg_integral_parts(rg.RegIntSpec(s, m + 1, args.r1, args.r2), f, constant=constant)["value"]
    dev_m = abs(other - value) / max(abs(value), 1e-300)
    rep.add_check("m_independence", Status.PASS if dev_m <= tol else Status.FAIL,
                  m=[m, m + 1], values=[value, other], relative_deviation=dev_m)
    return rep.finalize()


def cmd_fresnel(args) -> Report:
    from .analysis.fresnel import gaussian_fourier_check
    from .analysis.quadrature import QuadratureConfig

    q = QuadratureConfig("adaptive-polar", args.order, args.seed, args.radius)
    ys = tuple(float(v) for v in args.ys.split(","))
    return gaussian_fourier_check(q, ys, tolerance=args.tolerance or 1e-3)


def cmd_hecke_probe(args) -> Report:
    from .analysis.quadrature import QuadratureConfig
    from .hecke import HeckeSpec, hecke_intertwining_probe

    cfg = _load_config(args)
    if cfg is None:
        rng = trial_rng(args.seed, 0, "hecke")
        while True:
            cfg = random_config(rng, args.n, bound=3, max_den=2)
            if all(len(set(cfg.family(c))) == cfg.n for c in "xyz"):
                break
    t = _parse_complex(args.t) if args.t is not None else float(max(complex(v).real for v in cfg.t)) + 3
    q = QuadratureConfig("adaptive-polar", 40, args.seed, args.radius, args.tolerance or 1e-2)
    spec = HeckeSpec(t, tuple(complex(v) for v in cfg.t), q, args.patch_radius, args.density)
    slots = tuple(args.slots.split(","))
    if len(slots) != 2 or any(s not in "xyz" for s in slots):
        raise UsageError("--slots must name two of x, y, z, e.g. 'x,y'")
    return hecke_intertwining_probe(cfg, t, spec, slots=slots, kernel_order=args.kernel_order)


def cmd_kernel_eval(args) -> Report:
    from .kernel.matrix import build_A, det_exact, eval_K3

    cfg = _load_config(args, required=True)
    value = eval_K3(cfg, args.kernel_mode)
    det = det_exact(build_A(cfg))
    rep = Report("kernel-eval", mode=args.mode, config=cfg.to_dict(), trials=1,
                 diagnostics={"det_A": det, "kernel_mode": args.kernel_mode, "value": value})
    rep.add_check("nonsingular", Status.PASS, det_A=det)
    return rep.finalize()


def _format_value(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    f = format_scalar(v)
    return repr(f) if not isinstance(f, list) else repr(complex(*f))


COMMANDS = {
    "intertwine": (cmd_intertwine, "Omega_r^x = Omega_r^y = Omega_r^z on random or given configurations"),
    "trace-equiv": (cmd_trace_equiv, "trace formula for Omega_r against direct differentiation"),
    "decompose": (cmd_decompose, "degree decomposition chain, y<->z symmetries, H-tensor identity"),
    "commute": (cmd_commute, "[G_i, G_j] f = 0 for random polynomials f"),
    "twisted": (cmd_twisted, "lambda-twisted symbols: integration-by-parts reduction and y<->z symmetry"),
    "wick": (cmd_wick, "Gaussian normalization and Wick relations by Gauss-Hermite quadrature"),
    "regint": (cmd_regint, "regularized integral of |u|^s f, compared with the Gamma-function value"),
    "fresnel": (cmd_fresnel, "Fourier transform of exp(i x^2): fitted constants and phase law"),
    "hecke-probe": (cmd_hecke_probe, "evidence-grade Hecke intertwining probe for K3"),
    "kernel-eval": (cmd_kernel_eval, "evaluate K3 at a configuration"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--n", type=int, default=3, help="number of points (default 3)")
    g.add_argument("--trials", type=int, default=10, help="random configurations to draw")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--mode", choices=[m.value for m in Mode], default="exact")
    g.add_argument("--precision", type=int, default=113, help="bits for --mode bigfloat")
    g.add_argument("--convention", choices=["paper_s2", "paper_s3"], default="paper_s3",
                   help="sign of the Gaudin weights 1/(t_s - t_r) (s2) or 1/(t_r - t_s) (s3)")
    g.add_argument("--lambda", dest="lam", metavar="VALUES|FILE",
                   help="twist exponents, inline 'a,b,c' or a file")
    g.add_argument("--config", metavar="FILE", help="JSON configuration file")
    g.add_argument("--report", metavar="FILE", help="write the JSON report here (default stdout)")
    g.add_argument("--tolerance", type=float, default=None, help="override the check tolerance")
    g.add_argument("--threads", type=int, default=None,
                   help=f"worker processes (default ${ENV_THREADS} or CPU count)")

    parser = _Parser(prog="k3verify", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    p = {}
    for name, (_, help_text) in COMMANDS.items():
        p[name] = sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    p["intertwine"].add_argument("--include-constant", action="store_true",
                                 help="keep the constant term c/2 in the Gaudin operators")
    p["trace-equiv"].add_argument("--restrict-indices", action="store_true",
                                  help="restrict the auxiliary sums to m, p != r, s (planted counterexample)")
    p["decompose"].add_argument("--h-vectors", type=int, default=1000)
    p["commute"].add_argument("--degree", type=int, default=3)
    w = p["wick"]
    w.add_argument("--order", type=int, default=40, help="Gauss-Hermite order / Monte Carlo samples")
    w.add_argument("--scheme", choices=["tensor-gauss-hermite", "monte-carlo"], default="tensor-gauss-hermite")
    w.add_argument("--generic", action="store_true",
                   help="random symmetric B, C (the second relation then fails)")
    r = p["regint"]
    r.add_argument("--s", required=True, help="exponent (real or complex, e.g. -3 or -3+0.5j)")
    r.add_argument("--m", type=int, default=None, help="regularization depth (default minimal)")
    r.add_argument("--r1", type=float, default=1.0)
    r.add_argument("--r2", type=float, default=2.0)
    r.add_argument("--function", default=None,
                   help="polynomial in x, y multiplying exp(-|u|^2) (default 1)")
    r.add_argument("--shifted-constant", action="store_true",
                   help="use the product shifted by one step (planted counterexample)")
    fr = p["fresnel"]
    fr.add_argument("--order", type=int, default=40, help="Gauss-Legendre nodes per half-period")
    fr.add_argument("--radius", type=float, default=40.0)
    fr.add_argument("--ys", default="0,1,2,3")
    h = p["hecke-probe"]
    h.add_argument("--t", default=None, help="Hecke evaluation point t'")
    h.add_argument("--radius", type=float, default=40.0, help="truncation radius R")
    h.add_argument("--patch-radius", type=float, default=0.3)
    h.add_argument("--density", type=int, default=1)
    h.add_argument("--slots", default="x,y")
    h.add_argument("--kernel-order", default="xyz")
    p["kernel-eval"].add_argument("--kernel-mode", choices=["complex", "real"], default="complex")
    return parser


def _emit(rep: Report, args, stream_value=None) -> None:
    text = rep.to_json() + "\n"
    if args.report:
        Path(args.report).write_text(text)
    elif stream_value is not None:
        sys.stderr.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is None:
        args.threads = default_workers()
    if args.threads < 1 or args.n < 1 or args.trials < 0:
        parser.error("--threads and --n must be positive, --trials non-negative")
    func = COMMANDS[args.command][0]
    try:
        rep = func(args)
    except UnconvergedError as exc:
        rep = Report(args.command, status=Status.INCONCLUSIVE, message=str(exc), seed=args.seed)
    except K3Error as exc:
        sys.stderr.write(f"k3verify {args.command}: error: {exc}\n")
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"k3verify {args.command}: error: {exc}\n")
        return EXIT_USAGE
    if rep.seed is None and args.config is None:
        rep.seed = args.seed
    value = _format_value(rep.diagnostics["value"]) if args.command == "kernel-eval" else None
    if value is not None:
        sys.stdout.write(value + "\n")
    _emit(rep, args, value)
    sys.stderr.write(rep.summary() + "\n")
    return rep.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
