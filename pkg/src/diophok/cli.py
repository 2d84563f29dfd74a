"""Command-line entry point.

Elements and ideals are given in integral-basis coordinates as
comma-separated exact rationals ("1/2,0,3"); an ideal is a ';'-separated
list of generators. Output is canonical JSON on stdout, diagnostics go to
stderr. Exit codes: 0 success, 1 domain error, 2 usage error, 3 resource
budget exceeded.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import DomainError, ResourceBudgetExceeded

log = logging.getLogger("diophok")

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

COORDS_HELP = "integral-basis coordinates, comma-separated exact rationals (e.g. 0,5 or 1/2,3)"
IDEAL_HELP = "ideal generators: ';'-separated coordinate lists (e.g. '2,0;1,1')"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    catalogue: str = None
    max_digits: int = 10 ** 5
    radius: int = 50
    seed: int = 0
    jobs: int = 1
    output: str = "json"

    def __post_init__(self):
        for name in ("max_digits", "radius", "jobs"):
            if getattr(self, name) < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")


# -- parsing helpers --------------------------------------------------------------------------


def parse_coords(text, field):
    try:
        coords = [Fraction(x.strip()) for x in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse coordinates {text!r}") from None
    if len(coords) != field.degree:
        raise UsageError(f"{field.name} needs {field.degree} coordinates, got {len(coords)}")
    return field.from_basis(coords)


def parse_ideal(text, field):
    from .ideals import ideal_from_gens
    return ideal_from_gens([parse_coords(part, field) for part in text.split(";")])


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _field(cfg, name):
    from .catalogue import get_field
    return get_field(name, cfg.catalogue)


def _ext(cfg, base, top):
    from .catalogue import get_extension
    return get_extension(base or top, top, cfg.catalogue)


# -- subcommands --------------------------------------------------------------------------------


def cmd_field(args, cfg):
    F = _field(cfg, args.name)
    out = F.to_json()
    out["degree"] = F.degree
    out["signature"] = list(F.embeddings().signature)
    out["galois"] = F.is_galois()
    out["automorphisms"] = [s.to_json() for s in F.automorphisms()]
    return out


def cmd_ideal(args, cfg):
    from .ideals import factor, ideal_summary, num_den
    F = _field(cfg, args.field)
    if args.op == "num-den":
        if not args.element:
            raise UsageError("num-den needs --element")
        n, d = num_den(parse_coords(args.element, F))
        return {"num": ideal_summary(n), "den": ideal_summary(d)}
    if not args.gens:
        raise UsageError(f"{args.op} needs --gens")
    I = parse_ideal(args.gens, F)
    if args.op == "hnf":
        return ideal_summary(I)
    if args.op == "factor":
        return {"ideal": ideal_summary(I), "factors": factor(I).to_json()}
    if not args.other:
        raise UsageError(f"{args.op} needs --other")
    J = parse_ideal(args.other, F)
    if args.op == "mul":
        return ideal_summary(I * J)
    if args.op == "sum":
        return ideal_summary(I + J)
    if args.op == "intersect":
        return ideal_summary(I.intersect(J))
    if args.op == "divides":
        return {"divides": I.divides(J)}
    if args.op == "coprime":
        return {"coprime": I.coprime(J)}
    raise UsageError(f"unknown op {args.op}")


def cmd_nonzero(args, cfg):
    from .dioph import emit_nonzero, nonzero_system_witness, verify_witness
    ext = _ext(cfg, args.base, args.field)
    a = parse_coords(args.a, ext.top)
    if not a.is_integral():
        raise DomainError("a must be integral")
    w = nonzero_system_witness(a)
    return {"field": ext.top.name, "witness": w.to_json(),
            "verified": verify_witness(emit_nonzero(ext), w)}


def cmd_forcing(args, cfg):
    from .forcing import ForcingInstance, ForcingParams, compute_n, forcing_conclusion, fuzz
    if args.action == "n":
        if args.ell is None:
            raise UsageError("forcing n needs --ell")
        if args.ell < 1:
            raise UsageError("--ell must be positive")
        p = compute_n(args.ell)
        return {"ell": p.ell, "n": p.n}
    if args.action == "check":
        for flag in ("field", "alpha", "ideal", "k"):
            if getattr(args, flag) is None:
                raise UsageError(f"forcing check needs --{flag}")
        ext = _ext(cfg, args.base or "Q", args.field)
        n = args.n or compute_n(ext.top.degree).n
        inst = ForcingInstance(ext, parse_coords(args.alpha, ext.top), parse_ideal(args.ideal, ext.base),
                               parse_coords(args.k, ext.base), ForcingParams(ext.top.degree, n))
        return {"n": n, "verdict": forcing_conclusion(inst).value}
    if args.action == "fuzz":
        if args.field is None:
            raise UsageError("forcing fuzz needs --field")
        rep = fuzz(args.field, base=args.base or "Q", trials=args.trials, height=args.height,
                   norm_bound=args.norm_bound, seed=cfg.seed, jobs=cfg.jobs, catalogue=cfg.catalogue)
        return rep.to_json()
    raise UsageError(f"unknown forcing action {args.action}")


def cmd_approx(args, cfg):
    from .catalogue import get_curve
    from .curves import ApproximationTarget, approximate, numerator_witness
    E = get_curve(args.curve, cfg.catalogue)
    K = E.field
    if args.numerator is not None:
        beta = parse_coords(args.numerator, K)
        s, R, Q = numerator_witness(beta, E, max_digits=cfg.max_digits)
        return {"s": s.to_json(), "R": R.to_json(), "Q": Q.to_json(),
                "certificate": {"statement": "(beta) divides num(s)", "verified": True}}
    if args.k is None or args.modulus is None:
        raise UsageError("approx needs --k and --modulus (or --numerator)")
    target = ApproximationTarget(args.k, parse_ideal(args.modulus, K))
    return approximate(target, E, max_digits=cfg.max_digits).to_json()


def _emit_system(args, cfg):
    from .dioph import PREDICATE_KINDS, emit_nonzero, emit_predicate
    ext = _ext(cfg, args.base, args.field)
    kind = args.predicate
    if kind in PREDICATE_KINDS:
        return emit_predicate(kind, ext)
    if kind == "nonzero":
        return emit_nonzero(ext)
    from .catalogue import get_curve
    E = get_curve(args.curve, cfg.catalogue)
    if kind in ("U", "OK"):
        from .construction import emit_OK, emit_U
        from .forcing import ForcingParams, compute_n
        n = args.n or compute_n(ext.top.degree).n
        U = emit_U(ext, ForcingParams(ext.top.degree, n), E, toy=args.toy)
        return U.system if kind == "U" else emit_OK(ext, U).system
    if kind == "coset":
        from .construction import coset_data, emit_coset_membership
        if E.field != ext.base:
            raise DomainError("the curve must be defined over the base field")
        reps = [E.zero()]
        for _ in range(args.r - 1):
            reps.append(reps[-1] + E.generator)
        cosets = coset_data(E, ext, _lift_points(E, ext, reps), args.r)
        return emit_coset_membership(cosets, ext).system
    raise UsageError(f"unknown predicate {kind!r}")


def _lift_points(E, ext, pts):
    EL = E.base_change(ext)
    return [EL.zero() if p.is_zero() else EL.point(ext.embed(p.x), ext.embed(p.y)) for p in pts]


def cmd_emit(args, cfg):
    sysm = _emit_system(args, cfg)
    if args.output:
        Path(args.output).write_text(sysm.dumps())
        return {"written": args.output, "parameters": list(sysm.parameters),
                "existentials": len(sysm.existentials), "equations": len(sysm.equations)}
    return sysm.to_json()


def cmd_verify(args, cfg):
    from .dioph import PolySystem, Witness, verify_witness
    sysm = PolySystem.from_json(read_json(args.system), cfg.catalogue)
    w = Witness.from_json(read_json(args.witness), sysm.ext.top)
    ok = verify_witness(sysm, w)
    return {"verified": ok}


def cmd_scalarize(args, cfg):
    from .dioph import PolySystem, Witness, scalarize
    sysm = PolySystem.from_json(read_json(args.system), cfg.catalogue)
    ss = scalarize(sysm)
    out = ss.to_json()
    if args.witness:
        w = Witness.from_json(read_json(args.witness), sysm.ext.top)
        ints = ss.map_witness(w)
        out["witness"] = {k: str(v) for k, v in ints.items()}
        out["witness_verified"] = ss.verify(ints)
    return out


def cmd_plan(args, cfg):
    from .shlapentokh import plan, plan_L0_variant
    F = _field(cfg, args.field)
    p = plan_L0_variant(F) if args.l0_variant else plan(F)
    return p.to_json()


def cmd_selftest(args, cfg):
    from . import acceptance
    report = acceptance.run(seed=cfg.seed, only=args.only)
    for line in acceptance.summary_lines(report):
        print(line, file=sys.stderr)
    return report


COMMANDS = {
    "field": cmd_field, "ideal": cmd_ideal, "nonzero": cmd_nonzero, "forcing": cmd_forcing,
    "approx": cmd_approx, "emit": cmd_emit, "verify": cmd_verify, "scalarize": cmd_scalarize,
    "plan": cmd_plan, "selftest": cmd_selftest,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_common(p, defaults):
    """Options accepted both before and after the subcommand."""
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--catalogue", default=d(None),
                   help="catalogue directory (default: $DIOPHOK_CATALOGUE or packaged data)")
    p.add_argument("--max-digits", type=int, default=d(10 ** 5), help="digit budget for curve points")
    p.add_argument("--radius", type=int, default=d(50), help="coordinate box radius for searches")
    p.add_argument("--seed", type=int, default=d(0), help="seed for every randomised search")
    p.add_argument("--jobs", type=int, default=d(1), help="worker processes")
    p.add_argument("--format", choices=("json", "text"), default=d("json"))
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser():
    p = _Parser(prog="diophok", description="Exact number-field tools for existential definitions.")
    _add_common(p, True)
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common, False)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    _orig = sub.add_parser

    def add_parser(name, **kw):
        return _orig(name, parents=[common], **kw)
    sub.add_parser = add_parser

    s = sub.add_parser("field", help="field data: basis, discriminant, signature, automorphisms")
    s.add_argument("name")

    s = sub.add_parser("ideal", help="ideal arithmetic",
                       description=f"Generators: {IDEAL_HELP}. Elements: {COORDS_HELP}.")
    s.add_argument("op", choices=("hnf", "mul", "sum", "intersect", "divides", "coprime", "factor", "num-den"))
    s.add_argument("--field", required=True)
    s.add_argument("--gens", help=IDEAL_HELP)
    s.add_argument("--other", help="second ideal for binary operations; divides asks whether gens | other")
    s.add_argument("--element", help=COORDS_HELP)

    s = sub.add_parser("nonzero", help="witness (x, y) with (2x-1)(3x-1) = y*a")
    s.add_argument("--field", required=True)
    s.add_argument("--base", help="base field of the ring extension (default: the field itself)")
    s.add_argument("--a", required=True, help=COORDS_HELP)

    s = sub.add_parser("forcing", help="forcing bound, instance check, falsification fuzz")
    s.add_argument("action", choices=("n", "check", "fuzz"))
    s.add_argument("--ell", type=int)
    s.add_argument("--field", help="top field L")
    s.add_argument("--base", help="base field K (default Q)")
    s.add_argument("--alpha", help="alpha in O_L: " + COORDS_HELP)
    s.add_argument("--ideal", help="modulus over K: " + IDEAL_HELP)
    s.add_argument("--k", help="k in K: " + COORDS_HELP)
    s.add_argument("--n", type=int, help="override the forcing bound")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--height", type=int, default=20)
    s.add_argument("--norm-bound", type=int, default=10 ** 6)

    s = sub.add_parser("approx", help="certified s = t(kR)/t(R) = k (mod I), or a numerator witness")
    s.add_argument("--curve", required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--modulus", help=IDEAL_HELP)
    s.add_argument("--numerator", help="beta (coordinates): find s with (beta) | num(s)")

    s = sub.add_parser("emit", help="emit a polynomial system as JSON")
    s.add_argument("--predicate", required=True,
                   help="ideal_membership, ideal_divides, ideal_equal, coprime, principal_ratio, "
                        "is_num, congruence, nonzero, U, OK or coset")
    s.add_argument("--field", required=True, help="ring field L")
    s.add_argument("--base", help="base field K (default: L)")
    s.add_argument("--curve", default="x3m2", help="curve for U, OK and coset")
    s.add_argument("--n", type=int, help="bound for U / OK (default: compute_n)")
    s.add_argument("--toy", action="store_true", help="allow n failing the forcing inequalities")
    s.add_argument("--r", type=int, default=2, help="r for coset membership")
    s.add_argument("--output", help="write the system here instead of stdout")

    s = sub.add_parser("verify", help="check a witness against a system exactly")
    s.add_argument("--system", required=True)
    s.add_argument("--witness", required=True)

    s = sub.add_parser("scalarize", help="expand a system into integer equations")
    s.add_argument("--system", required=True)
    s.add_argument("--witness", help="also map and check this witness")

    s = sub.add_parser("plan", help="reduction plan for a Galois field")
    s.add_argument("--field", required=True)
    s.add_argument("--l0-variant", action="store_true")

    s = sub.add_parser("selftest", help="run the acceptance suite")
    s.add_argument("--only", type=int, action="append", help="criterion id (repeatable)")
    return p


def render(obj, mode):
    if mode == "json":
        return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
    lines = []
    for k in sorted(obj) if isinstance(obj, dict) else range(len(obj)):
        v = obj[k]
        lines.append(f"{k}: {v if isinstance(v, (str, int, bool)) or v is None else json.dumps(v, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        cfg = Config(catalogue=args.catalogue, max_digits=args.max_digits, radius=args.radius,
                     seed=args.seed, jobs=args.jobs, output=args.format)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s", stream=sys.stderr)
        out = COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceBudgetExceeded as exc:
        print(f"resource budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except DomainError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    try:
        sys.stdout.write(render(out, cfg.output))
        sys.stdout.flush()
    except BrokenPipeError:
        sys.stderr.close()
    if args.command == "selftest" and not out["all_passed"]:
        return EXIT_DOMAIN
    if args.command == "verify" and not out["verified"]:
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
