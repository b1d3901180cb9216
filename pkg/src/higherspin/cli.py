"""Command line interface: ``higherspin {construct,verify,kernel,decompose,dim}``.

Every command writes one JSON document to stdout (or ``--out``).  Exit codes:
0 success, 1 failed identity or inconsistent decomposition, 2 invalid input,
3 pole.
"""

from __future__ import annotations

import argparse
import json
import sys

from gmpy2 import mpq

from higherspin.extremal import normal_order
from higherspin.hslap import (
    CHECKS,
    DLambda,
    HSLaplaceSpec,
    VacuousMutation,
    apply_D2_reference,
    c_coeff,
    verify_invariance,
)
from higherspin.liealg import InnerDD, InnerUD, InnerUU, OperatorWord, PoleError
from higherspin.spaces import basis_monomials, basis_simplicial, basis_typeA, count_monomials
from higherspin.transvector import SizeRefusal, decompose_typeA, max_monomials

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_POLE = 0, 1, 2, 3


class InvalidInput(ValueError):
    pass


def _weight(text):
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _checks(text):
    if text == "all":
        return CHECKS
    out = tuple(c.strip() for c in text.split(",") if c.strip())
    bad = [c for c in out if c not in CHECKS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown checks {bad}; choose from {list(CHECKS)} or all")
    return out


def _frac(c):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _spec(args):
    if args.m is None or args.lam is None:
        raise InvalidInput("--m and --lambda are required")
    if args.k is not None and args.k != len(args.lam):
        raise InvalidInput(f"--k {args.k} does not match --lambda of length {len(args.lam)}")
    try:
        return HSLaplaceSpec(args.m, args.lam)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None


def _guard_size(m, degree):
    n = count_monomials(m, degree)
    if n > max_monomials():
        raise InvalidInput(
            f"instance has {n} monomials; limit HSL_MAX_MONOMIALS={max_monomials()}"
        )


def _d2_reference_word(m):
    return OperatorWord(
        [
            (1, (InnerDD(0, 0),)),
            (-4 * mpq(1, m + 2), (InnerUD(1, 0), InnerDD(1, 0))),
            (4 * mpq(1, m * (m + 2)), (InnerUU(1, 1), InnerDD(1, 0), InnerDD(1, 0))),
        ]
    )


def cmd_construct(args):
    spec = _spec(args)
    D = DLambda(spec)
    coeffs = []
    for p in range(1, spec.k + 1):
        expr, val = c_coeff(p, spec)
        coeffs.append({"p": p, "expr": expr.text, "value": _frac(val)})
    out = {
        "spec": spec.to_json(),
        "coefficients": coeffs,
        "projector": [str(f) for f in normal_order(spec.k)],
        "word": D.word().to_json(),
    }
    if spec.lam == (2,):
        ref = _d2_reference_word(spec.m)
        agree = all(
            D(f, check=False) == apply_D2_reference(f, spec.m)
            for x_deg in range(4)
            for f in _h2_field_basis(spec.m, x_deg)
        )
        out["reference"] = {"word": ref.to_json(), "agrees_on_basis": agree}
        if not agree:
            return out, EXIT_FAIL
    return out, EXIT_OK


def _h2_field_basis(m, x_degree):
    H = basis_simplicial((2,), m, k=1, first_block=1).basis
    X = basis_monomials((x_degree, 0), 1, m)
    return [phi * h for phi in X for h in H]


def cmd_verify(args):
    spec = _spec(args)
    if args.seed is None:
        raise InvalidInput("--seed is required for verify")
    if args.trials < 1:
        raise InvalidInput("--trials must be >= 1")
    if args.x_degree < 0:
        raise InvalidInput("--x-degree must be >= 0")
    try:
        report = verify_invariance(
            spec,
            checks=args.checks,
            trials=args.trials,
            seed=args.seed,
            x_degree=args.x_degree,
            check_values=not args.no_value_check,
            mutate=args.mutate,
        )
    except VacuousMutation as exc:
        raise InvalidInput(str(exc)) from None
    ok = all(c["pass"] for c in report["checks"])
    return report, EXIT_OK if ok else EXIT_FAIL


def _lambda0(args):
    if args.lambda0 is None:
        raise InvalidInput("--lambda0 is required")
    if args.lambda0 < 0:
        raise InvalidInput("--lambda0 must be >= 0")
    return args.lambda0


def cmd_kernel(args):
    spec = _spec(args)
    lam0 = _lambda0(args)
    _guard_size(spec.m, (lam0,) + spec.lam)
    B = basis_typeA(lam0, spec.lam, spec.m)
    out = {"lambda0": lam0, "lambda": list(spec.lam), "m": spec.m}
    out.update(B.to_json())
    return out, EXIT_OK


def cmd_decompose(args):
    spec = _spec(args)
    lam0 = _lambda0(args)
    _guard_size(spec.m, (lam0,) + spec.lam)
    try:
        rep = decompose_typeA(lam0, spec.lam, spec.m)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    return rep.to_json(), EXIT_OK if rep.consistent else EXIT_FAIL


def cmd_dim(args):
    if args.m is None or args.mu is None:
        raise InvalidInput("--m and --mu are required")
    _guard_size(args.m, args.mu)
    try:
        B = basis_simplicial(args.mu, args.m)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    return {"mu": list(args.mu), "m": args.m, "dim": B.dim}, EXIT_OK


COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "kernel": cmd_kernel,
    "decompose": cmd_decompose,
    "dim": cmd_dim,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="higherspin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--m", type=int)
        p.add_argument("--k", type=int, help="dummy count (inferred from --lambda)")
        p.add_argument("--lambda", dest="lam", type=_weight, help="comma separated weight")
        p.add_argument("--lambda0", type=int)
        p.add_argument("--mu", type=_weight)
        p.add_argument("--x-degree", type=int, default=2)
        p.add_argument("--checks", type=_checks, default=CHECKS)
        p.add_argument("--trials", type=int, default=3)
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
        p.add_argument("--pretty", action="store_true")
        p.add_argument("--no-value-check", action="store_true")
        p.add_argument("--mutate", choices=["c1_plus_one", "drop_factor"], help=argparse.SUPPRESS)
    return parser


def _emit(obj, args):
    text = json.dumps(obj, indent=2 if args.pretty else None, separators=None if args.pretty else (",", ":"))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        obj, code = COMMANDS[args.command](args)
    except InvalidInput as exc:
        obj, code = {"error": str(exc)}, EXIT_INVALID
    except SizeRefusal as exc:
        obj, code = {"error": str(exc)}, EXIT_INVALID
    except PoleError as exc:
        obj, code = {"error": str(exc)}, EXIT_POLE
    _emit(obj, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
