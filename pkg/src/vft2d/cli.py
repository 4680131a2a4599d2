"""Command-line interface.

Every command prints JSON on standard output.  Exit codes: 0 success,
1 validation failure, 2 usage error (including the Euclidean/Lorentzian mode
gate), 3 numerical certification failure.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

import numpy as np

from . import evaluator, lorentzian, oracle
from .allowable import SampledDensity, total_volume
from .bordism import Bordism, Label
from .errors import (
    LorentzianLabelError,
    NoLorentzianLimitError,
    NotNormalizedError,
    StructureError,
    TruncationError,
    VFTError,
)
from .frobenius import FrobeniusAlgebra, validate_frobenius
from .jsonio import encode_array, encode_complex
from .spectral import SpectralVFT, certify_growth, level_norms
from .yang_mills import build_datum, ym_vft

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

TOLERANCES = {"semigroup": 1e-10, "adjoint": 1e-9, "gluing": 1e-9}
GROWTH_RATES = (0.05, 0.1, 0.5)


class UsageError(Exception):
    pass


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise StructureError(f"{path} is not valid JSON: {exc}") from None


def _theory(path: str) -> SpectralVFT:
    return SpectralVFT.from_json(_load(path))


def _bordism(path: str) -> Bordism:
    return Bordism.from_json(_load(path))


def _complex_arg(text: str) -> complex:
    try:
        re, im = text.split(",")
        return complex(float(re), float(im))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}") from None


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


# commands ------------------------------------------------------------------


def cmd_validate(args) -> int:
    data = _load(args.theory)
    blocks, passed = [], True
    seen = set()
    for entry in data.get("entries", []):
        lam = float(entry["lambda"])
        report = validate_frobenius(FrobeniusAlgebra.from_json(entry["block"]), args.tol)
        dup = lam in seen
        seen.add(lam)
        passed = passed and report.passed and not dup
        out = {"lambda": lam, "duplicate": dup}
        out.update(report.to_dict())
        blocks.append(out)
    if not blocks:
        passed = False
    _emit({"passed": passed, "blocks": blocks})
    return EXIT_OK if passed else EXIT_INVALID


def cmd_eval(args) -> int:
    vft, X = _theory(args.theory), _bordism(args.bordism)
    try:
        op = evaluator.eval(vft, X, args.eps, args.lambda_max)
    except LorentzianLabelError:
        raise UsageError("bordism carries imaginary labels; use the `lorentz` command") from None
    _emit(op.to_json())
    return EXIT_OK


def cmd_partition(args) -> int:
    vft = _theory(args.theory)
    X = Bordism.closed(args.genus, Label.volume(args.volume))
    op = evaluator.eval(vft, X, args.eps, args.lambda_max)
    _emit(
        {
            "genus": args.genus,
            "volume": encode_complex(args.volume),
            "value": encode_complex(op.scalar),
            "lambda_max": op.lambda_max,
            "tail_bound": op.tail_bound,
        }
    )
    return EXIT_OK


def cmd_lorentz(args) -> int:
    vft, X = _theory(args.theory), _bordism(args.bordism)
    _emit(lorentzian.eval_lorentzian(vft, X, args.lambda_max).to_json())
    return EXIT_OK


def cmd_limits(args) -> int:
    vft, X = _theory(args.theory), _bordism(args.bordism)
    if args.mode == "short":
        _emit(lorentzian.short_distance_L0(vft, X, args.lambda_max).to_json())
    else:
        M = lorentzian.long_distance_Linf(vft, X)
        _emit({"n_in": X.n_in, "n_out": X.n_out, "kernel_dim": vft.blocks[0].dim, "matrix": encode_array(M)})
    return EXIT_OK


def cmd_ym_gen(args) -> int:
    try:
        norm = Fraction(args.norm)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--norm must be a rational p/q, got {args.norm!r}") from None
    vft = ym_vft(build_datum(args.group, norm), Fraction(args.cmax))
    _emit(vft.to_json())
    return EXIT_OK


def cmd_metric_volume(args) -> int:
    labels = total_volume(SampledDensity.from_json(_load(args.mesh)))
    _emit([l.to_json() for l in labels] if isinstance(labels, list) else labels.to_json())
    return EXIT_OK


def _random_volume(rng: random.Random) -> complex:
    return complex(rng.uniform(0.2, 2.0), rng.uniform(-3.0, 3.0))


def _gluing_space(vft: SpectralVFT, max_dim: int = 8) -> SpectralVFT:
    keep = vft.levels[0]
    for lam in vft.levels:
        if vft.total_dim(lam) > max_dim:
            break
        keep = lam
    return vft.truncated(keep)


def cmd_check(args) -> int:
    vft = _theory(args.theory)
    rng = random.Random(args.seed)
    cases = []
    if args.suite == "growth":
        norms = level_norms(vft)
        for t in GROWTH_RATES:
            cert = certify_growth(vft.levels, norms, t)
            cases.append(dict(cert.to_json(), passed=cert.interior))
        passed = all(c["passed"] for c in cases)
        _emit({"suite": "growth", "passed": passed, "cases": cases})
        return EXIT_OK if passed else EXIT_INVALID
    tol = TOLERANCES[args.suite]
    for _ in range(args.trials):
        if args.suite == "semigroup":
            s, s2 = _random_volume(rng), _random_volume(rng)
            r = evaluator.check_semigroup(vft, s, s2)
            cases.append({"s": encode_complex(s), "s2": encode_complex(s2), "residual": r})
        elif args.suite == "adjoint":
            X = oracle.random_bordism(rng)
            r = evaluator.check_adjoint(vft, X)
            cases.append({"bordism": X.to_json(), "residual": r})
        else:
            space = _gluing_space(vft)
            X = oracle.random_bordism(rng)
            steps = oracle.random_decomposition(X, rng.randrange(1 << 30))
            E = evaluator.eval(space, X, lambda_max=space.levels[-1])
            B = oracle.brute_contract(space, steps, X.n_in).to_dense()
            r = float(np.max(np.abs(E.to_dense() - B), initial=0.0)) / max(1.0, float(np.max(np.abs(B), initial=0.0)))
            cases.append({"bordism": X.to_json(), "pieces": len(steps), "residual": r})
    worst = max((c["residual"] for c in cases), default=0.0)
    passed = worst < tol
    _emit({"suite": args.suite, "seed": args.seed, "trials": args.trials, "tolerance": tol,
           "max_residual": worst, "passed": passed, "cases": cases})
    return EXIT_OK if passed else EXIT_INVALID


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vft2d", description="Evaluate 2d volume-dependent field theories.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("validate", help="check every block of a theory file")
    q.add_argument("theory")
    q.add_argument("--tol", type=float, default=1e-10)
    q.set_defaults(func=cmd_validate)

    q = sub.add_parser("eval", help="evaluate a bordism with volume labels")
    q.add_argument("theory")
    q.add_argument("bordism")
    q.add_argument("--eps", type=float, default=1e-10)
    q.add_argument("--lambda-max", type=float, default=None)
    q.set_defaults(func=cmd_eval)

    q = sub.add_parser("partition", help="closed-surface partition function")
    q.add_argument("theory")
    q.add_argument("--genus", type=int, required=True)
    q.add_argument("--volume", type=_complex_arg, required=True, metavar="RE,IM")
    q.add_argument("--eps", type=float, default=1e-10)
    q.add_argument("--lambda-max", type=float, default=None)
    q.set_defaults(func=cmd_partition)

    q = sub.add_parser("lorentz", help="evaluate a bordism with imaginary labels")
    q.add_argument("theory")
    q.add_argument("bordism")
    q.add_argument("--lambda-max", type=float, required=True)
    q.set_defaults(func=cmd_lorentz)

    q = sub.add_parser("limits", help="short- or long-distance topological limit")
    q.add_argument("theory")
    q.add_argument("bordism")
    q.add_argument("--mode", choices=("short", "long"), required=True)
    q.add_argument("--lambda-max", type=float, default=None)
    q.set_defaults(func=cmd_limits)

    q = sub.add_parser("ym-gen", help="generate a Yang-Mills theory")
    q.add_argument("--group", choices=("trivial", "u1", "a1", "a2"), required=True)
    q.add_argument("--cmax", required=True, help="largest Casimir kept (rational)")
    q.add_argument("--norm", default="1/1", help="Casimir scale p/q relative to c = j(j+1) for SU(2)")
    q.set_defaults(func=cmd_ym_gen)

    q = sub.add_parser("metric-volume", help="integrate a sampled density over a mesh")
    q.add_argument("mesh")
    q.set_defaults(func=cmd_metric_volume)

    q = sub.add_parser("check", help="randomized property checks")
    q.add_argument("theory")
    q.add_argument("--suite", choices=("semigroup", "adjoint", "gluing", "growth"), required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--trials", type=int, default=20)
    q.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, LorentzianLabelError, NoLorentzianLimitError, NotNormalizedError) as exc:
        print(f"vft2d {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TruncationError as exc:
        print(f"vft2d {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (VFTError, ValueError, KeyError) as exc:
        print(f"vft2d {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
