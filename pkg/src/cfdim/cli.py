"""Command-line front end.

Exit codes: 0 success, 1 solver error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from .assembly import Correction, OperatorSpec, WeightFamily, assemble, assemble_sandwich
from .errors import CFDimError
from .maps import Alphabet, AlphabetKind, load_custom_alphabet
from .solver import SolveConfig, alphas, bracket_dimension, radius_report, solve_uncorrected, verify_stored
from .spectral import power_method
from .tails import delta_upper, eta_lower

SIG_DIGITS = 15
NAMED_SETS = {"I1": Alphabet.i1, "I2": Alphabet.i2, "I3": Alphabet.i3, "special": Alphabet.special}


class UsageError(Exception):
    pass


def round_sig(x):
    """Round floats (recursively) to 15 significant digits for output."""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if not math.isfinite(x) else float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [round_sig(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {k: round_sig(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [round_sig(v) for v in x]
    return x


def parse_set(text: str) -> Alphabet:
    if text in NAMED_SETS:
        return NAMED_SETS[text]()
    if text.startswith("custom:"):
        try:
            return load_custom_alphabet(text[len("custom:") :])
        except (OSError, ValueError) as exc:
            raise argparse.ArgumentTypeError(f"bad custom alphabet: {exc}") from None
    raise argparse.ArgumentTypeError(f"unknown set {text!r}; expected I1, I2, I3, special or custom:<file>")


def even_int(text: str) -> int:
    n = int(text)
    if n < 2 or n % 2:
        raise argparse.ArgumentTypeError(f"N must be an even integer >= 2, got {text}")
    return n


def set_name(alphabet: Alphabet) -> str:
    return alphabet.name


def _common(p: argparse.ArgumentParser, need_set=True):
    p.add_argument("--set", dest="alphabet", type=parse_set, required=need_set, help="I1, I2, I3, special or custom:<file>")
    p.add_argument("--n", type=even_int, default=50, help="mesh resolution N (h = 1/N, even)")
    p.add_argument("--r", type=float, default=100.0, help="truncation radius R for infinite sets")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--tol-eig", type=float, default=1e-10)
    p.add_argument("--tol-root", type=float, default=1e-5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfdim", description="Hausdorff dimension brackets for complex continued-fraction sets.")
    parser.add_argument("--verify-from", dest="verify_from_global", metavar="JSON", help="alias for the verify-from subcommand")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("dimension", help="certified dimension bracket")
    _common(p)
    p.add_argument("--dump-matrix", metavar="PREFIX", help="write PREFIX.lower.txt / PREFIX.upper.txt triplet dumps")

    p = sub.add_parser("radius", help="spectral radii of A_s and B_s at one s")
    _common(p)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--dump-matrix", metavar="PREFIX")

    p = sub.add_parser("tail", aliases=["tail-bounds"], help="tail bounds delta and eta")
    p.add_argument("--set", dest="alphabet", type=parse_set, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--r", type=float, default=100.0)
    p.add_argument("--out")

    p = sub.add_parser("higher-order", help="uncorrected higher-order collocation estimate")
    _common(p)
    p.add_argument("--degree", type=int, choices=(1, 2, 3, 4), default=1)
    p.add_argument("--h", type=float, help="mesh width; N = round(1/h)")

    p = sub.add_parser("dump-eigenfunction", help="CSV of the positive eigenvector of M_s")
    _common(p)
    p.add_argument("--s", type=float, required=True)

    p = sub.add_parser("verify-from", help="re-check certificates stored in a dimension JSON")
    p.add_argument("json_path")
    p.add_argument("--threads", type=int, default=1)
    return parser


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj: dict, out: str | None):
    _emit(json.dumps(round_sig(obj), indent=2) + "\n", out)


def _config(args, n=None) -> SolveConfig:
    return SolveConfig(
        alphabet=args.alphabet,
        n=n or args.n,
        R=args.r,
        tol_eig=args.tol_eig,
        tol_root=args.tol_root,
        threads=args.threads,
    )


def _set_fields(alphabet: Alphabet) -> dict:
    out = {"set": alphabet.name}
    if alphabet.kind is AlphabetKind.CUSTOM:
        out["digits"] = [[b.real, b.imag] for b in alphabet.digits]
    return out


def cmd_dimension(args) -> int:
    cfg = _config(args)
    t0 = time.perf_counter()
    br = bracket_dimension(cfg)
    record = {
        **_set_fields(cfg.alphabet),
        "h": 1.0 / cfg.n,
        "n": cfg.n,
        "R": cfg.radius if math.isfinite(cfg.radius) else None,
        "s_lower": br.s_lower,
        "s_upper": br.s_upper,
        "r_at_lower": br.r_at_lower,
        "r_at_upper": br.r_at_upper,
        "alpha_lower": br.alpha_lower,
        "alpha_upper": br.alpha_upper,
        "dof": br.dof,
        "runtime_s": time.perf_counter() - t0,
        "certificate_lower": br.certificate_lower,
        "certificate_upper": br.certificate_upper,
    }
    if args.dump_matrix:
        mesh = cfg.mesh()
        for key, s, corr, alpha in (
            ("lower", br.s_lower, Correction.LOWER, br.alpha_lower),
            ("upper", br.s_upper, Correction.UPPER, br.alpha_upper),
        ):
            spec = OperatorSpec(cfg.alphabet, s, mesh, cfg.radius, alpha, corr)
            assemble(spec, cfg.threads).dump(f"{args.dump_matrix}.{key}.txt")
    _emit_json(record, args.out)
    return 0


def cmd_radius(args) -> int:
    cfg = _config(args)
    rep = radius_report(cfg, args.s)
    if args.dump_matrix:
        eta, delta = alphas(cfg.alphabet, args.s, cfg.radius)
        a, b = assemble_sandwich(cfg.mesh(), cfg.alphabet, args.s, cfg.radius, eta, delta, threads=cfg.threads)
        a.dump(f"{args.dump_matrix}.lower.txt")
        b.dump(f"{args.dump_matrix}.upper.txt")
    _emit_json({**_set_fields(cfg.alphabet), "s": args.s, "n": cfg.n, "R": cfg.radius if math.isfinite(cfg.radius) else None, **rep}, args.out)
    return 0


def cmd_tail(args) -> int:
    name = args.alphabet.name
    if name not in ("I1", "I2"):
        raise UsageError("tail bounds are defined for I1 and I2 only")
    try:
        delta = delta_upper(name, args.s, args.r)
        eta = eta_lower(name, args.s, args.r)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit_json({"set": name, "s": args.s, "R": args.r, "delta": delta, "eta": eta}, args.out)
    return 0


def cmd_higher_order(args) -> int:
    n = args.n
    if args.h is not None:
        n = int(round(1.0 / args.h))
        if n < 2 or n % 2:
            raise UsageError(f"h={args.h} gives N={n}, which is not an even integer >= 2")
    cfg = _config(args, n)
    family = WeightFamily.SPECIAL if cfg.alphabet.kind is AlphabetKind.SPECIAL else WeightFamily.MOBIUS
    t0 = time.perf_counter()
    mesh = cfg.mesh()
    s = solve_uncorrected(cfg, args.degree, family, mesh=mesh)
    _emit_json(
        {
            **_set_fields(cfg.alphabet),
            "degree": args.degree,
            "h": 1.0 / n,
            "n": n,
            "dof": mesh.nodes(args.degree).size,
            "s": s,
            "runtime_s": time.perf_counter() - t0,
        },
        args.out,
    )
    return 0


def cmd_dump_eigenfunction(args) -> int:
    cfg = _config(args)
    mesh = cfg.mesh()
    family = WeightFamily.SPECIAL if cfg.alphabet.kind is AlphabetKind.SPECIAL else WeightFamily.MOBIUS
    spec = OperatorSpec(cfg.alphabet, args.s, mesh, cfg.radius, 0.0, Correction.NONE, family)
    res = power_method(assemble(spec, cfg.threads), cfg.tol_eig)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "v"])
    for (x, y), v in zip(mesh.points.tolist(), res.vector.tolist()):
        w.writerow([f"{x:.{SIG_DIGITS}g}", f"{y:.{SIG_DIGITS}g}", f"{v:.{SIG_DIGITS}g}"])
    _emit(buf.getvalue(), args.out)
    return 0


def config_from_record(record: dict, threads: int = 1) -> SolveConfig:
    name = record["set"]
    if name == "custom":
        alphabet = Alphabet.custom(complex(re, im) for re, im in record["digits"])
    elif name in NAMED_SETS:
        alphabet = NAMED_SETS[name]()
    else:
        raise UsageError(f"unknown set {name!r} in record")
    R = record.get("R")
    return SolveConfig(alphabet, n=int(record["n"]), R=float(R) if R is not None else math.inf, threads=threads)


def cmd_verify_from(path: str, threads: int = 1) -> int:
    try:
        with open(path) as fh:
            record = json.load(fh)
        cfg = config_from_record(record, threads)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    result = verify_stored(cfg, record)
    ok = all(result.values())
    _emit_json({"verified": ok, **result}, None)
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.verify_from_global:
            return cmd_verify_from(args.verify_from_global)
        handlers = {
            "dimension": cmd_dimension,
            "radius": cmd_radius,
            "tail": cmd_tail,
            "tail-bounds": cmd_tail,
            "higher-order": cmd_higher_order,
            "dump-eigenfunction": cmd_dump_eigenfunction,
        }
        if args.command == "verify-from":
            return cmd_verify_from(args.json_path, args.threads)
        if args.command not in handlers:
            parser.print_usage(sys.stderr)
            return 2
        return handlers[args.command](args)
    except UsageError as exc:
        print(f"cfdim: error: {exc}", file=sys.stderr)
        return 2
    except CFDimError as exc:
        print(f"cfdim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"cfdim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
