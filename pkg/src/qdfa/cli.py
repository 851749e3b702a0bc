"""Command-line interface.

Exit codes: 0 success, 1 invalid input, 2 a requested check was falsified
(or two internal routes disagreed), 3 numeric failure.  Nothing else is ever
returned.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, asalg, faults, posit, suite
from .channel import load_channel
from .errors import ConsistencyError, InvalidChannelError, NumericFailure
from .matcore import DEFAULT_TOL, Tolerances
from .spectral import peripheral_projection, spectrum

log = logging.getLogger("qdfa")

EXIT_OK, EXIT_INVALID, EXIT_FALSIFIED, EXIT_NUMERIC = 0, 1, 2, 3

EXPECTATIONS = ("faithful", "not-faithful", "peripherally-automorphic", "not-peripherally-automorphic",
                "generic", "ucp")


def _complex_list(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex).ravel()]


def _matrix(M) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(M, dtype=complex)]


def _default_seed() -> int:
    raw = os.environ.get("QDFA_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise InvalidChannelError(f"QDFA_SEED must be an integer, got {raw!r}") from None


def _tolerances(args) -> Tolerances:
    kw = DEFAULT_TOL.as_dict()
    if getattr(args, "tol", None) is not None:
        kw["tol_residual"] = args.tol
    if getattr(args, "peripheral_tol", None) is not None:
        kw["tol_peripheral"] = args.peripheral_tol
    try:
        return Tolerances(**kw)
    except ValueError as exc:
        raise InvalidChannelError(str(exc)) from exc


def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _write_json(path, doc: dict):
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def build_report(ch, tol: Tolerances, trials: int, seed: int, emit_bases: bool = False) -> tuple[dict, object]:
    """Run the full pipeline and assemble the JSON report document."""
    report = asalg.classify(ch, tol, seed)
    pos = posit.positivity_report(report.peripheral, trials, seed, tol)
    doc = {
        "tool_version": __version__,
        "timestamp": _timestamp(),
        "channel_label": ch.label,
        "tags": list(ch.tags),
        "tolerances": tol.as_dict(),
        "spectrum": _complex_list(report.eigenvalues),
        "peripheral_eigenvalues": _complex_list(report.peripheral_eigenvalues),
        "dims": {
            "attr": report.dims["attr"],
            "fix": report.dims["fix"],
            "dfa": report.dims["dfa"],
            "ce_dfa": report.dims["ce_dfa"],
            "kernel": report.dims["kernel_ideal"],
        },
        "flags": {
            "is_ucp": ch.is_ucp,
            "faithful": report.faithful,
            "peripherally_automorphic": report.peripherally_automorphic,
            "ce_unit_exists": report.ce_unit_exists,
        },
        "asymptotic_class": report.asymptotic_class,
        "support_dim": report.support_dim,
        "stationary_state": _matrix(report.stationary_state),
        "chain_violations": list(report.chain_violations),
        "residuals": {k: float(v) for k, v in sorted(report.invariant_residuals.items())},
        "positivity": pos.as_dict(),
        "bases": None,
    }
    if emit_bases:
        doc["bases"] = {name: [_matrix(b) for b in space.basis] for name, space in report.spaces.items()}
    return doc, report


def _summary(doc: dict) -> str:
    d = doc["dims"]
    f = doc["flags"]
    lines = [
        f"channel        {doc['channel_label'] or '(unnamed)'} {' '.join(doc['tags'])}".rstrip(),
        f"peripheral     {len(doc['peripheral_eigenvalues'])} of {len(doc['spectrum'])} eigenvalues",
        f"dims           attr={d['attr']} fix={d['fix']} dfa={d['dfa']} ce_dfa={d['ce_dfa']} kernel={d['kernel']}",
        f"faithful       {f['faithful']}",
        f"automorphic    {f['peripherally_automorphic']}",
        f"class          {doc['asymptotic_class']}",
        f"positivity     {doc['positivity']['status']}",
    ]
    if doc["chain_violations"]:
        lines.append(f"violations     {', '.join(doc['chain_violations'])}")
    return "\n".join(lines)


def _expectation_holds(expect: str, doc: dict) -> bool:
    f = doc["flags"]
    return {
        "faithful": f["faithful"],
        "not-faithful": not f["faithful"],
        "peripherally-automorphic": f["peripherally_automorphic"],
        "not-peripherally-automorphic": not f["peripherally_automorphic"],
        "generic": doc["asymptotic_class"] == "generic",
        "ucp": f["is_ucp"],
    }[expect]


def cmd_analyze(args) -> int:
    tol = _tolerances(args)
    seed = args.seed if args.seed is not None else _default_seed()
    ch = load_channel(args.path, tol, permissive=args.permissive)
    log.info("loaded %s (d=%d, %s picture)", ch.label or args.path, ch.dim, ch.picture)
    doc, _ = build_report(ch, tol, args.trials, seed, args.emit_bases)
    print(_summary(doc))
    if args.report:
        _write_json(args.report, doc)
    failed = [e for e in args.expect or () if not _expectation_holds(e, doc)]
    if failed:
        print(f"expectation failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FALSIFIED
    return EXIT_OK


def _print_matrix(name: str, M):
    with np.printoptions(precision=6, suppress=True, linewidth=120):
        print(f"{name} =\n{np.asarray(M)}")


def cmd_check(args) -> int:
    tol = _tolerances(args)
    seed = args.seed if args.seed is not None else _default_seed()
    # positivity predicates are about maps that may fail to be CP, so they always ingest permissively
    permissive = args.permissive or args.predicate in ("ucp", "schwarz-falsify")
    ch = load_channel(args.path, tol, permissive=permissive)
    if args.predicate == "ucp":
        v = ch.validation
        print(f"ucp {ch.is_ucp}: unitality residual {v.unitality_residual:.3e}, "
              f"Choi min eigenvalue {v.choi_min_eigenvalue:.3e}, hermiticity residual {v.hermiticity_residual:.3e}")
        return EXIT_OK if ch.is_ucp else EXIT_FALSIFIED
    if args.predicate == "schwarz-falsify":
        rep = posit.falsify_schwarz(ch, args.trials, seed, tol)
        if rep.schwarz_violation is None:
            print(f"no Schwarz violation in {rep.trials} trials (seed {seed}); this is not a certificate")
            return EXIT_FALSIFIED
        v = rep.schwarz_violation
        print(f"Schwarz violation: min eigenvalue {v.min_eig:.6f} at trial {v.trial} ({v.kind})")
        _print_matrix("X", v.X)
        return EXIT_OK
    pd = peripheral_projection(ch, tol, spectrum(ch, tol))
    if args.predicate == "faithful":
        ok, sigma = asalg.is_faithful(pd)
        print(f"faithful {ok}")
        _print_matrix("sigma", sigma)
        return EXIT_OK if ok else EXIT_FALSIFIED
    ok, residual = asalg.is_peripherally_automorphic(pd, seed)
    print(f"peripherally automorphic {ok} (closure residual {residual:.3e})")
    witness = asalg.peripheral_automorphy_witness(pd)
    if witness is not None:
        _print_matrix("X", witness[0])
        _print_matrix("Y", witness[1])
    return EXIT_OK if ok else EXIT_FALSIFIED


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad dimension list {text!r}") from None
    if not dims or min(dims) < 2:
        raise argparse.ArgumentTypeError("dimensions must be integers >= 2")
    return dims


def cmd_suite(args) -> int:
    tol = _tolerances(args)
    seed = args.seed if args.seed is not None else _default_seed()
    corpus = suite.build_corpus(args.seeds, args.dims, seed)
    log.info("corpus of %d channels, seed %d", len(corpus), seed)
    with faults.inject(*(args.inject_fault or ())):
        results = suite.run_invariant_suite(corpus, tol, args.trials, seed)
    doc = {"tool_version": __version__, "timestamp": _timestamp(), **suite.suite_report(results, corpus, seed, tol)}
    width = max(len(r.name) for r in results)
    for r in results:
        mark = "ok  " if r.passed else "FAIL"
        print(f"{mark} {r.name:<{width}}  worst {r.worst_residual:.3e}  bound {r.bound:.1e}  n={r.evaluated}")
    if args.report:
        _write_json(args.report, doc)
    failed = [r for r in results if not r.passed]
    if failed:
        for r in failed:
            first = r.failures[0] if r.failures else r.witness
            print(f"failed: {r.name} ({r.anchor}); reproducer {json.dumps(first)}", file=sys.stderr)
        return EXIT_FALSIFIED
    print(f"all {len(results)} invariants hold on {len(corpus)} channels (seed {seed})")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdfa", description="Asymptotic analysis of quantum channels.")
    p.add_argument("--version", action="version", version=f"qdfa {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--tol", type=float, help=f"residual tolerance (default {DEFAULT_TOL.tol_residual:g})")
        sp.add_argument("--peripheral-tol", type=float,
                        help=f"peripheral cluster threshold (default {DEFAULT_TOL.tol_peripheral:g})")
        sp.add_argument("--trials", type=int, default=500, help="random probes for Schwarz falsification")
        sp.add_argument("--seed", type=int, help="random seed (default: $QDFA_SEED or 0)")

    a = sub.add_parser("analyze", help="run the full pipeline on a channel JSON file")
    a.add_argument("path")
    common(a)
    a.add_argument("--emit-bases", action="store_true", help="include subspace bases in the report")
    a.add_argument("--report", metavar="OUT", help="write the JSON report here")
    a.add_argument("--permissive", action="store_true", help="accept maps that are not UCP")
    a.add_argument("--expect", action="append", choices=EXPECTATIONS,
                   help="exit 2 unless this holds (repeatable)")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("check", help="evaluate one predicate")
    c.add_argument("path")
    c.add_argument("predicate", choices=("ucp", "faithful", "peripherally-automorphic", "schwarz-falsify"))
    common(c)
    c.add_argument("--permissive", action="store_true", help="accept maps that are not UCP")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("suite", help="run the invariant battery over built-ins and a random corpus")
    common(s)
    s.add_argument("--seeds", type=int, default=200, help="number of random channels (default 200)")
    s.add_argument("--dims", type=_parse_dims, default=(2, 3, 4), help="comma-separated dimensions")
    s.add_argument("--report", metavar="OUT", help="write the JSON suite report here")
    s.add_argument("--inject-fault", action="append", choices=faults.FAULTS,
                   help="deliberately break one component (mutation check)")
    s.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InvalidChannelError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConsistencyError as exc:
        print(f"internal consistency check failed: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
