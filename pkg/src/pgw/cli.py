"""Command-line front-end: validate / analyze / witness / pipeline / oracle.

Every command reads one group file (.pcg power-commutator presentation or
.perm permutation generators), runs the corresponding library workflow, and
emits either a human-readable summary or a structured JSON report with a
fixed field order.  Output is deterministic: two runs on identical input
produce byte-identical structured output.

Exit codes: 0 ok, 1 no result, 2 parse error, 3 inconsistent presentation,
4 verification failure, 5 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import automorphism as autmod
from . import oracle, structure, witness
from .errors import (
    InconsistentPresentationError,
    ParseError,
    PgwError,
    ResourceCapError,
)
from .pcgroup import GroupCtx
from .presentation import check_consistency, parse_presentation

EXIT_OK = 0
EXIT_NO_RESULT = 1
EXIT_PARSE_ERROR = 2
EXIT_INCONSISTENT = 3
EXIT_VERIFICATION_FAILURE = 4
EXIT_RESOURCE_CAP = 5


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _order_cap(args) -> int:
    if getattr(args, "max_order", None):
        return int(args.max_order)
    env = os.environ.get("PGW_MAX_ORDER")
    if env:
        return int(env)
    return oracle.DEFAULT_ORDER_CAP


def _read_file(path_str: str) -> tuple[Path, str]:
    path = Path(path_str)
    try:
        return path, path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path_str}: {exc.strerror}") from exc


def _load_group(path_str: str, cap: int):
    """Load a .pcg or .perm file into a group, enforcing the order cap."""
    path, text = _read_file(path_str)
    if path.suffix == ".perm":
        G = oracle.parse_perm_file(text, order_cap=cap)
    else:
        pres = parse_presentation(text, source=path.name)
        if pres.order > cap:
            raise ResourceCapError(f"order {pres.order} exceeds cap {cap}")
        G = GroupCtx.from_presentation(pres)
    return path, G


def _render_subgroup(G, S) -> dict:
    return {
        "order": S.order,
        "generators": [G.render(g) for g in S.generators],
    }


def _witness_payload(G, w: witness.WitnessData) -> dict:
    return {
        "x": G.render(w.x),
        "centralizer": _render_subgroup(G, w.M),
        "g": G.render(w.g),
        "c": G.render(w.c),
    }


def _beta_payload(G, beta: autmod.Automorphism) -> dict:
    return {
        "generator_images": [
            [G.render(g), G.render(beta.images[g])] for g in G.generators
        ]
    }


def _verification_payload(G, rep: witness.VerificationReport) -> dict:
    return {
        "order_is_p": rep.order_is_p,
        "order": rep.order,
        "non_inner": rep.non_inner,
        "inner_witness": (
            None if rep.inner_witness is None else G.render(rep.inner_witness)
        ),
        "fixes_frattini": rep.fixes_frattini,
        "power_identity_holds": rep.power_identity_holds,
        "all_green": rep.all_green and rep.power_identity_holds,
    }


def _hypotheses_payload(hyps: witness.HypothesisReport) -> dict:
    return {
        "class": hyps.class_n,
        "gamma_orders": list(hyps.gamma_orders),
        "zeta_orders": list(hyps.zeta_orders),
        "exp_gamma_n_minus_1": hyps.exp_gamma_n_minus_1,
        "gamma_n_order": hyps.gamma_n_order,
        "coclass": hyps.coclass,
        "flags": {k: hyps.flags[k] for k in witness.HYPOTHESIS_FLAGS},
        "delegation": hyps.delegation,
    }


class Report:
    """Accumulates the structured document and the human-readable lines."""

    def __init__(self, command: str, path: Path):
        self.doc = {
            "command": command,
            "input": str(path),
            "input_sha256": _sha256(path),
            "status": None,
            "result": {},
        }
        self.lines: list[str] = []

    def emit(self, args, status: int) -> int:
        self.doc["status"] = status
        if args.format == "json":
            print(json.dumps(self.doc, indent=2))
        else:
            for line in self.lines:
                print(line)
        return status


def cmd_validate(args) -> int:
    path, text = _read_file(args.path)
    report = Report("validate", path)
    if path.suffix == ".perm":
        G = oracle.parse_perm_file(text, order_cap=_order_cap(args))
        report.doc["result"] = {
            "kind": "permutation",
            "order": G.order,
            "prime": G.prime,
        }
        report.lines.append(
            f"{path.name}: permutation group of order {G.order} (p = {G.prime})"
        )
        return report.emit(args, EXIT_OK)
    pres = parse_presentation(text, source=path.name)
    cap = _order_cap(args)
    if pres.order > cap:
        raise ResourceCapError(f"order {pres.order} exceeds cap {cap}")
    cons = check_consistency(pres, mode=args.mode, max_order=cap)
    report.doc["result"] = {
        "kind": "pc-presentation",
        "name": pres.name,
        "order": pres.order,
        "prime": pres.prime,
        "rank": pres.rank,
        "consistent": cons.consistent,
        "method": cons.method,
        "failures": [list(f) for f in cons.failures],
    }
    verdict = "consistent" if cons.consistent else "INCONSISTENT"
    report.lines.append(
        f"{path.name}: pc presentation {pres.name!r}, order {pres.order}, "
        f"{verdict} ({cons.method})"
    )
    for fid, nf1, nf2 in cons.failures:
        report.lines.append(f"  overlap {fid}: {nf1!r} != {nf2!r}")
    return report.emit(args, EXIT_OK if cons.consistent else EXIT_INCONSISTENT)


def cmd_analyze(args) -> int:
    path, G = _load_group(args.path, _order_cap(args))
    report = Report("analyze", path)
    snap = oracle.snapshot_via_structure(G)
    hyps = witness.classify_hypotheses(G)
    report.doc["result"] = {
        "snapshot": snap.as_dict(),
        "hypotheses": _hypotheses_payload(hyps),
    }
    d = snap.as_dict()
    report.lines.append(
        f"{path.name}: |G| = {d['order']}, p = {d['prime']}, "
        f"class {d['nilpotency_class']}, coclass {d['coclass']}"
    )
    report.lines.append(
        f"  |Z| = {d['center_order']}, |Phi| = {d['frattini_order']}, "
        f"exp = {d['exponent']}, d = {d['d']}"
    )
    report.lines.append(f"  gamma orders: {d['gamma_orders']}")
    report.lines.append(f"  zeta orders:  {d['zeta_orders']}")
    preds = ", ".join(k for k, v in d["predicates"].items() if v) or "none"
    report.lines.append(f"  predicates: {preds}")
    flags = ", ".join(k for k, v in hyps.flags.items() if v) or "none"
    report.lines.append(f"  hypothesis flags: {flags}")
    if hyps.delegation:
        report.lines.append(f"  delegation: {hyps.delegation}")
    return report.emit(args, EXIT_OK)


def cmd_witness(args) -> int:
    path, G = _load_group(args.path, _order_cap(args))
    report = Report("witness", path)
    w = witness.find_admissible_witness(G)
    if w is None:
        report.doc["result"] = {"witness": None}
        report.lines.append(f"{path.name}: no admissible witness")
        return report.emit(args, EXIT_NO_RESULT)
    w.check_invariants(G)
    beta = witness.construct_beta(G, w)
    rep = witness.verify_noninner_orderp(G, beta, w)
    report.doc["result"] = {
        "witness": _witness_payload(G, w),
        "beta": _beta_payload(G, beta),
        "verification": _verification_payload(G, rep),
    }
    report.lines.append(
        f"{path.name}: witness x = {G.render(w.x)}, g = {G.render(w.g)}, "
        f"c = {G.render(w.c)}, |C(x)| = {w.M.order}"
    )
    report.lines.append(f"  beta: {beta.render()}")
    report.lines.append(
        f"  order {rep.order}, non-inner {rep.non_inner}, "
        f"fixes Phi {rep.fixes_frattini}, power identity "
        f"{rep.power_identity_holds}"
    )
    if rep.inner_witness is not None:
        report.lines.append(
            f"  inner conjugator: {G.render(rep.inner_witness)}"
        )
    green = rep.all_green and rep.power_identity_holds
    return report.emit(args, EXIT_OK if green else EXIT_VERIFICATION_FAILURE)


def cmd_pipeline(args) -> int:
    path, G = _load_group(args.path, _order_cap(args))
    report = Report("pipeline", path)
    outcome = witness.conjecture_pipeline(G, fallback=args.fallback)
    result = {"kind": outcome.kind}
    if outcome.hypotheses is not None:
        result["hypotheses"] = _hypotheses_payload(outcome.hypotheses)
    if outcome.delegation is not None:
        result["delegation"] = outcome.delegation
    if outcome.oracle_confirmed is not None:
        result["oracle_confirmed"] = outcome.oracle_confirmed
    if outcome.beta is not None:
        result["beta"] = _beta_payload(G, outcome.beta)
    if outcome.verification is not None:
        result["verification"] = _verification_payload(G, outcome.verification)
    report.doc["result"] = result
    report.lines.append(f"{path.name}: {outcome.kind}")
    if outcome.delegation:
        report.lines.append(f"  delegated to: {outcome.delegation}")
    if outcome.beta is not None:
        report.lines.append(f"  beta: {outcome.beta.render()}")
    if outcome.verification is not None:
        v = outcome.verification
        report.lines.append(
            f"  order {v.order}, non-inner {v.non_inner}, "
            f"fixes Phi {v.fixes_frattini}"
        )
    if outcome.kind in ("fallback-none", "undetermined"):
        return report.emit(args, EXIT_NO_RESULT)
    if outcome.verification is not None:
        green = (
            outcome.verification.all_green
            and outcome.verification.power_identity_holds
        )
        if not green:
            return report.emit(args, EXIT_VERIFICATION_FAILURE)
    return report.emit(args, EXIT_OK)


def cmd_oracle(args) -> int:
    cap = _order_cap(args)
    path, G = _load_group(args.path, cap)
    report = Report("oracle", path)
    if args.crosscheck:
        other_path, other = _load_group(args.crosscheck, cap)
        report.doc["other_input"] = str(other_path)
        report.doc["other_sha256"] = _sha256(other_path)
        cv = oracle.cross_validate(G, other)
        report.doc["result"] = {
            "mode": "crosscheck",
            "all_equal": cv.all_equal,
            "fields": [
                {"name": n, "left": l, "right": r, "equal": eq}
                for n, l, r, eq in cv.fields
            ],
        }
        report.lines.append(
            f"{path.name} vs {other_path.name}: "
            f"{'all fields equal' if cv.all_equal else 'MISMATCH'}"
        )
        for n, l, r, eq in cv.fields:
            mark = "ok" if eq else "DIFFERS"
            report.lines.append(f"  {n}: {l} | {r}  [{mark}]")
        return report.emit(
            args, EXIT_OK if cv.all_equal else EXIT_VERIFICATION_FAILURE
        )
    search_cap = min(cap, oracle.DEFAULT_SEARCH_ORDER_CAP) if not args.max_order else cap
    found = oracle.exhaustive_noninner_search(
        G, require_fix_frattini=True, max_order=search_cap
    )
    if found is None:
        report.doc["result"] = {"mode": "search", "found": False}
        report.lines.append(
            f"{path.name}: no non-inner order-{G.prime} automorphism "
            f"fixing Phi elementwise"
        )
        return report.emit(args, EXIT_NO_RESULT)
    rep = witness.verify_noninner_orderp(G, found)
    report.doc["result"] = {
        "mode": "search",
        "found": True,
        "automorphism": _beta_payload(G, found),
        "verification": _verification_payload(G, rep),
    }
    report.lines.append(f"{path.name}: found {found.render()}")
    report.lines.append(
        f"  order {rep.order}, non-inner {rep.non_inner}, "
        f"fixes Phi {rep.fixes_frattini}"
    )
    return report.emit(args, EXIT_OK)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pgw",
        description=(
            "finite p-group toolkit: pc presentations, structure analysis, "
            "non-inner order-p automorphism construction, brute-force oracle"
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("human", "json"), default="human",
        help="output format (default: human)",
    )
    common.add_argument(
        "--jobs", type=int, default=1, metavar="N",
        help="upper bound on worker count (computations are deterministic)",
    )
    common.add_argument(
        "--max-order", type=int, default=None, metavar="CAP",
        help="refuse groups larger than CAP (default: env PGW_MAX_ORDER or 2187)",
    )
    common.add_argument(
        "--slow", action="store_true",
        help="allow entries/inputs marked slow at larger orders",
    )

    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser(
        "validate", parents=[common],
        help="parse a group file and consistency-check a pc presentation",
    )
    p.add_argument("path")
    p.add_argument(
        "--mode", choices=("overlap-tests", "full-associativity"),
        default="overlap-tests",
    )
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser(
        "analyze", parents=[common],
        help="structure snapshot and hypothesis classification",
    )
    p.add_argument("path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser(
        "witness", parents=[common],
        help="find a witness, construct the automorphism, verify it",
    )
    p.add_argument("path")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser(
        "pipeline", parents=[common],
        help="full dispatch: construct, delegate, or (with --fallback) search",
    )
    p.add_argument("path")
    p.add_argument(
        "--fallback", action="store_true",
        help="run the exhaustive search when no direct construction applies",
    )
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser(
        "oracle", parents=[common],
        help="exhaustive non-inner search or cross-backend validation",
    )
    p.add_argument("path")
    group = p.add_mutually_exclusive_group()
    group.add_argument(
        "--search", action="store_true",
        help="exhaustive search for a non-inner order-p automorphism (default)",
    )
    group.add_argument(
        "--crosscheck", metavar="OTHER",
        help="compare invariants against a second group file",
    )
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except InconsistentPresentationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE_CAP
    except PgwError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION_FAILURE


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
