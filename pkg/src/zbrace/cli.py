"""Command-line surface.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 input or
usage error.  Shift arguments (--z) accept "all", or a comma-separated
list of element labels; a token that matches no label is read as a
0-based element index.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .braces import (
    BraceError,
    SkewBrace,
    cyclic_unit_brace,
    odd_matrix_brace,
    product_brace,
    radical_even_brace,
    socle,
    trivial_skew_brace,
)
from .fileio import SchemaError, parse_brace, write_brace, write_matrix
from .groups import GroupValidationError, cyclic_group, symmetric_group
from .reporting import build_report, report_failed, select_shifts, serialize_report
from .solutions import InadmissibleZError, build_solution, dedup_solutions, is_involutive
from .tensor import (
    TwistBundle,
    UnknownObjectError,
    cocycle_check,
    coproduct_commutation_check,
    coproduct_defect,
    default_full_budget,
    export_object,
    lift_commutation_check,
    r_lift_defects,
    twisted_coproduct_check,
    twisted_solution_check,
)

_INPUT_ERRORS = (
    SchemaError,
    GroupValidationError,
    BraceError,
    InadmissibleZError,
    UnknownObjectError,
    FileNotFoundError,
    IsADirectoryError,
    ValueError,
)


def _resolve_element(b: SkewBrace, token: str) -> int:
    token = token.strip()
    if token in b.labels:
        return b.labels.index(token)
    try:
        idx = int(token)
    except ValueError:
        raise InadmissibleZError(f"{token!r} is neither a label nor an index") from None
    if not (0 <= idx < b.order):
        raise InadmissibleZError(f"index {idx} out of range [0, {b.order})")
    return idx


def _parse_z(b: SkewBrace, selection: str):
    if selection == "all":
        return "all"
    return [_resolve_element(b, tok) for tok in selection.split(",") if tok.strip()]


def _make_brace(args: argparse.Namespace) -> tuple[SkewBrace, str]:
    family = args.family
    if family == "cyclic2n":
        return cyclic_unit_brace(args.n), family
    if family == "oddmatrix":
        return odd_matrix_brace(), family
    if family == "radical":
        return radical_even_brace(args.modulus), family
    if family == "trivial":
        return trivial_skew_brace(_group_by_name(args.group), name=f"trivial-{args.group}"), family
    if family == "product":
        left = parse_brace(args.left)
        right = parse_brace(args.right)
        return product_brace(left, right), family
    raise ValueError(f"unknown family {family!r}")


def _group_by_name(name: str):
    name = name.lower()
    if name.startswith("s") and name[1:].isdigit():
        return symmetric_group(int(name[1:]))
    if name[0] in "zc" and name[1:].isdigit():
        return cyclic_group(int(name[1:]))
    raise ValueError(f"unknown group {name!r} (use sN or zN)")


def _print_checks(checks: list[dict]) -> None:
    for c in checks:
        where = f" z={c['z']}" if c["z"] is not None else ""
        line = f"[{c['status']:>7}] {c['section']}:{c['name']}{where} ({c['points']} points)"
        if c["status"] == "fail" and c["witness"] is not None:
            line += f" witness={c['witness']}"
        print(line)


def _family_of(b: SkewBrace) -> str | None:
    for fam in ("cyclic2n", "oddmatrix", "radical", "trivial", "product"):
        if b.name.startswith(fam):
            return fam
    return None


def cmd_make(args) -> int:
    b, _ = _make_brace(args)
    write_brace(b, args.output)
    print(f"wrote {b.name} (order {b.order}) to {args.output}")
    return 0


def cmd_validate(args) -> int:
    b = parse_brace(args.file)
    soc = socle(b)
    print(
        f"{b.name}: order {b.order}, left brace: {b.is_left_brace}, "
        f"two-sided: {b.is_two_sided}, socle size: {len(soc)}"
    )
    return 0


def cmd_socle(args) -> int:
    b = parse_brace(args.file)
    members = socle(b)
    print("socle indices:", " ".join(str(int(i)) for i in members))
    print("socle labels: ", " ".join(b.labels[int(i)] for i in members))
    return 0


def cmd_solve(args) -> int:
    b = parse_brace(args.file)
    zs = select_shifts(b, _parse_z(b, args.z), seed=args.seed)
    for z in zs:
        s = build_solution(b, z)
        print(f"z={z} (label {b.labels[z]}): involutive={is_involutive(s)}")
    if args.dedup:
        family = _family_of(b)
        from .braces import odd_matrix_pair_criterion

        partition = dedup_solutions(
            b, zs, pair_criterion=odd_matrix_pair_criterion if family == "oddmatrix" else None
        )
        for cls in partition.classes:
            print("class {" + ",".join(b.labels[z] for z in cls) + "}")
        if partition.criterion_pairs:
            agree = all(crit == eq for _, _, crit, eq in partition.criterion_pairs)
            print(f"pair criterion agrees with table equality: {agree}")
    return 0


def cmd_verify(args) -> int:
    b = parse_brace(args.file)
    zs = select_shifts(b, _parse_z(b, args.z), seed=args.seed)
    report = build_report(
        b,
        zs,
        level=args.level,
        family=_family_of(b),
        budget=args.budget,
        seed=args.seed,
        threads=args.threads,
    )
    _print_checks(report["checks"])
    summary = report["summary"]
    print(f"pass={summary['pass']} fail={summary['fail']} sampled={summary['sampled']}")
    return 1 if report_failed(report) else 0


_TWIST_CHECKS = ("commute", "cocycle", "twisted", "grouplike", "defect")


def cmd_twist(args) -> int:
    b = parse_brace(args.file)
    zs = select_shifts(b, _parse_z(b, args.z), seed=args.seed)
    wanted = [w.strip() for w in args.check.split(",") if w.strip()]
    for w in wanted:
        if w not in _TWIST_CHECKS:
            raise ValueError(f"unknown twist check {w!r} (choose from {', '.join(_TWIST_CHECKS)})")
    budget = args.budget if args.budget is not None else default_full_budget()
    failed = False
    for z in zs:
        bundle = TwistBundle(build_solution(b, z))
        checks = []
        if "commute" in wanted:
            checks.append(coproduct_commutation_check(bundle))
            checks.extend(lift_commutation_check(bundle, budget=budget, seed=args.seed))
        if "cocycle" in wanted:
            checks.extend(cocycle_check(bundle, budget=budget, seed=args.seed))
        if "twisted" in wanted:
            checks.extend(twisted_solution_check(bundle, budget=budget, seed=args.seed))
        if "grouplike" in wanted:
            checks.extend(twisted_coproduct_check(bundle))
        for c in checks:
            failed |= c.status == "fail"
            print(f"[{c.status:>7}] z={z} {c.name} ({c.points} points)"
                  + (f" witness={c.witness}" if c.witness else ""))
        if "defect" in wanted:
            probes = [b.identity]
            alt = next((i for i in range(b.order) if i != b.identity), None)
            if alt is not None:
                probes.append(alt)
            for eta in probes:
                c, _ = coproduct_defect(bundle, eta, budget=budget, seed=args.seed)
                nz = c.status == "fail"
                print(f"[   info] z={z} {c.name}:eta={eta} defect_nonzero={nz}"
                      + (f" witness={c.witness}" if nz else ""))
            for c in r_lift_defects(bundle, budget=budget, seed=args.seed):
                nz = c.status == "fail"
                print(f"[   info] z={z} {c.name} defect_nonzero={nz}"
                      + (f" witness={c.witness}" if nz else ""))
    return 1 if failed else 0


def cmd_export(args) -> int:
    b = parse_brace(args.file)
    z = _resolve_element(b, args.z)
    zs = select_shifts(b, [z], seed=args.seed)
    bundle = TwistBundle(build_solution(b, zs[0]))
    matrix = export_object(bundle, args.object)
    write_matrix(matrix, args.output)
    print(f"wrote {args.object} ({matrix.size}x{matrix.size}) to {args.output}")
    return 0


def cmd_report(args) -> int:
    cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if not isinstance(cfg, dict):
        raise SchemaError("$", "config must be an object")
    src_doc = cfg.get("brace")
    if not isinstance(src_doc, dict):
        raise SchemaError("$.brace", "missing brace source")
    family = src_doc.get("family")
    if "file" in src_doc:
        b = parse_brace(src_doc["file"])
        family = family or _family_of(b)
    elif family == "cyclic2n":
        b = cyclic_unit_brace(int(src_doc.get("n", 3)))
    elif family == "oddmatrix":
        b = odd_matrix_brace()
    elif family == "radical":
        b = radical_even_brace(int(src_doc.get("modulus", 8)))
    elif family == "trivial":
        b = trivial_skew_brace(_group_by_name(str(src_doc.get("group", "s3"))),
                               name=f"trivial-{src_doc.get('group', 's3')}")
    elif family == "product":
        b = product_brace(parse_brace(src_doc["left"]), parse_brace(src_doc["right"]))
    else:
        raise SchemaError("$.brace.family", f"unknown family {family!r}")

    seed = int(cfg.get("seed", 0))
    zs = select_shifts(b, cfg.get("z", "all"), seed=seed)
    report = build_report(
        b,
        zs,
        level=str(cfg.get("level", "all")),
        family=family,
        params={k: v for k, v in src_doc.items() if k != "family"} or None,
        budget=int(cfg["budget"]) if "budget" in cfg else None,
        sample_points=int(cfg.get("sample_points", 100_000)),
        seed=seed,
        timings=bool(cfg.get("timings", False)),
        threads=int(cfg["threads"]) if "threads" in cfg else None,
    )
    text = serialize_report(report)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"wrote report to {args.output}")
    else:
        print(text, end="")
    return 1 if report_failed(report) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zbrace",
        description="Construct finite skew braces and verify their deformed Yang-Baxter solutions exactly.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make", help="construct a built-in brace family and write it to a file")
    p.add_argument("--family", required=True,
                   choices=["cyclic2n", "oddmatrix", "radical", "trivial", "product"])
    p.add_argument("--n", type=int, default=3, help="modulus exponent for cyclic2n")
    p.add_argument("--modulus", type=int, default=8, help="ring modulus for radical")
    p.add_argument("--group", default="s3", help="group for trivial (sN or zN)")
    p.add_argument("--left", help="left factor brace file for product")
    p.add_argument("--right", help="right factor brace file for product")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_make)

    p = sub.add_parser("validate", help="parse and fully validate a brace file")
    p.add_argument("file")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("socle", help="print the socle of a brace")
    p.add_argument("file")
    p.set_defaults(fn=cmd_socle)

    p = sub.add_parser("solve", help="build deformed solutions for selected shifts")
    p.add_argument("file")
    p.add_argument("--z", default="all")
    p.add_argument("--dedup", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("verify", help="run verification suites and report pass/fail")
    p.add_argument("file")
    p.add_argument("--z", default="all")
    p.add_argument("--level", choices=["maps", "matrices", "all"], default="maps")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("twist", help="run selected matrix-level twist checks")
    p.add_argument("file")
    p.add_argument("--z", default="all")
    p.add_argument("--check", default=",".join(_TWIST_CHECKS))
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_twist)

    p = sub.add_parser("export", help="export an operator in coordinate text form")
    p.add_argument("file")
    p.add_argument("--z", required=True)
    p.add_argument("--object", required=True,
                   help="rcheck, r, P, F, Fhat, rF, rFhat, F123, Fhat123, or V:x, W:y, DeltaV:x, DeltaW:y")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("report", help="run a full verification report from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
