"""Command-line front end: ``crownlab verify|crown|gamma|phi``.

Exit codes: 0 all checks pass, 1 a check genuinely failed, 2 indeterminate
(a cap or budget was hit), 3 usage, input or hypothesis errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from .caps import CapExceeded, HypothesisError, get_caps, set_caps
from .census import CENSUS_DEGREE_CAP, census, parse_group_block
from .crown import (
    CAutBound,
    CrownSpec,
    abelian_bound,
    crown_power,
    crown_threshold,
    hall_power_generators,
    p_ln_exact,
    p_ln_montecarlo,
)
from .gamma import (
    _BUILTIN,
    UnknownGroupError,
    audit_inequality_chain,
    catalog,
    entry,
    gamma_for,
    out_bound_check,
    verify_gamma,
)
from .group import PermGroup
from .lattice import enumerate_subgroups, eulerian_phi, minimal_normal_subgroups
from .mintrans import d_min

SCHEMA = 1
EXIT_PASS, EXIT_FAIL, EXIT_INDETERMINATE, EXIT_USAGE = 0, 1, 2, 3


class UsageError(ValueError):
    """Bad command-line arguments or unreadable input."""


def _frac(x) -> str | None:
    if x is None:
        return None
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _read_group(path: str) -> tuple[dict, PermGroup]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_group_block(text.splitlines())


# -- verify ---------------------------------------------------------------------

def cmd_verify(args) -> tuple[dict, int]:
    if args.catalog:
        if not Path(args.catalog).exists():
            raise UsageError(f"cannot read {args.catalog}")
        records = census(catalog=args.catalog, seed=args.seed)
        source = {"catalog": args.catalog}
    elif args.degree is not None:
        if args.degree < 1 or args.degree > CENSUS_DEGREE_CAP:
            raise UsageError(f"built-in census covers degrees 1..{CENSUS_DEGREE_CAP}; use --catalog")
        records = census(n=args.degree, seed=args.seed)
        source = {"degree": args.degree}
    else:
        raise UsageError("verify needs --degree or --catalog")
    rows = [r.to_dict() for r in records]
    statuses = [r.status for r in records]
    for r in records:
        if r.status == "not-applicable":
            print(f"warning: {r.name or 'group'}: {'; '.join(r.notes)}", file=sys.stderr)
    if "fail" in statuses:
        code = EXIT_FAIL
    elif "indeterminate" in statuses:
        code = EXIT_INDETERMINATE
    else:
        code = EXIT_PASS
    report = {"command": "verify", **source, "records": rows,
              "summary": {s: statuses.count(s) for s in sorted(set(statuses))}}
    return report, code


# -- crown ------------------------------------------------------------------------

def _out_order(meta: dict, s_order: int) -> tuple[int | None, str]:
    if "out" in meta:
        return int(meta["out"]), "metadata"
    hits = [row for row in _BUILTIN if row[2] == s_order]
    if len(hits) == 1:
        return hits[0][3], f"catalog ({hits[0][0]})"
    return None, "unknown"


def cmd_crown(args) -> tuple[dict, int]:
    if not args.L:
        raise UsageError("crown needs --L")
    meta, L = _read_group(args.L)
    if args.N:
        N = _read_group(args.N)[1]
    else:
        mins = minimal_normal_subgroups(L)
        if len(mins) != 1:
            raise HypothesisError(f"L has {len(mins)} minimal normal subgroups; "
                                  "a unique minimal normal subgroup is required")
        N = mins[0]
    k = args.k
    spec = CrownSpec(L, N, k)
    spec.validate()
    d = args.d if args.d is not None else d_min(L, seed=args.seed).d
    record: dict = {"L": args.L, "N_order": N.order(), "k": k, "d": d,
                    "N_abelian": spec.abelian, "notes": []}
    ok = True

    if args.hall:
        if L.order() != N.order():
            raise HypothesisError("--hall needs L simple (L = N)")
        out, how = _out_order(meta, L.order())
        if out is None:
            raise HypothesisError("|Out(S)| unknown; add '# out: <k>' to the group file")
        hp = hall_power_generators(L, k, L.order() * out)
        order_ok = hp.group.order() == L.order() ** k
        record.update(order=str(hp.group.order()), expected_order=str(L.order() ** k),
                      degree=hp.group.degree, threshold=hp.threshold,
                      threshold_is_lower_bound=False, d_measured_at_most=2,
                      generators=[str(g) for g in hp.generators])
        record["notes"].append(f"|Out| from {how}")
        ok = order_ok
        record["pass"] = ok
        return {"command": "crown", "records": [record]}, EXIT_PASS if ok else EXIT_FAIL

    Lk = crown_power(spec)
    expected = N.order() ** (k - 1) * L.order()
    record.update(order=str(Lk.order()), expected_order=str(expected), degree=Lk.degree)
    ok &= Lk.order() == expected
    code = EXIT_PASS
    if spec.abelian:
        bound = abelian_bound(spec, d_min(L, seed=args.seed).d)
        record["abelian_bound"] = bound
        cert = d_min(Lk, seed=args.seed)
        record["d_measured"] = cert.d
        record["d_exhaustive"] = cert.exhaustive
        ok &= cert.d <= bound
    else:
        try:
            est = p_ln_exact(L, N, d)
            record["P_exact"] = _frac(est.value)
            prob = est.value
        except CapExceeded as exc:
            record["notes"].append(f"exact probability unavailable: {exc}")
            prob = None
        if args.trials:
            mc = p_ln_montecarlo(L, N, d, args.trials, args.seed)
            record["P_mc"] = {"value": mc.value, "stderr": mc.stderr, "trials": mc.trials,
                              "accepted": mc.accepted, "seed": mc.seed}
        factors = minimal_normal_subgroups(N)
        t, s_order = len(factors), factors[0].order()
        out, how = _out_order(meta if t == 1 and L.order() == N.order() else {}, s_order)
        if out is None:
            record["notes"].append("|Out(S)| unknown; threshold not computed")
            code = EXIT_INDETERMINATE
        elif prob is not None:
            exact = t == 1 and L.order() == N.order()
            caut = CAutBound.simple(s_order, out) if exact else CAutBound(t, s_order, out)
            record["threshold"] = crown_threshold(L, N, d, caut, prob)
            record["threshold_is_lower_bound"] = not caut.is_exact
            record["notes"].append(f"|Out| from {how}")
            if caut.is_exact and Lk.order() <= get_caps().element:
                # the threshold is sharp: d(L_k) <= d exactly when k is within it
                measured = d_min(Lk, seed=args.seed)
                record["d_measured"] = measured.d
                ok &= (measured.d <= d) == (k <= record["threshold"])
        else:
            code = EXIT_INDETERMINATE
    record["pass"] = bool(ok)
    if not ok:
        code = EXIT_FAIL
    return {"command": "crown", "records": [record]}, code


# -- gamma and phi -----------------------------------------------------------------

def cmd_gamma(args) -> tuple[dict, int]:
    if args.catalog:
        entries = catalog(path=args.catalog)
    elif args.name:
        entries = [entry(args.name, large=args.large)]
    else:
        entries = catalog(large=args.large)
    records, codes = [], []
    for S in entries:
        rec: dict = {"name": S.name, "order": S.order, "out": S.out_order, "f": _frac(S.f)}
        ob = out_bound_check(S)
        rec["out_bound"] = ob.passed
        try:
            g = gamma_for(S)
            rec["gamma_source"] = g.source
            v = verify_gamma(S, g)
            rec.update(v.to_dict())
            rec["pass"] = v.passed and ob.passed
            codes.append(EXIT_PASS if rec["pass"] else EXIT_FAIL)
        except CapExceeded as exc:
            rec.update(status="indeterminate", reason=str(exc), gamma=gamma_for(S).sorted())
            codes.append(EXIT_INDETERMINATE)
        except UnknownGroupError:
            rec.update(status="indeterminate", reason="no prime-set rule for this group")
            codes.append(EXIT_INDETERMINATE)
        if args.n is not None:
            audit = audit_inequality_chain(S, args.t, args.n, args.k)
            rec["audit"] = audit.to_dict()
            if not audit.all_hold:
                codes.append(EXIT_FAIL)
        records.append(rec)
    code = EXIT_FAIL if EXIT_FAIL in codes else max(codes, default=EXIT_PASS)
    return {"command": "gamma", "records": records}, code


def cmd_phi(args) -> tuple[dict, int]:
    if not args.group:
        raise UsageError("phi needs --group")
    if args.d is None:
        raise UsageError("phi needs --d")
    _, G = _read_group(args.group)
    lattice = enumerate_subgroups(G)
    rec = {"group": args.group, "order": G.order(), "d": args.d,
           "subgroups": len(lattice), "phi": str(eulerian_phi(lattice, args.d))}
    if args.mod:
        N = G if args.mod == "self" else _read_group(args.mod)[1]
        rec["P"] = _frac(p_ln_exact(G, N, args.d).value)
    return {"command": "phi", "records": [rec]}, EXIT_PASS


COMMANDS = {"verify": cmd_verify, "crown": cmd_crown, "gamma": cmd_gamma, "phi": cmd_phi}


# -- output -------------------------------------------------------------------------

def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    records = report.get("records", [])
    if fmt == "csv":
        keys = sorted({k for r in records for k, v in r.items() if not isinstance(v, (dict, list))})
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for r in records:
            writer.writerow(r)
        return buf.getvalue()
    lines = []
    for r in records:
        parts = []
        for k in sorted(r):
            v = r[k]
            if isinstance(v, (dict, list)) and k not in ("gamma", "class_indices"):
                continue
            parts.append(f"{k}={v}")
        lines.append(" ".join(parts))
    if "error" in report:
        lines.append(f"error: {report['error']}")
    lines.append(f"exit={report['exit_code']}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "text"], default="text")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=100_000)
    common.add_argument("--caps", help="cap overrides, e.g. lattice=20000,element=500000")
    common.add_argument("--large", action="store_true", help="allow the large catalog groups")
    parser = argparse.ArgumentParser(prog="crownlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check d(G) <= mu(n)+1 for minimally transitive groups")
    p.add_argument("--degree", type=int)
    p.add_argument("--catalog")

    p = sub.add_parser("crown", parents=[common], help="build a crown-based power and its thresholds")
    p.add_argument("--L")
    p.add_argument("--N")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--d", type=int)
    p.add_argument("--hall", action="store_true", help="build the extremal pair for L = N simple")

    p = sub.add_parser("gamma", parents=[common], help="verify prime sets of small simple groups")
    p.add_argument("--name")
    p.add_argument("--catalog")
    p.add_argument("--n", type=int, help="audit the inequality chain at this degree")
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--k", type=int, default=1)

    p = sub.add_parser("phi", parents=[common], help="Eulerian counts of a group")
    p.add_argument("--group")
    p.add_argument("--d", type=int)
    p.add_argument("--mod", help="'self' or a group file for a normal subgroup")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    old = None
    try:
        if args.caps:
            old = set_caps(get_caps().with_overrides(args.caps))
        report, code = COMMANDS[args.command](args)
    except (UsageError, HypothesisError, UnknownGroupError, ValueError, OSError) as exc:
        report, code = {"command": args.command, "error": str(exc)}, EXIT_USAGE
    except CapExceeded as exc:
        report, code = {"command": args.command, "error": str(exc)}, EXIT_INDETERMINATE
    finally:
        if old is not None:
            set_caps(old)
    report = {"schema": SCHEMA, **report, "exit_code": code}
    text = render(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if "error" in report:
        print(f"error: {report['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
