"""Command-line front door.

Subcommands: gen, apply, estimate, partition, stab, certify, audit,
sweep, fit, check.  Exit codes: 0 success, 2 precondition violation,
3 soundness-audit failure.  Every output file embeds the tool version
and the SHA-256 digests of its inputs; outputs are byte-deterministic
for fixed inputs and seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

from . import __version__
from . import certify as certmod
from . import checks
from . import directions as dirs
from . import probes as probemod
from . import sweep as sweepmod
from .cells import CellCover, curve_cover, grid_cover_for_product, interval_cover_1d
from .fields import SampledField
from .hamsandwich import partition_points_2d
from .spectral import apply_maximal
from .stabbing import stab_sup


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _provenance(inputs: dict) -> dict:
    return {
        "tool_version": __version__,
        "inputs": {name: _digest(path) for name, path in inputs.items()},
    }


def _write_json(path, payload: dict):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _parse_ints(text: str) -> tuple:
    return tuple(int(x) for x in text.split(","))


def _parse_floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(","))


# ------------------------------------------------------------------ commands

def cmd_gen(args) -> int:
    if args.family == "uniform":
        omega = dirs.uniform(args.m)
    elif args.family == "product":
        omega = dirs.product([dirs.uniform(m) for m in _parse_ints(args.ms)])
    elif args.family == "lacunary":
        omega = dirs.lacunary_uniform(args.r, args.m)
    elif args.family == "boustrophedon":
        omega, _ = dirs.boustrophedon_curve_samples(args.m)
    elif args.family == "prescribed":
        omega = dirs.prescribed_growth_product(args.n, args.alpha, args.beta,
                                               args.target_n)
    else:
        raise ValueError(f"unknown family {args.family!r}")
    payload = omega.to_json_dict()
    payload.update(_provenance({}))
    _write_json(args.output, payload)
    print(f"wrote {args.output}: {omega.label} with {len(omega)} points")
    return 0


def cmd_apply(args) -> int:
    f = SampledField.load(args.field)
    omega = dirs.DirectionSet.load(args.dirs)
    out = apply_maximal(f, omega)
    out.save(args.output, extra_header=_provenance({"field": args.field,
                                                    "dirs": args.dirs}))
    print(f"wrote {args.output}: max |H_v f| over {len(omega)} directions")
    return 0


def cmd_estimate(args) -> int:
    omega = dirs.DirectionSet.load(args.dirs)
    shape = _parse_ints(args.shape) if args.shape else None
    box = _parse_floats(args.box) if args.box else None
    plan_family = "uniform" if omega.dim == 1 else "uniform2d"
    if shape is None:
        shape = sweepmod._default_shape(plan_family)
    if box is None:
        box = sweepmod._default_box(plan_family)
    if len(shape) != omega.dim + 1 or len(box) != omega.dim + 1:
        raise ValueError("grid must have dim+1 axes")
    probes = []
    if args.suite in ("sharpness", "sharpness+random"):
        spec = probemod.SharpnessSpec(omega.dim, (2,) * omega.dim)
        try:
            f = probemod.build_sharpness_field(spec, shape, box)
            probes.append(probemod.Probe("sharpness", f, None))
        except ValueError:
            pass
    if args.suite in ("random", "sharpness+random"):
        probes.extend(probemod.random_probes(shape, box, args.count, args.seed))
    report = probemod.estimate_lower_bound(omega, probes)
    report.save(args.output, extra=_provenance({"dirs": args.dirs}))
    print(f"wrote {args.output}: max rayleigh {report.max_rayleigh:.6f}")
    return 0


def cmd_partition(args) -> int:
    omega = dirs.DirectionSet.load(args.dirs)
    if args.strategy == "grid":
        sizes = _parse_ints(args.group_sizes) if args.group_sizes else (2,) * omega.dim
        cover = grid_cover_for_product(omega, sizes)
    elif args.strategy == "curve":
        cover = curve_cover(omega, args.pair_size)
    elif args.strategy == "hamsandwich":
        cover, degree = partition_points_2d(omega, args.rounds)
        print(f"degree {degree}, {len(cover.cells)} cells")
    elif args.strategy == "intervals":
        cover = interval_cover_1d(omega, args.pair_size)
    else:
        raise ValueError(f"unknown partition strategy {args.strategy!r}")
    cover.save(args.output, extra=_provenance({"dirs": args.dirs}))
    print(f"wrote {args.output}: {len(cover.cells)} cells")
    return 0


def cmd_stab(args) -> int:
    cover = CellCover.load(args.cover)
    res = stab_sup(cover, exact=True if args.exact else None,
                   samples=args.samples, seed=args.seed)
    payload = {
        "value": res.value,
        "mode": res.mode,
        "witness": [str(c) for c in res.witness.u],
    }
    payload.update(_provenance({"cover": args.cover}))
    if args.output:
        _write_json(args.output, payload)
    print(json.dumps(payload, indent=1, sort_keys=True))
    return 0


def cmd_certify(args) -> int:
    omega = dirs.DirectionSet.load(args.dirs)
    cert = certmod.certify(omega, args.strategy)
    cert.save(args.output, extra=_provenance({"dirs": args.dirs}))
    print(f"wrote {args.output}: {cert.rule} value {cert.value}")
    return 0


def cmd_audit(args) -> int:
    cert = certmod.BoundCertificate.load(args.cert)
    report = probemod.ProbeReport.load(args.report)
    try:
        ok = certmod.soundness_audit(cert, report)
    except certmod.AuditError as exc:
        print(f"audit error: {exc}", file=sys.stderr)
        return 3
    verdict = {
        "sound": ok,
        "certified_upper": cert.value,
        "measured_rayleigh": report.max_rayleigh,
    }
    print(json.dumps(verdict, indent=1, sort_keys=True))
    return 0 if ok else 3


def _parse_grid(family: str, text: str) -> list:
    """'N=4,8,16' or 'R=2,3;M=2,4' -> list of parameter dicts (zip-style
    for multi-key grids of equal length, product otherwise)."""
    groups = {}
    for part in text.split(";"):
        key, _, vals = part.partition("=")
        if not vals:
            raise ValueError(f"bad grid spec {text!r}")
        groups[key.strip()] = [int(v) for v in vals.split(",")]
    keys = list(groups)
    if len(keys) == 1:
        return [{keys[0]: v} for v in groups[keys[0]]]
    lengths = {len(v) for v in groups.values()}
    if len(lengths) == 1:
        return [dict(zip(keys, combo)) for combo in zip(*groups.values())]
    from itertools import product as iproduct

    return [dict(zip(keys, combo)) for combo in iproduct(*groups.values())]


def cmd_sweep(args) -> int:
    plan = sweepmod.SweepPlan(
        family=args.family,
        grid=_parse_grid(args.family, args.grid),
        suite=args.suite,
        strategy=args.strategy or "",
        seed=args.seed,
        shape=_parse_ints(args.shape) if args.shape else None,
        box=_parse_floats(args.box) if args.box else None,
        probe_count=args.count,
    )
    rows = sweepmod.run_sweep(plan)
    preamble = [
        f"mdht {__version__}",
        f"family={plan.family} suite={plan.suite} strategy={plan.strategy} "
        f"seed={plan.seed}",
    ]
    data = sweepmod.rows_to_csv(rows, preamble)
    with open(args.output, "wb") as fh:
        fh.write(data)
    print(f"wrote {args.output}: {len(rows)} rows")
    return 0


def cmd_fit(args) -> int:
    with open(args.csv, "rb") as fh:
        rows = sweepmod.csv_to_rows(fh.read())
    record = sweepmod.fit_growth(rows, args.model)
    payload = record.to_json_dict()
    payload.update(_provenance({"csv": args.csv}))
    if args.output:
        _write_json(args.output, payload)
    print(json.dumps(payload, indent=1, sort_keys=True))
    return 0


def cmd_check(args) -> int:
    summary = checks.check_all()
    if args.output:
        _write_json(args.output, summary)
    for item in summary["checks"]:
        mark = "PASS" if item["pass"] else "FAIL"
        print(f"[{mark}] {item['name']}: {item['detail']} ({item['seconds']}s)")
    print("all checks passed" if summary["all_pass"] else "FAILURES present")
    return 0


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mdht", description=__doc__)
    p.add_argument("--version", action="version", version=f"mdht {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a direction-set file")
    g.add_argument("family", choices=["uniform", "product", "lacunary",
                                      "boustrophedon", "prescribed"])
    g.add_argument("--m", type=int, default=4)
    g.add_argument("--r", type=int, default=2)
    g.add_argument("--ms", type=str, default="4,4", help="product factor sizes")
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--alpha", type=float, default=0.2)
    g.add_argument("--beta", type=float, default=0.0)
    g.add_argument("--target-n", type=int, default=4096)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("apply", help="apply the maximal transform to a field")
    a.add_argument("--field", required=True)
    a.add_argument("--dirs", required=True)
    a.add_argument("-o", "--output", required=True)
    a.set_defaults(func=cmd_apply)

    e = sub.add_parser("estimate", help="probe operator-norm lower bounds")
    e.add_argument("--dirs", required=True)
    e.add_argument("--suite", default="sharpness+random",
                   choices=["sharpness", "random", "sharpness+random"])
    e.add_argument("--shape", type=str, default="")
    e.add_argument("--box", type=str, default="")
    e.add_argument("--seed", type=int, default=7)
    e.add_argument("--count", type=int, default=4)
    e.add_argument("-o", "--output", required=True)
    e.set_defaults(func=cmd_estimate)

    t = sub.add_parser("partition", help="build a cell cover")
    t.add_argument("--dirs", required=True)
    t.add_argument("--strategy", required=True,
                   choices=["grid", "curve", "hamsandwich", "intervals"])
    t.add_argument("--rounds", type=int, default=2)
    t.add_argument("--pair-size", type=int, default=2)
    t.add_argument("--group-sizes", type=str, default="")
    t.add_argument("-o", "--output", required=True)
    t.set_defaults(func=cmd_partition)

    s = sub.add_parser("stab", help="stabbing supremum of a cover")
    s.add_argument("--cover", required=True)
    s.add_argument("--exact", action="store_true")
    s.add_argument("--samples", type=int, default=20000)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("-o", "--output", default="")
    s.set_defaults(func=cmd_stab)

    c = sub.add_parser("certify", help="build an upper-bound certificate")
    c.add_argument("--dirs", required=True)
    c.add_argument("--strategy", required=True)
    c.add_argument("-o", "--output", required=True)
    c.set_defaults(func=cmd_certify)

    u = sub.add_parser("audit", help="audit a certificate against a report")
    u.add_argument("--cert", required=True)
    u.add_argument("--report", required=True)
    u.set_defaults(func=cmd_audit)

    w = sub.add_parser("sweep", help="run a parameter sweep to CSV")
    w.add_argument("--family", required=True, choices=list(sweepmod.FAMILIES))
    w.add_argument("--grid", required=True, help="e.g. N=4,8,16,32")
    w.add_argument("--suite", default="sharpness+random",
                   choices=["sharpness", "random", "sharpness+random"])
    w.add_argument("--strategy", default="")
    w.add_argument("--seed", type=int, default=7)
    w.add_argument("--shape", type=str, default="")
    w.add_argument("--box", type=str, default="")
    w.add_argument("--count", type=int, default=4)
    w.add_argument("-o", "--output", required=True)
    w.set_defaults(func=cmd_sweep)

    f = sub.add_parser("fit", help="fit a growth model to sweep output")
    f.add_argument("--csv", required=True)
    f.add_argument("--model", required=True, choices=list(sweepmod.MODELS))
    f.add_argument("-o", "--output", default="")
    f.set_defaults(func=cmd_fit)

    k = sub.add_parser("check", help="run the cross-module invariant suite")
    k.add_argument("-o", "--output", default="")
    k.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
