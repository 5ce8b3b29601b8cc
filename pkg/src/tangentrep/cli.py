"""Command-line front end.

Subcommands: represent, eval, lemma1, lemma2, legendre, domain-rep,
counterexample, verify.  Artifacts are JSON and CSV with round-trippable
float formatting, so identical configurations produce byte-identical files.
Exit codes: 0 success, 1 verification/computation failure, 2 configuration
error.  TANGENTREP_THREADS caps worker threads for batch grid evaluation.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import counterexample as cx
from . import domainrep as dr
from . import legendre as lg
from . import maxmin as mm
from . import verify as vf
from ._kernels import backend
from .fields import ScalarField, catalog, parse_field
from .geometry import ConvexDomain, sample_grid
from .segments import SegmentFunction, pivot_parameter

MAX_RESOLUTION_1D = 401
MAX_RESOLUTION_ND = 41


class ConfigError(ValueError):
    pass


def _parse_numbers(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}: {exc}") from None


def parse_domain_spec(spec: str) -> ConvexDomain:
    """Accept JSON ({"kind":"box",...}) or shorthand box:/ball: strings."""
    spec = spec.strip()
    if spec.startswith("{"):
        try:
            return ConvexDomain.from_json_dict(json.loads(spec))
        except (json.JSONDecodeError, ValueError) as exc:
            raise ConfigError(f"bad domain JSON: {exc}") from None
    kind, _, rest = spec.partition(":")
    values = _parse_numbers(rest)
    if kind == "box":
        if len(values) % 2 != 0 or not values:
            raise ConfigError("box shorthand needs lo,hi pairs per axis")
        lo = values[0::2]
        hi = values[1::2]
        return ConvexDomain.box(lo, hi)
    if kind == "ball":
        if len(values) < 2:
            raise ConfigError("ball shorthand needs center...,radius")
        return ConvexDomain.ball(values[:-1], values[-1])
    raise ConfigError(f"unknown domain spec {spec!r}")


def _field_from_args(args) -> ScalarField:
    if getattr(args, "field", None):
        try:
            return catalog(args.field)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
    if getattr(args, "expr", None):
        if not getattr(args, "dim", None):
            raise ConfigError("--expr requires --dim")
        try:
            return parse_field(args.expr, args.dim)
        except ValueError as exc:
            raise ConfigError(f"bad expression: {exc}") from None
    raise ConfigError("specify --field NAME or --expr TEXT --dim N")


def _domain_from_args(args, field: ScalarField) -> ConvexDomain:
    if getattr(args, "domain", None):
        dom = parse_domain_spec(args.domain)
    else:
        dom = field.domain
        if dom is None:
            raise ConfigError(
                f"field {field.name!r} has no default domain; pass --domain"
            )
    if dom.dim != field.dim:
        raise ConfigError(f"domain dimension {dom.dim} != field dimension {field.dim}")
    return dom


def _check_resolution_cap(resolution: int, dim: int) -> None:
    cap = MAX_RESOLUTION_1D if dim == 1 else MAX_RESOLUTION_ND
    if resolution > cap:
        raise ConfigError(
            f"resolution {resolution} exceeds the cap of {cap} per axis for "
            f"{dim}-D fields"
        )
    if resolution < 2:
        raise ConfigError("resolution must be at least 2")


def _write_grid_csv(path, X: np.ndarray, columns: dict) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"x{k + 1}" for k in range(X.shape[1])] + list(columns))
        for i, row in enumerate(X):
            writer.writerow([f"{v:.17g}" for v in row]
                            + [f"{vals[i]:.17g}" for vals in columns.values()])


# ---------------------------------------------------------------------------
# Subcommands


def _require(args, *names) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise ConfigError(f"--{name.replace('_', '-')} is required "
                              "(flag or config key)")


def cmd_represent(args) -> int:
    _require(args, "resolution")
    f = _field_from_args(args)
    dom = _domain_from_args(args, f)
    _check_resolution_cap(args.resolution, f.dim)
    rep = mm.build_representation(f, dom, args.resolution, tau=args.tau)
    eval_res = args.eval_resolution or 2 * args.resolution - 1
    X = sample_grid(dom, eval_res)
    err = np.abs(mm.rep_eval_many(rep, X) - f.value_many(X))
    if args.out_json:
        mm.rep_to_json(rep, args.out_json)
    if args.out_csv:
        mm.write_eval_csv(rep, f, X, args.out_csv)
    print(f"sites: {rep.n_sites}  planes: {rep.n_sites}  "
          f"families: {len(rep.families)}")
    print(f"eval grid: {X.shape[0]} points  max abs_err: {err.max():.17g}")
    return 0


def cmd_eval(args) -> int:
    _require(args, "rep")
    try:
        with open(args.rep) as handle:
            rep = mm.rep_from_json_dict(json.load(handle))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConfigError(f"cannot load representation: {exc}") from None
    if args.at:
        x = np.array(_parse_numbers(args.at))
        print(f"{mm.rep_eval(rep, x):.17g}")
        return 0
    if rep.domain is None:
        raise ConfigError("representation has no domain; use --at X,Y")
    X = sample_grid(rep.domain, args.grid)
    values = mm.rep_eval_many(rep, X)
    if args.out_csv:
        _write_grid_csv(args.out_csv, X, {"rep": values})
    print(f"evaluated {X.shape[0]} grid points; "
          f"range [{values.min():.17g}, {values.max():.17g}]")
    return 0


def cmd_lemma1(args) -> int:
    _require(args, "h")
    try:
        h_field = parse_field(args.h, 1)
    except ValueError as exc:
        raise ConfigError(f"bad segment function: {exc}") from None
    h = SegmentFunction.from_field_segment(h_field, [0.0], [1.0])
    lam, trace = pivot_parameter(h, tol=args.tol)
    if args.trace_csv:
        trace.write_csv(args.trace_csv)
    print(f"pivot parameter: {lam:.17g}  branch: {trace.branch}")
    print(f"chord slope: {trace.chord_slope:.17g}  "
          f"residuals: left {trace.residual_left:.3e} (<= 1e-8), "
          f"right {trace.residual_right:.3e} (>= -1e-8)")
    return 0


def cmd_lemma2(args) -> int:
    _require(args, "a", "b")
    f = _field_from_args(args)
    a = np.array(_parse_numbers(args.a))
    b = np.array(_parse_numbers(args.b))
    h = SegmentFunction.from_field_segment(f, a, b)
    lam, trace = pivot_parameter(h)
    c = (1.0 - lam) * a + lam * b
    if args.trace_csv:
        trace.write_csv(args.trace_csv)
    from .tangent import plane_eval, tangent_plane

    g = tangent_plane(f, c)
    print(f"pivot site: {', '.join(f'{v:.17g}' for v in c)}  (parameter {lam:.17g})")
    print(f"plane at a: {plane_eval(g, a):.17g}  f(a): {f.value(a):.17g}")
    print(f"plane at b: {plane_eval(g, b):.17g}  f(b): {f.value(b):.17g}")
    return 0


def cmd_legendre(args) -> int:
    f = _field_from_args(args)
    dom = _domain_from_args(args, f)
    sites = sample_grid(dom, args.sites)
    samples, diag = lg.legendre_points(f, sites)
    if args.out_csv:
        lg.write_samples_csv(samples, args.out_csv)
    if args.dual_csv:
        lg.write_dual_points_csv(samples, args.dual_csv)
    X = sample_grid(dom, args.conjugate_resolution)
    recovered = lg.conjugate_eval_many(samples, X)
    gap = f.value_many(X) - recovered
    if args.conjugate_csv:
        _write_grid_csv(args.conjugate_csv, X,
                        {"f": f.value_many(X), "conjugate": recovered, "gap": gap})
    print(f"samples: {len(samples)}  slope map injective: {diag.injective}  "
          f"min slope gap: {diag.min_slope_gap:.3e}")
    print(f"conjugate recovery over {X.shape[0]} points: "
          f"max gap {gap.max():.17g}  min gap {gap.min():.17g}")
    return 0


def cmd_domain_rep(args) -> int:
    if args.shape == "disk":
        dom = dr.ImplicitDomain2D.unit_disk()
    elif args.shape == "peanut":
        dom = dr.ImplicitDomain2D.peanut()
    elif args.phi:
        if not args.bbox:
            raise ConfigError("--phi requires --bbox lo1,hi1,lo2,hi2")
        values = _parse_numbers(args.bbox)
        if len(values) != 4:
            raise ConfigError("--bbox needs exactly lo1,hi1,lo2,hi2")
        try:
            phi = parse_field(args.phi, 2)
        except ValueError as exc:
            raise ConfigError(f"bad level-set expression: {exc}") from None
        dom = dr.ImplicitDomain2D.from_field(phi, values[0::2], values[1::2])
    else:
        raise ConfigError("specify --shape disk|peanut or --phi EXPR --bbox ...")
    rep = dr.build_domain_rep(dom, args.base_resolution, args.rays)
    stats = dr.agreement_stats(rep, dom, resolution=args.grid, band=args.band)
    if args.out_json:
        dr.rep_to_json(rep, args.out_json)
    if args.out_csv:
        dr.write_membership_csv(rep, dom, args.grid, args.out_csv)
    print(f"bases: {rep.base_points.shape[0]}  half-planes: {rep.n_halfspaces}  "
          f"rays: {args.rays}")
    print(f"agreement outside the {stats.band_width} band: "
          f"{stats.agreement_rate:.6f} over {stats.n_outside_band} points "
          f"(false+ {stats.false_positives}, false- {stats.false_negatives})")
    return 0


def cmd_counterexample(args) -> int:
    a = np.array(_parse_numbers(args.a))
    report = cx.obstruction_certificate(a, site_resolution=args.site_resolution)
    demo = cx.failed_representation_demo(args.resolution)
    if args.out_json:
        cx.write_reports_json(report, demo, args.out_json)
    if args.out_csv:
        cx.write_plane_pair_csv(a, args.site_resolution, args.out_csv)
    for note in report.notes:
        print(f"note: {note}")
    print(f"a = {report.a.tolist()}  b = {report.b.tolist()} "
          f"(mirror point in domain: {report.b_in_mirror_triangle})")
    print(f"f(a) = {report.f_a:.17g}  f(b) = {report.f_b:.17g}")
    print(f"max |g_t(a) - g_t(b)| over {report.n_sites} sites: "
          f"{report.max_plane_gap:.3e}")
    print(f"conclusion: {report.conclusion}")
    print(f"representation built anyway (resolution {demo.resolution}): "
          f"rep(a) = {demo.rep_a:.17g}, rep(b) = {demo.rep_b:.17g}, "
          f"|rep(a)-rep(b)| = {demo.rep_gap:.3e}")
    print(f"worst error at the pair: {demo.worst_error_at_pair:.17g} "
          f"(convex control: {demo.convex_control_max_err:.3e}, "
          f"affine control: {demo.affine_control_max_err:.3e})")
    return 0


def cmd_verify(args) -> int:
    results = vf.run_all()
    failures = 0
    for r in results:
        print(("PASS" if r.passed else "FAIL") + f"  {r.name}: {r.detail}")
        failures += 0 if r.passed else 1
    print(f"{len(results) - failures}/{len(results)} checks passed "
          f"(kernel backend: {backend()})")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# Argument plumbing


def _add_field_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--field", help="catalog field name")
    p.add_argument("--expr", help="expression over x1..xn")
    p.add_argument("--dim", type=int, help="number of variables for --expr")
    p.add_argument("--domain", help='domain spec (JSON or "box:lo,hi,...")')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tangentrep",
        description="max-min tangent-plane representations and half-plane "
                    "Boolean domain formulas",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    dests: dict[str, set] = {}
    parser.subcommand_dests = dests

    def add_parser(name, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--config", help="JSON file with defaults for this subcommand")
        dests[name] = p
        return p

    p = add_parser("represent", help="build and export a max-min representation")
    _add_field_args(p)
    p.add_argument("--resolution", type=int)
    p.add_argument("--eval-resolution", type=int, default=None)
    p.add_argument("--tau", type=float, default=mm.DEFAULT_TAU)
    p.add_argument("--out-json")
    p.add_argument("--out-csv")
    p.set_defaults(run=cmd_represent)

    p = add_parser("eval", help="evaluate a stored representation on a grid")
    p.add_argument("--rep", help="representation JSON path")
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--at", help="single point x1,x2,...")
    p.add_argument("--out-csv")
    p.set_defaults(run=cmd_eval)

    p = add_parser("lemma1", help="pivot parameter of a function on [0,1]")
    p.add_argument("--h", help="expression in x1, evaluated on [0,1]")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--trace-csv")
    p.set_defaults(run=cmd_lemma1)

    p = add_parser("lemma2", help="pivot site on a segment of a field domain")
    _add_field_args(p)
    p.add_argument("--a", help="segment start x1,x2,...")
    p.add_argument("--b", help="segment end x1,x2,...")
    p.add_argument("--trace-csv")
    p.set_defaults(run=cmd_lemma2)

    p = add_parser("legendre", help="sampled dual pairs and conjugate recovery")
    _add_field_args(p)
    p.add_argument("--sites", type=int, default=101)
    p.add_argument("--conjugate-resolution", type=int, default=201)
    p.add_argument("--out-csv", help="CSV of t..., p..., H")
    p.add_argument("--dual-csv", help="CSV of the dual-space points p..., H")
    p.add_argument("--conjugate-csv", help="CSV of x..., f, conjugate, gap")
    p.set_defaults(run=cmd_legendre)

    p = add_parser("domain-rep", help="half-plane Boolean representation of a region")
    p.add_argument("--shape", choices=["disk", "peanut"])
    p.add_argument("--phi", help="level-set expression in x1, x2")
    p.add_argument("--bbox", help="bounding box lo1,hi1,lo2,hi2 for --phi")
    p.add_argument("--base-resolution", type=int, default=21)
    p.add_argument("--rays", type=int, default=64)
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--band", type=float, default=0.05)
    p.add_argument("--out-json")
    p.add_argument("--out-csv")
    p.set_defaults(run=cmd_domain_rep)

    p = add_parser("counterexample", help="non-convex failure certificate and demo")
    p.add_argument("--a", default="0.7,0.3")
    p.add_argument("--resolution", type=int, default=21)
    p.add_argument("--site-resolution", type=int, default=41)
    p.add_argument("--out-json")
    p.add_argument("--out-csv")
    p.set_defaults(run=cmd_counterexample)

    p = add_parser("verify", help="run the full invariant suite")
    p.set_defaults(run=cmd_verify)

    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    """Parse argv, letting a --config JSON file supply unspecified values.

    Config keys are preloaded onto the namespace, so explicit flags win and
    argparse defaults fill whatever remains.
    """
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    namespace = argparse.Namespace()
    if known.config:
        try:
            with open(known.config) as handle:
                overrides = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        if not isinstance(overrides, dict):
            raise ConfigError("config must be a JSON object")
        command = argv[0] if argv and not argv[0].startswith("-") else None
        sub = parser.subcommand_dests.get(command)
        allowed = {a.dest for a in sub._actions} if sub is not None else None
        for key, value in overrides.items():
            attr = key.replace("-", "_")
            if attr == "command":
                if command is not None and value != command:
                    raise ConfigError(
                        f"config is for command {value!r}, not {command!r}"
                    )
                continue
            if allowed is not None and attr not in allowed:
                raise ConfigError(f"config key {key!r} unknown for {command!r}")
            setattr(namespace, attr, value)
    args = parser.parse_args(argv, namespace=namespace)
    if getattr(args, "run", None) is None:
        raise ConfigError("no subcommand given")
    return args


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.run(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
