"""Command-line surface.

Subcommands: cohomology, lemmata, deform, extend, positivity, scenario,
catalog.  Every command builds a JSON-serializable report first; the
human-readable tables are a rendering of that JSON, never a separate
code path.  Exit codes: 0 all good (and all golden checks pass), 2
computation fine but a golden expectation mismatched, 1 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import io as nio
from .algebra import FormAlgebra, build_complex
from .catalog import SCENARIOS, catalog_load, catalog_names, run_scenario
from .cohomology import (
    EvaluatedComplex,
    full_report,
    generic_points,
    zero_point,
)
from .deformation import deform_complex, evaluate_se
from .errors import NilformsError
from .extension import bc_nontriviality, pkahler_extend, small_points, solve_extension
from .lemmata import lemma_report
from .positivity import is_strictly_positive, is_transverse, pkahler_check
from .scalars import GaussianRational, parse_gaussian


def _parse_point(text: str, m: int):
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != m:
        raise NilformsError(f"expected {m} parameter values, got {len(parts)}")
    return tuple(parse_gaussian(p) for p in parts)


def _load_manifold(ref: str, order: int):
    """catalog:NAME or a path to a structure-equation JSON file."""
    if ref.startswith("catalog:"):
        return catalog_load(ref.split(":", 1)[1], order=order)
    path = Path(ref)
    if not path.exists():
        raise NilformsError(f"no such manifold file or catalog entry: {ref}")
    se = nio.se_parse(path.read_text())
    from .catalog import CatalogEntry

    return CatalogEntry(name=se.name, se=se)


def _load_beltrami(ref: str, entry):
    if ref == "catalog":
        if entry.beltrami is None:
            raise NilformsError(f"catalog entry {entry.name!r} has no Beltrami family")
        return entry.beltrami
    path = Path(ref)
    if not path.exists():
        raise NilformsError(f"no such Beltrami file: {ref}")
    return nio.beltrami_parse(path.read_text(), entry.se.algebra)


def _load_form(ref: str, entry, algebra: Optional[FormAlgebra] = None):
    if ref.startswith("catalog:"):
        name = ref.split(":", 1)[1]
        if name not in entry.forms:
            raise NilformsError(
                f"entry {entry.name!r} has no distinguished form {name!r}; "
                f"available: {sorted(entry.forms)}"
            )
        return entry.forms[name]
    path = Path(ref)
    if not path.exists():
        raise NilformsError(f"no such form file: {ref}")
    return nio.form_parse(path.read_text(), algebra or entry.se.algebra)


def _evaluated(entry, t_text: Optional[str]):
    se = entry.se
    m = se.algebra.ring.m
    if m == 0:
        return EvaluatedComplex(build_complex(se), ()), ()
    point = _parse_point(t_text, m) if t_text else zero_point(m)
    if entry.beltrami is not None and any(bool(z) for z in point):
        se_t = deform_complex(se, entry.beltrami, point=point)
        return EvaluatedComplex(build_complex(se_t), ()), point
    se0 = evaluate_se(se, point)
    return EvaluatedComplex(build_complex(se0), ()), point


def _emit(obj: dict, as_json: bool, render) -> None:
    if as_json:
        print(json.dumps(obj, indent=2))
    else:
        render(obj)


# -- renderers ---------------------------------------------------------------


def _render_cohomology(obj: dict) -> None:
    n = obj["n"]
    print(f"invariant cohomology at t = ({', '.join(obj['t'])})" if obj["t"] else "invariant cohomology")
    for label, key in (("h_BC", "h_bc"), ("h_A", "h_a"), ("h_dolbeault", "h_dolbeault")):
        print(f"{label}(p,q), rows p = 0..{n}:")
        for p in range(n + 1):
            print("   " + " ".join(f"{obj[key][p][q]:3d}" for q in range(n + 1)))
    print("betti:", " ".join(str(b) for b in obj["betti"]))


def _render_lemmata(obj: dict) -> None:
    print(f"lemma flags at t = ({', '.join(obj['t'])})" if obj["t"] else "lemma flags")
    for kind in ("mild", "dual_mild", "strong"):
        flags = obj[kind]
        line = ", ".join(f"({k})={'T' if v else 'F'}" for k, v in flags.items())
        print(f"  {kind:10s} {line}")
    if obj["weak"]:
        print("  weak       " + ", ".join(f"p={k}: {'T' if v else 'F'}" for k, v in obj["weak"].items()))
    if obj.get("standard") is not None:
        print(f"  standard   {'T' if obj['standard'] else 'F'}")
    if obj["witnesses"]:
        print("  witnesses for failures:")
        for key, w in obj["witnesses"].items():
            print(f"    {key}: {len(w['terms'])} terms")


def _render_scenario(obj: dict) -> None:
    print(f"scenario {obj['scenario']}: {'PASS' if obj['pass'] else 'FAIL'}")
    for c in obj["checks"]:
        mark = "ok " if c["pass"] else "XXX"
        print(f"  [{mark}] {c['key']}: expected {c['expected']}, got {c['actual']}  ({c['provenance']})")


# -- subcommands --------------------------------------------------------------


def _cmd_catalog(args) -> int:
    obj = {"entries": catalog_names(), "scenarios": sorted(SCENARIOS)}
    _emit(obj, args.json, lambda o: print(
        "catalog entries: " + ", ".join(o["entries"]) + "\nscenarios: " + ", ".join(o["scenarios"])
    ))
    return 0


def _cmd_cohomology(args) -> int:
    entry = _load_manifold(args.manifold, args.order)
    ec, point = _evaluated(entry, args.t)
    report = full_report(ec)
    obj = report.to_json_dict()
    obj["manifold"] = entry.name
    obj["t"] = [str(z) for z in point]
    _emit(obj, args.json, _render_cohomology)
    return 0


def _cmd_lemmata(args) -> int:
    entry = _load_manifold(args.manifold, args.order)
    ec, point = _evaluated(entry, args.t)
    bidegrees = None
    if args.bidegree and not args.all:
        p, q = (int(x) for x in args.bidegree.split(","))
        bidegrees = [(p, q)]
    rep = lemma_report(ec, bidegrees=bidegrees, with_standard=args.all or not args.bidegree)
    obj = rep.to_json_dict()
    obj["manifold"] = entry.name
    obj["t"] = [str(z) for z in point]
    _emit(obj, args.json, _render_lemmata)
    return 0


def _cmd_deform(args) -> int:
    entry = _load_manifold(args.manifold, args.order)
    phi = _load_beltrami(args.beltrami, entry)
    if args.t:
        point = _parse_point(args.t, phi.algebra.ring.m)
        se_t = deform_complex(entry.se, phi, point=point)
    else:
        se_t = deform_complex(entry.se, phi)
    text = nio.se_emit(se_t)
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_extend(args) -> int:
    entry = _load_manifold(args.manifold, args.order)
    phi = _load_beltrami(args.beltrami, entry)
    omega0 = _load_form(args.form, entry, phi.algebra)
    if args.pkahler is not None:
        ext = pkahler_extend(entry.se, phi, omega0, order=args.order_n,
                             samples=args.samples, seed=args.seed)
        state = ext.state
        extra = {
            "pkahler_p": args.pkahler,
            "transverse_at": [
                {"t": [str(z) for z in pt], "holds": v.holds, "exact": v.exact}
                for pt, v in zip(ext.points, ext.verdicts)
            ],
        }
    else:
        state = solve_extension(entry.se, phi, omega0, order=args.order_n)
        extra = {}
    pts = small_points(phi.algebra.ring.m)
    nontrivial = []
    for pt in pts:
        se_t = deform_complex(entry.se, phi, point=pt)
        ect = EvaluatedComplex(build_complex(se_t), ())
        nontrivial.append(
            {"t": [str(z) for z in pt], "bc_nontrivial": bc_nontriviality(ect, state.extension_at(pt))}
        )
    obj = {
        "manifold": entry.name,
        "bidegree": list(state.bidegree),
        "order": state.order,
        "residual_by_order": [
            {"order": l, "left": str(a), "right": str(b)}
            for l, (a, b) in enumerate(
                zip(state.residual_left_by_order, state.residual_right_by_order)
            )
        ],
        "d_closed_through_order": state.d_closed_through_order,
        "extended_form": nio.form_to_obj(state.omega),
        "bc_nontrivial_at": nontrivial,
    }
    obj.update(extra)
    _emit(obj, args.json, lambda o: print(
        f"extension of a ({o['bidegree'][0]},{o['bidegree'][1]})-form through order {o['order']}: "
        + ("d-closed" if o["d_closed_through_order"] else "RESIDUAL NONZERO")
    ))
    return 0


def _cmd_positivity(args) -> int:
    entry = _load_manifold(args.manifold, args.order)
    omega = _load_form(args.form, entry)
    point = zero_point(omega.algebra.ring.m)
    ev = omega.eval(point)
    se_r = entry.se if entry.se.algebra == omega.algebra else entry.se.with_algebra(omega.algebra)
    d_closed = not se_r.apply_d(omega)
    pk, verdict = pkahler_check(entry.se, omega, args.p, samples=args.samples, seed=args.seed)
    try:
        strict = is_strictly_positive(ev, args.p).holds
    except NilformsError:
        strict = None
    obj = {
        "manifold": entry.name,
        "p": args.p,
        "d_closed": d_closed,
        "pkahler": pk,
        "transverse": verdict.to_json_dict(),
        "strictly_positive": strict,
    }
    _emit(obj, args.json, lambda o: print(
        f"p={o['p']}: pkahler={o['pkahler']} transverse={o['transverse']['holds']} "
        f"(exact={o['transverse']['exact']}) strictly_positive={o['strictly_positive']}"
    ))
    return 0


def _cmd_scenario(args) -> int:
    names = sorted(SCENARIOS) if args.name == "all" else [args.name]
    worst = 0
    for name in names:
        rep = run_scenario(name)
        obj = rep.to_json_dict()
        _emit(obj, args.json, _render_scenario)
        if not rep.passed:
            worst = 2
    return worst


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nilforms",
        description="Exact cohomology and deformation computations on invariant complexes",
    )
    parser.add_argument("--order", type=int, default=4,
                        help="truncation order for parameter rings (default 4)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cat = sub.add_parser("catalog", help="list catalog entries and scenarios")
    p_cat.add_argument("what", nargs="?", default="list", choices=["list"])
    p_cat.add_argument("--json", action="store_true")
    p_cat.set_defaults(fn=_cmd_catalog)

    p_coh = sub.add_parser("cohomology", help="full (p,q)-table of the four cohomologies")
    p_coh.add_argument("--manifold", required=True)
    p_coh.add_argument("--t", help="comma-separated parameter values, e.g. 3/7,5/11,2/13,7/17")
    p_coh.add_argument("--json", action="store_true")
    p_coh.set_defaults(fn=_cmd_cohomology)

    p_lem = sub.add_parser("lemmata", help="del-delbar lemma flags and witnesses")
    p_lem.add_argument("--manifold", required=True)
    p_lem.add_argument("--bidegree", help="p,q")
    p_lem.add_argument("--all", action="store_true")
    p_lem.add_argument("--t")
    p_lem.add_argument("--json", action="store_true")
    p_lem.set_defaults(fn=_cmd_lemmata)

    p_def = sub.add_parser("deform", help="deformed structure equations along a Beltrami family")
    p_def.add_argument("--manifold", required=True)
    p_def.add_argument("--beltrami", required=True, help="file or 'catalog'")
    group = p_def.add_mutually_exclusive_group()
    group.add_argument("--symbolic", action="store_true", default=True)
    group.add_argument("--t")
    p_def.add_argument("--output")
    p_def.set_defaults(fn=_cmd_deform)

    p_ext = sub.add_parser("extend", help="d-closed extension of a form to deformed fibers")
    p_ext.add_argument("--manifold", required=True)
    p_ext.add_argument("--beltrami", required=True, help="file or 'catalog'")
    p_ext.add_argument("--form", required=True, help="file or catalog:NAME")
    p_ext.add_argument("--order-n", type=int, default=None, dest="order_n",
                       help="series order (default: ring truncation)")
    p_ext.add_argument("--pkahler", type=int, default=None,
                       help="treat the input as a p-Kaehler form and sample transversality")
    p_ext.add_argument("--samples", type=int, default=200)
    p_ext.add_argument("--seed", type=int, default=7)
    p_ext.add_argument("--json", action="store_true")
    p_ext.set_defaults(fn=_cmd_extend)

    p_pos = sub.add_parser("positivity", help="strict positivity / transversality verdicts")
    p_pos.add_argument("--manifold", required=True)
    p_pos.add_argument("--form", required=True, help="file or catalog:NAME")
    p_pos.add_argument("--p", type=int, required=True)
    p_pos.add_argument("--samples", type=int, default=200)
    p_pos.add_argument("--seed", type=int, default=7)
    p_pos.add_argument("--json", action="store_true")
    p_pos.set_defaults(fn=_cmd_positivity)

    p_sce = sub.add_parser("scenario", help="run golden-file scenarios")
    p_sce.add_argument("name", help="scenario name or 'all'")
    p_sce.add_argument("--json", action="store_true")
    p_sce.set_defaults(fn=_cmd_scenario)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except NilformsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
