"""Command-line surface: variety-spec ingestion, dispatch, JSON/CSV reports.

Exit codes: 0 success, 2 input/parse failure, 3 budget or field-size limit,
4 internal invariant breach.  Every randomized command requires --seed.
Reports are canonical JSON (sorted keys, 6-significant-digit floats,
rationals as "num/den"); rerunning with identical parameters and seed gives
a byte-identical payload for any --threads value.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import config, construct, geometry, mpoly, report, sieve, zeta
from . import smoothness as sm
from .errors import (
    BudgetExceededError,
    DivergentError,
    EmptyJetSetError,
    FieldSizeError,
    InconsistentConditionsError,
    NotSurjectiveError,
    PointsNotDistinctError,
    PolyParseError,
    SieveError,
    XNotValidatedError,
)
from .gf import field_extend
from .geometry import ClosedPoint, ProjPoint, closed_point_of, resolve_space


def _parse_range(text: str) -> tuple:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return int(lo), int(hi)
    v = int(text)
    return v, v


def _parse_point(text: str, field, n: int) -> ClosedPoint:
    """`c0:c1:...:cn` with optional `@e` suffix; coordinates in g-notation."""
    if "@" in text:
        coords_text, e_text = text.rsplit("@", 1)
        e = int(e_text)
    else:
        coords_text, e = text, 1
    w = field_extend(field, e)
    parts = coords_text.split(":")
    if len(parts) != n + 1:
        raise ValueError(f"point {text!r} needs {n + 1} coordinates")
    coords = [w.elem_parse(p) for p in parts]
    lead = next((i for i, c in enumerate(coords) if c), None)
    if lead is None:
        raise ValueError("the zero tuple is not a projective point")
    inv = w.inv(coords[lead])
    coords = tuple(w.mul(c, inv) for c in coords)
    return closed_point_of(ProjPoint(e, coords, lead), field)


def _point_dict(cp: ClosedPoint, field) -> dict:
    w = field_extend(field, cp.degree)
    return {"degree": cp.degree,
            "coords": [w.elem_str(c) for c in cp.rep.coords]}


def _verdict_dict(v, field) -> dict:
    if isinstance(v, sm.Smooth):
        return {"kind": "smooth", "checked_bound": v.checked_bound, "exact": v.exact}
    if isinstance(v, sm.SingularAt):
        return {"kind": "singular_at", "witness": _point_dict(v.point, field)}
    if isinstance(v, sm.IsWholeSpace):
        return {"kind": "whole_space"}
    return {"kind": type(v).__name__}


def _estimate_dict(est: sieve.DensityEstimate) -> dict:
    out = {
        "mode": est.mode,
        "hits": est.hits,
        "total": est.total,
        "fraction": est.fraction,
        "fraction_float": float(est.fraction),
        "predicate": est.predicate,
        "d": est.d,
    }
    if est.ci95 is not None:
        out["ci95"] = [est.ci95[0], est.ci95[1]]
    if est.jet_weight != 1:
        out["jet_weight"] = est.jet_weight
    return out


def _prediction_dict(pred: zeta.DensityPrediction) -> dict:
    out = {"value": pred.value, "float": pred.float_value, "provenance": pred.provenance}
    if pred.r is not None:
        out["r"] = pred.r
    if pred.stabilization is not None:
        out["stabilization"] = pred.stabilization
    if pred.jet_factor is not None:
        out["jet_factor"] = pred.jet_factor
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_density(args, pool, shards):
    space = resolve_space(args.space, args.q)
    field, n = space.field, space.n
    d_lo, d_hi = _parse_range(args.d)
    if args.mode == "mc":
        if args.seed is None:
            raise ValueError("--seed is required in mc mode (no hidden entropy)")
        if not args.trials:
            raise ValueError("--trials is required in mc mode")

    def make_pred():
        if args.pred == "smooth":
            return sieve.SmoothIntersection(space, args.bound)
        if args.pred == "smooth-below":
            if not args.r:
                raise ValueError("--r is required for the smooth-below predicate")
            return sieve.SmoothAtPointsBelow(space, args.r)
        if args.pred == "nodes":
            return sieve.AtWorstNodes(args.bound if args.bound else 2)
        if args.pred == "integral":
            return sieve.GeomIntegral(args.budget or 10000)
        raise ValueError(f"unknown predicate {args.pred!r}")

    def make_prediction():
        if args.pred == "smooth":
            return zeta.predict_density(space, r=args.r)
        if args.pred == "smooth-below":
            za = zeta.zeta_inv_truncated(space, space.m + 1, args.r)
            return zeta.DensityPrediction(za.value, "truncated", r=args.r,
                                          stabilization=za.stabilization)
        if args.pred == "nodes":
            return zeta.DensityPrediction(
                zeta.zeta_inv_pn(2, field.q, 4), "closed_form")
        return zeta.DensityPrediction(Fraction(1), "closed_form")

    pred = make_pred()
    prediction = make_prediction()
    entries = []
    for d in range(d_lo, d_hi + 1):
        if args.mode == "exhaustive":
            est = sieve.exhaustive_density(field, n, d, pred, shards=shards, pool=pool)
        else:
            est = sieve.mc_density(field, n, d, pred, args.trials, args.seed,
                                   shards=shards, pool=pool)
        entries.append({
            "d": d,
            "empirical": _estimate_dict(est),
            "prediction": _prediction_dict(prediction),
            "difference": float(est.fraction) - prediction.float_value,
        })
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["d", "mode", "trials", "hits", "total", "fraction",
                         "ci_lo", "ci_hi", "predicate", "seed"])
            for entry in entries:
                e = entry["empirical"]
                ci = e.get("ci95", ["", ""])
                wr.writerow([entry["d"], e["mode"],
                             e["total"] if e["mode"] == "mc" else "",
                             e["hits"], e["total"],
                             f"{e['fraction'].numerator}/{e['fraction'].denominator}",
                             ci[0], ci[1], e["predicate"], args.seed])
    params = {"space": args.space, "q": args.q, "d": args.d, "pred": args.pred,
              "mode": args.mode, "trials": args.trials, "r": args.r,
              "bound": args.bound, "seed": args.seed}
    payload = {"space": repr(space), "entries": entries}
    return params, payload


def cmd_zeta(args, pool, shards):
    space = resolve_space(args.space, args.q)
    s = args.s
    payload = {"space": repr(space), "s": s}
    if args.r is None and zeta._named_space(space) is not None:
        value = zeta.zeta_inv_closed_form(space, s)
        payload.update({"value": value, "float": float(value),
                        "provenance": "closed_form"})
    else:
        r = args.r if args.r is not None else 6
        za = zeta.zeta_inv_truncated(space, s, r)
        payload.update({"value": za.value, "float": za.float_value,
                        "provenance": "truncated", "r": r,
                        "terms": list(za.terms), "stabilization": za.stabilization})
    if args.tail_to:
        approxes, deltas = zeta.tail_report(space, s, args.tail_to)
        payload["tail"] = [{"r": a.r, "value": a.value, "float": a.float_value}
                           for a in approxes]
        payload["tail_deltas"] = [d for d in deltas]
    params = {"space": args.space, "q": args.q, "s": s, "r": args.r,
              "tail_to": args.tail_to}
    return params, payload


def _read_poly_text(args) -> str:
    if args.poly:
        return args.poly
    if args.stdin:
        text = sys.stdin.read().strip()
        if text.startswith("{"):
            data = json.loads(text)
            return data.get("payload", {}).get("polynomial", "")
        return text
    raise ValueError("give --poly or --stdin")


def cmd_smooth_check(args, pool, shards):
    space = resolve_space(args.space, args.q)
    text = _read_poly_text(args)
    f = mpoly.poly_parse(text, space.field, space.n)
    verdict = sm.is_smooth_intersection(f, space, bound=args.bound)
    params = {"space": args.space, "q": args.q, "poly": text, "bound": args.bound}
    payload = {"space": repr(space), "polynomial": str(f), "d": f.d,
               "verdict": _verdict_dict(verdict, space.field)}
    return params, payload


def cmd_jet_rank(args, pool, shards):
    space = resolve_space(args.space, args.q)
    field, n = space.field, space.n
    if args.points == "rational":
        pts = [ClosedPoint(1, p) for p in geometry.points_over(space, 1)]
    else:
        pts = [_parse_point(tok, field, n) for tok in args.points.split(";")]
    z = sieve.JetScheme(field, n, tuple((cp, args.order) for cp in pts))
    rep = sieve.jet_map_rank(z, args.d)
    params = {"space": args.space, "q": args.q, "points": args.points,
              "order": args.order, "d": args.d}
    payload = {"points": len(pts), "order": args.order, "d": args.d,
               "dims": list(rep.dims), "rank": rep.rank,
               "surjective": rep.surjective, "threshold": rep.threshold}
    return params, payload


def _search_result_payload(result, field) -> dict:
    if isinstance(result, construct.Found):
        return {"result": "found", "f": str(result.f), "d": result.d,
                "verdict": _verdict_dict(result.verdict, field),
                "checked": list(result.checked)}
    return {"result": "not_found",
            "tried": {str(k): v for k, v in result.tried.items()},
            "notes": list(result.notes)}


def cmd_find(args, pool, shards):
    if args.seed is None:
        raise ValueError("--seed is required for searches (no hidden entropy)")
    if args.spec_file:
        data = json.load(open(args.spec_file))
        spec = search_spec_from_dict(data)
        space = spec.x
    else:
        space = resolve_space(args.space, args.q)
        field, n = space.field, space.n
        if args.through == "all-rational":
            pts = tuple(ClosedPoint(1, p) for p in geometry.points_over(space, 1))
        elif args.through:
            pts = tuple(_parse_point(tok, field, n) for tok in args.through.split(";"))
        else:
            pts = ()
        spec = construct.SearchSpec(
            space, pass_through=pts, tangent=(),
            avoid_degree_below=args.avoid_below,
            d_range=_parse_range(args.d_range),
            budget=args.budget, seed=args.seed)
    result = construct.find_section(spec)
    params = {"space": args.space, "q": args.q, "through": args.through,
              "avoid_below": args.avoid_below, "d_range": args.d_range,
              "budget": args.budget, "seed": args.seed,
              "spec_file": args.spec_file}
    return params, _search_result_payload(result, spec.x.field)


def search_spec_from_dict(data: dict) -> construct.SearchSpec:
    space = data["space"]
    if isinstance(space, str):
        x = resolve_space(space, data.get("q"))
    else:
        x = geometry.spec_from_dict(space)
    pts = tuple(_parse_point(t, x.field, x.n) for t in data.get("pass_through", []))
    tangent = tuple(
        (_parse_point(t["point"], x.field, x.n),
         tuple(field_extend(x.field, 1).elem_parse(v) for v in t["normal"].split(":")))
        for t in data.get("tangent", []))
    return construct.SearchSpec(
        x, pass_through=pts, tangent=tangent,
        avoid_degree_below=data.get("avoid_degree_below"),
        d_range=tuple(data.get("d_range", [1, 1])),
        budget=data.get("budget", 10 ** 6),
        seed=data.get("seed", 0))


def search_spec_to_dict(spec: construct.SearchSpec) -> dict:
    field = spec.x.field

    def point_str(cp):
        w = field_extend(field, cp.degree)
        s = ":".join(w.elem_str(c) for c in cp.rep.coords)
        return s if cp.degree == 1 else f"{s}@{cp.degree}"

    return {
        "space": geometry.spec_to_dict(spec.x),
        "pass_through": [point_str(cp) for cp in spec.pass_through],
        "tangent": [{"point": point_str(cp),
                     "normal": ":".join(str(v) for v in nu)}
                    for cp, nu in spec.tangent],
        "avoid_degree_below": spec.avoid_degree_below,
        "d_range": list(spec.d_range),
        "budget": spec.budget,
        "seed": spec.seed,
    }


def cmd_anti_bertini(args, pool, shards):
    if args.search:
        if args.seed is None:
            raise ValueError("--seed is required for searches (no hidden entropy)")
        result = construct.anti_bertini_search(
            args.q, args.n, args.d, _parse_range(args.dx_range),
            args.budget, args.seed)
        field = result.f.field if isinstance(result, construct.Found) else None
        payload = _search_result_payload(
            result, field if field else construct.field_from_order(args.q))
        params = {"search": True, "q": args.q, "n": args.n, "d": args.d,
                  "dx_range": args.dx_range, "budget": args.budget,
                  "seed": args.seed}
        return params, payload
    space = resolve_space(args.space, args.q)
    out = construct.verify_anti_bertini(space, args.d_max,
                                        witness_bound=args.witness_bound)
    if isinstance(out, construct.AllSingular):
        payload = {
            "result": "all_singular",
            "sections": len(out.witnesses),
            "witnesses": [{"g": str(g), "point": _point_dict(pt, space.field)}
                          for g, pt in out.witnesses],
        }
    else:
        payload = {"result": "counterexample", "g": str(out.g),
                   "verdict": _verdict_dict(out.verdict, space.field)}
    params = {"search": False, "space": args.space, "q": args.q,
              "d_max": args.d_max, "witness_bound": args.witness_bound}
    return params, payload


def cmd_katz(args, pool, shards):
    f = construct.katz_hypersurface(args.q, args.pairs)
    params = {"q": args.q, "pairs": args.pairs}
    payload = {"polynomial": str(f), "n": f.n, "d": f.d, "q": args.q,
               "pairs": args.pairs, "space_name": f"katz({args.pairs},{args.q})"}
    return params, payload


def cmd_squarefree_demo(args, pool, shards):
    rep = zeta.squarefree_integer_density(args.limit)
    params = {"limit": args.limit}
    payload = {"limit": rep.limit, "count": rep.count, "fraction": rep.fraction,
               "float": float(rep.fraction), "reference": rep.reference,
               "abs_error": rep.abs_error}
    return params, payload


DISPATCH = {
    "density": cmd_density,
    "zeta": cmd_zeta,
    "smooth-check": cmd_smooth_check,
    "jet-rank": cmd_jet_rank,
    "find": cmd_find,
    "anti-bertini": cmd_anti_bertini,
    "katz": cmd_katz,
    "squarefree-demo": cmd_squarefree_demo,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="smoothsieve",
        description="Densities of smooth hypersurface sections over finite fields")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write the JSON report to this file")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--max-field-bits", type=int,
                        help="override the field-size guard (else BERTINI_MAX_FIELD_BITS)")
        sp.add_argument("--seed", default=None)
        sp.add_argument("--budget", type=int, default=None)

    sp = sub.add_parser("density", help="empirical density vs zeta prediction")
    sp.add_argument("--space", required=True)
    sp.add_argument("--q", type=int)
    sp.add_argument("--d", required=True, help="degree, or lo:hi for a sweep")
    sp.add_argument("--pred", default="smooth",
                    choices=["smooth", "smooth-below", "nodes", "integral"])
    sp.add_argument("--r", type=int, help="point-degree cutoff / truncation degree")
    sp.add_argument("--bound", type=int, help="override the smoothness scan bound")
    sp.add_argument("--mode", choices=["exhaustive", "mc"], default="exhaustive")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--csv", help="write the density sweep CSV here")
    common(sp)

    sp = sub.add_parser("zeta", help="inverse zeta value (closed form or truncated)")
    sp.add_argument("--space", required=True)
    sp.add_argument("--q", type=int)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--r", type=int)
    sp.add_argument("--tail-to", type=int, help="also report truncations up to this r")
    common(sp)

    sp = sub.add_parser("smooth-check", help="smoothness verdict for one form")
    sp.add_argument("--space", required=True)
    sp.add_argument("--q", type=int)
    sp.add_argument("--poly")
    sp.add_argument("--stdin", action="store_true",
                    help="read the form (or a katz report) from stdin")
    sp.add_argument("--bound", type=int)
    common(sp)

    sp = sub.add_parser("jet-rank", help="rank of the jet map S_d -> H^0(Z)")
    sp.add_argument("--space", required=True)
    sp.add_argument("--q", type=int)
    sp.add_argument("--points", default="rational",
                    help='"rational" or points "c0:c1:c2[@e]" joined by ";"')
    sp.add_argument("--order", type=int, default=2, choices=[1, 2])
    sp.add_argument("--d", type=int, required=True)
    common(sp)

    sp = sub.add_parser("find", help="search for a section through prescribed data")
    sp.add_argument("--space")
    sp.add_argument("--q", type=int)
    sp.add_argument("--through", default="",
                    help='"all-rational" or points joined by ";"')
    sp.add_argument("--avoid-below", type=int)
    sp.add_argument("--d-range", default="1:3")
    sp.add_argument("--spec-file", help="full SearchSpec as JSON")
    common(sp)

    sp = sub.add_parser("anti-bertini", help="verify or construct anti-Bertini examples")
    sp.add_argument("--search", action="store_true")
    sp.add_argument("--space")
    sp.add_argument("--q", type=int)
    sp.add_argument("--d-max", type=int, default=1)
    sp.add_argument("--witness-bound", type=int, default=2)
    sp.add_argument("--n", type=int)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--dx-range", default="5:7")
    common(sp)

    sp = sub.add_parser("katz", help="the Katz hypersurface form")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--pairs", type=int, required=True)
    common(sp)

    sp = sub.add_parser("squarefree-demo", help="squarefree integer density vs 6/pi^2")
    sp.add_argument("--limit", type=int, required=True)
    common(sp)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else 0
    if getattr(args, "max_field_bits", None):
        config.set_max_field_bits(args.max_field_bits)
    if getattr(args, "budget", None) is None:
        args.budget = 10 ** 6
    threads = max(1, getattr(args, "threads", 1))
    t0 = time.time()
    pool = None
    try:
        if threads > 1:
            pool = ThreadPoolExecutor(max_workers=threads)
        params, payload = DISPATCH[args.command](args, pool, threads)
    except (PolyParseError, ValueError, KeyError, FileNotFoundError,
            json.JSONDecodeError, DivergentError, InconsistentConditionsError,
            XNotValidatedError, NotSurjectiveError, EmptyJetSetError,
            PointsNotDistinctError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (BudgetExceededError, FieldSizeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (SieveError, AssertionError) as e:
        print(f"internal invariant breach: {e}", file=sys.stderr)
        return 4
    finally:
        if pool is not None:
            pool.shutdown()
    rep = report.run_report(args.command, params, payload,
                            seed=getattr(args, "seed", None),
                            shard_count=threads, wall_time=time.time() - t0)
    text = report.dumps(rep)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
