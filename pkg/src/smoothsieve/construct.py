"""Constructive searches: sections through prescribed points with prescribed
tangents, space-avoiding sections, the Katz hypersurface, and anti-Bertini
verification/search.

Point and tangent prescriptions are linear conditions on the coefficients of
f: passing through a closed point P kills the untwisted value f|_P, and a
tangent prescription at a rational point P fixes the chart gradient to a
nonzero scalar multiple of the normal covector, handled as q-1 separate
affine systems.  Candidate cosets are enumerated canonically when small and
sampled under the given seed otherwise; the budget counts smoothness-oracle
calls.  Every Found result re-verifies all conditions on the returned form
through independent module calls.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb

from . import config, linalg
from .errors import BudgetExceededError, InconsistentConditionsError
from .geometry import ClosedPoint, SubschemeSpec, closed_points, proj_space
from .gf import field_extend, field_from_order
from .mpoly import (
    HomogPoly,
    chart_jet1,
    monomial_index,
    poly_eval,
    poly_from_index,
    s_d_count,
)
from . import sieve
from . import smoothness as sm


ENUMERATION_CAP = 1 << 16


@dataclass(frozen=True)
class SearchSpec:
    """What to look for: X, points to pass through, tangent prescriptions,
    low-degree points to avoid, degree range, budget, and seed."""

    x: SubschemeSpec
    pass_through: tuple = ()
    tangent: tuple = ()  # ((ClosedPoint of degree 1, ambient normal covector), ...)
    avoid_degree_below: int | None = None
    d_range: tuple = (1, 1)
    budget: int = 10 ** 6
    seed: object = 0


@dataclass(frozen=True)
class Found:
    f: HomogPoly
    d: int
    verdict: object
    checked: tuple


@dataclass(frozen=True)
class NotFoundWithinBudget:
    tried: dict
    notes: tuple


@dataclass(frozen=True)
class AllSingular:
    witnesses: tuple  # ((g, singular ClosedPoint), ...)


@dataclass(frozen=True)
class CounterexampleFound:
    g: HomogPoly
    verdict: object


# ---------------------------------------------------------------------------
# the Katz hypersurface


def katz_hypersurface(q: int, n_pairs: int) -> HomogPoly:
    """sum_i (X_i Y_i^q - X_i^q Y_i) in P^(2*n_pairs+1), degree q+1.

    Pair i uses coordinates (x_i, x_{n_pairs+1+i}); the coefficient field is F_q.
    """
    field = field_from_order(q)
    n = 2 * n_pairs + 1
    d = q + 1
    idx = monomial_index(n, d)
    coeffs = [0] * comb(n + d, n)
    neg_one = (field.p - 1) % field.p
    for i in range(n_pairs + 1):
        xi, yi = i, n_pairs + 1 + i
        m1 = [0] * (n + 1)
        m1[xi], m1[yi] = 1, q
        m2 = [0] * (n + 1)
        m2[xi], m2[yi] = q, 1
        coeffs[idx[tuple(m1)]] = 1
        coeffs[idx[tuple(m2)]] = neg_one
    return HomogPoly(field, n, d, tuple(coeffs))


def katz_spec(q: int, n_pairs: int) -> SubschemeSpec:
    """The Katz hypersurface as a subscheme spec of dimension 2*n_pairs."""
    f = katz_hypersurface(q, n_pairs)
    return SubschemeSpec(f.field, f.n, f.n - 1, (f,), (),
                         name=f"katz({n_pairs},{q})")


# ---------------------------------------------------------------------------
# linear condition machinery


def _chart_normal(nu, lead, n):
    chart = tuple(nu[i] for i in range(n + 1) if i != lead)
    if not any(chart):
        raise InconsistentConditionsError(
            "tangent normal restricts to zero in the point's chart")
    return chart


def _condition_system(field, n, d, order1_points, tangent_items):
    """F_q-linear system rows for value conditions and tangent gradients.

    tangent_items hold (ClosedPoint, chart normal as kappa(P)-elements); the
    gradient prescription grad = lambda * normal runs over lambda in
    kappa(P)*, one affine system each.  Returns (system_rows, rhs_builder,
    lambda_space) where rhs_builder maps a lambda assignment to the rhs.
    """
    from .mpoly import chart_rows as _chart_rows

    w_cache = {}
    rows = []
    n_fixed_rows = 0

    def working(e):
        return w_cache.setdefault(e, field_extend(field, e))

    def value_rows(cp):
        w = working(cp.degree)
        vrow, _ = _chart_rows(n, d, cp.rep.coords, cp.rep.lead, w)
        expanded = [w.fq_coords(v) for v in vrow]
        return [[expanded[j][t] for j in range(len(vrow))] for t in range(cp.degree)]

    # all value rows first (zero rhs), then the gradient blocks in order,
    # so rhs_for can lay out targets consistently with the row order
    for cp in order1_points:
        for r in value_rows(cp):
            rows.append(r)
            n_fixed_rows += 1
    for cp, _ in tangent_items:
        for r in value_rows(cp):
            rows.append(r)
            n_fixed_rows += 1

    grad_blocks = []
    for cp, chart_nu in tangent_items:
        w = working(cp.degree)
        if not any(chart_nu):
            raise InconsistentConditionsError(
                "tangent normal restricts to zero in the point's chart")
        _, grows = _chart_rows(n, d, cp.rep.coords, cp.rep.lead, w)
        expanded = [[w.fq_coords(v) for v in gr] for gr in grows]
        for gi in range(len(grows)):
            for t in range(cp.degree):
                rows.append([expanded[gi][j][t] for j in range(len(grows[gi]))])
        grad_blocks.append((w, chart_nu, len(grows)))

    def rhs_for(lambdas):
        rhs = [0] * n_fixed_rows
        for (w, chart_nu, ng), lam in zip(grad_blocks, lambdas):
            for gi in range(ng):
                rhs.extend(w.fq_coords(w.mul(lam, chart_nu[gi])))
        return rhs

    lambda_space = [range(1, w.order) for (w, _, _) in grad_blocks]
    return rows, rhs_for, lambda_space


def _jet_scheme_for(field, n, order1_points, tangent_items):
    items = [(cp, 2) for cp, _ in tangent_items] + [(cp, 1) for cp in order1_points]
    if not items:
        return None
    return sieve.JetScheme(field, n, tuple(items))


def _iter_candidates(w1, particular, kernel, budget_left, rng):
    """Canonical coset enumeration when small, seeded sampling otherwise."""
    size = w1.order ** len(kernel)
    if size <= min(budget_left, ENUMERATION_CAP):
        yield from linalg.enumerate_affine(w1, particular, kernel)
        return
    n = len(particular)
    q = w1.order
    while True:
        vec = list(particular)
        for b in kernel:
            c = rng.randrange(q)
            if c:
                for i in range(n):
                    if b[i]:
                        vec[i] = w1.add(vec[i], w1.mul(c, b[i]))
        yield vec


# ---------------------------------------------------------------------------
# searches


def _verify_conditions(f, spec: SearchSpec):
    """Independent re-check of all imposed conditions on a candidate."""
    field = spec.x.field
    checked = []
    for cp in spec.pass_through:
        w = field_extend(field, cp.degree)
        if poly_eval(f, cp.rep.coords, w) != 0:
            return None
    if spec.pass_through:
        checked.append(f"contains {len(spec.pass_through)} prescribed points")
    for cp, nu in spec.tangent:
        w1 = field_extend(field, 1)
        _, grad = chart_jet1(f, cp.rep.coords, cp.rep.lead, w1)
        chart_nu = _chart_normal(nu, cp.rep.lead, spec.x.n)
        lam = None
        for i, v in enumerate(chart_nu):
            if v:
                lam = w1.mul(grad[i], w1.inv(v))
                break
        if lam is None or lam == 0:
            return None
        if tuple(w1.mul(lam, v) for v in chart_nu) != tuple(grad):
            return None
    if spec.tangent:
        checked.append(f"tangent prescriptions hold at {len(spec.tangent)} points")
    if spec.avoid_degree_below is not None:
        for e in range(1, spec.avoid_degree_below):
            for cp in closed_points(spec.x, e):
                w = field_extend(field, e)
                if poly_eval(f, cp.rep.coords, w) == 0:
                    return None
        checked.append(f"no points of degree < {spec.avoid_degree_below} on the section")
    return checked


def find_section(spec: SearchSpec):
    """Search for f with H_f meeting X smoothly through the prescribed data."""
    field, n = spec.x.field, spec.x.n
    if spec.avoid_degree_below is not None and spec.avoid_degree_below < 1:
        raise ValueError("avoid_degree_below must be at least 1")
    tangent_keys = {(cp.degree, cp.rep.coords) for cp, _ in spec.tangent}
    through_keys = {(cp.degree, cp.rep.coords) for cp in spec.pass_through}
    if not tangent_keys <= through_keys:
        raise InconsistentConditionsError("tangent points must be listed in pass_through")
    order1 = [cp for cp in spec.pass_through
              if (cp.degree, cp.rep.coords) not in tangent_keys]
    tangent_items = []
    for cp, nu in spec.tangent:
        if cp.degree != 1:
            raise InconsistentConditionsError("tangent prescriptions need rational points")
        if not any(nu):
            raise InconsistentConditionsError(
                "zero tangent covector forces a zero gradient; smoothness needs it nonzero")
        tangent_items.append((cp, _chart_normal(nu, cp.rep.lead, n)))

    w1 = field_extend(field, 1)
    budget_left = spec.budget
    tried = {}
    notes = []
    rng_counter = 0
    for d in range(spec.d_range[0], spec.d_range[1] + 1):
        tried[d] = 0
        z = _jet_scheme_for(field, n, order1, tangent_items)
        if z is not None:
            report = sieve.jet_map_rank(z, d)
            if not report.surjective:
                notes.append(f"d={d}: jet map rank {report.rank} < {report.dims[1]}, skipped")
                continue
        rows, rhs_for, lambda_space = _condition_system(field, n, d, order1, tangent_items)
        nmono = comb(n + d, n)
        kernel = linalg.nullspace(w1, rows, nmono) if rows else \
            [[1 if i == j else 0 for i in range(nmono)] for j in range(nmono)]
        for lambdas in product(*lambda_space) if lambda_space else [()]:
            if rows:
                particular = linalg.solve(w1, rows, rhs_for(lambdas))
                if particular is None:
                    continue
            else:
                particular = [0] * nmono
            rng = sieve.trial_rng(spec.seed, rng_counter)
            rng_counter += 1
            for vec in _iter_candidates(w1, particular, kernel, budget_left, rng):
                if budget_left <= 0:
                    break
                if not any(vec):
                    continue
                f = HomogPoly(field, n, d, tuple(vec))
                budget_left -= 1
                tried[d] += 1
                verdict = sm.is_smooth_intersection(f, spec.x,
                                                    bound=config.SEARCH_SMOOTH_BOUND)
                if not isinstance(verdict, sm.Smooth):
                    continue
                checked = _verify_conditions(f, spec)
                if checked is None:
                    continue
                checked.append(f"smooth up to degree {verdict.checked_bound}"
                               + (" (exact)" if verdict.exact else ""))
                integ = sm.geometrically_integral(f, budget=2000)
                checked.append(f"integrality: {type(integ).__name__}")
                return Found(f, d, verdict, tuple(checked))
            if budget_left <= 0:
                break
        if budget_left <= 0:
            notes.append(f"budget exhausted at d={d}")
            break
    return NotFoundWithinBudget(tried, tuple(notes))


def space_avoiding(x: SubschemeSpec, ell: int, d_range, budget: int, seed):
    """Find f with H_f on X smooth and free of closed points of degree < ell."""
    if ell < 1:
        raise ValueError("ell must be at least 1")
    # feasibility of the whole avoid set comes first: error before any search
    from .errors import FieldSizeError
    bits = config.max_field_bits()
    for e in range(1, ell):
        if x.field.q ** e > (1 << bits):
            raise FieldSizeError(
                f"avoiding degree-{e} points needs a field beyond the 2^{bits} guard")
    for e in range(1, ell):
        if x.field.q ** (e * x.n) > config.EXHAUSTIVE_BUDGET:
            raise BudgetExceededError(
                f"enumerating points of degree {e} needs ~q^{e * x.n} ambient scans")
    for e in range(1, ell):
        closed_points(x, e)
    spec = SearchSpec(x, pass_through=(), tangent=(), avoid_degree_below=ell,
                      d_range=tuple(d_range), budget=budget, seed=seed)
    return find_section(spec)


# ---------------------------------------------------------------------------
# anti-Bertini


def iter_scalar_reps(field, n: int, d: int):
    """Nonzero forms of degree d up to scalar: first nonzero coefficient is 1."""
    nmono = comb(n + d, n)
    q = field.q
    for lead in range(nmono):
        free = nmono - lead - 1
        for t in range(q ** free):
            coeffs = [0] * nmono
            coeffs[lead] = 1
            tt = t
            for j in range(lead + 1, nmono):
                coeffs[j] = tt % q
                tt //= q
            yield HomogPoly(field, n, d, tuple(coeffs))


def count_scalar_reps(field, n: int, d_max: int) -> int:
    q = field.q
    return sum((q ** comb(n + d, n) - 1) // (q - 1) for d in range(1, d_max + 1))


def verify_anti_bertini(x: SubschemeSpec, d_max: int, witness_bound: int = 2,
                        budget: int = 10 ** 5):
    """Check every section of degree <= d_max (up to scalar) is singular on X.

    Returns AllSingular with one witness point per section, or the first
    section whose bounded smoothness check came back Smooth.
    """
    field, n = x.field, x.n
    total = count_scalar_reps(field, n, d_max)
    if total > budget:
        raise BudgetExceededError(f"{total} candidate sections exceed the budget {budget}")
    witnesses = []
    for d in range(1, d_max + 1):
        for g in iter_scalar_reps(field, n, d):
            verdict = sm.is_smooth_intersection(g, x, bound=witness_bound)
            if isinstance(verdict, sm.SingularAt):
                witnesses.append((g, verdict.point))
            else:
                return CounterexampleFound(g, verdict)
    return AllSingular(tuple(witnesses))


def anti_bertini_search(q: int, n: int, d: int, dx_range, budget: int, seed):
    """Constructive anti-Bertini recipe: pick a point on each low-degree
    section, force X tangent there (or just through singular section points),
    then search dx_range for a smooth X passing verify_anti_bertini."""
    field = field_from_order(q)
    pn = proj_space(field, n)
    w1 = field_extend(field, 1)
    sections = []
    for dd in range(1, d + 1):
        sections.extend(iter_scalar_reps(field, n, dd))

    # choose pairwise distinct marked points, one per section (backtracking)
    candidates = []
    for g in sections:
        hg = SubschemeSpec(field, n, n - 1, (g,), ())
        cands = [cp for e in (1, 2) for cp in closed_points(hg, e)]
        if not cands:
            return NotFoundWithinBudget({}, (f"no low-degree point on {g}",))
        candidates.append(cands)

    assignment = [None] * len(sections)

    def assign(i, pool, used):
        if i == len(pool):
            return True
        for cp in pool[i]:
            key = (cp.degree, cp.rep.coords)
            if key in used:
                continue
            used.add(key)
            assignment[i] = cp
            if assign(i + 1, pool, used):
                return True
            used.remove(key)
        return False

    # prefer an all-rational system of distinct representatives
    rational_pool = [[cp for cp in c if cp.degree == 1] for c in candidates]
    if not (all(rational_pool) and assign(0, rational_pool, set())):
        if not assign(0, candidates, set()):
            return NotFoundWithinBudget({}, ("no system of distinct marked points found",))

    order1, tangent = [], []
    for g, cp in zip(sections, assignment):
        w = field_extend(field, cp.degree)
        _, grad = chart_jet1(g, cp.rep.coords, cp.rep.lead, w)
        if any(grad):
            # the section is smooth here: force X tangent to it at this point
            tangent.append((cp, tuple(grad)))
        else:
            # the section is singular here: X through the point suffices
            order1.append(cp)

    field_n = field
    budget_left = budget
    tried = {}
    notes = []
    rng_counter = 10 ** 6  # separate stream region from find_section's candidates
    for dx in range(dx_range[0], dx_range[1] + 1):
        tried[dx] = 0
        z = _jet_scheme_for(field_n, n, order1, tangent)
        report = sieve.jet_map_rank(z, dx)
        if not report.surjective:
            notes.append(f"dx={dx}: jet map rank {report.rank} < {report.dims[1]}, skipped")
            continue
        rows, rhs_for, lambda_space = _condition_system(field_n, n, dx, order1, tangent)
        nmono = comb(n + dx, n)
        kernel = linalg.nullspace(w1, rows, nmono)
        for lambdas in product(*lambda_space) if lambda_space else [()]:
            particular = linalg.solve(w1, rows, rhs_for(lambdas))
            if particular is None:
                continue
            rng = sieve.trial_rng(seed, rng_counter)
            rng_counter += 1
            for vec in _iter_candidates(w1, particular, kernel, budget_left, rng):
                if budget_left <= 0:
                    break
                if not any(vec):
                    continue
                F = HomogPoly(field_n, n, dx, tuple(vec))
                budget_left -= 1
                tried[dx] += 1
                verdict = sm.is_smooth_intersection(F, pn,
                                                    bound=config.SEARCH_SMOOTH_BOUND)
                if not isinstance(verdict, sm.Smooth):
                    continue
                xf = SubschemeSpec(field_n, n, n - 1, (F,), ())
                outcome = verify_anti_bertini(xf, d)
                if isinstance(outcome, AllSingular):
                    integ = sm.geometrically_integral(F, budget=2000)
                    checked = (f"X smooth up to degree {verdict.checked_bound}",
                               f"all {len(outcome.witnesses)} sections of degree <= {d} singular",
                               f"integrality: {type(integ).__name__}")
                    return Found(F, dx, verdict, checked)
            if budget_left <= 0:
                break
        if budget_left <= 0:
            notes.append(f"budget exhausted at dx={dx}")
            break
    return NotFoundWithinBudget(tried, tuple(notes))
