"""Smoothness oracle for hypersurface sections H_f intersected with X.

A point P of X is singular on the section iff f vanishes at P and the
stacked chart-affine Jacobian of (closed generators, f) has rank below
n - m + 1.  The oracle scans all closed points of degree <= B by walking
raw F_{q^e}-points for e = 1..B (every degree k <= B divides some scanned
level, so the scan covers each closed point at least once); witnesses are
therefore minimal in (degree, lexicographic) order.

For X = P^n and open subschemes of it, a finite singular locus has degree
at most d(d-1)^(n-1) (Bezout over f and n-1 partials), so scanning up to
that bound is certified exact; general X only gets bounded verification.

Per-point monomial evaluation rows are precomputed once per (X, d, B) and
dotted with each candidate's coefficient vector; over F_2 the rows are
packed into bit planes so a dot product is one popcount per plane.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

from . import config, linalg
from .errors import UnsupportedXError, NotSingularHereError, XNotValidatedError
from .geometry import (
    ClosedPoint,
    SubschemeSpec,
    ValidUpTo,
    closed_point_of,
    iter_points,
    validate_smooth,
)
from .gf import field_extend
from .mpoly import HomogPoly, chart_jet1, chart_rows, monomials, poly_jet2, poly_mul_raw


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Smooth:
    checked_bound: int
    exact: bool


@dataclass(frozen=True)
class SingularAt:
    point: ClosedPoint


@dataclass(frozen=True)
class IsWholeSpace:
    pass


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class NonNode:
    degenerate_quadratic_part: bool  # True when the quadratic part vanishes entirely


@dataclass(frozen=True)
class GeometricallyIntegral:
    pass


@dataclass(frozen=True)
class ReducibleOver:
    e: int
    factor_degrees: tuple
    witness: tuple  # (g coeffs over F_{q^e}, h coeffs over F_{q^e})


@dataclass(frozen=True)
class IntegralityUnknown:
    budget_note: str


@dataclass(frozen=True)
class PositiveDim:
    witness_e: int


@dataclass(frozen=True)
class FiniteUpTo:
    bound: int


# ---------------------------------------------------------------------------
# validation cache

_validated: dict = {}


def require_validated(x: SubschemeSpec, bound: int) -> None:
    """Validate X smooth up to bound (cached); raise XNotValidated on failure."""
    if _validated.get(x, 0) >= bound:
        return
    verdict = validate_smooth(x, bound)
    if not isinstance(verdict, ValidUpTo):
        raise XNotValidatedError(f"{x!r} failed smoothness validation: {verdict}")
    _validated[x] = bound


def certified_bound(x: SubschemeSpec, d: int):
    """Bezout bound for a finite singular locus, or None when not certified."""
    if x.closed_gens:
        return None
    return d * (d - 1) ** (x.n - 1)


def max_feasible_degree(x: SubschemeSpec) -> int:
    q = x.field.q
    bits = config.max_field_bits()
    e = 1
    while q ** (e + 1) <= (1 << bits):
        e += 1
    return e


# ---------------------------------------------------------------------------
# the precomputed point-scan engine


class _Level:
    """All raw F_{q^e}-points of X with evaluation rows for one degree d."""

    __slots__ = ("e", "w", "emb", "points", "packed")

    def __init__(self, x: SubschemeSpec, d: int, e: int):
        self.e = e
        w = field_extend(x.field, e)
        self.w = w
        self.emb = w.embed
        target = x.n - x.m
        pts = []
        packed = x.field.q == 2
        self.packed = packed
        for pt in iter_points(x, e):
            vrow, grows = chart_rows(x.n, d, pt.coords, pt.lead, w)
            if x.closed_gens:
                jac = [list(chart_jet1(g, pt.coords, pt.lead, w)[1]) for g in x.closed_gens]
                ech = linalg.echelon(w, jac)
                assert len(ech) == target, "X not smooth at a scanned point"
            else:
                ech = None
            if packed:
                vplanes = _bit_planes(vrow, w.k)
                gplanes = [_bit_planes(gr, w.k) for gr in grows]
                pts.append((pt, vplanes, gplanes, ech))
            else:
                pts.append((pt, vrow, grows, ech))
        self.points = pts


def _bit_planes(row, k):
    planes = []
    for b in range(k):
        m = 0
        for j, v in enumerate(row):
            if (v >> b) & 1:
                m |= 1 << j
        planes.append(m)
    return planes


def _pdot(planes, fbits):
    acc = 0
    for b, m in enumerate(planes):
        acc |= ((m & fbits).bit_count() & 1) << b
    return acc


class SectionChecker:
    """Precomputed singularity tester for H_f on X at degrees 1..B."""

    def __init__(self, x: SubschemeSpec, d: int, bound: int):
        self.x = x
        self.d = d
        self.bound = bound
        self.levels = [_Level(x, d, e) for e in range(1, bound + 1)]
        self.packed = x.field.q == 2
        self.nmono = comb(x.n + d, x.n)

    def _fbits(self, f: HomogPoly) -> int:
        bits = 0
        for j, c in enumerate(f.coeffs):
            if c:
                bits |= 1 << j
        return bits

    def _nz(self, f: HomogPoly):
        return [(j, c) for j, c in enumerate(f.coeffs) if c]

    def _singular_in_level(self, level: _Level, fdata, collect=None):
        """First singular raw point, or all of them when collect is a list."""
        w = level.w
        first = None
        if self.packed:
            fbits = fdata
            for pt, vplanes, gplanes, ech in level.points:
                if _pdot(vplanes, fbits):
                    continue
                grad = [_pdot(pl, fbits) for pl in gplanes]
                if ech is None:
                    singular = not any(grad)
                else:
                    singular = not any(linalg.reduce_vector(w, ech, grad))
                if singular:
                    if collect is None:
                        return pt
                    collect.append(pt)
                    if first is None:
                        first = pt
            return first
        nz = fdata
        emb = level.emb
        for pt, vrow, grows, ech in level.points:
            acc = 0
            for j, c in nz:
                v = vrow[j]
                if v:
                    acc = w.add(acc, w.mul(emb[c], v))
            if acc:
                continue
            grad = []
            for gr in grows:
                g = 0
                for j, c in nz:
                    v = gr[j]
                    if v:
                        g = w.add(g, w.mul(emb[c], v))
                grad.append(g)
            if ech is None:
                singular = not any(grad)
            else:
                singular = not any(linalg.reduce_vector(w, ech, grad))
            if singular:
                if collect is None:
                    return pt
                collect.append(pt)
                if first is None:
                    first = pt
        return first

    def _fdata(self, f: HomogPoly):
        return self._fbits(f) if self.packed else self._nz(f)

    def first_singular(self, f: HomogPoly):
        """Least-degree, lexicographically-least singular closed point, if any."""
        fd = self._fdata(f)
        for level in self.levels:
            pt = self._singular_in_level(level, fd)
            if pt is not None:
                return closed_point_of(pt, self.x.field)
        return None

    def is_singular(self, f: HomogPoly) -> bool:
        fd = self._fdata(f)
        return any(self._singular_in_level(level, fd) is not None for level in self.levels)

    def singular_closed_points(self, f: HomogPoly) -> list:
        fd = self._fdata(f)
        seen = {}
        for level in self.levels:
            raw = []
            self._singular_in_level(level, fd, collect=raw)
            for pt in raw:
                cp = closed_point_of(pt, self.x.field)
                seen[(cp.degree, cp.rep.coords)] = cp
        return [seen[k] for k in sorted(seen)]

    def singular_raw_count(self, f: HomogPoly, e: int) -> int:
        raw = []
        self._singular_in_level(self.levels[e - 1], self._fdata(f), collect=raw)
        return len(raw)


@lru_cache(maxsize=16)
def get_checker(x: SubschemeSpec, d: int, bound: int) -> SectionChecker:
    return SectionChecker(x, d, bound)


# ---------------------------------------------------------------------------
# public operations


def singular_points(f: HomogPoly, x: SubschemeSpec, bound: int) -> list:
    """All closed points of X of degree <= bound singular on H_f."""
    if f.is_zero:
        raise ValueError("f = 0 cuts out the whole space; no point list is meaningful")
    require_validated(x, bound)
    return get_checker(x, f.d, bound).singular_closed_points(f)


def is_smooth_intersection(f: HomogPoly, x: SubschemeSpec, bound: int | None = None):
    """Smoothness verdict for H_f on X, bounded or certified-exact.

    The empty intersection is smooth; f = 0 yields IsWholeSpace when X has a
    low-degree point (the section is all of X, of dimension m, not m-1).
    """
    probe = bound if bound is not None else config.DEFAULT_SMOOTH_BOUND
    if f.is_zero:
        for e in range(1, max(probe, 2) + 1):
            if next(iter_points(x, e), None) is not None:
                return IsWholeSpace()
        return Smooth(max(probe, 2), False)
    cert = certified_bound(x, f.d)
    if bound is None:
        if cert is not None:
            feasible = max_feasible_degree(x)
            bound = min(cert, feasible)
        else:
            bound = config.DEFAULT_SMOOTH_BOUND
    exact = cert is not None and bound >= cert
    require_validated(x, max(bound, 1))
    if bound < 1:
        return Smooth(bound, exact)
    witness = get_checker(x, f.d, bound).first_singular(f)
    if witness is not None:
        return SingularAt(witness)
    return Smooth(bound, exact)


def classify_singularity(f: HomogPoly, x: SubschemeSpec, p: ClosedPoint):
    """Node test from the chart-local quadratic part; plane curves only."""
    if not (x.n == 2 and x.is_full_proj_space):
        raise UnsupportedXError("node classification is implemented for X = P^2 only")
    w = field_extend(x.field, p.degree)
    jet = poly_jet2(f, p.rep, w)
    if jet.value != 0 or any(jet.gradient):
        raise NotSingularHereError(f"{p.rep} is not a singular point of this section")
    a = jet.quad_entry(0, 0)
    b = jet.quad_entry(0, 1)
    c = jet.quad_entry(1, 1)
    if x.field.p == 2:
        nondegenerate = b != 0
    else:
        four = 4 % x.field.p
        disc = w.sub(w.mul(b, b), w.mul(four, w.mul(a, c)))
        nondegenerate = disc != 0
    if nondegenerate:
        return Node()
    return NonNode(degenerate_quadratic_part=(a == 0 and b == 0 and c == 0))


def positive_dim_singular_locus(f: HomogPoly, x: SubschemeSpec, bound: int):
    """Finite-or-not test: a finite locus has at most cap geometric points."""
    cap = certified_bound(x, f.d)
    if cap is None:
        raise UnsupportedXError(
            "the zero-dimensional cap is certified only when X has no closed generators")
    if f.is_zero:
        raise ValueError("f = 0: the singular locus is all of X")
    require_validated(x, bound)
    checker = get_checker(x, f.d, bound)
    for e in range(1, bound + 1):
        if checker.singular_raw_count(f, e) > cap:
            return PositiveDim(e)
    return FiniteUpTo(bound)


def geometrically_integral(f: HomogPoly, budget: int = 10000):
    """Desk-scale factor search: f = g*h with coefficients in F_{q^e}, e <= d.

    Candidates g run over lead-normalized forms (first nonzero coefficient 1
    in canonical monomial order) of degree i <= d/2; divisibility is a linear
    solve for h.  Exhausting the whole space certifies geometric integrality;
    hitting the budget returns Unknown.
    """
    if f.d < 1:
        raise ValueError("integrality test needs deg f >= 1")
    n, d = f.n, f.d
    tried = 0
    for e in range(1, d + 1):
        try:
            w = field_extend(f.field, e)
        except Exception:
            return IntegralityUnknown(f"working field F_q^{e} exceeds the size limit")
        emb = w.embed
        femb = [emb[c] for c in f.coeffs]
        for i in range(1, d // 2 + 1):
            nmono_g = comb(n + i, n)
            mono_g = monomials(n, i)
            mono_h = monomials(n, d - i)
            idx_d = {m: k for k, m in enumerate(monomials(n, d))}
            for lead in range(nmono_g):
                free = nmono_g - lead - 1
                for t in range(w.order ** free):
                    g = [0] * nmono_g
                    g[lead] = 1
                    tt = t
                    for j in range(lead + 1, nmono_g):
                        g[j] = tt % w.order
                        tt //= w.order
                    tried += 1
                    if tried > budget:
                        return IntegralityUnknown(
                            f"budget {budget} exhausted at e={e}, factor degree {i}")
                    rows = [[0] * len(mono_h) for _ in range(len(femb))]
                    for ga, gc in enumerate(g):
                        if gc:
                            ma = mono_g[ga]
                            for hb, mb in enumerate(mono_h):
                                r = idx_d[tuple(u + v for u, v in zip(ma, mb))]
                                rows[r][hb] = w.add(rows[r][hb], gc)
                    h = linalg.solve(w, rows, femb)
                    if h is not None and any(h):
                        if poly_mul_raw(n, i, tuple(g), d - i, tuple(h), w) == tuple(femb):
                            return ReducibleOver(e, (i, d - i), (tuple(g), tuple(h)))
    return GeometricallyIntegral()
