"""Dense homogeneous multivariate polynomials over F_q.

Forms of degree d in x_0..x_n are coefficient vectors against the monomial
table of that degree, in graded-colexicographic order (x_0^d first, x_n^d
last).  The zero form is a legal member of S_d.  Coefficients live in the
base field F_q; evaluation embeds them into a caller-supplied working field.

Enumeration of S_d walks coefficient vectors as base-q counters and supports
contiguous sharding.  Taylor jets are computed by truncated
shift-substitution in the chart of the point's smallest nonvanishing
coordinate, which sidesteps characteristic-2 Hessian pitfalls.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from math import comb

from . import config
from .errors import (
    BadVariableIndexError,
    BudgetExceededError,
    CoefficientNotInFieldError,
    FieldMismatchError,
    NotHomogeneousError,
    PolySyntaxError,
)
from .gf import FieldDesc, WorkingField, elem_str, field_extend, gpoly_parse, _undigits


@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple:
    """Exponent vectors of degree d in n+1 variables, graded-colex ascending."""
    if d == 0:
        return (tuple([0] * (n + 1)),)
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining + 1):
            rec(prefix + (e,), remaining - e, slots - 1)

    rec((), d, n + 1)
    out.sort(key=lambda t: t[::-1])
    assert len(out) == comb(n + d, n)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(n: int, d: int) -> dict:
    return {m: i for i, m in enumerate(monomials(n, d))}


@lru_cache(maxsize=None)
def affine_monomials(nvars: int, dmax: int) -> tuple:
    """Exponent vectors of total degree <= dmax in nvars variables."""
    out = []
    for d in range(dmax + 1):
        for m in monomials(nvars - 1, d) if nvars >= 1 else ((),):
            out.append(m)
    return tuple(out)


@lru_cache(maxsize=None)
def affine_monomial_index(nvars: int, dmax: int) -> dict:
    return {m: i for i, m in enumerate(affine_monomials(nvars, dmax))}


@dataclass(frozen=True)
class HomogPoly:
    """A degree-d form in x_0..x_n with dense F_q coefficients."""

    field: FieldDesc
    n: int
    d: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != comb(self.n + self.d, self.n):
            raise ValueError("coefficient vector length does not match (n, d)")

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __str__(self):
        return poly_str(self)

    def __repr__(self):
        return f"HomogPoly({self.field!r}, d={self.d}, {poly_str(self)})"


@dataclass(frozen=True)
class AffinePoly:
    """Dehomogenization of a form: total degree <= dmax in the chart variables."""

    field: FieldDesc
    nvars: int
    dmax: int
    coeffs: tuple
    var_ids: tuple  # ambient variable indices, ascending

    def eval(self, coords, w: WorkingField):
        if w.base != self.field:
            raise FieldMismatchError("working field does not extend the coefficient field")
        emb = w.embed
        pw = [[1] * (self.dmax + 1) for _ in range(self.nvars)]
        for i, c in enumerate(coords):
            for e in range(1, self.dmax + 1):
                pw[i][e] = w.mul(pw[i][e - 1], c)
        acc = 0
        for m, c in zip(affine_monomials(self.nvars, self.dmax), self.coeffs):
            if c:
                t = emb[c]
                for i, e in enumerate(m):
                    if e:
                        t = w.mul(t, pw[i][e])
                acc = w.add(acc, t)
        return acc

    def __str__(self):
        parts = []
        for m, c in zip(affine_monomials(self.nvars, self.dmax), self.coeffs):
            if c:
                parts.append(_term_str(self.field, c, m, self.var_ids))
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class Jet2:
    """Order-2 Taylor data of a chart dehomogenization at a point.

    gradient and quad are indexed by the chart variables (ambient indices
    with the chart coordinate removed, ascending); quad holds coefficients
    of u_i*u_j for i <= j in row-major pair order.
    """

    value: int
    gradient: tuple
    quad: tuple
    chart: int
    var_ids: tuple

    def quad_entry(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        nv = len(self.var_ids)
        idx = i * nv - i * (i - 1) // 2 + (j - i)
        return self.quad[idx]


def zero_poly(field: FieldDesc, n: int, d: int) -> HomogPoly:
    return HomogPoly(field, n, d, tuple([0] * comb(n + d, n)))


def poly_from_index(field: FieldDesc, n: int, d: int, idx: int) -> HomogPoly:
    q = field.q
    out = []
    for _ in range(comb(n + d, n)):
        out.append(idx % q)
        idx //= q
    return HomogPoly(field, n, d, tuple(out))


def s_d_count(field: FieldDesc, n: int, d: int) -> int:
    return field.q ** comb(n + d, n)


def s_d_enumerate(field: FieldDesc, n: int, d: int, shard=None, budget=None):
    """All of S_d in canonical order; shard=(k, K) gives a contiguous slice."""
    total = s_d_count(field, n, d)
    cap = budget if budget is not None else config.EXHAUSTIVE_BUDGET
    if total > cap:
        raise BudgetExceededError(f"|S_d| = {total} exceeds the exhaustive budget {cap}")
    lo, hi = 0, total
    if shard is not None:
        k, K = shard
        lo, hi = k * total // K, (k + 1) * total // K
    for idx in range(lo, hi):
        yield poly_from_index(field, n, d, idx)


def poly_sample(field: FieldDesc, n: int, d: int, rng) -> HomogPoly:
    """Coefficients independently uniform over F_q, drawn from rng."""
    N = comb(n + d, n)
    q = field.q
    if q == 2:
        bits = rng.getrandbits(N)
        return HomogPoly(field, n, d, tuple((bits >> i) & 1 for i in range(N)))
    return HomogPoly(field, n, d, tuple(rng.randrange(q) for _ in range(N)))


def poly_derive(f: HomogPoly, i: int) -> HomogPoly:
    """Formal partial derivative with respect to x_i, degree d-1."""
    if not 0 <= i <= f.n:
        raise ValueError(f"variable index {i} out of range")
    if f.d == 0:
        return zero_poly(f.field, f.n, 0)
    p = f.field.p
    w1 = field_extend(f.field, 1)
    tgt = monomial_index(f.n, f.d - 1)
    out = [0] * comb(f.n + f.d - 1, f.n)
    for m, c in zip(monomials(f.n, f.d), f.coeffs):
        if c and m[i]:
            s = m[i] % p
            if s:
                m2 = m[:i] + (m[i] - 1,) + m[i + 1:]
                j = tgt[m2]
                out[j] = w1.add(out[j], w1.mul(c, s))
    return HomogPoly(f.field, f.n, f.d - 1, tuple(out))


def mul_by_var(f: HomogPoly, i: int) -> HomogPoly:
    tgt = monomial_index(f.n, f.d + 1)
    out = [0] * comb(f.n + f.d + 1, f.n)
    for m, c in zip(monomials(f.n, f.d), f.coeffs):
        if c:
            m2 = m[:i] + (m[i] + 1,) + m[i + 1:]
            out[tgt[m2]] = c
    return HomogPoly(f.field, f.n, f.d + 1, tuple(out))


def scale(f: HomogPoly, c: int) -> HomogPoly:
    w1 = field_extend(f.field, 1)
    return HomogPoly(f.field, f.n, f.d, tuple(w1.mul(c, x) for x in f.coeffs))


def poly_add(f: HomogPoly, g: HomogPoly) -> HomogPoly:
    if (f.field, f.n, f.d) != (g.field, g.n, g.d):
        raise FieldMismatchError("cannot add forms of different (field, n, d)")
    w1 = field_extend(f.field, 1)
    return HomogPoly(f.field, f.n, f.d, tuple(w1.add(a, b) for a, b in zip(f.coeffs, g.coeffs)))


def poly_dehomogenize(f: HomogPoly, j: int) -> AffinePoly:
    """Substitute x_j = 1; the n remaining variables keep their names."""
    if not 0 <= j <= f.n:
        raise ValueError(f"chart index {j} out of range")
    var_ids = tuple(i for i in range(f.n + 1) if i != j)
    idx = affine_monomial_index(f.n, f.d)
    out = [0] * len(affine_monomials(f.n, f.d))
    w1 = field_extend(f.field, 1)
    for m, c in zip(monomials(f.n, f.d), f.coeffs):
        if c:
            key = tuple(m[i] for i in var_ids)
            k = idx[key]
            out[k] = w1.add(out[k], c)
    return AffinePoly(f.field, f.n, f.d, tuple(out), var_ids)


def rehomogenize(g: AffinePoly, d: int, j: int) -> HomogPoly:
    """Inverse of poly_dehomogenize by total degree d in the chart x_j."""
    n = g.nvars
    tgt = monomial_index(n, d)
    out = [0] * comb(n + d, n)
    for m, c in zip(affine_monomials(n, g.dmax), g.coeffs):
        if c:
            total = sum(m)
            amb = [0] * (n + 1)
            for vid, e in zip(g.var_ids, m):
                amb[vid] = e
            amb[j] = d - total
            out[tgt[tuple(amb)]] = c
    return HomogPoly(g.field, n, d, tuple(out))


def _power_tables(coords, d: int, w: WorkingField):
    pw = []
    for c in coords:
        row = [1] * (d + 1)
        for e in range(1, d + 1):
            row[e] = w.mul(row[e - 1], c)
        pw.append(row)
    return pw


def poly_eval(f: HomogPoly, coords, w: WorkingField) -> int:
    """Value of f at a point with coordinates in the working field w."""
    if w.base != f.field:
        raise FieldMismatchError("working field does not extend the coefficient field")
    if len(coords) != f.n + 1:
        raise ValueError("point must have n+1 coordinates")
    emb = w.embed
    pw = _power_tables(coords, f.d, w)
    acc = 0
    for m, c in zip(monomials(f.n, f.d), f.coeffs):
        if c:
            t = emb[c]
            for i, e in enumerate(m):
                if e:
                    v = pw[i][e]
                    if v == 0:
                        t = 0
                        break
                    t = w.mul(t, v)
            acc = w.add(acc, t)
    return acc


def chart_jet1(f: HomogPoly, coords, lead: int, w: WorkingField):
    """(value, gradient) of the chart-`lead` dehomogenization at a normalized point."""
    if w.base != f.field:
        raise FieldMismatchError("working field does not extend the coefficient field")
    emb = w.embed
    p = f.field.p
    pw = _power_tables(coords, f.d, w)
    chart_vars = [i for i in range(f.n + 1) if i != lead]
    value = 0
    grad = [0] * f.n
    for m, c in zip(monomials(f.n, f.d), f.coeffs):
        if not c:
            continue
        base = emb[c]
        # value of the dehomogenized monomial
        t = base
        for i in chart_vars:
            e = m[i]
            if e:
                v = pw[i][e]
                if v == 0:
                    t = 0
                    break
                t = w.mul(t, v)
        value = w.add(value, t)
        # chart partials
        for gi, i in enumerate(chart_vars):
            e = m[i]
            s = e % p
            if e == 0 or s == 0:
                continue
            t = w.mul(base, s) if s != 1 else base
            t = w.mul(t, pw[i][e - 1]) if e > 1 else t
            if t == 0:
                continue
            for k in chart_vars:
                if k == i:
                    continue
                ek = m[k]
                if ek:
                    v = pw[k][ek]
                    if v == 0:
                        t = 0
                        break
                    t = w.mul(t, v)
            grad[gi] = w.add(grad[gi], t)
    return value, tuple(grad)


def poly_jet2(f: HomogPoly, point, w: WorkingField) -> Jet2:
    """Order-2 jet at a normalized projective point (value, gradient, quadratic part)."""
    if w.base != f.field:
        raise FieldMismatchError("working field does not extend the coefficient field")
    coords, lead = point.coords, point.lead
    p = f.field.p
    emb = w.embed
    pw = _power_tables(coords, f.d, w)
    chart_vars = [i for i in range(f.n + 1) if i != lead]
    nv = len(chart_vars)

    def partial_mono(m, drop):
        # product over chart vars of coords^(m[i] - drop.get(i, 0)), with the
        # multinomial factor from the dropped orders
        t = 1
        for i in chart_vars:
            e = m[i] - drop.get(i, 0)
            if e:
                v = pw[i][e]
                if v == 0:
                    return 0
                t = w.mul(t, v)
        return t

    value = 0
    grad = [0] * nv
    quad = [0] * (nv * (nv + 1) // 2)
    for m, c in zip(monomials(f.n, f.d), f.coeffs):
        if not c:
            continue
        base = emb[c]
        t = partial_mono(m, {})
        if t:
            value = w.add(value, w.mul(base, t))
        for gi, i in enumerate(chart_vars):
            s = m[i] % p
            if m[i] == 0 or s == 0:
                continue
            t = partial_mono(m, {i: 1})
            if t:
                grad[gi] = w.add(grad[gi], w.mul(w.mul(base, s), t))
        for gi, i in enumerate(chart_vars):
            for gj in range(gi, nv):
                j = chart_vars[gj]
                if i == j:
                    s = comb(m[i], 2) % p if m[i] >= 2 else 0
                    drop = {i: 2}
                else:
                    s = (m[i] * m[j]) % p if m[i] and m[j] else 0
                    drop = {i: 1, j: 1}
                if not s:
                    continue
                t = partial_mono(m, drop)
                if t:
                    qidx = gi * nv - gi * (gi - 1) // 2 + (gj - gi)
                    quad[qidx] = w.add(quad[qidx], w.mul(w.mul(base, s), t))
    return Jet2(value, tuple(grad), tuple(quad), lead, tuple(chart_vars))


def chart_rows(n: int, d: int, coords, lead: int, w: WorkingField):
    """Per-monomial (value, chart gradient) evaluations at a normalized point.

    Returns (value_row, grad_rows) where value_row[k] is the chart value of
    monomial k and grad_rows[t][k] its t-th chart partial; dotting these rows
    with an embedded coefficient vector reproduces chart_jet1.
    """
    p = w.p
    pw = _power_tables(coords, d, w)
    chart_vars = [i for i in range(n + 1) if i != lead]
    value_row = []
    grad_rows = [[] for _ in chart_vars]
    for m in monomials(n, d):
        t = 1
        for i in chart_vars:
            e = m[i]
            if e:
                v = pw[i][e]
                if v == 0:
                    t = 0
                    break
                t = w.mul(t, v)
        value_row.append(t)
        for gi, i in enumerate(chart_vars):
            e = m[i]
            s = e % p
            if e == 0 or s == 0:
                grad_rows[gi].append(0)
                continue
            t = s
            if e > 1:
                t = w.mul(t, pw[i][e - 1])
            for k in chart_vars:
                if k != i and m[k]:
                    v = pw[k][m[k]]
                    if v == 0:
                        t = 0
                        break
                    t = w.mul(t, v)
            grad_rows[gi].append(t)
    return value_row, grad_rows


def poly_mul_raw(n: int, d1: int, c1, d2: int, c2, w: WorkingField) -> tuple:
    """Dense product of two coefficient vectors over the working field w."""
    tgt = monomial_index(n, d1 + d2)
    out = [0] * comb(n + d1 + d2, n)
    m2 = monomials(n, d2)
    for ma, a in zip(monomials(n, d1), c1):
        if a:
            for mb, b in zip(m2, c2):
                if b:
                    key = tuple(x + y for x, y in zip(ma, mb))
                    k = tgt[key]
                    out[k] = w.add(out[k], w.mul(a, b))
    return tuple(out)


# ---------------------------------------------------------------------------
# parsing and printing


def _term_str(field: FieldDesc, c: int, exps, var_ids) -> str:
    factors = []
    for vid, e in zip(var_ids, exps):
        if e == 1:
            factors.append(f"x{vid}")
        elif e > 1:
            factors.append(f"x{vid}^{e}")
    if not factors:
        return str(c) if c < field.p else f"[{elem_str(c, field.p, field.a)}]"
    if c == 1:
        return "*".join(factors)
    cs = str(c) if c < field.p else f"[{elem_str(c, field.p, field.a)}]"
    return cs + "*" + "*".join(factors)


def poly_str(f: HomogPoly) -> str:
    parts = []
    var_ids = tuple(range(f.n + 1))
    for m, c in zip(monomials(f.n, f.d), f.coeffs):
        if c:
            parts.append(_term_str(f.field, c, m, var_ids))
    return " + ".join(parts) if parts else "0"


def poly_parse(text: str, field: FieldDesc, n: int) -> HomogPoly:
    """Parse the polynomial grammar into canonical dense form.

    poly   := term ('+' term | '-' term)*
    term   := coeff ('*' factor)* | factor ('*' factor)*
    factor := 'x' INDEX ('^' EXP)?
    coeff  := INT | '[' gfpoly ']'
    """
    s = "".join(text.split())
    if not s:
        raise PolySyntaxError("empty polynomial", 0)
    w1 = field_extend(field, 1)
    terms = []  # (coeff elem, exps tuple, position)
    i = 0
    sign = 1
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        i = 1
    while i <= len(s):
        coeff, exps, i = _parse_term(s, i, field, w1, n)
        if sign == -1:
            coeff = w1.neg(coeff)
        terms.append((coeff, exps))
        if i >= len(s):
            break
        if s[i] not in "+-":
            raise PolySyntaxError(f"expected '+' or '-', found {s[i]!r}", i)
        sign = -1 if s[i] == "-" else 1
        i += 1
        if i >= len(s):
            raise PolySyntaxError("dangling sign", i)
    degs = {sum(e) for _, e in terms}
    if len(degs) > 1:
        a, b = sorted(degs)[:2]
        raise NotHomogeneousError(a, b)
    d = degs.pop()
    idx = monomial_index(n, d)
    out = [0] * comb(n + d, n)
    for coeff, exps in terms:
        k = idx[exps]
        out[k] = w1.add(out[k], coeff)
    return HomogPoly(field, n, d, tuple(out))


def _parse_int(s: str, i: int):
    j = i
    while j < len(s) and s[j].isdigit():
        j += 1
    if j == i:
        raise PolySyntaxError("expected an integer", i)
    return int(s[i:j]), j


def _parse_coeff(s: str, i: int, field: FieldDesc, w1):
    if s[i] == "[":
        j = s.find("]", i)
        if j < 0:
            raise PolySyntaxError("unterminated '['", i)
        inner = s[i + 1:j]
        coeffs = gpoly_parse(inner, field.p)
        if field.a == 1 and any(c for c in coeffs[1:]):
            raise CoefficientNotInFieldError(
                f"[{inner}] uses the generator g but the base field is prime", i)
        work = list(coeffs)
        mod = field.modulus
        k = field.a
        for t in range(len(work) - 1, k - 1, -1):
            c = work[t]
            if c:
                work[t] = 0
                for u in range(k):
                    work[t - k + u] = (work[t - k + u] - c * mod[u]) % field.p
        val = _undigits(work[:k], field.p)
        return val, j + 1
    v, j = _parse_int(s, i)
    return v % field.p, j


def _parse_factor(s: str, i: int, n: int):
    if i >= len(s) or s[i] != "x":
        raise PolySyntaxError("expected a variable factor", i)
    vid, j = _parse_int(s, i + 1)
    if vid > n:
        raise BadVariableIndexError(f"variable x{vid} exceeds x{n}", i)
    e = 1
    if j < len(s) and s[j] == "^":
        e, j = _parse_int(s, j + 1)
    return vid, e, j


def _parse_term(s: str, i: int, field: FieldDesc, w1, n: int):
    if i >= len(s):
        raise PolySyntaxError("empty term", i)
    exps = [0] * (n + 1)
    if s[i] == "x":
        coeff = 1
        vid, e, i = _parse_factor(s, i, n)
        exps[vid] += e
    else:
        coeff, i = _parse_coeff(s, i, field, w1)
    while i < len(s) and s[i] == "*":
        vid, e, i = _parse_factor(s, i + 1, n)
        exps[vid] += e
    return coeff, tuple(exps), i
