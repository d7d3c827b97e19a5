"""Zeta values and density predictions, all in exact rational arithmetic.

The inverse zeta value zeta_X(s)^-1 is the Euler product over closed points
prod (1 - q^(-s deg P)); truncating at degree < r gives the computable
approximation prod_{e<r} (1 - q^(-se))^(a_e) from the closed-point counts
a_e.  Closed forms are used for the named spaces P^n and A^n.  Floats are
derived views only; every value is carried as a Fraction.

No rigorous tail bound is claimed for general X: the truncation constant in
the geometric tail is existential, so reports carry stabilization deltas
instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DivergentError
from .geometry import SubschemeSpec, closed_counts, count_sequence


@dataclass(frozen=True)
class ZetaApprox:
    """Truncated inverse zeta value: prod_{e<r} (1 - q^(-se))^(a_e)."""

    s: int
    r: int
    value: Fraction
    terms: tuple  # the a_e used, e = 1..r-1
    stabilization: float | None  # max relative change over the last two increments

    @property
    def float_value(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class DensityPrediction:
    value: Fraction
    provenance: str  # "closed_form" or "truncated"
    r: int | None = None
    jet_factor: Fraction | None = None
    stabilization: float | None = None

    @property
    def float_value(self) -> float:
        return float(self.value)


def _truncation_values(q: int, s: int, a: list) -> list:
    """Partial products v_r for r = 1..len(a)+1 (v_1 is the empty product)."""
    vals = [Fraction(1)]
    acc = Fraction(1)
    for e, ae in enumerate(a, start=1):
        acc *= (1 - Fraction(1, q ** (s * e))) ** ae
        vals.append(acc)
    return vals


def zeta_inv_truncated(x: SubschemeSpec, s: int, r: int) -> ZetaApprox:
    """Exact rational truncation of zeta_X(s)^-1 over points of degree < r."""
    if s < 1:
        raise DivergentError("zeta argument must be a positive integer")
    if s <= x.m:
        raise DivergentError(
            f"truncated product refused at s = {s} <= dim X = {x.m}: no convergence")
    if r < 1:
        raise ValueError("truncation degree r must be at least 1")
    a = closed_counts(count_sequence(x, r - 1)) if r > 1 else []
    vals = _truncation_values(x.field.q, s, a)
    stab = _stabilization(vals)
    return ZetaApprox(s, r, vals[-1], tuple(a), stab)


def _stabilization(vals: list) -> float | None:
    rels = []
    for i in range(max(1, len(vals) - 2), len(vals)):
        prev, cur = vals[i - 1], vals[i]
        rels.append(float(abs(cur - prev) / cur))
    return max(rels) if rels else None


def zeta_inv_pn(n: int, q: int, s: int) -> Fraction:
    """zeta_{P^n}(s)^-1 = prod_{i=0}^{n} (1 - q^(i-s)); needs s >= n+1."""
    if s <= n:
        raise DivergentError(f"zeta_P^{n} diverges at s = {s} <= {n}")
    out = Fraction(1)
    for i in range(n + 1):
        out *= 1 - Fraction(1, q ** (s - i))
    return out


def zeta_inv_an(n: int, q: int, s: int) -> Fraction:
    """zeta_{A^n}(s)^-1 = 1 - q^(n-s); needs s >= n+1."""
    if s <= n:
        raise DivergentError(f"zeta_A^{n} diverges at s = {s} <= {n}")
    return 1 - Fraction(1, q ** (s - n))


def _named_space(x: SubschemeSpec):
    """Recognize P^n and A^n specs; returns ("P"|"A", n) or None."""
    if x.is_full_proj_space and x.m == x.n:
        return ("P", x.n)
    if not x.closed_gens and x.m == x.n and len(x.open_nonvanishing) == 1:
        h = x.open_nonvanishing[0]
        if h.d == 1 and h.coeffs[0] == 1 and not any(h.coeffs[1:]):
            return ("A", x.n)
    return None


def zeta_inv_closed_form(x: SubschemeSpec, s: int) -> Fraction:
    named = _named_space(x)
    if named is None:
        raise ValueError("no closed form for this space; use zeta_inv_truncated")
    kind, n = named
    return zeta_inv_pn(n, x.field.q, s) if kind == "P" else zeta_inv_an(n, x.field.q, s)


def predict_density(x: SubschemeSpec, r: int | None = None) -> DensityPrediction:
    """Theorem-level prediction zeta_X(m+1)^-1: closed form for named spaces,
    truncated at r otherwise."""
    s = x.m + 1
    if _named_space(x) is not None:
        return DensityPrediction(zeta_inv_closed_form(x, s), "closed_form")
    if r is None:
        r = 6
    za = zeta_inv_truncated(x, s, r)
    return DensityPrediction(za.value, "truncated", r=r, stabilization=za.stabilization)


def predict_density_with_jets(u: SubschemeSpec, z, t_size: int, h0_size: int,
                              r: int | None = None) -> DensityPrediction:
    """Jet-conditioned prediction (#T / #H^0) * zeta_U(m+1)^-1."""
    if not 0 <= t_size <= h0_size:
        raise ValueError("need 0 <= #T <= #H^0")
    if z is not None and hasattr(z, "h0_size") and z.h0_size() != h0_size:
        raise ValueError("h0_size does not match the jet scheme")
    base = predict_density(u, r)
    factor = Fraction(t_size, h0_size)
    return DensityPrediction(factor * base.value, base.provenance, r=base.r,
                             jet_factor=factor, stabilization=base.stabilization)


def tail_report(x: SubschemeSpec, s: int, r_max: int):
    """Truncations for r = 2..r_max plus successive decrements (all exact)."""
    if r_max < 2:
        raise ValueError("r_max must be at least 2")
    if s <= x.m:
        raise DivergentError(f"truncated product refused at s = {s} <= dim X = {x.m}")
    a = closed_counts(count_sequence(x, r_max - 1))
    vals = _truncation_values(x.field.q, s, a)
    approxes = []
    for r in range(2, r_max + 1):
        stab = _stabilization(vals[: r])
        approxes.append(ZetaApprox(s, r, vals[r - 1], tuple(a[: r - 1]), stab))
    deltas = [approxes[i].value - approxes[i + 1].value for i in range(len(approxes) - 1)]
    return approxes, deltas


@dataclass(frozen=True)
class SquarefreeReport:
    limit: int
    count: int
    fraction: Fraction
    reference: float  # 6/pi^2
    abs_error: float


def squarefree_integer_density(limit: int) -> SquarefreeReport:
    """Fraction of squarefree n in [1, limit], against zeta(2)^-1 = 6/pi^2."""
    if limit < 1:
        raise ValueError("limit must be at least 1")
    marked = bytearray(limit + 1)
    k = 2
    while k * k <= limit:
        step = k * k
        for m in range(step, limit + 1, step):
            marked[m] = 1
        k += 1
    count = sum(1 for n in range(1, limit + 1) if not marked[n])
    frac = Fraction(count, limit)
    ref = 6 / math.pi ** 2
    return SquarefreeReport(limit, count, frac, ref, abs(float(frac) - ref))
