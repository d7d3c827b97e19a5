"""Quasiprojective subschemes of P^n and their points over F_{q^e}.

A subscheme is encoded as closed generators (cutting out the closure) plus a
disjunctive open condition: a point belongs to X when every closed generator
vanishes and, if the open list is nonempty, at least one listed form does
not vanish.  This covers A^n inside P^n, complements of finite sets, and all
the standard examples without a general ideal engine.

Projective points are normalized so the smallest nonvanishing coordinate is
1; enumeration walks coordinate tuples in lexicographic order against the
field's canonical element order (so the leading index descends from n to 0).
Closed points are Frobenius orbits, represented by their lexicographically
smallest member.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .errors import InconsistentCountsError
from .gf import FieldDesc, WorkingField, field_extend, field_from_order, field_make
from .mpoly import HomogPoly, chart_jet1, poly_eval, poly_parse
from . import linalg


@dataclass(frozen=True)
class SubschemeSpec:
    """X inside P^n: closed generators, open non-vanishing list, claimed dim m."""

    field: FieldDesc
    n: int
    m: int
    closed_gens: tuple
    open_nonvanishing: tuple
    name: str = ""

    def __post_init__(self):
        if not 0 <= self.m <= self.n:
            raise ValueError("claimed dimension m must satisfy 0 <= m <= n")
        for g in self.closed_gens + self.open_nonvanishing:
            if g.field != self.field or g.n != self.n:
                raise ValueError("all generators must share (field, n)")

    @property
    def is_full_proj_space(self) -> bool:
        return not self.closed_gens and not self.open_nonvanishing

    def __repr__(self):
        return self.name or (
            f"X(n={self.n}, m={self.m}, closed={[str(g) for g in self.closed_gens]},"
            f" open={[str(g) for g in self.open_nonvanishing]})"
        )


@dataclass(frozen=True)
class ProjPoint:
    """Normalized representative: coords[lead] = 1, zeros before lead."""

    e: int
    coords: tuple
    lead: int

    def key(self):
        return self.coords

    def __str__(self):
        return "(" + ":".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class ClosedPoint:
    """A Frobenius orbit of size `degree`, named by its smallest member."""

    degree: int
    rep: ProjPoint


@dataclass(frozen=True)
class ClosedPointData:
    N: tuple  # N[r-1] = #X(F_{q^r})
    a: tuple  # a[e-1] = number of closed points of degree e


def proj_space(field: FieldDesc, n: int) -> SubschemeSpec:
    return SubschemeSpec(field, n, n, (), (), name=f"P^{n}/{field!r}")


def affine_space(field: FieldDesc, n: int) -> SubschemeSpec:
    x0 = _coord_form(field, n, 0)
    return SubschemeSpec(field, n, n, (), (x0,), name=f"A^{n}/{field!r}")


def _coord_form(field: FieldDesc, n: int, i: int) -> HomogPoly:
    return poly_parse(f"x{i}", field, n)


def iter_points(x: SubschemeSpec, e: int):
    """Normalized F_{q^e}-points of X, in canonical (lexicographic) order."""
    w = field_extend(x.field, e)
    elems = range(w.order)
    gens = x.closed_gens
    opens = x.open_nonvanishing
    n = x.n
    for lead in range(n, -1, -1):
        prefix = (0,) * lead + (1,)
        for tail in product(elems, repeat=n - lead):
            coords = prefix + tail
            if gens and any(poly_eval(g, coords, w) != 0 for g in gens):
                continue
            if opens and all(poly_eval(h, coords, w) == 0 for h in opens):
                continue
            yield ProjPoint(e, coords, lead)


def points_over(x: SubschemeSpec, e: int) -> list:
    return list(iter_points(x, e))


@lru_cache(maxsize=None)
def count_points(x: SubschemeSpec, e: int) -> int:
    return sum(1 for _ in iter_points(x, e))


def count_sequence(x: SubschemeSpec, r_max: int) -> list:
    """N[r] = #X(F_{q^r}) for r = 1..r_max."""
    return [count_points(x, r) for r in range(1, r_max + 1)]


def mobius(k: int) -> int:
    if k == 1:
        return 1
    out = 1
    f = 2
    while f * f <= k:
        if k % f == 0:
            k //= f
            if k % f == 0:
                return 0
            out = -out
        f += 1
    if k > 1:
        out = -out
    return out


def closed_counts(N: list) -> list:
    """Mobius inversion: a[e] = (1/e) * sum_{d | e} mu(e/d) N[d]."""
    if not N:
        raise ValueError("need at least one rational count")
    a = []
    for e in range(1, len(N) + 1):
        s = sum(mobius(e // d) * N[d - 1] for d in range(1, e + 1) if e % d == 0)
        if s < 0 or s % e != 0:
            raise InconsistentCountsError(
                f"counts are not a closed-point profile at degree {e}: got {s}/{e}")
        a.append(s // e)
    return a


def closed_point_data(x: SubschemeSpec, r_max: int) -> ClosedPointData:
    N = count_sequence(x, r_max)
    return ClosedPointData(tuple(N), tuple(closed_counts(N)))


def frobenius_point(pt: ProjPoint, w: WorkingField) -> ProjPoint:
    return ProjPoint(pt.e, tuple(w.frobenius(c) for c in pt.coords), pt.lead)


def orbit(pt: ProjPoint, w: WorkingField) -> list:
    out = [pt]
    cur = frobenius_point(pt, w)
    while cur != pt:
        out.append(cur)
        cur = frobenius_point(cur, w)
    return out


def closed_point_of(pt: ProjPoint, x_field: FieldDesc) -> ClosedPoint:
    """The closed point through pt: degree = orbit size, rep = smallest member."""
    w = field_extend(x_field, pt.e)
    orb = orbit(pt, w)
    rep = min(orb, key=lambda r: r.coords)
    return ClosedPoint(len(orb), rep)


@lru_cache(maxsize=None)
def closed_points(x: SubschemeSpec, e: int) -> tuple:
    """One representative per Frobenius orbit of size exactly e."""
    w = field_extend(x.field, e)
    out = []
    for pt in iter_points(x, e):
        orb = orbit(pt, w)
        if len(orb) != e:
            continue  # lives over a proper subfield
        if pt == min(orb, key=lambda r: r.coords):
            out.append(ClosedPoint(e, pt))
    return tuple(out)


# ---------------------------------------------------------------------------
# smoothness validation of X itself


@dataclass(frozen=True)
class ValidUpTo:
    bound: int


@dataclass(frozen=True)
class NotSmoothAt:
    point: ClosedPoint


@dataclass(frozen=True)
class WrongRankAt:
    point: ClosedPoint


def validate_smooth(x: SubschemeSpec, bound: int):
    """Jacobian rank check (rank = n - m) at every point of degree <= bound."""
    target = x.n - x.m
    for e in range(1, bound + 1):
        w = field_extend(x.field, e)
        for pt in iter_points(x, e):
            if not x.closed_gens:
                rk = 0
            else:
                rows = [list(chart_jet1(g, pt.coords, pt.lead, w)[1]) for g in x.closed_gens]
                rk = linalg.rank(w, rows)
            if rk != target:
                cp = closed_point_of(pt, x.field)
                return NotSmoothAt(cp) if rk < target else WrongRankAt(cp)
    return ValidUpTo(bound)


# ---------------------------------------------------------------------------
# variety-spec files and built-in names

_PN_RE = re.compile(r"^P\^?(\d+)$")
_AN_RE = re.compile(r"^A\^?(\d+)$")
_KATZ_RE = re.compile(r"^katz\((\d+),(\d+)\)$")


def spec_from_dict(data: dict) -> SubschemeSpec:
    field = field_make(int(data["p"]), int(data["a"]))
    n = int(data["n"])
    closed = tuple(poly_parse(s, field, n) for s in data.get("closed", []))
    opens = tuple(poly_parse(s, field, n) for s in data.get("open_nonvanishing", []))
    return SubschemeSpec(field, n, int(data["m"]), closed, opens,
                         name=data.get("name", ""))


def spec_to_dict(x: SubschemeSpec) -> dict:
    return {
        "name": x.name,
        "p": x.field.p,
        "a": x.field.a,
        "n": x.n,
        "m": x.m,
        "closed": [str(g) for g in x.closed_gens],
        "open_nonvanishing": [str(g) for g in x.open_nonvanishing],
    }


def load_spec(path: str) -> SubschemeSpec:
    with open(path) as fh:
        return spec_from_dict(json.load(fh))


def resolve_space(token: str, q: int | None = None) -> SubschemeSpec:
    """Resolve built-in names (P^n, A^n, katz(n,q)), then file paths."""
    m = _PN_RE.match(token)
    if m:
        if q is None:
            raise ValueError(f"built-in space {token!r} needs a field size q")
        return proj_space(field_from_order(q), int(m.group(1)))
    m = _AN_RE.match(token)
    if m:
        if q is None:
            raise ValueError(f"built-in space {token!r} needs a field size q")
        return affine_space(field_from_order(q), int(m.group(1)))
    m = _KATZ_RE.match(token)
    if m:
        from .construct import katz_spec
        return katz_spec(int(m.group(2)), int(m.group(1)))
    return load_spec(token)
