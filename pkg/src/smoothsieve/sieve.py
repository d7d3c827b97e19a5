"""Empirical density measurement over S_d and jet-map linear algebra.

Exhaustive mode walks the canonical enumeration of S_d (optionally sharded;
the tally is an associative sum, so shard count never changes it) and
returns exact rational fractions.  Monte-Carlo mode uses counter-based
per-trial seeding -- trial t draws from random.Random(f"{seed}:{t}") -- so
the sample stream is independent of how trials are partitioned across
shards, and reports Wilson 95% intervals.

Jet machinery: a finite jet scheme Z assigns order-1 jets (value) or
order-2 jets (value plus chart gradient) at distinct closed points; the jet
map S_d -> H^0(Z) is F_q-linear after untwisting each component by x_j^(-d)
(evaluation at the normalized representative does exactly that).  Densities
conditioned on f|_Z landing in a prescribed jet set T are computed per
coset of the jet-map kernel.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import comb

from . import config, linalg
from .errors import (
    BudgetExceededError,
    EmptyJetSetError,
    NotSurjectiveError,
    PointsNotDistinctError,
)
from .geometry import ClosedPoint, SubschemeSpec, proj_space
from .gf import FieldDesc, field_extend
from .mpoly import HomogPoly, chart_rows, monomials, poly_sample, s_d_count, s_d_enumerate
from . import smoothness as sm


def trial_rng(seed, t: int) -> random.Random:
    """Counter-based stream: the RNG for trial t depends only on (seed, t)."""
    return random.Random(f"{seed}:{t}")


Z95 = 1.959963984540054


def wilson_ci(hits: int, total: int, z: float = Z95):
    if total == 0:
        return (0.0, 1.0)
    p = hits / total
    denom = 1 + z * z / total
    center = (p + z * z / (2 * total)) / denom
    half = z * math.sqrt(p * (1 - p) / total + z * z / (4 * total * total)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class DensityEstimate:
    mode: str  # "exhaustive" | "mc"
    hits: int
    total: int
    fraction: Fraction
    ci95: tuple | None
    seed: object
    predicate: str
    d: int
    jet_weight: Fraction = Fraction(1)


# ---------------------------------------------------------------------------
# predicates


class Predicate:
    def compile(self, field: FieldDesc, n: int, d: int):
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class SmoothIntersection(Predicate):
    """H_f meets X smoothly of dimension m-1 (bounded or certified-exact)."""

    x: SubschemeSpec
    bound: int | None = None

    def compile(self, field, n, d):
        assert self.x.field == field and self.x.n == n
        bound = self.bound
        if bound is None:
            cert = sm.certified_bound(self.x, d)
            bound = min(cert, sm.max_feasible_degree(self.x)) if cert is not None \
                else config.DEFAULT_SMOOTH_BOUND
        sm.require_validated(self.x, max(bound, 1))
        checker = sm.get_checker(self.x, d, bound) if bound >= 1 else None

        def pred(f: HomogPoly) -> bool:
            if f.is_zero:
                return False  # the section is all of X, of dimension m
            return checker is None or not checker.is_singular(f)

        return pred

    def describe(self):
        b = "exact" if self.bound is None else f"B={self.bound}"
        return f"smooth({self.x!r},{b})"


@dataclass(frozen=True)
class SmoothAtPointsBelow(Predicate):
    """Smooth at every closed point of X of degree < r."""

    x: SubschemeSpec
    r: int

    def compile(self, field, n, d):
        assert self.x.field == field and self.x.n == n
        bound = self.r - 1
        sm.require_validated(self.x, max(bound, 1))
        checker = sm.get_checker(self.x, d, bound) if bound >= 1 else None

        def pred(f: HomogPoly) -> bool:
            return checker is None or not checker.is_singular(f)

        return pred

    def describe(self):
        return f"smooth_below({self.x!r},r={self.r})"


@dataclass(frozen=True)
class AtWorstNodes(Predicate):
    """Every singular point of degree <= B of the plane section is a node."""

    bound: int

    def compile(self, field, n, d):
        if n != 2:
            raise ValueError("at-worst-nodes is a plane-curve predicate (n = 2)")
        x = proj_space(field, 2)
        checker = sm.get_checker(x, d, self.bound)

        def pred(f: HomogPoly) -> bool:
            if f.is_zero:
                return False
            for cp in checker.singular_closed_points(f):
                if sm.classify_singularity(f, x, cp) != sm.Node():
                    return False
            return True

        return pred

    def describe(self):
        return f"at_worst_nodes(B={self.bound})"


@dataclass(frozen=True)
class GeomIntegral(Predicate):
    budget: int = 10000

    def compile(self, field, n, d):
        def pred(f: HomogPoly) -> bool:
            if f.is_zero:
                return False
            v = sm.geometrically_integral(f, self.budget)
            if isinstance(v, sm.IntegralityUnknown):
                raise BudgetExceededError(v.budget_note)
            return isinstance(v, sm.GeometricallyIntegral)

        return pred

    def describe(self):
        return f"geom_integral(budget={self.budget})"


@dataclass(frozen=True)
class JetInSet(Predicate):
    """f|_Z lands in the prescribed jet set T."""

    z: "JetScheme"
    t: "JetSet"

    def compile(self, field, n, d):
        ev = JetEvaluator(self.z, d)

        def pred(f: HomogPoly) -> bool:
            return self.t.contains(ev.evaluate(f))

        return pred

    def describe(self):
        return f"jet_in_set(|Z|={len(self.z.points)},#T={self.t.size})"


@dataclass(frozen=True)
class And(Predicate):
    parts: tuple

    def compile(self, field, n, d):
        fns = [p.compile(field, n, d) for p in self.parts]

        def pred(f: HomogPoly) -> bool:
            return all(fn(f) for fn in fns)

        return pred

    def describe(self):
        return "and(" + ",".join(p.describe() for p in self.parts) + ")"


@dataclass(frozen=True)
class FnPredicate(Predicate):
    """Wrap a bare callable (used by tests and CLI provisional predicates)."""

    fn: object
    description: str

    def compile(self, field, n, d):
        return self.fn

    def describe(self):
        return self.description


# ---------------------------------------------------------------------------
# jet schemes


@dataclass(frozen=True)
class JetScheme:
    """Finite fat-point scheme: (closed point, order) pairs, order in {1, 2}."""

    field: FieldDesc
    n: int
    points: tuple  # ((ClosedPoint, order), ...)

    def __post_init__(self):
        seen = set()
        for cp, order in self.points:
            if order not in (1, 2):
                raise ValueError("jet order must be 1 or 2")
            key = (cp.degree, cp.rep.coords)
            if key in seen:
                raise PointsNotDistinctError(f"closed point {cp.rep} listed twice")
            seen.add(key)

    def jet_lengths(self) -> list:
        """F_q-length of each component: (1 or 1+n) * deg P."""
        return [(1 if order == 1 else 1 + self.n) * cp.degree
                for cp, order in self.points]

    def h0_size(self) -> int:
        return self.field.q ** sum(self.jet_lengths())


@dataclass(frozen=True)
class JetSet:
    """Subset T of the jet space: explicit members or a counted predicate."""

    size: int
    members: tuple | None = None
    pred: object = None

    def __post_init__(self):
        if self.members is None and self.pred is None:
            raise ValueError("JetSet needs explicit members or a counted predicate")
        if self.members is not None and len(self.members) != self.size:
            raise ValueError("size disagrees with the member list")

    def contains(self, jet) -> bool:
        if self.members is not None:
            return jet in set(self.members) if not isinstance(self.members, frozenset) \
                else jet in self.members
        return bool(self.pred(jet))


class JetEvaluator:
    """Evaluates f|_Z: per point the untwisted value (and chart gradient)."""

    def __init__(self, z: JetScheme, d: int):
        self.z = z
        self.d = d
        self.parts = []
        for cp, order in z.points:
            w = field_extend(z.field, cp.degree)
            vrow, grows = chart_rows(z.n, d, cp.rep.coords, cp.rep.lead, w)
            self.parts.append((w, order, vrow, grows))

    def evaluate(self, f: HomogPoly) -> tuple:
        nz = [(j, c) for j, c in enumerate(f.coeffs) if c]
        out = []
        for w, order, vrow, grows in self.parts:
            emb = w.embed
            v = 0
            for j, c in nz:
                r = vrow[j]
                if r:
                    v = w.add(v, w.mul(emb[c], r))
            if order == 1:
                out.append((v,))
            else:
                gs = []
                for gr in grows:
                    g = 0
                    for j, c in nz:
                        r = gr[j]
                        if r:
                            g = w.add(g, w.mul(emb[c], r))
                    gs.append(g)
                out.append((v, *gs))
        return tuple(out)


@dataclass(frozen=True)
class JetRankReport:
    dims: tuple  # (dim S_d, F_q-length of the jet space)
    rank: int
    surjective: bool
    threshold: int  # length - 1, the guaranteed-surjectivity degree


def _jet_columns(z: JetScheme, d: int):
    """Per-monomial jet images expanded into F_q coordinates."""
    ev = JetEvaluator(z, d)
    nmono = comb(z.n + d, z.n)
    cols = []
    for j in range(nmono):
        col = []
        for w, order, vrow, grows in ev.parts:
            col.extend(w.fq_coords(vrow[j]))
            if order == 2:
                for gr in grows:
                    col.extend(w.fq_coords(gr[j]))
        cols.append(col)
    return cols


def jet_map_rank(z: JetScheme, d: int) -> JetRankReport:
    """Rank of S_d -> H^0(Z) over F_q, with the guaranteed threshold."""
    if not z.points:
        raise ValueError("jet scheme must be nonempty")
    cols = _jet_columns(z, d)
    w1 = field_extend(z.field, 1)
    jet_len = sum(z.jet_lengths())
    rank = linalg.rank(w1, cols)  # rows = monomials, columns = jet coordinates
    return JetRankReport((len(cols), jet_len), rank, rank == jet_len, jet_len - 1)


# ---------------------------------------------------------------------------
# density measurement


def exhaustive_density(field: FieldDesc, n: int, d: int, pred: Predicate,
                       shards: int = 1, pool=None) -> DensityEstimate:
    """Exact fraction of S_d satisfying the predicate (shard-order invariant)."""
    fn = pred.compile(field, n, d)
    total = s_d_count(field, n, d)
    if total > config.EXHAUSTIVE_BUDGET:
        raise BudgetExceededError(f"|S_d| = {total} exceeds the exhaustive budget")

    def run(k):
        return sum(1 for f in s_d_enumerate(field, n, d, shard=(k, shards)) if fn(f))

    if pool is not None and shards > 1:
        hits = sum(pool.map(run, range(shards)))
    else:
        hits = sum(run(k) for k in range(shards))
    return DensityEstimate("exhaustive", hits, total, Fraction(hits, total),
                           None, None, pred.describe(), d)


def mc_density(field: FieldDesc, n: int, d: int, pred: Predicate, trials: int,
               seed, shards: int = 1, pool=None) -> DensityEstimate:
    """Monte-Carlo density with Wilson 95% interval; stream fixed by (seed, trials)."""
    if trials < 1:
        raise ValueError("need at least one trial")
    fn = pred.compile(field, n, d)

    def run(k):
        lo, hi = k * trials // shards, (k + 1) * trials // shards
        h = 0
        for t in range(lo, hi):
            f = poly_sample(field, n, d, trial_rng(seed, t))
            if fn(f):
                h += 1
        return h

    if pool is not None and shards > 1:
        hits = sum(pool.map(run, range(shards)))
    else:
        hits = sum(run(k) for k in range(shards))
    return DensityEstimate("mc", hits, trials, Fraction(hits, trials),
                           wilson_ci(hits, trials), seed, pred.describe(), d)


def conditioned_density(z: JetScheme, t: JetSet, field: FieldDesc, n: int, d: int,
                        pred: Predicate, mode: str = "exhaustive",
                        trials: int | None = None, seed=None,
                        shards: int = 1, pool=None) -> DensityEstimate:
    """Density of (pred and f|_Z in T) inside S_d, via kernel cosets.

    Exhaustive mode enumerates the coset of each jet in T and reports the
    exact joint fraction against all of S_d; MC mode samples uniformly from
    the conditioned set and weights by #T/#H^0.
    """
    if t.size == 0:
        raise EmptyJetSetError("T is empty")
    if t.members is None:
        raise ValueError("conditioned density needs an explicit jet list for T")
    report = jet_map_rank(z, d)
    if not report.surjective:
        raise NotSurjectiveError(
            f"jet map at d={d} has rank {report.rank} < {report.dims[1]}")
    fn = pred.compile(field, n, d)
    w1 = field_extend(field, 1)
    cols = _jet_columns(z, d)
    nmono = len(cols)
    jet_len = report.dims[1]
    # system rows: jet coordinate r as a linear functional of the coefficients
    system = [[cols[j][r] for j in range(nmono)] for r in range(jet_len)]
    kernel = linalg.nullspace(w1, system, nmono)
    parts = JetEvaluator(z, d).parts

    def expand(jet) -> list:
        out = []
        for (w, order, _, _), part in zip(parts, jet):
            for coord in part:
                out.extend(w.fq_coords(coord))
        return out

    members = sorted(t.members)
    particulars = []
    for jet in members:
        sol = linalg.solve(w1, system, expand(jet))
        if sol is None:
            raise AssertionError("surjective jet map must solve every target")
        particulars.append(sol)

    if mode == "exhaustive":
        coset = field.q ** len(kernel)
        if t.size * coset > config.EXHAUSTIVE_BUDGET:
            raise BudgetExceededError("conditioned enumeration exceeds the budget")
        hits = 0
        for part in particulars:
            for vec in linalg.enumerate_affine(w1, part, kernel):
                if fn(HomogPoly(field, n, d, tuple(vec))):
                    hits += 1
        total = s_d_count(field, n, d)
        return DensityEstimate("exhaustive", hits, total, Fraction(hits, total),
                               None, None, pred.describe(), d)

    if trials is None or trials < 1:
        raise ValueError("mc mode needs trials >= 1")
    weight = Fraction(t.size, z.h0_size())
    q = field.q
    if q == 2:
        # bit-packed coset sampling: one XOR per chosen kernel vector
        part_bits = [sum(v << i for i, v in enumerate(p)) for p in particulars]
        kern_bits = [sum(v << i for i, v in enumerate(b)) for b in kernel]

        def sample_coeffs(rng):
            bits = part_bits[rng.randrange(len(part_bits))]
            combo = rng.getrandbits(len(kern_bits)) if kern_bits else 0
            for bi, kb in enumerate(kern_bits):
                if (combo >> bi) & 1:
                    bits ^= kb
            return tuple((bits >> i) & 1 for i in range(nmono))
    else:
        def sample_coeffs(rng):
            vec = list(particulars[rng.randrange(len(particulars))])
            for b in kernel:
                c = rng.randrange(q)
                if c:
                    for i2 in range(nmono):
                        if b[i2]:
                            vec[i2] = w1.add(vec[i2], w1.mul(c, b[i2]))
            return tuple(vec)

    def run(k):
        lo, hi = k * trials // shards, (k + 1) * trials // shards
        h = 0
        for ti in range(lo, hi):
            rng = trial_rng(seed, ti)
            if fn(HomogPoly(field, n, d, sample_coeffs(rng))):
                h += 1
        return h

    if pool is not None and shards > 1:
        hits = sum(pool.map(run, range(shards)))
    else:
        hits = sum(run(k) for k in range(shards))
    lo, hi = wilson_ci(hits, trials)
    wf = float(weight)
    return DensityEstimate("mc", hits, trials, Fraction(hits, trials) * weight,
                           (lo * wf, hi * wf), seed, pred.describe(), d,
                           jet_weight=weight)


# ---------------------------------------------------------------------------
# exact singular fraction at one point


@dataclass(frozen=True)
class SingularFraction:
    fraction: Fraction
    rank: int
    closed_form: Fraction
    closed_form_valid: bool
    warning: str | None = None


def singular_fraction_at_point(x: SubschemeSpec, p: ClosedPoint, d: int) -> SingularFraction:
    """Exact fraction of f in S_d singular at P: q^(-rank of the bad-jet map).

    When deg P <= d/(m+1) the rank equals (m+1) deg P (the jet map is onto),
    reproducing the closed form q^(-(m+1) deg P); otherwise the rank-based
    fraction is returned with a warning instead of the closed form.
    """
    e = p.degree
    sm.require_validated(x, e)
    w = field_extend(x.field, e)
    vrow, grows = chart_rows(x.n, d, p.rep.coords, p.rep.lead, w)
    if x.closed_gens:
        from .mpoly import chart_jet1
        jac = [list(chart_jet1(g, p.rep.coords, p.rep.lead, w)[1]) for g in x.closed_gens]
        ech = linalg.echelon(w, jac)
    else:
        ech = []
    nmono = comb(x.n + d, x.n)
    w1 = field_extend(x.field, 1)
    rows = []
    for j in range(nmono):
        grad_j = [gr[j] for gr in grows]
        residue = linalg.reduce_vector(w, ech, grad_j) if ech else grad_j
        row = list(w.fq_coords(vrow[j]))
        for coord in residue:
            row.extend(w.fq_coords(coord))
        rows.append(row)
    rank = linalg.rank(w1, rows)
    q = x.field.q
    closed = Fraction(1, q ** ((x.m + 1) * e))
    valid = (x.m + 1) * e <= d
    warning = None
    if not valid:
        warning = (f"deg P = {e} exceeds d/(m+1) = {d}/{x.m + 1}; "
                   "reporting the rank-based fraction, not the closed form")
    return SingularFraction(Fraction(1, q ** rank), rank, closed, valid, warning)
