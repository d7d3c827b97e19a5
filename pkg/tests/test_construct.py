import pytest

from smoothsieve import construct as ct, geometry as geo, gf, mpoly, smoothness as sm
from smoothsieve.errors import FieldSizeError, InconsistentConditionsError

F2 = gf.field_make(2, 1)
P2 = geo.proj_space(F2, 2)
W1 = gf.field_extend(F2, 1)


def rational(coords, lead):
    return geo.ClosedPoint(1, geo.ProjPoint(1, coords, lead))


def test_katz_hypersurface_q2():
    f = ct.katz_hypersurface(2, 1)
    assert f.n == 3 and f.d == 3
    assert f == mpoly.poly_parse("x0*x2^2 + x0^2*x2 + x1*x3^2 + x1^2*x3", F2, 3)


def test_katz_hypersurface_q3():
    f = ct.katz_hypersurface(3, 1)
    assert f.d == 4 and f.n == 3
    F3 = gf.field_make(3, 1)
    assert f == mpoly.poly_parse("x0*x2^3 - x0^3*x2 + x1*x3^3 - x1^3*x3", F3, 3)


def test_katz_smooth():
    assert geo.validate_smooth(ct.katz_spec(2, 1), 3) == geo.ValidUpTo(3)


def test_katz_pair_swap_symmetry():
    # swapping pair i with pair j fixes the defining sum
    f = ct.katz_hypersurface(2, 2)  # pairs (x0,x3), (x1,x4), (x2,x5) in P^5
    perm = {0: 1, 1: 0, 3: 4, 4: 3, 2: 2, 5: 5}
    idx = mpoly.monomial_index(5, 3)
    swapped = [0] * len(f.coeffs)
    for m, c in zip(mpoly.monomials(5, 3), f.coeffs):
        if c:
            m2 = [0] * 6
            for i, e in enumerate(m):
                m2[perm[i]] = e
            swapped[idx[tuple(m2)]] = c
    assert tuple(swapped) == f.coeffs


def test_find_section_no_conditions_linear():
    r = ct.find_section(ct.SearchSpec(P2, d_range=(1, 1), budget=100, seed=0))
    assert isinstance(r, ct.Found) and r.d == 1 and not r.f.is_zero
    assert isinstance(r.verdict, sm.Smooth)


def test_find_section_space_filling():
    pts = tuple(geo.ClosedPoint(1, p) for p in geo.points_over(P2, 1))
    r = ct.find_section(ct.SearchSpec(P2, pass_through=pts, d_range=(4, 6),
                                      budget=10 ** 6, seed=0))
    assert isinstance(r, ct.Found) and r.d <= 6
    for p in pts:
        assert mpoly.poly_eval(r.f, p.rep.coords, W1) == 0
    assert isinstance(r.verdict, sm.Smooth)


def test_find_section_determinism():
    pts = tuple(geo.ClosedPoint(1, p) for p in geo.points_over(P2, 1))
    spec = ct.SearchSpec(P2, pass_through=pts, d_range=(4, 5), budget=10 ** 4, seed=11)
    a = ct.find_section(spec)
    b = ct.find_section(spec)
    assert isinstance(a, ct.Found) and a.f == b.f and a.d == b.d


def test_find_section_tangent_prescription():
    cp = rational((1, 0, 0), 0)
    nu = (0, 1, 0)  # tangent line x1 = 0 at (1:0:0)
    r = ct.find_section(ct.SearchSpec(P2, pass_through=(cp,), tangent=((cp, nu),),
                                      d_range=(2, 3), budget=5000, seed=7))
    assert isinstance(r, ct.Found)
    v, grad = mpoly.chart_jet1(r.f, (1, 0, 0), 0, W1)
    assert v == 0 and grad == (1, 0)  # lambda = 1 is the only unit in F_2


def test_find_section_inconsistent_conditions():
    cp = rational((1, 0, 0), 0)
    with pytest.raises(InconsistentConditionsError):
        ct.find_section(ct.SearchSpec(P2, pass_through=(cp,),
                                      tangent=((cp, (0, 0, 0)),),
                                      d_range=(2, 2), budget=10, seed=0))
    other = rational((0, 1, 0), 1)
    with pytest.raises(InconsistentConditionsError):
        ct.find_section(ct.SearchSpec(P2, pass_through=(cp,),
                                      tangent=((other, (1, 0, 0)),),
                                      d_range=(2, 2), budget=10, seed=0))


def test_find_section_skips_nonsurjective_degrees():
    pts = tuple(geo.ClosedPoint(1, p) for p in geo.points_over(P2, 1))
    r = ct.find_section(ct.SearchSpec(P2, pass_through=pts, d_range=(1, 1),
                                      budget=100, seed=0))
    assert isinstance(r, ct.NotFoundWithinBudget)
    assert any("skipped" in note for note in r.notes)
    assert r.tried == {1: 0}


def test_solution_space_bookkeeping():
    # k independent conditions leave exactly q^(dim S_d - k) candidates
    from smoothsieve import linalg
    pts = [geo.ClosedPoint(1, p) for p in geo.points_over(P2, 1)]
    rows, rhs_for, lam = ct._condition_system(F2, 2, 4, pts, [])
    assert lam == []
    rank = linalg.rank(W1, rows)
    kernel = linalg.nullspace(W1, rows, 15)
    assert len(kernel) == 15 - rank
    sols = list(linalg.enumerate_affine(W1, [0] * 15, kernel))
    assert len(sols) == 2 ** len(kernel)
    assert len({tuple(s) for s in sols}) == len(sols)


def test_space_avoiding_vacuous_ell_1():
    r = ct.space_avoiding(P2, 1, (2, 2), budget=1000, seed=1)
    assert isinstance(r, ct.Found)
    assert isinstance(r.verdict, sm.Smooth)


def test_space_avoiding_no_rational_points():
    r = ct.space_avoiding(P2, 2, (2, 4), budget=10 ** 5, seed=1)
    assert isinstance(r, ct.Found)
    for p in geo.points_over(P2, 1):
        assert mpoly.poly_eval(r.f, p.coords, W1) != 0


def test_space_avoiding_infeasible_ell():
    with pytest.raises(FieldSizeError):
        ct.space_avoiding(P2, 40, (2, 2), budget=10, seed=0)


def test_verify_anti_bertini_katz():
    out = ct.verify_anti_bertini(ct.katz_spec(2, 1), 1)
    assert isinstance(out, ct.AllSingular)
    assert len(out.witnesses) == 15  # the nonzero linear forms over F_2 in P^3
    for g, pt in out.witnesses:
        w = gf.field_extend(F2, pt.degree)
        assert mpoly.poly_eval(g, pt.rep.coords, w) == 0


def test_verify_anti_bertini_counterexample():
    conic = geo.SubschemeSpec(F2, 2, 1, (mpoly.poly_parse("x0^2 + x1*x2", F2, 2),), ())
    out = ct.verify_anti_bertini(conic, 1)
    assert isinstance(out, ct.CounterexampleFound)
    assert isinstance(out.verdict, sm.Smooth)


def test_verify_anti_bertini_dmax_zero():
    out = ct.verify_anti_bertini(ct.katz_spec(2, 1), 0)
    assert out == ct.AllSingular(())


def test_anti_bertini_search_end_to_end():
    r = ct.anti_bertini_search(2, 2, 1, (5, 7), budget=3000, seed=0)
    assert isinstance(r, ct.Found)
    xf = geo.SubschemeSpec(F2, 2, 1, (r.f,), ())
    out = ct.verify_anti_bertini(xf, 1)
    assert isinstance(out, ct.AllSingular)
    assert isinstance(r.verdict, sm.Smooth)


def test_anti_bertini_search_budget_exhaustion():
    r = ct.anti_bertini_search(2, 2, 1, (5, 5), budget=1, seed=0)
    assert isinstance(r, ct.NotFoundWithinBudget)
    assert sum(r.tried.values()) <= 1
