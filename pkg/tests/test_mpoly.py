import random
from math import comb

import pytest

from smoothsieve import gf, mpoly
from smoothsieve.errors import (
    BadVariableIndexError,
    CoefficientNotInFieldError,
    NotHomogeneousError,
    PolySyntaxError,
)

F2 = gf.field_make(2, 1)
F3 = gf.field_make(3, 1)
F4 = gf.field_make(2, 2)


class Pt:
    def __init__(self, coords, lead):
        self.coords, self.lead = coords, lead


def test_monomial_table_order_and_size():
    t = mpoly.monomials(2, 3)
    assert len(t) == comb(5, 2) == 10
    assert t[0] == (3, 0, 0) and t[-1] == (0, 0, 3)
    assert len(set(t)) == len(t)


def test_parse_examples():
    f = mpoly.poly_parse("x0^3 + x1^3 + x2^3", F2, 2)
    assert f.d == 3 and sum(1 for c in f.coeffs if c) == 3
    g = mpoly.poly_parse("x0*x1^2 + x2^3", F2, 2)
    assert g.d == 3 and sum(1 for c in g.coeffs if c) == 2
    with pytest.raises(NotHomogeneousError):
        mpoly.poly_parse("x0 + x1^2", F2, 2)


def test_parse_errors():
    with pytest.raises(BadVariableIndexError):
        mpoly.poly_parse("x3^2", F2, 2)
    with pytest.raises(PolySyntaxError):
        mpoly.poly_parse("x0 + * x1", F2, 2)
    with pytest.raises(PolySyntaxError):
        mpoly.poly_parse("", F2, 2)
    with pytest.raises(CoefficientNotInFieldError):
        mpoly.poly_parse("[g+1]*x0", F2, 1)


def test_parse_coefficients_and_signs():
    f = mpoly.poly_parse("2*x0*x1 - x1^2", F3, 1)
    # -1 = 2 in F_3
    assert mpoly.poly_eval(f, (1, 1), gf.field_extend(F3, 1)) == (2 - 1) % 3
    g = mpoly.poly_parse("[g]*x0 + [g+1]*x1", F4, 1)
    assert g.coeffs.count(2) == 1 and g.coeffs.count(3) == 1
    # INT coefficients reduce mod p
    h = mpoly.poly_parse("5*x0^2", F3, 1)
    assert h.coeffs[mpoly.monomial_index(1, 2)[(2, 0)]] == 2


def test_print_parse_roundtrip():
    rng = random.Random(7)
    for field in (F2, F3, F4):
        for _ in range(20):
            f = mpoly.poly_sample(field, 2, 3, rng)
            assert mpoly.poly_parse(str(f), field, 2) == f


def test_enumerate_counts_and_shards():
    forms = list(mpoly.s_d_enumerate(F2, 2, 3))
    assert len(forms) == 2 ** 10 == 1024
    assert len(set(forms)) == 1024
    small = list(mpoly.s_d_enumerate(F2, 1, 2))
    assert len(small) == 8 and small[0].is_zero
    shards = [list(mpoly.s_d_enumerate(F2, 2, 3, shard=(k, 4))) for k in range(4)]
    assert [len(s) for s in shards] == [256] * 4
    assert sum(shards, []) == forms


def test_enumerate_budget():
    from smoothsieve.errors import BudgetExceededError
    with pytest.raises(BudgetExceededError):
        list(mpoly.s_d_enumerate(F2, 2, 3, budget=1000))


def test_sample_uniformity_and_determinism():
    rng = random.Random("uniform:0")
    n_trials = 10 ** 5
    ones = 0
    for _ in range(n_trials):
        ones += mpoly.poly_sample(F2, 2, 3, rng).coeffs[0]
    assert abs(ones / n_trials - 0.5) < 0.01
    a = [mpoly.poly_sample(F2, 2, 3, random.Random("s:1")) for _ in range(3)]
    b = [mpoly.poly_sample(F2, 2, 3, random.Random("s:1")) for _ in range(3)]
    assert a == b


def test_sample_chisquare_f4():
    # first-coefficient distribution over F_4; reject only at the 1e-6 level
    rng = random.Random("chi:1")
    n_trials = 10 ** 5
    counts = [0] * 4
    for _ in range(n_trials):
        counts[mpoly.poly_sample(F4, 1, 2, rng).coeffs[0]] += 1
    exp = n_trials / 4
    stat = sum((c - exp) ** 2 / exp for c in counts)
    assert stat < 30.67  # chi-square, 3 dof, upper 1e-6 quantile


def test_derive_examples():
    assert mpoly.poly_derive(mpoly.poly_parse("x0^2", F2, 1), 0).is_zero
    f = mpoly.poly_parse("x0^3 + x1^3 + x2^3", F2, 2)
    assert str(mpoly.poly_derive(f, 1)) == "x1^2"
    g = mpoly.poly_parse("x0*x1^2", F3, 1)
    assert str(mpoly.poly_derive(g, 1)) == "2*x0*x1"


def test_dehomogenize_examples():
    g = mpoly.poly_parse("x0*x1^2 + x2^3", F2, 2)
    deh = mpoly.poly_dehomogenize(g, 0)
    assert str(deh) == "x1^2 + x2^3"
    assert str(mpoly.poly_dehomogenize(mpoly.poly_parse("x0^3", F2, 2), 0)) == "1"
    h = mpoly.poly_parse("x1*x2^2", F2, 2)
    assert mpoly.rehomogenize(mpoly.poly_dehomogenize(h, 0), 3, 0) == h


def test_eval_examples():
    w1 = gf.field_extend(F2, 1)
    f = mpoly.poly_parse("x0^3 + x1^3 + x2^3", F2, 2)
    assert mpoly.poly_eval(f, (1, 1, 1), w1) == 1
    assert mpoly.poly_eval(mpoly.poly_parse("x0*x1", F2, 1), (0, 1), w1) == 0
    w4 = gf.field_extend(F4, 1)
    h = mpoly.poly_parse("x0^2 + x0*x1", F4, 1)
    assert mpoly.poly_eval(h, (2, 1), w4) == 1  # t^2 + t = 1


def test_eval_field_mismatch():
    from smoothsieve.errors import FieldMismatchError
    f = mpoly.poly_parse("x0*x1", F2, 1)
    with pytest.raises(FieldMismatchError):
        mpoly.poly_eval(f, (1, 1), gf.field_extend(F3, 1))


def test_jet2_examples():
    w1 = gf.field_extend(F2, 1)
    j = mpoly.poly_jet2(mpoly.poly_parse("x1*x2", F2, 2), Pt((1, 0, 0), 0), w1)
    assert (j.value, j.gradient) == (0, (0, 0))
    assert j.quad_entry(0, 1) == 1 and j.quad_entry(0, 0) == 0 and j.quad_entry(1, 1) == 0
    j2 = mpoly.poly_jet2(mpoly.poly_parse("x0*x1^2 + x2^3", F2, 2), Pt((1, 0, 0), 0), w1)
    assert (j2.value, j2.gradient) == (0, (0, 0))
    assert j2.quad_entry(0, 0) == 1 and j2.quad_entry(0, 1) == 0 and j2.quad_entry(1, 1) == 0
    j3 = mpoly.poly_jet2(mpoly.poly_parse("x0^3", F2, 2), Pt((1, 0, 0), 0), w1)
    assert (j3.value, j3.gradient, j3.quad) == (1, (0, 0), (0, 0, 0))


def test_euler_relation():
    # sum_i x_i * df/dx_i = d*f; in char p with p | d the left side vanishes
    for field, d in ((F2, 3), (F3, 2), (F4, 3), (F2, 4), (F3, 3)):
        rng = random.Random(f"euler:{field.q}:{d}")
        w1 = gf.field_extend(field, 1)
        for _ in range(10):
            f = mpoly.poly_sample(field, 2, d, rng)
            total = mpoly.zero_poly(field, 2, d)
            for i in range(3):
                total = mpoly.poly_add(total, mpoly.mul_by_var(mpoly.poly_derive(f, i), i))
            assert total == mpoly.scale(f, d % field.p)


def test_chart_consistency():
    # chart-j and chart-j' values differ by (x_j'/x_j)^d at a shared point
    rng = random.Random(11)
    w = gf.field_extend(F2, 3)
    for _ in range(10):
        f = mpoly.poly_sample(F2, 2, 3, rng)
        coords = tuple(rng.randrange(1, 8) for _ in range(3))  # all nonzero
        vals = []
        for j in range(3):
            s = w.inv(coords[j])
            normalized = tuple(w.mul(c, s) for c in coords)
            vals.append(mpoly.poly_eval(f, normalized, w))
        ratio = w.pow(w.mul(coords[1], w.inv(coords[0])), 3)
        assert vals[0] == w.mul(vals[1], ratio)
        assert (vals[0] == 0) == (vals[1] == 0) == (vals[2] == 0)


def test_jet1_agrees_with_eval_and_derive():
    rng = random.Random(13)
    w = gf.field_extend(F2, 2)
    for _ in range(10):
        f = mpoly.poly_sample(F2, 2, 3, rng)
        coords = (1, rng.randrange(4), rng.randrange(4))
        value, grad = mpoly.chart_jet1(f, coords, 0, w)
        assert value == mpoly.poly_eval(f, coords, w)
        for gi, i in enumerate((1, 2)):
            assert grad[gi] == mpoly.poly_eval(mpoly.poly_derive(f, i), coords, w)
        jet = mpoly.poly_jet2(f, Pt(coords, 0), w)
        assert (jet.value, jet.gradient) == (value, grad)


def test_chart_rows_match_jet1():
    rng = random.Random(17)
    w = gf.field_extend(F4, 2)
    coords = (1, 5, 9)
    vrow, grows = mpoly.chart_rows(2, 3, coords, 0, w)
    for _ in range(5):
        f = mpoly.poly_sample(F4, 2, 3, rng)
        emb = w.embed
        value = 0
        for c, rv in zip(f.coeffs, vrow):
            if c and rv:
                value = w.add(value, w.mul(emb[c], rv))
        v2, g2 = mpoly.chart_jet1(f, coords, 0, w)
        assert value == v2
        for gi in range(2):
            acc = 0
            for c, rv in zip(f.coeffs, grows[gi]):
                if c and rv:
                    acc = w.add(acc, w.mul(emb[c], rv))
            assert acc == g2[gi]
