import pytest

from smoothsieve import config, gf
from smoothsieve.errors import FieldSizeError, NotPrimeError


def test_field_make_prime_fields():
    F2 = gf.field_make(2, 1)
    assert (F2.p, F2.a, F2.q) == (2, 1, 2)
    F3 = gf.field_make(3, 1)
    assert F3.q == 3


def test_field_make_f4_unique_quadratic():
    # x^2+x+1 is the only irreducible quadratic over F_2
    F4 = gf.field_make(2, 2)
    assert F4.modulus == (1, 1, 1)


def test_field_make_errors():
    with pytest.raises(NotPrimeError):
        gf.field_make(4, 1)
    with pytest.raises(ValueError):
        gf.field_make(2, 0)


def test_field_make_deterministic():
    a = gf.field_make(2, 6)
    b = gf.field_make(2, 6)
    assert a.modulus == b.modulus


def _cubic_oracle_f2():
    # reducible cubic over F_2 always has a linear factor, i.e. a root in F_2
    for idx in range(8):
        c0, c1, c2 = idx & 1, (idx >> 1) & 1, (idx >> 2) & 1
        f = lambda x: (x ** 3 + c2 * x ** 2 + c1 * x + c0) % 2
        if f(0) != 0 and f(1) != 0:
            return (c0, c1, c2, 1)
    raise AssertionError


def test_extend_f8_smallest_irreducible_cubic():
    F8 = gf.field_extend(gf.field_make(2, 1), 3)
    assert F8.modulus == _cubic_oracle_f2() == (1, 1, 0, 1)  # w^3 + w + 1


def test_extend_identity_when_e_is_1():
    F4 = gf.field_make(2, 2)
    W = gf.field_extend(F4, 1)
    assert W.embed == (0, 1, 2, 3)
    assert W.modulus == F4.modulus


def test_extend_f4_to_f16_embedding_satisfies_base_modulus():
    F4 = gf.field_make(2, 2)
    W = gf.field_extend(F4, 2)
    t = W.embed_image
    # root-finding oracle: scan all of F_16 for roots of t^2+t+1
    roots = [x for x in W.elems() if W.add(W.add(W.mul(x, x), x), 1) == 0]
    assert t in roots and t == min(roots)
    assert W.add(W.add(W.mul(t, t), t), 1) == 0


def test_extend_overflow_guard():
    with pytest.raises(FieldSizeError):
        gf.field_extend(gf.field_make(2, 1), config.max_field_bits() + 1)


def test_arith_examples():
    W2 = gf.field_extend(gf.field_make(2, 1), 1)
    assert W2.add(1, 1) == 0
    W4 = gf.field_extend(gf.field_make(2, 1), 2)  # F_4 as working field over F_2
    t = 2
    assert W4.mul(t, t) == 3              # t*t = t+1 under t^2+t+1
    assert W4.inv(t) == 3                 # t(t+1) = 1
    assert W4.frobenius(t) == 3           # t^2 = t+1
    assert W4.frobenius(W4.frobenius(t)) == t  # Frobenius has order e = 2


def test_enumeration_order():
    W2 = gf.field_extend(gf.field_make(2, 1), 1)
    assert list(gf.field_enumerate(W2)) == [0, 1]
    W4 = gf.field_extend(gf.field_make(2, 1), 2)
    assert list(gf.field_enumerate(W4)) == [0, 1, 2, 3]  # 0, 1, t, t+1
    W8 = gf.field_extend(gf.field_make(2, 1), 3)
    assert len(list(gf.field_enumerate(W8))) == 8


@pytest.mark.parametrize("p,a,e", [(2, 1, 3), (2, 2, 2), (3, 1, 2), (5, 1, 2)])
def test_frobenius_orbit_closes_and_fixes_base(p, a, e):
    base = gf.field_make(p, a)
    W = gf.field_extend(base, e)
    for x in W.elems():
        y = x
        for _ in range(e):
            y = W.frobenius(y)
        assert y == x  # x^(q^e) = x
    fixed = [x for x in W.elems() if W.frobenius(x) == x]
    assert len(fixed) == base.q
    assert sorted(W.embed) == fixed


@pytest.mark.parametrize("p,a,e", [(2, 1, 4), (2, 2, 2), (3, 1, 2)])
def test_embedding_is_ring_hom(p, a, e):
    base = gf.field_make(p, a)
    B = gf.field_extend(base, 1)
    W = gf.field_extend(base, e)
    emb = W.embed
    assert len(set(emb)) == base.q  # injective
    for x in range(base.q):
        for y in range(base.q):
            assert emb[B.mul(x, y)] == W.mul(emb[x], emb[y])
            assert emb[B.add(x, y)] == W.add(emb[x], emb[y])


@pytest.mark.parametrize("p,a,e", [(2, 1, 10), (3, 2, 1), (7, 2, 1), (2, 1, 16)])
def test_inverse_exhaustive(p, a, e):
    W = gf.field_extend(gf.field_make(p, a), e)
    for x in range(1, W.order):
        assert W.mul(x, W.inv(x)) == 1


def test_big_field_generic_mul_path():
    # above the table limit: 2^17 elements, generic carry-less reduction
    W = gf.field_extend(gf.field_make(2, 1), 17)
    assert W._exp is None
    x, y = 12345, 54321
    assert W.mul(x, y) == W.mul(y, x)
    assert W.mul(x, W.inv(x)) == 1
    assert W.mul(x, W.add(y, 1)) == W.add(W.mul(x, y), x)


def test_elem_str_and_parse_roundtrip():
    W8 = gf.field_extend(gf.field_make(2, 1), 3)
    assert [W8.elem_str(x) for x in range(5)] == ["0", "1", "g", "g+1", "g^2"]
    assert W8.elem_str(5) == "g^2+1"
    for x in W8.elems():
        assert W8.elem_parse(W8.elem_str(x)) == x
    W9 = gf.field_extend(gf.field_make(3, 2), 1)
    for x in W9.elems():
        assert W9.elem_parse(W9.elem_str(x)) == x
    assert W9.elem_parse("2*g+2") == W9.add(W9.mul(2, 3), 2)


def test_fq_coords_roundtrip():
    F4 = gf.field_make(2, 2)
    W = gf.field_extend(F4, 2)
    for x in W.elems():
        cs = W.fq_coords(x)
        assert len(cs) == 2
        acc = 0
        for i, c in enumerate(cs):
            acc = W.add(acc, W.mul(W.embed[c], W.pow(W.gen, i)))
        assert acc == x
