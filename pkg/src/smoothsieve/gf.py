"""Exact arithmetic in F_p, F_q = F_{p^a}, and working extensions F_{q^e}.

Field elements are plain ints: the element with F_p-coefficient vector
(c_0, c_1, ..., c_{k-1}) against powers of the field generator is encoded as
sum(c_i * p**i).  Enumerating 0..order-1 therefore walks the canonical order
(lexicographic on coefficient vectors, low degree first): element 0 is 0,
element 1 is 1, element p is the generator g.

Moduli are chosen deterministically: the lexicographically smallest monic
irreducible polynomial of the required degree over F_p, found by ordered
enumeration plus an irreducibility test.  The embedding F_q -> F_{q^e} sends
the base generator to the lexicographically smallest root of the base
modulus in the working field.

Multiplication uses log/exp tables for fields of at most 2**16 elements and
generic reduction above (carry-less integer arithmetic when p = 2).
All values are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import config
from .errors import FieldSizeError, NotPrimeError, PolySyntaxError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _digits(idx: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        out.append(idx % p)
        idx //= p
    return out


def _undigits(ds, p: int) -> int:
    out = 0
    for d in reversed(ds):
        out = out * p + d
    return out


# ---------------------------------------------------------------------------
# univariate polynomials over F_p (coefficient lists, low degree first)

def _ptrim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmulmod(a, b, mod, p):
    k = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] = (prod[i + j] + ai * bj) % p
    # reduce by the monic modulus
    for i in range(len(prod) - 1, k - 1, -1):
        c = prod[i]
        if c:
            prod[i] = 0
            for j in range(k):
                prod[i - k + j] = (prod[i - k + j] - c * mod[j]) % p
    return _ptrim(prod[:k])


def _ppowmod(base, n, mod, p):
    result = [1]
    cur = list(base)
    while n:
        if n & 1:
            result = _pmulmod(result, cur, mod, p)
        cur = _pmulmod(cur, cur, mod, p)
        n >>= 1
    return result


def _pgcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        # a mod b with b made monic on the fly
        inv_lead = pow(b[-1], p - 2, p)
        while len(a) >= len(b) and a:
            c = (a[-1] * inv_lead) % p
            shift = len(a) - len(b)
            for j in range(len(b)):
                a[shift + j] = (a[shift + j] - c * b[j]) % p
            _ptrim(a)
        a, b = b, a
    return a


def _prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _is_irreducible(f, p) -> bool:
    """Monic f over F_p: x^(p^k) == x mod f, plus gcd checks at maximal subfields."""
    k = len(f) - 1
    if k == 1:
        return True
    x = [0, 1]
    if _ppowmod(x, p ** k, f, p) != x:
        return False
    for r in _prime_factors(k):
        xe = _ppowmod(x, p ** (k // r), f, p)
        diff = list(xe) + [0] * max(0, 2 - len(xe))
        diff[1] = (diff[1] - 1) % p
        g = _pgcd(f, _ptrim(diff), p)
        if len(g) - 1 != 0:
            return False
    return True


@lru_cache(maxsize=None)
def _min_irreducible(p: int, k: int) -> tuple:
    """Lexicographically smallest monic irreducible of degree k over F_p."""
    for idx in range(p ** k):
        f = _digits(idx, p, k) + [1]
        if _is_irreducible(f, p):
            return tuple(f)
    raise AssertionError(f"no irreducible of degree {k} over F_{p}")


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldDesc:
    """The base field F_q with q = p^a, and its fixed defining modulus."""

    p: int
    a: int
    modulus: tuple

    @property
    def q(self) -> int:
        return self.p ** self.a

    def __repr__(self):
        return f"GF({self.p}^{self.a})" if self.a > 1 else f"GF({self.p})"


def field_make(p: int, a: int) -> FieldDesc:
    """Base field of q = p^a elements with the deterministic modulus."""
    if not is_prime(p):
        raise NotPrimeError(f"{p} is not prime")
    if a < 1:
        raise ValueError("extension degree must be at least 1")
    return FieldDesc(p, a, _min_irreducible(p, a))


def field_from_order(q: int) -> FieldDesc:
    """Factor a prime power q into (p, a) and build the base field."""
    if q < 2:
        raise ValueError("field order must be at least 2")
    for p in range(2, q + 1):
        if q % p == 0:
            a = 0
            m = q
            while m % p == 0:
                m //= p
                a += 1
            if m != 1:
                raise ValueError(f"{q} is not a prime power")
            return field_make(p, a)
    raise ValueError(f"{q} is not a prime power")


class WorkingField:
    """F_{q^e} together with the canonical embedding of F_q.

    Elements are ints below `order`; see the module docstring for the
    encoding.  Immutable and thread-safe after construction.
    """

    __slots__ = (
        "base", "e", "p", "a", "q", "k", "order", "modulus", "gen",
        "embed", "embed_image", "_exp", "_log", "_mod_int", "_ppow",
        "_fq_solver",
    )

    def __init__(self, base: FieldDesc, e: int):
        self.base = base
        self.e = e
        self.p = base.p
        self.a = base.a
        self.q = base.q
        self.k = base.a * e
        self.order = self.p ** self.k
        self.modulus = _min_irreducible(self.p, self.k)
        self.gen = self.p if self.k > 1 else 0
        self._ppow = tuple(self.p ** i for i in range(self.k + 1))
        self._mod_int = _undigits(self.modulus, 2) if self.p == 2 else None
        if self.order <= config.TABLE_LIMIT:
            self._build_tables()
        else:
            self._exp = self._log = None
        self._fq_solver = None
        self._build_embedding()

    # -- raw arithmetic (used to bootstrap tables and above the table limit)

    def _raw_mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        if self.p == 2:
            k, mod = self.k, self._mod_int
            top = 1 << k
            r = 0
            while y:
                if y & 1:
                    r ^= x
                y >>= 1
                x <<= 1
                if x & top:
                    x ^= mod
            return r
        p, k = self.p, self.k
        da, db = _digits(x, p, k), _digits(y, p, k)
        prod = [0] * (2 * k - 1)
        for i, ai in enumerate(da):
            if ai:
                for j, bj in enumerate(db):
                    if bj:
                        prod[i + j] = (prod[i + j] + ai * bj) % p
        mod = self.modulus
        for i in range(2 * k - 2, k - 1, -1):
            c = prod[i]
            if c:
                prod[i] = 0
                for j in range(k):
                    prod[i - k + j] = (prod[i - k + j] - c * mod[j]) % p
        return _undigits(prod[:k], p)

    def _raw_pow(self, x: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self._raw_mul(r, x)
            x = self._raw_mul(x, x)
            n >>= 1
        return r

    def _build_tables(self):
        g = self._find_generator()
        n = self.order - 1
        exp = [1] * n
        cur = 1
        for i in range(1, n):
            cur = self._raw_mul(cur, g)
            exp[i] = cur
        log = [0] * self.order
        for i, v in enumerate(exp):
            log[v] = i
        self._exp = exp
        self._log = log

    def _find_generator(self) -> int:
        n = self.order - 1
        if n == 1:
            return 1
        factors = _prime_factors(n)
        for cand in range(2, self.order):
            if all(self._raw_pow(cand, n // r) != 1 for r in factors):
                return cand
        raise AssertionError("no generator found")

    def _build_embedding(self):
        if self.e == 1:
            self.embed_image = self.gen
            self.embed = tuple(range(self.q))
            return
        # smallest root of the base modulus, scanning canonical element order
        bm = self.base.modulus
        gamma = None
        for x in range(self.order):
            acc = 0
            for c in reversed(bm):
                acc = self.add(self.mul(acc, x), c)
            if acc == 0:
                gamma = x
                break
        if gamma is None:
            raise AssertionError("base modulus has no root in the working field")
        self.embed_image = gamma
        p, a = self.p, self.a
        gpow = [self.pow(gamma, i) for i in range(a)]
        table = []
        for b in range(self.q):
            acc = 0
            for i, d in enumerate(_digits(b, p, a)):
                if d:
                    acc = self.add(acc, self.mul(d, gpow[i]))
            table.append(acc)
        self.embed = tuple(table)

    # -- public arithmetic

    def add(self, x: int, y: int) -> int:
        if self.p == 2:
            return x ^ y
        p = self.p
        out = 0
        pe = 1
        while x or y:
            out += ((x % p + y % p) % p) * pe
            x //= p
            y //= p
            pe *= p
        return out

    def neg(self, x: int) -> int:
        if self.p == 2:
            return x
        p = self.p
        out = 0
        for pe in self._ppow[: self.k]:
            out += ((-(x // pe)) % p) * pe
        return out

    def sub(self, x: int, y: int) -> int:
        if self.p == 2:
            return x ^ y
        return self.add(x, self.neg(y))

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        if self._exp is not None:
            return self._exp[(self._log[x] + self._log[y]) % (self.order - 1)]
        return self._raw_mul(x, y)

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of 0")
        if self._exp is not None:
            n = self.order - 1
            return self._exp[(n - self._log[x]) % n]
        return self._raw_pow(x, self.order - 2)

    def pow(self, x: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(x), -n)
        if x == 0:
            return 1 if n == 0 else 0
        if self._exp is not None:
            m = self.order - 1
            return self._exp[(self._log[x] * n) % m]
        return self._raw_pow(x, n)

    def frobenius(self, x: int) -> int:
        """The q-power map; fixes exactly the embedded copy of F_q."""
        return self.pow(x, self.q)

    def elems(self) -> range:
        return range(self.order)

    # -- coordinates over F_q

    def fq_coords(self, x: int) -> tuple:
        """Coordinates of x against the F_q-basis 1, g, ..., g^(e-1)."""
        if self.e == 1:
            return (x,)
        solver = self._fq_solver
        if solver is None:
            solver = self._build_fq_solver()
        return solver(x)

    def _build_fq_solver(self):
        p, a, e, k = self.p, self.a, self.e, self.k
        # F_p-basis gamma^j * g^i, j < a, i < e; column index i*a + j
        cols = []
        for i in range(e):
            gi = self.pow(self.gen, i)
            for j in range(a):
                cols.append(_digits(self.mul(self.pow(self.embed_image, j), gi), p, k))
        # invert the k x k matrix over F_p
        mat = [[cols[c][r] for c in range(k)] for r in range(k)]
        inv = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
        for col in range(k):
            piv = next(r for r in range(col, k) if mat[r][col])
            mat[col], mat[piv] = mat[piv], mat[col]
            inv[col], inv[piv] = inv[piv], inv[col]
            s = pow(mat[col][col], p - 2, p)
            mat[col] = [(v * s) % p for v in mat[col]]
            inv[col] = [(v * s) % p for v in inv[col]]
            for r in range(k):
                if r != col and mat[r][col]:
                    c = mat[r][col]
                    mat[r] = [(mat[r][j] - c * mat[col][j]) % p for j in range(k)]
                    inv[r] = [(inv[r][j] - c * inv[col][j]) % p for j in range(k)]

        def solver(x: int) -> tuple:
            ds = _digits(x, p, k)
            sol = [sum(inv[r][j] * ds[j] for j in range(k)) % p for r in range(k)]
            return tuple(_undigits(sol[i * a:(i + 1) * a], p) for i in range(e))

        self._fq_solver = solver
        return solver

    # -- printing / parsing in the generator symbol g

    def elem_str(self, x: int) -> str:
        return elem_str(x, self.p, self.k)

    def elem_parse(self, text: str) -> int:
        return elem_parse(text, self.p, self.modulus)

    def __repr__(self):
        if self.e == 1:
            return repr(self.base)
        return f"{self.base!r}^{self.e}"


def elem_str(x: int, p: int, k: int) -> str:
    """Render an element index as a polynomial in g, descending powers."""
    if x == 0:
        return "0"
    parts = []
    for i in range(k - 1, -1, -1):
        c = (x // p ** i) % p
        if c == 0:
            continue
        if i == 0:
            parts.append(str(c))
        elif i == 1:
            parts.append("g" if c == 1 else f"{c}*g")
        else:
            parts.append(f"g^{i}" if c == 1 else f"{c}*g^{i}")
    return "+".join(parts)


def elem_parse(text: str, p: int, modulus: tuple) -> int:
    """Parse a polynomial in g over F_p and reduce modulo the given modulus."""
    coeffs = gpoly_parse(text, p)
    k = len(modulus) - 1
    if len(coeffs) > k:
        work = list(coeffs)
        for i in range(len(work) - 1, k - 1, -1):
            c = work[i]
            if c:
                work[i] = 0
                for j in range(k):
                    work[i - k + j] = (work[i - k + j] - c * modulus[j]) % p
        coeffs = work[:k]
    return _undigits(list(coeffs), p)


def gpoly_parse(text: str, p: int) -> list[int]:
    """Parse `c*g^i` sums into an F_p coefficient list (no reduction)."""
    s = text.replace(" ", "")
    if not s:
        raise PolySyntaxError("empty element", 0)
    coeffs = {}
    i = 0
    sign = 1
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        i = 1
    while i <= len(s):
        j = i
        while j < len(s) and s[j] not in "+-":
            j += 1
        term = s[i:j]
        if not term:
            raise PolySyntaxError("empty term in element", i)
        c, e = _gterm(term, p, i)
        coeffs[e] = (coeffs.get(e, 0) + sign * c) % p
        if j >= len(s):
            break
        sign = -1 if s[j] == "-" else 1
        i = j + 1
    if not coeffs:
        return [0]
    top = max(coeffs)
    return [coeffs.get(i, 0) for i in range(top + 1)]


def _gterm(term: str, p: int, pos: int):
    c = 1
    rest = term
    if rest and rest[0].isdigit():
        j = 0
        while j < len(rest) and rest[j].isdigit():
            j += 1
        c = int(rest[:j]) % p
        rest = rest[j:]
        if rest.startswith("*"):
            rest = rest[1:]
    if not rest:
        return c, 0
    if rest[0] != "g":
        raise PolySyntaxError(f"unexpected {rest!r} in element", pos)
    rest = rest[1:]
    e = 1
    if rest.startswith("^"):
        if not rest[1:].isdigit():
            raise PolySyntaxError("missing exponent after ^", pos)
        e = int(rest[1:])
        rest = ""
    elif rest:
        raise PolySyntaxError(f"unexpected {rest!r} in element", pos)
    return c, e


@lru_cache(maxsize=None)
def _build_working(desc: FieldDesc, e: int) -> WorkingField:
    return WorkingField(desc, e)


def field_extend(desc: FieldDesc, e: int) -> WorkingField:
    """Working field of size q^e with the verified canonical embedding."""
    if e < 1:
        raise ValueError("extension degree must be at least 1")
    bits_limit = config.max_field_bits()
    if desc.p ** (desc.a * e) > (1 << bits_limit):
        raise FieldSizeError(
            f"field of {desc.p}^{desc.a * e} elements exceeds the 2^{bits_limit} limit"
        )
    return _build_working(desc, e)


def field_enumerate(w: WorkingField) -> range:
    """All q^e elements in canonical order: 0 first, 1 second."""
    return w.elems()
