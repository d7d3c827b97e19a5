"""Dense Gaussian elimination over a working field.

Matrices are lists of row lists with int entries in the given field.  All
routines are deterministic: pivots are chosen as the first nonzero entry in
scan order, so reduced forms and enumeration orders are reproducible.
"""

from __future__ import annotations

from .gf import WorkingField


def rref(w: WorkingField, rows: list) -> tuple:
    """Reduced row echelon form; returns (pivot_columns, reduced_rows)."""
    mat = [list(r) for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = w.inv(mat[r][c])
        mat[r] = [w.mul(inv, v) for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [w.sub(mat[i][j], w.mul(f, mat[r][j])) for j in range(ncols)]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return pivots, mat[:r]


def rank(w: WorkingField, rows: list) -> int:
    return len(rref(w, rows)[0])


def rank_at_most(w: WorkingField, rows: list, bound: int) -> bool:
    """True iff rank(rows) <= bound; short-circuits once bound is exceeded."""
    mat = [list(r) for r in rows]
    if not mat:
        return bound >= 0
    ncols = len(mat[0])
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = w.inv(mat[r][c])
        prow = [w.mul(inv, v) for v in mat[r]]
        mat[r] = prow
        for i in range(r + 1, len(mat)):
            if mat[i][c]:
                f = mat[i][c]
                mat[i] = [w.sub(mat[i][j], w.mul(f, prow[j])) for j in range(ncols)]
        r += 1
        if r > bound:
            return False
        if r == len(mat):
            break
    return True


def solve(w: WorkingField, rows: list, rhs: list):
    """One solution of A x = b, or None when inconsistent."""
    if not rows:
        return None if any(rhs) else []
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots, red = rref(w, aug)
    if pivots and pivots[-1] == ncols:
        return None
    x = [0] * ncols
    for pc, row in zip(pivots, red):
        x[pc] = row[ncols]
    return x


def nullspace(w: WorkingField, rows: list, ncols: int) -> list:
    """Basis of the kernel of A, in canonical (free-column) order."""
    pivots, red = rref(w, rows)
    pivset = set(pivots)
    basis = []
    for fc in range(ncols):
        if fc in pivset:
            continue
        v = [0] * ncols
        v[fc] = 1
        for pc, row in zip(pivots, red):
            v[pc] = w.neg(row[fc])
        basis.append(v)
    return basis


def echelon(w: WorkingField, rows: list) -> list:
    """Forward elimination with unit pivots; returns [(pivot_col, row), ...]."""
    out = []
    for r in rows:
        vec = reduce_vector(w, out, r)
        pc = next((i for i, v in enumerate(vec) if v), None)
        if pc is not None:
            inv = w.inv(vec[pc])
            out.append((pc, [w.mul(inv, v) for v in vec]))
    out.sort(key=lambda t: t[0])
    return out


def reduce_vector(w: WorkingField, ech: list, vec: list) -> list:
    """Residue of vec after elimination against echelon rows."""
    v = list(vec)
    for pc, row in ech:
        if v[pc]:
            f = v[pc]
            v = [w.sub(v[j], w.mul(f, row[j])) for j in range(len(v))]
    return v


def in_rowspace(w: WorkingField, ech: list, vec) -> bool:
    return not any(reduce_vector(w, ech, list(vec)))


def enumerate_affine(w: WorkingField, particular: list, basis: list):
    """particular + span(basis), walking basis coefficients as base-q counters."""
    q = w.order
    total = q ** len(basis)
    n = len(particular)
    for t in range(total):
        v = list(particular)
        tt = t
        for b in basis:
            c = tt % q
            tt //= q
            if c:
                for i in range(n):
                    if b[i]:
                        v[i] = w.add(v[i], w.mul(c, b[i]))
        yield v
