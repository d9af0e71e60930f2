"""Exact linear algebra over the rationals for small matrices."""

from __future__ import annotations

from fractions import Fraction

Vector = list
Matrix = list


def rref(rows: Matrix) -> tuple[Matrix, list[int]]:
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Matrix) -> int:
    return len(rref(rows)[1])


def span_basis(vectors) -> Matrix:
    vectors = [v for v in vectors]
    if not vectors:
        return []
    return rref(vectors)[0]


def nullspace(rows: Matrix, ncols: int | None = None) -> Matrix:
    """Basis of ``{v : A v = 0}``."""
    if not rows:
        n = ncols or 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    n = len(rows[0])
    red, piv = rref(rows)
    free = [c for c in range(n) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, p in enumerate(piv):
            v[p] = -red[r][f]
        out.append(v)
    return out


def solve(rows: Matrix, rhs: Vector) -> Vector | None:
    """One solution of ``A v = rhs`` or ``None``."""
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, piv = rref(aug)
    if n in piv:
        return None
    v = [Fraction(0)] * n
    for r, p in enumerate(piv):
        v[p] = red[r][n]
    return v


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def scal(a: Matrix, c) -> Matrix:
    return [[x * c for x in r] for r in a]


def matpow(a: Matrix, k: int) -> Matrix:
    out = identity(len(a))
    for _ in range(k):
        out = matmul(out, a)
    return out


def charpoly(a: Matrix) -> list[Fraction]:
    """Coefficients ``[1, c1, ..., cn]`` of ``det(z I - A)`` (Faddeev-LeVerrier)."""
    n = len(a)
    coeffs = [Fraction(1)]
    m = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        m = matmul(a, m)
        for i in range(n):
            m[i][i] += coeffs[-1]
        am = matmul(a, m)
        coeffs.append(-trace(am) / k)
    return coeffs


def inertia(sym: Matrix) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric rational matrix."""
    a = [list(map(Fraction, r)) for r in sym]
    n = len(a)
    pos = neg = 0
    active = list(range(n))
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            pair = next(
                ((i, j) for i in active for j in active if i < j and a[i][j] != 0), None
            )
            if pair is None:
                break
            i, j = pair
            # replace e_i by e_i + e_j, which makes the diagonal entry 2 a_ij
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        d = a[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        for i in active:
            if i != piv and a[i][piv] != 0:
                f = a[i][piv] / d
                for k in range(n):
                    a[i][k] -= f * a[piv][k]
        for i in active:
            if i != piv:
                a[piv][i] = Fraction(0)
                a[i][piv] = Fraction(0)
        active.remove(piv)
    return pos, neg, n - pos - neg


def in_span(basis: Matrix, v: Vector) -> bool:
    if not any(v):
        return True
    return rank(basis + [v]) == rank(basis)


def coordinates(basis: Matrix, v: Vector) -> Vector | None:
    """Coefficients of ``v`` in terms of ``basis`` vectors."""
    cols = [list(c) for c in zip(*basis)] if basis else []
    return solve(cols, list(v)) if basis else (None if any(v) else [])
