"""Structure constants of realizations, algebra invariants and classification.

Low-dimensional real Lie algebras follow the Mubarakzyanov naming
(``A3.9`` with parameter ``q`` and so on). Dimensions up to three are
classified completely from invariants. In dimension four, solvable algebras
are identified by the nilradical and the induced action on it. Larger
algebras report a fingerprint only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .expr import (
    PARAM,
    SIGN,
    App,
    Expr,
    Num,
    Sym,
    add,
    free_symbols,
    is_sign,
    is_zero,
    mul,
    normalize,
    substitute,
    to_text,
)
from .expr import nf
from .fields import VectorField, commutator


class NotClosedError(ValueError):
    """A commutator is not in the span of the basis."""


class DependentBasisError(ValueError):
    """The basis fields are linearly dependent over the constants."""


# ------------------------------------------------------- structure constants


@dataclass(frozen=True)
class StructureConstants:
    """``[e_i, e_j] = sum_k c[i][j][k] e_k`` (0-based indices).

    Entries are ``Fraction`` for numeric algebras and ``Expr`` when they
    depend on parameters or sign symbols.
    """

    n: int
    c: tuple  # c[i][j][k]

    @staticmethod
    def from_relations(n: int, rel: dict) -> "StructureConstants":
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for (i, j), vec in rel.items():
            for k, v in vec.items():
                c[i][j][k] = v
                c[j][i][k] = _neg(v)
        return StructureConstants(n, tuple(tuple(tuple(r) for r in m) for m in c))

    @property
    def is_numeric(self) -> bool:
        return all(isinstance(v, Fraction) for m in self.c for r in m for v in r)

    def parameters(self) -> set[Sym]:
        out: set[Sym] = set()
        for m in self.c:
            for r in m:
                for v in r:
                    if isinstance(v, Expr):
                        out |= free_symbols(v)
        return out

    def instantiate(self, values: dict) -> "StructureConstants":
        """Substitute parameter values (keyed by name or ``Sym``)."""
        binds = {}
        for k, v in values.items():
            if isinstance(k, str):
                for s in self.parameters():
                    if s.name == k:
                        binds[s] = Num(Fraction(v))
            else:
                binds[k] = Num(Fraction(v))
        out = []
        for m in self.c:
            mm = []
            for r in m:
                rr = []
                for v in r:
                    if isinstance(v, Expr):
                        w = substitute(v, binds)
                        if not isinstance(w, Num):
                            raise ValueError(f"entry {to_text(w)} is not numeric after instantiation")
                        v = w.value
                    rr.append(v)
                mm.append(tuple(rr))
            out.append(tuple(mm))
        return StructureConstants(self.n, tuple(out))

    def bracket(self, a, b) -> list:
        n = self.n
        out = [Fraction(0)] * n
        for i in range(n):
            if not a[i]:
                continue
            for j in range(n):
                if not b[j] or i == j:
                    continue
                f = a[i] * b[j]
                row = self.c[i][j]
                for k in range(n):
                    if row[k]:
                        out[k] += f * row[k]
        return out

    def ad(self, v) -> la.Matrix:
        """Matrix of ``ad_v`` acting on coordinate columns."""
        n = self.n
        cols = [self.bracket(v, _unit(n, j)) for j in range(n)]
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def relations_text(self) -> str:
        parts = []
        for i in range(self.n):
            for j in range(i + 1, self.n):
                terms = []
                for k, v in enumerate(self.c[i][j]):
                    if isinstance(v, Fraction) and v == 0:
                        continue
                    if isinstance(v, Expr) and v == Num(0):
                        continue
                    terms.append((k, v))
                if terms:
                    rhs = " + ".join(f"({_fmt(v)})*e{k + 1}" for k, v in terms)
                    parts.append(f"[e{i + 1},e{j + 1}] = {rhs}")
        return "; ".join(parts) or "abelian"


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return to_text(v)


def _neg(v):
    return -v if isinstance(v, Fraction) else normalize(mul(Num(-1), v))


def _unit(n: int, i: int) -> list:
    return [Fraction(int(k == i)) for k in range(n)]


def _is_param_side(e: Expr) -> bool:
    return all(s.kind in (PARAM, SIGN) for s in free_symbols(e))


def _split_param(r: nf.Rat) -> dict:
    """Group a Laurent numerator by monomials in non-parameter generators."""
    out: dict = {}
    for (gens, ex), c in r.num.items():
        key_g, par_g = [], []
        for g, k in gens:
            (par_g if _is_param_side(g) else key_g).append((g, k))
        key_ex, par_ex = (ex, None)
        if ex is not None and _is_param_side(ex):
            key_ex, par_ex = None, ex
        key = (tuple(key_g), key_ex)
        coef = nf.Rat({(tuple(par_g), par_ex): c})
        out[key] = nf.rat_add(out.get(key, nf.ZERO_RAT), coef)
    return out


def _to_scalar(r: nf.Rat):
    e = nf.to_expr(r)
    return e.value if isinstance(e, Num) else e


def structure_constants(
    basis: list[VectorField], rules: tuple = (), chart: dict | None = None
) -> StructureConstants:
    """Compute ``[Q_i, Q_j]`` in the basis, with constants possibly depending on parameters."""
    if chart:
        basis = [q.substitute(chart, rules) for q in basis]
    n = len(basis)
    comps = [[nf.to_rat(c, rules) for c in q.components] for q in basis]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    brackets = {p: commutator(basis[p[0]], basis[p[1]], rules) for p in pairs}
    # rows: (component, non-parameter monomial) -> coefficients of the n unknowns
    rows: dict = {}
    rhs: dict = {}
    for comp in range(3):
        rats = [comps[k][comp] for k in range(n)]
        br = [nf.to_rat(brackets[p].components[comp], rules) for p in pairs]
        den = nf.ONE_POLY
        seen = []
        for r in rats + br:
            if not nf._is_one(r.den) and r.den not in seen:
                seen.append(r.den)
                den = nf.p_mul(den, r.den)
        D = nf.Rat(den) if not nf._is_one(den) else None
        for k, r in enumerate(rats):
            rr = nf.rat_mul(r, D) if D else r
            for key, v in _split_param(rr).items():
                rows.setdefault((comp, key), [nf.ZERO_RAT] * n)[k] = v
        for pi, r in enumerate(br):
            rr = nf.rat_mul(r, D) if D else r
            for key, v in _split_param(rr).items():
                rhs.setdefault((comp, key), [nf.ZERO_RAT] * len(pairs))[pi] = v
    keys = list(rows) + [k for k in rhs if k not in rows]
    A = [rows.get(k, [nf.ZERO_RAT] * n) + rhs.get(k, [nf.ZERO_RAT] * len(pairs)) for k in keys]
    red, piv = _rref_rat(A, n)
    if len(piv) < n:
        raise DependentBasisError("basis fields are linearly dependent over the constants")
    for row in red[len(piv):]:
        for pi, v in enumerate(row[n:]):
            if not v.is_zero():
                i, j = pairs[pi]
                raise NotClosedError(
                    f"[Q{i + 1}, Q{j + 1}] = {brackets[pairs[pi]]} is not in the span of the basis"
                )
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for pi, (i, j) in enumerate(pairs):
        for r, p in enumerate(piv):
            v = _to_scalar(red[r][n + pi])
            c[i][j][p] = v
            c[j][i][p] = _neg(v)
    sc = StructureConstants(n, tuple(tuple(tuple(r) for r in m) for m in c))
    _verify_expansion(basis, brackets, sc, pairs, rules)
    return sc


def _verify_expansion(basis, brackets, sc, pairs, rules):
    for (i, j) in pairs:
        combo = brackets[(i, j)]
        for k in range(sc.n):
            v = sc.c[i][j][k]
            if isinstance(v, Fraction) and v == 0:
                continue
            combo = combo - basis[k].scaled(Num(v) if isinstance(v, Fraction) else v)
        if not combo.is_zero(rules):
            raise NotClosedError(f"expansion of [Q{i + 1}, Q{j + 1}] failed verification")


def _rref_rat(rows: list, ncols: int):
    m = [list(r) for r in rows]
    piv: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if not m[i][c].is_zero()), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = nf.rat_inv(m[r][c])
        m[r] = [nf.rat_mul(v, inv) for v in m[r]]
        for i in range(len(m)):
            if i != r and not m[i][c].is_zero():
                f = m[i][c]
                m[i] = [nf.rat_sub(a, nf.rat_mul(f, b)) for a, b in zip(m[i], m[r])]
        piv.append(c)
        r += 1
    return m, piv


# ------------------------------------------------------------ Jacobi check


def jacobi_check(sc: StructureConstants) -> bool:
    """Antisymmetry and the Jacobi identity, symbolically if entries are expressions."""
    n = sc.n
    if sc.is_numeric:
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if sc.c[i][j][k] != -sc.c[j][i][k]:
                        return False
        for i, j, k in itertools.combinations(range(n), 3):
            ei, ej, ek = _unit(n, i), _unit(n, j), _unit(n, k)
            s = [
                a + b + c
                for a, b, c in zip(
                    sc.bracket(sc.bracket(ei, ej), ek),
                    sc.bracket(sc.bracket(ej, ek), ei),
                    sc.bracket(sc.bracket(ek, ei), ej),
                )
            ]
            if any(s):
                return False
        return True
    E = [[[v if isinstance(v, Expr) else Num(v) for v in r] for r in m] for m in sc.c]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if not is_zero(add(E[i][j][k], E[j][i][k])).value:
                    return False
    for i, j, k in itertools.combinations(range(n), 3):
        for m in range(n):
            terms = []
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                for l in range(n):
                    terms.append(mul(E[a][b][l], E[l][c][m]))
            if not is_zero(add(*terms)).value:
                return False
    return True


# -------------------------------------------------------------- invariants


def _bracket_space(sc, A, B) -> la.Matrix:
    return la.span_basis([sc.bracket(a, b) for a in A for b in B])


def _identity_basis(n):
    return [_unit(n, i) for i in range(n)]


def derived_series(sc: StructureConstants) -> list[int]:
    """Dimensions down to the first repeat, so ``[3, 3]`` marks a perfect algebra."""
    cur = _identity_basis(sc.n)
    dims = [sc.n]
    while True:
        nxt = _bracket_space(sc, cur, cur)
        dims.append(len(nxt))
        if len(nxt) == len(cur):
            return dims
        cur = nxt
        if not cur:
            return dims


def lower_central_series(sc: StructureConstants) -> list[int]:
    full = _identity_basis(sc.n)
    cur = full
    dims = [sc.n]
    while True:
        nxt = _bracket_space(sc, full, cur)
        dims.append(len(nxt))
        if len(nxt) == len(cur):
            return dims
        cur = nxt
        if not cur:
            return dims


def center(sc: StructureConstants) -> la.Matrix:
    n = sc.n
    rows = []
    for j in range(n):
        # [v, e_j] = sum_i v_i c[i][j][k]
        for k in range(n):
            rows.append([sc.c[i][j][k] for i in range(n)])
    return la.nullspace(rows, n)


def killing_form(sc: StructureConstants) -> la.Matrix:
    ads = [sc.ad(_unit(sc.n, i)) for i in range(sc.n)]
    return [[la.trace(la.matmul(ads[i], ads[j])) for j in range(sc.n)] for i in range(sc.n)]


@dataclass(frozen=True)
class KillingData:
    rank: int
    signature: tuple[int, int]  # (positive, negative)


def killing_data(sc: StructureConstants) -> KillingData:
    K = killing_form(sc)
    p, q, _ = la.inertia(K)
    return KillingData(p + q, (p, q))


def radical(sc: StructureConstants) -> la.Matrix:
    """Solvable radical: Killing-orthogonal complement of the derived algebra."""
    D = _bracket_space(sc, _identity_basis(sc.n), _identity_basis(sc.n))
    if not D:
        return _identity_basis(sc.n)
    K = killing_form(sc)
    rows = [[sum(d[i] * K[i][j] for i in range(sc.n)) for j in range(sc.n)] for d in D]
    return la.span_basis(la.nullspace(rows, sc.n))


def nilradical(sc: StructureConstants) -> la.Matrix:
    """Largest nilpotent ideal.

    Elements of the radical whose adjoint lies in the Jacobson radical of the
    associative algebra generated by ``ad`` of the radical. That radical is
    found with the trace-form criterion.
    """
    n = sc.n
    R = radical(sc)
    if not R:
        return []
    gens = [sc.ad(v) for v in R]
    flat = lambda M: [x for row in M for x in row]
    basis: list = []
    mats: list = []

    def add_mat(M):
        v = flat(M)
        if la.in_span(basis, v) if basis else not any(v):
            return False
        basis.append(v)
        mats.append(M)
        return True

    queue = [g for g in gens]
    for g in gens:
        add_mat(g)
    grew = True
    while grew:
        grew = False
        for a in list(mats):
            for g in gens:
                if add_mat(la.matmul(a, g)):
                    grew = True
    if not mats:
        return la.span_basis(R)
    gram = [[la.trace(la.matmul(a, b)) for b in mats] for a in mats]
    rad_coeffs = la.nullspace(gram, len(mats))
    rad_vecs = [
        [sum(c * basis[i][p] for i, c in enumerate(coef)) for p in range(n * n)]
        for coef in rad_coeffs
    ]
    # v in R with ad(v) in span(rad_vecs): unknowns are coordinates of v in R and coefficients in rad
    ad_R = [flat(g) for g in gens]
    cols = ad_R + [[-x for x in r] for r in rad_vecs]
    rows = [[col[p] for col in cols] for p in range(n * n)]
    sols = la.nullspace(rows, len(cols))
    vecs = []
    for s in sols:
        v = [sum(s[i] * R[i][p] for i in range(len(R))) for p in range(n)]
        vecs.append(v)
    vecs = [v for v in vecs if any(v)]
    return la.span_basis(vecs) if vecs else []


@dataclass(frozen=True)
class Fingerprint:
    dim: int
    derived: tuple
    lower_central: tuple
    center_dim: int
    nilradical_dim: int
    radical_dim: int
    killing: KillingData

    def text(self) -> str:
        k = self.killing
        return (
            f"dim={self.dim} derived={list(self.derived)} lcs={list(self.lower_central)} "
            f"center={self.center_dim} nilradical={self.nilradical_dim} "
            f"radical={self.radical_dim} killing rank={k.rank} signature={k.signature}"
        )


def fingerprint(sc: StructureConstants) -> Fingerprint:
    return Fingerprint(
        sc.n,
        tuple(derived_series(sc)),
        tuple(lower_central_series(sc)),
        len(center(sc)),
        len(nilradical(sc)),
        len(radical(sc)),
        killing_data(sc),
    )


# ---------------------------------------------------------- classification


@dataclass(frozen=True)
class Classification:
    label: str | None
    params: tuple = ()  # ((name, Fraction), ...) canonical invariants
    fingerprint: Fingerprint | None = None
    candidates: tuple = ()

    @property
    def ambiguous(self) -> bool:
        return self.label is None and bool(self.candidates)

    def text(self) -> str:
        if self.label is None:
            if self.candidates:
                return "ambiguous: " + " | ".join(self.candidates)
            return "unidentified"
        if not self.params:
            return self.label
        ps = ", ".join(f"{k}={v}" for k, v in self.params)
        return f"{self.label}({ps})"

    def same_as(self, other: "Classification") -> bool:
        if self.label is not None and other.label is not None:
            return self.label == other.label and self.params == other.params
        if self.fingerprint is None or other.fingerprint is None:
            return False
        if self.fingerprint != other.fingerprint:
            return False
        if self.label is None and self.candidates and other.label is not None:
            return other.label in self.candidates
        if other.label is None and other.candidates and self.label is not None:
            return self.label in other.candidates
        return True


COMMON_NAMES = {"A3.3": "sl(2,R)", "A3.4": "so(3)", "A3.5": "Heisenberg"}


def _restrict(sc: StructureConstants, vecs: la.Matrix) -> StructureConstants:
    """Structure constants of the subalgebra spanned by ``vecs``."""
    m = len(vecs)
    rel = {}
    for i in range(m):
        for j in range(i + 1, m):
            br = sc.bracket(vecs[i], vecs[j])
            coords = la.coordinates(vecs, br)
            if coords is None:
                raise NotClosedError("subspace is not a subalgebra")
            rel[(i, j)] = {k: v for k, v in enumerate(coords) if v}
    return StructureConstants.from_relations(m, rel)


def _complement(sub: la.Matrix, n: int) -> la.Matrix:
    out = list(sub)
    extra = []
    for i in range(n):
        e = _unit(n, i)
        if not la.in_span(out, e):
            out.append(e)
            extra.append(e)
    return extra


def _split_central(sc: StructureConstants):
    """Return an ideal H with L = H + A1 (direct), or None."""
    n = sc.n
    Z = center(sc)
    D = _bracket_space(sc, _identity_basis(n), _identity_basis(n))
    for z in Z:
        if not la.in_span(D, z):
            basis = list(D) + [z]
            basis = la.span_basis(D) + [z] if D else [z]
            rest = _complement(basis, n)
            H = (la.span_basis(D) if D else []) + rest
            return _restrict(sc, H)
    return None


def _combine_a1(label: str | None, params=()):
    if label is None:
        return None
    parts = label.split("+")
    count = 1
    keep = []
    for p in parts:
        if p.endswith("A1"):
            k = p[:-2]
            count += int(k) if k else 1
        else:
            keep.append(p)
    a1 = "A1" if count == 1 else f"{count}A1"
    return "+".join(keep + [a1])


def _eig_ratio_canonical(a: Fraction, b: Fraction) -> Fraction:
    """Ratio of two nonzero eigenvalues, normalized into [-1, 1]."""
    r = b / a
    return r if abs(r) <= 1 else 1 / r


def _sqrt_fraction(v: Fraction):
    from math import isqrt

    if v < 0:
        return None
    n, d = v.numerator, v.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _classify_2x2(M) -> tuple[str, tuple]:
    """Label of the solvable algebra ``D semidirect <x>`` with ad_x|D = M (2x2)."""
    tr = M[0][0] + M[1][1]
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    disc = tr * tr - 4 * det
    scalar = M[0][1] == 0 and M[1][0] == 0 and M[0][0] == M[1][1]
    if scalar:
        return "A3.7", ()
    if disc == 0:
        return "A3.6", ()
    if disc > 0:
        if tr == 0:
            return "A3.8", ()
        s = _sqrt_fraction(disc)
        if s is not None:
            l1, l2 = (tr + s) / 2, (tr - s) / 2
            big, small = (l1, l2) if abs(l1) >= abs(l2) else (l2, l1)
            return "A3.9", (("q", small / big),)
        return "A3.9", (("(1+q)^2/q", tr * tr / det),)
    if tr == 0:
        return "A3.10", ()
    q2 = tr * tr / (-disc)
    s = _sqrt_fraction(q2)
    return "A3.11", ((("q", s),) if s is not None else (("q^2", q2),))


def _action_on(sc, x, N) -> la.Matrix:
    """Matrix of ad_x restricted to the invariant subspace spanned by ``N``."""
    cols = []
    for v in N:
        coords = la.coordinates(N, sc.bracket(x, v))
        if coords is None:
            raise NotClosedError("subspace not invariant")
        cols.append(coords)
    m = len(N)
    return [[cols[j][i] for j in range(m)] for i in range(m)]


def _factor_charpoly(M):
    import sympy

    z = sympy.Symbol("z")
    cp = la.charpoly(M)
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in cp], z, domain="QQ")
    _, factors = poly.factor_list()
    out = []
    for f, mult in factors:
        coeffs = [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in f.all_coeffs()]
        lead = coeffs[0]
        out.append(([c / lead for c in coeffs], mult))
    return out


def _jordan_sizes(M, lam: Fraction) -> list[int]:
    n = len(M)
    A = la.sub(M, la.scal(la.identity(n), lam))
    ranks = [n]
    P = la.identity(n)
    while True:
        P = la.matmul(P, A)
        r = la.rank(P)
        ranks.append(r)
        if r == ranks[-2]:
            break
    # number of blocks of size >= k is rank(A^{k-1}) - rank(A^k)
    ge = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    sizes = []
    for k in range(len(ge)):
        nxt = ge[k + 1] if k + 1 < len(ge) else 0
        sizes += [k + 1] * (ge[k] - nxt)
    return sorted(sizes, reverse=True)


def _classify_abelian_ideal_3(M) -> tuple[str | None, tuple, tuple]:
    """4-dim algebras ``3A1 semidirect <x>``; returns (label, params, candidates)."""
    factors = _factor_charpoly(M)
    lin = [(-f[1], m) for f, m in factors if len(f) == 2]
    quad = [f for f, m in factors if len(f) == 3]
    if quad:
        (_, b, c), = quad
        (nu, _), = lin
        # complex pair a +- i w with a = -b/2, w^2 = c - b^2/4
        a = -b / 2
        w2 = c - b * b / 4
        if w2 <= 0:
            return None, (), ("A4.5", "A4.6")
        params = (("p^2", a * a / w2), ("q^2", nu * nu / w2), ("sign(pq)", Fraction((a * nu > 0) - (a * nu < 0))))
        return "A4.6", params, ()
    eig = []
    for lam, mult in lin:
        eig += [lam] * mult
    if len(eig) != 3:
        return None, (), ("A4.5",)
    blocks = {lam: _jordan_sizes(M, lam) for lam, _ in lin}
    if any(max(s) == 3 for s in blocks.values()):
        lam = next(l for l, s in blocks.items() if max(s) == 3)
        return ("A4.4", (), ()) if lam != 0 else (None, (), ("nilpotent",))
    two = [l for l, s in blocks.items() if 2 in s]
    if two:
        mu = two[0]
        rest = [l for l in eig if l != mu] or [mu]
        nu = rest[0] if len(rest) == 1 else mu
        if mu == 0:
            return "A4.3", (), ()
        return "A4.2", (("q", nu / mu),), ()
    if 0 in eig:
        return None, (), ("decomposable",)
    big = max(abs(l) for l in eig)
    cands = []
    for d in {l for l in eig if abs(l) == big}:
        rest = sorted((l / d for l in eig), reverse=True)
        rest.remove(Fraction(1))
        q, p = rest
        cands.append((q, p))
    q, p = max(cands)
    return "A4.5", (("q", q), ("p", p)), ()


def _classify_heisenberg_ideal(sc, x, N) -> tuple[str | None, tuple]:
    # N/[N,N] action
    NN = _bracket_space(sc, N, N)
    comp = []
    span = list(NN)
    for v in N:
        if not la.in_span(span, v):
            span.append(v)
            comp.append(v)
    full = list(NN) + comp
    cols = []
    for v in comp:
        coords = la.coordinates(full, sc.bracket(x, v))
        cols.append(coords[len(NN):])
    M = [[cols[j][i] for j in range(2)] for i in range(2)]
    tr = M[0][0] + M[1][1]
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    disc = tr * tr - 4 * det
    scalar = M[0][1] == 0 and M[1][0] == 0 and M[0][0] == M[1][1]
    if scalar:
        return "A4.8", (("q", Fraction(1)),)
    if disc == 0:
        return "A4.7", ()
    if disc > 0:
        s = _sqrt_fraction(disc)
        if s is None:
            return "A4.8", (("(1+q)^2/q", tr * tr / det if det else None),)
        l1, l2 = (tr + s) / 2, (tr - s) / 2
        big, small = (l1, l2) if abs(l1) >= abs(l2) else (l2, l1)
        return "A4.8", (("q", small / big),)
    q2 = tr * tr / (-disc)
    s = _sqrt_fraction(q2)
    return "A4.9", ((("q", s),) if s is not None else (("q^2", q2),))


def classify(sc: StructureConstants) -> Classification:
    if not sc.is_numeric:
        raise ValueError("instantiate parameters before classification")
    fp = fingerprint(sc)
    label, params, cands = _identify(sc, fp)
    return Classification(label, params, fp, cands)


def _identify(sc: StructureConstants, fp: Fingerprint):
    n = sc.n
    if n == 0:
        return "0", (), ()
    if n == 1:
        return "A1", (), ()
    H = _split_central(sc)
    if H is not None:
        sub_label, sub_params, sub_c = _identify(H, fingerprint(H))
        if sub_label is None:
            return None, (), tuple(_combine_a1(c) for c in sub_c)
        return _combine_a1(sub_label), sub_params, ()
    full = _identity_basis(n)
    D = _bracket_space(sc, full, full)
    if n == 2:
        return ("A2.2", (), ()) if len(D) == 1 else ("2A1", (), ())
    if n == 3:
        if len(D) == 3:
            return ("A3.3", (), ()) if fp.killing.signature == (2, 1) else ("A3.4", (), ())
        if len(D) == 1:
            return "A3.5", (), ()  # central derived algebra: Heisenberg
        x = _complement(D, n)[0]
        return (*_classify_2x2(_action_on(sc, x, D)), ())
    if n == 4:
        return _identify4(sc, fp, D)
    return None, (), ()


def _identify4(sc, fp: Fingerprint, D):
    n = 4
    if fp.radical_dim < n:
        sig = fp.killing.signature
        if fp.radical_dim == 1:
            return ("A3.3+A1" if sig == (2, 1) else "A3.4+A1"), (), ()
        return None, (), ()
    N = nilradical(sc)
    if len(N) == n:
        lcs = fp.lower_central
        if len(D) == 2:
            return "A4.1", (), ()
        return None, (), ("A3.5+A1",)
    x = _complement(N, n)
    if len(N) == 3:
        NN = _bracket_space(sc, N, N)
        if not NN:
            label, params, cands = _classify_abelian_ideal_3(_action_on(sc, x[0], N))
            return label, params, cands
        label, params = _classify_heisenberg_ideal(sc, x[0], N)
        return label, params, ()
    if len(N) == 2:
        M1 = _action_on(sc, x[0], N)
        M2 = _action_on(sc, x[1], N)
        for M in (M1, M2, la.sub(M1, la.scal(M2, -1)), la.sub(M1, la.scal(M2, 1))):
            tr = M[0][0] + M[1][1]
            det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
            if tr * tr - 4 * det < 0:
                return "A4.10", (), ()
        return "2A2.2", (), ()
    return None, (), ()


# ------------------------------------------------------- abstract algebras


def _q(name: str = "q"):
    return Sym(name, PARAM)


def parse_relations(text: str, n: int, params=(), signs=()) -> StructureConstants:
    """Parse ``[e1,e3] = e1; [e2,e3] = q*e2`` into structure constants."""
    import re

    from .expr.split import poly_coefficients
    from .parser import make_table, parse_raw

    table = make_table(params=params, signs=signs)
    aux = tuple(f"e{i + 1}" for i in range(n))
    evars = [Sym(a, "aux") for a in aux]
    rel = {}
    for part in [p for p in text.split(";") if p.strip()]:
        m = re.fullmatch(r"\s*\[\s*e(\d+)\s*,\s*e(\d+)\s*\]\s*=(.*)", part, re.S)
        if not m:
            raise ValueError(f"bad relation {part!r}")
        i, j = int(m.group(1)) - 1, int(m.group(2)) - 1
        rhs = parse_raw(m.group(3), table, aux)
        coeffs = poly_coefficients(rhs, evars)
        vec = {}
        for exps, c in coeffs.items():
            if sum(exps) == 0:
                if normalize(c) != Num(0):
                    raise ValueError(f"relation {part!r} has a constant term")
                continue
            if sum(exps) != 1:
                raise ValueError(f"relation {part!r} is not linear")
            k = exps.index(1)
            c = normalize(c)
            vec[k] = c.value if isinstance(c, Num) else c
        if i > j:
            i, j = j, i
            vec = {k: _neg(v) for k, v in vec.items()}
        rel[(i, j)] = vec
    return StructureConstants.from_relations(n, rel)


CANONICAL = {
    "A1": (1, "", ()),
    "2A1": (2, "", ()),
    "A2.2": (2, "[e1,e2] = e1", ()),
    "3A1": (3, "", ()),
    "A2.2+A1": (3, "[e1,e2] = e1", ()),
    "A3.3": (3, "[e1,e2] = e1; [e2,e3] = e3; [e1,e3] = 2*e2", ()),
    "A3.4": (3, "[e1,e2] = e3; [e2,e3] = e1; [e3,e1] = e2", ()),
    "A3.5": (3, "[e2,e3] = e1", ()),
    "A3.6": (3, "[e1,e3] = e1; [e2,e3] = e1 + e2", ()),
    "A3.7": (3, "[e1,e3] = e1; [e2,e3] = e2", ()),
    "A3.8": (3, "[e1,e3] = e1; [e2,e3] = -e2", ()),
    "A3.9": (3, "[e1,e3] = e1; [e2,e3] = q*e2", ("q",)),
    "A3.10": (3, "[e1,e3] = -e2; [e2,e3] = e1", ()),
    "A3.11": (3, "[e1,e3] = q*e1 - e2; [e2,e3] = e1 + q*e2", ("q",)),
    "A4.1": (4, "[e2,e4] = e1; [e3,e4] = e2", ()),
    "A4.2": (4, "[e1,e4] = q*e1; [e2,e4] = e2; [e3,e4] = e2 + e3", ("q",)),
    "A4.3": (4, "[e1,e4] = e1; [e3,e4] = e2", ()),
    "A4.4": (4, "[e1,e4] = e1; [e2,e4] = e1 + e2; [e3,e4] = e2 + e3", ()),
    "A4.5": (4, "[e1,e4] = e1; [e2,e4] = q*e2; [e3,e4] = p*e3", ("q", "p")),
    "A4.6": (4, "[e1,e4] = q*e1; [e2,e4] = p*e2 - e3; [e3,e4] = e2 + p*e3", ("q", "p")),
    "A4.7": (4, "[e2,e3] = e1; [e1,e4] = 2*e1; [e2,e4] = e2; [e3,e4] = e2 + e3", ()),
    "A4.8": (4, "[e2,e3] = e1; [e1,e4] = (1+q)*e1; [e2,e4] = e2; [e3,e4] = q*e3", ("q",)),
    "A4.9": (4, "[e2,e3] = e1; [e1,e4] = 2*q*e1; [e2,e4] = q*e2 - e3; [e3,e4] = e2 + q*e3", ("q",)),
    "A4.10": (4, "[e1,e3] = e1; [e2,e3] = e2; [e1,e4] = -e2; [e2,e4] = e1", ()),
    "2A2.2": (4, "[e1,e2] = e1; [e3,e4] = e3", ()),
    "A3.3+A1": (4, "[e1,e2] = e1; [e2,e3] = e3; [e1,e3] = 2*e2", ()),
    "A3.4+A1": (4, "[e1,e2] = e3; [e2,e3] = e1; [e3,e1] = e2", ()),
}
ALIASES = {"A3.1": "3A1", "A3.2": "A2.2+A1", "A2.1": "2A1", "2A2.2": "2A2.2"}


def canonical_tensor(label: str, **params) -> StructureConstants:
    """Canonical structure constants for a label, e.g. ``canonical_tensor("A3.9", q=1/3)``."""
    base = label
    if base.endswith("+A1") and base not in CANONICAL:
        inner = canonical_tensor(base[: -len("+A1")], **params)
        return direct_sum_a1(inner)
    base = ALIASES.get(base, base)
    if base not in CANONICAL:
        raise KeyError(f"unknown algebra label {label!r}")
    n, rel, names = CANONICAL[base]
    sc = parse_relations(rel, n, params=names)
    if names:
        missing = [p for p in names if p not in params]
        if missing:
            raise ValueError(f"label {label} needs parameters {missing}")
        sc = sc.instantiate({p: params[p] for p in names})
    return sc


def direct_sum_a1(sc: StructureConstants) -> StructureConstants:
    n = sc.n + 1
    rel = {}
    for i in range(sc.n):
        for j in range(i + 1, sc.n):
            rel[(i, j)] = {k: v for k, v in enumerate(sc.c[i][j]) if v}
    return StructureConstants.from_relations(n, rel)


def change_basis(sc: StructureConstants, P) -> StructureConstants:
    """Structure constants in the basis ``f_i = sum_j P[i][j] e_j`` (numeric tensors only)."""
    n = sc.n
    P = [[Fraction(v) for v in row] for row in P]
    if la.rank(P) != n:
        raise ValueError("change of basis must be invertible")
    Pt = [list(col) for col in zip(*P)]
    rel = {}
    for a in range(n):
        for b in range(a + 1, n):
            w = sc.bracket(P[a], P[b])
            y = la.solve(Pt, w)
            rel[(a, b)] = {k: v for k, v in enumerate(y) if v}
    return StructureConstants.from_relations(n, rel)
