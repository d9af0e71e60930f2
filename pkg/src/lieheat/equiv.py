"""Point transformations acting on vector fields and on class members.

A map sends ``(t, x, u)`` to ``(tb, xb, ub)``. Barred coordinates are
written with the ordinary names ``t, x, u`` once the map is applied, so
transformed fields and right-hand sides can be fed straight back into the
rest of the library.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .expr import (
    AUX,
    JET,
    App,
    Expr,
    Num,
    Sym,
    T,
    U,
    U_T,
    U_X,
    U_XX,
    X,
    add,
    app,
    diff,
    free_symbols,
    is_zero,
    jet,
    jet_index,
    mul,
    normalize,
    power,
    sqrt_,
    substitute,
    to_text,
    total_diff,
)
from .fields import VectorField

_TB, _XB, _UB, _VX = (Sym(n, AUX) for n in ("tb__", "xb__", "ub__", "vx__"))
_MAX_ORDER = 6


class ClassViolation(ValueError):
    """The transformed equation is not of the form ``u_t = u_xx + F(t,x,u,u_x)``."""


class MissingInverseError(ValueError):
    """A concrete map needs an explicit inverse for this operation."""


class ChartMismatch(ValueError):
    pass


@dataclass(frozen=True)
class EquivalenceMap:
    """``tb = T, xb = X, ub = U`` with optional inverse ``(t, x, u)`` in barred names.

    ``inverse`` entries are expressions in ``t, x, u`` read as barred
    coordinates. ``kind`` is ``"concrete"`` or ``"abstract"``.
    """

    t_new: Expr
    x_new: Expr
    u_new: Expr
    inverse: tuple | None = None
    kind: str = "concrete"
    eps: int = 1
    chart: tuple = ()  # sign assumptions, e.g. (("T'", 1),)
    rules: tuple = ()

    @property
    def components(self) -> tuple[Expr, Expr, Expr]:
        return (self.t_new, self.x_new, self.u_new)

    def with_inverse(self, inverse) -> "EquivalenceMap":
        return EquivalenceMap(*self.components, tuple(inverse), self.kind, self.eps, self.chart, self.rules)


def identity_map() -> EquivalenceMap:
    return EquivalenceMap(T, X, U, (T, X, U))


def abstract_map(eps: int = 1) -> EquivalenceMap:
    """``tb = T(t), xb = eps sqrt(T'(t)) x + X(t), ub = U(t, x, u)``."""
    Tt = app("T", (T,))
    dT = App("T", (T,), (1,))
    return EquivalenceMap(
        Tt,
        add(mul(eps, sqrt_(dT), X), app("X", (T,))),
        app("U", (T, X, U)),
        None,
        "abstract",
        eps,
        (("T'", 1),),
    )


def check_inverse(m: EquivalenceMap) -> bool:
    """The supplied inverse composed with the map is the identity."""
    if m.inverse is None:
        raise MissingInverseError("map has no inverse")
    back = [substitute(c, dict(zip((T, X, U), m.components)), m.rules) for c in m.inverse]
    return all(is_zero(add(b, mul(-1, v)), m.rules).value for b, v in zip(back, (T, X, U)))


def _to_barred(e: Expr, m: EquivalenceMap) -> Expr:
    """Rewrite an expression in source coordinates in terms of barred coordinates."""
    inv = _inverse_or_partial(m, e)
    return substitute(e, dict(zip((T, X, U), inv)), m.rules)


def _inverse_or_partial(m: EquivalenceMap, e: Expr) -> tuple:
    if m.inverse is not None:
        return m.inverse
    inv = []
    fs = free_symbols(e)
    for v, c in zip((T, X, U), m.components):
        if normalize(c, m.rules) == v:
            inv.append(v)
        elif v in fs:
            raise MissingInverseError(f"result depends on {v.name}; supply an inverse for the map")
        else:
            inv.append(v)
    return tuple(inv)


def pushforward_field(m: EquivalenceMap, q: VectorField, barred: bool | None = None) -> VectorField:
    """Image of ``q`` under the map.

    With ``barred`` true (the default when an inverse is known) the
    coefficients are expressed in barred coordinates; otherwise they stay
    functions of the source coordinates.
    """
    if m.kind == "abstract":
        _require_reduced_class(q, m.rules)
    comps = [normalize(q.apply(c), m.rules) for c in m.components]
    if barred is None:
        barred = m.inverse is not None
    if barred:
        comps = [_to_barred(c, m) for c in comps]
    return VectorField(*comps)


def _require_reduced_class(q: VectorField, rules) -> None:
    tau, xi, _ = q.components
    bad = any(s in (X, U) for s in free_symbols(normalize(tau, rules)))
    bad = bad or any(
        not is_zero(d, rules).value for d in (diff(xi, U), diff(diff(xi, X), X))
    )
    if bad:
        raise ClassViolation(f"{q} is not of the reduced form 2a dt + (a' x + b) dx + f du")


# ---------------------------------------------------------------- jets


def _on_manifold(e: Expr, F: Expr, rules: tuple = ()) -> Expr:
    """Eliminate every jet with a t-derivative using ``u_t = u_xx + F``."""
    cache: dict = {}

    def t_jet_value(k: int, m: int) -> Expr:
        key = (k, m)
        if key not in cache:
            base = add(U_XX, F) if k == 1 else _on_manifold_raw(t_jet_value(k - 1, 0), F)
            v = base
            for _ in range(m):
                v = total_diff(v, X, _MAX_ORDER)
            cache[key] = _eliminate(v, t_jet_value)
        return cache[key]

    return normalize(_eliminate(e, t_jet_value), rules)


def _on_manifold_raw(e: Expr, F: Expr) -> Expr:
    return total_diff(e, T, _MAX_ORDER)


def _eliminate(e: Expr, value) -> Expr:
    while True:
        tj = [s for s in free_symbols(e) if s.kind == JET and jet_index(s)[0] > 0]
        if not tj:
            return e
        e = substitute(e, {s: value(*jet_index(s)) for s in tj}, normal=False)


@dataclass(frozen=True)
class TransformResult:
    G: Expr  # new right-hand side in barred coordinates (or source coordinates for skeletons)
    in_class: bool
    offending: tuple = ()  # second-order jets still present
    source_form: Expr | None = None  # G as a function of source jets, before inversion


def _cramer(m: EquivalenceMap):
    A, B, C = m.components
    DtA, DxA = total_diff(A, T, _MAX_ORDER), total_diff(A, X, _MAX_ORDER)
    DtB, DxB = total_diff(B, T, _MAX_ORDER), total_diff(B, X, _MAX_ORDER)
    J = add(mul(DtA, DxB), mul(-1, DxA, DtB))

    def d_bar(w):
        Dtw, Dxw = total_diff(w, T, _MAX_ORDER), total_diff(w, X, _MAX_ORDER)
        wt = mul(add(mul(Dtw, DxB), mul(-1, Dxw, DtB)), power(J, -1))
        wx = mul(add(mul(DtA, Dxw), mul(-1, DxA, Dtw)), power(J, -1))
        return wt, wx

    return d_bar


def class_form(m: EquivalenceMap, F: Expr) -> TransformResult:
    """``G = v_tb - v_xbxb`` on solutions of ``u_t = u_xx + F``, in source jets."""
    rules = m.rules
    d_bar = _cramer(m)
    vt, vx = d_bar(m.u_new)
    vx = normalize(vx, rules)
    _, vxx = d_bar(vx)
    G = _on_manifold(add(vt, mul(-1, vxx)), F, rules)
    off = tuple(
        sorted(
            (s.name for s in free_symbols(G) if s.kind == JET and sum(jet_index(s)) >= 2),
        )
    )
    return TransformResult(G, not off, off, G)


def transform_pde(m: EquivalenceMap, F: Expr) -> TransformResult:
    """Right-hand side of the image of ``u_t = u_xx + F`` under a concrete map."""
    if m.kind != "concrete":
        raise ValueError("transform_pde needs a concrete map")
    rules = m.rules
    res = class_form(m, F)
    if not res.in_class:
        raise ClassViolation(
            "transformed equation depends on " + ", ".join(res.offending)
        )
    A, B, C = m.components
    if any(s in (X, U) for s in free_symbols(normalize(A, rules))):
        raise ClassViolation("tb must depend on t only")
    # v_xb = (C_x + C_u u_x) / (B_x + B_u u_x), solved for u_x
    Bx, Bu, Cx, Cu = diff(B, X), diff(B, U), diff(C, X), diff(C, U)
    ux = mul(add(mul(_VX, Bx), mul(-1, Cx)), power(add(Cu, mul(-1, _VX, Bu)), -1))
    G = substitute(res.G, {U_X: ux}, rules)
    inv = _inverse_or_partial(m, G)
    G = substitute(G, {T: _TB, X: _XB, U: _UB}, rules)
    G = substitute(
        G,
        {_TB: inv[0], _XB: inv[1], _UB: inv[2]},
        rules,
    )
    # inv is written in barred names t, x, u, so only the slope symbol remains to rename
    G = substitute(G, {_VX: U_X}, rules)
    return TransformResult(G, True, (), res.G)


def verify_class_preservation(m: EquivalenceMap, F: Expr | None = None) -> TransformResult:
    """Check that the image of ``u_t = u_xx + F`` stays in the class.

    ``F`` defaults to an arbitrary ``F(t,x,u,u_x)``. The returned ``G`` is a
    skeleton in source variables.
    """
    F = app("F", (T, X, U, U_X)) if F is None else F
    return class_form(m, F)


# --------------------------------------------------- dependent substitution


@dataclass(frozen=True)
class DependentSubstitution:
    """``u = phi(v)`` with ``phi`` written in the variable ``u`` standing for ``v``.

    ``direction = "new"`` means the text gave ``v = psi(u)`` instead; then
    ``phi`` holds ``psi`` and ``inverse`` (optional) holds ``phi``.
    """

    phi: Expr
    direction: str = "old"
    inverse: Expr | None = None
    rules: tuple = ()


@dataclass(frozen=True)
class SubstitutionResult:
    G: Expr
    factor: Expr  # u_t - u_xx - F = factor * (v_t - v_xx - G)


def substitute_dependent(s: DependentSubstitution, F: Expr) -> SubstitutionResult:
    rules = s.rules
    if s.direction == "old":
        phi = s.phi
        d1 = normalize(diff(phi, U), rules)
        d2 = normalize(diff(d1, U), rules)
        Fv = substitute(F, {U: phi, U_X: mul(d1, U_X)}, rules)
        G = normalize(mul(add(Fv, mul(d2, power(U_X, 2))), power(d1, -1)), rules)
        _check_class(G)
        return SubstitutionResult(G, d1)
    psi = s.phi
    d1 = normalize(diff(psi, U), rules)
    d2 = normalize(diff(d1, U), rules)
    # G(u, u_x) = psi' F - psi'' u_x^2 with u_x = v_x / psi'
    G = add(mul(d1, F), mul(-1, d2, power(U_X, 2)))
    G = substitute(G, {U_X: mul(_VX, power(d1, -1))}, rules)
    if U in free_symbols(G):
        if s.inverse is None:
            raise MissingInverseError("result depends on the old variable; supply u = phi(v)")
        G = substitute(G, {U: substitute(s.inverse, {U: _UB}, normal=False)}, rules)
        G = substitute(G, {_UB: U}, rules)
    G = substitute(G, {_VX: U_X}, rules)
    _check_class(G)
    inv_factor = normalize(power(d1, -1), rules)
    if s.inverse is not None:
        inv_factor = substitute(inv_factor, {U: s.inverse}, rules)
    return SubstitutionResult(G, inv_factor)


def _check_class(G: Expr) -> None:
    bad = [s.name for s in free_symbols(G) if s.kind == JET and sum(jet_index(s)) >= 2]
    if bad:
        raise ClassViolation("substituted equation depends on " + ", ".join(sorted(bad)))


def dependent_as_map(s: DependentSubstitution) -> EquivalenceMap:
    """The point map ``ub = psi(u)`` equivalent to a dependent substitution."""
    if s.direction == "old":
        if s.inverse is None:
            raise MissingInverseError("u = phi(v) needs v = psi(u) to build a map")
        return EquivalenceMap(T, X, s.inverse, (T, X, s.phi), rules=s.rules)
    return EquivalenceMap(T, X, s.phi, (T, X, s.inverse) if s.inverse is not None else None, rules=s.rules)


# ---------------------------------------------------------------- compose


def compose(m1: EquivalenceMap, m2: EquivalenceMap) -> EquivalenceMap:
    """Apply ``m1`` first, then ``m2``."""
    if m1.kind != m2.kind and "abstract" in (m1.kind, m2.kind):
        if m1.chart and m2.chart and m1.chart != m2.chart:
            raise ChartMismatch("maps are defined on different charts")
    rules = tuple(m1.rules) + tuple(r for r in m2.rules if r not in m1.rules)
    binds = dict(zip((T, X, U), m1.components))
    comps = [substitute(c, binds, rules) for c in m2.components]
    inverse = None
    if m1.inverse is not None and m2.inverse is not None:
        inverse = tuple(
            substitute(c, dict(zip((T, X, U), m2.inverse)), rules) for c in m1.inverse
        )
    kind = "abstract" if "abstract" in (m1.kind, m2.kind) else "concrete"
    return EquivalenceMap(*comps, inverse, kind, m1.eps * m2.eps, m1.chart or m2.chart, rules)


def inverse_map(m: EquivalenceMap) -> EquivalenceMap:
    if m.inverse is None:
        raise MissingInverseError("map has no inverse")
    return EquivalenceMap(*m.inverse, m.components, m.kind, m.eps, m.chart, m.rules)


def maps_equal(m1: EquivalenceMap, m2: EquivalenceMap) -> bool:
    rules = tuple(m1.rules) + tuple(m2.rules)
    return all(
        is_zero(add(a, mul(-1, b)), rules).value for a, b in zip(m1.components, m2.components)
    )


# ------------------------------------------------- residual subgroup checks


def coefficient_pattern(q: VectorField, rules: tuple = ()) -> tuple:
    """Which components vanish, which are constant and which vary."""
    out = []
    for c in q.components:
        c = normalize(c, rules)
        if c == Num(0):
            out.append("0")
        elif isinstance(c, Num):
            out.append("const")
        else:
            out.append("var")
    return tuple(out)


def form_invariant(
    m: EquivalenceMap, basis: list[VectorField], rules: tuple = ()
) -> list[tuple[VectorField, VectorField, bool]]:
    """Push each basis field forward and test that it keeps its exact form.

    Each image is compared with the original field, both written in barred
    coordinates; a field keeps its form when the image equals the original
    up to the substitution of the map's arbitrary functions.
    """
    out = []
    for q in basis:
        img = pushforward_field(m, q)
        out.append((q, img, img.equals(q, rules)))
    return out
