"""Point vector fields, their second prolongation and invariance residuals."""

from __future__ import annotations

from dataclasses import dataclass

from .expr import (
    JET,
    ZERO,
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
    substitute,
    to_text,
    total_diff,
)
from .expr.split import monomial, poly_coefficients

U_TX = jet(1, 1)
U_XXX = jet(0, 3)


class PointFieldError(ValueError):
    """A vector field coefficient depends on derivatives of u."""


class KernelAssertion(AssertionError):
    """An identity that must hold by construction failed."""


@dataclass(frozen=True)
class VectorField:
    """``tau(t,x,u) dt + xi(t,x,u) dx + eta(t,x,u) du``."""

    tau: Expr
    xi: Expr
    eta: Expr

    def __post_init__(self):
        for c in (self.tau, self.xi, self.eta):
            bad = [s.name for s in free_symbols(c) if s.kind == JET]
            if bad:
                raise PointFieldError(
                    f"coefficient {to_text(c)} depends on {', '.join(sorted(bad))}"
                )

    @property
    def components(self) -> tuple[Expr, Expr, Expr]:
        return (self.tau, self.xi, self.eta)

    def normalized(self, rules: tuple = ()) -> "VectorField":
        return VectorField(*(normalize(c, rules) for c in self.components))

    def apply(self, f: Expr) -> Expr:
        return add(
            mul(self.tau, diff(f, T)), mul(self.xi, diff(f, X)), mul(self.eta, diff(f, U))
        )

    def scaled(self, c) -> "VectorField":
        return VectorField(*(mul(c, v) for v in self.components))

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(*(add(a, b) for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + other.scaled(Num(-1))

    def substitute(self, bindings: dict, rules: tuple = ()) -> "VectorField":
        return VectorField(*(substitute(c, bindings, rules) for c in self.components))

    def equals(self, other: "VectorField", rules: tuple = ()) -> bool:
        return all(
            is_zero(add(a, mul(Num(-1), b)), rules).value
            for a, b in zip(self.components, other.components)
        )

    def is_zero(self, rules: tuple = ()) -> bool:
        return all(is_zero(c, rules).value for c in self.components)

    def __str__(self) -> str:
        parts = []
        for c, d in zip(self.components, ("dt", "dx", "du")):
            c = normalize(c)
            if c == ZERO:
                continue
            s = to_text(c)
            if c == Num(1):
                parts.append(d)
            elif c == Num(-1):
                parts.append("-" + d)
            else:
                parts.append(f"({s})*{d}")
        return " + ".join(parts).replace("+ -", "- ") or "0"


def commutator(q1: VectorField, q2: VectorField, rules: tuple = ()) -> VectorField:
    comps = [
        normalize(add(q1.apply(b), mul(Num(-1), q2.apply(a))), rules)
        for a, b in zip(q1.components, q2.components)
    ]
    return VectorField(*comps)


@dataclass(frozen=True)
class Prolongation:
    field: VectorField
    phi_t: Expr
    phi_x: Expr
    phi_xx: Expr


def prolong2(q: VectorField, rules: tuple = ()) -> Prolongation:
    tau, xi, eta = q.components
    Dt = lambda e: total_diff(e, T)
    Dx = lambda e: total_diff(e, X)
    phi_t = add(Dt(eta), mul(-1, U_T, Dt(tau)), mul(-1, U_X, Dt(xi)))
    phi_x = add(Dx(eta), mul(-1, U_T, Dx(tau)), mul(-1, U_X, Dx(xi)))
    phi_x = normalize(phi_x, rules)
    phi_xx = add(Dx(phi_x), mul(-1, U_TX, Dx(tau)), mul(-1, U_XX, Dx(xi)))
    return Prolongation(q, normalize(phi_t, rules), phi_x, normalize(phi_xx, rules))


def _depends_only_on_t(e: Expr) -> bool:
    return not any(s in (X, U) or s.kind == JET for s in free_symbols(e))


def invariance_residual(
    q: VectorField, F: Expr, rules: tuple = (), chart: dict | None = None
) -> Expr:
    """Residual of the invariance condition on solutions of ``u_t = u_xx + F``.

    Equals ``phi_t - phi_xx - tau F_t - xi F_x - eta F_u - phi_x F_ux`` with
    ``u_t`` and ``u_tx`` eliminated through the equation.
    """
    if chart:
        q = q.substitute(chart, rules)
        F = substitute(F, chart, rules)
    pr = prolong2(q, rules)
    tau, xi, eta = q.components
    r = add(
        pr.phi_t,
        mul(-1, pr.phi_xx),
        mul(-1, tau, diff(F, T)),
        mul(-1, xi, diff(F, X)),
        mul(-1, eta, diff(F, U)),
        mul(-1, pr.phi_x, diff(F, U_X)),
    )
    ut = add(U_XX, F)
    utx = total_diff(ut, X, max_order=3)
    r = substitute(r, {U_T: ut, U_TX: utx}, rules)
    if _depends_only_on_t(normalize(tau, rules)) and any(
        s == U_XXX for s in free_symbols(r)
    ):
        raise KernelAssertion("u_xxx survived although tau depends on t only")
    return r


GENERIC_F = app("F", (T, X, U, U_X))


def generic_operator() -> VectorField:
    """``2a(t) dt + (a'(t) x + b(t)) dx + f(t,x,u) du``."""
    a = app("a", (T,))
    da = App("a", (T,), (1,))
    b = app("b", (T,))
    f = app("f", (T, X, U))
    return VectorField(mul(2, a), add(mul(da, X), b), f)


def determining_residual(F: Expr | None = None, rules: tuple = ()) -> Expr:
    """Invariance residual of the generic operator for ``F`` (default: arbitrary F)."""
    return invariance_residual(generic_operator(), GENERIC_F if F is None else F, rules)


def split_by_jet_monomials(
    r: Expr, jets=(U_XXX, U_XX), rules: tuple = ()
) -> list[tuple[Expr, Expr]]:
    """Coefficients of ``r`` as a polynomial in the given jet variables."""
    coeffs = poly_coefficients(r, jets, rules)
    return [(monomial(jets, exps), c) for exps, c in coeffs.items()]


def check_symmetry(q: VectorField, F: Expr, rules: tuple = (), chart: dict | None = None) -> bool:
    return is_zero(invariance_residual(q, F, rules, chart), rules).value


def jet_order(s: Sym) -> int:
    idx = jet_index(s)
    return sum(idx) if idx else 0
