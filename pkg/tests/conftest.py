"""Shared hypothesis strategies for expressions, vector fields and maps."""

import random
import time
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from lieheat.equiv import EquivalenceMap
from lieheat.expr import T, U, U_X, X, Num, abs_, add, app, exp_, ln_, mul, power, substitute
from lieheat.fields import VectorField

settings.register_profile("lieheat", deadline=None, derandomize=True, print_blob=True)
settings.load_profile("lieheat")

small_q = st.fractions(min_value=-3, max_value=3, max_denominator=4)
nonzero_q = small_q.filter(lambda v: v != 0)
pos_q = st.fractions(min_value=Fraction(1, 3), max_value=3, max_denominator=3)

_LEAVES = [T, X, U, U_X, app("G", (X,)), app("H", (T, U))]


def _leaf(vars_):
    return st.one_of(st.sampled_from(vars_), nonzero_q.map(Num))


def _node(children, vars_):
    safe = st.sampled_from([v for v in vars_ if v in (T, X, U_X)] or list(vars_))
    return st.one_of(
        st.lists(children, min_size=2, max_size=3).map(lambda xs: add(*xs)),
        st.lists(children, min_size=2, max_size=3).map(lambda xs: mul(*xs)),
        st.tuples(children, st.integers(2, 3)).map(lambda p: power(*p)),
        st.tuples(safe, st.sampled_from([-1, -2, Fraction(1, 2)])).map(lambda p: power(abs_(p[0]), p[1])),
        st.tuples(nonzero_q, safe).map(lambda p: exp_(mul(p[0], p[1]))),
        safe.map(lambda s: ln_(abs_(s))),
    )


def exprs(vars_=tuple(_LEAVES), max_leaves: int = 8):
    """Random expressions that never divide by a possibly vanishing subexpression."""
    return st.recursive(_leaf(list(vars_)), lambda ch: _node(ch, list(vars_)), max_leaves=max_leaves)


point_exprs = exprs((T, X, U), max_leaves=6)


@st.composite
def vector_fields(draw, max_leaves: int = 5):
    comps = [draw(st.one_of(st.just(Num(0)), exprs((T, X, U), max_leaves))) for _ in range(3)]
    return VectorField(*comps)


P_CHOICES = [Num(0), mul(T, X), exp_(T), power(X, 2), mul(Fraction(1, 2), T)]


def affine_map(a, b, c, d, e, k, p):
    """``tb = a t + b, xb = c x + d t + e, ub = k u + p(t, x)`` with its inverse."""
    fwd = (add(mul(a, T), b), add(mul(c, X), mul(d, T), e), add(mul(k, U), p))
    t_old = mul(add(T, -b), power(Num(a), -1))
    x_old = mul(add(X, mul(-d, t_old), -e), power(Num(c), -1))
    u_old = mul(add(U, mul(-1, substitute(p, {T: t_old, X: x_old}))), power(Num(k), -1))
    return EquivalenceMap(*fwd, (t_old, x_old, u_old))


@st.composite
def affine_maps(draw):
    a, c, k = draw(pos_q), draw(nonzero_q), draw(nonzero_q)
    b, d, e = draw(small_q), draw(small_q), draw(small_q)
    return affine_map(a, b, c, d, e, k, draw(st.sampled_from(P_CHOICES)))


def seeded_affine_maps(count: int, seed: int = 0) -> list:
    rng = random.Random(seed)
    q = lambda lo, hi: Fraction(rng.randint(lo, hi), rng.randint(1, 4))
    nz = lambda: rng.choice([-1, 1]) * Fraction(rng.randint(1, 3), rng.randint(1, 4))
    return [
        affine_map(abs(nz()), q(-3, 3), nz(), q(-3, 3), q(-3, 3), nz(), rng.choice(P_CHOICES))
        for _ in range(count)
    ]


@pytest.fixture(scope="session")
def shipped_summary():
    """Verification of every shipped catalog file with census, and its wall time."""
    from lieheat.catalog import DATA_FILES, data_path, read_file, shipped_errata, verify_all

    raws = [r for name in DATA_FILES for r in read_file(data_path(name))]
    start = time.perf_counter()
    summary = verify_all(raws, shipped_errata(), seed=0, check_census=True)
    return summary, time.perf_counter() - start, raws
