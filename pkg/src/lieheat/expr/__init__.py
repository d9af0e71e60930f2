"""Symbolic expression kernel."""

from .nodes import (
    ONE,
    ZERO,
    AUX,
    JET,
    PARAM,
    SIGN,
    VAR,
    T,
    U,
    U_T,
    U_X,
    U_XX,
    X,
    Add,
    App,
    Expr,
    Mul,
    Num,
    Pow,
    Sym,
    abs_,
    add,
    app,
    arctan_,
    as_expr,
    atoms,
    exp_,
    free_symbols,
    is_sign,
    jet,
    jet_index,
    ln_,
    mul,
    neg,
    node_count,
    num,
    power,
    sgn_,
    sqrt_,
    sym,
    walk,
)
from .calculus import ProlongationOrderError, diff, jets_in, total_diff, total_diff_n
from .nf import Rat, RewriteRule, expr_key, normalize, to_expr, to_rat
from .printer import to_text
from .subst import Lambda, substitute
from .zero import (
    KernelInconsistency,
    ZeroCheck,
    ZeroTestConfig,
    get_config,
    is_zero,
    set_config,
    zero_test_settings,
)

__all__ = [name for name in dir() if not name.startswith("_")]
