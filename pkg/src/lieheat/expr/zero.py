"""Zero testing: structural normal form cross-checked by exact sampling."""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass, replace

from .nodes import Expr
from . import nf, numeric


class KernelInconsistency(AssertionError):
    """The structural and numeric routes disagree; this is a kernel bug."""


@dataclass(frozen=True)
class ZeroTestConfig:
    samples: int = 20
    seed: int = 0x5EED_1E4E
    cross_check: bool = True


def _env_seed() -> int | None:
    raw = os.environ.get("LIEHEAT_SEED")
    if raw is None or raw == "":
        return None
    return int(raw, 0) & 0xFFFF_FFFF_FFFF_FFFF


_config = ZeroTestConfig(seed=_env_seed() or ZeroTestConfig.seed)


def get_config() -> ZeroTestConfig:
    return _config


def set_config(**changes) -> ZeroTestConfig:
    global _config
    _config = replace(_config, **changes)
    return _config


@contextmanager
def zero_test_settings(**changes):
    global _config
    old = _config
    _config = replace(_config, **changes)
    try:
        yield _config
    finally:
        _config = old


@dataclass(frozen=True)
class ZeroCheck:
    value: bool
    certificate: str  # "structural" or "probabilistic"
    samples: int = 0

    def __bool__(self):
        return self.value


def is_zero(e: Expr, rules: tuple = (), method: str = "both") -> ZeroCheck:
    """Decide ``e == 0``.

    ``method="both"`` uses the normal form and confirms with sampling; a
    disagreement raises ``KernelInconsistency``. ``"structural"`` and
    ``"numeric"`` use a single route.
    """
    cfg = _config
    structural = None
    if method in ("both", "structural"):
        structural = nf.to_rat(e, rules).is_zero()
        if method == "structural" or not cfg.cross_check:
            return ZeroCheck(structural, "structural", 0)
    try:
        values = numeric.sample_values(e, rules, cfg.seed, cfg.samples)
    except numeric.NumericUnavailable:
        if structural is None:
            raise
        return ZeroCheck(structural, "structural", 0)
    numeric_zero = all(numeric.is_numeric_zero(v) for v in values)
    if structural is None:
        return ZeroCheck(numeric_zero, "probabilistic", len(values))
    if numeric_zero != structural:
        raise KernelInconsistency(
            f"normal form says zero={structural} but sampling says zero={numeric_zero}"
        )
    return ZeroCheck(structural, "structural", len(values))
