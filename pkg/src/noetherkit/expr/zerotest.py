"""Randomized numeric zero test.

An expression is declared identically zero when, at every sampled guarded
point, its value is tiny relative to the magnitudes of its top-level additive
terms.  Points where any subterm is singular (or within ``eps_guard`` of a
singularity) are rejected and resampled.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import COMPLEX, Expr, additive_terms, context_of
from .evaluate import evaluate_batch, evaluate_many

DEFAULT_TRIALS = 24
DEFAULT_TOL = 1e-8
DEFAULT_EPS_GUARD = 1e-3
DEFAULT_SEED = 0x40E7

DEFAULT_INTERVALS: Dict[str, Tuple[float, float]] = {
    "x": (0.3, 1.3),
    "f": (0.6, 1.4),
    "g": (-0.6, 0.6),
    "df": (0.4, 1.2),
    "dg": (-0.5, 0.5),
    "ddf": (-1.0, 1.0),
    "ddg": (-1.0, 1.0),
    "A": (0.2, 0.8),
    "b": (0.1, 0.6),
}

# complex-side variable -> (real part, imaginary part) interval names
COMPLEX_PARTS = {"u": ("f", "g"), "du": ("df", "dg"), "ddu": ("ddf", "ddg")}


class DomainTooTightError(RuntimeError):
    """Too few guarded points could be drawn from the sampling domain."""


def default_seed() -> int:
    env = os.environ.get("NOETHERKIT_SEED")
    return int(env, 0) if env else DEFAULT_SEED


@dataclass(frozen=True)
class SampleDomain:
    """Boxes for every real-side variable and named constant.

    Complex-side variables are sampled as u = f + i*g, u' = f' + i*g',
    so one domain serves both sides.
    """

    intervals: Dict[str, Tuple[float, float]] = field(default_factory=lambda: dict(DEFAULT_INTERVALS))
    exclusions: Tuple[Expr, ...] = ()
    seed: int = field(default_factory=default_seed)
    eps_guard: float = DEFAULT_EPS_GUARD

    def __post_init__(self):
        merged = dict(DEFAULT_INTERVALS)
        merged.update(self.intervals)
        for name, (lo, hi) in merged.items():
            if not lo <= hi:
                raise ValueError(f"empty interval for {name}: [{lo}, {hi}]")
        object.__setattr__(self, "intervals", merged)
        object.__setattr__(self, "exclusions", tuple(self.exclusions))

    def with_seed(self, seed: int) -> "SampleDomain":
        return SampleDomain(self.intervals, self.exclusions, seed, self.eps_guard)

    def with_intervals(self, **intervals) -> "SampleDomain":
        merged = dict(self.intervals)
        merged.update(intervals)
        return SampleDomain(merged, self.exclusions, self.seed, self.eps_guard)

    def sample_columns(self, n: int, batch: int = 0) -> Dict[str, np.ndarray]:
        rng = np.random.default_rng([self.seed & 0xFFFFFFFFFFFFFFFF, batch])
        cols = {}
        for name in sorted(self.intervals):
            lo, hi = self.intervals[name]
            cols[name] = rng.uniform(lo, hi, size=n)
        for cname, (re, im) in COMPLEX_PARTS.items():
            cols[cname] = cols[re] + 1j * cols[im]
        return cols


DEFAULT_DOMAIN = SampleDomain()


@dataclass
class ZeroResult:
    """Outcome of ``is_zero``; truthy iff the expression tested as zero."""

    zero: bool
    worst: float
    witness: Optional[Dict[str, complex]] = None

    def __bool__(self):
        return self.zero


def choose_mode(e: Expr) -> str:
    if context_of(e) == COMPLEX or "i" in e.named:
        return "complex"
    return "real"


def guarded_points(exprs: Sequence[Expr], dom: SampleDomain, trials: int,
                   mode: str) -> Tuple[Dict[str, np.ndarray], List[np.ndarray]]:
    """Draw ``trials`` points where every expression in ``exprs`` and every
    domain exclusion is evaluable away from singularities.

    Returns the sample columns and the value arrays of ``exprs`` there.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    budget = 100 * trials
    drawn = 0
    kept_cols: Dict[str, list] = {}
    kept_vals: List[list] = [[] for _ in exprs]
    have = 0
    batch = 0
    while have < trials and drawn < budget:
        n = min(max(2 * trials, 16), budget - drawn)
        cols = dom.sample_columns(n, batch)
        batch += 1
        drawn += n
        ok = np.ones(n, dtype=bool)
        for guard in dom.exclusions:
            gv, gbad = evaluate_batch(guard, cols, choose_mode(guard), dom.eps_guard)
            ok &= ~gbad & (np.abs(gv) >= dom.eps_guard)
        vals, bad = evaluate_many(exprs, cols, mode, dom.eps_guard)
        ok &= ~bad
        idx = np.flatnonzero(ok)[: trials - have]
        for k, arr in cols.items():
            kept_cols.setdefault(k, []).append(arr[idx])
        for j, v in enumerate(vals):
            kept_vals[j].append(v[idx])
        have += len(idx)
    if have < trials:
        raise DomainTooTightError(
            f"only {have} of {trials} guarded points found in {budget} draws")
    cols = {k: np.concatenate(v) for k, v in kept_cols.items()}
    return cols, [np.concatenate(v) for v in kept_vals]


_SETTINGS = {"trials": DEFAULT_TRIALS, "tol": DEFAULT_TOL}


@contextmanager
def zero_test_settings(trials: Optional[int] = None, tol: Optional[float] = None):
    """Temporarily change the default trial count and tolerance of ``is_zero``."""
    saved = dict(_SETTINGS)
    if trials is not None:
        if trials < 1:
            raise ValueError("trials must be positive")
        _SETTINGS["trials"] = trials
    if tol is not None:
        if tol <= 0:
            raise ValueError("tol must be positive")
        _SETTINGS["tol"] = tol
    try:
        yield
    finally:
        _SETTINGS.update(saved)


def is_zero(e: Expr, dom: SampleDomain = DEFAULT_DOMAIN, trials: Optional[int] = None,
            tol: Optional[float] = None, mode: Optional[str] = None) -> ZeroResult:
    """Probabilistic test that ``e`` vanishes identically on ``dom``.

    Residual r and magnitude m (sum of |term| over the top-level additive
    terms) are computed at each guarded point; the verdict is zero iff
    max |r| / (1 + m) <= tol.  The worst point is returned as witness.
    """
    trials = _SETTINGS["trials"] if trials is None else trials
    tol = _SETTINGS["tol"] if tol is None else tol
    mode = mode or choose_mode(e)
    terms = additive_terms(e)
    cols, vals = guarded_points(terms, dom, trials, mode)
    r = np.sum(vals, axis=0) if len(vals) > 1 else vals[0]
    m = np.sum([np.abs(v) for v in vals], axis=0)
    ratio = np.abs(r) / (1.0 + m)
    k = int(np.argmax(ratio))
    worst = float(ratio[k])
    if worst <= tol:
        return ZeroResult(True, worst)
    names = sorted(e.free | e.named - {"pi", "i"})
    witness = {}
    for name in names:
        v = cols[name][k]
        witness[name] = complex(v) if np.iscomplexobj(v) else float(v)
    return ZeroResult(False, worst, witness)
