"""Monte Carlo error exponents and comparisons of the two observation modes.

Randomness comes from numpy's PCG64 generator. Every block of trials gets
its own stream from ``SeedSequence(seed, spawn_key=(T, hypothesis, block))``,
so a given ``(seed, T)`` reproduces bit-for-bit on any platform and blocks
could be run in any order or in parallel.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from treechernoff._linalg import pd_factor
from treechernoff.info_engine import chernoff, scalar_chernoff, scalar_g
from treechernoff.lt_observe import optimize_alpha_numeric, projected_variances
from treechernoff.reduction import CanonicalPair, ci_full_closed, lambda_max

MIN_TRIALS = 10_000
MIN_ERRORS = 10
BLOCK = 5_000
DEFAULT_T_GRID = tuple(range(20, 201, 20))
SURFACE_GRID = np.linspace(-0.9, 0.9, 50)
SIMULATION_HEADER = ("T", "errors", "trials", "pe", "minus_ln_pe")
SURFACE_HEADER = ("w1", "w2", "ci1", "ci2", "ratio", "lambda_max")


@dataclass(frozen=True, eq=False)
class ExponentEstimate:
    """Simulated error rates and the fitted error exponent.

    ``slope`` is fitted to ``-ln(pe) - ln(T)/2`` against ``T``. The
    ``ln(T)/2`` term is the polynomial prefactor of the exact large-deviation
    asymptotics ``pe ~ c T^(-1/2) exp(-T E)``; without it the finite-T fit
    overshoots. ``raw_slope`` is the plain fit of ``-ln(pe)``. Only T values
    with at least ``MIN_ERRORS`` errors enter either fit.
    """

    mode: str
    sample_lengths: tuple[int, ...]
    errors: tuple[int, ...]
    error_rates: tuple[float, ...]
    slope: float
    slope_stderr: float
    raw_slope: float
    ci_reference: float
    trials: int
    seed: int
    lower_bound_only: bool
    fitted: tuple[bool, ...] = field(default=())

    @property
    def relative_error(self) -> float:
        return abs(self.slope - self.ci_reference) / self.ci_reference

    def rows(self) -> list[tuple]:
        out = []
        for t, e, pe in zip(self.sample_lengths, self.errors, self.error_rates):
            out.append((t, e, self.trials, pe, -math.log(pe) if pe > 0 else math.inf))
        return out


def _block_rng(seed: int, t: int, hypothesis: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(t, hypothesis, block))
    return np.random.Generator(np.random.PCG64(ss))


def _count_errors_full(sigmas, t, counts, seed):
    """Exact ML test on T i.i.d. vectors; returns total misclassifications."""
    f1, f2 = pd_factor(sigmas[0]), pd_factor(sigmas[1])
    # log p1 - log p2 = T/2 ln(|S2|/|S1|) + 1/2 sum x^T (P2 - P1) x
    offset = 0.5 * t * (f2.logdet() - f1.logdet())
    diff = 0.5 * (f2.inverse() - f1.inverse())
    errors = 0
    for h, (sigma, n) in enumerate(zip(sigmas, counts), start=1):
        low = pd_factor(sigma).lower
        kernel = low.T @ diff @ low
        for b, start in enumerate(range(0, n, BLOCK)):
            size = min(BLOCK, n - start)
            z = _block_rng(seed, t, h, b).standard_normal((size, t, low.shape[0]))
            llr = offset + np.einsum("btn,btn->b", z @ kernel, z)
            errors += int(np.sum(llr < 0.0)) if h == 1 else int(np.sum(llr >= 0.0))
    return errors


def _count_errors_scalar(variances, t, counts, seed):
    v1, v2 = variances
    offset = 0.5 * t * math.log(v2 / v1)
    coef = 0.5 * (1.0 / v2 - 1.0 / v1)
    errors = 0
    for h, (v, n) in enumerate(zip(variances, counts), start=1):
        for b, start in enumerate(range(0, n, BLOCK)):
            size = min(BLOCK, n - start)
            z = _block_rng(seed, t, h, b).standard_normal((size, t))
            llr = offset + coef * v * np.einsum("bt,bt->b", z, z)
            errors += int(np.sum(llr < 0.0)) if h == 1 else int(np.sum(llr >= 0.0))
    return errors


def _fit(x, y):
    """Least-squares line; returns (slope, slope standard error)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        return math.nan, math.nan
    xc = x - x.mean()
    sxx = float(xc @ xc)
    slope = float(xc @ (y - y.mean()) / sxx)
    if x.size < 3:
        return slope, math.nan
    resid = y - y.mean() - slope * xc
    return slope, math.sqrt(float(resid @ resid) / (x.size - 2) / sxx)


def simulate_exponent(
    sigma1,
    sigma2,
    mode: str = "full",
    alpha=None,
    t_grid: Sequence[int] = DEFAULT_T_GRID,
    trials: int = 100_000,
    seed: int = 0,
) -> ExponentEstimate:
    """Estimate the error exponent of the ML test by simulation.

    Half of the ``trials`` at each sample length draw from each hypothesis
    (equal priors). ``mode="full"`` observes the whole vector; ``mode="lt"``
    observes only ``alpha^T x`` (the optimal ``alpha`` when omitted), drawn
    directly from its scalar Gaussian law.
    """
    if trials < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials, got {trials}")
    t_grid = tuple(int(t) for t in t_grid)
    if not t_grid or t_grid[0] < 1 or any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise ValueError("t_grid must be a strictly increasing list of positive integers")
    s1 = np.asarray(sigma1, dtype=float)
    s2 = np.asarray(sigma2, dtype=float)
    counts = (trials // 2, trials - trials // 2)

    if mode == "full":
        reference = chernoff(s1, s2).value
        errors = tuple(_count_errors_full((s1, s2), t, counts, seed) for t in t_grid)
    elif mode == "lt":
        if alpha is None:
            sol = optimize_alpha_numeric(s1, s2)
            alpha = sol.alpha if sol.alpha is not None else np.eye(s1.shape[0])[0]
        variances = projected_variances(s1, s2, alpha)
        reference = scalar_chernoff(*variances)
        errors = tuple(_count_errors_scalar(variances, t, counts, seed) for t in t_grid)
    else:
        raise ValueError(f"mode must be 'full' or 'lt', got {mode!r}")

    rates = tuple(e / trials for e in errors)
    mask = tuple(e >= MIN_ERRORS for e in errors)
    ts = np.array([t for t, m in zip(t_grid, mask) if m], dtype=float)
    neg_log = np.array([-math.log(r) for r, m in zip(rates, mask) if m])
    slope, stderr = _fit(ts, neg_log - 0.5 * np.log(ts))
    raw, _ = _fit(ts, neg_log)
    # an exponent is non-negative; the prefactor term can push a null fit below zero
    slope = max(slope, 0.0) if not math.isnan(slope) else slope
    raw = max(raw, 0.0) if not math.isnan(raw) else raw
    return ExponentEstimate(
        mode=mode,
        sample_lengths=t_grid,
        errors=errors,
        error_rates=rates,
        slope=slope,
        slope_stderr=stderr,
        raw_slope=raw,
        ci_reference=reference,
        trials=trials,
        seed=seed,
        lower_bound_only=errors[-1] == 0,
        fitted=mask,
    )


def write_simulation_csv(estimate: ExponentEstimate, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SIMULATION_HEADER)
    for t, e, n, pe, nl in estimate.rows():
        writer.writerow((t, e, n, f"{pe:.12g}", f"{nl:.12g}"))


@dataclass(frozen=True)
class NormalizedCi:
    """Chernoff information per time slot and per scalar measurement.

    Full observation of a 3-node pair costs three measurements per slot, the
    scalar observation one, so ``ci2_hat = ci2 / 3`` and ``ci1_hat = ci1``.
    """

    ci1: float
    ci2: float
    ci1_hat: float
    ci2_hat: float
    ratio: float
    normalized_ratio: float


def normalized_ci(cp: CanonicalPair) -> NormalizedCi:
    ci1 = scalar_g(lambda_max(cp))
    ci2 = ci_full_closed(cp)
    ratio = ci2 / ci1
    return NormalizedCi(ci1, ci2, ci1, ci2 / 3.0, ratio, ratio / 3.0)


@dataclass(frozen=True)
class SurfaceRow:
    w1: float
    w2: float
    ci1: float
    ci2: float
    ratio: float
    lambda_max: float

    @property
    def valid(self) -> bool:
        return not math.isnan(self.ratio)


def ratio_surface(w1_grid: Iterable[float] = SURFACE_GRID, w2_grid: Iterable[float] = SURFACE_GRID) -> list[SurfaceRow]:
    """``CI2 / CI1`` over a grid of canonical parameters, row-major in ``w1``.

    Points outside ``|w1| < 1, 0 < |w2| < 1`` produce a warning and a row of
    NaNs so the table keeps its shape.
    """
    rows = []
    w2_values = [float(w) for w in w2_grid]
    for w1 in w1_grid:
        for w2 in w2_values:
            w1 = float(w1)
            if not (abs(w1) < 1.0 and 0.0 < abs(w2) < 1.0):
                warnings.warn(f"skipping ({w1}, {w2}): outside the weight domain", stacklevel=2)
                rows.append(SurfaceRow(w1, w2, math.nan, math.nan, math.nan, math.nan))
                continue
            cp = CanonicalPair(w1, w2)
            nc = normalized_ci(cp)
            rows.append(SurfaceRow(w1, w2, nc.ci1, nc.ci2, nc.ratio, lambda_max(cp)))
    return rows


def write_surface_csv(rows: Iterable[SurfaceRow], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SURFACE_HEADER)
    for r in rows:
        writer.writerow(tuple(f"{v:.12g}" for v in (r.w1, r.w2, r.ci1, r.ci2, r.ratio, r.lambda_max)))


@dataclass(frozen=True, eq=False)
class GInequalityReport:
    x: np.ndarray
    gap: np.ndarray

    @property
    def min_gap(self) -> float:
        return float(np.min(self.gap))

    @property
    def argmin_x(self) -> float:
        return float(self.x[np.argmin(self.gap)])

    def holds(self, slack: float = 1e-12) -> bool:
        return bool(np.all(self.gap >= -slack))


def half_log_ratio_bound(x: float) -> float:
    """``ln((x + 1) / (2 sqrt(x)))``, the full-observation CI as a function of ``lambda_max``."""
    r = math.sqrt(x)
    return math.log1p((r - 1.0) ** 2 / (2.0 * r))


def g_inequality_check(x_grid: Iterable[float]) -> GInequalityReport:
    """Evaluate ``2 g(x) - ln((x + 1) / (2 sqrt(x)))`` on a grid in ``(1, inf)``.

    Non-negativity everywhere is the statement that the best scalar
    observation retains at least half of the full-observation exponent.
    """
    x = np.asarray(list(x_grid), dtype=float)
    if np.any(x <= 1.0):
        raise ValueError("grid points must exceed 1")
    gap = np.array([2.0 * scalar_g(v) - half_log_ratio_bound(v) for v in x])
    return GInequalityReport(x, gap)
