"""Estimators over exit records: survival curves, exponents, factorization
ratios, overshoot checks, and Yaglom histograms.

Conventions shared by everything here: Bernoulli standard errors are
sqrt(p(1-p)/n); regressions are weighted least squares with
Bernoulli-variance weights and 200 bootstrap resamples for the CI; survival
points with fewer than 500 surviving paths are dropped before fitting; TV
distances merge bins whose expected count is below 5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._rng import derive_key
from .errors import (
    AllPathsDied,
    ConfigError,
    DegenerateGrid,
    TooFewSurvivors,
    UnsupportedFeature,
)
from . import geometry
from .model import StableModel, dual as dual_model
from .runner import simulate, simulate_increments
from .sampling import SchemeParams
from .sampling.paths import KIND_JUMP_CODE

MIN_SURVIVORS = 500
BOOTSTRAP_RESAMPLES = 200


@dataclass(frozen=True)
class EstimateCI:
    value: float
    stderr: float
    n: int
    method: str

    def __post_init__(self):
        if self.stderr < 0.0:
            raise ConfigError("stderr must be non-negative")


def bernoulli_ci(successes: int, n: int, method: str) -> EstimateCI:
    p = successes / n
    return EstimateCI(p, math.sqrt(p * (1.0 - p) / n), n, method)


# ---------------------------------------------------------------------------
# survival and exponents


def survival_probability(
    model: StableModel,
    domain,
    x,
    t: float,
    n: int,
    scheme: Optional[SchemeParams] = None,
    master_seed: int = 0,
    run_tag: int = 1,
    workers: int = 1,
) -> EstimateCI:
    """P_x(tau > t) as the surviving fraction of n paths."""
    if isinstance(domain, geometry.FullSpace):
        return EstimateCI(1.0, 0.0, n, "exact-fullspace")
    batch = simulate(model, domain, x, t, scheme, n, master_seed, run_tag, workers=workers)
    return bernoulli_ci(int(batch.survived.sum()), n, "mc-survival")


@dataclass(frozen=True)
class ExponentFit:
    """A fitted power-law exponent with bootstrap CI and the points used.

    grid/p_hat/se hold the points the regression kept; all_grid/all_p_hat
    also report the points dropped for falling under the survivor floor.
    """

    estimate: float
    stderr: float
    ci_lo: float
    ci_hi: float
    n_points: int
    grid: np.ndarray = field(repr=False)
    p_hat: np.ndarray = field(repr=False)
    se: np.ndarray = field(repr=False)
    n: int = 0
    method: str = ""
    all_grid: np.ndarray = field(repr=False, default=None)
    all_p_hat: np.ndarray = field(repr=False, default=None)

    def as_estimate(self) -> EstimateCI:
        return EstimateCI(self.estimate, self.stderr, self.n, self.method)


def _wls_slope(logx: np.ndarray, logy: np.ndarray, w: np.ndarray) -> float:
    sw = np.sqrt(w)
    A = np.stack([logx * sw, sw], axis=1)
    coef, *_ = np.linalg.lstsq(A, logy * sw, rcond=None)
    return float(coef[0])


def _fit_with_path_bootstrap(t_used, alive_used, n, seed, method,
                             all_grid=None, all_p=None) -> ExponentFit:
    p = alive_used.mean(axis=0)
    w = n * p / (1.0 - p + 1e-300)  # 1/Var(log p_hat)
    logt = np.log(t_used)
    slope = _wls_slope(logt, np.log(p), w)
    rng = np.random.default_rng(derive_key(seed, 0x626F6F74))
    slopes = np.empty(BOOTSTRAP_RESAMPLES)
    for b in range(BOOTSTRAP_RESAMPLES):
        # Poisson bootstrap keeps the cross-t path correlation
        wts = rng.poisson(1.0, size=n).astype(np.float64)
        tot = wts.sum()
        pb = np.clip((wts @ alive_used) / tot, 1e-12, 1.0)
        wb = tot * pb / (1.0 - pb + 1e-300)
        slopes[b] = _wls_slope(logt, np.log(pb), wb)
    lo, hi = np.percentile(slopes, [2.5, 97.5])
    return ExponentFit(
        estimate=-slope,
        stderr=float(slopes.std(ddof=1)),
        ci_lo=float(-hi),
        ci_hi=float(-lo),
        n_points=t_used.size,
        grid=t_used,
        p_hat=p,
        se=np.sqrt(p * (1.0 - p) / n),
        n=n,
        method=method,
        all_grid=all_grid,
        all_p_hat=all_p,
    )


def survival_exponent_time(
    model: StableModel,
    domain,
    x,
    t_grid: Sequence[float],
    n: int,
    scheme: Optional[SchemeParams] = None,
    master_seed: int = 0,
    run_tag: int = 2,
    workers: int = 1,
) -> ExponentFit:
    """-slope of log P_x(tau > t) against log t, i.e. beta/alpha.

    One shared path set simulated to max(t_grid) supplies every point, so
    the curve is exactly monotone; the bootstrap resamples whole paths.
    """
    t_grid = np.asarray(sorted(float(t) for t in t_grid))
    if t_grid.size < 3:
        raise DegenerateGrid("t_grid needs at least 3 points")
    t_max = float(t_grid[-1])
    batch = simulate(model, domain, x, t_max, scheme, n, master_seed, run_tag, workers=workers)
    alive = np.stack([batch.alive_at(t) for t in t_grid], axis=1)
    counts = alive.sum(axis=0)
    usable = counts >= MIN_SURVIVORS
    if usable.sum() < 3:
        raise DegenerateGrid(
            f"only {int(usable.sum())} grid points kept >= {MIN_SURVIVORS} survivors"
        )
    return _fit_with_path_bootstrap(
        t_grid[usable], alive[:, usable], n,
        derive_key(master_seed, run_tag), "wls-time",
        all_grid=t_grid, all_p=counts / n,
    )


def survival_exponent_space(
    model: StableModel,
    domain,
    direction,
    s_grid: Sequence[float],
    t: float,
    n: int,
    scheme: Optional[SchemeParams] = None,
    master_seed: int = 0,
    run_tag: int = 3,
    workers: int = 1,
) -> ExponentFit:
    """Slope of log P_{s u}(tau > t) against log s, i.e. beta.

    Homogeneity of the Martin kernel makes the survival proportional to
    s^beta as s -> 0; each s is an independent run.
    """
    u = np.asarray(direction, dtype=np.float64)
    u = u / np.linalg.norm(u)
    s_grid = np.asarray(sorted(float(s) for s in s_grid))
    if s_grid.size < 3:
        raise DegenerateGrid("s_grid needs at least 3 points")
    p = np.empty(s_grid.size)
    died = False
    for i, s in enumerate(s_grid):
        batch = simulate(
            model, domain, s * u, t, scheme, n, master_seed, run_tag * 1000 + i,
            workers=workers,
        )
        surv = int(batch.survived.sum())
        p[i] = surv / n
        died = died or surv == 0
    usable = p * n >= MIN_SURVIVORS
    if usable.sum() < 3:
        if died:
            raise AllPathsDied("smallest s too small for this horizon; shrink t")
        raise DegenerateGrid(
            f"only {int(usable.sum())} grid points kept >= {MIN_SURVIVORS} survivors"
        )
    logs = np.log(s_grid[usable])
    pu = p[usable]
    w = n * pu / (1.0 - pu + 1e-300)
    slope = _wls_slope(logs, np.log(pu), w)
    rng = np.random.default_rng(derive_key(master_seed, run_tag, 0x626F6F74))
    slopes = np.empty(BOOTSTRAP_RESAMPLES)
    for b in range(BOOTSTRAP_RESAMPLES):
        pb = np.clip(rng.binomial(n, pu) / n, 1e-12, 1.0)
        wb = n * pb / (1.0 - pb + 1e-300)
        slopes[b] = _wls_slope(logs, np.log(pb), wb)
    lo, hi = np.percentile(slopes, [2.5, 97.5])
    return ExponentFit(
        estimate=float(slope),
        stderr=float(slopes.std(ddof=1)),
        ci_lo=float(lo),
        ci_hi=float(hi),
        n_points=int(usable.sum()),
        grid=s_grid[usable],
        p_hat=pu,
        se=np.sqrt(pu * (1.0 - pu) / n),
        n=n,
        method="wls-space",
    )


# ---------------------------------------------------------------------------
# kernel density estimation


def silverman_bandwidth(samples: np.ndarray) -> np.ndarray:
    n, d = samples.shape
    factor = (4.0 / (d + 2.0)) ** (1.0 / (d + 4.0)) * n ** (-1.0 / (d + 4.0))
    # robust sigma: min(std, IQR/1.349) per axis, stable under heavy tails
    std = samples.std(axis=0, ddof=1)
    q75, q25 = np.percentile(samples, [75, 25], axis=0)
    sigma = np.minimum(std, (q75 - q25) / 1.349)
    sigma = np.where(sigma > 0, sigma, np.maximum(std, 1e-12))
    return factor * sigma


def kde_evaluate(samples: np.ndarray, points: np.ndarray, bandwidth=None) -> np.ndarray:
    """Gaussian product-kernel KDE of `samples` at `points` (d <= 2)."""
    samples = np.atleast_2d(samples)
    points = np.atleast_2d(points)
    n, d = samples.shape
    if d > 2:
        raise UnsupportedFeature("KDE limited to d <= 2")
    if bandwidth is None:
        h = silverman_bandwidth(samples)
    else:
        h = np.broadcast_to(np.asarray(bandwidth, dtype=np.float64), (d,))
    out = np.empty(points.shape[0])
    norm = n * np.prod(h) * (2.0 * np.pi) ** (d / 2.0)
    for i, pt in enumerate(points):
        z = (samples - pt[None, :]) / h[None, :]
        out[i] = np.exp(-0.5 * np.sum(z * z, axis=1)).sum() / norm
    return out


@dataclass(frozen=True)
class HeatKernelReport:
    points: np.ndarray
    density: np.ndarray
    envelope: np.ndarray
    ratio_bound: float  # the run-reported c with env/c <= p_hat <= c*env


def heat_kernel_density(
    model: StableModel,
    t: float,
    points,
    n: int,
    bandwidth=None,
    master_seed: int = 0,
    run_tag: int = 4,
    scheme: Optional[SchemeParams] = None,
    workers: int = 1,
) -> HeatKernelReport:
    """KDE of the free density p_t(0, .) with the scaling envelope report."""
    if n < 10_000:
        raise ConfigError("heat_kernel_density needs n >= 1e4")
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    samples = simulate_increments(model, t, n, master_seed, run_tag, scheme, workers)
    dens = kde_evaluate(samples, points, bandwidth)
    r = np.linalg.norm(points, axis=1)
    with np.errstate(divide="ignore"):
        env = np.minimum(t ** (-model.dim / model.alpha),
                         t * r ** (-model.dim - model.alpha))
    ratios = dens / env
    c = float(max(ratios.max(), (1.0 / ratios).max()))
    return HeatKernelReport(points=points, density=dens, envelope=env, ratio_bound=c)


# ---------------------------------------------------------------------------
# factorization ratio (Theorem-level property)


@dataclass(frozen=True)
class FactorizationReport:
    t_grid: np.ndarray
    x_list: np.ndarray
    y_list: np.ndarray
    ratios: np.ndarray        # (nt, nx, ny)
    spreads: np.ndarray       # (nt,) max/min per t
    survival_x: np.ndarray    # (nt, nx)
    survival_y_dual: np.ndarray


def factorization_ratio(
    model: StableModel,
    domain,
    x_list,
    y_list,
    t_grid: Sequence[float],
    n: int,
    bandwidth=None,
    scheme: Optional[SchemeParams] = None,
    master_seed: int = 0,
    run_tag: int = 5,
    workers: int = 1,
) -> FactorizationReport:
    """R(x,y) = p^D_t(x,y) / (P_x(tau>t) p_t(x,y) dual-P_y(tau>t)) on a grid.

    The killed density is a KDE over surviving endpoints scaled by the
    survival frequency; the dual survivals come from runs of dual(model).
    """
    if model.dim > 2:
        raise UnsupportedFeature("factorization_ratio limited to d <= 2")
    x_list = np.atleast_2d(np.asarray(x_list, dtype=np.float64))
    y_list = np.atleast_2d(np.asarray(y_list, dtype=np.float64))
    t_grid = np.asarray(sorted(float(t) for t in t_grid))
    t_max = float(t_grid[-1])
    hat = dual_model(model)

    killed = np.empty((t_grid.size, x_list.shape[0], y_list.shape[0]))
    surv_x = np.empty((t_grid.size, x_list.shape[0]))
    for i, x in enumerate(x_list):
        batch = simulate(
            model, domain, x, t_max, scheme, n, master_seed, run_tag * 1000 + i,
            snapshot_times=t_grid, workers=workers,
        )
        for k, t in enumerate(t_grid):
            pts = batch.snapshots[:, k, :]
            live = ~np.isnan(pts[:, 0])
            m = int(live.sum())
            if m < MIN_SURVIVORS:
                raise TooFewSurvivors(
                    f"{m} survivors at x={x.tolist()}, t={t} (need {MIN_SURVIVORS})"
                )
            surv_x[k, i] = m / n
            killed[k, i, :] = kde_evaluate(pts[live], y_list, bandwidth) * (m / n)

    surv_y = np.empty((t_grid.size, y_list.shape[0]))
    for j, y in enumerate(y_list):
        batch = simulate(
            hat, domain, y, t_max, scheme, n, master_seed, run_tag * 1000 + 500 + j,
            workers=workers,
        )
        for k, t in enumerate(t_grid):
            surv_y[k, j] = batch.alive_at(t).mean()

    ratios = np.empty_like(killed)
    for k, t in enumerate(t_grid):
        inc = simulate_increments(
            model, t, n, master_seed, (run_tag + 1) * 1000 + k, scheme, workers
        )
        for i, x in enumerate(x_list):
            free = kde_evaluate(inc + x[None, :], y_list, bandwidth)
            ratios[k, i, :] = killed[k, i, :] / (surv_x[k, i] * free * surv_y[k, :])
    spreads = ratios.reshape(t_grid.size, -1).max(axis=1) / ratios.reshape(
        t_grid.size, -1
    ).min(axis=1)
    return FactorizationReport(
        t_grid=t_grid, x_list=x_list, y_list=y_list, ratios=ratios,
        spreads=spreads, survival_x=surv_x, survival_y_dual=surv_y,
    )


# ---------------------------------------------------------------------------
# Ikeda-Watanabe overshoot check


@dataclass(frozen=True)
class OvershootReport:
    pre_bins: np.ndarray          # (k+1,) edges
    tv_per_bin: np.ndarray        # (k,)
    counts_per_bin: np.ndarray    # (k,)
    aggregate_tv: float
    n_jump_exits: int


def overshoot_conditional_check(
    model: StableModel,
    domain,
    x,
    t_max: float,
    n: int,
    pre_bins,
    n_post_bins: int = 40,
    scheme: Optional[SchemeParams] = None,
    master_seed: int = 0,
    run_tag: int = 6,
    workers: int = 1,
) -> OvershootReport:
    """TV distance between simulated overshoots and nu(.-u) normalized
    over the exterior, per pre-exit bin.

    Exact conditional CDF on the half-line: starting side distance u > 0,
    the landing z <= 0 has P(Z <= z | u) = (u / (u - z))^alpha, independent
    of the Levy weights. The theoretical bin masses average this over the
    actual pre-exit positions in the bin, so binning introduces no offset.
    """
    if model.dim != 1 or not isinstance(domain, geometry.HalfSpace):
        raise UnsupportedFeature("overshoot check implemented for d=1 half-lines")
    sign = float(domain.axis[0])  # +1 for (0,inf), -1 for (-inf,0)
    pre_bins = np.asarray(sorted(float(b) for b in pre_bins))
    batch = simulate(model, domain, x, t_max, scheme, n, master_seed, run_tag, workers=workers)
    jump = batch.exit_kind == KIND_JUMP_CODE
    u = sign * batch.pre_exit[jump, 0]   # distance to the boundary, > 0
    z = sign * batch.post_exit[jump, 0]  # signed landing, <= 0
    n_jump = int(jump.sum())
    if n_jump < MIN_SURVIVORS:
        raise TooFewSurvivors(f"only {n_jump} jump exits")

    alpha = model.alpha
    tv = np.full(pre_bins.size - 1, np.nan)
    counts = np.zeros(pre_bins.size - 1, dtype=np.int64)
    agg_num = 0.0
    agg_den = 0
    for k in range(pre_bins.size - 1):
        sel = (u >= pre_bins[k]) & (u < pre_bins[k + 1])
        m = int(sel.sum())
        counts[k] = m
        if m < MIN_SURVIVORS:
            continue
        uk, zk = u[sel], z[sel]
        # geometric post grid from the bin scale out to the far tail
        zmax = np.quantile(-zk, 0.999)
        edges = -np.concatenate([
            [np.inf], np.geomspace(max(zmax, pre_bins[k + 1]), pre_bins[k] * 1e-3, n_post_bins - 1), [0.0]
        ])
        emp, _ = np.histogram(zk, bins=edges)
        cdf = (uk[None, :] / (uk[None, :] - edges[:, None])) ** alpha
        cdf[0] = 0.0
        cdf[-1] = 1.0
        theo = np.diff(cdf, axis=0).mean(axis=1)
        emp = emp.astype(np.float64)
        emp_m, theo_m = _merge_small_bins(emp, theo * m)
        tv[k] = 0.5 * np.abs(emp_m / m - theo_m / m).sum()
        agg_num += tv[k] * m
        agg_den += m
    if agg_den == 0:
        raise TooFewSurvivors("no pre-exit bin collected enough jump exits")
    return OvershootReport(
        pre_bins=pre_bins,
        tv_per_bin=tv,
        counts_per_bin=counts,
        aggregate_tv=agg_num / agg_den,
        n_jump_exits=n_jump,
    )


def _merge_bounds(expected: np.ndarray, floor: float = 5.0) -> np.ndarray:
    """Segment end-indices merging adjacent bins up to an expected-count floor."""
    ends = []
    acc = 0.0
    for i, e in enumerate(expected):
        acc += e
        if acc >= floor:
            ends.append(i + 1)
            acc = 0.0
    if not ends:
        ends = [expected.size]
    else:
        ends[-1] = expected.size
    return np.asarray(ends, dtype=np.int64)


def _segment_sums(v: np.ndarray, ends: np.ndarray) -> np.ndarray:
    csum = np.concatenate([[0.0], np.cumsum(v)])
    starts = np.concatenate([[0], ends[:-1]])
    return csum[ends] - csum[starts]


def _merge_small_bins(emp: np.ndarray, expected: np.ndarray, floor: float = 5.0):
    """Merge adjacent bins (shared boundaries) until expected counts reach floor."""
    ends = _merge_bounds(expected, floor)
    return _segment_sums(emp, ends), _segment_sums(expected, ends)


# ---------------------------------------------------------------------------
# Yaglom histograms


@dataclass(frozen=True)
class BinSpec:
    lo: np.ndarray
    hi: np.ndarray
    nbins: np.ndarray

    def __init__(self, lo, hi, nbins):
        object.__setattr__(self, "lo", np.atleast_1d(np.asarray(lo, dtype=np.float64)))
        object.__setattr__(self, "hi", np.atleast_1d(np.asarray(hi, dtype=np.float64)))
        object.__setattr__(self, "nbins", np.atleast_1d(np.asarray(nbins, dtype=np.int64)))
        if not (self.lo.shape == self.hi.shape == self.nbins.shape):
            raise ConfigError("bin spec arrays must share one shape")
        if np.any(self.hi <= self.lo) or np.any(self.nbins < 1):
            raise ConfigError("need hi > lo and nbins >= 1")

    def edges(self) -> list[np.ndarray]:
        return [
            np.linspace(self.lo[i], self.hi[i], self.nbins[i] + 1)
            for i in range(self.lo.size)
        ]


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Masses on a rectangular grid plus one overflow cell; sums to one."""

    spec: BinSpec
    masses: np.ndarray        # shape nbins..., raveled C-order
    overflow: float
    n_samples: int

    def total(self) -> float:
        return float(self.masses.sum() + self.overflow)

    def tv(self, other: "EmpiricalMeasure") -> float:
        if self.masses.shape != other.masses.shape:
            raise ConfigError("TV needs identical binnings")
        mean_n = 0.5 * (self.n_samples + other.n_samples)
        exp_counts = 0.5 * (self.masses + other.masses).ravel() * mean_n
        ends = _merge_bounds(exp_counts)
        a = _segment_sums(self.masses.ravel(), ends)
        b = _segment_sums(other.masses.ravel(), ends)
        d = 0.5 * np.abs(a - b).sum()
        return float(d + 0.5 * abs(self.overflow - other.overflow))


def _histogram_measure(points: np.ndarray, spec: BinSpec) -> EmpiricalMeasure:
    n = points.shape[0]
    edges = spec.edges()
    hist, _ = np.histogramdd(points, bins=edges)
    inside = hist.sum()
    return EmpiricalMeasure(
        spec=spec,
        masses=hist / n,
        overflow=float((n - inside) / n),
        n_samples=n,
    )


def yaglom_histogram(
    model: StableModel,
    domain,
    start,
    t: float,
    n: int,
    bin_spec: BinSpec,
    scheme: Optional[SchemeParams] = None,
    master_seed: int = 0,
    run_tag: int = 7,
    workers: int = 1,
) -> EmpiricalMeasure:
    """Histogram of t^(-1/alpha) X_t over paths surviving to t."""
    batch = simulate(model, domain, start, t, scheme, n, master_seed, run_tag, workers=workers)
    pts = batch.post_exit[batch.survived] * t ** (-1.0 / model.alpha)
    if pts.shape[0] < MIN_SURVIVORS:
        raise TooFewSurvivors(f"{pts.shape[0]} survivors at t={t}")
    return _histogram_measure(pts, bin_spec)


@dataclass(frozen=True)
class YaglomReport:
    starts: np.ndarray
    t_grid: np.ndarray
    histograms: dict            # (start_idx, t_idx) -> EmpiricalMeasure
    tv_over_t: np.ndarray       # (nstarts, nt-1) consecutive-t TV per start
    tv_over_starts: np.ndarray  # (nstarts,) TV vs start 0 at the largest t


def yaglom_convergence(
    model: StableModel,
    domain,
    start_list,
    t_grid: Sequence[float],
    n: int,
    bin_spec: BinSpec,
    scheme: Optional[SchemeParams] = None,
    master_seed: int = 0,
    run_tag: int = 8,
    workers: int = 1,
) -> YaglomReport:
    """Pairwise TV distances across t (fixed start) and across starts."""
    starts = np.atleast_2d(np.asarray(start_list, dtype=np.float64))
    t_grid = np.asarray(sorted(float(t) for t in t_grid))
    scale = t_grid ** (-1.0 / model.alpha)
    hists: dict = {}
    for i, x in enumerate(starts):
        batch = simulate(
            model, domain, x, float(t_grid[-1]), scheme, n,
            master_seed, run_tag * 1000 + i, snapshot_times=t_grid, workers=workers,
        )
        for k in range(t_grid.size):
            pts = batch.snapshots[:, k, :]
            live = ~np.isnan(pts[:, 0])
            if int(live.sum()) < MIN_SURVIVORS:
                raise TooFewSurvivors(
                    f"{int(live.sum())} survivors at start {x.tolist()}, t={t_grid[k]}"
                )
            hists[(i, k)] = _histogram_measure(pts[live] * scale[k], bin_spec)
    tv_t = np.array([
        [hists[(i, k)].tv(hists[(i, k + 1)]) for k in range(t_grid.size - 1)]
        for i in range(starts.shape[0])
    ])
    last = t_grid.size - 1
    tv_s = np.array([
        hists[(0, last)].tv(hists[(i, last)]) for i in range(starts.shape[0])
    ])
    return YaglomReport(
        starts=starts, t_grid=t_grid, histograms=hists,
        tv_over_t=tv_t, tv_over_starts=tv_s,
    )


# ---------------------------------------------------------------------------
# half-space profile


@dataclass(frozen=True)
class ProfileReport:
    deltas: np.ndarray
    p_hat: np.ndarray
    se: np.ndarray
    branch_slope: EstimateCI     # fitted exponent on delta << t^(1/alpha)
    plateau_slope: EstimateCI    # slope on delta >> t^(1/alpha)
    plateau_level: float


def halfspace_profile_check(
    model: StableModel,
    domain,
    delta_grid: Sequence[float],
    t: float,
    n: int,
    scheme: Optional[SchemeParams] = None,
    master_seed: int = 0,
    run_tag: int = 9,
    workers: int = 1,
) -> ProfileReport:
    """Survival profile against (1 ^ delta/t^(1/alpha))^beta on a half-space.

    Fits the power branch over delta < 0.3 t^(1/alpha) and the plateau over
    delta > 3 t^(1/alpha).
    """
    if not isinstance(domain, geometry.HalfSpace):
        raise UnsupportedFeature("profile check needs a half-space domain")
    deltas = np.asarray(sorted(float(s) for s in delta_grid))
    normal = domain.axis
    p = np.empty(deltas.size)
    for i, s in enumerate(deltas):
        est = survival_probability(
            model, domain, s * normal, t, n, scheme,
            master_seed, run_tag * 1000 + i, workers,
        )
        p[i] = est.value
    se = np.sqrt(p * (1.0 - p) / n)
    scale = t ** (1.0 / model.alpha)
    lowmask = (deltas < 0.3 * scale) & (p * n >= MIN_SURVIVORS)
    himask = deltas > 3.0 * scale
    if lowmask.sum() < 3 or himask.sum() < 2:
        raise DegenerateGrid("delta_grid must straddle t^(1/alpha) with >=3 low, >=2 high points")
    wl = n * p[lowmask] / (1.0 - p[lowmask] + 1e-300)
    branch = _wls_slope(np.log(deltas[lowmask]), np.log(p[lowmask]), wl)
    branch_se = _slope_se(np.log(deltas[lowmask]), 1.0 / np.sqrt(wl))
    wh = n * p[himask] / (1.0 - p[himask] + 1e-300)
    plateau = _wls_slope(np.log(deltas[himask]), np.log(p[himask]), wh)
    plateau_se = _slope_se(np.log(deltas[himask]), 1.0 / np.sqrt(wh))
    return ProfileReport(
        deltas=deltas,
        p_hat=p,
        se=se,
        branch_slope=EstimateCI(branch, branch_se, n, "wls-profile-branch"),
        plateau_slope=EstimateCI(plateau, plateau_se, n, "wls-profile-plateau"),
        plateau_level=float(p[himask].max()),
    )


def _slope_se(logx: np.ndarray, sigma_y: np.ndarray) -> float:
    """Exact WLS slope standard error for independent gaussian-ish points."""
    w = 1.0 / sigma_y**2
    xbar = (w * logx).sum() / w.sum()
    return float(1.0 / math.sqrt((w * (logx - xbar) ** 2).sum()))
