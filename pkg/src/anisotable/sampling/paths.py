"""Killed-path simulation: public API over the numba and numpy engines.

The skeleton advances in steps of length delta with big jumps inserted at
their Poisson epochs; domain membership is checked after every sub-step and
at every jump arrival (pre- and post-jump states). Between jumps the path
moves by the deterministic compensation drift only, so segment checks are
exact for half-spaces, complement-hyperplanes and convex cones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .._backend import HAVE_NUMBA
from .._rng import Stream, path_keys
from .. import geometry
from ..errors import ConfigError, JumpCapExceeded, UnsupportedFeature
from ..model import DENSITY_CONSTANT, DENSITY_HEMISPHERE, DENSITY_TABULATED
from ..model import ConstantDensity, HemisphereDensity, StableModel, TabulatedDensity, sphere_grid
from .increments import compensation_drift, surrogate_chol
from .scheme import GAUSSIAN, SchemeParams, resolve_scheme

EXIT_KINDS = ("Censored", "Jump", "SkeletonCrossing")
KIND_CENSORED_CODE = 0
KIND_JUMP_CODE = 1
KIND_SKELETON_CODE = 2


@dataclass(frozen=True, eq=False)
class ExitBatch:
    """Struct-of-arrays record of one batch of simulated exits."""

    start: np.ndarray        # (n, d)
    survived: np.ndarray     # (n,) bool
    exit_time: np.ndarray    # (n,)
    pre_exit: np.ndarray     # (n, d)
    post_exit: np.ndarray    # (n, d)
    exit_kind: np.ndarray    # (n,) int8: 0 censored, 1 jump, 2 skeleton
    njumps: np.ndarray       # (n,)
    t_max: float
    snapshots: np.ndarray    # (n, s, d); NaN once dead
    snapshot_times: np.ndarray

    @property
    def n(self) -> int:
        return self.survived.shape[0]

    def alive_at(self, t: float) -> np.ndarray:
        """Indicator of tau > t; exact for t on [0, t_max]."""
        if t > self.t_max:
            raise ConfigError(f"t={t} beyond simulated horizon {self.t_max}")
        return self.survived | (self.exit_time > t)


def _density_tables(model: StableModel):
    d = model.density
    dummy = np.zeros(1)
    if isinstance(d, ConstantDensity):
        return DENSITY_CONSTANT, np.zeros(model.dim), d.value, d.value, dummy
    if isinstance(d, HemisphereDensity):
        return DENSITY_HEMISPHERE, d.axis, d.plus_weight, d.minus_weight, dummy
    if isinstance(d, TabulatedDensity):
        if model.dim != 2:
            raise UnsupportedFeature("tabulated densities are sampleable only in d=2")
        grid, _ = sphere_grid(2)
        if d.points.shape != grid.shape or not np.allclose(d.points, grid):
            raise UnsupportedFeature(
                "sampling a tabulated density requires the standard S^1 grid "
                "(use tabulated_from_function)"
            )
        return DENSITY_TABULATED, np.zeros(2), 0.0, 0.0, d.values
    raise ConfigError(f"unknown density type {type(d).__name__}")


def run_paths(
    model: StableModel,
    domain,
    x0,
    t_max: float,
    scheme: Optional[SchemeParams],
    master_seed: int,
    batch_index: int,
    n: int,
    snapshot_times: Sequence[float] = (),
) -> ExitBatch:
    """Simulate n paths from x0 (a point or an (n, d) array) until exit or t_max."""
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.ndim == 1:
        x0 = np.broadcast_to(x0, (n, x0.size)).copy()
    if x0.shape != (n, model.dim):
        raise ConfigError(f"x0 must have shape ({n}, {model.dim})")
    inside = geometry.contains(domain, x0)
    if not np.all(inside):
        raise ConfigError("all start points must lie inside the domain")

    scheme = resolve_scheme(model, t_max, scheme)
    dt = scheme.delta
    nsteps = max(1, int(round(t_max / dt)))
    dt = t_max / nsteps
    snap_times = np.unique(np.asarray([float(t) for t in snapshot_times]))
    snap_steps = np.zeros(0, dtype=np.int64)
    if snap_times.size:
        snap_steps = np.round(snap_times / dt).astype(np.int64)
        if not np.allclose(snap_steps * dt, snap_times, rtol=1e-9, atol=1e-12):
            raise ConfigError(
                f"snapshot times {snap_times.tolist()} must be multiples of the "
                f"skeleton step ({dt:g} after rounding t_max/delta to {nsteps} steps); "
                "choose delta so that every snapshot sits on the grid"
            )
        if np.any(snap_steps < 1) or np.any(snap_steps > nsteps):
            raise ConfigError("snapshot times must lie in (0, t_max]")

    mode = scheme.mode_code()
    eps = scheme.eps
    rate = model.big_jump_rate(eps)
    drift = compensation_drift(model, eps, mode)
    use_surrogate = mode == GAUSSIAN
    chol = surrogate_chol(model, eps) if use_surrogate else np.zeros((model.dim, model.dim))
    dens_kind, dens_axis, dens_a, dens_b, dens_values = _density_tables(model)
    dom_kind, dom_axis, dom_cos = geometry.domain_code(domain)

    if HAVE_NUMBA:
        from ._paths_numba import run_paths_kernel

        keys = path_keys(master_seed, batch_index, n)
        survived = np.zeros(n, dtype=np.uint8)
        exit_time = np.zeros(n)
        exit_kind = np.zeros(n, dtype=np.int8)
        pre = np.zeros((n, model.dim))
        post = np.zeros((n, model.dim))
        err = np.zeros(n, dtype=np.uint8)
        njumps = np.zeros(n, dtype=np.int64)
        snaps = np.full((n, snap_steps.size, model.dim), np.nan)
        run_paths_kernel(
            keys, x0, model.dim,
            nsteps, dt, eps, 1.0 / model.alpha, rate, int(scheme.max_jumps_per_step),
            use_surrogate, drift, chol,
            dens_kind, np.asarray(dens_axis, dtype=np.float64), float(dens_a),
            float(dens_b), np.asarray(dens_values, dtype=np.float64),
            float(model.theta_high),
            dom_kind, np.asarray(dom_axis, dtype=np.float64), float(dom_cos),
            snap_steps,
            survived, exit_time, exit_kind, pre, post, err, njumps, snaps,
        )
    else:
        from ._paths_numpy import run_paths_numpy
        from .._rng import batch_key

        stream = Stream(batch_key(master_seed, batch_index))
        survived, exit_time, exit_kind, pre, post, err, njumps, snaps = run_paths_numpy(
            model, x0, nsteps, dt, eps, rate, int(scheme.max_jumps_per_step),
            use_surrogate, drift, chol, domain, snap_steps, stream,
        )
    if err.any():
        raise JumpCapExceeded(
            f"{int(err.sum())} paths exceeded max_jumps_per_step="
            f"{scheme.max_jumps_per_step}; eps too small for delta"
        )
    return ExitBatch(
        start=x0,
        survived=survived.astype(bool),
        exit_time=exit_time,
        pre_exit=pre,
        post_exit=post,
        exit_kind=exit_kind,
        njumps=njumps,
        t_max=t_max,
        snapshots=snaps,
        snapshot_times=snap_times,
    )


def sample_path_exit(
    model: StableModel,
    domain,
    x0,
    t_max: float,
    scheme: Optional[SchemeParams] = None,
    master_seed: int = 0,
    batch_index: int = 0,
) -> dict:
    """One path's censored exit data, as a plain record dict."""
    b = run_paths(model, domain, x0, t_max, scheme, master_seed, batch_index, 1)
    return {
        "start": b.start[0],
        "survived": bool(b.survived[0]),
        "exit_time": float(b.exit_time[0]),
        "pre_exit": b.pre_exit[0],
        "post_exit": b.post_exit[0],
        "exit_kind": EXIT_KINDS[int(b.exit_kind[0])],
    }


def concat_batches(batches: Sequence[ExitBatch]) -> ExitBatch:
    """Merge batches (in batch-index order) into one record set."""
    if not batches:
        raise ConfigError("no batches to merge")
    t_max = batches[0].t_max
    snap_times = batches[0].snapshot_times
    return ExitBatch(
        start=np.concatenate([b.start for b in batches]),
        survived=np.concatenate([b.survived for b in batches]),
        exit_time=np.concatenate([b.exit_time for b in batches]),
        pre_exit=np.concatenate([b.pre_exit for b in batches]),
        post_exit=np.concatenate([b.post_exit for b in batches]),
        exit_kind=np.concatenate([b.exit_kind for b in batches]),
        njumps=np.concatenate([b.njumps for b in batches]),
        t_max=t_max,
        snapshots=np.concatenate([b.snapshots for b in batches]),
        snapshot_times=snap_times,
    )
