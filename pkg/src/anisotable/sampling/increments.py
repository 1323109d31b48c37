"""Increment samplers: spherical directions, big-jump sums, exact 1-d oracle.

The multivariate scheme sums compound-Poisson big jumps (|z| > eps) and the
regime compensation; the exact one-dimensional sampler is Chambers-Mallows-
Stuck in the strictly stable parametrization, used as the oracle the scheme
is tested against.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .._rng import Stream
from ..errors import AlphaOneAsymmetric, ConfigError, JumpCapExceeded
from ..model import StableModel
from .scheme import GAUSSIAN, SchemeParams, resolve_scheme


def sample_direction(model: StableModel, n: int, stream: Stream) -> np.ndarray:
    """Directions distributed proportionally to lambda on the sphere.

    Rejection from the uniform sphere with envelope theta_high; acceptance
    probability is at least theta_low/theta_high.
    """
    out = np.empty((n, model.dim))
    pending = np.arange(n)
    hi = model.theta_high
    while pending.size:
        props = _uniform_sphere(model.dim, pending.size, stream)
        accept = stream.uniform(pending.size) * hi <= model.density.evaluate(props)
        out[pending[accept]] = props[accept]
        pending = pending[~accept]
    return out


def _uniform_sphere(dim: int, n: int, stream: Stream) -> np.ndarray:
    if dim == 1:
        return np.where(stream.uniform(n) < 0.5, 1.0, -1.0)[:, None]
    if dim == 2:
        ang = 2.0 * np.pi * stream.uniform(n)
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    if dim == 3:
        z = 2.0 * stream.uniform(n) - 1.0
        phi = 2.0 * np.pi * stream.uniform(n)
        s = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        return np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)
    raise ConfigError(f"direction sampling supports d <= 3, got {dim}")


def compensation_drift(model: StableModel, eps: float, mode_code: int) -> np.ndarray:
    """Deterministic drift per unit time for the truncated scheme.

    alpha > 1: subtract the big-jump mean so the total mean is zero.
    alpha = 1: zero (the small-jump compensator vanishes by the zero-mean
    condition). alpha < 1: zero in drop mode; in gaussian mode the dropped
    jumps' mean is restored.
    """
    a = model.alpha
    if a > 1.0:
        return -model.big_jump_mean_rate(eps)
    if a < 1.0 and mode_code == GAUSSIAN:
        return model.small_jump_mean_rate(eps)
    return np.zeros(model.dim)


def surrogate_chol(model: StableModel, eps: float) -> np.ndarray:
    """Cholesky factor of the small-jump covariance per unit time."""
    cov = model.small_jump_cov_rate(eps)
    # guard tiny negative eigen-noise from quadrature
    return np.linalg.cholesky(cov + 1e-300 * np.eye(model.dim))


_INCREMENT_CHUNK = 2048  # bounds the flattened-jump arrays' memory


def sample_increment(
    model: StableModel,
    t: float,
    n: int,
    stream: Stream,
    scheme: Optional[SchemeParams] = None,
    return_jump_counts: bool = False,
):
    """n displacements of the process over time t under the truncated scheme."""
    if t <= 0.0:
        raise ConfigError("t must be positive")
    scheme = resolve_scheme(model, t, scheme)
    eps, mode = scheme.eps, scheme.mode_code()
    rate = model.big_jump_rate(eps)
    cap = scheme.max_jumps_per_step * max(1, int(round(t / scheme.delta)))

    out = np.zeros((n, model.dim))
    counts = np.zeros(n, dtype=np.int64)
    for lo in range(0, n, _INCREMENT_CHUNK):
        hi = min(lo + _INCREMENT_CHUNK, n)
        c = stream.poisson(np.full(hi - lo, rate * t))
        if c.max(initial=0) > cap:
            raise JumpCapExceeded(
                f"a sample drew {c.max()} jumps > cap {cap}; increase eps"
            )
        counts[lo:hi] = c
        total = int(c.sum())
        if total:
            dirs = sample_direction(model, total, stream)
            radii = eps * stream.uniform(total) ** (-1.0 / model.alpha)
            owner = np.repeat(np.arange(lo, hi), c)
            np.add.at(out, owner, dirs * radii[:, None])

    out += t * compensation_drift(model, eps, mode)
    if mode == GAUSSIAN:
        chol = surrogate_chol(model, eps)
        out += math.sqrt(t) * stream.normal(n, model.dim) @ chol.T
    if return_jump_counts:
        return out, counts
    return out


# ---------------------------------------------------------------------------
# exact 1-d sampler (Chambers-Mallows-Stuck)


def stable_scale(alpha: float, c_minus: float, c_plus: float) -> float:
    """Scale sigma with psi(xi) = sigma^alpha |xi|^alpha (1 - i b tan(pi a/2) sgn xi).

    sigma^alpha = (c+ + c-) Gamma(2-alpha) cos(pi alpha/2) / (alpha (1-alpha))
    for alpha != 1; at alpha = 1 (symmetric) the Cauchy scale is
    sigma = (c+ + c-) pi / 2.
    """
    if alpha == 1.0:
        return (c_plus + c_minus) * math.pi / 2.0
    k = math.gamma(2.0 - alpha) * math.cos(math.pi * alpha / 2.0) / (alpha * (1.0 - alpha))
    return ((c_plus + c_minus) * k) ** (1.0 / alpha)


def sample_increment_1d_exact(
    alpha: float,
    c_minus: float,
    c_plus: float,
    t: float,
    n: int,
    stream: Stream,
) -> np.ndarray:
    """Exact samples of Y_t with Levy density c-|z|^(-1-a) 1{z<0} + c+ z^(-1-a) 1{z>0}.

    Strictly stable parametrization; Y_t equals t^(1/alpha) Y_1 in law.
    """
    if not 0.0 < alpha < 2.0:
        raise ConfigError("alpha must lie in (0, 2)")
    if c_minus < 0.0 or c_plus < 0.0 or c_minus + c_plus <= 0.0:
        raise ConfigError("need c_minus, c_plus >= 0 with positive sum")
    sigma = stable_scale(alpha, c_minus, c_plus) * t ** (1.0 / alpha)
    u = (stream.uniform(n) - 0.5) * np.pi
    if alpha == 1.0:
        if c_minus != c_plus:
            raise AlphaOneAsymmetric("alpha=1 with c+ != c- is not strictly stable")
        return sigma * np.tan(u)
    w = -np.log(stream.uniform(n))
    beta_z = (c_plus - c_minus) / (c_plus + c_minus)
    t0 = math.atan(beta_z * math.tan(math.pi * alpha / 2.0)) / alpha
    num = np.sin(alpha * (u + t0))
    den = (math.cos(alpha * t0) * np.cos(u)) ** (1.0 / alpha)
    tail = (np.cos(alpha * t0 + (alpha - 1.0) * u) / w) ** ((1.0 - alpha) / alpha)
    return sigma * num / den * tail
