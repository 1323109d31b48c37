"""Process construction: spherical density, validation, and exponent machinery.

A model is (alpha, dim, spherical density with two-sided bounds). Everything
else is derived: the Levy density lambda(x/|x|)|x|^(-d-alpha), the regime
drift that makes the process strictly stable, the Pruitt rate h, the
projected one-dimensional intensities c-, c+, and the half-space exponents.

Deterministic quadrature grids: the two-point sum on S^0, a 4096-point
trapezoid rule on S^1, and a 2562-node icosphere with uniform weights on
S^2. Grids are antipodally symmetric, so symmetric densities have exactly
zero quadrature mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import (
    AlphaEqualsOne,
    AlphaOneAsymmetric,
    AlphaOutOfRange,
    ConfigError,
    OriginEvaluation,
    ThetaBoundViolated,
    UnsupportedDimension,
)

TOL_MEAN = 1e-6  # relative to total spherical mass

DENSITY_CONSTANT = 0
DENSITY_HEMISPHERE = 1
DENSITY_TABULATED = 2


# ---------------------------------------------------------------------------
# spherical quadrature grids


@lru_cache(maxsize=None)
def sphere_grid(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """(points, weights) integrating against the surface measure on S^{d-1}."""
    if dim == 1:
        pts = np.array([[1.0], [-1.0]])
        wts = np.array([1.0, 1.0])
    elif dim == 2:
        n = 4096
        ang = (np.arange(n) + 0.5) * (2.0 * np.pi / n)
        pts = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        wts = np.full(n, 2.0 * np.pi / n)
    elif dim == 3:
        pts = _icosphere(4)
        wts = np.full(pts.shape[0], 4.0 * np.pi / pts.shape[0])
    else:
        raise UnsupportedDimension(f"quadrature grids cover d <= 3, got d={dim}")
    pts.setflags(write=False)
    wts.setflags(write=False)
    return pts, wts


def _icosphere(subdivisions: int) -> np.ndarray:
    """Vertices of a repeatedly subdivided icosahedron (2562 nodes at level 4)."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [np.asarray(v, dtype=np.float64) / np.linalg.norm(v) for v in verts]
    cache: dict[tuple[int, int], int] = {}

    def midpoint(i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        if key not in cache:
            m = verts[i] + verts[j]
            verts.append(m / np.linalg.norm(m))
            cache[key] = len(verts) - 1
        return cache[key]

    for _ in range(subdivisions):
        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    return np.asarray(verts)


# ---------------------------------------------------------------------------
# spherical densities


@dataclass(frozen=True)
class ConstantDensity:
    value: float
    theta_low: float = 0.0
    theta_high: float = 0.0

    def __post_init__(self):
        if self.theta_low == 0.0 and self.theta_high == 0.0:
            object.__setattr__(self, "theta_low", self.value)
            object.__setattr__(self, "theta_high", self.value)

    def evaluate(self, w) -> np.ndarray:
        w = np.atleast_2d(np.asarray(w, dtype=np.float64))
        return np.full(w.shape[0], self.value)

    def dual(self) -> "ConstantDensity":
        return self


@dataclass(frozen=True, eq=False)
class HemisphereDensity:
    """plus_weight on {w . axis > 0}, minus_weight on the other hemisphere.

    The equator is measure zero; its value is fixed to plus_weight.
    """

    axis: np.ndarray
    plus_weight: float
    minus_weight: float
    theta_low: float = 0.0
    theta_high: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.axis, dtype=np.float64)
        object.__setattr__(self, "axis", a / np.linalg.norm(a))
        if self.theta_low == 0.0 and self.theta_high == 0.0:
            object.__setattr__(self, "theta_low", min(self.plus_weight, self.minus_weight))
            object.__setattr__(self, "theta_high", max(self.plus_weight, self.minus_weight))

    def evaluate(self, w) -> np.ndarray:
        w = np.atleast_2d(np.asarray(w, dtype=np.float64))
        return np.where(w @ self.axis >= 0.0, self.plus_weight, self.minus_weight)

    def dual(self) -> "HemisphereDensity":
        return HemisphereDensity(
            self.axis, self.minus_weight, self.plus_weight,
            self.theta_low, self.theta_high,
        )


@dataclass(frozen=True, eq=False)
class TabulatedDensity:
    """Piecewise-constant values on spherical cells, nearest-node lookup.

    Cell values are what the bound check enforces, so the [theta, 1/theta]
    sandwich holds exactly for everything the sampler and quadrature see.
    """

    points: np.ndarray
    values: np.ndarray
    theta_low: float = 0.0
    theta_high: float = 0.0

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        norms = np.linalg.norm(p, axis=1, keepdims=True)
        object.__setattr__(self, "points", p / norms)
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape[0] != p.shape[0]:
            raise ConfigError("tabulated density needs one value per grid point")
        object.__setattr__(self, "values", v)
        if self.theta_low == 0.0 and self.theta_high == 0.0:
            object.__setattr__(self, "theta_low", float(v.min()))
            object.__setattr__(self, "theta_high", float(v.max()))

    def evaluate(self, w) -> np.ndarray:
        w = np.atleast_2d(np.asarray(w, dtype=np.float64))
        if self._is_standard_circle():
            n = self.values.shape[0]
            ang = np.mod(np.arctan2(w[:, 1], w[:, 0]), 2.0 * np.pi)
            idx = np.minimum((ang * n / (2.0 * np.pi)).astype(np.int64), n - 1)
            return self.values[idx]
        out = np.empty(w.shape[0])
        step = max(1, 2**22 // max(1, self.points.shape[0]))
        for i in range(0, w.shape[0], step):
            blk = w[i:i + step]
            out[i:i + step] = self.values[np.argmax(blk @ self.points.T, axis=1)]
        return out

    def _is_standard_circle(self) -> bool:
        if self.points.shape[1] != 2:
            return False
        pts, _ = sphere_grid(2)
        return self.points.shape == pts.shape and bool(np.allclose(self.points, pts))

    def dual(self) -> "TabulatedDensity":
        if self._is_standard_circle():
            # antipodal map on the midpoint circle grid is a half-turn roll
            n = self.values.shape[0]
            vals = np.roll(self.values, -(n // 2))
            return TabulatedDensity(self.points, vals, self.theta_low, self.theta_high)
        return TabulatedDensity(-self.points, self.values, self.theta_low, self.theta_high)


SphericalDensity = Union[ConstantDensity, HemisphereDensity, TabulatedDensity]


def tabulated_from_function(dim: int, fn) -> TabulatedDensity:
    """Tabulate fn(w) on the standard quadrature grid for `dim`."""
    pts, _ = sphere_grid(dim)
    vals = np.asarray([float(fn(p)) for p in pts])
    return TabulatedDensity(pts.copy(), vals)


# ---------------------------------------------------------------------------
# the validated model


@dataclass(frozen=True, eq=False)
class StableModel:
    alpha: float
    dim: int
    density: SphericalDensity
    # caches populated by validate()
    total_mass: float = field(default=0.0)
    mean_vector: np.ndarray = field(default=None)
    second_moment: np.ndarray = field(default=None)

    @property
    def theta_low(self) -> float:
        return self.density.theta_low

    @property
    def theta_high(self) -> float:
        return self.density.theta_high

    def big_jump_rate(self, eps: float) -> float:
        """nu(B_eps^c) = zeta(S) eps^(-alpha) / alpha."""
        return self.total_mass * eps ** (-self.alpha) / self.alpha

    def small_jump_mean_rate(self, eps: float) -> np.ndarray:
        """Mean of jumps below eps per unit time: m eps^(1-alpha)/(1-alpha)."""
        if self.alpha == 1.0:
            return np.zeros(self.dim)
        return self.mean_vector * eps ** (1.0 - self.alpha) / (1.0 - self.alpha)

    def big_jump_mean_rate(self, eps: float) -> np.ndarray:
        """Mean of jumps above eps per unit time (finite only for alpha > 1)."""
        if self.alpha <= 1.0:
            raise ConfigError("big-jump mean diverges for alpha <= 1")
        return self.mean_vector * eps ** (1.0 - self.alpha) / (self.alpha - 1.0)

    def small_jump_cov_rate(self, eps: float) -> np.ndarray:
        """Covariance of jumps below eps per unit time."""
        return self.second_moment * eps ** (2.0 - self.alpha) / (2.0 - self.alpha)

    def drift_gamma(self) -> np.ndarray:
        """The regime-pinned drift of the Levy triplet (never a free input)."""
        a = self.alpha
        if a < 1.0:
            return self.mean_vector / (1.0 - a)
        if a == 1.0:
            return np.zeros(self.dim)
        return -self.mean_vector / (a - 1.0)


def validate(alpha: float, dim: int, density: SphericalDensity) -> StableModel:
    """Build a model, enforcing strict stability and the density sandwich."""
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 2), got {alpha}")
    dim = int(dim)
    if dim < 1:
        raise ConfigError("dim must be a positive integer")
    pts, wts = sphere_grid(dim)

    if isinstance(density, (HemisphereDensity, TabulatedDensity)):
        if np.asarray(density.points if isinstance(density, TabulatedDensity) else density.axis).shape[-1] != dim:
            raise ConfigError("density axis/grid dimension does not match dim")

    lam = density.evaluate(pts)
    lo, hi = density.theta_low, density.theta_high
    if not (lo > 0.0 and hi >= lo):
        raise ThetaBoundViolated("need 0 < theta_low <= theta_high")
    if lam.min() < lo - 1e-12 or lam.max() > hi + 1e-12:
        raise ThetaBoundViolated(
            f"density range [{lam.min():g}, {lam.max():g}] leaves [{lo:g}, {hi:g}]"
        )

    total = float(np.sum(wts * lam))
    mean = (wts * lam) @ pts
    second = (pts * (wts * lam)[:, None]).T @ pts
    if alpha == 1.0 and np.linalg.norm(mean) > TOL_MEAN * total:
        raise AlphaOneAsymmetric(
            f"alpha=1 requires zero spherical mean; |mean|={np.linalg.norm(mean):g}"
        )
    return StableModel(
        alpha=alpha, dim=dim, density=density,
        total_mass=total, mean_vector=mean, second_moment=second,
    )


def dual(model: StableModel) -> StableModel:
    """The model of the dual process -X: antipodally reflected density."""
    return validate(model.alpha, model.dim, model.density.dual())


def levy_density(model: StableModel, x) -> np.ndarray:
    """nu(x) = lambda(x/|x|) |x|^(-d-alpha); two-sided bounded by theta."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = x[None, :] if single else x
    r = np.linalg.norm(pts, axis=1)
    if np.any(r == 0.0):
        raise OriginEvaluation("levy_density is undefined at the origin")
    vals = model.density.evaluate(pts / r[:, None]) * r ** (-model.dim - model.alpha)
    return float(vals[0]) if single else vals


def pruitt_h(model: StableModel, r: float) -> float:
    """Pruitt's expansion rate h(r) = h(1) r^(-alpha).

    h(1) sums the truncated second moment, the tail mass, and the drift term
    |gamma| with the regime-pinned gamma; exact r^(-alpha) scaling then holds
    by homogeneity of the Levy density.
    """
    if r <= 0.0:
        raise ConfigError("r must be positive")
    a = model.alpha
    h1 = model.total_mass * (1.0 / (2.0 - a) + 1.0 / a)
    h1 += float(np.linalg.norm(model.drift_gamma()))
    return h1 * r ** (-a)


# ---------------------------------------------------------------------------
# projection onto a direction and the half-space exponents


@dataclass(frozen=True, eq=False)
class ProjectionCoeffs:
    """One-dimensional Levy intensities of Y = <X, direction>.

    nu_Y(z) = c_minus |z|^(-1-alpha) on z<0, c_plus z^(-1-alpha) on z>0.
    """

    direction: np.ndarray
    c_minus: float
    c_plus: float


@dataclass(frozen=True)
class HalfspaceExponents:
    """Martin-kernel homogeneity orders for the half-space {x . n > 0}.

    rho is P(Y_1 > 0) for Y the projection of X on the inward normal n.
    The survival/Martin exponent of X in the half-space is beta = alpha*(1-rho)
    (the dual's positivity), confirmed against the survival-slope regression;
    beta_hat = alpha*rho is the dual exponent. They swap under model duality.
    """

    rho: float
    beta: float
    beta_hat: float


def projection_coefficients(model: StableModel, direction) -> ProjectionCoeffs:
    """Hemisphere integrals c± = ∫_{w.u>0} lambda(±w) (w.u)^alpha dσ(w)."""
    u = np.asarray(direction, dtype=np.float64)
    u = u / np.linalg.norm(u)
    pts, wts = sphere_grid(model.dim)
    proj = pts @ u
    mask = proj > 0.0
    pw = proj[mask] ** model.alpha * wts[mask]
    c_plus = float(pw @ model.density.evaluate(pts[mask]))
    c_minus = float(pw @ model.density.evaluate(-pts[mask]))
    return ProjectionCoeffs(direction=u, c_minus=c_minus, c_plus=c_plus)


def positivity_parameter(coeffs: ProjectionCoeffs, alpha: float) -> float:
    """Zolotarev's rho = P(Y_1 > 0) for the strictly stable projection.

    rho = 1/2 + arctan(b tan(pi alpha/2)) / (pi alpha), b = (c+-c-)/(c++c-).
    The principal arctan branch lands in the strictly-stable range
    (1 - 1/alpha, 1/alpha) for alpha > 1 (checked), so no correction needed.
    """
    if coeffs.c_minus <= 0.0 or coeffs.c_plus <= 0.0:
        raise ConfigError("positivity parameter needs c_minus, c_plus > 0")
    if alpha == 1.0:
        # strict stability at alpha=1 forces c+ = c- (the difference is the
        # spherical mean projected on u); tolerate quadrature-level residue
        if abs(coeffs.c_plus - coeffs.c_minus) <= 1e-5 * (coeffs.c_plus + coeffs.c_minus):
            return 0.5
        raise AlphaEqualsOne(
            "closed form invalid at alpha=1 with c+ != c-; "
            "use the Monte Carlo sign frequency (sampler module)"
        )
    b = (coeffs.c_plus - coeffs.c_minus) / (coeffs.c_plus + coeffs.c_minus)
    rho = 0.5 + math.atan(b * math.tan(math.pi * alpha / 2.0)) / (math.pi * alpha)
    if alpha > 1.0:
        lo, hi = 1.0 - 1.0 / alpha, 1.0 / alpha
        assert lo - 1e-12 <= rho <= hi + 1e-12
        rho = min(max(rho, lo), hi)
    return rho


def halfspace_exponents(model: StableModel, normal) -> HalfspaceExponents:
    """Exponents (beta, beta_hat) for the half-space with inward normal.

    beta governs P_x(tau > t) ~ M(x) t^(-beta/alpha) for the model's own
    process in {x . n > 0}; the dual model swaps (beta, beta_hat).
    """
    coeffs = projection_coefficients(model, normal)
    rho = positivity_parameter(coeffs, model.alpha)
    return HalfspaceExponents(
        rho=rho,
        beta=model.alpha * (1.0 - rho),
        beta_hat=model.alpha * rho,
    )


# ---------------------------------------------------------------------------
# JSON model description


def model_from_dict(spec: dict) -> StableModel:
    known = {"alpha", "dim", "density", "theta_low", "theta_high"}
    extra = set(spec) - known
    if extra:
        raise ConfigError(f"unknown model fields: {sorted(extra)}")
    try:
        alpha = float(spec["alpha"])
        dim = int(spec["dim"])
        dens = dict(spec["density"])
    except KeyError as e:
        raise ConfigError(f"model spec missing field: {e}") from None
    lo = float(spec.get("theta_low", 0.0))
    hi = float(spec.get("theta_high", 0.0))
    kind = dens.pop("kind", None)
    if kind == "constant":
        _reject_extra(dens, {"value"})
        density = ConstantDensity(float(dens["value"]), lo, hi)
    elif kind == "hemisphere":
        _reject_extra(dens, {"axis", "plus_weight", "minus_weight"})
        density = HemisphereDensity(
            dens["axis"], float(dens["plus_weight"]), float(dens["minus_weight"]), lo, hi
        )
    elif kind == "tabulated":
        _reject_extra(dens, {"points", "values"})
        density = TabulatedDensity(dens["points"], dens["values"], lo, hi)
    else:
        raise ConfigError(f"unknown density kind: {kind!r}")
    return validate(alpha, dim, density)


def _reject_extra(d: dict, allowed: set):
    extra = set(d) - allowed
    if extra:
        raise ConfigError(f"unknown density fields: {sorted(extra)}")


def model_to_dict(model: StableModel) -> dict:
    d = model.density
    if isinstance(d, ConstantDensity):
        density = {"kind": "constant", "value": d.value}
    elif isinstance(d, HemisphereDensity):
        density = {
            "kind": "hemisphere",
            "axis": d.axis.tolist(),
            "plus_weight": d.plus_weight,
            "minus_weight": d.minus_weight,
        }
    else:
        density = {
            "kind": "tabulated",
            "points": d.points.tolist(),
            "values": d.values.tolist(),
        }
    return {
        "alpha": model.alpha,
        "dim": model.dim,
        "density": density,
        "theta_low": model.theta_low,
        "theta_high": model.theta_high,
    }
