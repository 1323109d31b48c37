"""Scale-invariant fat cones: membership, boundary distance, fatness witnesses.

All variants are open sets invariant under dilation (rx in the set whenever
x is, r > 0) and carry closed-form boundary distances, so exit detection in
the sampler stays unbiased. The boundary itself is outside (open-set
convention, matching the first exit time from the open set).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigError, KappaTooLarge

FULL = 0
HALFSPACE = 1
CONE = 2
COMPLEMENT_HYPERPLANE = 3


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    n = float(np.linalg.norm(v))
    if not n > 0.0:
        raise ConfigError("axis must be a nonzero vector")
    return v / n


@dataclass(frozen=True)
class FullSpace:
    dim: int

    @property
    def axis(self) -> np.ndarray:
        e = np.zeros(self.dim)
        e[-1] = 1.0
        return e


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """Open half-space {x : x . axis > 0}; axis is the inward normal."""

    axis: np.ndarray

    def __init__(self, axis):
        object.__setattr__(self, "axis", _unit(axis))

    @property
    def dim(self) -> int:
        return self.axis.size


@dataclass(frozen=True, eq=False)
class CircularCone:
    """Open circular cone {x != 0 : angle(x, axis) < half_angle}."""

    axis: np.ndarray
    half_angle: float

    def __init__(self, axis, half_angle: float):
        if not 0.0 < half_angle < np.pi:
            raise ConfigError("half_angle must lie in (0, pi)")
        object.__setattr__(self, "axis", _unit(axis))
        object.__setattr__(self, "half_angle", float(half_angle))

    @property
    def dim(self) -> int:
        return self.axis.size


@dataclass(frozen=True, eq=False)
class ComplementHyperplane:
    """R^d minus the hyperplane {x . axis = 0}."""

    axis: np.ndarray

    def __init__(self, axis):
        object.__setattr__(self, "axis", _unit(axis))

    @property
    def dim(self) -> int:
        return self.axis.size


ConeDomain = Union[FullSpace, HalfSpace, CircularCone, ComplementHyperplane]


def reference_point(domain: ConeDomain) -> np.ndarray:
    """An interior unit point: the rotated equivalent of (0,...,0,1)."""
    return np.asarray(domain.axis, dtype=np.float64).copy()


def contains(domain: ConeDomain, x) -> np.ndarray:
    """Open-set membership; boundary points excluded. Vectorized over rows."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = x[None, :] if single else x
    if isinstance(domain, FullSpace):
        out = np.ones(pts.shape[0], dtype=bool)
    elif isinstance(domain, HalfSpace):
        out = pts @ domain.axis > 0.0
    elif isinstance(domain, ComplementHyperplane):
        out = pts @ domain.axis != 0.0
    else:
        proj = pts @ domain.axis
        norms = np.linalg.norm(pts, axis=1)
        # angle < psi  <=>  x.a > |x| cos(psi), origin excluded
        out = (proj > norms * np.cos(domain.half_angle)) & (norms > 0.0)
    return bool(out[0]) if single else out


def boundary_distance(domain: ConeDomain, x) -> np.ndarray:
    """delta(x) = inf |y-x| over the complement; 0 outside the open set."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = x[None, :] if single else x
    if isinstance(domain, FullSpace):
        out = np.full(pts.shape[0], np.inf)
    elif isinstance(domain, HalfSpace):
        out = np.maximum(pts @ domain.axis, 0.0)
    elif isinstance(domain, ComplementHyperplane):
        out = np.abs(pts @ domain.axis)
    else:
        psi = domain.half_angle
        proj = pts @ domain.axis
        norms = np.linalg.norm(pts, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            cosang = np.where(norms > 0.0, proj / norms, 1.0)
        theta = np.arccos(np.clip(cosang, -1.0, 1.0))
        inside = (theta < psi) & (norms > 0.0)
        # nearest complement point: the apex once psi - theta >= pi/2,
        # otherwise the foot on the boundary cone surface
        gap = psi - theta
        out = np.where(gap >= 0.5 * np.pi, norms, norms * np.sin(np.maximum(gap, 0.0)))
        out = np.where(inside, out, 0.0)
    return float(out[0]) if single else out


def fat_witness(domain: ConeDomain, Q, r: float, kappa: float) -> np.ndarray:
    """A point A with B(A, kappa*r) inside domain ∩ B(Q, r).

    Construction: step from Q toward the axis (inward normal) by r/2; if that
    candidate cannot certify the requested kappa, fall back to a grid search
    in the plane spanned by the axis and Q.
    """
    Q = np.asarray(Q, dtype=np.float64)
    if not 0.0 < kappa < 1.0:
        raise ConfigError("kappa must lie in (0, 1)")
    if r <= 0.0:
        raise ConfigError("r must be positive")

    def ok(A: np.ndarray) -> bool:
        return (
            boundary_distance(domain, A) >= kappa * r * (1.0 - 1e-12)
            and np.linalg.norm(A - Q) + kappa * r <= r * (1.0 + 1e-12)
        )

    if isinstance(domain, FullSpace):
        return Q.copy()
    if isinstance(domain, ComplementHyperplane):
        side = 1.0 if Q @ domain.axis >= 0.0 else -1.0
        A = Q + 0.5 * r * side * domain.axis
    else:
        A = Q + 0.5 * r * np.asarray(domain.axis)
    if ok(A):
        return A
    best, best_val = _witness_search(domain, Q, r)
    if best_val >= kappa:
        return best
    raise KappaTooLarge(
        f"no witness with kappa={kappa:g} at Q={Q.tolist()}, r={r:g} "
        f"(feasible kappa ~ {best_val:.4f})"
    )


def _witness_search(domain: ConeDomain, Q: np.ndarray, r: float, n: int = 201):
    """Grid-search max over A in B(Q,r) of min(delta(A), r - |A-Q|) / r."""
    axis = np.asarray(domain.axis, dtype=np.float64)
    perp = Q - (Q @ axis) * axis
    pn = np.linalg.norm(perp)
    if pn > 1e-12:
        perp = perp / pn
    else:  # Q on the axis: any orthogonal direction
        perp = np.zeros_like(axis)
        perp[int(np.argmin(np.abs(axis)))] = 1.0
        perp -= (perp @ axis) * axis
        perp /= np.linalg.norm(perp)
    a = np.linspace(-r, r, n)
    b = np.linspace(-r, r, n)
    A, B = np.meshgrid(a, b, indexing="ij")
    pts = Q[None, :] + A.reshape(-1, 1) * axis[None, :] + B.reshape(-1, 1) * perp[None, :]
    room = r - np.linalg.norm(pts - Q[None, :], axis=1)
    val = np.minimum(boundary_distance(domain, pts), room) / r
    k = int(np.argmax(val))
    return pts[k], float(val[k])


def kappa_estimate(domain: ConeDomain) -> float:
    """Numeric fatness constant, valid at every scale by cone invariance."""
    if isinstance(domain, FullSpace):
        return 0.99
    Q = np.zeros(domain.dim)  # boundary point; for cones the apex binds
    _, val = _witness_search(domain, Q, 1.0, n=801)
    return min(val, 0.99)


def domain_from_dict(spec: dict) -> ConeDomain:
    known = {"kind", "axis", "half_angle", "dim"}
    extra = set(spec) - known
    if extra:
        raise ConfigError(f"unknown domain fields: {sorted(extra)}")
    kind = spec.get("kind")
    if kind == "full":
        return FullSpace(dim=int(spec["dim"]))
    if kind == "halfspace":
        return HalfSpace(spec["axis"])
    if kind == "cone":
        return CircularCone(spec["axis"], float(spec["half_angle"]))
    if kind == "complement_hyperplane":
        return ComplementHyperplane(spec["axis"])
    raise ConfigError(f"unknown domain kind: {kind!r}")


def domain_to_dict(domain: ConeDomain) -> dict:
    if isinstance(domain, FullSpace):
        return {"kind": "full", "dim": domain.dim}
    if isinstance(domain, HalfSpace):
        return {"kind": "halfspace", "axis": domain.axis.tolist()}
    if isinstance(domain, CircularCone):
        return {
            "kind": "cone",
            "axis": domain.axis.tolist(),
            "half_angle": domain.half_angle,
        }
    return {"kind": "complement_hyperplane", "axis": domain.axis.tolist()}


def domain_code(domain: ConeDomain):
    """(code, axis, cos_half_angle) packing consumed by the path engines."""
    if isinstance(domain, FullSpace):
        return FULL, np.asarray(domain.axis), 0.0
    if isinstance(domain, HalfSpace):
        return HALFSPACE, domain.axis, 0.0
    if isinstance(domain, CircularCone):
        return CONE, domain.axis, float(np.cos(domain.half_angle))
    return COMPLEMENT_HYPERPLANE, domain.axis, 0.0
