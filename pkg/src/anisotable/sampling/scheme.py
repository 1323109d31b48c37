"""Simulation scheme parameters and their defaults."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from ..errors import ConfigError
from ..model import StableModel

DROP = 0
GAUSSIAN = 1

_MODES = {"drop": DROP, "gaussian": GAUSSIAN}


@dataclass(frozen=True)
class SchemeParams:
    """Jump cutoff, skeleton step, and small-jump treatment.

    Unset eps/delta resolve against the workload: delta = t_max/2048 and
    eps = delta^(1/alpha), matching the self-similar scale of one step.
    small_jump_mode defaults per regime: drop for alpha <= 1, gaussian
    surrogate for alpha > 1. The gaussian mode matches the covariance of
    the dropped jumps (and, for alpha < 1, also restores their mean as
    deterministic drift).
    """

    eps: Optional[float] = None
    delta: Optional[float] = None
    small_jump_mode: Optional[str] = None
    max_jumps_per_step: Optional[int] = None

    def mode_code(self) -> int:
        try:
            return _MODES[self.small_jump_mode]
        except KeyError:
            raise ConfigError(
                f"small_jump_mode must be one of {sorted(_MODES)}, "
                f"got {self.small_jump_mode!r}"
            ) from None


def resolve_scheme(model: StableModel, t_max: float, scheme: Optional[SchemeParams]) -> SchemeParams:
    """Fill unset fields; enforce the 20x cap margin on the jump budget."""
    if t_max <= 0.0:
        raise ConfigError("t_max must be positive")
    scheme = scheme or SchemeParams()
    delta = scheme.delta if scheme.delta is not None else t_max / 2048.0
    if delta <= 0.0:
        raise ConfigError("delta must be positive")
    delta = min(delta, t_max)
    eps = scheme.eps if scheme.eps is not None else delta ** (1.0 / model.alpha)
    if eps <= 0.0:
        raise ConfigError("eps must be positive")
    mode = scheme.small_jump_mode
    if mode is None:
        mode = "drop" if model.alpha <= 1.0 else "gaussian"
    expected = model.big_jump_rate(eps) * delta
    cap = scheme.max_jumps_per_step
    if cap is None:
        cap = max(64, int(20.0 * expected) + 1)
    elif cap < 20.0 * expected:
        raise ConfigError(
            f"max_jumps_per_step={cap} below 20x the expected per-step "
            f"big-jump count {expected:.2f}"
        )
    return replace(
        scheme, eps=eps, delta=delta, small_jump_mode=mode, max_jumps_per_step=cap
    )


def scheme_from_dict(spec: dict) -> SchemeParams:
    known = {"eps", "delta", "small_jump_mode", "max_jumps_per_step"}
    extra = set(spec) - known
    if extra:
        raise ConfigError(f"unknown scheme fields: {sorted(extra)}")
    return SchemeParams(
        eps=None if spec.get("eps") is None else float(spec["eps"]),
        delta=None if spec.get("delta") is None else float(spec["delta"]),
        small_jump_mode=spec.get("small_jump_mode"),
        max_jumps_per_step=(
            None if spec.get("max_jumps_per_step") is None
            else int(spec["max_jumps_per_step"])
        ),
    )


def scheme_to_dict(scheme: SchemeParams) -> dict:
    return {
        "eps": scheme.eps,
        "delta": scheme.delta,
        "small_jump_mode": scheme.small_jump_mode,
        "max_jumps_per_step": scheme.max_jumps_per_step,
    }
