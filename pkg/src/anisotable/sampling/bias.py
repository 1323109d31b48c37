"""Scheme diagnostics: scaling self-test and the exact 1-d oracle test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .._rng import Stream, derive_key
from ..model import StableModel, projection_coefficients
from .increments import sample_increment, sample_increment_1d_exact
from .scheme import SchemeParams


@dataclass(frozen=True)
class BiasProbeReport:
    eps: float
    ks_scaling: float
    p_scaling: float
    ks_oracle: float      # NaN when d > 1
    p_oracle: float
    suggested_eps: float
    suggested_delta: float


def scheme_bias_probe(
    model: StableModel,
    scheme: SchemeParams,
    n: int,
    master_seed: int = 0,
    t: float = 1.0,
) -> BiasProbeReport:
    """KS statistics of the truncated scheme at the probe's eps.

    The scaling test compares t^(-1/alpha) X_t against X_1 (an exact identity
    of the strictly stable law, so any excess KS distance is scheme error);
    in d=1 the oracle test compares against the exact CMS sampler.
    """
    a = model.alpha
    s1 = Stream(derive_key(master_seed, 0x70726F62, 1))
    s2 = Stream(derive_key(master_seed, 0x70726F62, 2))
    x_t = sample_increment(model, 2.0 * t, n, s1, scheme)
    x_1 = sample_increment(model, t, n, s2, scheme)
    rescaled = 2.0 ** (-1.0 / a) * x_t
    # KS on the first coordinate; rotation of the identity adds nothing in law
    ks1 = stats.ks_2samp(rescaled[:, 0], x_1[:, 0])
    ks_o, p_o = np.nan, np.nan
    if model.dim == 1:
        coeffs = projection_coefficients(model, np.array([1.0]))
        s3 = Stream(derive_key(master_seed, 0x70726F62, 3))
        exact = sample_increment_1d_exact(a, coeffs.c_minus, coeffs.c_plus, t, n, s3)
        ks = stats.ks_2samp(x_1[:, 0], exact)
        ks_o, p_o = float(ks.statistic), float(ks.pvalue)
    delta = scheme.delta if scheme.delta is not None else t / 2048.0
    return BiasProbeReport(
        eps=float(scheme.eps) if scheme.eps is not None else delta ** (1.0 / a),
        ks_scaling=float(ks1.statistic),
        p_scaling=float(ks1.pvalue),
        ks_oracle=ks_o,
        p_oracle=p_o,
        suggested_eps=delta ** (1.0 / a),
        suggested_delta=delta,
    )
