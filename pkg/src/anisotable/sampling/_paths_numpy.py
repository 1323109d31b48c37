"""Pure-numpy path engine: per-step vectorization over the alive set.

Same semantics as the numba kernel (checks at jump epochs, drift-segment
crossings, surrogate lump at sub-step ends); draws come from one per-batch
counter stream instead of per-path streams, so the two backends agree in
law but not byte-for-byte.
"""

from __future__ import annotations

import numpy as np

from .._rng import Stream
from .. import geometry
from ..geometry import COMPLEMENT_HYPERPLANE, CONE, FULL, HALFSPACE

KIND_CENSORED = 0
KIND_JUMP = 1
KIND_SKELETON = 2


def _contains_rows(dom_kind, axis, cos_psi, pts):
    if dom_kind == FULL:
        return np.ones(pts.shape[0], dtype=bool)
    dots = pts @ axis
    if dom_kind == HALFSPACE:
        return dots > 0.0
    if dom_kind == COMPLEMENT_HYPERPLANE:
        return dots != 0.0
    norms = np.linalg.norm(pts, axis=1)
    return (dots > norms * cos_psi) & (norms > 0.0)


def _crossing_linear(axis, p0, p1):
    a0 = p0 @ axis
    a1 = p1 @ axis
    denom = a0 - a1
    t = np.where(denom != 0.0, a0 / np.where(denom == 0.0, 1.0, denom), 1.0)
    return np.clip(t, 0.0, 1.0)


def _crossing_bisect(dom_kind, axis, cos_psi, p0, p1):
    lo = np.zeros(p0.shape[0])
    hi = np.ones(p0.shape[0])
    for _ in range(42):
        mid = 0.5 * (lo + hi)
        pts = p0 + (p1 - p0) * mid[:, None]
        inside = _contains_rows(dom_kind, axis, cos_psi, pts)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return hi


def _segment_exit_rows(dom_kind, axis, cos_psi, p0, p1):
    """(crossed, tstar) for straight segments p0 -> p1, vectorized."""
    n = p0.shape[0]
    if dom_kind == FULL or n == 0:
        return np.zeros(n, dtype=bool), np.zeros(n)
    if dom_kind == HALFSPACE:
        crossed = ~(p1 @ axis > 0.0)
        t = _crossing_linear(axis, p0, p1)
        return crossed, np.where(crossed, t, 0.0)
    if dom_kind == COMPLEMENT_HYPERPLANE:
        a0 = p0 @ axis
        a1 = p1 @ axis
        crossed = ((a0 > 0.0) != (a1 > 0.0)) | (a1 == 0.0)
        t = _crossing_linear(axis, p0, p1)
        return crossed, np.where(crossed, t, 0.0)
    crossed = ~_contains_rows(dom_kind, axis, cos_psi, p1)
    t = np.zeros(n)
    if crossed.any():
        t[crossed] = _crossing_bisect(dom_kind, axis, cos_psi, p0[crossed], p1[crossed])
    return crossed, t


def _sample_directions(model, n, stream: Stream) -> np.ndarray:
    # local import keeps increments <-> paths import graph acyclic
    from .increments import sample_direction

    return sample_direction(model, n, stream)


def run_paths_numpy(
    model, x0, nsteps, dt, eps, rate, cap, use_surrogate, drift, chol,
    domain, snap_steps, stream: Stream,
):
    """Simulate x0.shape[0] killed paths; returns the raw record arrays."""
    n, d = x0.shape
    dom_kind, dom_axis, dom_cos = geometry.domain_code(domain)
    inv_alpha = 1.0 / model.alpha
    lam = rate * dt
    sqdt = np.sqrt(dt)
    has_drift = bool(np.any(drift != 0.0))

    pos = np.array(x0, dtype=np.float64)
    alive = np.ones(n, dtype=bool)
    survived = np.zeros(n, dtype=np.uint8)
    exit_time = np.zeros(n)
    exit_kind = np.zeros(n, dtype=np.int8)
    pre_exit = np.zeros((n, d))
    post_exit = np.zeros((n, d))
    err = np.zeros(n, dtype=np.uint8)
    njumps = np.zeros(n, dtype=np.int64)
    snaps = np.full((n, len(snap_steps), d), np.nan)
    snap_lookup = {int(s): i for i, s in enumerate(snap_steps)}

    def record_exit(rows, t_abs, kind, pre, post):
        alive[rows] = False
        exit_time[rows] = t_abs
        exit_kind[rows] = kind
        pre_exit[rows] = pre
        post_exit[rows] = post

    for k in range(nsteps):
        rows = np.flatnonzero(alive)
        if rows.size == 0:
            break
        t0 = k * dt
        counts = stream.poisson(np.full(rows.size, lam))
        over = counts > cap
        if over.any():
            bad = rows[over]
            err[bad] = 1
            alive[bad] = False
            rows = rows[~over]
            counts = counts[~over]
        njumps[rows] += counts
        jmax = int(counts.max()) if counts.size else 0
        cur = np.zeros(rows.size)
        active = np.ones(rows.size, dtype=bool)

        if jmax > 0:
            epochs = stream.uniform(rows.size, jmax)
            epochs[np.arange(jmax)[None, :] >= counts[:, None]] = np.inf
            epochs.sort(axis=1)

        for j in range(jmax):
            m = active & (j < counts)
            if not m.any():
                break
            sel = np.flatnonzero(m)
            e = epochs[sel, j]
            if has_drift:
                p0 = pos[rows[sel]]
                p1 = p0 + drift[None, :] * ((e - cur[sel]) * dt)[:, None]
                crossed, tstar = _segment_exit_rows(dom_kind, dom_axis, dom_cos, p0, p1)
                if crossed.any():
                    c = np.flatnonzero(crossed)
                    pt = p0[c] + (p1[c] - p0[c]) * tstar[c][:, None]
                    t_abs = t0 + (cur[sel][c] + (e[c] - cur[sel][c]) * tstar[c]) * dt
                    record_exit(rows[sel[c]], t_abs, KIND_SKELETON, pt, pt)
                    active[sel[c]] = False
                    keep = ~crossed
                    pos[rows[sel[keep]]] = p1[keep]
                    sel = sel[keep]
                    e = e[keep]
                else:
                    pos[rows[sel]] = p1
            if sel.size == 0:
                continue
            cur[sel] = e
            dirs = _sample_directions(model, sel.size, stream)
            radii = eps * stream.uniform(sel.size) ** (-inv_alpha)
            pre = pos[rows[sel]].copy()
            landed = pre + dirs * radii[:, None]
            pos[rows[sel]] = landed
            outside = ~_contains_rows(dom_kind, dom_axis, dom_cos, landed)
            if outside.any():
                o = np.flatnonzero(outside)
                record_exit(rows[sel[o]], t0 + e[o] * dt, KIND_JUMP, pre[o], landed[o])
                active[sel[o]] = False

        live = np.flatnonzero(active & alive[rows])
        if has_drift and live.size:
            p0 = pos[rows[live]]
            p1 = p0 + drift[None, :] * ((1.0 - cur[live]) * dt)[:, None]
            crossed, tstar = _segment_exit_rows(dom_kind, dom_axis, dom_cos, p0, p1)
            if crossed.any():
                c = np.flatnonzero(crossed)
                pt = p0[c] + (p1[c] - p0[c]) * tstar[c][:, None]
                t_abs = t0 + (cur[live][c] + (1.0 - cur[live][c]) * tstar[c]) * dt
                record_exit(rows[live[c]], t_abs, KIND_SKELETON, pt, pt)
            pos[rows[live[~crossed]]] = p1[~crossed]
            live = live[~crossed]
        if use_surrogate and live.size:
            z = stream.normal(live.size, d)
            p0 = pos[rows[live]]
            p1 = p0 + sqdt * z @ chol.T
            pos[rows[live]] = p1
            outside = ~_contains_rows(dom_kind, dom_axis, dom_cos, p1)
            if outside.any():
                o = np.flatnonzero(outside)
                record_exit(rows[live[o]], t0 + dt, KIND_SKELETON, p0[o], p1[o])
        si = snap_lookup.get(k + 1)
        if si is not None:
            keep = np.flatnonzero(alive)
            snaps[keep, si, :] = pos[keep]

    left = np.flatnonzero(alive)
    survived[left] = 1
    exit_time[left] = nsteps * dt
    exit_kind[left] = KIND_CENSORED
    pre_exit[left] = pos[left]
    post_exit[left] = pos[left]
    return survived, exit_time, exit_kind, pre_exit, post_exit, err, njumps, snaps
