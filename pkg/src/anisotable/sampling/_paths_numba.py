"""@njit kernel for killed-path simulation (per-path counter-based streams)."""

from __future__ import annotations

import numpy as np
from numba import njit

U_GAMMA = np.uint64(0x9E3779B97F4A7C15)
U_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
U_MIX2 = np.uint64(0x94D049BB133111EB)
_TO_UNIT = 1.0 / 9007199254740992.0
_HALF_ULP = 0.5 / 9007199254740992.0

KIND_CENSORED = 0
KIND_JUMP = 1
KIND_SKELETON = 2

DOM_FULL = 0
DOM_HALFSPACE = 1
DOM_CONE = 2
DOM_COMPLEMENT = 3


@njit(inline="always")
def _unit_at(key, ctr):
    z = key + (ctr + np.uint64(1)) * U_GAMMA
    z = z ^ (z >> np.uint64(30))
    z = z * U_MIX1
    z = z ^ (z >> np.uint64(27))
    z = z * U_MIX2
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)) * _TO_UNIT + _HALF_ULP


@njit(inline="always")
def _contains(dom_kind, axis, cos_psi, p, d):
    if dom_kind == DOM_FULL:
        return True
    dot = 0.0
    nrm2 = 0.0
    for i in range(d):
        dot += p[i] * axis[i]
        nrm2 += p[i] * p[i]
    if dom_kind == DOM_HALFSPACE:
        return dot > 0.0
    if dom_kind == DOM_COMPLEMENT:
        return dot != 0.0
    # cone: x.a > |x| cos(psi), origin excluded
    return nrm2 > 0.0 and dot > np.sqrt(nrm2) * cos_psi


@njit
def _segment_exit(dom_kind, axis, cos_psi, p0, p1, d, out_point):
    """First exit of the straight segment p0 -> p1; returns (crossed, t*).

    Exact for half-spaces and complement-hyperplanes; endpoint check plus
    bisection for cones (exact for convex cones).
    """
    inside1 = _contains(dom_kind, axis, cos_psi, p1, d)
    if dom_kind == DOM_FULL:
        return False, 0.0
    if dom_kind == DOM_HALFSPACE or dom_kind == DOM_COMPLEMENT:
        a0 = 0.0
        a1 = 0.0
        for i in range(d):
            a0 += p0[i] * axis[i]
            a1 += p1[i] * axis[i]
        crossed = (a0 > 0.0) != (a1 > 0.0) or a1 == 0.0
        if dom_kind == DOM_HALFSPACE:
            crossed = not inside1
        if not crossed:
            return False, 0.0
        denom = a0 - a1
        t = a0 / denom if denom != 0.0 else 1.0
        if t < 0.0:
            t = 0.0
        if t > 1.0:
            t = 1.0
        for i in range(d):
            out_point[i] = p0[i] + (p1[i] - p0[i]) * t
        return True, t
    # cone
    if inside1:
        return False, 0.0
    lo = 0.0
    hi = 1.0
    tmp = np.empty(3)
    for _ in range(42):
        mid = 0.5 * (lo + hi)
        for i in range(d):
            tmp[i] = p0[i] + (p1[i] - p0[i]) * mid
        if _contains(dom_kind, axis, cos_psi, tmp[:d], d):
            lo = mid
        else:
            hi = mid
    for i in range(d):
        out_point[i] = p0[i] + (p1[i] - p0[i]) * hi
    return True, hi


@njit(inline="always")
def _lambda_eval(dens_kind, dens_axis, dens_a, dens_b, dens_values, w, d):
    if dens_kind == 0:  # constant
        return dens_a
    if dens_kind == 1:  # hemisphere; equator counts as plus
        dot = 0.0
        for i in range(d):
            dot += w[i] * dens_axis[i]
        return dens_a if dot >= 0.0 else dens_b
    # tabulated on the standard midpoint circle grid
    n = dens_values.shape[0]
    ang = np.arctan2(w[1], w[0])
    if ang < 0.0:
        ang += 2.0 * np.pi
    idx = int(np.floor(ang * n / (2.0 * np.pi)))
    if idx >= n:
        idx = n - 1
    return dens_values[idx]


@njit
def _draw_direction(key, ctr, dens_kind, dens_axis, dens_a, dens_b, dens_values,
                    theta_high, d, out):
    """Rejection from the uniform sphere with envelope theta_high."""
    while True:
        if d == 1:
            u = _unit_at(key, ctr); ctr += np.uint64(1)
            out[0] = 1.0 if u < 0.5 else -1.0
        elif d == 2:
            u = _unit_at(key, ctr); ctr += np.uint64(1)
            ang = 2.0 * np.pi * u
            out[0] = np.cos(ang)
            out[1] = np.sin(ang)
        else:
            u1 = _unit_at(key, ctr); ctr += np.uint64(1)
            u2 = _unit_at(key, ctr); ctr += np.uint64(1)
            z = 2.0 * u1 - 1.0
            s = np.sqrt(max(1.0 - z * z, 0.0))
            phi = 2.0 * np.pi * u2
            out[0] = s * np.cos(phi)
            out[1] = s * np.sin(phi)
            out[2] = z
        ua = _unit_at(key, ctr); ctr += np.uint64(1)
        lam = _lambda_eval(dens_kind, dens_axis, dens_a, dens_b, dens_values, out, d)
        if ua * theta_high <= lam:
            return ctr


@njit
def _poisson(key, ctr, lam):
    total = 0
    remaining = lam
    while remaining > 0.0:
        chunk = remaining if remaining < 256.0 else 256.0
        target = np.exp(-chunk)
        prod = 1.0
        k = -1
        while prod > target:
            u = _unit_at(key, ctr); ctr += np.uint64(1)
            prod *= u
            k += 1
        total += k
        remaining -= chunk
    return total, ctr


@njit(cache=True, nogil=True)
def run_paths_kernel(
    keys, x0, d,
    nsteps, dt, eps, inv_alpha, rate, cap,
    use_surrogate, drift, chol,
    dens_kind, dens_axis, dens_a, dens_b, dens_values, theta_high,
    dom_kind, dom_axis, dom_cos,
    snap_steps,
    survived, exit_time, exit_kind, pre_exit, post_exit, err, njumps, snaps,
):
    n = keys.shape[0]
    lam = rate * dt
    sqdt = np.sqrt(dt)
    has_drift = False
    for i in range(d):
        if drift[i] != 0.0:
            has_drift = True
    epochs = np.empty(cap)
    pos = np.empty(3)
    newpos = np.empty(3)
    jdir = np.empty(3)
    cross = np.empty(3)
    zvec = np.empty(3)

    for p in range(n):
        key = keys[p]
        ctr = np.uint64(0)
        for i in range(d):
            pos[i] = x0[p, i]
        t_exit = -1.0
        kind = KIND_CENSORED
        jump_count = 0
        snap_cursor = 0
        failed = False

        for k in range(nsteps):
            t0 = k * dt
            nj, ctr = _poisson(key, ctr, lam)
            if nj > cap:
                err[p] = 1
                failed = True
                break
            jump_count += nj
            for j in range(nj):
                u = _unit_at(key, ctr); ctr += np.uint64(1)
                epochs[j] = u
            # insertion sort: epochs ascending
            for j in range(1, nj):
                e = epochs[j]
                m = j - 1
                while m >= 0 and epochs[m] > e:
                    epochs[m + 1] = epochs[m]
                    m -= 1
                epochs[m + 1] = e
            cur = 0.0
            exited = False
            for j in range(nj):
                s = epochs[j]
                if has_drift:
                    for i in range(d):
                        newpos[i] = pos[i] + drift[i] * (s - cur) * dt
                    crossed, tstar = _segment_exit(
                        dom_kind, dom_axis, dom_cos, pos[:d], newpos[:d], d, cross
                    )
                    if crossed:
                        t_exit = t0 + (cur + (s - cur) * tstar) * dt
                        kind = KIND_SKELETON
                        for i in range(d):
                            pre_exit[p, i] = cross[i]
                            post_exit[p, i] = cross[i]
                        exited = True
                        break
                    for i in range(d):
                        pos[i] = newpos[i]
                cur = s
                ctr = _draw_direction(
                    key, ctr, dens_kind, dens_axis, dens_a, dens_b, dens_values,
                    theta_high, d, jdir,
                )
                ur = _unit_at(key, ctr); ctr += np.uint64(1)
                radius = eps * ur ** (-inv_alpha)
                for i in range(d):
                    pre_exit[p, i] = pos[i]
                    pos[i] = pos[i] + radius * jdir[i]
                if not _contains(dom_kind, dom_axis, dom_cos, pos[:d], d):
                    t_exit = t0 + s * dt
                    kind = KIND_JUMP
                    for i in range(d):
                        post_exit[p, i] = pos[i]
                    exited = True
                    break
            if exited:
                break
            if has_drift:
                for i in range(d):
                    newpos[i] = pos[i] + drift[i] * (1.0 - cur) * dt
                crossed, tstar = _segment_exit(
                    dom_kind, dom_axis, dom_cos, pos[:d], newpos[:d], d, cross
                )
                if crossed:
                    t_exit = t0 + (cur + (1.0 - cur) * tstar) * dt
                    kind = KIND_SKELETON
                    for i in range(d):
                        pre_exit[p, i] = cross[i]
                        post_exit[p, i] = cross[i]
                    break
                for i in range(d):
                    pos[i] = newpos[i]
            if use_surrogate:
                for i in range(d):
                    u1 = _unit_at(key, ctr); ctr += np.uint64(1)
                    u2 = _unit_at(key, ctr); ctr += np.uint64(1)
                    zvec[i] = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
                for i in range(d):
                    lump = 0.0
                    for m in range(d):
                        lump += chol[i, m] * zvec[m]
                    newpos[i] = pos[i] + sqdt * lump
                inside = _contains(dom_kind, dom_axis, dom_cos, newpos[:d], d)
                for i in range(d):
                    if not inside:
                        pre_exit[p, i] = pos[i]
                        post_exit[p, i] = newpos[i]
                    pos[i] = newpos[i]
                if not inside:
                    t_exit = t0 + dt
                    kind = KIND_SKELETON
                    break
            if snap_cursor < snap_steps.shape[0] and snap_steps[snap_cursor] == k + 1:
                for i in range(d):
                    snaps[p, snap_cursor, i] = pos[i]
                snap_cursor += 1

        njumps[p] = jump_count
        if failed:
            survived[p] = 0
            exit_time[p] = 0.0
            exit_kind[p] = KIND_SKELETON
            continue
        if kind == KIND_CENSORED:
            survived[p] = 1
            exit_time[p] = nsteps * dt
            exit_kind[p] = KIND_CENSORED
            for i in range(d):
                pre_exit[p, i] = pos[i]
                post_exit[p, i] = pos[i]
        else:
            survived[p] = 0
            exit_time[p] = t_exit
            exit_kind[p] = kind
