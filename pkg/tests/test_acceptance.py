"""Acceptance criteria A1-A10, full scale.

Run with:  pytest tests/test_acceptance.py --run-acceptance -s
Each criterion prints one PASS/FAIL line (A7 prints a FINDING line).
"""

import json

import numpy as np
import pytest
from scipy import stats

import anisotable as at
from anisotable import estimators as est
from anisotable._rng import Stream, derive_key
from anisotable.harness import ExperimentConfig, run as run_experiment
from anisotable.model import ProjectionCoeffs
from anisotable.runner import simulate_increments
from anisotable.sampling import SchemeParams, sample_increment_1d_exact

pytestmark = pytest.mark.acceptance

SEED = 20260808
ALPHAS = (0.5, 0.8, 1.5)


def report(name: str, ok: bool, detail: str):
    print(f"ACCEPTANCE {name} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"{name}: {detail}"


def asym_model(alpha):
    return at.validate(alpha, 1, at.HemisphereDensity(np.array([1.0]), 2.0, 1.0))


def iso_model(alpha, dim=2):
    return at.validate(alpha, dim, at.ConstantDensity(1.0))


def scaling_scheme(t, alpha):
    # eps = delta^(1/alpha) with delta = t/64 keeps the truncated scheme
    # exactly self-similar, so the scaling test isolates sampler errors
    return SchemeParams(delta=t / 64.0, small_jump_mode="gaussian")


class TestA1Scaling:
    def test_a1(self):
        n = 100_000
        details = []
        ok = True
        cases = [(a, asym_model(a)) for a in ALPHAS] + [
            (a, iso_model(a)) for a in ALPHAS
        ]
        for i, (alpha, model) in enumerate(cases):
            x2 = simulate_increments(model, 2.0, n, SEED, 1000 + i,
                                     scaling_scheme(2.0, alpha))
            x1 = simulate_increments(model, 1.0, n, SEED, 2000 + i,
                                     scaling_scheme(1.0, alpha))
            rescaled = 2.0 ** (-1.0 / alpha) * x2
            ps = [
                stats.ks_2samp(rescaled[:, j], x1[:, j]).pvalue
                for j in range(model.dim)
            ]
            ok &= all(p > 0.01 for p in ps)
            details.append(f"a={alpha} d={model.dim} p={min(ps):.3f}")
        report("A1", ok, "; ".join(details))


class TestA2OracleEquivalence:
    def test_a2(self):
        n = 100_000
        details = []
        ok = True
        for i, alpha in enumerate(ALPHAS):
            model = asym_model(alpha)
            sch = SchemeParams(eps=0.01, delta=1.0, small_jump_mode="gaussian")
            x = simulate_increments(model, 1.0, n, SEED, 3000 + i, sch)[:, 0]
            y = sample_increment_1d_exact(
                alpha, 1.0, 2.0, 1.0, n, Stream(derive_key(SEED, 3100 + i))
            )
            p = stats.ks_2samp(x, y).pvalue
            ok &= p > 0.01
            details.append(f"a={alpha} p={p:.3f}")
        report("A2", ok, "; ".join(details))


class TestA3Zolotarev:
    def test_a3(self):
        n = 1_000_000
        details = []
        ok = True
        for i, alpha in enumerate(ALPHAS):
            for j, (cm, cp) in enumerate([(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]):
                rho = at.positivity_parameter(
                    ProjectionCoeffs(np.array([1.0]), cm, cp), alpha
                )
                y = sample_increment_1d_exact(
                    alpha, cm, cp, 1.0, n, Stream(derive_key(SEED, 4000 + 10 * i + j))
                )
                rho_mc = float((y > 0).mean())
                se = np.sqrt(rho_mc * (1 - rho_mc) / n)
                ok &= abs(rho - rho_mc) < 3 * se
                details.append(f"a={alpha}({cm:g},{cp:g}):{abs(rho - rho_mc) / se:.1f}se")
        report("A3", ok, "; ".join(details))


class TestA4SymmetricHalfplaneExponent:
    def test_a4(self):
        model = iso_model(1.0)
        dom = at.HalfSpace(np.array([0.0, 1.0]))
        tfit = est.survival_exponent_time(
            model, dom, np.array([0.0, 1.0]), [2.0, 4.0, 8.0, 16.0, 32.0], 200_000,
            SchemeParams(eps=0.05, delta=0.05, small_jump_mode="gaussian"),
            master_seed=SEED, run_tag=50,
        )
        sfit = est.survival_exponent_space(
            model, dom, np.array([0.0, 1.0]), [0.05, 0.1, 0.2, 0.4], 2.0, 100_000,
            SchemeParams(eps=0.01, delta=0.01, small_jump_mode="gaussian"),
            master_seed=SEED, run_tag=51,
        )
        ok = abs(tfit.estimate - 0.5) <= 0.05 and abs(sfit.estimate - 0.5) <= 0.05
        report(
            "A4", ok,
            f"beta/alpha(time)={tfit.estimate:.3f}+/-{tfit.stderr:.3f}, "
            f"beta(space)={sfit.estimate:.3f}+/-{sfit.stderr:.3f} (target 0.50+/-0.05)",
        )


class TestA5AsymmetricExponentChain:
    def test_a5(self):
        alpha = 0.8
        model = asym_model(alpha)
        dom = at.HalfSpace(np.array([-1.0]))  # (-inf, 0): slope there is rho(1,2)
        sch = SchemeParams(eps=0.01, delta=0.04, small_jump_mode="gaussian")
        fit = est.survival_exponent_time(
            model, dom, np.array([-1.0]), [8.0, 16.0, 32.0, 64.0], 1_000_000,
            sch, master_seed=SEED, run_tag=52,
        )
        dual_fit = est.survival_exponent_time(
            at.dual(model), dom, np.array([-1.0]), [8.0, 16.0, 32.0, 64.0], 200_000,
            SchemeParams(eps=0.01, delta=0.08, small_jump_mode="gaussian"),
            master_seed=SEED, run_tag=53,
        )
        # rho from the A3 oracle for (c-, c+) = (1, 2)
        n = 1_000_000
        y = sample_increment_1d_exact(alpha, 1.0, 2.0, 1.0, n,
                                      Stream(derive_key(SEED, 4001)))
        rho_mc = float((y > 0).mean())
        se_rho = np.sqrt(rho_mc * (1 - rho_mc) / n)
        beta = alpha * fit.estimate
        target = alpha * rho_mc
        half_ci = alpha * (fit.ci_hi - fit.ci_lo) / 2 + 3 * alpha * se_rho
        ok1 = abs(beta - target) <= half_ci
        beta_hat = alpha * dual_fit.estimate
        ok2 = abs(beta + beta_hat - alpha) <= 0.08
        report(
            "A5", ok1 and ok2,
            f"beta={beta:.4f} vs alpha*rho={target:.4f} (joint ci {half_ci:.4f}); "
            f"beta+beta_hat={beta + beta_hat:.4f} vs alpha={alpha} (+/-0.08)",
        )


class TestA6Factorization:
    def test_a6(self):
        model = iso_model(1.0)
        dom = at.HalfSpace(np.array([0.0, 1.0]))
        grid = [[-0.6, 0.8], [0.6, 0.8], [-0.6, 1.6], [0.6, 1.6]]
        rep = est.factorization_ratio(
            model, dom, grid, grid, [1.0, 2.0, 4.0], 200_000,
            scheme=SchemeParams(eps=0.04, delta=0.04), master_seed=SEED, run_tag=54,
        )
        finite = np.isfinite(rep.spreads).all() and np.all(rep.ratios > 0)
        r21 = rep.spreads[1] / rep.spreads[0]
        r42 = rep.spreads[2] / rep.spreads[1]
        ok = finite and 0.5 < r21 < 2.0 and 0.5 < r42 < 2.0
        report(
            "A6", ok,
            f"spreads={np.round(rep.spreads, 3).tolist()}, "
            f"doubling ratios {r21:.3f}, {r42:.3f} (need within (1/2, 2))",
        )


class TestA7PolarityCaveat:
    def test_a7(self):
        alpha = 1.5
        model = asym_model(alpha)
        dom = at.HalfSpace(np.array([-1.0]))
        sch = SchemeParams(eps=0.02, delta=0.02, small_jump_mode="gaussian")
        fit = est.survival_exponent_time(
            model, dom, np.array([-1.0]), [4.0, 8.0, 16.0, 32.0], 200_000,
            sch, master_seed=SEED, run_tag=55,
        )
        dual_fit = est.survival_exponent_time(
            at.dual(model), dom, np.array([-1.0]), [4.0, 8.0, 16.0, 32.0], 200_000,
            sch, master_seed=SEED, run_tag=56,
        )
        total = alpha * (fit.estimate + dual_fit.estimate)
        se = alpha * np.hypot(fit.stderr, dual_fit.stderr)
        lo, hi = total - 1.96 * se, total + 1.96 * se
        inside = lo <= alpha <= hi
        print(
            f"ACCEPTANCE A7 FINDING: alpha=1.5 asymmetric, beta+beta_hat="
            f"{total:.4f} CI=({lo:.4f}, {hi:.4f}); alpha inside CI: {inside} "
            f"(paper remark says equality iff alpha <= 1)"
        )
        assert np.isfinite(total) and np.isfinite(se)


class TestA8Overshoot:
    def test_a8(self):
        model = iso_model(1.5, dim=1)
        dom = at.HalfSpace(np.array([1.0]))
        rep = est.overshoot_conditional_check(
            model, dom, np.array([1.0]), 4.0, 100_000, [0.3, 0.6, 1.0, 1.5],
            scheme=SchemeParams(eps=0.02, delta=1 / 128, small_jump_mode="gaussian"),
            master_seed=SEED, run_tag=57,
        )
        ok = rep.aggregate_tv < 0.05
        report(
            "A8", ok,
            f"aggregate TV={rep.aggregate_tv:.4f} over {rep.n_jump_exits} jump exits "
            f"(need < 0.05)",
        )


class TestA9Yaglom:
    def test_a9(self):
        model = iso_model(1.5, dim=1)
        dom = at.HalfSpace(np.array([1.0]))
        spec = est.BinSpec([0.0], [6.0], [48])
        rep = est.yaglom_convergence(
            model, dom, [[1.0], [2.0]], [8.0, 16.0], 1_000_000, spec,
            scheme=SchemeParams(eps=0.05, delta=1 / 64, small_jump_mode="gaussian"),
            master_seed=SEED, run_tag=58,
        )
        tv_t = float(rep.tv_over_t.max())
        tv_s = float(rep.tv_over_starts[1])
        ok = tv_t < 0.05 and tv_s < 0.05
        report(
            "A9", ok,
            f"TV(t=8, t=16) max over starts={tv_t:.4f}, "
            f"TV(start 1, start 2 at t=16)={tv_s:.4f} (need < 0.05)",
        )


class TestA10Determinism:
    CONFIGS = {
        "sample": {"params": {"n": 2000, "t": 1.0}},
        "survival": {"params": {"points": [[1.0]], "t_grid": [0.5, 1.0], "n": 4000}},
        "exponent-time": {"params": {"x": [1.0], "t_grid": [0.25, 0.5, 1.0], "n": 6000}},
        "exponent-space": {
            "params": {"direction": [1.0], "s_grid": [0.5, 1.0, 2.0], "t": 0.5, "n": 4000}
        },
        "overshoot": {
            "params": {"x": [1.0], "t_max": 2.0, "n": 8000, "pre_bins": [0.2, 0.8, 1.6]}
        },
        "yaglom": {
            "params": {
                "starts": [[1.0]], "t_grid": [0.5, 1.0], "n": 6000,
                "bins": {"lo": [0.0], "hi": [6.0], "nbins": [12]},
            }
        },
        "zolotarev": {"params": {"normal": [1.0], "mc_check_n": 20000}},
        "bias-probe": {"params": {"eps_list": [0.5, 0.1], "t": 1.0, "n": 5000}},
    }

    def test_a10(self, tmp_path):
        base = {
            "model": {
                "alpha": 1.5, "dim": 1,
                "density": {"kind": "constant", "value": 1.0},
                "theta_low": 1.0, "theta_high": 1.0,
            },
            "domain": {"kind": "halfspace", "axis": [1.0]},
            "scheme": {"eps": 0.05, "delta": 0.03125, "small_jump_mode": "gaussian"},
            "master_seed": SEED,
        }
        fact2d = {
            "model": {
                "alpha": 1.0, "dim": 2,
                "density": {"kind": "constant", "value": 1.0},
                "theta_low": 1.0, "theta_high": 1.0,
            },
            "domain": {"kind": "halfspace", "axis": [0.0, 1.0]},
            "scheme": {"eps": 0.05, "delta": 0.0625, "small_jump_mode": "gaussian"},
            "master_seed": SEED,
            "params": {
                "x_list": [[0.0, 1.0], [0.0, 2.0]],
                "y_list": [[0.0, 1.0], [0.0, 2.0]],
                "t_grid": [0.5, 1.0], "n": 6000,
            },
        }
        ok = True
        details = []
        jobs = [(k, {**base, **v, "experiment": k}) for k, v in self.CONFIGS.items()]
        jobs.append(("factorization", {**fact2d, "experiment": "factorization"}))
        for kind, spec in jobs:
            outs = {}
            for workers in (1, 8):
                d = tmp_path / f"{kind}-w{workers}"
                cfg = ExperimentConfig.from_dict({**spec, "workers": workers})
                run_experiment(cfg, d)
                outs[workers] = {
                    p.name: p.read_bytes()
                    for p in sorted(d.iterdir())
                    if p.suffix == ".csv"
                }
            same = outs[1] == outs[8]
            ok &= same
            details.append(f"{kind}:{'=' if same else '!='}")
        report("A10", ok, " ".join(details) + " (workers 1 vs 8, byte-compared)")
