import numpy as np
import pytest
from scipy import stats

import anisotable as at
from anisotable.errors import ConfigError
from anisotable.runner import simulate
from anisotable.sampling import SchemeParams, run_paths
from anisotable.sampling.paths import (
    KIND_CENSORED_CODE,
    KIND_JUMP_CODE,
    KIND_SKELETON_CODE,
)


class TestExitRecords:
    def test_censoring_consistency(self, model_1d_sym15, halfline_pos, fast_scheme):
        b = run_paths(model_1d_sym15, halfline_pos, np.array([1.0]), 2.0,
                      fast_scheme, 11, 0, 4000)
        surv = b.survived
        assert np.array_equal(surv, b.exit_kind == KIND_CENSORED_CODE)
        assert np.all(b.exit_time[surv] == 2.0)
        assert np.all(b.post_exit[surv, 0] > 0)

    def test_jump_exits_pre_inside_post_outside(self, model_1d_sym15, halfline_pos, fast_scheme):
        b = run_paths(model_1d_sym15, halfline_pos, np.array([1.0]), 2.0,
                      fast_scheme, 12, 0, 4000)
        j = b.exit_kind == KIND_JUMP_CODE
        assert j.any()
        assert np.all(b.pre_exit[j, 0] > 0)
        assert np.all(b.post_exit[j, 0] <= 0)

    def test_survival_to_one_at_small_horizon(self, model_1d_sym15, halfline_pos):
        b = run_paths(model_1d_sym15, halfline_pos, np.array([1.0]), 0.001,
                      SchemeParams(delta=0.0005), 13, 0, 4000)
        assert b.survived.mean() > 0.99

    def test_monotone_survival_on_shared_paths(self, model_1d_sym15, halfline_pos, fast_scheme):
        b = run_paths(model_1d_sym15, halfline_pos, np.array([1.0]), 4.0,
                      fast_scheme, 14, 0, 4000)
        ts = np.linspace(0.25, 4.0, 16)
        curve = [b.alive_at(t).mean() for t in ts]
        assert np.all(np.diff(curve) <= 0)

    def test_strictly_between_zero_and_one(self, model_1d_sym15, halfline_pos, fast_scheme):
        b = run_paths(model_1d_sym15, halfline_pos, np.array([1.0]), 1.0,
                      fast_scheme, 15, 0, 4000)
        p = b.survived.mean()
        assert 0.0 < p < 1.0

    def test_start_outside_rejected(self, model_1d_sym15, halfline_pos, fast_scheme):
        with pytest.raises(ConfigError):
            run_paths(model_1d_sym15, halfline_pos, np.array([-1.0]), 1.0,
                      fast_scheme, 16, 0, 10)


class TestDeterminism:
    def test_identical_seed_identical_records(self, model_1d_sym15, halfline_pos, fast_scheme):
        a = run_paths(model_1d_sym15, halfline_pos, np.array([1.0]), 1.0,
                      fast_scheme, 99, 7, 2000)
        b = run_paths(model_1d_sym15, halfline_pos, np.array([1.0]), 1.0,
                      fast_scheme, 99, 7, 2000)
        assert np.array_equal(a.exit_time, b.exit_time)
        assert np.array_equal(a.post_exit, b.post_exit)

    def test_batches_differ(self, model_1d_sym15, halfline_pos, fast_scheme):
        a = run_paths(model_1d_sym15, halfline_pos, np.array([1.0]), 1.0,
                      fast_scheme, 99, 0, 2000)
        b = run_paths(model_1d_sym15, halfline_pos, np.array([1.0]), 1.0,
                      fast_scheme, 99, 1, 2000)
        assert not np.array_equal(a.exit_time, b.exit_time)

    def test_simulate_worker_count_invariance(self, model_1d_sym15, halfline_pos, fast_scheme):
        a = simulate(model_1d_sym15, halfline_pos, np.array([1.0]), 1.0,
                     fast_scheme, 40_000, 5, 1, workers=1)
        b = simulate(model_1d_sym15, halfline_pos, np.array([1.0]), 1.0,
                     fast_scheme, 40_000, 5, 1, workers=8)
        assert np.array_equal(a.exit_time, b.exit_time)
        assert np.array_equal(a.snapshots, b.snapshots, equal_nan=True)


class TestBackendAgreement:
    def test_numpy_engine_matches_numba_statistically(
        self, model_1d_sym15, halfline_pos, fast_scheme, monkeypatch
    ):
        if not at.HAVE_NUMBA:
            pytest.skip("single-backend environment")
        n = 8000
        a = run_paths(model_1d_sym15, halfline_pos, np.array([1.0]), 2.0,
                      fast_scheme, 21, 0, n)
        import anisotable.sampling.paths as paths_mod

        monkeypatch.setattr(paths_mod, "HAVE_NUMBA", False)
        b = run_paths(model_1d_sym15, halfline_pos, np.array([1.0]), 2.0,
                      fast_scheme, 21, 0, n)
        pa, pb = a.survived.mean(), b.survived.mean()
        se = np.sqrt(pa * (1 - pa) / n + pb * (1 - pb) / n)
        assert abs(pa - pb) < 3 * se
        dead_a, dead_b = ~a.survived, ~b.survived
        assert stats.ks_2samp(a.exit_time[dead_a], b.exit_time[dead_b]).pvalue > 0.01
        ja = (a.exit_kind == KIND_JUMP_CODE).mean()
        jb = (b.exit_kind == KIND_JUMP_CODE).mean()
        assert abs(ja - jb) < 3 * np.sqrt(0.25 / n + 0.25 / n)

    def test_numpy_engine_matches_numba_2d_drifted(self, monkeypatch):
        if not at.HAVE_NUMBA:
            pytest.skip("single-backend environment")
        # alpha > 1 asymmetric: nonzero compensation drift plus surrogate
        m = at.validate(1.6, 2, at.HemisphereDensity(np.array([0.0, 1.0]), 2.0, 0.5))
        dom = at.HalfSpace(np.array([0.0, 1.0]))
        sch = SchemeParams(eps=0.05, delta=1 / 32, small_jump_mode="gaussian")
        n = 6000
        a = run_paths(m, dom, np.array([0.0, 1.0]), 2.0, sch, 22, 0, n)
        import anisotable.sampling.paths as paths_mod

        monkeypatch.setattr(paths_mod, "HAVE_NUMBA", False)
        b = run_paths(m, dom, np.array([0.0, 1.0]), 2.0, sch, 22, 0, n)
        pa, pb = a.survived.mean(), b.survived.mean()
        se = np.sqrt(pa * (1 - pa) / n + pb * (1 - pb) / n)
        assert abs(pa - pb) < 3 * se
        assert stats.ks_2samp(
            a.exit_time[~a.survived], b.exit_time[~b.survived]
        ).pvalue > 0.01


class TestDriftCrossing:
    def test_pure_drift_exit_time_exact(self):
        # alpha > 1, heavy up-jump intensity: compensation drifts downward;
        # with rare jumps most paths exit by the deterministic crossing
        m = at.validate(1.8, 1, at.HemisphereDensity(np.array([1.0]), 2.0, 1.0))
        eps = 5.0
        sch = SchemeParams(eps=eps, delta=0.5, small_jump_mode="drop")
        drift = -m.big_jump_mean_rate(eps)[0]
        assert drift < 0
        t_star = 1.0 / (-drift)
        dom = at.HalfSpace(np.array([1.0]))
        b = run_paths(m, dom, np.array([1.0]), 4.0, sch, 30, 0, 3000)
        sk = b.exit_kind == KIND_SKELETON_CODE
        hit = np.isclose(b.exit_time[sk], t_star, rtol=1e-9)
        assert hit.mean() > 0.95  # the rest crossed after surviving a jump
        assert np.all(np.abs(b.post_exit[sk][hit, 0]) < 1e-9)

    def test_complement_hyperplane_sign_change_detected(self):
        m = at.validate(1.8, 1, at.HemisphereDensity(np.array([1.0]), 2.0, 1.0))
        sch = SchemeParams(eps=5.0, delta=0.5, small_jump_mode="drop")
        dom = at.ComplementHyperplane(np.array([1.0]))
        b = run_paths(m, dom, np.array([1.0]), 4.0, sch, 31, 0, 2000)
        sk = b.exit_kind == KIND_SKELETON_CODE
        assert sk.any()
        assert np.all(np.abs(b.post_exit[sk, 0]) < 1e-9)


class TestScheme:
    def test_cap_validation(self, model_1d_sym15):
        with pytest.raises(ConfigError):
            from anisotable.sampling.scheme import resolve_scheme

            resolve_scheme(
                model_1d_sym15, 1.0,
                SchemeParams(eps=0.001, delta=0.5, max_jumps_per_step=10),
            )

    def test_defaults(self, model_1d_sym15):
        from anisotable.sampling.scheme import resolve_scheme

        sch = resolve_scheme(model_1d_sym15, 2.0, None)
        assert sch.delta == pytest.approx(2.0 / 2048.0)
        assert sch.eps == pytest.approx(sch.delta ** (1 / 1.5))
        assert sch.small_jump_mode == "gaussian"
        low = resolve_scheme(at.validate(0.8, 1, at.ConstantDensity(1.0)), 2.0, None)
        assert low.small_jump_mode == "drop"
