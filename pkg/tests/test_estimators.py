import numpy as np
import pytest
from scipy import stats

import anisotable as at
from anisotable import estimators as est
from anisotable.errors import ConfigError, DegenerateGrid, TooFewSurvivors
from anisotable.sampling import SchemeParams


class TestEstimateCI:
    def test_bernoulli_se_formula(self):
        e = est.bernoulli_ci(300, 1000, "x")
        assert e.value == 0.3
        assert e.stderr == pytest.approx(np.sqrt(0.3 * 0.7 / 1000), rel=1e-12)
        assert 0.0 <= e.value <= 1.0

    def test_negative_se_rejected(self):
        with pytest.raises(ConfigError):
            est.EstimateCI(0.5, -1.0, 10, "x")


class TestSurvivalProbability:
    def test_fullspace_exactly_one(self, model_1d_sym15):
        e = est.survival_probability(model_1d_sym15, at.FullSpace(1), np.array([1.0]), 1.0, 100)
        assert e.value == 1.0 and e.stderr == 0.0

    def test_reference_fixture_regression(self, model_1d_sym15, halfline_pos):
        # frozen n=1e7 reference run; value and provenance live in
        # tests/reference_fixture.json
        ref_p, ref_se = REFERENCE_FIXTURE
        sch = SchemeParams(eps=0.018299, delta=1 / 128, small_jump_mode="gaussian")
        e = est.survival_probability(
            model_1d_sym15, halfline_pos, np.array([1.0]), 1.0, 200_000, sch,
            master_seed=77,
        )
        joint = np.hypot(e.stderr, ref_se)
        assert abs(e.value - ref_p) < 3 * joint

    def test_exact_scaling_transport(self, model_1d_sym15, halfline_pos):
        # P_x(tau > t) = P_{t^(-1/a) x}(tau > 1) exactly on cones
        sch = SchemeParams(eps=0.02, delta=1 / 128, small_jump_mode="gaussian")
        t = 3.0
        x = np.array([1.0])
        a = est.survival_probability(model_1d_sym15, halfline_pos, x, t, 60_000,
                                     sch, master_seed=1, run_tag=10)
        b = est.survival_probability(
            model_1d_sym15, halfline_pos, t ** (-1 / 1.5) * x, 1.0, 60_000,
            SchemeParams(eps=0.02 * t ** (-1 / 1.5), delta=1 / (128 * t),
                         small_jump_mode="gaussian"),
            master_seed=1, run_tag=11,
        )
        assert abs(a.value - b.value) < 3 * np.hypot(a.stderr, b.stderr)

    def test_duality_transport(self, model_1d_asym08, halfline_pos, halfline_neg):
        # survival of dual(model) in (0,inf) = survival of model in (-inf,0)
        sch = SchemeParams(eps=0.01, delta=1 / 64, small_jump_mode="gaussian")
        a = est.survival_probability(at.dual(model_1d_asym08), halfline_pos,
                                     np.array([1.0]), 2.0, 60_000, sch,
                                     master_seed=2, run_tag=12)
        b = est.survival_probability(model_1d_asym08, halfline_neg,
                                     np.array([-1.0]), 2.0, 60_000, sch,
                                     master_seed=2, run_tag=13)
        assert abs(a.value - b.value) < 3 * np.hypot(a.stderr, b.stderr)


class TestExponentFits:
    def test_fullspace_time_slope_zero(self, model_1d_sym15):
        fit = est.survival_exponent_time(
            model_1d_sym15, at.FullSpace(1), np.array([1.0]), [1.0, 2.0, 4.0], 2000,
            SchemeParams(eps=0.3, delta=0.25), master_seed=3,
        )
        assert abs(fit.estimate) < 1e-9

    def test_degenerate_grid(self, model_1d_sym15, halfline_pos, fast_scheme):
        with pytest.raises(DegenerateGrid):
            est.survival_exponent_time(
                model_1d_sym15, halfline_pos, np.array([1.0]), [1.0, 2.0], 5000,
                fast_scheme, master_seed=4,
            )

    def test_halfline_symmetric_slope_half_smallscale(self, model_1d_sym15, halfline_pos):
        sch = SchemeParams(eps=0.05, delta=0.05 ** 1.5, small_jump_mode="gaussian")
        fit = est.survival_exponent_time(
            model_1d_sym15, halfline_pos, np.array([1.0]), [4.0, 8.0, 16.0, 32.0],
            60_000, sch, master_seed=5,
        )
        assert fit.estimate == pytest.approx(0.5, abs=0.06)
        assert fit.ci_lo < fit.estimate < fit.ci_hi

    def test_space_slope_symmetric_smallscale(self, model_1d_sym15, halfline_pos):
        sch = SchemeParams(eps=0.01, delta=1 / 256, small_jump_mode="gaussian")
        fit = est.survival_exponent_space(
            model_1d_sym15, halfline_pos, np.array([1.0]), [0.05, 0.1, 0.2, 0.4],
            2.0, 30_000, sch, master_seed=6,
        )
        assert fit.estimate == pytest.approx(0.75, abs=0.09)  # beta = alpha/2

    def test_fullspace_space_slope_zero(self, model_1d_sym15):
        fit = est.survival_exponent_space(
            model_1d_sym15, at.FullSpace(1), np.array([1.0]), [0.5, 1.0, 2.0],
            0.5, 2000, SchemeParams(eps=0.3, delta=0.25), master_seed=7,
        )
        assert abs(fit.estimate) < 1e-9


class TestKde:
    def test_kde_matches_exact_cauchy(self):
        # d=1 alpha=1 symmetric: p_1 is Cauchy(pi); KDE should track it
        m = at.validate(1.0, 1, at.ConstantDensity(1.0))
        pts = np.linspace(-8.0, 8.0, 9)[:, None]
        rep = est.heat_kernel_density(
            m, 1.0, pts, 100_000, scheme=SchemeParams(eps=0.01, delta=1.0,
                                                      small_jump_mode="gaussian"),
            master_seed=7,
        )
        exact = stats.cauchy(scale=np.pi).pdf(pts[:, 0])
        assert np.max(np.abs(rep.density / exact - 1.0)) < 0.05

    def test_symmetric_density_even(self, model_1d_sym15):
        pts = np.array([[-3.0], [-1.0], [1.0], [3.0]])
        rep = est.heat_kernel_density(
            model_1d_sym15, 1.0, pts, 60_000,
            scheme=SchemeParams(eps=0.02, delta=1.0), master_seed=8,
        )
        d = rep.density
        assert d[0] == pytest.approx(d[3], rel=0.1)
        assert d[1] == pytest.approx(d[2], rel=0.1)

    def test_envelope_ratio_bounded(self, model_1d_sym15):
        pts = np.linspace(-10, 10, 21)[:, None]
        rep = est.heat_kernel_density(
            model_1d_sym15, 1.0, pts, 60_000,
            scheme=SchemeParams(eps=0.02, delta=1.0), master_seed=9,
        )
        assert np.isfinite(rep.ratio_bound)
        assert rep.ratio_bound < 25.0

    def test_scaling_collapse(self, model_1d_sym15):
        pts = np.array([[-2.0], [0.0], [1.0], [3.0]])
        sch1 = SchemeParams(eps=0.02, delta=1.0)
        sch4 = SchemeParams(eps=0.02 * 4 ** (1 / 1.5), delta=4.0)
        a = est.heat_kernel_density(model_1d_sym15, 1.0, pts, 80_000,
                                    scheme=sch1, master_seed=10)
        b = est.heat_kernel_density(
            model_1d_sym15, 4.0, 4 ** (1 / 1.5) * pts, 80_000, scheme=sch4,
            master_seed=11,
        )
        collapsed = 4 ** (1 / 1.5) * b.density
        assert np.max(np.abs(collapsed / a.density - 1.0)) < 0.12


class TestOvershoot:
    def test_halfline_tv_small(self, model_1d_sym15, halfline_pos):
        rep = est.overshoot_conditional_check(
            model_1d_sym15, halfline_pos, np.array([1.0]), 4.0, 40_000,
            [0.3, 0.6, 1.0, 1.5],
            scheme=SchemeParams(eps=0.02, delta=1 / 128, small_jump_mode="gaussian"),
            master_seed=12,
        )
        assert rep.aggregate_tv < 0.07
        assert rep.n_jump_exits > 10_000

    def test_negative_halfline_reflection(self, model_1d_sym15, halfline_neg):
        rep = est.overshoot_conditional_check(
            model_1d_sym15, halfline_neg, np.array([-1.0]), 4.0, 40_000,
            [0.3, 0.6, 1.0, 1.5],
            scheme=SchemeParams(eps=0.02, delta=1 / 128, small_jump_mode="gaussian"),
            master_seed=13,
        )
        assert rep.aggregate_tv < 0.07

    def test_too_few_survivors(self, model_1d_sym15, halfline_pos, fast_scheme):
        with pytest.raises(TooFewSurvivors):
            est.overshoot_conditional_check(
                model_1d_sym15, halfline_pos, np.array([1.0]), 0.5, 600,
                [0.3, 0.6, 1.0], scheme=fast_scheme, master_seed=14,
            )


class TestYaglom:
    def test_masses_sum_to_one(self, model_1d_sym15, halfline_pos, fast_scheme):
        spec = est.BinSpec([0.0], [6.0], [30])
        h = est.yaglom_histogram(
            model_1d_sym15, halfline_pos, np.array([1.0]), 2.0, 20_000, spec,
            scheme=fast_scheme, master_seed=15,
        )
        assert h.total() == pytest.approx(1.0, abs=1e-12)
        assert np.all(h.masses >= 0.0)

    def test_bins_outside_cone_get_zero_mass(self, model_1d_sym15, halfline_pos, fast_scheme):
        spec = est.BinSpec([-2.0], [6.0], [32])
        h = est.yaglom_histogram(
            model_1d_sym15, halfline_pos, np.array([1.0]), 2.0, 20_000, spec,
            scheme=fast_scheme, master_seed=15,
        )
        edges = spec.edges()[0]
        outside = edges[1:] <= 0.0  # bins wholly in the complement
        assert np.all(h.masses[outside] == 0.0)

    def test_fullspace_matches_free_density(self):
        # no killing: the histogram is just the rescaled free law
        m = at.validate(1.0, 1, at.ConstantDensity(1.0))
        spec = est.BinSpec([-10.0], [10.0], [20])
        h = est.yaglom_histogram(
            m, at.FullSpace(1), np.array([0.0]), 2.0, 50_000, spec,
            scheme=SchemeParams(eps=0.01, delta=1 / 64, small_jump_mode="gaussian"),
            master_seed=16,
        )
        edges = spec.edges()[0]
        cau = stats.cauchy(scale=np.pi)
        theo = np.diff(cau.cdf(edges))
        tv = 0.5 * np.abs(h.masses - theo).sum() + 0.5 * abs(
            h.overflow - (1.0 - theo.sum())
        )
        assert tv < 0.02

    def test_self_consistency_tv(self, model_1d_sym15, halfline_pos):
        spec = est.BinSpec([0.0], [6.0], [30])
        rep = est.yaglom_convergence(
            model_1d_sym15, halfline_pos, [[1.0], [2.0]], [4.0, 8.0], 50_000, spec,
            scheme=SchemeParams(eps=0.05, delta=0.05 ** 1.5, small_jump_mode="gaussian"),
            master_seed=17,
        )
        assert np.all(rep.tv_over_t < 0.08)
        assert rep.tv_over_starts[1] < 0.08

    @pytest.mark.slow
    def test_tv_decreasing_in_t(self, model_1d_sym15, halfline_pos):
        spec = est.BinSpec([0.0], [6.0], [30])
        rep = est.yaglom_convergence(
            model_1d_sym15, halfline_pos, [[1.0]], [2.0, 4.0, 8.0], 80_000, spec,
            scheme=SchemeParams(eps=0.05, delta=0.05 ** 1.5, small_jump_mode="gaussian"),
            master_seed=24,
        )
        # convergence: consecutive TVs shrink, up to histogram noise
        assert rep.tv_over_t[0, 1] < rep.tv_over_t[0, 0] + 0.02

    def test_dual_differs_for_asymmetric(self, model_1d_asym08, halfline_neg):
        spec = est.BinSpec([-8.0], [0.0], [32])
        sch = SchemeParams(eps=0.01, delta=1 / 64, small_jump_mode="gaussian")
        h1 = est.yaglom_histogram(model_1d_asym08, halfline_neg, np.array([-1.0]),
                                  2.0, 60_000, spec, scheme=sch, master_seed=18)
        h2 = est.yaglom_histogram(at.dual(model_1d_asym08), halfline_neg,
                                  np.array([-1.0]), 2.0, 60_000, spec, scheme=sch,
                                  master_seed=18)
        assert h1.tv(h2) > 0.1


class TestFactorization:
    def test_interior_ratio_near_one_and_duality(self, model_2d_iso1):
        dom = at.HalfSpace(np.array([0.0, 1.0]))
        # deep interior, small t: killed ~ free and survivals ~ 1
        xs = [[0.0, 8.0]]
        rep = est.factorization_ratio(
            model_2d_iso1, dom, xs, xs, [0.25], 40_000,
            scheme=SchemeParams(eps=0.02, delta=1 / 128), master_seed=19,
        )
        assert 1 / 3 < rep.ratios[0, 0, 0] < 3

    def test_spread_finite_small_grid(self, model_2d_iso1):
        dom = at.HalfSpace(np.array([0.0, 1.0]))
        xs = [[-0.6, 0.8], [0.6, 1.6]]
        rep = est.factorization_ratio(
            model_2d_iso1, dom, xs, xs, [1.0], 30_000,
            scheme=SchemeParams(eps=0.04, delta=0.04), master_seed=20,
        )
        assert np.isfinite(rep.spreads).all()
        assert rep.spreads[0] < 10.0

    @pytest.mark.slow
    def test_rescaling_invariance(self, model_2d_iso1):
        # (x, y, t) -> (r x, r y, r^alpha t) leaves R unchanged up to MC noise
        dom = at.HalfSpace(np.array([0.0, 1.0]))
        xs = [[0.0, 1.0]]
        ys = [[0.4, 1.4]]
        r = 2.0
        a = est.factorization_ratio(
            model_2d_iso1, dom, xs, ys, [1.0], 40_000,
            scheme=SchemeParams(eps=0.03, delta=1 / 32), master_seed=25,
        )
        b = est.factorization_ratio(
            model_2d_iso1, dom, [[r * v for v in xs[0]]], [[r * v for v in ys[0]]],
            [r ** 1.0], 40_000,
            scheme=SchemeParams(eps=r * 0.03, delta=r / 32), master_seed=26,
        )
        assert 0.75 < a.ratios[0, 0, 0] / b.ratios[0, 0, 0] < 1.33

    @pytest.mark.slow
    def test_duality_swap_reproduces_ratio(self):
        # p_t^D(x,y) = dual-p_t^D(y,x): the ratio grid of the dual model with
        # x and y swapped reproduces R within MC noise
        m = at.validate(1.5, 2, at.HemisphereDensity(np.array([0.0, 1.0]), 2.0, 1.0))
        dom = at.HalfSpace(np.array([0.0, 1.0]))
        xs = [[0.0, 1.0]]
        ys = [[0.5, 1.5]]
        sch = SchemeParams(eps=0.05, delta=1 / 32, small_jump_mode="gaussian")
        a = est.factorization_ratio(m, dom, xs, ys, [1.0], 60_000,
                                    scheme=sch, master_seed=22)
        b = est.factorization_ratio(at.dual(m), dom, ys, xs, [1.0], 60_000,
                                    scheme=sch, master_seed=23)
        r1 = a.ratios[0, 0, 0]
        r2 = b.ratios[0, 0, 0]
        assert 0.8 < r1 / r2 < 1.25


class TestProfile:
    def test_symmetric_halfline_profile(self, model_1d_sym15, halfline_pos):
        sch = SchemeParams(eps=0.02, delta=1 / 256, small_jump_mode="gaussian")
        t = 2.0
        deltas = [0.05, 0.1, 0.2, 0.4, 16.0, 32.0]
        rep = est.halfspace_profile_check(
            model_1d_sym15, halfline_pos, deltas, t, 30_000, sch, master_seed=21,
        )
        assert rep.branch_slope.value == pytest.approx(0.75, abs=0.1)
        # the plateau is approached like 1 - t*nu(B_delta^c); allow that much
        tail = t * model_1d_sym15.big_jump_rate(min(d for d in deltas if d > 3))
        assert abs(rep.plateau_slope.value) < 3 * rep.plateau_slope.stderr + 1.5 * tail
        assert rep.plateau_level <= 1.0


def _load_reference():
    import json
    from pathlib import Path

    p = Path(__file__).with_name("reference_fixture.json")
    d = json.loads(p.read_text())
    return d["p"], d["se"]


REFERENCE_FIXTURE = _load_reference()
