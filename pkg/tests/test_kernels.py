import math

import numpy as np
import pytest
from scipy import integrate

from bbrent.kernels import (
    BathKernels,
    KernelQuery,
    OscillationBudgetError,
    Strategy,
    StrategyConfigError,
    TemperatureMode,
    cutoff_tail_bound,
    evaluate_kernels,
    f_nu,
    f_nu_closed_coth_one,
    long_time_f_average,
    phi_minus_closed,
    phi_nu,
    phi_nu_closed,
    pin_cutoff,
)
from bbrent.params import CutoffKind, CutoffSpec
from bbrent.special import coth_half, geometric_weight


def quad_oracle(f, a, b, **kw):
    val, _ = integrate.quad(f, a, b, limit=2000, **kw)
    return val


def query(t, t0, y_max, mode=TemperatureMode.THERMAL, strategy=Strategy.AUTO, **kw):
    return KernelQuery(t=t, t0=t0, y_max=y_max, temperature_mode=mode,
                       strategy=strategy, **kw)


def test_zero_time_is_trivial():
    k = evaluate_kernels(query(0.0, 1.0, 50.0))
    assert (k.f1, k.f2, k.phi1, k.phi2, k.phi_minus) == (0, 0, 0, 0, 0)


def test_f_sum_rule_against_scipy():
    # f1 + f2 = (2/3) int y coth(y/2) (1 - cos(y t)) dy at (3, 1, 50)
    k = evaluate_kernels(query(3.0, 1.0, 50.0, strategy=Strategy.QUADRATURE))
    oracle = quad_oracle(
        lambda y: (2.0 / 3.0) * y * coth_half(y) * (1.0 - math.cos(3.0 * y)),
        1e-12, 50.0,
    )
    assert k.f1 + k.f2 == pytest.approx(oracle, rel=1e-10)


def test_f_nonnegative_on_lattice():
    rng = np.random.default_rng(5)
    for _ in range(25):
        t = rng.uniform(0.05, 20.0)
        t0 = rng.uniform(0.5, 5.0)
        Y = rng.uniform(10.0, 200.0)
        k = evaluate_kernels(query(t, t0, Y, strategy=Strategy.QUADRATURE))
        assert k.f1 >= 0.0 and k.f2 >= 0.0


def test_f_bounded_by_isotropic_envelope():
    rng = np.random.default_rng(6)
    for _ in range(10):
        t, t0, Y = rng.uniform(0.1, 10.0), rng.uniform(0.5, 5.0), rng.uniform(10.0, 100.0)
        k = evaluate_kernels(query(t, t0, Y, strategy=Strategy.QUADRATURE))
        envelope = k.f1 + k.f2   # equals (2/3) int ... by construction
        assert k.f1 <= envelope + 1e-9
        assert k.f2 <= envelope + 1e-9


def test_phase_difference_matches_closed_form_both_modes():
    rng = np.random.default_rng(7)
    for mode in (TemperatureMode.THERMAL, TemperatureMode.COTH_ONE):
        for _ in range(12):
            t = rng.uniform(0.1, 20.0)
            t0 = rng.uniform(0.5, 5.0)
            Y = rng.uniform(10.0, 500.0)
            k = evaluate_kernels(query(t, t0, Y, mode=mode, strategy=Strategy.QUADRATURE))
            ref = phi_minus_closed(t, t0, Y)
            assert (k.phi1 - k.phi2) == pytest.approx(ref, rel=1e-6)
            assert k.phi_minus == pytest.approx(ref, rel=1e-6)
            assert abs(k.phi_minus - (k.phi1 - k.phi2)) <= max(k.error_estimate, 1e-9)


def test_phi_closed_equals_quadrature_componentwise():
    for (t, t0, Y) in [(5.0, 1.0, 200.0), (0.3, 2.5, 77.0), (2.0, 0.7, 35.0)]:
        k = evaluate_kernels(query(t, t0, Y, mode=TemperatureMode.COTH_ONE,
                                   strategy=Strategy.QUADRATURE))
        assert phi_nu_closed(t, t0, Y, 1) == pytest.approx(k.phi1, rel=1e-9)
        assert phi_nu_closed(t, t0, Y, 2) == pytest.approx(k.phi2, rel=1e-9)


def test_phi_small_t_cubic_law():
    # phi_nu ~ (t^3/6) int y^4 w_nu(y t0) dy for y t << 1
    t, t0, Y = 1e-4, 1.0, 10.0
    for nu in (1, 2):
        moment = quad_oracle(lambda y: y**4 * geometric_weight(nu, y * t0), 0.0, Y)
        cubic = t**3 / 6.0 * moment
        val = phi_nu(query(t, t0, Y, strategy=Strategy.QUADRATURE), nu)
        assert val == pytest.approx(cubic, rel=1e-3)


def test_f_closed_coth_one_matches_quadrature_lattice():
    rng = np.random.default_rng(11)
    for _ in range(10):
        t = rng.uniform(0.05, 15.0)
        t0 = rng.uniform(0.3, 5.0)
        Y = rng.uniform(5.0, 100.0)
        k = evaluate_kernels(query(t, t0, Y, mode=TemperatureMode.COTH_ONE,
                                   strategy=Strategy.QUADRATURE))
        for nu, ref in ((1, k.f1), (2, k.f2)):
            assert f_nu_closed_coth_one(t, t0, Y, nu) == pytest.approx(ref, rel=1e-8)


def test_f_closed_coth_one_trivial_zero():
    assert f_nu_closed_coth_one(0.0, 1.0, 50.0, 1) == 0.0


def test_f_long_time_average_approaches_sixth():
    # cycle average at y_max = 100 -> y_max^2/6 with O(1/t0^2) anisotropy
    f1a, f2a, _ = long_time_f_average(1.0, 100.0)
    assert f1a == pytest.approx(100.0**2 / 6.0, rel=5e-3)
    assert f2a == pytest.approx(100.0**2 / 6.0, rel=5e-3)


def test_light_cone_step_exact_residual():
    # pinned y_max t0 = 100 pi; the sharp-cutoff Si ripples leave the
    # exact residual -(8/3)/(y_max t0) + O((y_max t0)^-3) at t = 2 t0
    t0 = 1.0
    Y = 100.0 * math.pi / t0
    step = phi_minus_closed(2.0 * t0, t0, Y) * t0**3 / (2.0 * t0)
    predicted = math.pi - (8.0 / 3.0) / (Y * t0)
    assert step == pytest.approx(predicted, abs=1e-5)
    before = phi_minus_closed(0.5 * t0, t0, Y) * t0**3 / (0.5 * t0)
    assert abs(before) <= 5e-3


def test_phi_minus_finite_for_large_cutoff():
    t, t0 = 4.0, 1.0
    vals = []
    for Y_target in (1e6, 1e7):
        Y = pin_cutoff(Y_target, t0)
        vals.append(phi_minus_closed(t, t0, Y))
    assert abs(vals[1] - vals[0]) < 1e-3 * (t / t0**3)


def test_phi_minus_growth_and_decay_laws():
    t0 = 1.0
    Y = pin_cutoff(1e4, t0)
    t = 200.0
    assert phi_minus_closed(2 * t, t0, Y) == pytest.approx(
        2.0 * phi_minus_closed(t, t0, Y), rel=1e-6
    )
    Y2 = pin_cutoff(1e4, 2.0 * t0)
    assert 8.0 * phi_minus_closed(t, 2.0 * t0, Y2) == pytest.approx(
        phi_minus_closed(t, t0, Y), rel=1e-2
    )


def test_evaluate_kernels_thermal_point():
    k = evaluate_kernels(query(3.0, 1.0, 50.0))
    for field in (k.f1, k.f2, k.phi1, k.phi2, k.phi_minus):
        assert np.isfinite(field)
    assert k.f1 >= 0.0 and k.f2 >= 0.0
    assert k.phi_minus == pytest.approx(phi_minus_closed(3.0, 1.0, 50.0), rel=1e-6)


def test_evaluate_kernels_deep_asymptotic_point():
    k = evaluate_kernels(query(1e14, 1e4, 4000.0))
    assert k.strategy_used == "closed_form_coth_one"
    sixth = 4000.0**2 / 6.0
    assert k.f1 == pytest.approx(sixth, rel=1e-2)
    assert k.f2 == pytest.approx(sixth, rel=1e-2)
    assert k.phi_minus == pytest.approx(phi_minus_closed(1e14, 1e4, 4000.0), rel=1e-9)


def test_long_time_asymptote_strategy():
    k = evaluate_kernels(query(1e10, 100.0, 400.0, strategy=Strategy.LONG_TIME_ASYMPTOTE))
    assert k.strategy_used == "long_time_asymptote"
    assert k.f1 == pytest.approx(400.0**2 / 6.0, rel=1e-2)


def test_budget_refusal_names_alternatives():
    q = query(1e9, 1.0, 1e4, strategy=Strategy.QUADRATURE)
    with pytest.raises(OscillationBudgetError) as err:
        evaluate_kernels(q)
    msg = str(err.value)
    assert "closed_form_coth_one" in msg and "long_time_asymptote" in msg


def test_autoselect_falls_back_over_budget():
    k = evaluate_kernels(query(1e9, 1.0, 1e4))
    assert k.strategy_used == "closed_form_coth_one"


def test_strategy_mode_conflicts():
    with pytest.raises(StrategyConfigError):
        evaluate_kernels(query(1.0, 1.0, 50.0, mode=TemperatureMode.THERMAL,
                               strategy=Strategy.CLOSED_FORM_COTH_ONE))
    with pytest.raises(StrategyConfigError):
        evaluate_kernels(
            KernelQuery(t=1.0, t0=1.0, y_max=50.0,
                        cutoff=CutoffSpec(CutoffKind.POWER_LAW, 3.0),
                        temperature_mode=TemperatureMode.COTH_ONE,
                        strategy=Strategy.CLOSED_FORM_COTH_ONE)
        )


def test_zero_t_equals_coth_one():
    k1 = evaluate_kernels(query(2.0, 1.0, 60.0, mode=TemperatureMode.ZERO_T,
                                strategy=Strategy.QUADRATURE))
    k2 = evaluate_kernels(query(2.0, 1.0, 60.0, mode=TemperatureMode.COTH_ONE,
                                strategy=Strategy.QUADRATURE))
    assert k1.f1 == k2.f1 and k1.f2 == k2.f2
    assert k1.phi_minus == k2.phi_minus


def test_query_validation():
    with pytest.raises(ValueError):
        KernelQuery(t=-1.0, t0=1.0, y_max=10.0)
    with pytest.raises(ValueError):
        KernelQuery(t=1.0, t0=0.0, y_max=10.0)
    with pytest.raises(ValueError):
        KernelQuery(t=1.0, t0=1.0, y_max=-5.0)
    with pytest.raises(ValueError):
        f_nu(query(1.0, 1.0, 10.0), 3)
    with pytest.raises(ValueError):
        phi_nu(query(1.0, 1.0, 10.0), 0)


def test_cutoff_tail_bound_values():
    pl4 = CutoffSpec(CutoffKind.POWER_LAW, 4.0)
    assert cutoff_tail_bound(100.0, pl4) == pytest.approx(
        (2.0 / 3.0) * 100.0**2 / 2.0, abs=1e-9
    )
    sharp = CutoffSpec(CutoffKind.SHARP)
    assert cutoff_tail_bound(100.0, sharp) == 0.0
    # p -> infinity approaches the sharp limit
    assert cutoff_tail_bound(100.0, CutoffSpec(CutoffKind.POWER_LAW, 1e9)) < 1e-2


def test_cutoff_tail_bound_scaling():
    # bound / y_max^2 depends only on p
    pl = CutoffSpec(CutoffKind.POWER_LAW, 4.0)
    r1 = cutoff_tail_bound(100.0, pl) / 100.0**2
    r2 = cutoff_tail_bound(200.0, pl) / 200.0**2
    assert r1 == pytest.approx(r2, rel=1e-12)


def test_power_law_tail_within_bound():
    pl = CutoffSpec(CutoffKind.POWER_LAW, 3.0)
    for (t, t0, Y) in [(1.0, 1.0, 10.0), (3.0, 0.8, 50.0), (0.5, 2.0, 100.0)]:
        bound = cutoff_tail_bound(Y, pl)
        k_pl = evaluate_kernels(KernelQuery(t=t, t0=t0, y_max=Y, cutoff=pl,
                                            strategy=Strategy.QUADRATURE))
        k_sharp = evaluate_kernels(query(t, t0, Y, strategy=Strategy.QUADRATURE))
        assert abs(k_pl.f1 - k_sharp.f1) <= bound
        assert abs(k_pl.f2 - k_sharp.f2) <= bound
        # phases keep the sharp truncation by design
        assert k_pl.phi_minus == pytest.approx(k_sharp.phi_minus, rel=1e-9)


def test_bath_kernels_zero_factory():
    z = BathKernels.zero()
    assert z.f1 == 0.0 and z.phi_minus == 0.0 and z.strategy_used == "trivial"
