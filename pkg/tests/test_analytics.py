import math

import numpy as np
import pytest

from qtransfer import (
    CavityParams,
    InfeasibleMatchingError,
    InvalidInputError,
    LimitingFactor,
    UndefinedEfficiencyError,
    WaveguideParams,
    cavity_efficiency,
    check_conditions,
    derive_cavity_rates,
    derive_waveguide_rates,
    matched_params,
    solve_matching,
    waveguide_efficiency,
)


def test_cavity_efficiency_near_unity():
    p = CavityParams(g_es=1, kappa_es=1, g_ef=1, kappa_ef=1,
                     gamma_es=1e-12, gamma_ef=1e-12, gamma_eo=1e-12)
    report = cavity_efficiency(p)
    assert report.eta == pytest.approx(1.0, abs=1e-9)
    assert report.eta_sf == pytest.approx(1.0, abs=1e-9)


def test_cavity_efficiency_mismatch_eight_ninths():
    p = CavityParams(g_es=1, kappa_es=1, g_ef=math.sqrt(2), kappa_ef=1)
    report = cavity_efficiency(p)
    assert report.chi_ef == pytest.approx(2 * report.chi_es, rel=1e-15)
    assert report.eta == pytest.approx(8 / 9, abs=1e-15)
    assert report.limiting_factor is LimitingFactor.IMPEDANCE_MISMATCH


def test_cavity_efficiency_zero_without_input_coupling():
    report = cavity_efficiency(CavityParams(g_es=0, kappa_es=1, g_ef=1, kappa_ef=1))
    assert report.eta == 0.0 and report.eta_sf == 0.0


def test_cavity_efficiency_undefined_when_all_rates_vanish():
    with pytest.raises(UndefinedEfficiencyError):
        cavity_efficiency(CavityParams(g_es=0, kappa_es=1))


def test_waveguide_efficiency_examples():
    assert waveguide_efficiency(WaveguideParams(Gamma_es=1, Gamma_ef=1)).eta == 1.0
    assert waveguide_efficiency(
        WaveguideParams(Gamma_es=1, Gamma_ef=2)
    ).eta == pytest.approx(8 / 9, abs=1e-15)
    # matched chi with half the input lost to the background
    report = waveguide_efficiency(WaveguideParams(Gamma_es=1, Gamma_ef=2, gamma_es=1))
    assert report.eta == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(UndefinedEfficiencyError):
        waveguide_efficiency(WaveguideParams(Gamma_es=0, Gamma_ef=1))


def test_gamma_eo_reduces_final_state_share():
    p = WaveguideParams(Gamma_es=1, Gamma_ef=0.6, gamma_ef=0.1, gamma_eo=0.3)
    report = waveguide_efficiency(p)
    b = report.chi_ef + p.gamma_eo
    assert report.eta_sf == pytest.approx(report.eta * report.chi_ef / b, rel=1e-15)
    assert report.eta_sf < report.eta


def test_gamma_eo_zero_reduces_to_base_formula():
    rng = np.random.default_rng(5)
    for _ in range(50):
        g, kappa, g2, kappa2 = rng.uniform(0.2, 2.0, 4)
        gam, gam2 = rng.uniform(0.01, 0.5, 2)
        p = CavityParams(g_es=g, kappa_es=kappa, g_ef=g2, kappa_ef=kappa2,
                         gamma_es=gam, gamma_ef=gam2, gamma_eo=0.0)
        report = cavity_efficiency(p)
        rates = derive_cavity_rates(p)
        base = (4 * rates.chi_es * rates.chi_ef / (rates.chi_es + rates.chi_ef) ** 2) * (
            2 * rates.C_es / (1 + 2 * rates.C_es)
        )
        assert report.eta == pytest.approx(base, rel=1e-13)
        assert report.eta_sf == report.eta


def test_eta_bounded_on_random_parameters():
    rng = np.random.default_rng(17)
    for _ in range(200):
        p = CavityParams(
            g_es=rng.uniform(0, 2), kappa_es=rng.uniform(0.01, 2),
            g_ef=rng.uniform(0, 2), kappa_ef=rng.uniform(0.01, 2),
            gamma_es=rng.uniform(0, 1), gamma_ef=rng.uniform(0, 1),
            gamma_eo=rng.uniform(0, 1),
        )
        report = cavity_efficiency(p)
        assert 0.0 <= report.eta_sf <= report.eta <= 1.0


def test_mismatch_prefactor_symmetric_and_second_order():
    def eta_of(chi_es, chi_ef):
        return waveguide_efficiency(WaveguideParams(Gamma_es=chi_es, Gamma_ef=chi_ef)).eta

    assert eta_of(1.3, 0.4) == pytest.approx(eta_of(0.4, 1.3), rel=1e-15)
    drop_up = 1 - eta_of(1.0, 1.01)
    drop_dn = 1 - eta_of(1.0, 0.99)
    assert drop_up == pytest.approx(2.5e-5, rel=0.05)
    assert drop_dn == pytest.approx(2.5e-5, rel=0.05)


def test_cavity_efficiency_monotone_in_cooperativity():
    # hold chi_es = 2 fixed while the cooperativity sweeps upward
    chi_target = 2.0
    etas = []
    coops = []
    for gamma in np.linspace(1.5, 0.05, 12):
        g = math.sqrt((chi_target - gamma) / 2)
        p = CavityParams(g_es=g, kappa_es=1.0, g_ef=1.0, kappa_ef=1.0, gamma_es=gamma)
        rates = derive_cavity_rates(p)
        assert rates.chi_es == pytest.approx(chi_target, rel=1e-12)
        coops.append(rates.C_es)
        etas.append(cavity_efficiency(p).eta)
    assert np.all(np.diff(coops) > 0)
    assert np.all(np.diff(etas) > 0)


def test_check_conditions_matched():
    p = CavityParams(g_es=1, kappa_es=1, g_ef=1, kappa_ef=1,
                     gamma_es=0.01, gamma_ef=0.01)
    check = check_conditions(cavity_efficiency(p), p)
    assert check.matching_deviation == pytest.approx(0.0, abs=1e-15)
    assert check.coupling_ratio == pytest.approx(100.0)
    assert check.matching_ok and check.coupling_ok and check.passed


def test_check_conditions_mismatch_fails():
    p = WaveguideParams(Gamma_es=1, Gamma_ef=2)
    check = check_conditions(waveguide_efficiency(p), p)
    assert check.matching_deviation == pytest.approx(1 / 3, rel=1e-12)
    assert not check.matching_ok


def test_check_conditions_zero_background_is_infinite_ratio():
    p = WaveguideParams(Gamma_es=1, Gamma_ef=1, gamma_es=0.0)
    check = check_conditions(waveguide_efficiency(p), p)
    assert check.coupling_ratio == math.inf
    assert check.coupling_ok


def test_limiting_factor_classification():
    perfect = CavityParams(g_es=1, kappa_es=1, g_ef=1, kappa_ef=1)
    assert cavity_efficiency(perfect).limiting_factor is LimitingFactor.NONE
    # background loss dominates when the channels balance but C_es is small
    p = CavityParams(g_es=0.5, kappa_es=1, g_ef=0.5, kappa_ef=1,
                     gamma_es=0.4, gamma_ef=0.4)
    assert cavity_efficiency(p).limiting_factor is LimitingFactor.BACKGROUND_LOSS
    p = WaveguideParams(Gamma_es=1.0, Gamma_ef=1.0, gamma_eo=0.8)
    assert waveguide_efficiency(p).limiting_factor is LimitingFactor.OTHER_DECAY


def test_solve_matching_cavity_example():
    p = CavityParams(g_es=1, kappa_es=1, gamma_es=0.01, g_ef=0, kappa_ef=1, gamma_ef=0.01)
    assert derive_cavity_rates(p).chi_es == pytest.approx(2.01)
    assert solve_matching(p, "g_ef") == pytest.approx(1.0, rel=1e-12)


def test_solve_matching_waveguide_example():
    p = WaveguideParams(Gamma_es=1, Gamma_ef=0)
    assert solve_matching(p, "Gamma_ef") == pytest.approx(1.0, rel=1e-15)


def test_solve_matching_infeasible_carries_deficit():
    p = CavityParams(g_es=0.1, kappa_es=1, gamma_es=0.08, g_ef=0, kappa_ef=1, gamma_ef=0.5)
    assert derive_cavity_rates(p).chi_es == pytest.approx(0.1)
    with pytest.raises(InfeasibleMatchingError) as err:
        solve_matching(p, "g_ef")
    assert err.value.deficit == pytest.approx(0.4, rel=1e-12)


def test_solve_matching_rejects_unknown_parameter():
    with pytest.raises(InvalidInputError):
        solve_matching(WaveguideParams(Gamma_es=1), "kappa_es")


def test_matched_params_balances_channels():
    p = WaveguideParams(Gamma_es=1.3, Gamma_ef=0.2, gamma_es=0.1, gamma_ef=0.05, gamma_eo=0.2)
    q = matched_params(p, "Gamma_ef")
    rates = derive_waveguide_rates(q)
    assert abs(rates.chi_es - rates.chi_ef - q.gamma_eo) < 1e-12
