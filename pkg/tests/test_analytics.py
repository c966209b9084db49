import math

import mpmath as mp
import numpy as np
import pytest

from ipslab import analytics as an
from ipslab import dual
from ipslab.errors import (DegenerateLandscapeError, DomainError,
                           ParameterError)
from ipslab.models import CP, SIM, VM


# --- entropy and free energy ------------------------------------------------


def test_entropy_values():
    assert an.entropy_I(0.0) == 0.0
    assert abs(an.entropy_I(1.0) - math.log(2)) < 1e-15
    assert abs(an.entropy_I(-1.0) - math.log(2)) < 1e-15
    direct = 0.75 * math.log(1.5) + 0.25 * math.log(0.5)
    assert abs(an.entropy_I(0.5) - direct) < 1e-9
    with pytest.raises(DomainError):
        an.entropy_I(1.5)


def test_entropy_finite_n():
    exact = -math.log(math.comb(10, 7)) / 10
    assert abs(an.entropy_IN(0.4, 10) - exact) < 1e-12
    with pytest.raises(ParameterError):
        an.entropy_IN(0.35, 10)


def test_landscape_symmetry_and_roots():
    ms = np.linspace(-0.9, 0.9, 7)
    for m in ms:
        assert abs(an.free_energy(m, 2.0, 0.0) - an.free_energy(-m, 2.0, 0.0)) < 1e-14
    roots = an.landscape_roots(2.0, 0.0)
    assert len(roots) == 3 and abs(roots[1]) < 1e-12
    assert abs(roots[2] - 0.957504) < 1e-5
    assert abs(roots[0] + 0.957504) < 1e-5


def test_three_roots_below_chi():
    assert abs(an.chi(2.0) - 0.26642) < 1e-4
    assert len(an.landscape_roots(2.0, 0.05)) == 3
    m_minus, m_star, m_plus = an.stationary_points(2.0, 0.05)
    assert m_minus < m_star < m_plus
    for m in (m_minus, m_star, m_plus):
        assert abs(an.free_energy_d1(m, 2.0, 0.05)) < 1e-12
    assert an.free_energy_d2(m_minus, 2.0) > 0 > an.free_energy_d2(m_star, 2.0)
    assert an.free_energy_d2(m_plus, 2.0) > 0


def test_no_triple_outside_regime():
    with pytest.raises(DegenerateLandscapeError) as err:
        an.stationary_points(2.0, 0.4)  # h > chi(2)
    assert len(err.value.roots) < 3
    with pytest.raises(DomainError):
        an.chi(1.0)


def test_chi_limits():
    assert an.chi(1.0 + 1e-9) < 1e-4
    for beta in np.linspace(1.01, 100.0, 40):
        assert 0.0 < an.chi(beta) < 1.0


def test_kramers_gamma_vanishes_at_fold():
    chi15 = an.chi(1.5)
    assert abs(chi15 - 0.13836) < 1e-4
    gammas = [an.kramers(1.5, h).gamma for h in (0.02, 0.06, 0.10, 0.13)]
    assert all(g > 0 for g in gammas)
    assert all(a > b for a, b in zip(gammas, gammas[1:]))
    assert gammas[-1] < 0.005


def test_kramers_vs_exact_chain():
    # the exact lumped-chain crossover sits at twice the closed-form
    # prefactor; the log-ratio trend toward 1 is the headline check
    tri = an.kramers(1.5, 0.1)
    ratios = []
    log_ratios = []
    for n in (100, 200, 400):
        et = an.cw_crossover_time(1.5, 0.1, n)
        ratios.append(float(et / (2.0 * tri.prefactor * mp.e ** (n * tri.gamma))))
        log_ratios.append(float(mp.log(et) / (math.log(tri.prefactor) + n * tri.gamma)))
    assert all(0.9 < r < 1.3 for r in ratios)
    devs = [abs(r - 1) for r in log_ratios]
    assert devs[0] > devs[1] > devs[2]


# --- barrier machinery -------------------------------------------------------


def test_i_delta_is_boundary_of_the_set():
    for x in (0.1, 0.3, 0.5):
        for delta in (2.5, 6.0, 40.0):
            y = an.i_delta(x, delta)
            assert not math.isnan(y)
            assert an.i_delta_holds(x, delta, y)
            assert not an.i_delta_holds(x, delta, y - 1e-6)


def test_i_delta_degenerates_at_small_delta():
    # for delta <= 2 the inequality holds arbitrarily close to 0
    assert an.i_delta(0.3, 2.0) == 0.0
    assert an.i_delta_holds(0.3, 2.0, 1e-9)


def test_i_delta_limits():
    assert abs(an.i_delta(0.5, 1e6) - 0.25) < 0.05
    vals = [an.i_delta(x, 6.0) for x in (0.05, 0.15, 0.3, 0.5)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[0] < 0.03
    with pytest.raises(DomainError):
        an.i_delta(0.6, 6.0)


def test_gamma_bounds_constant_degrees():
    n, d = 10, 3
    gb = an.gamma_bounds([d] * n, 1.0, 1.0)
    # brute-force scan of the defining inequality
    ell = np.concatenate([[0], np.cumsum([d] * n)]).astype(float)
    m_bar = next(
        (m for m in range(1, n)
         if 1.0 >= (ell[m + 1] * (1 - ell[m + 1] / ell[n])
                    - ell[m] * (1 - ell[m] / ell[n]))),
        n,
    )
    assert gb.M_bar == m_bar
    assert gb.M_tilde == math.ceil(n / 2)


def test_gamma_bounds_ratio_tightens():
    prev = None
    for d in (10, 100):
        gb = an.gamma_bounds([d] * 2000, 1.0, 0.5)
        ratio = gb.gamma_plus / gb.gamma_minus
        assert abs(ratio - 1) < 5 / math.sqrt(d)
        if prev is not None:
            assert abs(ratio - 1) < abs(prev - 1)
        prev = ratio


# --- profile function and diffusion constants --------------------------------


def test_profile_boundary_values():
    for d in (3, 4, 5):
        assert abs(an.profile_f_d(d, 0.0) - 1.0) < 1e-8
    assert abs(an.profile_f_d(3, 50.0) - 0.5) < 1e-3
    assert abs(an.catalan_series(2.0 / 9.0) - 1.5) < 1e-10
    with pytest.raises(DomainError):
        an.profile_f_d(2, 1.0)


def test_profile_monotone_decreasing():
    ts = np.linspace(0, 5, 21)
    for d in (3, 5):
        vals = [an.profile_f_d(d, t) for t in ts]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))


def test_profile_matches_tree_oracle():
    tgrid = np.array([0.5, 1.0, 2.0, 3.5, 5.0])
    for d in (3, 4, 5):
        surv = dual.tree_meeting_survival(d, tgrid, seed=500 + d, reps=60_000)
        series = np.array([an.profile_f_d(d, t) for t in tgrid])
        assert np.abs(surv - series).max() < 0.01


def test_theta_d_nu_static_limit():
    for d in range(3, 11):
        assert abs(an.theta_d_nu(d, 0.0) - an.theta_d(d)) < 1e-10


def test_theta_d_nu_monotone_and_fast_limit():
    thetas = [an.theta_d_nu(3, nu) for nu in (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)]
    assert all(a < b for a, b in zip(thetas, thetas[1:]))
    assert an.theta_d_nu(3, 1e6) > 1 - 1e-3


def test_theta_directed_eulerian():
    assert abs(an.theta_directed_eulerian(3.0, 9.0) - math.sqrt(1.5)) < 1e-6
    assert abs(an.theta_directed_eulerian(1e6, 1e12) - 1.0) < 1e-5
    assert (an.theta_directed_eulerian(3.0, 12.0)
            < an.theta_directed_eulerian(3.0, 9.0))
    with pytest.raises(DomainError):
        an.theta_directed_eulerian(3.0, 8.0)


# --- Fisher-Wright -----------------------------------------------------------


def test_fw_absorbing_endpoints():
    for x0 in (0.0, 1.0):
        fw = an.fw_simulate(1.0, x0, 0.2, 1e-3, 1, 50, 0.1)
        assert np.all(fw.x == x0)


def test_fw_martingale_and_heterozygosity_decay():
    u = 0.3
    fw = an.fw_simulate(1.0, u, 1.0, 1e-4, 42, 3000, 0.5)
    mean = fw.x[:, -1].mean()
    se = fw.x[:, -1].std(ddof=1) / math.sqrt(3000)
    assert abs(mean - u) < 3 * se
    for col, s in ((1, 0.5), (2, 1.0)):
        het = fw.x[:, col] * (1 - fw.x[:, col])
        target = u * (1 - u) * math.exp(-2 * s)
        se = het.std(ddof=1) / math.sqrt(3000)
        assert abs(het.mean() - target) < 3 * se


def test_fw_rejects_coarse_dt():
    with pytest.raises(ParameterError):
        an.fw_simulate(1.0, 0.5, 1.0, 0.01, 0, 10)


# --- exact chains ------------------------------------------------------------


def test_bd_mean_absorption_basics():
    up = [1.0, 1.0, 0.0]
    dn = [0.0, 1.0, 1.0]
    assert an.bd_mean_absorption(up, dn, 1, 1) == 0
    # pure death with unit rates: time from K to 0 is harmonic-like sum 1/d
    up0 = [0.0, 0.0, 0.0, 0.0]
    dn0 = [0.0, 1.0, 1.0, 1.0]
    assert abs(an.bd_mean_absorption(up0, dn0, 3, 0) - 3.0) < 1e-12
    dn_rates = [0.0, 1.0, 2.0, 3.0]
    expect = 1.0 + 0.5 + 1.0 / 3.0
    assert abs(an.bd_mean_absorption(up0, dn_rates, 3, 0) - expect) < 1e-12


def test_bd_cp_two_site():
    up, dn = an.lumped_rates(CP(lam=1.0), 2)
    assert abs(an.bd_mean_absorption(up, dn, 2, 0) - 2.0) < 1e-12


def test_bd_barrier_gives_infinity():
    up = [1.0, 0.0, 1.0, 0.0]
    dn = [0.0, 1.0, 1.0, 1.0]
    assert an.bd_mean_absorption(up, dn, 0, 3) == mp.inf


def test_lumped_rate_examples():
    up, _ = an.lumped_rates(VM(), 3)
    assert up[1] == 1.0
    up, dn = an.lumped_rates(CP(lam=0.05), 10)
    assert abs(up[1] - 0.45) < 1e-15 and dn[1] == 1.0
    with pytest.raises(ParameterError):
        an.lumped_rates("nope", 5)


def test_lumped_sim_matches_flip_rates():
    from ipslab import dynamics as dyn
    from ipslab import graphgen as gg

    n, beta, h = 8, 0.9, 0.2
    model = SIM(beta=beta, J=1.0 / n, h=h)
    g = gg.generate(gg.Complete(n), 0)
    up, dn = an.lumped_rates(model, n)
    for k in (0, 3, 7):
        config = np.array([1] * k + [-1] * (n - k))
        up_direct = sum(dyn.flip_rate(model, g, config, v)
                        for v in range(n) if config[v] == -1)
        dn_direct = sum(dyn.flip_rate(model, g, config, v)
                        for v in range(n) if config[v] == 1)
        assert abs(up[k] - up_direct) < 1e-12
        assert abs(dn[k] - dn_direct) < 1e-12


def test_extinction_asymptotics():
    assert abs(an.extinction_asymptotic(100, 1.0) - 560.517) < 1e-3
    assert an.extinction_log_mean_field(100, 1.0) == 100 * (math.log(100) - 1)


def test_rho_exponent_branches():
    assert abs(an.rho_exponent(2.25).power - 4.0 / 3.0) < 1e-15
    assert an.rho_exponent(2.25).log_power == 0.0
    left = an.rho_exponent(2.5).power
    assert abs(left - 2.0) < 1e-12 and abs((2 * 2.5 - 3) - left) < 1e-12
    r = an.rho_exponent(2.8)
    assert abs(r.power - 2.6) < 1e-12 and abs(r.log_power + 0.8) < 1e-12
    r = an.rho_exponent(3.5)
    assert abs(r.power - 4.0) < 1e-12 and abs(r.log_power + 3.0) < 1e-12
    with pytest.raises(DomainError):
        an.rho_exponent(2.0)
