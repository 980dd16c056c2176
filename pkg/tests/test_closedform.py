import math

import numpy as np
import pytest

from nafdplan.closedform import (Solution, check_constraints, dl_se_per_ue,
                                 phi_coefficients, se_report, total_se,
                                 ul_se_per_ue)
from nafdplan.config import NetworkConfig
from nafdplan.grouping import pzf_grouping, uniform_grouping
from nafdplan.netgen import draw_network, mmse_gamma

from conftest import (grouping_from_masks, random_mixed_setup,
                      random_solution, synthetic_realization)
from reference_forms import fzf_reference, mr_reference

PRELOG = 0.99  # tau_c = 200, tau_t = 2


def single_ap_dl_case(strong: bool, theta_sq: float):
    """M = Kd = 1, N = 4, gamma 0.05, beta 0.1, rho_d 100, no UL UEs."""
    real = synthetic_realization(beta_dl=[[0.1]], beta_ul=np.zeros((1, 0)),
                                 beta_du=np.zeros((1, 0)),
                                 gamma_dl=[[0.05]], gamma_ul=np.zeros((1, 0)),
                                 rho_d=100.0, rho_u=100.0)
    grp = grouping_from_masks([[strong]], np.zeros((1, 0), bool))
    sol = Solution(a=np.ones(1), b=np.zeros(1), varsigma=np.zeros(0),
                   theta=np.array([[math.sqrt(theta_sq)]]),
                   alpha=np.zeros((1, 0)))
    return sol, real, grp


class TestDlClosedForm:
    def test_zero_power_zero_se(self):
        sol, real, grp = single_ap_dl_case(strong=False, theta_sq=0.0)
        assert dl_se_per_ue(sol, real, grp, 4, PRELOG)[0] == 0.0

    def test_single_ap_mr_value(self):
        # SINR = (10*4*sqrt(5)*0.05)^2 / (100*4*5*0.05*0.1 + 1) = 20/11
        sol, real, grp = single_ap_dl_case(strong=False, theta_sq=5.0)
        se = dl_se_per_ue(sol, real, grp, 4, PRELOG)[0]
        assert se == pytest.approx(0.99 * math.log2(1 + 20 / 11), rel=1e-12)
        assert se == pytest.approx(1.4800, abs=2e-4)

    def test_single_ap_zf_value(self):
        # theta^2 = (N-|S|)/gamma = 60 (full budget), SINR = 15/6 = 2.5
        sol, real, grp = single_ap_dl_case(strong=True, theta_sq=60.0)
        se = dl_se_per_ue(sol, real, grp, 4, PRELOG)[0]
        assert se == pytest.approx(0.99 * math.log2(3.5), rel=1e-12)

    def test_grouping_cap_enforced(self):
        real = synthetic_realization(beta_dl=np.full((1, 4), 0.1),
                                     beta_ul=np.zeros((1, 0)),
                                     beta_du=np.zeros((4, 0)))
        grp = grouping_from_masks(np.ones((1, 4), bool), np.zeros((1, 0), bool))
        sol = Solution(a=np.ones(1), b=np.zeros(1), varsigma=np.zeros(0),
                       theta=np.zeros((1, 4)), alpha=np.zeros((1, 0)))
        with pytest.raises(ValueError):
            dl_se_per_ue(sol, real, grp, 4, PRELOG)

    def test_cross_link_term_independent_of_varsigma_when_isolated(self):
        rng = np.random.default_rng(1)
        real, grp = random_mixed_setup(rng)
        real.beta_du[:] = 0.0
        sol = random_solution(rng, 4, 4, 2, 2, grp, real)
        sol.b[:] = 0.0
        se_a = dl_se_per_ue(sol, real, grp, 4, PRELOG)
        sol2 = Solution(a=sol.a, b=sol.b, varsigma=rng.random(2),
                        theta=sol.theta, alpha=sol.alpha)
        se_b = dl_se_per_ue(sol2, real, grp, 4, PRELOG)
        assert np.allclose(se_a, se_b, rtol=0, atol=0)


class TestUlClosedForm:
    def test_no_ul_aps_zero_se(self):
        rng = np.random.default_rng(2)
        real, grp = random_mixed_setup(rng)
        sol = random_solution(rng, 4, 4, 2, 2, grp, real)
        sol.b[:] = 0.0
        assert np.all(ul_se_per_ue(sol, real, grp, 4, PRELOG) == 0.0)

    def test_single_ap_mr_value(self):
        # SINR = 100*(4*0.05)^2 / (100*4*0.05*0.1 + 4*0.05) = 4/2.2
        real = synthetic_realization(beta_ul=[[0.1]], beta_dl=np.zeros((1, 0)),
                                     beta_du=np.zeros((0, 1)),
                                     gamma_ul=[[0.05]], gamma_dl=np.zeros((1, 0)),
                                     rho_u=100.0)
        grp = grouping_from_masks(np.zeros((1, 0), bool), [[False]])
        sol = Solution(a=np.zeros(1), b=np.ones(1), varsigma=np.ones(1),
                       theta=np.zeros((1, 0)), alpha=np.ones((1, 1)))
        se = ul_se_per_ue(sol, real, grp, 4, PRELOG)[0]
        assert se == pytest.approx(0.99 * math.log2(1 + 4 / 2.2), rel=1e-12)

    def test_loop_interference_rises_with_dl_power(self):
        # FD AP: UL SE strictly decreases as the DL power level grows
        real = synthetic_realization(beta_ul=[[0.1]], beta_dl=[[0.1]],
                                     beta_du=np.zeros((1, 1)),
                                     gamma_ul=[[0.05]], gamma_dl=[[0.05]],
                                     rho_u=100.0, rho_d=100.0, linr=1e5)
        grp = grouping_from_masks([[False]], [[False]])
        last = None
        for theta_sq in (0.0, 0.01, 0.05):
            sol = Solution(a=np.ones(1), b=np.ones(1), varsigma=np.ones(1),
                           theta=np.array([[math.sqrt(theta_sq)]]),
                           alpha=np.ones((1, 1)))
            se = ul_se_per_ue(sol, real, grp, 4, PRELOG)[0]
            if last is not None:
                assert se < last
            last = se

    def test_own_power_monotonicity(self):
        # SINR of UE 0 nondecreasing in its own varsigma, finite differences
        rng = np.random.default_rng(3)
        real, grp = random_mixed_setup(rng)
        sol = random_solution(rng, 4, 4, 2, 2, grp, real)
        sol.b[:] = 1.0
        values = []
        for v in np.linspace(0.05, 1.0, 8):
            s = Solution(a=sol.a, b=sol.b,
                         varsigma=np.array([v, sol.varsigma[1]]),
                         theta=sol.theta, alpha=sol.alpha)
            values.append(ul_se_per_ue(s, real, grp, 4, PRELOG)[0])
        assert np.all(np.diff(values) > 0)


class TestSpecialCaseIdentities:
    """Uniform groupings reduce to the textual MR / full-ZF substitutions."""

    @pytest.mark.parametrize("mode", ["MR", "FZF"])
    def test_uniform_grouping_matches_reference(self, mode):
        rng = np.random.default_rng(17)
        n = 6
        for _ in range(100):
            m, ku, kd = 3, 2, 2
            real, _ = random_mixed_setup(rng, m=m, n=n, ku=ku, kd=kd)
            grp = uniform_grouping(mode, real, n)
            sol = random_solution(rng, m, n, ku, kd, grp, real)
            dl = dl_se_per_ue(sol, real, grp, n, PRELOG)
            ul = ul_se_per_ue(sol, real, grp, n, PRELOG)
            ref = (mr_reference if mode == "MR"
                   else fzf_reference)(sol, real, n, PRELOG)
            assert np.allclose(dl, ref[0], rtol=1e-12, atol=1e-15)
            assert np.allclose(ul, ref[1], rtol=1e-12, atol=1e-15)


class TestInvariances:
    def test_permutation_equivariance(self):
        rng = np.random.default_rng(23)
        real, grp = random_mixed_setup(rng)
        sol = random_solution(rng, 4, 4, 2, 2, grp, real)
        se_dl = dl_se_per_ue(sol, real, grp, 4, PRELOG)
        se_ul = ul_se_per_ue(sol, real, grp, 4, PRELOG)

        perm_dl = np.array([1, 0])
        perm_ul = np.array([1, 0])
        real_p = synthetic_realization(
            real.beta_dl[:, perm_dl], real.beta_ul[:, perm_ul],
            real.beta_du[np.ix_(perm_dl, perm_ul)], real.beta_ap,
            real.gamma_dl[:, perm_dl], real.gamma_ul[:, perm_ul],
            rho_d=real.rho_d, rho_u=real.rho_u, rho_t=real.rho_t)
        grp_p = grouping_from_masks(grp.dl.strong[:, perm_dl],
                                    grp.ul.strong[:, perm_ul])
        sol_p = Solution(a=sol.a, b=sol.b, varsigma=sol.varsigma[perm_ul],
                         theta=sol.theta[:, perm_dl],
                         alpha=sol.alpha[:, perm_ul])
        assert np.allclose(dl_se_per_ue(sol_p, real_p, grp_p, 4, PRELOG),
                           se_dl[perm_dl], rtol=1e-14)
        assert np.allclose(ul_se_per_ue(sol_p, real_p, grp_p, 4, PRELOG),
                           se_ul[perm_ul], rtol=1e-14)

    def test_perfect_csi_kills_zf_residuals(self):
        # gamma = beta, all-strong: DL denominator is cross link + noise only
        beta = np.array([[0.2, 0.1], [0.15, 0.25]])
        beta_du = np.array([[1e-3, 2e-3], [5e-4, 1e-3]])
        real = synthetic_realization(beta, beta, beta_du,
                                     gamma_dl=beta.copy(), gamma_ul=beta.copy(),
                                     rho_d=50.0, rho_u=20.0)
        grp = grouping_from_masks(np.ones((2, 2), bool), np.zeros((2, 2), bool))
        rng = np.random.default_rng(4)
        sol = random_solution(rng, 2, 4, 2, 2, grp, real)
        se = dl_se_per_ue(sol, real, grp, 4, PRELOG)
        coh = (sol.a[:, None] * sol.theta * real.gamma_dl).sum(0)
        den = real.rho_u * real.beta_du @ sol.varsigma + 1.0
        expected = PRELOG * np.log2(1 + real.rho_d * coh**2 / den)
        assert np.allclose(se, expected, rtol=1e-12)

    def test_gain_power_product_invariance(self):
        # scaling beta -> beta/c with rho -> c*rho (gamma re-derived, theta
        # re-decoded) leaves every SE unchanged
        from nafdplan.genotype import decode, genotype_length

        cfg = NetworkConfig(m_aps=4, n_antennas=4, k_ul=2, k_dl=2)
        _, real = draw_network(cfg, 21)
        grp = pzf_grouping(real, 80.0, 4)
        c = 8.0
        scaled = synthetic_realization(
            real.beta_dl / c, real.beta_ul / c, real.beta_du / c,
            real.beta_ap / c,
            mmse_gamma(real.beta_dl / c, cfg.tau_t, real.rho_t * c),
            mmse_gamma(real.beta_ul / c, cfg.tau_t, real.rho_t * c),
            rho_d=real.rho_d * c, rho_u=real.rho_u * c, rho_t=real.rho_t * c)
        rng = np.random.default_rng(8)
        x = rng.random(genotype_length(cfg))
        sol = decode(x, cfg, real, grp)
        sol_s = decode(x, cfg, scaled, grp)
        assert np.allclose(dl_se_per_ue(sol, real, grp, 4, cfg.prelog),
                           dl_se_per_ue(sol_s, scaled, grp, 4, cfg.prelog),
                           rtol=1e-9)
        assert np.allclose(ul_se_per_ue(sol, real, grp, 4, cfg.prelog),
                           ul_se_per_ue(sol_s, scaled, grp, 4, cfg.prelog),
                           rtol=1e-9)


class TestTotalsAndConstraints:
    def test_total_masks(self):
        rng = np.random.default_rng(31)
        real, grp = random_mixed_setup(rng)
        sol = random_solution(rng, 4, 4, 2, 2, grp, real)
        report = se_report(sol, real, grp, 4, PRELOG)
        assert report.total == pytest.approx(report.se_dl.sum()
                                             + report.se_ul.sum())
        none = total_se(sol, real, grp, 4, PRELOG,
                        served_ul=np.zeros(2, bool),
                        served_dl=np.zeros(2, bool))
        assert none == 0.0
        one = total_se(sol, real, grp, 4, PRELOG,
                       served_ul=np.array([True, False]),
                       served_dl=np.zeros(2, bool))
        assert one == pytest.approx(
            ul_se_per_ue(sol, real, grp, 4, PRELOG)[0])

    def test_power_violation_detected(self, tiny_config):
        _, real = draw_network(tiny_config, 2)
        grp = pzf_grouping(real, 80.0, 4)
        rng = np.random.default_rng(5)
        sol = random_solution(rng, 4, 4, 2, 2, grp, real, full_power=True)
        assert check_constraints(sol, real, grp, tiny_config) == []
        sol.theta *= 2.0  # budget exceeded fourfold
        report = check_constraints(sol, real, grp, tiny_config)
        assert any(v.constraint == "ap_power" for v in report)

    def test_hd_only_mode_violation(self, tiny_config):
        cfg = tiny_config.with_updates(duplex_policy="HD_ONLY")
        _, real = draw_network(cfg, 2)
        grp = pzf_grouping(real, 80.0, 4)
        sol = Solution(a=np.ones(4), b=np.ones(4), varsigma=np.ones(2),
                       theta=np.zeros((4, 2)), alpha=np.ones((4, 2)))
        report = check_constraints(sol, real, grp, cfg)
        assert sum(v.constraint == "hd_only_mode" for v in report) == 4

    def test_phi_matches_precoder_norms(self):
        grp = grouping_from_masks([[True, False], [False, False]],
                                  np.zeros((2, 0), bool))
        phi = phi_coefficients(grp.dl, 4)
        assert phi[0, 0] == pytest.approx(1 / 3)   # ZF: 1/(N-|S|)
        assert phi[0, 1] == 4.0                    # MR: N
        assert np.all(phi[1] == 4.0)
