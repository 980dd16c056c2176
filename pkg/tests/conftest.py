import numpy as np
import pytest

from nafdplan.config import NetworkConfig
from nafdplan.grouping import Grouping, LinkGrouping
from nafdplan.netgen import NetworkRealization, mmse_gamma


def synthetic_realization(beta_dl, beta_ul, beta_du=None, beta_ap=None,
                          gamma_dl=None, gamma_ul=None,
                          rho_d=100.0, rho_u=100.0, rho_t=100.0,
                          tau_t=None, linr=1e5):
    """Hand-built large-scale statistics for closed-form unit tests.

    gamma defaults to the MMSE value for (tau_t, rho_t); pass gamma
    explicitly to pin estimation quality.
    """
    beta_dl = np.atleast_2d(np.asarray(beta_dl, float))
    beta_ul = np.atleast_2d(np.asarray(beta_ul, float))
    m, kd = beta_dl.shape
    ku = beta_ul.shape[1]
    if beta_du is None:
        beta_du = np.zeros((kd, ku))
    if beta_ap is None:
        beta_ap = np.full((m, m), 1e-3)
        np.fill_diagonal(beta_ap, linr)
    if tau_t is None:
        tau_t = max(ku + kd, 1)
    if gamma_dl is None:
        gamma_dl = mmse_gamma(beta_dl, tau_t, rho_t)
    if gamma_ul is None:
        gamma_ul = mmse_gamma(beta_ul, tau_t, rho_t)
    return NetworkRealization(
        beta_dl=beta_dl, beta_ul=beta_ul,
        beta_du=np.atleast_2d(np.asarray(beta_du, float)),
        beta_ap=np.asarray(beta_ap, float),
        gamma_dl=np.atleast_2d(np.asarray(gamma_dl, float)),
        gamma_ul=np.atleast_2d(np.asarray(gamma_ul, float)),
        rho_d=float(rho_d), rho_u=float(rho_u), rho_t=float(rho_t))


def grouping_from_masks(strong_dl, strong_ul):
    return Grouping(dl=LinkGrouping(strong=np.atleast_2d(np.asarray(strong_dl, bool))),
                    ul=LinkGrouping(strong=np.atleast_2d(np.asarray(strong_ul, bool))))


def random_mixed_setup(rng, m=4, n=4, ku=2, kd=2, max_strong=None):
    """Random realization with genuinely imperfect CSI and mixed groupings.

    max_strong caps the per-AP strong sets (defaults to the structural
    N - 1 bound; Monte Carlo tests pass N - 2 to keep zero-forcing norm
    variance finite).
    """
    beta_dl = rng.uniform(0.01, 0.2, (m, kd))
    beta_ul = rng.uniform(0.01, 0.2, (m, ku))
    beta_du = rng.uniform(1e-4, 1e-2, (kd, ku))
    beta_ap = rng.uniform(1e-3, 1e-1, (m, m))
    beta_ap = 0.5 * (beta_ap + beta_ap.T)
    np.fill_diagonal(beta_ap, rng.uniform(1e3, 1e5))
    real = synthetic_realization(beta_dl, beta_ul, beta_du, beta_ap,
                                 rho_d=200.0, rho_u=80.0, rho_t=50.0,
                                 tau_t=ku + kd)
    cap = (n - 1) if max_strong is None else max_strong
    strong_dl = rng.random((m, kd)) < 0.5
    strong_ul = rng.random((m, ku)) < 0.5
    for strong in (strong_dl, strong_ul):
        for row in strong:
            extra = row.sum() - cap
            if extra > 0:
                row[np.flatnonzero(row)[:extra]] = False
    return real, grouping_from_masks(strong_dl, strong_ul)


def random_solution(rng, m, n, ku, kd, grouping, real, full_power=False):
    """Feasible random decision variables (power constraint by construction)."""
    from nafdplan.closedform import Solution, phi_coefficients

    a = (rng.random(m) < 0.7).astype(float)
    b = (rng.random(m) < 0.7).astype(float)
    varsigma = rng.random(ku)
    alpha = rng.random((m, ku))
    shares = rng.random((m, kd))
    shares /= shares.sum(axis=1, keepdims=True)
    level = 1.0 if full_power else rng.random()
    phi = phi_coefficients(grouping.dl, n)
    theta = np.sqrt(a[:, None] * level * shares / (real.gamma_dl * phi))
    return Solution(a=a, b=b, varsigma=varsigma, theta=theta, alpha=alpha)


@pytest.fixture
def tiny_config():
    return NetworkConfig(m_aps=4, n_antennas=4, k_ul=2, k_dl=2,
                         upsilon_pct=80.0)
