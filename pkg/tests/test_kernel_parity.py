"""Compiled and numpy SE kernels must agree to floating-point noise."""

import numpy as np
import pytest

from nafdplan import _se_fallback

try:
    from nafdplan import _se_kernels
except ImportError:
    _se_kernels = None

from conftest import random_mixed_setup, random_solution

pytestmark = pytest.mark.skipif(_se_kernels is None,
                                reason="compiled kernels unavailable")


def _kernel_args(sol, real, grp, n):
    strong_dl = grp.dl.strong.astype(float)
    strong_ul = grp.ul.strong.astype(float)
    return {
        "dl": (n, real.rho_d, real.rho_u, sol.a, sol.theta, sol.varsigma,
               real.beta_dl, real.gamma_dl, real.beta_du,
               strong_dl, grp.dl.n_strong.astype(float)),
        "ul": (n, real.rho_d, real.rho_u, sol.a, sol.b, sol.alpha,
               sol.varsigma, sol.theta, real.beta_ul, real.gamma_ul,
               real.gamma_dl, real.beta_ap,
               strong_ul, grp.ul.n_strong.astype(float),
               strong_dl, grp.dl.n_strong.astype(float)),
    }


@pytest.mark.parametrize("seed", range(20))
def test_backends_agree(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 9))
    n = int(rng.integers(2, 9))
    ku = int(rng.integers(1, 5))
    kd = int(rng.integers(1, 5))
    real, grp = random_mixed_setup(rng, m=m, n=n, ku=ku, kd=kd)
    sol = random_solution(rng, m, n, ku, kd, grp, real)
    if seed % 3 == 0:
        sol.a[:] = 0.0   # idle DL side
    if seed % 4 == 0:
        sol.b[:] = 0.0
    args = _kernel_args(sol, real, grp, n)

    num_c, den_c = _se_kernels.dl_sinr_terms(*args["dl"])
    num_p, den_p = _se_fallback.dl_sinr_terms(*args["dl"])
    assert np.allclose(num_c, num_p, rtol=1e-12, atol=1e-300)
    assert np.allclose(den_c, den_p, rtol=1e-12)

    num_c, den_c = _se_kernels.ul_sinr_terms(*args["ul"])
    num_p, den_p = _se_fallback.ul_sinr_terms(*args["ul"])
    assert np.allclose(num_c, num_p, rtol=1e-12, atol=1e-300)
    assert np.allclose(den_c, den_p, rtol=1e-12, atol=1e-300)
