"""Closed-form per-UE spectral efficiency, constraints, and totals.

The actual SINR arithmetic lives in a kernel backend: a compiled Cython
module when available, otherwise the numpy fallback with identical
semantics. `KERNEL_BACKEND` reports which one was selected; setting the
environment variable NAFDPLAN_FORCE_NUMPY=1 before import pins the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .config import NetworkConfig
from .grouping import Grouping, LinkGrouping
from .netgen import NetworkRealization

if os.environ.get("NAFDPLAN_FORCE_NUMPY"):
    from . import _se_fallback as _kernels
    KERNEL_BACKEND = "numpy"
else:
    try:
        from . import _se_kernels as _kernels
        KERNEL_BACKEND = "cython"
    except ImportError:
        from . import _se_fallback as _kernels
        KERNEL_BACKEND = "numpy"


@dataclass
class Solution:
    """Decoded decision variables of the mode/power assignment problem."""

    a: np.ndarray         # (M,) 0/1 DL-mode flags
    b: np.ndarray         # (M,) 0/1 UL-mode flags
    varsigma: np.ndarray  # (Ku,) UL power coefficients in [0, 1]
    theta: np.ndarray     # (M, Kd) nonnegative DL power coefficients
    alpha: np.ndarray     # (M, Ku) LSFD weights in [0, 1]


@dataclass
class SEReport:
    """Per-UE spectral efficiencies with the served masks applied to totals."""

    se_ul: np.ndarray
    se_dl: np.ndarray
    served_ul: np.ndarray
    served_dl: np.ndarray
    total: float = field(init=False)

    def __post_init__(self):
        self.total = float(self.se_ul[self.served_ul].sum()
                           + self.se_dl[self.served_dl].sum())


@dataclass
class Violation:
    constraint: str
    index: tuple
    slack: float

    def __str__(self):
        return f"{self.constraint}{self.index}: slack {self.slack:.3e}"


_REL_TOL = 1e-9


def phi_coefficients(link_grp: LinkGrouping, n_antennas: int) -> np.ndarray:
    """Mean-square precoder norm per unit estimate variance, per (AP, UE)."""
    strong = link_grp.strong
    n_strong = link_grp.n_strong
    return np.where(strong, 1.0 / (n_antennas - n_strong)[:, None],
                    float(n_antennas))


def _check_grouping(grp: LinkGrouping, n_antennas: int, link: str):
    if int(grp.n_strong.max(initial=0)) > n_antennas - 1:
        raise ValueError(f"{link} strong set exceeds N - 1 at some AP")


def _c(arr):
    return np.ascontiguousarray(arr, dtype=float)


def _kernel_grouping(grp: LinkGrouping):
    return _c(grp.strong), _c(grp.n_strong)


def _se_from_terms(num, den, prelog):
    sinr = np.divide(num, den, out=np.zeros_like(num), where=den > 0.0)
    return prelog * np.log2(1.0 + sinr)


class SEEvaluator:
    """Prepared closed-form evaluator for one (config, realization, grouping).

    Hoists every solution-independent array (grouping masks, precoder-norm
    coefficients, contiguous gain matrices) so the per-solution cost is just
    the two kernel calls. The module-level functions stay as the one-shot
    API; optimizer loops should use this.
    """

    def __init__(self, config: NetworkConfig, real: NetworkRealization,
                 grp: Grouping):
        _check_grouping(grp.dl, config.n_antennas, "dl")
        _check_grouping(grp.ul, config.n_antennas, "ul")
        self.config = config
        self.real = real
        self.grp = grp
        self.n = config.n_antennas
        self.prelog = config.prelog
        self.strong_dl, self.n_strong_dl = _kernel_grouping(grp.dl)
        self.strong_ul, self.n_strong_ul = _kernel_grouping(grp.ul)
        self.beta_dl = _c(real.beta_dl)
        self.gamma_dl = _c(real.gamma_dl)
        self.beta_ul = _c(real.beta_ul)
        self.gamma_ul = _c(real.gamma_ul)
        self.beta_du = _c(real.beta_du)
        self.beta_ap = _c(real.beta_ap)
        self.phi = phi_coefficients(grp.dl, self.n)
        self.gamma_phi = self.gamma_dl * self.phi  # decode/budget denominator

    def se_dl(self, sol: Solution) -> np.ndarray:
        num, den = _kernels.dl_sinr_terms(
            self.n, self.real.rho_d, self.real.rho_u,
            sol.a, sol.theta, sol.varsigma,
            self.beta_dl, self.gamma_dl, self.beta_du,
            self.strong_dl, self.n_strong_dl)
        return _se_from_terms(num, den, self.prelog)

    def se_ul(self, sol: Solution) -> np.ndarray:
        num, den = _kernels.ul_sinr_terms(
            self.n, self.real.rho_d, self.real.rho_u,
            sol.a, sol.b, sol.alpha, sol.varsigma, sol.theta,
            self.beta_ul, self.gamma_ul, self.gamma_dl, self.beta_ap,
            self.strong_ul, self.n_strong_ul,
            self.strong_dl, self.n_strong_dl)
        return _se_from_terms(num, den, self.prelog)


def dl_se_per_ue(sol: Solution, real: NetworkRealization, grp: Grouping,
                 n_antennas: int, prelog: float) -> np.ndarray:
    """Closed-form achievable SE of every DL UE, bits/s/Hz."""
    _check_grouping(grp.dl, n_antennas, "dl")
    strong, n_strong = _kernel_grouping(grp.dl)
    num, den = _kernels.dl_sinr_terms(
        n_antennas, real.rho_d, real.rho_u,
        _c(sol.a), _c(sol.theta), _c(sol.varsigma),
        _c(real.beta_dl), _c(real.gamma_dl), _c(real.beta_du),
        strong, n_strong)
    return _se_from_terms(num, den, prelog)


def ul_se_per_ue(sol: Solution, real: NetworkRealization, grp: Grouping,
                 n_antennas: int, prelog: float) -> np.ndarray:
    """Closed-form achievable SE of every UL UE, bits/s/Hz."""
    _check_grouping(grp.ul, n_antennas, "ul")
    _check_grouping(grp.dl, n_antennas, "dl")
    strong_ul, n_strong_ul = _kernel_grouping(grp.ul)
    strong_dl, n_strong_dl = _kernel_grouping(grp.dl)
    num, den = _kernels.ul_sinr_terms(
        n_antennas, real.rho_d, real.rho_u,
        _c(sol.a), _c(sol.b), _c(sol.alpha), _c(sol.varsigma), _c(sol.theta),
        _c(real.beta_ul), _c(real.gamma_ul), _c(real.gamma_dl), _c(real.beta_ap),
        strong_ul, n_strong_ul, strong_dl, n_strong_dl)
    return _se_from_terms(num, den, prelog)


def se_report(sol: Solution, real: NetworkRealization, grp: Grouping,
              n_antennas: int, prelog: float,
              served_ul=None, served_dl=None) -> SEReport:
    """Evaluate both links; unserved UEs report zero SE."""
    k_ul = real.k_ul
    k_dl = real.k_dl
    served_ul = np.ones(k_ul, bool) if served_ul is None else np.asarray(served_ul, bool)
    served_dl = np.ones(k_dl, bool) if served_dl is None else np.asarray(served_dl, bool)
    se_ul = ul_se_per_ue(sol, real, grp, n_antennas, prelog)
    se_dl = dl_se_per_ue(sol, real, grp, n_antennas, prelog)
    se_ul = np.where(served_ul, se_ul, 0.0)
    se_dl = np.where(served_dl, se_dl, 0.0)
    return SEReport(se_ul=se_ul, se_dl=se_dl,
                    served_ul=served_ul, served_dl=served_dl)


def total_se(sol: Solution, real: NetworkRealization, grp: Grouping,
             n_antennas: int, prelog: float,
             served_ul=None, served_dl=None) -> float:
    """Sum of served UEs' spectral efficiencies over both links."""
    return se_report(sol, real, grp, n_antennas, prelog,
                     served_ul, served_dl).total


def check_constraints(sol: Solution, real: NetworkRealization, grp: Grouping,
                      config: NetworkConfig) -> list[Violation]:
    """Every violated power/mode constraint with its index and slack.

    QoS handling is the optimizer's job; an empty report means the solution
    is feasible with respect to the deployment model itself.
    """
    out = []
    m_aps = real.m_aps
    phi = phi_coefficients(grp.dl, config.n_antennas)
    budget = (real.gamma_dl * phi * sol.theta**2).sum(axis=1)
    for m in range(m_aps):
        limit = float(sol.a[m])
        if budget[m] > limit + _REL_TOL * max(limit, 1.0):
            out.append(Violation("ap_power", (m,), float(limit - budget[m])))
    for ell, v in enumerate(sol.varsigma):
        if not -_REL_TOL <= v <= 1.0 + _REL_TOL:
            out.append(Violation("ul_power_range", (ell,), float(min(v, 1.0 - v))))
    bad = np.argwhere((sol.alpha < -_REL_TOL) | (sol.alpha > 1.0 + _REL_TOL))
    for m, ell in bad:
        val = sol.alpha[m, ell]
        out.append(Violation("lsfd_range", (int(m), int(ell)),
                             float(min(val, 1.0 - val))))
    bad = np.argwhere(sol.theta < -_REL_TOL)
    for m, k in bad:
        out.append(Violation("dl_power_sign", (int(m), int(k)),
                             float(sol.theta[m, k])))
    if config.duplex_policy == "HD_ONLY":
        for m in range(m_aps):
            if sol.a[m] * sol.b[m] != 0:
                out.append(Violation("hd_only_mode", (m,), -1.0))
    return out
