"""Pure-numpy spectral-efficiency kernels (fallback for the compiled core).

Both backends implement the same contract: given one decoded solution and the
large-scale statistics, return the per-UE SINR numerator and denominator of
the closed-form DL/UL expressions. Shapes follow the (M aps, K ues)
convention; `strong` matrices are float 0/1 masks and `n_strong` their row
sums, pre-capped at N - 1.
"""

import numpy as np


def dl_sinr_terms(n_antennas, rho_d, rho_u, a, theta, varsigma,
                  beta_dl, gamma_dl, beta_du, strong_dl, n_strong_dl):
    """Coherent-gain^2 and interference+noise for every DL UE.

    The coherent gain weights zero-forced APs by 1 and maximum-ratio APs by
    N. Interference splits per transmitting AP into its zero-forced load
    (scaled by the estimation residual when the victim is itself protected
    there, by the full gain otherwise) and its maximum-ratio load, plus the
    UL-UE cross link and unit noise.
    """
    n = float(n_antennas)
    load = theta**2 * gamma_dl                                    # (M, Kd)
    zf_load = (load * strong_dl).sum(axis=1) / (n - n_strong_dl)  # (M,)
    mr_load = (load * (1.0 - strong_dl)).sum(axis=1)              # (M,)

    weight = strong_dl + n * (1.0 - strong_dl)
    coherent = (a[:, None] * theta * gamma_dl * weight).sum(axis=0)
    num = rho_d * coherent**2

    residual = beta_dl - gamma_dl * strong_dl                     # (M, Kd)
    den = rho_d * ((a * zf_load) @ residual
                   + n * (a * mr_load) @ beta_dl)
    den += rho_u * (beta_du @ varsigma) + 1.0
    return num, den


def ul_sinr_terms(n_antennas, rho_d, rho_u, a, b, alpha, varsigma, theta,
                  beta_ul, gamma_ul, gamma_dl, beta_ap,
                  strong_ul, n_strong_ul, strong_dl, n_strong_dl):
    """SINR numerator and denominator for every UL UE after LSFD combining.

    The denominator adds the UL-UE interference/noise seen through each
    AP's combiner and the DL-to-UL leakage through inter-AP channels, whose
    diagonal carries the loop interference of full-duplex APs.
    """
    n = float(n_antennas)
    weight = strong_ul + n * (1.0 - strong_ul)                    # (M, Ku)
    coherent = (b[:, None] * alpha * gamma_ul * weight).sum(axis=0)
    num = rho_u * varsigma * coherent**2

    residual = beta_ul - gamma_ul * strong_ul                     # (M, Ku)
    zf_int = rho_u * (residual @ varsigma) + 1.0                  # (M,)
    mr_int = rho_u * (beta_ul @ varsigma) + 1.0                   # (M,)
    per_ap = np.where(strong_ul > 0.0,
                      (zf_int / (n - n_strong_ul))[:, None],
                      (n * mr_int)[:, None])
    psi = (b[:, None] * alpha**2 * gamma_ul * per_ap).sum(axis=0)

    gain_dl = np.where(strong_dl > 0.0,
                       (1.0 / (n - n_strong_dl))[:, None], n)     # (M, Kd)
    tx_load = a * ((theta**2 * gamma_dl) * gain_dl).sum(axis=1)   # (M,)
    gain_ul = np.where(strong_ul > 0.0,
                       (1.0 / (n - n_strong_ul))[:, None], n)     # (M, Ku)
    receive = b[:, None] * alpha**2 * gamma_ul * gain_ul          # (M, Ku)
    leak = rho_d * (receive * (beta_ap @ tx_load)[:, None]).sum(axis=0)

    return num, psi + leak
