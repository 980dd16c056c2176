# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled spectral-efficiency kernels; contract mirrors _se_fallback."""

import numpy as np


def dl_sinr_terms(int n_antennas, double rho_d, double rho_u,
                  double[::1] a, double[:, ::1] theta, double[::1] varsigma,
                  double[:, ::1] beta_dl, double[:, ::1] gamma_dl,
                  double[:, ::1] beta_du,
                  double[:, ::1] strong_dl, double[::1] n_strong_dl):
    cdef int m_aps = theta.shape[0]
    cdef int k_dl = theta.shape[1]
    cdef int k_ul = varsigma.shape[0]
    cdef double n = <double>n_antennas
    cdef int m, k, kk, l
    cdef double s, zf_load, mr_load, load, az, am, cross

    num_arr = np.zeros(k_dl)
    den_arr = np.zeros(k_dl)
    cdef double[::1] num = num_arr
    cdef double[::1] den = den_arr
    cdef double[::1] coherent = np.zeros(k_dl)

    for m in range(m_aps):
        am = a[m]
        if am == 0.0:
            continue
        zf_load = 0.0
        mr_load = 0.0
        for k in range(k_dl):
            load = theta[m, k] * theta[m, k] * gamma_dl[m, k]
            if strong_dl[m, k] != 0.0:
                zf_load += load
            else:
                mr_load += load
        zf_load /= n - n_strong_dl[m]
        for k in range(k_dl):
            if strong_dl[m, k] != 0.0:
                coherent[k] += am * theta[m, k] * gamma_dl[m, k]
                den[k] += rho_d * am * (zf_load * (beta_dl[m, k] - gamma_dl[m, k])
                                        + n * mr_load * beta_dl[m, k])
            else:
                coherent[k] += n * am * theta[m, k] * gamma_dl[m, k]
                den[k] += rho_d * am * (zf_load + n * mr_load) * beta_dl[m, k]

    for k in range(k_dl):
        cross = 0.0
        for l in range(k_ul):
            cross += varsigma[l] * beta_du[k, l]
        den[k] += rho_u * cross + 1.0
        num[k] = rho_d * coherent[k] * coherent[k]
    return num_arr, den_arr


def ul_sinr_terms(int n_antennas, double rho_d, double rho_u,
                  double[::1] a, double[::1] b,
                  double[:, ::1] alpha, double[::1] varsigma,
                  double[:, ::1] theta,
                  double[:, ::1] beta_ul, double[:, ::1] gamma_ul,
                  double[:, ::1] gamma_dl, double[:, ::1] beta_ap,
                  double[:, ::1] strong_ul, double[::1] n_strong_ul,
                  double[:, ::1] strong_dl, double[::1] n_strong_dl):
    cdef int m_aps = theta.shape[0]
    cdef int k_dl = theta.shape[1]
    cdef int k_ul = varsigma.shape[0]
    cdef double n = <double>n_antennas
    cdef int m, i, k, l
    cdef double bm, zf_int, mr_int, w, al2, gain, tx, inter

    num_arr = np.zeros(k_ul)
    den_arr = np.zeros(k_ul)
    cdef double[::1] num = num_arr
    cdef double[::1] den = den_arr
    cdef double[::1] coherent = np.zeros(k_ul)
    cdef double[::1] tx_load = np.zeros(m_aps)
    cdef double[::1] ap_leak = np.zeros(m_aps)

    # DL transmit load per AP weighted by the precoder's mean square norm
    for i in range(m_aps):
        if a[i] == 0.0:
            continue
        tx = 0.0
        for k in range(k_dl):
            gain = theta[i, k] * theta[i, k] * gamma_dl[i, k]
            if strong_dl[i, k] != 0.0:
                tx += gain / (n - n_strong_dl[i])
            else:
                tx += n * gain
        tx_load[i] = tx

    for m in range(m_aps):
        ap_leak[m] = 0.0
        for i in range(m_aps):
            ap_leak[m] += beta_ap[m, i] * tx_load[i]

    for m in range(m_aps):
        bm = b[m]
        if bm == 0.0:
            continue
        zf_int = 1.0
        mr_int = 1.0
        for l in range(k_ul):
            w = varsigma[l] * beta_ul[m, l]
            mr_int += rho_u * w
            if strong_ul[m, l] != 0.0:
                zf_int += rho_u * (w - varsigma[l] * gamma_ul[m, l])
            else:
                zf_int += rho_u * w
        for l in range(k_ul):
            al2 = alpha[m, l] * alpha[m, l]
            if strong_ul[m, l] != 0.0:
                gain = 1.0 / (n - n_strong_ul[m])
                coherent[l] += bm * alpha[m, l] * gamma_ul[m, l]
                inter = zf_int * gain
            else:
                gain = n
                coherent[l] += n * bm * alpha[m, l] * gamma_ul[m, l]
                inter = n * mr_int
            den[l] += bm * al2 * gamma_ul[m, l] * (inter + rho_d * gain * ap_leak[m])

    for l in range(k_ul):
        num[l] = rho_u * varsigma[l] * coherent[l] * coherent[l]
    return num_arr, den_arr
