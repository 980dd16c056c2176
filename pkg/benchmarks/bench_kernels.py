#!/usr/bin/env python3
"""Benchmark the compiled SE kernels against the numpy fallback.

Times the per-call closed-form evaluation (both links) and one full
optimizer run per backend on a representative deployment.

Usage: python benchmarks/bench_kernels.py [--runs 2000]
"""

import argparse
import time

import numpy as np

from nafdplan import _se_fallback
from nafdplan.config import NetworkConfig
from nafdplan.de import Hyperparams, evolve
from nafdplan.genotype import decode, genotype_length
from nafdplan.grouping import pzf_grouping
from nafdplan.netgen import draw_network

try:
    from nafdplan import _se_kernels
except ImportError:
    _se_kernels = None


def time_kernel(kernels, sol, real, grp, n, runs):
    strong_dl = grp.dl.strong.astype(float)
    nsd = grp.dl.n_strong.astype(float)
    strong_ul = grp.ul.strong.astype(float)
    nsu = grp.ul.n_strong.astype(float)
    t0 = time.perf_counter()
    for _ in range(runs):
        kernels.dl_sinr_terms(n, real.rho_d, real.rho_u, sol.a, sol.theta,
                              sol.varsigma, real.beta_dl, real.gamma_dl,
                              real.beta_du, strong_dl, nsd)
        kernels.ul_sinr_terms(n, real.rho_d, real.rho_u, sol.a, sol.b,
                              sol.alpha, sol.varsigma, sol.theta,
                              real.beta_ul, real.gamma_ul, real.gamma_dl,
                              real.beta_ap, strong_ul, nsu, strong_dl, nsd)
    return (time.perf_counter() - t0) / runs


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--runs", type=int, default=2000)
    parser.add_argument("--m", type=int, default=30)
    parser.add_argument("--n", type=int, default=8)
    parser.add_argument("--k", type=int, default=5)
    args = parser.parse_args()

    cfg = NetworkConfig(m_aps=args.m, n_antennas=args.n,
                        k_ul=args.k, k_dl=args.k, qos_ul=0.2, qos_dl=0.2)
    _, real = draw_network(cfg, 1)
    grp = pzf_grouping(real, cfg.upsilon_pct, cfg.n_antennas)
    rng = np.random.default_rng(0)
    sol = decode(rng.random(genotype_length(cfg)), cfg, real, grp)

    print(f"deployment: M={args.m} N={args.n} Ku=Kd={args.k}, "
          f"{args.runs} kernel calls per measurement")
    t_numpy = time_kernel(_se_fallback, sol, real, grp, cfg.n_antennas,
                          args.runs)
    print(f"numpy fallback : {t_numpy * 1e6:9.2f} us per DL+UL evaluation")
    if _se_kernels is None:
        print("compiled core  : unavailable")
        return
    t_cython = time_kernel(_se_kernels, sol, real, grp, cfg.n_antennas,
                           args.runs)
    print(f"compiled core  : {t_cython * 1e6:9.2f} us per DL+UL evaluation "
          f"({t_numpy / t_cython:.1f}x faster)")

    hyper = Hyperparams(pop_size=30, g_max=30, stall_window=30)
    import nafdplan.closedform as cf
    for name, kern in (("compiled", _se_kernels), ("numpy", _se_fallback)):
        cf._kernels = kern
        t0 = time.perf_counter()
        evolve(cfg, real, grp, hyper, seed=3)
        print(f"evolve (30x30) : {time.perf_counter() - t0:6.2f} s with "
              f"{name} kernels")
    cf._kernels = _se_kernels


if __name__ == "__main__":
    main()
