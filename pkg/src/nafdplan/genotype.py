"""Unit-hypercube genotype: decoding and suspend-service repair.

A genotype of length 2M + Ku + M*Ku + M*Kd + 1 maps to (a, b, varsigma,
alpha, theta). The trailing gene is the common per-AP power level; each AP's
Kd-segment is normalized into shares so the per-AP power constraint holds by
construction. Repair suspends UEs whose SE falls below the QoS threshold,
reallocates the freed DL power over the survivors, and re-evaluates until the
served set is stable (at most Ku + Kd rounds).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .closedform import SEEvaluator, SEReport, Solution
from .config import NetworkConfig
from .grouping import Grouping
from .netgen import NetworkRealization


def genotype_length(config: NetworkConfig) -> int:
    m, ku, kd = config.m_aps, config.k_ul, config.k_dl
    return 2 * m + ku + m * ku + m * kd + 1


@dataclass
class RepairResult:
    fitness: float
    served_ul: np.ndarray
    served_dl: np.ndarray
    report: SEReport
    solution: Solution
    rounds: int


class RepairEngine:
    """Decode + repair pipeline prepared once per (config, realization).

    Optimizers call ``evaluate`` thousands of times per run; everything
    solution-independent lives here.
    """

    def __init__(self, config: NetworkConfig, real: NetworkRealization,
                 grp: Grouping, qos_ul=None, qos_dl=None):
        self.config = config
        self.evaluator = SEEvaluator(config, real, grp)
        m, ku, kd = config.m_aps, config.k_ul, config.k_dl
        self.m, self.ku, self.kd = m, ku, kd
        self.length = genotype_length(config)
        self.hd_only = config.duplex_policy == "HD_ONLY"
        qos_ul = config.qos_ul if qos_ul is None else qos_ul
        qos_dl = config.qos_dl if qos_dl is None else qos_dl
        self.qos_ul = np.broadcast_to(np.asarray(qos_ul, float), (ku,))
        self.qos_dl = np.broadcast_to(np.asarray(qos_dl, float), (kd,))
        # inverse decode denominator; zero-gain links get zero power
        gp = self.evaluator.gamma_phi
        self.inv_gamma_phi = np.divide(1.0, gp, out=np.zeros_like(gp),
                                       where=gp > 0.0)

    def decode(self, genotype: np.ndarray, served_ul=None,
               served_dl=None) -> Solution:
        m, ku, kd = self.m, self.ku, self.kd
        x = np.ascontiguousarray(genotype, dtype=float)
        if x.shape != (self.length,):
            raise ValueError("genotype length mismatch")

        a = (x[:m] >= 0.5).astype(float)
        b = (x[m:2 * m] >= 0.5).astype(float)
        if self.hd_only:
            dl_wins = x[:m] >= x[m:2 * m]
            a *= dl_wins
            b *= ~dl_wins

        ofs = 2 * m
        varsigma = x[ofs:ofs + ku].copy()
        ofs += ku
        alpha = x[ofs:ofs + m * ku].reshape(m, ku).copy()
        ofs += m * ku
        shares = x[ofs:ofs + m * kd].reshape(m, kd).copy()
        level = x[-1]

        if served_ul is not None:
            varsigma *= served_ul
            alpha *= served_ul[None, :]
        if served_dl is not None:
            shares *= served_dl[None, :]
            n_served = int(served_dl.sum())
        else:
            n_served = kd
        row_sum = shares.sum(axis=1, keepdims=True)
        if n_served > 0:
            dead = (row_sum == 0.0)[:, 0]
            if dead.any():
                fallback = (served_dl.astype(float) if served_dl is not None
                            else np.ones(kd)) / n_served
                shares[dead] = fallback
                row_sum = shares.sum(axis=1, keepdims=True)
            shares /= row_sum
        else:
            shares[:] = 0.0

        theta = np.sqrt((a * level)[:, None] * shares * self.inv_gamma_phi)
        return Solution(a=a, b=b, varsigma=varsigma, theta=theta, alpha=alpha)

    def evaluate(self, genotype: np.ndarray) -> RepairResult:
        ku, kd = self.ku, self.kd
        served_ul = np.ones(ku, bool)
        served_dl = np.ones(kd, bool)
        sol = self.decode(genotype)
        se_ul = self.evaluator.se_ul(sol)
        se_dl = self.evaluator.se_dl(sol)
        rounds = 0
        for rounds in range(1, ku + kd + 1):
            drop_ul = served_ul & (se_ul < self.qos_ul)
            drop_dl = served_dl & (se_dl < self.qos_dl)
            if not drop_ul.any() and not drop_dl.any():
                break
            served_ul &= ~drop_ul
            served_dl &= ~drop_dl
            sol = self.decode(genotype, served_ul, served_dl)
            se_ul = self.evaluator.se_ul(sol)
            se_dl = self.evaluator.se_dl(sol)

        report = SEReport(se_ul=np.where(served_ul, se_ul, 0.0),
                          se_dl=np.where(served_dl, se_dl, 0.0),
                          served_ul=served_ul, served_dl=served_dl)
        return RepairResult(fitness=report.total, served_ul=served_ul,
                            served_dl=served_dl, report=report, solution=sol,
                            rounds=rounds)


def decode(genotype: np.ndarray, config: NetworkConfig,
           real: NetworkRealization, grp: Grouping,
           served_ul=None, served_dl=None) -> Solution:
    """Map a genotype to decision variables, masking suspended UEs.

    Mode bits threshold at 0.5 (inclusive). Under the HD_ONLY policy a gene
    pair that asks for both directions keeps only the stronger request, so
    a_m * b_m = 0 always holds there. Suspended UL UEs get zero transmit
    power and zero LSFD weight; the DL power shares are renormalized over
    the surviving DL UEs (equal shares if the surviving segment sums to 0).
    """
    engine = RepairEngine(config, real, grp)
    served_ul = None if served_ul is None else np.asarray(served_ul, bool)
    served_dl = None if served_dl is None else np.asarray(served_dl, bool)
    return engine.decode(genotype, served_ul, served_dl)


def repair_and_evaluate(genotype: np.ndarray, config: NetworkConfig,
                        real: NetworkRealization, grp: Grouping,
                        qos_ul=None, qos_dl=None) -> RepairResult:
    """Fitness of a genotype after suspending QoS-violating UEs.

    qos_ul/qos_dl override the config thresholds and may be per-UE arrays
    (the multi-slot scheduler relaxes them individually). Dropped UEs
    contribute zero SE; every UE still served at the fixed point meets its
    threshold.
    """
    return RepairEngine(config, real, grp, qos_ul, qos_dl).evaluate(genotype)
