"""Random network drops: wrap-around geometry, large-scale fading, MMSE stats.

Channel gains are unitless (path loss x shadowing); the power budgets
rho_d/rho_u/rho_t are normalized by the thermal noise power, so the
unit-noise "+1" in the closed-form SINR expressions holds literally and
every SINR term is a product of one normalized power with channel gains.
The loop-interference variance on the inter-AP diagonal is the configured
LINR re-expressed as a channel gain (LINR x noise power).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import NetworkConfig

BOLTZMANN = 1.381e-23  # J/K

# Child-stream purpose codes for deterministic per-purpose RNGs.
_STREAMS = {
    "topology": 1,
    "shadow_dl": 2,
    "shadow_ul": 3,
    "shadow_du": 4,
    "shadow_ap": 5,
    "smallscale": 6,
    "optimizer": 7,
}


def child_rng(master_seed: int, purpose: str, *indices: int) -> np.random.Generator:
    """Deterministic per-purpose RNG stream derived from one master seed."""
    return np.random.default_rng(
        np.random.SeedSequence([int(master_seed), _STREAMS[purpose], *map(int, indices)])
    )


@dataclass(frozen=True)
class Topology:
    """AP and UE positions on the wrap-around square, meters."""

    ap_pos: np.ndarray      # (M, 2)
    ul_ue_pos: np.ndarray   # (Ku, 2)
    dl_ue_pos: np.ndarray   # (Kd, 2)


@dataclass(frozen=True)
class NetworkRealization:
    """Large-scale statistics of one drop: linear gains, normalized powers."""

    beta_dl: np.ndarray   # (M, Kd) AP -> DL UE
    beta_ul: np.ndarray   # (M, Ku) UL UE -> AP
    beta_du: np.ndarray   # (Kd, Ku) UL UE -> DL UE cross gains
    beta_ap: np.ndarray   # (M, M) inter-AP; diagonal = loop-interference gain
    gamma_dl: np.ndarray  # (M, Kd) MMSE estimate variances
    gamma_ul: np.ndarray  # (M, Ku)
    rho_d: float          # AP power budget / noise power
    rho_u: float          # UL UE power budget / noise power
    rho_t: float          # pilot power / noise power

    @property
    def m_aps(self) -> int:
        return self.beta_dl.shape[0]

    @property
    def k_dl(self) -> int:
        return self.beta_dl.shape[1]

    @property
    def k_ul(self) -> int:
        return self.beta_ul.shape[1]


def generate_topology(config: NetworkConfig, seed: int) -> Topology:
    """Drop APs and UEs i.i.d. uniformly on the square."""
    rng = child_rng(seed, "topology")
    side = config.area_side
    return Topology(
        ap_pos=rng.uniform(0.0, side, size=(config.m_aps, 2)),
        ul_ue_pos=rng.uniform(0.0, side, size=(config.k_ul, 2)),
        dl_ue_pos=rng.uniform(0.0, side, size=(config.k_dl, 2)),
    )


def wrap_distance(p, q, side: float, height_delta: float = 0.0) -> float:
    """Torus-minimal distance between two points plus a vertical offset."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    delta = np.abs(p - q)
    delta = np.minimum(delta, side - delta)
    return float(np.sqrt(np.sum(delta**2) + height_delta**2))


def _pairwise_wrap(a: np.ndarray, b: np.ndarray, side: float, h: float) -> np.ndarray:
    """Matrix of wrap-around distances between two point sets."""
    d = np.abs(a[:, None, :] - b[None, :, :])
    d = np.minimum(d, side - d)
    return np.sqrt(np.sum(d**2, axis=-1) + h**2)


def path_loss_db(d) -> np.ndarray | float:
    """Log-distance path loss, dB (negative)."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("path loss undefined for nonpositive distance")
    out = -30.5 - 36.7 * np.log10(d)
    return float(out) if out.ndim == 0 else out


def noise_power_watts(config: NetworkConfig) -> float:
    """Thermal noise power k_B * T0 * B * F (noise figure in linear scale)."""
    f_linear = 10.0 ** (config.noise_figure_db / 10.0)
    return BOLTZMANN * config.temperature_k * config.bandwidth_hz * f_linear


def mmse_gamma(beta, tau_t, rho_t):
    """Variance of the MMSE channel estimate for a link of gain beta."""
    beta = np.asarray(beta, dtype=float)
    product = tau_t * rho_t * beta
    out = product * beta / (product + 1.0)
    return float(out) if out.ndim == 0 else out


def _gain_matrix(dist: np.ndarray, shadow_db: np.ndarray) -> np.ndarray:
    pl_db = path_loss_db(dist)
    return 10.0 ** ((pl_db + shadow_db) / 10.0)


def large_scale_realization(config: NetworkConfig, topo: Topology,
                            seed: int) -> NetworkRealization:
    """Path loss x lognormal shadowing for every link.

    AP-UE and AP-AP distances include the AP height delta; UE-UE links are
    at ground level. The inter-AP diagonal carries the loop-interference
    channel variance, the configured LINR re-expressed as a gain.
    """
    side = config.area_side
    h = config.ap_height_delta
    noise_w = noise_power_watts(config)
    std = config.shadow_std_db

    d_dl = _pairwise_wrap(topo.ap_pos, topo.dl_ue_pos, side, h)
    d_ul = _pairwise_wrap(topo.ap_pos, topo.ul_ue_pos, side, h)
    d_du = _pairwise_wrap(topo.dl_ue_pos, topo.ul_ue_pos, side, 0.0)
    d_ap = _pairwise_wrap(topo.ap_pos, topo.ap_pos, side, h)

    beta_dl = _gain_matrix(d_dl,
                           child_rng(seed, "shadow_dl").normal(0.0, std, d_dl.shape))
    beta_ul = _gain_matrix(d_ul,
                           child_rng(seed, "shadow_ul").normal(0.0, std, d_ul.shape))
    beta_du = _gain_matrix(d_du,
                           child_rng(seed, "shadow_du").normal(0.0, std, d_du.shape))
    beta_ap = _gain_matrix(d_ap,
                           child_rng(seed, "shadow_ap").normal(0.0, std, d_ap.shape))
    np.fill_diagonal(beta_ap, 10.0 ** (config.linr_db / 10.0) * noise_w)

    rho_d = config.p_dl_watts / noise_w
    rho_u = config.p_ul_watts / noise_w
    rho_t = config.p_pilot_watts / noise_w

    return NetworkRealization(
        beta_dl=beta_dl,
        beta_ul=beta_ul,
        beta_du=beta_du,
        beta_ap=beta_ap,
        gamma_dl=mmse_gamma(beta_dl, config.tau_t, rho_t),
        gamma_ul=mmse_gamma(beta_ul, config.tau_t, rho_t),
        rho_d=rho_d,
        rho_u=rho_u,
        rho_t=rho_t,
    )


def draw_network(config: NetworkConfig, seed: int):
    """Topology plus its large-scale realization under one master seed."""
    topo = generate_topology(config, seed)
    return topo, large_scale_realization(config, topo, seed)
