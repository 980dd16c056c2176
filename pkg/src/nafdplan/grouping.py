"""Per-AP strong/weak UE partitions driving the partial zero-forcing split."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .netgen import NetworkRealization

UL = "UL"
DL = "DL"

MODE_PZF = "PZF"
MODE_MR = "MR"
MODE_FZF = "FZF"


@dataclass(frozen=True)
class LinkGrouping:
    """Strong/weak split of one link's UEs at every AP.

    strong[m, k] is True when AP m zero-forces toward/from UE k; the
    complement gets maximum-ratio processing. The strong set is capped at
    N - 1 so every N - |S_m| denominator stays positive.
    """

    strong: np.ndarray  # (M, K) bool

    @property
    def n_strong(self) -> np.ndarray:
        """|S_m| per AP."""
        return self.strong.sum(axis=1)

    def weak(self) -> np.ndarray:
        return ~self.strong


@dataclass(frozen=True)
class Grouping:
    """DL and UL partitions for one realization."""

    dl: LinkGrouping
    ul: LinkGrouping


def _strong_from_gains(gains: np.ndarray, upsilon_pct: float, n_antennas: int) -> np.ndarray:
    """Smallest descending-gain prefix reaching upsilon% of each AP's total."""
    m_aps, k = gains.shape
    cap = min(n_antennas - 1, k)
    strong = np.zeros((m_aps, k), dtype=bool)
    if upsilon_pct <= 0.0 or k == 0:
        return strong
    order = np.argsort(-gains, axis=1, kind="stable")
    sorted_gains = np.take_along_axis(gains, order, axis=1)
    cum = np.cumsum(sorted_gains, axis=1)
    total = cum[:, -1]
    # relative slack absorbs cumsum roundoff at upsilon = 100
    target = (upsilon_pct / 100.0) * total * (1.0 - 1e-12)
    for m in range(m_aps):
        if total[m] <= 0.0:
            continue
        size = int(np.searchsorted(cum[m], target[m]) + 1)
        size = min(size, cap)
        strong[m, order[m, :size]] = True
    return strong


def group_ues(real: NetworkRealization, upsilon_pct: float, n_antennas: int,
              link: str) -> LinkGrouping:
    """Partition one link's UEs by cumulative share of each AP's channel gain."""
    if not 0.0 <= upsilon_pct <= 100.0:
        raise ValueError("upsilon_pct must lie in [0, 100]")
    gains = real.beta_dl if link == DL else real.beta_ul
    return LinkGrouping(strong=_strong_from_gains(gains, upsilon_pct, n_antennas))


def specialize_grouping(mode: str, real: NetworkRealization, n_antennas: int,
                        link: str, upsilon_pct: float | None = None) -> LinkGrouping:
    """Uniform all-weak (MR) / all-strong (FZF) splits, or threshold PZF."""
    gains = real.beta_dl if link == DL else real.beta_ul
    m_aps, k = gains.shape
    if mode == MODE_MR:
        return LinkGrouping(strong=np.zeros((m_aps, k), dtype=bool))
    if mode == MODE_FZF:
        if n_antennas <= k:
            raise ValueError(
                f"full zero-forcing needs more antennas than UEs (N={n_antennas}, K={k})")
        return LinkGrouping(strong=np.ones((m_aps, k), dtype=bool))
    if mode == MODE_PZF:
        if upsilon_pct is None:
            raise ValueError("PZF specialization needs upsilon_pct")
        return group_ues(real, upsilon_pct, n_antennas, link)
    raise ValueError(f"unknown processing mode '{mode}'")


def pzf_grouping(real: NetworkRealization, upsilon_pct: float,
                 n_antennas: int) -> Grouping:
    """Threshold grouping on both links with a shared upsilon."""
    return Grouping(
        dl=group_ues(real, upsilon_pct, n_antennas, DL),
        ul=group_ues(real, upsilon_pct, n_antennas, UL),
    )


def uniform_grouping(mode: str, real: NetworkRealization, n_antennas: int) -> Grouping:
    """MR or FZF applied to both links."""
    return Grouping(
        dl=specialize_grouping(mode, real, n_antennas, DL),
        ul=specialize_grouping(mode, real, n_antennas, UL),
    )


def validate_grouping(grp: Grouping, n_antennas: int):
    """Raise if any strong set would zero an N - |S| denominator."""
    for name, link in (("dl", grp.dl), ("ul", grp.ul)):
        if int(link.n_strong.max(initial=0)) > n_antennas - 1:
            raise ValueError(f"{name} strong set exceeds N - 1 at some AP")
