"""Network configuration and the sectioned key = value config-file format."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace


DUPLEX_POLICIES = ("NAFD", "HD_ONLY")


@dataclass
class NetworkConfig:
    """Static parameters of one network deployment.

    Powers are physical watts; everything downstream works with the
    noise-normalized values exposed by :mod:`nafdplan.netgen`.
    """

    m_aps: int = 30                 # M: number of APs
    n_antennas: int = 8             # N: tx and rx RF chains per AP
    k_ul: int = 3                   # UL UEs
    k_dl: int = 3                   # DL UEs
    area_side: float = 500.0        # m, square deployment area
    ap_height_delta: float = 10.0   # m, AP/UE height difference
    bandwidth_hz: float = 5e7
    tau_c: int = 200                # coherence interval, symbols
    tau_t: int | None = None        # pilot length; defaults to k_ul + k_dl
    p_dl_watts: float = 0.8
    p_ul_watts: float = 0.2
    p_pilot_watts: float = 0.2
    noise_figure_db: float = 9.0
    temperature_k: float = 290.0
    linr_db: float = 50.0           # loop-interference-to-noise ratio
    upsilon_pct: float = 80.0       # strong-UE cumulative-gain threshold, percent
    qos_ul: float = 0.0             # bits/s/Hz minimum per UL UE
    qos_dl: float = 0.0             # bits/s/Hz minimum per DL UE
    duplex_policy: str = "NAFD"
    shadow_std_db: float = 4.0      # lognormal shadowing std dev

    def __post_init__(self):
        if self.tau_t is None:
            self.tau_t = self.k_ul + self.k_dl
        self.validate()

    def validate(self):
        if self.m_aps < 1:
            raise ValueError("m_aps must be >= 1")
        if self.n_antennas < 2:
            raise ValueError("n_antennas must be >= 2")
        if self.k_ul < 0 or self.k_dl < 0 or self.k_ul + self.k_dl == 0:
            raise ValueError("need at least one UE")
        if self.tau_t < self.k_ul + self.k_dl:
            raise ValueError("tau_t must cover orthogonal pilots (>= k_ul + k_dl)")
        if self.tau_c <= self.tau_t:
            raise ValueError("tau_c must exceed tau_t")
        for name in ("p_dl_watts", "p_ul_watts", "p_pilot_watts",
                     "bandwidth_hz", "temperature_k", "area_side"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.upsilon_pct <= 100.0:
            raise ValueError("upsilon_pct must lie in [0, 100]")
        if self.qos_ul < 0 or self.qos_dl < 0:
            raise ValueError("QoS thresholds must be nonnegative")
        if self.duplex_policy not in DUPLEX_POLICIES:
            raise ValueError(f"duplex_policy must be one of {DUPLEX_POLICIES}")
        if self.shadow_std_db < 0:
            raise ValueError("shadow_std_db must be nonnegative")

    @property
    def prelog(self) -> float:
        """Fraction of the coherence interval carrying payload data."""
        return (self.tau_c - self.tau_t) / self.tau_c

    def with_updates(self, **kwargs) -> "NetworkConfig":
        """Copy with the given fields replaced (re-validates).

        A tau_t that tracked the k_ul + k_dl default keeps tracking it when
        the UE counts change.
        """
        if ("tau_t" not in kwargs
                and ("k_ul" in kwargs or "k_dl" in kwargs)
                and self.tau_t == self.k_ul + self.k_dl):
            kwargs["tau_t"] = None
        return replace(self, **kwargs)


_INT_FIELDS = {"m_aps", "n_antennas", "k_ul", "k_dl", "tau_c", "tau_t"}
_STR_FIELDS = {"duplex_policy"}


def network_config_from_items(items: dict) -> NetworkConfig:
    """Build a NetworkConfig from string-valued key = value pairs."""
    kwargs = {}
    known = {f.name for f in fields(NetworkConfig)}
    for key, raw in items.items():
        if key not in known:
            raise ValueError(f"unknown network option '{key}'")
        if key in _STR_FIELDS:
            kwargs[key] = raw.strip()
        elif key in _INT_FIELDS:
            kwargs[key] = int(raw)
        else:
            kwargs[key] = float(raw)
    return NetworkConfig(**kwargs)


@dataclass
class ConfigFile:
    """Parsed sectioned config: [network] plus free-form extra sections."""

    network: NetworkConfig = field(default_factory=NetworkConfig)
    sections: dict = field(default_factory=dict)

    def section(self, name: str) -> dict:
        return self.sections.get(name, {})


def load_config(path) -> ConfigFile:
    """Read a sectioned key = value file; [network] maps to NetworkConfig."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path, "r", encoding="utf-8") as fh:
        parser.read_file(fh)
    sections = {name: dict(parser.items(name)) for name in parser.sections()}
    network = network_config_from_items(sections.pop("network", {}))
    return ConfigFile(network=network, sections=sections)


def dump_config(cfg: NetworkConfig, path, extra_sections: dict | None = None):
    """Write a config back out in the same sectioned format."""
    parser = configparser.ConfigParser()
    parser["network"] = {f.name: str(getattr(cfg, f.name))
                         for f in fields(cfg)}
    for name, items in (extra_sections or {}).items():
        parser[name] = {k: str(v) for k, v in items.items()}
    with open(path, "w", encoding="utf-8") as fh:
        parser.write(fh)
