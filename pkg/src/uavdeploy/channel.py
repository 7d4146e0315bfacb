"""Air-to-ground channel: elevation-dependent LOS probability and average received power.

Gains are received-power gains, (v / 4 pi f)^2 / mu * r^-alpha, i.e. free-space
spreading with an excess attenuation mu and a condition-dependent exponent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LOS = "LOS"
NLOS = "NLOS"


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


@dataclass(frozen=True)
class ChannelParams:
    carrier_hz: float = 2e9
    light_speed: float = 3e8
    alpha_los: float = 2.0
    alpha_nlos: float = 3.0
    mu_los_db: float = 1.0
    mu_nlos_db: float = 0.0
    b_env: float = 0.136
    c_env: float = 11.95
    tx_power_w: float = 1.0
    noise_psd_dbm_hz: float = -174.0
    bandwidth_hz: float = 20e6

    def __post_init__(self):
        checks = {
            "carrier_hz": self.carrier_hz > 0,
            "light_speed": self.light_speed > 0,
            "alpha_los": self.alpha_los >= 2,
            "alpha_nlos": self.alpha_nlos >= self.alpha_los,
            "tx_power_w": self.tx_power_w > 0,
            "bandwidth_hz": self.bandwidth_hz > 0,
            "b_env": self.b_env > 0,
            "c_env": self.c_env > 0,
        }
        for name, ok in checks.items():
            if not ok:
                raise ValueError(f"invalid channel parameter {name}={getattr(self, name)}")

    @property
    def noise_power_w(self) -> float:
        """Noise PSD integrated over the whole band, in watts."""
        dbm = self.noise_psd_dbm_hz + 10.0 * np.log10(self.bandwidth_hz)
        return float(10.0 ** (dbm / 10.0) / 1000.0)

    @property
    def free_space_const(self) -> float:
        return (self.light_speed / (4.0 * np.pi * self.carrier_hz)) ** 2


def elevation_angle_deg(r, h):
    r = np.asarray(r, dtype=float)
    if not h > 0:
        raise ValueError("altitude must be > 0")
    if np.any(r < h):
        raise ValueError("link length shorter than the altitude")
    return np.degrees(np.arcsin(h / r))


def los_probability(theta_deg, params: ChannelParams):
    theta = np.asarray(theta_deg, dtype=float)
    c = params.c_env
    return 1.0 / (1.0 + c * np.exp(-params.b_env * (theta - c)))


def nlos_probability(theta_deg, params: ChannelParams):
    return 1.0 - los_probability(theta_deg, params)


def path_gain(r, condition: str, params: ChannelParams):
    r = np.asarray(r, dtype=float)
    if condition == LOS:
        alpha, mu_db = params.alpha_los, params.mu_los_db
    elif condition == NLOS:
        alpha, mu_db = params.alpha_nlos, params.mu_nlos_db
    else:
        raise ValueError(f"unknown link condition {condition!r}")
    return params.free_space_const / db_to_linear(mu_db) * r ** (-alpha)


def avg_received_power(r, h: float, params: ChannelParams):
    """LOS/NLOS mixture of received power at link length ``r`` (watts).

    Works elementwise on arrays; every ``r`` must be at least ``h``.
    """
    r = np.asarray(r, dtype=float)
    p_los = los_probability(elevation_angle_deg(r, h), params)
    g_los = path_gain(r, LOS, params)
    g_nlos = path_gain(r, NLOS, params)
    # same as p*g_los + (1-p)*g_nlos, but exact when the two gains coincide
    return params.tx_power_w * (g_nlos + p_los * (g_los - g_nlos))
