"""SINR, spectral efficiency, user association and the network throughput objective.

All objective values are summed spectral efficiency in bps/Hz. The same
batched kernel (:func:`served_rates`) backs :func:`throughput` and the grid
oracle so that every solver is scored bit-identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, avg_received_power
from .scenario import Snapshot, pairwise_distances

UNSERVED = -1
DEFAULT_ALTITUDE_M = 100.0


@dataclass(frozen=True)
class QoSParams:
    rate_threshold_bpshz: float = 2.5
    comm_radius_m: float = 250.0

    def __post_init__(self):
        if not self.rate_threshold_bpshz >= 0:
            raise ValueError("rate_threshold_bpshz must be >= 0")
        if not self.comm_radius_m > 0:
            raise ValueError("comm_radius_m must be > 0")


@dataclass
class LinkReport:
    rx_power_w: np.ndarray
    sinr: np.ndarray
    spectral_eff: np.ndarray
    distance_m: np.ndarray


@dataclass
class Association:
    serving: np.ndarray

    @property
    def served(self) -> np.ndarray:
        return self.serving != UNSERVED

    @property
    def num_served(self) -> int:
        return int(np.count_nonzero(self.served))


def _sinr(rx: np.ndarray, noise_w: float, interference: bool) -> np.ndarray:
    if not interference:
        return rx / noise_w
    n_uav = rx.shape[-1]
    interf = np.zeros_like(rx)
    for p in range(n_uav):
        acc = np.zeros(rx.shape[:-1])
        for j in range(n_uav):
            if j != p:
                acc = acc + rx[..., j]
        interf[..., p] = acc
    return rx / (interf + noise_w)


def _links(user_xy, uav_xy, ch: ChannelParams, altitude_m: float, interference: bool):
    dist = pairwise_distances(user_xy, uav_xy, altitude_m)
    rx = avg_received_power(dist, altitude_m, ch)
    sinr = _sinr(rx, ch.noise_power_w, interference)
    se = np.log2(1.0 + sinr)
    return dist, rx, sinr, se


def _associate(dist, rx, se, qos: QoSParams) -> np.ndarray:
    # closed conditions: distance == delta and rate == Gamma still count
    feasible = (dist <= qos.comm_radius_m) & (se >= qos.rate_threshold_bpshz)
    masked = np.where(feasible, rx, -np.inf)
    serving = np.argmax(masked, axis=-1)
    return np.where(feasible.any(axis=-1), serving, UNSERVED)


def served_rates(user_xy, uav_xy, ch: ChannelParams, qos: QoSParams,
                 altitude_m: float = DEFAULT_ALTITUDE_M, interference: bool = True):
    """Per-user served spectral efficiency and serving index.

    ``uav_xy`` has shape (..., P, 2); results have shape (..., K).
    """
    dist, rx, _, se = _links(user_xy, uav_xy, ch, altitude_m, interference)
    serving = _associate(dist, rx, se, qos)
    picked = np.take_along_axis(se, np.maximum(serving, 0)[..., None], axis=-1)[..., 0]
    return np.where(serving == UNSERVED, 0.0, picked), serving


def sum_rates(per_user: np.ndarray) -> np.ndarray:
    # user-order sequential sum: appending users can never lower the total
    total = np.zeros(per_user.shape[:-1])
    for k in range(per_user.shape[-1]):
        total = total + per_user[..., k]
    return total


def link_report(snap: Snapshot, ch: ChannelParams, altitude_m: float = DEFAULT_ALTITUDE_M,
                interference: bool = True) -> LinkReport:
    dist, rx, sinr, se = _links(snap.user_xy, snap.uav_xy, ch, altitude_m, interference)
    return LinkReport(rx_power_w=rx, sinr=sinr, spectral_eff=se, distance_m=dist)


def associate(report: LinkReport, snap: Snapshot, qos: QoSParams) -> Association:
    if report.rx_power_w.shape != (snap.num_users, snap.num_uavs):
        raise ValueError("link report does not match the snapshot")
    return Association(_associate(report.distance_m, report.rx_power_w, report.spectral_eff, qos))


def throughput(snap: Snapshot, ch: ChannelParams, qos: QoSParams,
               altitude_m: float = DEFAULT_ALTITUDE_M) -> float:
    """Summed spectral efficiency of served users (bps/Hz)."""
    if snap.num_users == 0:
        return 0.0
    per_user, _ = served_rates(snap.user_xy, snap.uav_xy, ch, qos, altitude_m)
    return float(sum_rates(per_user))


def throughput_no_interference(snap: Snapshot, ch: ChannelParams, qos: QoSParams,
                               altitude_m: float = DEFAULT_ALTITUDE_M) -> float:
    if snap.num_users == 0:
        return 0.0
    per_user, _ = served_rates(snap.user_xy, snap.uav_xy, ch, qos, altitude_m, interference=False)
    return float(sum_rates(per_user))


def throughput_bps(snap: Snapshot, ch: ChannelParams, qos: QoSParams,
                   altitude_m: float = DEFAULT_ALTITUDE_M) -> float:
    """Reporting-only rate in bit/s: each UAV splits the band equally over its users."""
    if snap.num_users == 0:
        return 0.0
    per_user, serving = served_rates(snap.user_xy, snap.uav_xy, ch, qos, altitude_m)
    load = np.bincount(serving[serving != UNSERVED], minlength=snap.num_uavs)
    share = np.zeros(snap.num_users)
    served = serving != UNSERVED
    share[served] = ch.bandwidth_hz / load[serving[served]]
    return float(np.sum(per_user * share))
