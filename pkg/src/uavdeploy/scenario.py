"""World geometry, user sampling and per-slot mobility."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class AreaConfig:
    width_m: float = 800.0
    height_m: float = 800.0
    uav_altitude_m: float = 100.0

    def __post_init__(self):
        for name in ("width_m", "height_m", "uav_altitude_m"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.width_m, self.height_m])

    def clip(self, xy) -> np.ndarray:
        """Clamp coordinates componentwise into the area box."""
        return np.clip(np.asarray(xy, dtype=float), 0.0, self.upper)

    def contains(self, xy) -> bool:
        xy = np.asarray(xy, dtype=float).reshape(-1, 2)
        return bool(np.all(xy >= 0.0) and np.all(xy <= self.upper))


@dataclass(frozen=True)
class UserDistribution:
    """How users are scattered over the area in each slot.

    ``gaussian_centers``/``gaussian_sigma_m`` only apply to ``kind="gaussian"``;
    leaving them as None picks one center at the area midpoint with
    sigma = width / 8 (see :meth:`resolved`).
    """

    kind: str = "uniform"
    gaussian_centers: tuple[tuple[float, float], ...] | None = None
    gaussian_sigma_m: float | None = None

    def __post_init__(self):
        if self.kind not in ("uniform", "gaussian"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "uniform" and (
            self.gaussian_centers is not None or self.gaussian_sigma_m is not None
        ):
            raise ValueError("gaussian parameters given for a uniform distribution")
        if self.gaussian_sigma_m is not None and not self.gaussian_sigma_m > 0:
            raise ValueError("gaussian_sigma_m must be > 0")
        if self.gaussian_centers is not None and len(self.gaussian_centers) == 0:
            raise ValueError("gaussian_centers must not be empty")

    def resolved(self, area: AreaConfig) -> UserDistribution:
        if self.kind == "uniform":
            return self
        centers = self.gaussian_centers
        if centers is None:
            centers = ((area.width_m / 2, area.height_m / 2),)
        sigma = self.gaussian_sigma_m
        if sigma is None:
            sigma = area.width_m / 8
        return replace(self, gaussian_centers=tuple(map(tuple, centers)), gaussian_sigma_m=sigma)


@dataclass
class Snapshot:
    """User and UAV horizontal positions at one time slot (meters)."""

    time_slot: int
    user_xy: np.ndarray
    uav_xy: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self):
        self.user_xy = np.asarray(self.user_xy, dtype=float).reshape(-1, 2)
        self.uav_xy = np.asarray(self.uav_xy, dtype=float).reshape(-1, 2)

    @property
    def num_users(self) -> int:
        return len(self.user_xy)

    @property
    def num_uavs(self) -> int:
        return len(self.uav_xy)

    def with_uavs(self, uav_xy) -> Snapshot:
        return Snapshot(self.time_slot, self.user_xy.copy(), np.array(uav_xy, dtype=float))

    def validate(self, area: AreaConfig) -> None:
        if self.num_uavs < 1:
            raise ValueError("snapshot needs at least one UAV")
        if not (area.contains(self.user_xy) and area.contains(self.uav_xy)):
            raise ValueError("snapshot has coordinates outside the area")


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_users(dist: UserDistribution, k: int, area: AreaConfig, seed) -> np.ndarray:
    """Draw ``k`` user positions, shape (k, 2).

    Gaussian draws that fall outside the box are clamped onto it, so exactly
    ``k`` points come back. Uniform draws for k and k' > k share their first
    k rows under the same seed.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    rng = make_rng(seed)
    if k == 0:
        return np.zeros((0, 2))
    if dist.kind == "uniform":
        return rng.uniform(0.0, 1.0, size=(k, 2)) * area.upper
    dist = dist.resolved(area)
    centers = np.asarray(dist.gaussian_centers, dtype=float)
    which = rng.integers(len(centers), size=k) if len(centers) > 1 else np.zeros(k, dtype=int)
    pts = centers[which] + rng.normal(0.0, dist.gaussian_sigma_m, size=(k, 2))
    return area.clip(pts)


def advance_slot(prev: Snapshot, dist: UserDistribution, area: AreaConfig, seed) -> Snapshot:
    # users are re-drawn i.i.d. each slot; UAVs stay where the solver left them
    users = sample_users(dist, prev.num_users, area, seed)
    return Snapshot(prev.time_slot + 1, users, prev.uav_xy.copy())


def link_distance(user, uav, h: float) -> float:
    if not h > 0:
        raise ValueError("altitude must be > 0")
    dx = float(user[0]) - float(uav[0])
    dy = float(user[1]) - float(uav[1])
    return float(np.sqrt(dx * dx + dy * dy + h * h))


def pairwise_distances(user_xy: np.ndarray, uav_xy: np.ndarray, h: float) -> np.ndarray:
    """3-D link lengths; ``uav_xy`` may carry leading batch dims -> (..., K, P)."""
    user_xy = np.asarray(user_xy, dtype=float)
    uav_xy = np.asarray(uav_xy, dtype=float)
    diff = user_xy[..., :, None, :] - uav_xy[..., None, :, :]
    d2 = diff[..., 0] * diff[..., 0] + diff[..., 1] * diff[..., 1]
    return np.sqrt(d2 + h * h)
