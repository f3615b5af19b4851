"""Node placement and link-budget primitives.

The surface sits at the origin with its plane along the y-axis.  The outward
normal points along +x: users and the base station live on the reflection
side (x >= 0), the eavesdropper on the refraction side (x <= 0).  All
coordinates are meters, powers are watts internally, and gains are linear
power ratios.

Path gains follow a log-distance model anchored at free space with a 1 m
reference distance:

    gain_dB = -(20*log10(f) + 10*n*log10(d) - 147.55)

which reduces to the Friis free-space loss for exponent n = 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import InvalidGeometryError

__all__ = [
    "RfConstants",
    "Scenario",
    "place_scenario",
    "path_gain",
    "noise_power",
    "db_to_linear",
    "linear_to_db",
    "dbm_to_watts",
    "watts_to_dbm",
]

# 20*log10(c / 4 pi) with c in m/s; the Friis constant for d and f in SI units.
_FRIIS_DB = 147.55


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0:
        raise ValueError("dB of a non-positive ratio is undefined")
    return 10.0 * math.log10(x)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        raise ValueError("dBm of a non-positive power is undefined")
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class RfConstants:
    """RF-plane constants shared by every link in a scenario.

    ``pathloss_exp_rics`` applies to the hops that touch the surface,
    ``pathloss_exp_direct`` to the direct leakage paths (sender->eavesdropper
    and, when enabled, sender->receiver).  The direct user->BS path is
    disabled by default (classic blocked-link RIS deployment); the shipped
    experiment config enables it for the secrecy study.
    """

    tx_power_w: float = 0.2
    bandwidth_hz: float = 10e6
    noise_density_dbm_hz: float = -174.0
    carrier_freq_hz: float = 1.4e9
    pathloss_exp_rics: float = 2.0
    pathloss_exp_direct: float = 3.6
    direct_user_bs: bool = False
    fading: bool = False

    def __post_init__(self):
        if self.tx_power_w <= 0:
            raise InvalidGeometryError("tx_power must be positive")
        if self.bandwidth_hz <= 0:
            raise InvalidGeometryError("bandwidth must be positive")
        if self.carrier_freq_hz <= 0:
            raise InvalidGeometryError("carrier frequency must be positive")
        if self.pathloss_exp_rics < 2 or self.pathloss_exp_direct < 2:
            raise InvalidGeometryError("path-loss exponents below 2 are not supported")


Point = tuple[float, float]


@dataclass(frozen=True)
class Scenario:
    """Placed nodes plus RF constants.  Immutable after construction."""

    users: tuple[Point, Point, Point]
    bs: Point
    eve: Point
    rf: RfConstants = field(default_factory=RfConstants)
    rics: Point = (0.0, 0.0)

    def __post_init__(self):
        nodes = [*self.users, self.bs, self.eve, self.rics]
        for i, p in enumerate(nodes):
            for q in nodes[i + 1 :]:
                if _dist(p, q) <= 0:
                    raise InvalidGeometryError("all pairwise node distances must be positive")
        for u in self.users:
            if u[0] < self.rics[0]:
                raise InvalidGeometryError("users must sit on the reflection side of the surface")
        if self.bs[0] < self.rics[0]:
            raise InvalidGeometryError("the BS must sit on the reflection side of the surface")
        if self.eve[0] > self.rics[0]:
            raise InvalidGeometryError("the eavesdropper must sit on the refraction side")

    # -- distances ---------------------------------------------------------

    def user_rics_distance(self, user: int = 0) -> float:
        return _dist(self.users[user], self.rics)

    def rics_bs_distance(self) -> float:
        return _dist(self.rics, self.bs)

    def rics_eve_distance(self) -> float:
        return _dist(self.rics, self.eve)

    def user_bs_distance(self, user: int = 0) -> float:
        return _dist(self.users[user], self.bs)

    def user_eve_distance(self, user: int = 0) -> float:
        return _dist(self.users[user], self.eve)

    # -- link budget -------------------------------------------------------

    def noise_w(self) -> float:
        return noise_power(self.rf.noise_density_dbm_hz, self.rf.bandwidth_hz)

    def gain_user_rics(self, user: int = 0) -> float:
        return path_gain(self.user_rics_distance(user), self.rf.carrier_freq_hz, self.rf.pathloss_exp_rics)

    def gain_rics_bs(self) -> float:
        return path_gain(self.rics_bs_distance(), self.rf.carrier_freq_hz, self.rf.pathloss_exp_rics)

    def gain_rics_eve(self) -> float:
        return path_gain(self.rics_eve_distance(), self.rf.carrier_freq_hz, self.rf.pathloss_exp_rics)

    def gain_user_eve(self, user: int = 0) -> float:
        """Direct leakage gain from a user to the eavesdropper."""
        return path_gain(self.user_eve_distance(user), self.rf.carrier_freq_hz, self.rf.pathloss_exp_direct)

    def gain_user_bs(self, user: int = 0) -> float:
        """Direct user->BS gain; zero when the path is blocked."""
        if not self.rf.direct_user_bs:
            return 0.0
        return path_gain(self.user_bs_distance(user), self.rf.carrier_freq_hz, self.rf.pathloss_exp_direct)

    def with_rf(self, **changes) -> "Scenario":
        return replace(self, rf=replace(self.rf, **changes))


def _dist(p: Point, q: Point) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def place_scenario(
    d_user_m: float,
    d_bs_m: float,
    angle_deg: float,
    d_eve_m: float,
    rf: RfConstants | None = None,
    user_spread_deg: float = 2.0,
) -> Scenario:
    """Place all nodes from the surface-centric distance/angle parameters.

    The user direction and the BS direction are split symmetrically about the
    surface normal so that the angle between them, measured at the surface,
    equals ``angle_deg``.  User 1 sits exactly on the nominal user direction;
    users 2 and 3 fan toward the normal by ``user_spread_deg`` steps at the
    same range so that no two nodes coincide while staying on the reflection
    side.  The eavesdropper is placed on the refraction side along the
    direction opposite to user 1 (shadowed behind the surface), at range
    ``d_eve_m``.
    """
    for name, d in (("d_user", d_user_m), ("d_bs", d_bs_m), ("d_eve", d_eve_m)):
        if d <= 0:
            raise InvalidGeometryError(f"{name} must be positive, got {d}")
    if not 0 < angle_deg < 360:
        raise InvalidGeometryError(f"incident angle must lie in (0, 360) degrees, got {angle_deg}")

    rf = rf or RfConstants()
    half = math.radians(angle_deg) / 2.0
    theta_user = half
    theta_bs = -half

    def polar(r, theta):
        return (r * math.cos(theta), r * math.sin(theta))

    spread = math.radians(user_spread_deg)
    users = (
        polar(d_user_m, theta_user),
        polar(d_user_m, theta_user - spread),
        polar(d_user_m, theta_user - 2.0 * spread),
    )
    bs = polar(d_bs_m, theta_bs)
    eve = polar(d_eve_m, theta_user + math.pi)
    return Scenario(users=users, bs=bs, eve=eve, rf=rf)


def path_gain(d_m: float, freq_hz: float, exponent: float) -> float:
    """Linear power gain of the log-distance model (<= 1 for far-field links).

    Anchored at free space: for exponent 2 this is exactly the Friis loss;
    larger exponents steepen the distance roll-off from the 1 m reference.
    Strictly decreasing in both distance and frequency.
    """
    if d_m <= 0:
        raise InvalidGeometryError(f"distance must be positive, got {d_m}")
    if freq_hz <= 0:
        raise InvalidGeometryError(f"frequency must be positive, got {freq_hz}")
    if exponent < 2:
        raise InvalidGeometryError(f"path-loss exponent must be >= 2, got {exponent}")
    loss_db = 20.0 * math.log10(freq_hz) + 10.0 * exponent * math.log10(d_m) - _FRIIS_DB
    return db_to_linear(-loss_db)


def noise_power(density_dbm_hz: float, bandwidth_hz: float) -> float:
    """Thermal noise power in watts over the given bandwidth."""
    if bandwidth_hz <= 0:
        raise InvalidGeometryError(f"bandwidth must be positive, got {bandwidth_hz}")
    return dbm_to_watts(density_dbm_hz + 10.0 * math.log10(bandwidth_hz))
