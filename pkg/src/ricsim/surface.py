"""Reconfigurable beamforming layer: element operations and array gain.

Two operating modes are modeled.  In reflection-absorption (RA) mode most
elements reflect passively while a handful of semi-active elements capture
I/Q samples; nothing is refracted.  In reflection-refraction (RR) mode every
element splits incident power into a reflected fraction ``alpha`` and a
refracted fraction ``beta = 1 - alpha``.

Array gain uses the standard cascaded model: with per-element phases aligned
to the two-hop channel the power gain on a side serving M elements is
``split * M**2 * hop1 * hop2``.  Phase vectors here are deviations from that
alignment, so the all-zero default is the coherent optimum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidProfileError, ModeMismatchError

__all__ = ["SurfaceMode", "RicsProfile", "configure_ra", "configure_rr", "coherent_array_gain", "split_power"]


class SurfaceMode(enum.Enum):
    RA = "RA"
    RR = "RR"


def _frozen_phases(phases, n: int, what: str) -> np.ndarray:
    if phases is None:
        arr = np.zeros(n, dtype=float)
    else:
        arr = np.asarray(phases, dtype=float).copy()
    if arr.shape != (n,):
        raise InvalidProfileError(f"{what} must have length {n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidProfileError(f"{what} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RicsProfile:
    """Surface configuration; immutable after construction."""

    n_elements: int
    mode: SurfaceMode
    alpha: float
    n_absorb: int
    reflect_phases: np.ndarray
    refract_phases: np.ndarray | None
    element_efficiency: float = 1.0

    @property
    def beta(self) -> float:
        return 1.0 - self.alpha

    @property
    def n_reflect(self) -> int:
        return self.n_elements - self.n_absorb

    def __post_init__(self):
        if self.n_elements < 1:
            raise InvalidProfileError("surface needs at least one element")
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidProfileError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 < self.element_efficiency <= 1.0:
            raise InvalidProfileError("element efficiency must lie in (0, 1]")
        if self.mode is SurfaceMode.RA:
            if not 0 < self.n_absorb < self.n_elements:
                raise InvalidProfileError(
                    f"RA mode requires 0 < n_absorb < n_elements, got {self.n_absorb} of {self.n_elements}"
                )
            if self.alpha != 1.0:
                raise InvalidProfileError("RA mode never refracts; alpha must be 1")
            if self.refract_phases is not None:
                raise InvalidProfileError("RA mode has no refract phases")
        else:
            if self.n_absorb != 0:
                raise InvalidProfileError("RR mode has no semi-active elements")


def configure_ra(n_elements: int, n_absorb: int = 4, reflect_phases=None) -> RicsProfile:
    """RA-mode profile: ``n_elements - n_absorb`` reflectors plus ``n_absorb`` receivers.

    The absorbing subset is carved out of the array, so sensing costs a little
    reflection gain.  ``reflect_phases`` defaults to aligned (all zero).
    """
    if n_elements < 2:
        raise InvalidProfileError("RA mode needs at least one reflector and one receiver")
    if not 0 < n_absorb < n_elements:
        raise InvalidProfileError(
            f"RA mode requires 0 < n_absorb < n_elements, got n_absorb={n_absorb}, n_elements={n_elements}"
        )
    phases = _frozen_phases(reflect_phases, n_elements - n_absorb, "reflect_phases")
    return RicsProfile(
        n_elements=n_elements,
        mode=SurfaceMode.RA,
        alpha=1.0,
        n_absorb=n_absorb,
        reflect_phases=phases,
        refract_phases=None,
    )


def configure_rr(n_elements: int, alpha: float, reflect_phases=None, refract_phases=None) -> RicsProfile:
    """RR-mode profile splitting incident power alpha : (1 - alpha) per element."""
    if n_elements < 1:
        raise InvalidProfileError("surface needs at least one element")
    if not 0.0 <= alpha <= 1.0:
        raise InvalidProfileError(f"alpha must lie in [0, 1], got {alpha}")
    return RicsProfile(
        n_elements=n_elements,
        mode=SurfaceMode.RR,
        alpha=float(alpha),
        n_absorb=0,
        reflect_phases=_frozen_phases(reflect_phases, n_elements, "reflect_phases"),
        refract_phases=_frozen_phases(refract_phases, n_elements, "refract_phases"),
    )


def coherent_array_gain(profile: RicsProfile, side: str, hop1_gain: float, hop2_gain: float) -> float:
    """Cascaded two-hop power gain through one side of the surface.

    ``side`` is "reflect" or "refract".  With the default aligned phases this
    equals ``split * M**2 * hop1 * hop2`` for the M elements serving that
    side, which is the supremum over phase vectors; arbitrary phases yield
    ``split * |sum_m exp(j phi_m)|**2 * hop1 * hop2``.
    """
    for name, g in (("hop1_gain", hop1_gain), ("hop2_gain", hop2_gain)):
        if not 0.0 < g <= 1.0:
            raise ValueError(f"{name} must lie in (0, 1], got {g}")
    if side == "reflect":
        split = profile.alpha
        phases = profile.reflect_phases
    elif side == "refract":
        if profile.mode is not SurfaceMode.RR:
            raise ModeMismatchError("refract side requested on a profile that does not refract")
        split = profile.beta
        phases = profile.refract_phases
    else:
        raise ValueError(f"side must be 'reflect' or 'refract', got {side!r}")
    coherent = abs(np.exp(1j * phases).sum()) ** 2
    return split * coherent * hop1_gain * hop2_gain * profile.element_efficiency**2


def split_power(profile: RicsProfile) -> tuple[float, float]:
    """The (alpha, beta) power split; always sums to one."""
    return profile.alpha, profile.beta
