"""Sensing-driven TDMA experiment: informed allocation versus a blind RIS.

Each Monte-Carlo frame draws a true occupancy class, obtains an inferred
class for the scheme under test (from a trained classifier, or by sampling
its stored confusion matrix in emulation mode), splits the frame's slots
equally among the users the inference marks active, and delivers Shannon-rate
bits over the user -> surface -> BS cascade, capped by the per-user payload.

The four schemes share the frame's true class and a coupling uniform drawn
from substreams keyed by (seed, n_elements, frame), which makes the scheme
ordering a per-frame property rather than a sampling accident and keeps
results byte-identical for any worker count.

The static baseline models a conventional surface: all N elements reflect
(no semi-active carve-out) but slots are always split three ways.  The
computational schemes reflect with N - n_absorb elements and allocate from
the inference.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import SimulationError
from .geometry import Scenario
from .onn import DiffractiveModel, infer
from .rng import child_seed, substream
from .spectrum import SpectrumClass, capture_iq, gen_class_signal, visualize
from .surface import RicsProfile, coherent_array_gain, configure_ra, configure_rr

__all__ = [
    "SCHEME_STATIC",
    "SCHEME_2LAYER",
    "SCHEME_4LAYER",
    "SCHEME_PERFECT",
    "SCHEME_ORDER",
    "FrameOutcome",
    "ThroughputPoint",
    "allocate_slots",
    "allocate_static",
    "frame_throughput",
    "simulate_frame",
    "run_throughput_experiment",
]

SCHEME_STATIC = "RIS-static"
SCHEME_2LAYER = "RICS-2layer"
SCHEME_4LAYER = "RICS-4layer"
SCHEME_PERFECT = "RICS-perfect"
SCHEME_ORDER = (SCHEME_STATIC, SCHEME_2LAYER, SCHEME_4LAYER, SCHEME_PERFECT)


@dataclass(frozen=True)
class ThroughputPoint:
    scheme: str
    n_elements: int
    mean_throughput_bps: float
    ci95_bps: float


@dataclass(frozen=True)
class FrameOutcome:
    """Record of one inference-driven frame."""

    true_class: SpectrumClass
    inferred_class: SpectrumClass
    allocation: tuple[int, int, int]
    delivered_bits: tuple[float, float, float]

    def __post_init__(self):
        active = self.inferred_class.active_users
        truly = self.true_class.active_users
        for user in range(3):
            if not active[user] and self.allocation[user] != 0:
                raise ValueError("users absent from the inference must receive no slots")
            if not truly[user] and self.delivered_bits[user] != 0.0:
                raise ValueError("inactive users cannot deliver bits")

    @property
    def total_bits(self) -> float:
        return sum(self.delivered_bits)


def simulate_frame(
    true_class: SpectrumClass,
    inferred_class: SpectrumClass,
    scenario: Scenario,
    profile: RicsProfile,
    frame_slots: int,
    slot_duration_s: float,
    payload_bits: float,
    fading_gains: tuple[float, float, float] = (1.0, 1.0, 1.0),
) -> FrameOutcome:
    """One inference-driven frame: allocate on the inference, deliver on the truth."""
    allocation = allocate_slots(inferred_class, frame_slots)
    delivered = []
    for user in range(3):
        solo = [0, 0, 0]
        solo[user] = allocation[user]
        delivered.append(
            frame_throughput(
                true_class, tuple(solo), scenario, profile, slot_duration_s, payload_bits, fading_gains
            )
        )
    return FrameOutcome(true_class, inferred_class, allocation, tuple(delivered))


def allocate_slots(inferred: SpectrumClass, frame_slots: int) -> tuple[int, int, int]:
    """Split the frame equally among users the inference marks active.

    The remainder goes to the lowest-indexed active users; an Idle inference
    allocates nothing.
    """
    if frame_slots < 1:
        raise ValueError("frame needs at least one slot")
    active = [i for i, a in enumerate(inferred.active_users) if a]
    slots = [0, 0, 0]
    if active:
        base, rem = divmod(frame_slots, len(active))
        for rank, idx in enumerate(active):
            slots[idx] = base + (1 if rank < rem else 0)
    return tuple(slots)


def allocate_static(frame_slots: int) -> tuple[int, int, int]:
    """Blind equal thirds, remainder to the lowest index; ignores occupancy."""
    if frame_slots < 1:
        raise ValueError("frame needs at least one slot")
    base, rem = divmod(frame_slots, 3)
    return tuple(base + (1 if i < rem else 0) for i in range(3))


def frame_throughput(
    true_class: SpectrumClass,
    allocation: tuple[int, int, int],
    scenario: Scenario,
    profile: RicsProfile,
    slot_duration_s: float,
    payload_bits: float,
    fading_gains: tuple[float, float, float] = (1.0, 1.0, 1.0),
) -> float:
    """Bits delivered in one frame under the given allocation.

    A truly active user with s > 0 slots delivers
    ``min(payload, s * slot_duration * B * log2(1 + SNR))`` where the SNR
    runs over the reflect-side cascade; inactive or unallocated users
    deliver nothing.  ``fading_gains`` scales each user's SNR for one
    small-scale channel realization (all ones when fading is off).
    """
    if len(allocation) != 3 or any(s < 0 for s in allocation):
        raise ValueError(f"allocation must be three nonnegative slot counts, got {allocation}")
    noise = scenario.noise_w()
    bw = scenario.rf.bandwidth_hz
    delivered = 0.0
    for user, (active, slots) in enumerate(zip(true_class.active_users, allocation)):
        if not active or slots == 0:
            continue
        gain = coherent_array_gain(profile, "reflect", scenario.gain_user_rics(user), scenario.gain_rics_bs())
        snr = scenario.rf.tx_power_w * gain * fading_gains[user] / noise
        delivered += min(payload_bits, slots * slot_duration_s * bw * math.log2(1.0 + snr))
    return delivered


def _reflect_profile(scheme: str, n_elements: int, n_absorb: int) -> RicsProfile:
    if scheme == SCHEME_STATIC:
        return configure_rr(n_elements, 1.0)  # conventional RIS: every element reflects
    return configure_ra(n_elements, n_absorb)


def _delivery_table(
    scheme: str,
    scenario: Scenario,
    n_elements: int,
    n_absorb: int,
    frame_slots: int,
    slot_duration_s: float,
    payload_bits: float,
) -> np.ndarray:
    """delivered[true, inferred] for all 64 class pairs (frames are deterministic)."""
    profile = _reflect_profile(scheme, n_elements, n_absorb)
    table = np.empty((8, 8))
    for true in SpectrumClass:
        for inferred in SpectrumClass:
            if scheme == SCHEME_STATIC:
                alloc = allocate_static(frame_slots)
            else:
                alloc = allocate_slots(inferred, frame_slots)
            table[true, inferred] = frame_throughput(
                true, alloc, scenario, profile, slot_duration_s, payload_bits
            )
    return table


def _sample_inferred(confusion: np.ndarray, true: np.ndarray, match_u: np.ndarray, err_u: np.ndarray) -> np.ndarray:
    """Inferred classes given per-frame truths and coupling/error uniforms.

    A frame is classified correctly when its shared uniform falls below the
    scheme's diagonal entry for the true class; otherwise the wrong class is
    drawn from the renormalized off-diagonal row.
    """
    inferred = true.copy()
    diag = np.diag(confusion)
    for cls in range(8):
        wrong = (true == cls) & (match_u >= diag[cls])
        if not wrong.any():
            continue
        row = confusion[cls].copy()
        row[cls] = 0.0
        total = row.sum()
        if total <= 0:
            continue  # a perfect row cannot produce errors
        cdf = np.cumsum(row / total)
        inferred[wrong] = np.searchsorted(cdf, err_u[wrong], side="right").clip(0, 7)
    return inferred


def _model_inferred(
    model: DiffractiveModel,
    true: np.ndarray,
    scenario: Scenario,
    n_absorb: int,
    n_samples: int,
    seed: int,
    n_elements: int,
) -> np.ndarray:
    """Run the actual classifier on a fresh capture for every frame."""
    profile = configure_ra(n_elements, n_absorb)
    inferred = np.empty_like(true)
    for i, cls in enumerate(true):
        ex_seed = child_seed(seed, "frame-signal", n_elements, i)
        sig, _ = gen_class_signal(
            SpectrumClass(int(cls)),
            scenario.rf.tx_power_w,
            n_samples,
            ex_seed,
            sample_rate=scenario.rf.bandwidth_hz,
            noise_power_w=scenario.noise_w(),
        )
        image = visualize(capture_iq(sig, profile, scenario, ex_seed))
        inferred[i] = int(infer(model, image))
    return inferred


def run_throughput_experiment(
    scenario: Scenario,
    n_grid: list[int],
    frames: int,
    frame_slots: int,
    slot_duration_s: float,
    payload_bits: float,
    n_absorb: int,
    seed: int,
    confusions: dict[str, np.ndarray] | None = None,
    models: dict[str, DiffractiveModel] | None = None,
    n_samples: int = 1024,
    workers: int = 1,
) -> list[ThroughputPoint]:
    """Mean network throughput versus element count, one series per scheme.

    Exactly one of ``confusions`` (emulation mode) or ``models`` (classifier
    mode) supplies the 2-layer and 4-layer schemes, keyed by scheme name.
    The static and perfect schemes need neither.
    """
    if frames < 1:
        raise ValueError("need at least one frame per point")
    if not n_grid:
        raise SimulationError("element grid is empty")
    if (confusions is None) == (models is None):
        raise SimulationError("provide exactly one of confusions (emulation) or models")
    source = confusions if confusions is not None else models
    for name in (SCHEME_2LAYER, SCHEME_4LAYER):
        if name not in source:
            raise SimulationError(f"missing classifier for scheme {name!r}")

    frame_time = frame_slots * slot_duration_s

    def point(scheme: str, n_elements: int) -> ThroughputPoint:
        true = substream(seed, "frame-class", n_elements).integers(0, 8, size=frames)
        if scheme in (SCHEME_STATIC, SCHEME_PERFECT):
            inferred = true  # static ignores inference entirely
        elif confusions is not None:
            match_u = substream(seed, "frame-match", n_elements).random(frames)
            err_u = substream(seed, "frame-error", scheme, n_elements).random(frames)
            inferred = _sample_inferred(confusions[scheme], true, match_u, err_u)
        else:
            inferred = _model_inferred(
                models[scheme], true, scenario, n_absorb, n_samples, seed, n_elements
            )
        if scenario.rf.fading:
            # one channel realization per frame and user, shared across schemes
            fades = substream(seed, "frame-fading", n_elements).exponential(1.0, size=(frames, 3))
            profile = _reflect_profile(scheme, n_elements, n_absorb)
            bits = np.array(
                [
                    frame_throughput(
                        SpectrumClass(int(t)),
                        allocate_static(frame_slots)
                        if scheme == SCHEME_STATIC
                        else allocate_slots(SpectrumClass(int(j)), frame_slots),
                        scenario,
                        profile,
                        slot_duration_s,
                        payload_bits,
                        fading_gains=tuple(fades[i]),
                    )
                    for i, (t, j) in enumerate(zip(true, inferred))
                ]
            )
        else:
            table = _delivery_table(
                scheme, scenario, n_elements, n_absorb, frame_slots, slot_duration_s, payload_bits
            )
            bits = table[true, inferred]
        mean_bits = math.fsum(bits) / frames
        var = math.fsum((b - mean_bits) ** 2 for b in bits) / max(frames - 1, 1)
        ci95 = 1.96 * math.sqrt(var / frames)
        return ThroughputPoint(scheme, n_elements, mean_bits / frame_time, ci95 / frame_time)

    jobs = [(scheme, n) for scheme in SCHEME_ORDER for n in sorted(n_grid)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda sn: point(*sn), jobs))
    else:
        results = [point(*sn) for sn in jobs]
    return results
