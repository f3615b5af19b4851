"""Synthetic multi-user traffic, semi-active I/Q capture, and image mapping.

Three users occupy distinct subbands of the shared channel (user 1 at
-3 MHz, user 2 at 0, user 3 at +3 MHz by default), each transmitting QPSK
with rectangular pulses.  The eight occupancy classes enumerate every
active-user combination.  A capture models the semi-active element chain:
user->surface path loss, coherent combining over the absorbing elements, and
per-element thermal noise.  Captures become 16x16 spectrogram images (time
segments by frequency bins, peak-normalized) for the classifier.

Every stochastic step draws from a named substream of a master seed, so
datasets are reproducible for any generation order or worker count.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ModeMismatchError, SignalDomainError
from .geometry import Scenario
from .rng import child_seed, substream
from .signals import ComplexSignal, read_signal, write_signal
from .surface import RicsProfile, SurfaceMode

__all__ = [
    "SpectrumClass",
    "SpectrumImage",
    "Dataset",
    "SUBBAND_OFFSETS_HZ",
    "gen_class_signal",
    "capture_iq",
    "visualize",
    "generate_example",
    "generate_captures",
    "make_dataset",
    "save_dataset",
    "load_dataset",
    "nearest_centroid_accuracy",
]

SUBBAND_OFFSETS_HZ = (-3e6, 0.0, 3e6)
_SAMPLES_PER_SYMBOL = 4
IMAGE_SIZE = 16


class SpectrumClass(enum.IntEnum):
    """Occupancy label over the three users; values index detector regions."""

    IDLE = 0
    U1 = 1
    U2 = 2
    U3 = 3
    U1U2 = 4
    U1U3 = 5
    U2U3 = 6
    U1U2U3 = 7

    @property
    def active_users(self) -> tuple[bool, bool, bool]:
        return _ACTIVITY[self]

    @classmethod
    def from_active_users(cls, bits) -> "SpectrumClass":
        key = tuple(bool(b) for b in bits)
        if len(key) != 3:
            raise ValueError("activity vector must have three entries")
        return _FROM_ACTIVITY[key]


_ACTIVITY = {
    SpectrumClass.IDLE: (False, False, False),
    SpectrumClass.U1: (True, False, False),
    SpectrumClass.U2: (False, True, False),
    SpectrumClass.U3: (False, False, True),
    SpectrumClass.U1U2: (True, True, False),
    SpectrumClass.U1U3: (True, False, True),
    SpectrumClass.U2U3: (False, True, True),
    SpectrumClass.U1U2U3: (True, True, True),
}
_FROM_ACTIVITY = {bits: cls for cls, bits in _ACTIVITY.items()}


@dataclass(frozen=True)
class SpectrumImage:
    """Nonnegative 16x16 grid, peak-normalized to 1 unless all-zero."""

    grid: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float).copy()
        if g.shape != (IMAGE_SIZE, IMAGE_SIZE):
            raise SignalDomainError(f"spectrum image must be {IMAGE_SIZE}x{IMAGE_SIZE}, got {g.shape}")
        if g.min() < 0 or g.max() > 1.0 + 1e-12:
            raise SignalDomainError("spectrum image values must lie in [0, 1]")
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)


def _qpsk_baseband(n_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-power QPSK with rectangular pulses at fs / SAMPLES_PER_SYMBOL baud."""
    n_sym = -(-n_samples // _SAMPLES_PER_SYMBOL)
    symbols = np.exp(1j * (np.pi / 4 + np.pi / 2 * rng.integers(0, 4, n_sym)))
    return np.repeat(symbols, _SAMPLES_PER_SYMBOL)[:n_samples]


def gen_class_signal(
    cls: SpectrumClass,
    per_user_power_w: float,
    n_samples: int,
    seed: int,
    sample_rate: float = 10e6,
    noise_power_w: float = 0.0,
    subband_offsets_hz: tuple[float, float, float] = SUBBAND_OFFSETS_HZ,
) -> tuple[ComplexSignal, SpectrumClass]:
    """Superposed subband QPSK for the active users plus white noise.

    Each user's waveform comes from the substream ``(seed, "user", index)``
    and the noise from ``(seed, "noise")``, so a multi-user class equals the
    sample-wise sum of the corresponding single-user classes generated from
    the same seed.
    """
    if n_samples < 256:
        raise SignalDomainError(f"need at least 256 samples per trace, got {n_samples}")
    if per_user_power_w <= 0:
        raise SignalDomainError("per-user power must be positive")
    t = np.arange(n_samples) / sample_rate
    total = np.zeros(n_samples, dtype=np.complex128)
    for idx, active in enumerate(cls.active_users):
        if not active:
            continue
        base = _qpsk_baseband(n_samples, substream(seed, "user", idx))
        total += math.sqrt(per_user_power_w) * base * np.exp(2j * np.pi * subband_offsets_hz[idx] * t)
    if noise_power_w > 0:
        g = substream(seed, "noise")
        total += math.sqrt(noise_power_w / 2.0) * (
            g.standard_normal(n_samples) + 1j * g.standard_normal(n_samples)
        )
    return ComplexSignal(total, sample_rate), cls


def capture_iq(sig: ComplexSignal, profile: RicsProfile, scenario: Scenario, seed: int) -> ComplexSignal:
    """I/Q capture at the semi-active elements of an RA-mode surface.

    Applies the user->surface path gain, combines the ``n_absorb`` element
    copies coherently (SNR power gain of n_absorb), and adds thermal noise at
    the scenario noise floor.  The combined output is normalized so the noise
    floor stays at one element's noise power.
    """
    if profile.mode is not SurfaceMode.RA:
        raise ModeMismatchError("I/Q capture requires an RA-mode profile")
    gain = np.mean([scenario.gain_user_rics(u) for u in range(len(scenario.users))])
    amp = math.sqrt(profile.n_absorb * gain * profile.element_efficiency)
    noise_w = scenario.noise_w()
    g = substream(seed, "capture-noise")
    noise = math.sqrt(noise_w / 2.0) * (
        g.standard_normal(len(sig)) + 1j * g.standard_normal(len(sig))
    )
    return sig.replace_samples(amp * sig.samples + noise)


def visualize(iq: ComplexSignal) -> SpectrumImage:
    """16x16 spectrogram: time segments by folded Hann-periodogram bins.

    The grid is divided by its maximum, so an all-zero capture produces an
    all-zero image.
    """
    n = len(iq)
    if n < 256:
        raise SignalDomainError(f"visualization needs at least 256 samples, got {n}")
    seg_len = n // IMAGE_SIZE
    window = np.hanning(seg_len)
    segs = iq.samples[: seg_len * IMAGE_SIZE].reshape(IMAGE_SIZE, seg_len)
    spec = np.fft.fftshift(np.fft.fft(segs * window, axis=1), axes=1)
    power = np.abs(spec) ** 2
    # Fold seg_len periodogram bins into IMAGE_SIZE frequency columns.
    targets = (np.arange(seg_len) * IMAGE_SIZE) // seg_len
    grid = np.zeros((IMAGE_SIZE, IMAGE_SIZE))
    np.add.at(grid.T, targets, power.T)
    peak = grid.max()
    if peak > 0:
        grid /= peak
    return SpectrumImage(grid)


@dataclass(frozen=True)
class Dataset:
    """Class-balanced labeled images, stored densely for vectorized training."""

    images: np.ndarray  # (n, 16, 16) float64
    labels: np.ndarray  # (n,) int

    def __post_init__(self):
        if len(self.images) != len(self.labels):
            raise ValueError("images and labels must have matching length")

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        for img, lab in zip(self.images, self.labels):
            yield SpectrumImage(img), SpectrumClass(int(lab))

    def subset(self, idx) -> "Dataset":
        return Dataset(self.images[idx], self.labels[idx])


def generate_example(
    cls: SpectrumClass,
    index: int,
    profile: RicsProfile,
    scenario: Scenario,
    seed: int,
    n_samples: int = 1024,
) -> tuple[ComplexSignal, SpectrumImage]:
    """One capture + image for example ``index`` of ``cls``.

    The example draws end to end from the substream
    ``(seed, "example", cls, index)``, so datasets are independent of
    generation order and parallelism.
    """
    ex_seed = child_seed(seed, "example", int(cls), index)
    sig, _ = gen_class_signal(
        cls,
        scenario.rf.tx_power_w,
        n_samples,
        ex_seed,
        sample_rate=scenario.rf.bandwidth_hz,
        noise_power_w=scenario.noise_w(),
    )
    cap = capture_iq(sig, profile, scenario, ex_seed)
    return cap, visualize(cap)


def generate_captures(
    n_per_class: int,
    profile: RicsProfile,
    scenario: Scenario,
    seed: int,
    n_samples: int = 1024,
    workers: int = 1,
) -> tuple[list[ComplexSignal], np.ndarray, np.ndarray]:
    """Class-balanced captures with images and labels, 8 * n_per_class in total."""
    if n_per_class < 1:
        raise ValueError("n_per_class must be at least 1")
    total = 8 * n_per_class
    captures: list[ComplexSignal | None] = [None] * total
    images = np.empty((total, IMAGE_SIZE, IMAGE_SIZE))
    labels = np.empty(total, dtype=int)

    def build(k: int) -> None:
        i, c = divmod(k, 8)
        cap, img = generate_example(SpectrumClass(c), i, profile, scenario, seed, n_samples)
        captures[k] = cap
        images[k] = img.grid
        labels[k] = c

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(build, range(total)))
    else:
        for k in range(total):
            build(k)
    return captures, labels, images  # captures indexed identically to labels


def make_dataset(
    n_per_class: int,
    profile: RicsProfile,
    scenario: Scenario,
    seed: int,
    n_samples: int = 1024,
    workers: int = 1,
) -> Dataset:
    """Generate ``8 * n_per_class`` labeled images, class-balanced and seeded."""
    _, labels, images = generate_captures(n_per_class, profile, scenario, seed, n_samples, workers)
    return Dataset(images, labels)


def save_dataset(
    directory,
    captures: list[ComplexSignal],
    labels: list[SpectrumClass],
    images: np.ndarray | None = None,
) -> Path:
    """Write captures, the index/label manifest, and the optional image cache."""
    directory = Path(directory)
    (directory / "signals").mkdir(parents=True, exist_ok=True)
    lines = []
    for i, (sig, lab) in enumerate(zip(captures, labels)):
        write_signal(sig, directory / "signals" / f"{i:05d}.sig")
        lines.append(f"{i},{SpectrumClass(lab).name}")
    (directory / "manifest.csv").write_text("\n".join(lines) + "\n")
    if images is not None:
        with (directory / "images.bin").open("wb") as fh:
            fh.write(np.ascontiguousarray(images, dtype="<f8").tobytes())
    return directory


def load_dataset(directory) -> Dataset:
    """Load a dataset directory, preferring the image cache over re-visualizing."""
    directory = Path(directory)
    manifest = directory / "manifest.csv"
    if not manifest.exists():
        raise FileNotFoundError(f"{manifest} not found")
    labels = []
    for line in manifest.read_text().splitlines():
        if not line.strip():
            continue
        _, name = line.split(",")
        labels.append(int(SpectrumClass[name.strip()]))
    labels = np.asarray(labels, dtype=int)
    cache = directory / "images.bin"
    if cache.exists():
        flat = np.frombuffer(cache.read_bytes(), dtype="<f8")
        images = flat.reshape(len(labels), IMAGE_SIZE, IMAGE_SIZE).copy()
    else:
        images = np.stack(
            [visualize(read_signal(directory / "signals" / f"{i:05d}.sig")).grid for i in range(len(labels))]
        )
    return Dataset(images, labels)


def nearest_centroid_accuracy(train: Dataset, test: Dataset) -> float:
    """Accuracy of a nearest-centroid classifier; the separability baseline."""
    centroids = np.stack([train.images[train.labels == c].mean(axis=0) for c in range(8)])
    flat = test.images.reshape(len(test), -1)
    dists = ((flat[:, None, :] - centroids.reshape(8, -1)[None, :, :]) ** 2).sum(axis=2)
    return float(np.mean(np.argmin(dists, axis=1) == test.labels))
