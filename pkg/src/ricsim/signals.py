"""Sampled complex-baseband signals and the wave-domain operator bank.

The intelligence computation layer in analog-computing mode is modeled
behaviorally: each operator is a linear map on the sampled waveform,
implemented in the Fourier domain.  Only input/output behavior is claimed,
so the metasurface (Fourier-plane) and Green's-function (spatial) physical
realizations collapse to the same code path.

Conventions worth knowing before use:

* ``convolve`` is circular, for exact Fourier duality; zero-pad the signal
  first if linear convolution is wanted.
* ``integrate`` maps the zero-frequency bin to 0, so the DC content of the
  input is annihilated; ``integrate(differentiate(x))`` returns ``x`` minus
  its mean.
* Signals interchange through a little-endian binary file: an unsigned
  8-byte sample count, two 8-byte IEEE-754 doubles (sample_rate,
  center_freq), then interleaved 8-byte real/imaginary pairs.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SignalDomainError, UnsupportedOperatorError

__all__ = [
    "ComplexSignal",
    "OperatorSpec",
    "OPERATOR_KINDS",
    "differentiate",
    "integrate",
    "convolve",
    "frequency_shift",
    "apply_operator",
    "read_signal",
    "write_signal",
]

OPERATOR_KINDS = ("differentiate", "integrate", "convolve", "frequency_shift")

_HEADER = struct.Struct("<Qdd")


@dataclass(frozen=True)
class ComplexSignal:
    """Uniformly sampled complex-baseband sequence."""

    samples: np.ndarray
    sample_rate: float
    center_freq: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.complex128).copy()
        if arr.ndim != 1 or arr.size == 0:
            raise SignalDomainError("signal must be a non-empty 1-D sample sequence")
        if not np.all(np.isfinite(arr.view(float))):
            raise SignalDomainError("signal samples must be finite")
        if self.sample_rate <= 0:
            raise SignalDomainError("sample rate must be positive")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def power(self) -> float:
        """Mean sample power |s|^2."""
        return float(np.mean(np.abs(self.samples) ** 2))

    def replace_samples(self, samples: np.ndarray) -> "ComplexSignal":
        return ComplexSignal(samples, self.sample_rate, self.center_freq)


@dataclass(frozen=True)
class OperatorSpec:
    """Configured operator of the analog-computing bank."""

    kind: str
    kernel: np.ndarray | None = None
    shift_hz: float = 0.0

    def __post_init__(self):
        if self.kind == "convolve":
            if self.kernel is None or np.asarray(self.kernel).size == 0:
                raise SignalDomainError("convolve requires a non-empty kernel")
            k = np.asarray(self.kernel, dtype=np.complex128).copy()
            k.setflags(write=False)
            object.__setattr__(self, "kernel", k)


def _spectral_freqs(sig: ComplexSignal) -> np.ndarray:
    return np.fft.fftfreq(len(sig), d=1.0 / sig.sample_rate)


def differentiate(sig: ComplexSignal) -> ComplexSignal:
    """Time derivative via multiplication by j*2*pi*f in the Fourier domain."""
    spec = np.fft.fft(sig.samples) * (2j * np.pi * _spectral_freqs(sig))
    return sig.replace_samples(np.fft.ifft(spec))


def integrate(sig: ComplexSignal) -> ComplexSignal:
    """Antiderivative via division by j*2*pi*f; the DC bin maps to zero."""
    freqs = _spectral_freqs(sig)
    spec = np.fft.fft(sig.samples)
    out = np.zeros_like(spec)
    nz = freqs != 0.0
    out[nz] = spec[nz] / (2j * np.pi * freqs[nz])
    return sig.replace_samples(np.fft.ifft(out))


def convolve(sig: ComplexSignal, kernel) -> ComplexSignal:
    """Circular convolution with ``kernel`` (zero-padded to the signal length)."""
    k = np.asarray(kernel, dtype=np.complex128).ravel()
    if k.size == 0:
        raise SignalDomainError("convolution kernel must be non-empty")
    if k.size > len(sig):
        raise SignalDomainError(f"kernel ({k.size} taps) longer than the signal ({len(sig)} samples)")
    padded = np.zeros(len(sig), dtype=np.complex128)
    padded[: k.size] = k
    out = np.fft.ifft(np.fft.fft(sig.samples) * np.fft.fft(padded))
    return sig.replace_samples(out)


def frequency_shift(sig: ComplexSignal, shift_hz: float) -> ComplexSignal:
    """Multiply by a unit-modulus complex exponential, relocating the spectrum.

    Total power is preserved exactly; the shift must stay inside Nyquist.
    """
    if abs(shift_hz) >= sig.sample_rate / 2.0:
        raise SignalDomainError(
            f"shift of {shift_hz} Hz exceeds Nyquist for sample rate {sig.sample_rate} Hz"
        )
    t = np.arange(len(sig)) / sig.sample_rate
    return sig.replace_samples(sig.samples * np.exp(2j * np.pi * shift_hz * t))


def apply_operator(spec: OperatorSpec, sig: ComplexSignal) -> ComplexSignal:
    """Dispatch ``sig`` through the operator configured by ``spec``."""
    if spec.kind == "differentiate":
        return differentiate(sig)
    if spec.kind == "integrate":
        return integrate(sig)
    if spec.kind == "convolve":
        return convolve(sig, spec.kernel)
    if spec.kind == "frequency_shift":
        return frequency_shift(sig, spec.shift_hz)
    raise UnsupportedOperatorError(f"unknown operator kind {spec.kind!r}")


def write_signal(sig: ComplexSignal, path) -> None:
    """Write the binary interchange format (see module docstring)."""
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(_HEADER.pack(len(sig), sig.sample_rate, sig.center_freq))
        fh.write(np.ascontiguousarray(sig.samples, dtype="<c16").tobytes())


def read_signal(path) -> ComplexSignal:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise SignalDomainError(f"{path}: truncated signal file")
    count, rate, center = _HEADER.unpack_from(raw)
    expected = _HEADER.size + 16 * count
    if len(raw) != expected:
        raise SignalDomainError(f"{path}: expected {expected} bytes for {count} samples, found {len(raw)}")
    samples = np.frombuffer(raw, dtype="<c16", count=count, offset=_HEADER.size)
    return ComplexSignal(samples, rate, center)
