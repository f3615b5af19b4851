"""Trainable diffractive classifier: phase masks, unitary propagation, detectors.

The network alternates a fixed unitary propagation step (the orthonormal 2-D
DFT, a degenerate angular-spectrum propagator) with elementwise phase-only
masks, one mask per layer, followed by a final propagation onto the detector
plane.  Class scores are the total intensity landing in eight disjoint
detector regions; training adjusts only the mask phases.

Because every step is unitary or unit-modulus, the total output-plane
intensity equals the input energy exactly, and the loss gradient with
respect to each phase has the closed form

    dL/dphi = 2 * Im( G * conj(E) )

where E is the field just after the mask and G is the conjugate adjoint
field backpropagated through the remaining layers.  Gradients are summed
over the batch; no autodiff framework is involved.

The softmax temperature is the mean detector score of the batch, which makes
training invariant to the quadratic intensity scale; the temperature term is
part of the differentiated graph.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import SignalDomainError, TrainingDivergedError
from .rng import substream
from .spectrum import Dataset, SpectrumClass, SpectrumImage

__all__ = [
    "DiffractiveModel",
    "N_CLASSES",
    "detector_regions",
    "init_model",
    "forward",
    "infer",
    "evaluate",
    "train",
    "save_model",
    "load_model",
    "save_confusion",
    "load_confusion",
]

N_CLASSES = 8
REGION_LAYOUT = "2x4-centered"


def detector_regions(grid: int, layout: str = REGION_LAYOUT) -> np.ndarray:
    """(8, grid*grid) 0/1 matrix of the detector regions.

    Layout "2x4-centered": two rows by four columns of square blocks,
    vertically centered, together covering half of the output plane.
    Requires the grid size to be a multiple of 4.
    """
    if layout != REGION_LAYOUT:
        raise ValueError(f"unknown region layout {layout!r}")
    if grid % 4 != 0:
        raise ValueError(f"grid size must be a multiple of 4, got {grid}")
    block = grid // 4
    top = grid // 4
    mat = np.zeros((N_CLASSES, grid, grid))
    for k in range(N_CLASSES):
        r0 = top + block * (k // 4)
        c0 = block * (k % 4)
        mat[k, r0 : r0 + block, c0 : c0 + block] = 1.0
    return mat.reshape(N_CLASSES, grid * grid)


@dataclass(frozen=True)
class DiffractiveModel:
    """Per-layer phase masks over a square grid plus the detector layout."""

    masks: np.ndarray  # (n_layers, grid, grid) radians
    region_layout: str = REGION_LAYOUT

    def __post_init__(self):
        m = np.asarray(self.masks, dtype=float).copy()
        if m.ndim != 3 or m.shape[1] != m.shape[2]:
            raise SignalDomainError(f"masks must be (layers, grid, grid), got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "masks", m)

    @property
    def n_layers(self) -> int:
        return self.masks.shape[0]

    @property
    def grid(self) -> int:
        return self.masks.shape[1]

    def regions(self) -> np.ndarray:
        return detector_regions(self.grid, self.region_layout)


def init_model(n_layers: int, seed: int, grid: int = 16) -> DiffractiveModel:
    """Fresh model with phases uniform on [0, 2*pi)."""
    if n_layers < 1:
        raise SignalDomainError(f"need at least one layer, got {n_layers}")
    masks = substream(seed, "onn-init").uniform(0.0, 2.0 * np.pi, size=(n_layers, grid, grid))
    return DiffractiveModel(masks=masks)


def _fft2(x: np.ndarray) -> np.ndarray:
    return np.fft.fft2(x, axes=(-2, -1), norm="ortho")


def _ifft2(x: np.ndarray) -> np.ndarray:
    return np.fft.ifft2(x, axes=(-2, -1), norm="ortho")


def _forward_batch(masks: np.ndarray, images: np.ndarray, keep_fields: bool = False):
    """Propagate a (B, grid, grid) image batch; optionally keep post-mask fields."""
    field = images.astype(np.complex128)
    stored = []
    for phi in masks:
        field = _fft2(field) * np.exp(1j * phi)
        if keep_fields:
            stored.append(field)
    out = _fft2(field)
    return out, stored


def _scores_from_output(out: np.ndarray, regions: np.ndarray) -> np.ndarray:
    intensity = (out.real**2 + out.imag**2).reshape(out.shape[0], -1)
    return intensity @ regions.T


def _as_grid(image) -> np.ndarray:
    grid = image.grid if isinstance(image, SpectrumImage) else np.asarray(image, dtype=float)
    return grid


def forward(model: DiffractiveModel, image) -> np.ndarray:
    """Score vector: intensity collected by each of the eight detector regions."""
    grid = _as_grid(image)
    if grid.shape != (model.grid, model.grid):
        raise SignalDomainError(f"image shape {grid.shape} does not match model grid {model.grid}")
    out, _ = _forward_batch(model.masks, grid[None])
    return _scores_from_output(out, model.regions())[0]


def infer(model: DiffractiveModel, image) -> SpectrumClass:
    """Argmax of the forward scores; ties resolve to the lowest class index."""
    return SpectrumClass(int(np.argmax(forward(model, image))))


def evaluate(model: DiffractiveModel, dataset: Dataset) -> tuple[float, np.ndarray]:
    """Accuracy and the 8x8 row-normalized confusion matrix on ``dataset``."""
    if len(dataset) == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    regions = model.regions()
    preds = np.empty(len(dataset), dtype=int)
    for start in range(0, len(dataset), 512):
        chunk = dataset.images[start : start + 512]
        out, _ = _forward_batch(model.masks, chunk)
        preds[start : start + len(chunk)] = np.argmax(_scores_from_output(out, regions), axis=1)
    confusion = np.zeros((N_CLASSES, N_CLASSES))
    for true, pred in zip(dataset.labels, preds):
        confusion[true, pred] += 1
    counts = confusion.sum(axis=1, keepdims=True)
    confusion = np.divide(confusion, counts, out=np.zeros_like(confusion), where=counts > 0)
    accuracy = float(np.mean(preds == dataset.labels))
    return accuracy, confusion


def _loss_and_grads(masks: np.ndarray, images: np.ndarray, labels: np.ndarray, regions: np.ndarray):
    """Cross-entropy of temperature-scaled detector scores and its phase gradients."""
    out, stored = _forward_batch(masks, images, keep_fields=True)
    scores = _scores_from_output(out, regions)
    batch, n_det = scores.shape

    temp = float(scores.mean())
    temp_fixed = temp <= 0.0
    if temp_fixed:
        temp = 1.0
    z = scores / temp
    z_shift = z - z.max(axis=1, keepdims=True)
    expz = np.exp(z_shift)
    probs = expz / expz.sum(axis=1, keepdims=True)
    loss = float(-np.mean(np.log(probs[np.arange(batch), labels] + 1e-300)))

    g = probs.copy()
    g[np.arange(batch), labels] -= 1.0
    g /= batch
    # d loss / d scores, including the chain through the batch temperature.
    ds = g / temp
    if not temp_fixed:
        ds -= np.sum(g * scores) / (temp * temp * scores.size)

    w = (ds @ regions).reshape(out.shape)  # per-pixel d loss / d intensity
    adj = _ifft2(w * out)  # conjugate adjoint field entering the last mask plane
    grads = np.empty_like(masks)
    for layer in range(masks.shape[0] - 1, -1, -1):
        field = stored[layer]
        grads[layer] = 2.0 * np.imag(adj * np.conj(field)).sum(axis=0)
        adj = _ifft2(adj * np.exp(-1j * masks[layer]))
    return loss, grads


def train(
    model: DiffractiveModel,
    dataset: Dataset,
    epochs: int = 60,
    learning_rate: float = 0.05,
    batch_size: int = 32,
    seed: int = 0,
    lr_decay_every: int = 20,
    lr_decay_factor: float = 0.5,
) -> tuple[DiffractiveModel, list[float]]:
    """Plain SGD on the mask phases; returns the trained model and epoch losses.

    Examples are visited in one fixed shuffled order (drawn from the seed) on
    every epoch, so a zero learning rate reproduces the same mean loss each
    epoch.  The step decays by ``lr_decay_factor`` every ``lr_decay_every``
    epochs.  A non-finite batch loss aborts with the epoch index.
    """
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    if learning_rate < 0:
        raise ValueError("learning rate must be nonnegative")
    regions = model.regions()
    masks = model.masks.copy()
    order = substream(seed, "onn-shuffle").permutation(len(dataset))
    images = dataset.images[order]
    labels = dataset.labels[order]

    history: list[float] = []
    lr = learning_rate
    for epoch in range(epochs):
        if epoch > 0 and lr_decay_every > 0 and epoch % lr_decay_every == 0:
            lr *= lr_decay_factor
        total = 0.0
        for start in range(0, len(dataset), batch_size):
            stop = min(start + batch_size, len(dataset))
            loss, grads = _loss_and_grads(masks, images[start:stop], labels[start:stop], regions)
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch)
            if learning_rate > 0:
                masks -= lr * grads
            total += loss * (stop - start)
        history.append(total / len(dataset))
    return replace(model, masks=masks), history


# -- checkpoint files --------------------------------------------------------

_CKPT_MAGIC = "ricsim-onn v1"


def save_model(model: DiffractiveModel, path) -> None:
    """Text header plus flat little-endian float64 phase data."""
    path = Path(path)
    header = f"{_CKPT_MAGIC} layers={model.n_layers} grid={model.grid} regions={model.region_layout}\n"
    with path.open("wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(model.masks, dtype="<f8").tobytes())


def load_model(path) -> DiffractiveModel:
    path = Path(path)
    raw = path.read_bytes()
    nl = raw.index(b"\n")
    header = raw[:nl].decode("ascii")
    m = re.fullmatch(rf"{re.escape(_CKPT_MAGIC)} layers=(\d+) grid=(\d+) regions=(\S+)", header)
    if not m:
        raise SignalDomainError(f"{path}: not a model checkpoint (header {header!r})")
    layers, grid, layout = int(m.group(1)), int(m.group(2)), m.group(3)
    masks = np.frombuffer(raw, dtype="<f8", offset=nl + 1)
    if masks.size != layers * grid * grid:
        raise SignalDomainError(f"{path}: phase payload does not match header")
    return DiffractiveModel(masks=masks.reshape(layers, grid, grid), region_layout=layout)


def confusion_sidecar_path(ckpt_path) -> Path:
    return Path(str(ckpt_path) + ".confusion.csv")


def save_confusion(ckpt_path, accuracy: float, confusion: np.ndarray) -> Path:
    out = confusion_sidecar_path(ckpt_path)
    lines = [f"# accuracy={accuracy!r}"]
    for row in confusion:
        lines.append(",".join(repr(float(v)) for v in row))
    out.write_text("\n".join(lines) + "\n")
    return out


def load_confusion(ckpt_path) -> tuple[float, np.ndarray]:
    path = confusion_sidecar_path(ckpt_path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    accuracy = float(lines[0].split("=", 1)[1])
    confusion = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    if confusion.shape != (N_CLASSES, N_CLASSES):
        raise SignalDomainError(f"{path}: confusion matrix must be 8x8, got {confusion.shape}")
    return accuracy, confusion
