"""Frame preprocessing: per-pixel channel mixing with a residual skip, then
uniform color quantization.

The convolution is a single layer of three 1x1 filters, so it acts
independently on every pixel as a 3x3 matrix applied to the RGB vector.
Adding the input back means all-zero weights reproduce the input exactly,
which keeps the downstream segmentation meaningful before any learning has
happened.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MalformedInputError

CHANNELS = 3

# 3 output filters x 3 input channels (1x1 spatial) + 3 biases.
CONV_PARAM_COUNT = 12


@dataclass(frozen=True)
class ConvParams:
    """Parameters of the 1x1 channel-mixing convolution."""

    weights: np.ndarray  # (3, 3), rows are output filters
    biases: np.ndarray  # (3,)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        b = np.asarray(self.biases, dtype=np.float64)
        if w.shape != (CHANNELS, CHANNELS) or b.shape != (CHANNELS,):
            raise MalformedInputError(
                f"conv params must be (3,3) weights and (3,) biases, "
                f"got {w.shape} and {b.shape}"
            )
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)

    @classmethod
    def zeros(cls) -> "ConvParams":
        return cls(np.zeros((CHANNELS, CHANNELS)), np.zeros(CHANNELS))


@dataclass(frozen=True)
class QuantizedImage:
    """Per-pixel color-bin indices after uniform quantization.

    Bin packing is R-major: index = level_R * 4^bits + level_G * 2^bits + level_B.
    """

    bins: np.ndarray  # (H, W) int32
    bits: int

    @property
    def height(self) -> int:
        return self.bins.shape[0]

    @property
    def width(self) -> int:
        return self.bins.shape[1]

    @property
    def n_bins(self) -> int:
        return 1 << (3 * self.bits)


def validate_frame(frame: np.ndarray) -> np.ndarray:
    """Check that `frame` is a finite (H, W, 3) image with channels in [0, 1]."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 3 or frame.shape[2] != CHANNELS:
        raise MalformedInputError(f"frame must be (H, W, 3), got {frame.shape}")
    if not np.isfinite(frame).all():
        raise MalformedInputError("frame contains non-finite values")
    if frame.min() < 0.0 or frame.max() > 1.0:
        raise MalformedInputError("frame channels must lie in [0, 1]")
    return frame


def conv1x1_residual(frame: np.ndarray, params: ConvParams) -> np.ndarray:
    """Apply the 1x1 convolution and add the input back.

    out[p] = W @ frame[p] + b + frame[p] for every pixel p. The output has
    the same shape as the input but is not range-limited.
    """
    frame = validate_frame(frame)
    if not (np.isfinite(params.weights).all() and np.isfinite(params.biases).all()):
        raise MalformedInputError("conv parameters contain non-finite values")
    return frame @ params.weights.T + params.biases + frame


def quantize(image: np.ndarray, bits: int) -> QuantizedImage:
    """Uniformly quantize each channel to `bits` bits and pack into bin indices.

    Channels are clamped to [0, 1] first; level = min(floor(c * 2^bits),
    2^bits - 1), so the top level absorbs c = 1.0.
    """
    if not (1 <= bits <= 8):
        raise MalformedInputError(f"bits must be in [1, 8], got {bits}")
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3 or image.shape[2] != CHANNELS:
        raise MalformedInputError(f"image must be (H, W, 3), got {image.shape}")
    n_levels = 1 << bits
    clamped = np.clip(image, 0.0, 1.0)
    levels = np.minimum((clamped * n_levels).astype(np.int32), n_levels - 1)
    bins = (levels[..., 0] << (2 * bits)) | (levels[..., 1] << bits) | levels[..., 2]
    return QuantizedImage(bins=bins.astype(np.int32), bits=bits)


def preprocess(frame: np.ndarray, params: ConvParams, bits: int) -> QuantizedImage:
    """conv1x1_residual followed by quantize."""
    return quantize(conv1x1_residual(frame, params), bits)


def bin_levels(bins: np.ndarray | int, bits: int) -> np.ndarray:
    """Unpack bin indices into per-channel quantization levels, shape (..., 3)."""
    bins = np.asarray(bins)
    mask = (1 << bits) - 1
    return np.stack(
        [(bins >> (2 * bits)) & mask, (bins >> bits) & mask, bins & mask], axis=-1
    )


def bin_palette(bits: int) -> np.ndarray:
    """Display palette: one saturated RGB color per bin, shape (2^(3*bits), 3) uint8."""
    n_bins = 1 << (3 * bits)
    levels = bin_levels(np.arange(n_bins), bits)
    max_level = (1 << bits) - 1
    return np.round(levels * (255.0 / max_level)).astype(np.uint8)
