"""Graph Fourier transform, 1-D DCT and uniform scalar quantization.

All transforms are orthonormal so one quantizer step means the same thing
for GFT and DCT coefficients.  Rounding is half-away-from-zero.
"""

from dataclasses import dataclass

import numpy as np
from scipy.fft import dct as _scipy_dct, idct as _scipy_idct

from .util import round_half_away


@dataclass
class CoefficientVector:
    coeffs: np.ndarray
    basis_dim: int


@dataclass
class QuantizedVector:
    levels: np.ndarray
    step: float


def gft(basis, f) -> CoefficientVector:
    """Forward transform: project a graph signal onto the eigenbasis."""
    f = np.asarray(f, dtype=np.float64)
    n = basis.vectors.shape[0]
    if f.shape != (n,):
        raise ValueError(f"signal length {f.shape} does not match basis dim {n}")
    return CoefficientVector(coeffs=basis.vectors.T @ f, basis_dim=n)


def igft(basis, c: CoefficientVector) -> np.ndarray:
    """Inverse transform: synthesize a signal from coefficients."""
    coeffs = np.asarray(c.coeffs, dtype=np.float64)
    n = basis.vectors.shape[0]
    if coeffs.shape != (n,):
        raise ValueError(f"coefficient length {coeffs.shape} does not match basis dim {n}")
    return basis.vectors @ coeffs


def dct1d(x) -> np.ndarray:
    """Orthonormal DCT-II of a 1-D vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("dct1d expects a non-empty 1-D vector")
    return _scipy_dct(x, type=2, norm="ortho")


def idct1d(x) -> np.ndarray:
    """Orthonormal DCT-III (inverse of :func:`dct1d`)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("idct1d expects a non-empty 1-D vector")
    return _scipy_idct(x, type=2, norm="ortho")


def quantize(x, q) -> QuantizedVector:
    """Uniform scalar quantization, levels = round-half-away(x / q)."""
    if q <= 0:
        raise ValueError("quantizer step must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    levels = (np.sign(x) * np.floor(np.abs(x) / q + 0.5)).astype(np.int64)
    return QuantizedVector(levels=levels, step=float(q))


def dequantize(qv: QuantizedVector) -> np.ndarray:
    return qv.levels.astype(np.float64) * qv.step


def predict_signal(basis, coeffs, sample_max):
    """Round-and-clamp inverse transform used on both codec sides."""
    raw = basis.vectors @ np.asarray(coeffs, dtype=np.float64)
    return np.clip(round_half_away(raw), 0, sample_max).astype(np.int64)
