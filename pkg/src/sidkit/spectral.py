"""Vocal-tract features: filterbank cepstra (mel or linear) and LP cepstra.

MFCC and LFCC share one path: power spectrum, triangular filterbank,
log energies, type-II DCT with the dc coefficient discarded.  LPCC comes
from the cepstral recursion on the all-pole model coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dct

from .errors import DegenerateFrame, NoUsableFrames
from .frontend import FrameSequence
from .lpc import LpCoefficients, compute_lp

# Filterbank outputs below this value are clamped before the log.
LOG_ENERGY_FLOOR = 1e-10


def mel_from_hz(freq):
    """Perceptual mel scale: 2595 log10(1 + f/700)."""
    return 2595.0 * np.log10(1.0 + np.asarray(freq, dtype=np.float64) / 700.0)


def hz_from_mel(mels):
    return 700.0 * (10.0 ** (np.asarray(mels, dtype=np.float64) / 2595.0) - 1.0)


@dataclass(frozen=True)
class FilterBank:
    """Triangular filters sampled at FFT bin frequencies, unit peak."""

    weights: np.ndarray
    scale: str
    fft_size: int
    sample_rate: int

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", weights)
        if weights.ndim != 2 or weights.shape[1] != self.fft_size // 2 + 1:
            raise ValueError("weights shape must be (num_filters, fft_size // 2 + 1)")

    @property
    def num_filters(self) -> int:
        return self.weights.shape[0]


def make_filterbank(
    num_filters: int = 20,
    fft_size: int = 256,
    sample_rate: int = 8000,
    scale: str = "mel",
) -> FilterBank:
    """Build a peak-normalized triangular filterbank over [0, sample_rate/2].

    Filter edges are equally spaced on the chosen scale; each filter's upper
    edge is the next filter's center.  Weights are the continuous unit-peak
    triangles evaluated at the FFT bin frequencies.
    """
    if scale not in ("mel", "linear"):
        raise ValueError(f"scale must be 'mel' or 'linear', got {scale!r}")
    nyquist = sample_rate / 2.0
    if scale == "mel":
        edges = hz_from_mel(np.linspace(0.0, mel_from_hz(nyquist), num_filters + 2))
    else:
        edges = np.linspace(0.0, nyquist, num_filters + 2)
    bin_freqs = np.arange(fft_size // 2 + 1) * (sample_rate / fft_size)
    weights = np.zeros((num_filters, bin_freqs.size))
    for j in range(num_filters):
        lo, center, hi = edges[j], edges[j + 1], edges[j + 2]
        rising = (bin_freqs - lo) / (center - lo)
        falling = (hi - bin_freqs) / (hi - center)
        weights[j] = np.clip(np.minimum(rising, falling), 0.0, 1.0)
    return FilterBank(weights=weights, scale=scale, fft_size=fft_size, sample_rate=sample_rate)


def power_spectrum(frame: np.ndarray, fft_size: int = 256) -> np.ndarray:
    """Magnitude-squared spectrum over fft_size/2 + 1 bins, zero-padded."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.size > fft_size:
        raise ValueError(f"frame length {frame.size} exceeds fft size {fft_size}")
    spectrum = np.fft.rfft(frame, n=fft_size)
    return (spectrum.real**2 + spectrum.imag**2).astype(np.float64)


def filterbank_energies(spectrum: np.ndarray, bank: FilterBank) -> np.ndarray:
    """Log filterbank outputs, floored at LOG_ENERGY_FLOOR before the log."""
    spectrum = np.asarray(spectrum, dtype=np.float64)
    if spectrum.size != bank.fft_size // 2 + 1:
        raise ValueError("spectrum length does not match the filterbank fft size")
    raw = bank.weights @ spectrum
    return np.log(np.maximum(raw, LOG_ENERGY_FLOOR))


def cepstra_from_energies(energies: np.ndarray, num_cepstra: int = 19) -> np.ndarray:
    """Orthonormal type-II DCT of the log energies, dc coefficient dropped."""
    energies = np.asarray(energies, dtype=np.float64)
    if num_cepstra >= energies.size:
        raise ValueError("num_cepstra must be below the number of filters")
    return dct(energies, type=2, norm="ortho")[1 : num_cepstra + 1]


def lpcc_from_lp(lp: LpCoefficients, num_cepstra: int = 19) -> np.ndarray:
    """Cepstrum of the all-pole model 1/A(z) by the standard recursion.

    c_n = -a_n - (1/n) sum_{k=1..n-1} k c_k a_{n-k}, with a_m = 0 beyond
    the model order.  The gain never enters.
    """
    a = np.zeros(num_cepstra + 1)
    upto = min(lp.order, num_cepstra)
    a[1 : upto + 1] = lp.a[:upto]
    c = np.zeros(num_cepstra + 1)
    for n in range(1, num_cepstra + 1):
        acc = a[n]
        if n > 1:
            k = np.arange(1, n)
            acc += np.dot(k * c[1:n], a[n - 1 : 0 : -1]) / n
        c[n] = -acc
    return c[1:]


def extract_filterbank_cepstra(
    frames: FrameSequence, bank: FilterBank, num_cepstra: int = 19
) -> np.ndarray:
    """Cepstral matrix (num_frames, num_cepstra) for MFCC or LFCC."""
    out = np.empty((len(frames), num_cepstra))
    for t, frame in enumerate(frames.frames):
        energies = filterbank_energies(power_spectrum(frame, bank.fft_size), bank)
        out[t] = cepstra_from_energies(energies, num_cepstra)
    return out


def extract_lpcc(
    frames: FrameSequence, lp_order: int = 19, num_cepstra: int = 19
) -> np.ndarray:
    """LPCC matrix for an utterance; degenerate frames are skipped.

    Raises:
        NoUsableFrames: every frame was degenerate.
    """
    vectors = []
    for frame in frames.frames:
        try:
            vectors.append(lpcc_from_lp(compute_lp(frame, lp_order), num_cepstra))
        except DegenerateFrame:
            continue
    if not vectors:
        raise NoUsableFrames("all frames degenerate for LPCC extraction")
    return np.asarray(vectors)
