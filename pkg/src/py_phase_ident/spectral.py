"""
Sine-cosine Fourier representation of meter series and its compression.

Coefficients follow

    f(t) = a0/2 + sum_n a_n cos(2 pi n t / P) + b_n sin(2 pi n t / P)

with P = N for hourly data, so evaluating the full sum at t = 0..N-1
reproduces the samples exactly. For even N the Nyquist pair carries
a_{N/2} = Re(c_{N/2}) / N and b_{N/2} = 0.
"""

from datetime import datetime
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import EmptyFeatureError, MaskError, SizeError
from .logging_config import get_logger
from .schemas.series import MeterSeries
from .schemas.spectrum import (
    CompressedSpectrum,
    CompressionMask,
    HarmonicSpectrum,
    MaskKind,
)

logger = get_logger(__name__)

_EPOCH = datetime(1970, 1, 1)


def dft_real(series: MeterSeries) -> HarmonicSpectrum:
    """Real coefficients a0, a_n, b_n for n = 1..floor(N/2)"""
    values = series.values
    n_samples = values.size
    if n_samples < 2:
        raise SizeError(f"need at least 2 samples, got {n_samples}")

    c = np.fft.rfft(values)
    a = 2.0 * c.real[1:] / n_samples
    b = -2.0 * c.imag[1:] / n_samples
    if n_samples % 2 == 0:
        a[-1] = c.real[-1] / n_samples
        b[-1] = 0.0

    return HarmonicSpectrum(
        n_samples=n_samples,
        period_hours=float(n_samples),
        a0=2.0 * c.real[0] / n_samples,
        a=a,
        b=b,
        meter_id=series.meter_id,
        period_id=series.period_id,
        start_time=series.start_time,
    )


def combined_magnitude(spectrum: HarmonicSpectrum) -> np.ndarray:
    """|a_n| + |b_n| for n = 1..floor(N/2); the ranking key for compression"""
    return np.abs(spectrum.a) + np.abs(spectrum.b)


def retained_harmonics(
    spectrum: HarmonicSpectrum, mask: CompressionMask
) -> List[int]:
    """Harmonic indices a mask keeps, ascending; index 0 is never kept"""
    half = spectrum.n_harmonics

    if mask.kind is MaskKind.FIXED:
        bad = [n for n in mask.harmonics if not 1 <= n <= half]
        if bad:
            raise MaskError(f"harmonics {bad} outside 1..{half}")
        return list(mask.harmonics)

    magnitude = combined_magnitude(spectrum)
    if mask.kind is MaskKind.TOP_K:
        if mask.k > half:
            raise MaskError(f"cannot keep {mask.k} of {half} harmonic pairs")
        # stable sort on -magnitude keeps the smaller n first on ties
        order = np.argsort(-magnitude, kind="stable")[: mask.k]
        return sorted(int(i) + 1 for i in order)

    return [int(i) + 1 for i in np.flatnonzero(magnitude > mask.tau)]


def compress(spectrum: HarmonicSpectrum, mask: CompressionMask) -> CompressedSpectrum:
    """Keep the mask's (a_n, b_n) pairs and drop a0"""
    entries = {n: spectrum.pair(n) for n in retained_harmonics(spectrum, mask)}
    return CompressedSpectrum(
        n_samples=spectrum.n_samples,
        period_hours=spectrum.period_hours,
        a0=spectrum.a0,
        entries=entries,
        mask=mask,
        meter_id=spectrum.meter_id,
        period_id=spectrum.period_id,
        start_time=spectrum.start_time,
    )


def _evaluate(
    n_samples: int,
    period_hours: float,
    entries: Dict[int, Tuple[float, float]],
) -> np.ndarray:
    t = np.arange(n_samples, dtype=np.float64)
    out = np.zeros(n_samples)
    if not entries:
        return out
    harmonics = np.fromiter(entries, dtype=np.float64)
    coeffs = np.array(list(entries.values()))
    angles = 2.0 * np.pi * np.outer(harmonics, t) / period_hours
    out += coeffs[:, 0] @ np.cos(angles)
    out += coeffs[:, 1] @ np.sin(angles)
    return out


def reconstruct(compressed: CompressedSpectrum, include_mean: bool = True) -> MeterSeries:
    """Evaluate the truncated series at t = 0..N-1"""
    values = _evaluate(compressed.n_samples, compressed.period_hours, compressed.entries)
    if include_mean:
        values += compressed.a0 / 2.0
    return MeterSeries(
        meter_id=compressed.meter_id or "",
        period_id=compressed.period_id or "",
        start_time=compressed.start_time or _EPOCH,
        values=values,
    )


def compression_error(original: MeterSeries, approx: MeterSeries) -> float:
    """||y - y_hat||_2 / mean(y), the caption formula taken literally"""
    y, y_hat = original.values, approx.values
    if y.size != y_hat.size:
        raise SizeError(f"length mismatch: {y.size} vs {y_hat.size}")
    return float(np.linalg.norm(y - y_hat) / np.mean(y))


def residual_energy(spectrum: HarmonicSpectrum, compressed: CompressedSpectrum) -> float:
    """
    Sum of squared samples the dropped harmonics contribute.

    Equals ||y - y_hat||^2 for a reconstruction that includes the mean.
    """
    n_samples = spectrum.n_samples
    weights = np.full(spectrum.n_harmonics, n_samples / 2.0)
    if n_samples % 2 == 0:
        weights[-1] = float(n_samples)
    dropped = np.ones(spectrum.n_harmonics, dtype=bool)
    dropped[[n - 1 for n in compressed.entries]] = False
    energy = weights * (spectrum.a**2 + spectrum.b**2)
    return float(energy[dropped].sum())


def error_curve(
    series: MeterSeries, sizes: Iterable[int]
) -> List[Tuple[int, float]]:
    """Compression error for top-k masks of each size (pairs kept)"""
    spectrum = dft_real(series)
    curve = []
    for k in sorted(set(sizes)):
        approx = reconstruct(compress(spectrum, CompressionMask.top_k(k)))
        curve.append((k, compression_error(series, approx)))
    return curve


def feature_vector(compressed: CompressedSpectrum) -> np.ndarray:
    """[a_n1, b_n1, a_n2, b_n2, ...] in ascending n"""
    if not compressed.entries:
        raise EmptyFeatureError(
            f"meter {compressed.meter_id}: mask retained no harmonics"
        )
    return np.array([c for pair in compressed.entries.values() for c in pair])


def feature_names(harmonics: Sequence[int]) -> List[str]:
    return [f"{coef}{n}" for n in harmonics for coef in ("a", "b")]


def feature_matrix(
    compressed: Sequence[CompressedSpectrum],
    harmonics: Optional[Sequence[int]] = None,
) -> Tuple[np.ndarray, List[int]]:
    """
    Stack feature vectors over the union of retained harmonics.

    A meter that did not retain a harmonic contributes zeros there, the value
    the mask assigns to it. Returns the matrix and the harmonic columns.
    """
    if harmonics is None:
        harmonics = sorted({n for c in compressed for n in c.entries})
    harmonics = list(harmonics)
    if not harmonics:
        raise EmptyFeatureError("mask retained no harmonics for any meter")

    column = {n: i for i, n in enumerate(harmonics)}
    matrix = np.zeros((len(compressed), 2 * len(harmonics)))
    for row, spectrum in enumerate(compressed):
        for n, (a, b) in spectrum.entries.items():
            matrix[row, 2 * column[n]] = a
            matrix[row, 2 * column[n] + 1] = b
    logger.debug(
        f"Feature matrix {matrix.shape[0]}x{matrix.shape[1]} over harmonics {harmonics}"
    )
    return matrix, harmonics
