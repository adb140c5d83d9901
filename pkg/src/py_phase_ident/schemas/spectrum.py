"""Harmonic spectrum and compression mask models"""

from datetime import datetime
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..errors import MaskError
from .series import frozen_array

DAILY_HOURS = 24
DEFAULT_DAILY_HARMONICS = 6


class MaskKind(str, Enum):
    FIXED = "fixed"
    TOP_K = "topk"
    THRESHOLD = "threshold"


class CompressionMask(BaseModel):
    """Rule selecting which (a_n, b_n) pairs survive compression"""

    model_config = ConfigDict(frozen=True)

    kind: MaskKind
    harmonics: Optional[Tuple[int, ...]] = Field(
        None, description="Retained harmonic indices (fixed)"
    )
    k: Optional[int] = Field(None, ge=0, description="Pairs kept (topk)")
    tau: Optional[float] = Field(None, ge=0, description="Magnitude cutoff (threshold)")

    @field_validator("harmonics", mode="before")
    @classmethod
    def _sorted_unique(cls, value):
        if value is None:
            return None
        return tuple(sorted({int(n) for n in value}))

    @model_validator(mode="after")
    def _check_kind(self):
        required = {
            MaskKind.FIXED: self.harmonics,
            MaskKind.TOP_K: self.k,
            MaskKind.THRESHOLD: self.tau,
        }[self.kind]
        if required is None:
            raise ValueError(f"{self.kind.value} mask is missing its parameter")
        return self

    @classmethod
    def fixed(cls, harmonics) -> "CompressionMask":
        return cls(kind=MaskKind.FIXED, harmonics=tuple(harmonics))

    @classmethod
    def top_k(cls, k: int) -> "CompressionMask":
        return cls(kind=MaskKind.TOP_K, k=k)

    @classmethod
    def threshold(cls, tau: float) -> "CompressionMask":
        return cls(kind=MaskKind.THRESHOLD, tau=tau)

    @classmethod
    def daily(
        cls, n_samples: int, count: int = DEFAULT_DAILY_HARMONICS
    ) -> "CompressionMask":
        """Multiples of the daily frequency: n = N/24 * {1..count}"""
        if n_samples % DAILY_HOURS:
            raise MaskError(
                f"daily mask needs a whole number of days, got {n_samples} hours"
            )
        base = n_samples // DAILY_HOURS
        return cls.fixed(base * m for m in range(1, count + 1))

    @classmethod
    def full(cls, n_samples: int) -> "CompressionMask":
        return cls.top_k(n_samples // 2)

    @classmethod
    def parse(cls, text: str, n_samples: Optional[int] = None) -> "CompressionMask":
        """
        Parse ``fixed:n1,n2,...``, ``topk:K``, ``threshold:T`` or ``daily[:M]``.

        ``daily`` needs ``n_samples`` because the harmonics depend on the
        period length.
        """
        kind, _, arg = text.strip().partition(":")
        kind = kind.lower()
        try:
            if kind == "fixed":
                return cls.fixed(int(n) for n in arg.split(",") if n.strip())
            if kind == "topk":
                return cls.top_k(int(arg))
            if kind == "threshold":
                return cls.threshold(float(arg))
            if kind == "daily":
                if n_samples is None:
                    raise MaskError("daily mask needs the series length")
                count = int(arg) if arg else DEFAULT_DAILY_HARMONICS
                return cls.daily(n_samples, count)
        except (ValueError, TypeError) as e:
            if isinstance(e, MaskError):
                raise
            raise MaskError(f"invalid mask {text!r}: {e}") from e
        raise MaskError(f"unknown mask kind {kind!r} in {text!r}")

    def describe(self) -> str:
        if self.kind is MaskKind.FIXED:
            return "fixed:" + ",".join(str(n) for n in self.harmonics)
        if self.kind is MaskKind.TOP_K:
            return f"topk:{self.k}"
        return f"threshold:{self.tau!r}"


class HarmonicSpectrum(BaseModel):
    """Sine-cosine Fourier coefficients; a[n-1], b[n-1] hold a_n, b_n"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n_samples: int = Field(..., ge=2)
    period_hours: float = Field(..., gt=0)
    a0: float
    a: np.ndarray
    b: np.ndarray
    meter_id: Optional[str] = None
    period_id: Optional[str] = None
    start_time: Optional[datetime] = None

    @field_validator("a", "b", mode="before")
    @classmethod
    def _as_array(cls, value):
        return frozen_array(value)

    @model_validator(mode="after")
    def _check_lengths(self):
        half = self.n_samples // 2
        if self.a.size != half or self.b.size != half:
            raise ValueError(f"expected {half} coefficient pairs")
        return self

    @property
    def n_harmonics(self) -> int:
        return self.n_samples // 2

    def pair(self, n: int) -> Tuple[float, float]:
        return float(self.a[n - 1]), float(self.b[n - 1])


class CompressedSpectrum(BaseModel):
    """Sparse subset of harmonics plus the mask that produced it"""

    model_config = ConfigDict(frozen=True)

    n_samples: int = Field(..., ge=2)
    period_hours: float = Field(..., gt=0)
    a0: float = Field(..., description="0th harmonic, excluded from features")
    entries: Dict[int, Tuple[float, float]] = Field(default_factory=dict)
    mask: CompressionMask
    meter_id: Optional[str] = None
    period_id: Optional[str] = None
    start_time: Optional[datetime] = None

    @field_validator("entries", mode="after")
    @classmethod
    def _ascending(cls, value):
        return dict(sorted(value.items()))

    @property
    def harmonics(self) -> Tuple[int, ...]:
        return tuple(self.entries)
