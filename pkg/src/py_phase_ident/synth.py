"""Seeded synthetic feeders with known phase groups"""

from typing import Dict, List, Tuple

import numpy as np

from .errors import ConfigError
from .ingestion import period_bounds
from .logging_config import get_logger
from .schemas.clustering import cluster_label
from .schemas.config import N_PHASES, SynthConfig
from .schemas.series import FeederDataset, FeederStudy, MeterSeries, Topology
from .schemas.spectrum import DAILY_HOURS

logger = get_logger(__name__)


def phase_group_sizes(fractions, n_meters: int) -> List[int]:
    """Round fractions * n_meters, handing leftovers to the largest remainders"""
    raw = np.asarray(fractions, dtype=np.float64) * n_meters
    sizes = np.floor(raw + 1e-9).astype(int)
    remainder = raw - sizes
    for p in np.argsort(-remainder, kind="stable")[: max(0, n_meters - sizes.sum())]:
        sizes[p] += 1
    return [int(s) for s in sizes]


def transformers_per_phase(sizes: List[int], n_transformers: int) -> List[int]:
    """At least one transformer per populated phase, the rest by meters per transformer"""
    counts = [1 if s else 0 for s in sizes]
    if n_transformers > sum(sizes):
        raise ConfigError(
            f"{n_transformers} transformers cannot each serve one of {sum(sizes)} meters"
        )
    if n_transformers < sum(counts):
        raise ConfigError(
            f"{sum(counts)} populated phases need at least {sum(counts)} transformers"
        )
    for _ in range(n_transformers - sum(counts)):
        open_phases = [p for p in range(len(sizes)) if counts[p] < sizes[p]]
        best = max(open_phases, key=lambda p: (sizes[p] / counts[p], -p))
        counts[best] += 1
    return counts


def _layout(config: SynthConfig, rng: np.random.Generator):
    """Meter order, phase and transformer of every meter"""
    sizes = phase_group_sizes(config.phase_fractions, config.n_meters)
    counts = transformers_per_phase(sizes, config.n_transformers)

    meters: List[Tuple[int, int]] = []  # (phase, transformer index within phase)
    for phase, (size, count) in enumerate(zip(sizes, counts)):
        if not size:
            continue
        extra = rng.integers(count, size=size - count)
        owners = list(range(count)) + [int(t) for t in extra]
        meters.extend((phase, t) for t in owners)

    order = rng.permutation(len(meters))
    meters = [meters[i] for i in order]

    # transformers are numbered by first appearance
    transformer_ids: Dict[Tuple[int, int], str] = {}
    width = len(str(config.n_transformers))
    for key in meters:
        if key not in transformer_ids:
            transformer_ids[key] = f"T{len(transformer_ids) + 1:0{width}d}"

    meter_width = len(str(config.n_meters))
    layout = []
    for i, key in enumerate(meters):
        meter_id = f"{config.feeder_id}-M{i + 1:0{meter_width}d}"
        layout.append((meter_id, key[0], transformer_ids[key]))
    return layout


def phase_signals(config: SynthConfig, n_samples: int) -> np.ndarray:
    """Mean-one base signal of each phase, shape (3, N)"""
    if n_samples % DAILY_HOURS:
        raise ConfigError(f"period of {n_samples} hours is not a whole number of days")
    t = np.arange(n_samples, dtype=np.float64)
    base = n_samples // DAILY_HOURS
    # feeder-wide drift on the first two harmonics, outside the daily ones
    trend = config.trend_amp * (
        np.cos(2 * np.pi * t / n_samples) + 0.5 * np.sin(4 * np.pi * t / n_samples)
    )
    signals = np.ones((N_PHASES, n_samples)) + trend
    for p in range(N_PHASES):
        for h, (amp, offset) in enumerate(
            zip(config.daily_harmonic_amps[p], config.harmonic_phases[p])
        ):
            n = base * (h + 1)
            signals[p] += amp * np.cos(2 * np.pi * n * t / n_samples + offset)
    return signals


def generate_study(config: SynthConfig) -> Tuple[FeederStudy, Dict[str, str]]:
    """
    One dataset per configured period over a single ground truth.

    Each period draws its own noise and missing hours; fixed seed gives
    bit-identical output.
    """
    seeds = np.random.SeedSequence(config.seed).spawn(1 + len(config.period_ids))
    layout = _layout(config, np.random.default_rng(seeds[0]))

    truth = {meter_id: cluster_label(phase) for meter_id, phase, _ in layout}
    topology = Topology(
        meter_to_transformer={m: t for m, _, t in layout},
        meter_to_feeder={m: config.feeder_id for m, _, _ in layout},
    )
    phases = np.array([phase for _, phase, _ in layout])

    datasets = {}
    for period_id, seed in zip(config.period_ids, seeds[1:]):
        rng = np.random.default_rng(seed)
        start, month_hours = period_bounds(period_id)
        n_samples = config.hours or month_hours

        values = phase_signals(config, n_samples)[phases]
        values = values + rng.normal(0.0, config.noise_sigma, size=values.shape)
        lose = rng.random(len(layout)) < config.missing_rate
        hours = rng.integers(n_samples, size=len(layout))
        values[lose, hours[lose]] = np.nan

        datasets[period_id] = FeederDataset(
            feeder_id=config.feeder_id,
            period_id=period_id,
            series=tuple(
                MeterSeries(
                    meter_id=meter_id,
                    period_id=period_id,
                    start_time=start,
                    values=values[i],
                )
                for i, (meter_id, _, _) in enumerate(layout)
            ),
            topology=topology,
        )
        logger.info(
            f"Synthesized {len(layout)} meters for {config.feeder_id} {period_id}, "
            f"{int(lose.sum())} with a missing hour"
        )

    return FeederStudy(feeder_id=config.feeder_id, datasets=datasets), truth


def generate_feeder(config: SynthConfig) -> Tuple[FeederDataset, Dict[str, str]]:
    """The first configured period of ``generate_study``"""
    study, truth = generate_study(config)
    return study[config.period_ids[0]], truth
