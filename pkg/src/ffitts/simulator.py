"""Monte Carlo endpoint generator under the dual-Gaussian endpoint model.

Each tap deviation is the sum of two independent zero-mean normal draws:
a width-proportional component with variance alpha * W^2 and an absolute
tremor component with variance sigma_a^2, so the generated spread obeys

    var(deviation) = alpha * W^2 + sigma_a^2.

Movement times follow a linear law over the baseline difficulty,
a + b * log2(A/W + 1), plus normal noise.

Determinism: conditions are processed in (A, W) order, each with its own
PCG64 stream spawned from the master seed, and normal variates come from
the inverse-CDF transform of that stream's uniforms (draw order per
condition: [x deviations in 2D,] y deviations, movement times).  A fixed
config therefore reproduces the identical trial list, and the scheme is
documented enough to reproduce the distributions elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .datamodel import Condition, Dimensionality, TrialRecord
from .errors import ValidationError

#: Identifier recorded in emitted metadata for cross-checking generators.
NORMAL_ALGORITHM = "inverse-cdf(PCG64)"

_TINY = 1e-300  # floor for uniforms so ndtri never sees exactly 0


@dataclass(frozen=True)
class MovementTimeModel:
    """Linear time law used for synthetic movement times."""

    a_ms: float = 100.0
    b_ms_per_bit: float = 90.0
    noise_sd_ms: float = 5.0


@dataclass(frozen=True)
class SimulatorConfig:
    alpha: float
    sigma_a_mm: float
    widths_mm: tuple[float, ...]
    amplitudes_mm: tuple[float, ...]
    trials_per_condition: int
    seed: int = 0
    dimensionality: Dimensionality = Dimensionality.ONE_D
    mt_model: MovementTimeModel = field(default_factory=MovementTimeModel)
    # component means are fixed at zero under the endpoint model
    mu_r_mm: float = 0.0
    mu_a_mm: float = 0.0
    participant_id: str = "sim"

    def __post_init__(self):
        if self.alpha < 0:
            raise ValidationError("alpha must be >= 0")
        if self.sigma_a_mm < 0:
            raise ValidationError("sigma_a must be >= 0")
        if self.trials_per_condition < 2:
            raise ValidationError("need >= 2 trials per condition")
        if not self.widths_mm or any(w <= 0 for w in self.widths_mm):
            raise ValidationError("widths must be positive and nonempty")
        if not self.amplitudes_mm or any(a <= 0 for a in self.amplitudes_mm):
            raise ValidationError("amplitudes must be positive and nonempty")
        if self.mu_r_mm != 0.0 or self.mu_a_mm != 0.0:
            raise ValidationError("component means are fixed at 0")


def config_metadata(config: SimulatorConfig) -> dict[str, str]:
    """Flat key=value view of a config for CSV metadata headers."""
    return {
        "generator": "ffitts-simulate",
        "normal_algorithm": NORMAL_ALGORITHM,
        "alpha": repr(config.alpha),
        "sigma_a_mm": repr(config.sigma_a_mm),
        "widths_mm": ",".join(repr(w) for w in config.widths_mm),
        "amplitudes_mm": ",".join(repr(a) for a in config.amplitudes_mm),
        "trials_per_condition": str(config.trials_per_condition),
        "seed": str(config.seed),
        "dimensionality": config.dimensionality.value,
        "mt_a_ms": repr(config.mt_model.a_ms),
        "mt_b_ms_per_bit": repr(config.mt_model.b_ms_per_bit),
        "mt_noise_sd_ms": repr(config.mt_model.noise_sd_ms),
    }


def _normals(rng: np.random.Generator, n: int, sd: float) -> np.ndarray:
    if sd == 0.0:
        rng.random(n)  # keep the draw sequence fixed regardless of sd
        return np.zeros(n)
    u = np.maximum(rng.random(n), _TINY)
    return ndtri(u) * sd


def generate(config: SimulatorConfig) -> list[TrialRecord]:
    """Generate tap records for every (A, W) condition in the config.

    Output order is canonical: sorted by amplitude, width, trial index.
    Targets sit at the origin; touch coordinates are the deviations.
    """
    conditions = sorted(
        (Condition(a, w) for a in config.amplitudes_mm for w in config.widths_mm),
        key=lambda c: (c.amplitude_mm, c.width_mm),
    )
    streams = np.random.SeedSequence(config.seed).spawn(len(conditions))
    n = config.trials_per_condition
    two_d = config.dimensionality is Dimensionality.TWO_D
    mtm = config.mt_model

    records: list[TrialRecord] = []
    for cond, stream in zip(conditions, streams):
        rng = np.random.Generator(np.random.PCG64(stream))
        sd_r = np.sqrt(config.alpha) * cond.width_mm
        if two_d:
            dev_x = _normals(rng, n, sd_r) + _normals(rng, n, config.sigma_a_mm)
        else:
            dev_x = np.zeros(n)
        dev_y = _normals(rng, n, sd_r) + _normals(rng, n, config.sigma_a_mm)
        base_mt = mtm.a_ms + mtm.b_ms_per_bit * np.log2(
            cond.amplitude_mm / cond.width_mm + 1.0
        )
        mt = np.maximum(base_mt + _normals(rng, n, mtm.noise_sd_ms), 0.0)
        for i in range(n):
            records.append(
                TrialRecord(
                    participant_id=config.participant_id,
                    condition=cond,
                    target_x_mm=0.0,
                    target_y_mm=0.0,
                    touch_x_mm=float(dev_x[i]),
                    touch_y_mm=float(dev_y[i]),
                    mt_ms=float(mt[i]),
                    tap_index=1,
                    is_practice=False,
                    block=0,
                    trial=i + 1,
                )
            )
    return records
