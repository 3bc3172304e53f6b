"""Index-of-difficulty formulations and derived target widths.

Seven candidate formulations of ID = log2(A / width_term + 1) are
supported, differing in the width source and the tremor treatment:

====== ============== ==================================== =====================
model  width source   width term                           tremor treatment
====== ============== ==================================== =====================
m1     nominal W      W                                    none
m2     effective W_e  W_e = sqrt(2*pi*e) * sigma_obs       none
m3     effective W_e  W_e - c                              free parameter c
m4     effective W_e  sqrt(W_e^2 - c^2)                    free parameter c
m5     nominal W      W - c                                free parameter c
m6     nominal W      sqrt(W^2 - c^2)                      free parameter c
m7     adjusted W_f   sqrt(2*pi*e*(sigma_obs^2-sigma_a^2)) given tremor spread
====== ============== ==================================== =====================

When the width term's domain is violated (sigma_obs <= sigma_a for m7, or
c at least the width for the c-forms), the computation yields a MathError
*value* rather than raising: batch evaluation over a whole dataset must
collect every failing condition so a model can be reported unusable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from .datamodel import Condition, ConditionSummary

#: sqrt(2*pi*e): ratio between a normal sample's 96%-coverage width and its SD.
SQRT_2PI_E = math.sqrt(2.0 * math.pi * math.e)


class WidthKind(Enum):
    NOMINAL = "nominal"
    EFFECTIVE = "effective"
    FINGER_ADJUSTED = "finger-adjusted"


class Tremor(Enum):
    NONE = "none"
    FREE_C = "free-c"
    GIVEN_SIGMA_A = "given-sigma-a"


class Model(Enum):
    """The seven candidate difficulty formulations."""

    M1_BASELINE = "m1"
    M2_EFFECTIVE = "m2"
    M3_WE_NOSQRT_C = "m3"
    M4_WE_SQRT_C = "m4"
    M5_W_NOSQRT_C = "m5"
    M6_W_SQRT_C = "m6"
    M7_GIVEN_SIGMA_A = "m7"

    @property
    def width_kind(self) -> WidthKind:
        return _WIDTH_KIND[self]

    @property
    def tremor(self) -> Tremor:
        return _TREMOR[self]

    @property
    def uses_sqrt(self) -> bool:
        return self in (Model.M4_WE_SQRT_C, Model.M6_W_SQRT_C)

    @property
    def description(self) -> str:
        return _DESCRIPTION[self]

    @property
    def formula(self) -> str:
        return _FORMULA[self]

    @classmethod
    def parse(cls, token: str) -> "Model":
        token = token.strip().lower()
        for m in cls:
            if m.value == token:
                return m
        raise ValueError(
            f"unknown model {token!r}; expected one of "
            + ", ".join(m.value for m in cls)
        )


_WIDTH_KIND = {
    Model.M1_BASELINE: WidthKind.NOMINAL,
    Model.M2_EFFECTIVE: WidthKind.EFFECTIVE,
    Model.M3_WE_NOSQRT_C: WidthKind.EFFECTIVE,
    Model.M4_WE_SQRT_C: WidthKind.EFFECTIVE,
    Model.M5_W_NOSQRT_C: WidthKind.NOMINAL,
    Model.M6_W_SQRT_C: WidthKind.NOMINAL,
    Model.M7_GIVEN_SIGMA_A: WidthKind.FINGER_ADJUSTED,
}
_TREMOR = {
    Model.M1_BASELINE: Tremor.NONE,
    Model.M2_EFFECTIVE: Tremor.NONE,
    Model.M3_WE_NOSQRT_C: Tremor.FREE_C,
    Model.M4_WE_SQRT_C: Tremor.FREE_C,
    Model.M5_W_NOSQRT_C: Tremor.FREE_C,
    Model.M6_W_SQRT_C: Tremor.FREE_C,
    Model.M7_GIVEN_SIGMA_A: Tremor.GIVEN_SIGMA_A,
}
_DESCRIPTION = {
    Model.M1_BASELINE: "#1 Baseline",
    Model.M2_EFFECTIVE: "#2 Effective width",
    Model.M3_WE_NOSQRT_C: "#3 Param. opt. (We, no sqrt)",
    Model.M4_WE_SQRT_C: "#4 Param. opt. (We, sqrt)",
    Model.M5_W_NOSQRT_C: "#5 Param. opt. (W, no sqrt)",
    Model.M6_W_SQRT_C: "#6 Param. opt. (W, sqrt)",
    Model.M7_GIVEN_SIGMA_A: "#7 Given tremor spread",
}
_FORMULA = {
    Model.M1_BASELINE: "log2(A/W + 1)",
    Model.M2_EFFECTIVE: "log2(A/We + 1)",
    Model.M3_WE_NOSQRT_C: "log2(A/(We - c) + 1)",
    Model.M4_WE_SQRT_C: "log2(A/sqrt(We^2 - c^2) + 1)",
    Model.M5_W_NOSQRT_C: "log2(A/(W - c) + 1)",
    Model.M6_W_SQRT_C: "log2(A/sqrt(W^2 - c^2) + 1)",
    Model.M7_GIVEN_SIGMA_A: "log2(A/Wf + 1)",
}


@dataclass(frozen=True)
class MathError:
    """A domain violation in a width or difficulty term.

    This is a value, not an exception: callers evaluating 20 conditions
    collect every error and report the model unusable, mirroring how whole
    models are excluded when the adjusted width is undefined anywhere.
    """

    detail: str
    condition: Condition | None = None

    def __str__(self) -> str:
        where = f" at {self.condition}" if self.condition else ""
        return f"!err{where}: {self.detail}"


@dataclass(frozen=True)
class DerivedWidth:
    value_mm: float
    kind: WidthKind

    def __post_init__(self):
        if self.value_mm <= 0:
            raise ValueError(f"derived width must be > 0, got {self.value_mm}")


def effective_width(sigma_obs_mm: float) -> DerivedWidth:
    """Width covering ~96% of normally spread endpoints: sqrt(2*pi*e)*sigma."""
    if sigma_obs_mm <= 0:
        raise ValueError("sigma_obs must be > 0")
    return DerivedWidth(SQRT_2PI_E * sigma_obs_mm, WidthKind.EFFECTIVE)


def finger_width(
    sigma_obs_mm: float,
    sigma_a_mm: float,
    condition: Condition | None = None,
) -> DerivedWidth | MathError:
    """Tremor-adjusted effective width sqrt(2*pi*e*(sigma_obs^2 - sigma_a^2)).

    Returns a MathError value when sigma_obs^2 <= sigma_a^2.  A zero tremor
    spread degenerates to the plain effective width.
    """
    if sigma_obs_mm <= 0 or sigma_a_mm < 0:
        raise ValueError("sigma_obs must be > 0 and sigma_a >= 0")
    if sigma_a_mm == 0.0:
        return DerivedWidth(SQRT_2PI_E * sigma_obs_mm, WidthKind.FINGER_ADJUSTED)
    gap = sigma_obs_mm**2 - sigma_a_mm**2
    if gap <= 0:
        return MathError(
            f"sigma_obs={sigma_obs_mm:g} <= sigma_a={sigma_a_mm:g}", condition
        )
    return DerivedWidth(SQRT_2PI_E * math.sqrt(gap), WidthKind.FINGER_ADJUSTED)


def compute_id(
    model: Model,
    condition: Condition,
    width_mm: float,
    c_mm: float = 0.0,
) -> float | MathError:
    """Difficulty in bits for one condition under the given formulation.

    `width_mm` is the already-derived width for the model's width source.
    A zero c short-circuits to the plain form so c-forms at c = 0 agree
    with the baseline bit for bit.
    """
    if width_mm <= 0:
        return MathError(f"non-positive width {width_mm:g}", condition)
    if c_mm < 0:
        return MathError(f"negative tremor parameter c={c_mm:g}", condition)
    a = condition.amplitude_mm
    if model.tremor is not Tremor.FREE_C or c_mm == 0.0:
        return math.log2(a / width_mm + 1.0)
    if model.uses_sqrt:
        denom_sq = width_mm**2 - c_mm**2
        if denom_sq <= 0:
            return MathError(
                f"width^2 - c^2 = {denom_sq:g} <= 0 (c={c_mm:g})", condition
            )
        return math.log2(a / math.sqrt(denom_sq) + 1.0)
    denom = width_mm - c_mm
    if denom <= 0:
        return MathError(f"width - c = {denom:g} <= 0 (c={c_mm:g})", condition)
    return math.log2(a / denom + 1.0)


def model_widths(
    model: Model,
    summaries: Sequence[ConditionSummary],
    sigma_a_mm: float | None = None,
    nominal_width_fn: Callable[[Condition], float] | None = None,
) -> list[DerivedWidth | MathError]:
    """Per-condition width terms for a model, before any c adjustment.

    `nominal_width_fn` is the hook for non-square targets (e.g. reduce a
    rectangle to min(W, H) before modeling); it defaults to the condition's
    width and only affects nominal-width models.
    """
    if model.width_kind is WidthKind.FINGER_ADJUSTED and sigma_a_mm is None:
        raise ValueError(f"{model.value} requires a sigma_a value")
    nominal = nominal_width_fn or (lambda c: c.width_mm)
    out: list[DerivedWidth | MathError] = []
    for s in summaries:
        if model.width_kind is WidthKind.NOMINAL:
            out.append(DerivedWidth(nominal(s.condition), WidthKind.NOMINAL))
        elif model.width_kind is WidthKind.EFFECTIVE:
            out.append(effective_width(s.sigma_obs_mm))
        else:
            out.append(finger_width(s.sigma_obs_mm, sigma_a_mm, s.condition))
    return out
