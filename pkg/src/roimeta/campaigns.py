"""Campaign domain model: arms, traffic parts, event values, and ROI.

Monetary amounts are quantized to integer micro-units at construction time so
that aggregation is bit-exact and independent of summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import SchemaError, UndefinedRoiError

MICROS_PER_UNIT = 1_000_000


class Arm(Enum):
    """Experiment arm: control runs the incumbent model, treatment the candidate."""

    CONTROL = "A"
    TREATMENT = "B"


def to_micros(amount: float) -> int:
    """Quantize a currency amount to integer micro-units."""
    if not math.isfinite(amount):
        raise ValueError(f"non-finite currency amount: {amount!r}")
    return round(amount * MICROS_PER_UNIT)


def from_micros(micros: int) -> float:
    return micros / MICROS_PER_UNIT


@dataclass(frozen=True)
class EventValueSchedule:
    """Monetary value credited per occurrence of each tracked event type."""

    entries: dict[str, float]

    def __post_init__(self):
        for name, value in self.entries.items():
            if not isinstance(name, str) or not name:
                raise SchemaError(f"event type name must be non-empty text, got {name!r}")
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
                raise SchemaError(f"value for event type {name!r} must be finite and >= 0")


@dataclass(frozen=True)
class EventCounts:
    """Observed number of events per event type."""

    counts: dict[str, int]

    def __post_init__(self):
        for name, count in self.counts.items():
            if not isinstance(name, str) or not name:
                raise SchemaError(f"event type name must be non-empty text, got {name!r}")
            if not isinstance(count, int) or isinstance(count, bool) or count < 0:
                raise SchemaError(f"count for event type {name!r} must be a non-negative integer")


def campaign_value(counts: EventCounts, schedule: EventValueSchedule) -> float:
    """Total value generated: per-event value times event count, summed over types.

    Every counted event type must appear in the schedule.
    """
    total_micros = 0
    for name, count in counts.counts.items():
        if name not in schedule.entries:
            raise SchemaError(f"event type {name!r} is not in the value schedule")
        total_micros += to_micros(schedule.entries[name]) * count
    return from_micros(total_micros)


def roi(value: float, spend: float) -> float:
    """Return on investment: value generated per unit of spend.

    Undefined for non-positive spend; callers must exclude or report such rows.
    """
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"value must be finite and >= 0, got {value!r}")
    if not math.isfinite(spend) or spend <= 0:
        raise UndefinedRoiError(f"ROI is undefined for spend {spend!r}")
    return value / spend


@dataclass(frozen=True)
class PartMeasurement:
    """One traffic part's impressions, spend, value, and ROI for one arm of one campaign.

    ``roi`` is derived as value/spend when spend > 0 and left None otherwise;
    pre-aggregated sources may pass an explicit ``roi`` instead.
    """

    campaign_id: str
    arm: Arm
    part_id: int
    impressions: int
    spend: float
    value: float
    roi: float | None = None

    def __post_init__(self):
        if not isinstance(self.campaign_id, str) or not self.campaign_id:
            raise ValueError("campaign_id must be non-empty text")
        if not isinstance(self.arm, Arm):
            raise ValueError(f"arm must be an Arm, got {self.arm!r}")
        if not isinstance(self.part_id, int) or isinstance(self.part_id, bool) or self.part_id < 0:
            raise ValueError(f"part_id must be a non-negative integer, got {self.part_id!r}")
        if not isinstance(self.impressions, int) or isinstance(self.impressions, bool) or self.impressions < 0:
            raise ValueError(f"impressions must be a non-negative integer, got {self.impressions!r}")
        for name in ("spend", "value"):
            amount = getattr(self, name)
            if not isinstance(amount, (int, float)) or not math.isfinite(amount) or amount < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {amount!r}")
        object.__setattr__(self, "spend", from_micros(to_micros(self.spend)))
        object.__setattr__(self, "value", from_micros(to_micros(self.value)))
        if self.spend == 0:
            if self.roi is not None:
                raise ValueError("roi cannot be stored for a zero-spend part")
        elif self.roi is None:
            object.__setattr__(self, "roi", self.value / self.spend)
        if self.roi is not None and (not math.isfinite(self.roi) or self.roi < 0):
            raise ValueError(f"roi must be finite and >= 0, got {self.roi!r}")


@dataclass(frozen=True)
class ArmTotals:
    """Campaign-level totals for one arm."""

    spend: float
    value: float
    roi: float


def arm_totals(parts: list[PartMeasurement] | tuple[PartMeasurement, ...]) -> ArmTotals:
    """Sum spend and value over one arm's parts and derive the arm ROI.

    All parts must share a campaign and an arm; total spend must be positive.
    """
    if not parts:
        raise ValueError("arm_totals requires at least one part")
    campaign_id = parts[0].campaign_id
    arm = parts[0].arm
    for part in parts:
        if part.campaign_id != campaign_id:
            raise ValueError(
                f"parts mix campaigns {campaign_id!r} and {part.campaign_id!r}"
            )
        if part.arm is not arm:
            raise ValueError(f"parts mix arms {arm.value} and {part.arm.value}")
    spend_micros = sum(to_micros(p.spend) for p in parts)
    value_micros = sum(to_micros(p.value) for p in parts)
    spend = from_micros(spend_micros)
    value = from_micros(value_micros)
    if spend_micros <= 0:
        raise UndefinedRoiError(
            f"campaign {campaign_id!r} arm {arm.value}: total spend is zero"
        )
    return ArmTotals(spend=spend, value=value, roi=value / spend)


@dataclass(frozen=True)
class CampaignExperiment:
    """One campaign's control and treatment parts."""

    campaign_id: str
    parts_a: tuple[PartMeasurement, ...]
    parts_b: tuple[PartMeasurement, ...]

    def __post_init__(self):
        if not isinstance(self.campaign_id, str) or not self.campaign_id:
            raise ValueError("campaign_id must be non-empty text")
        object.__setattr__(self, "parts_a", tuple(self.parts_a))
        object.__setattr__(self, "parts_b", tuple(self.parts_b))
        for parts, arm in ((self.parts_a, Arm.CONTROL), (self.parts_b, Arm.TREATMENT)):
            seen: set[int] = set()
            for part in parts:
                if part.campaign_id != self.campaign_id:
                    raise ValueError(
                        f"part belongs to campaign {part.campaign_id!r}, "
                        f"not {self.campaign_id!r}"
                    )
                if part.arm is not arm:
                    raise ValueError(
                        f"part {part.part_id} has arm {part.arm.value}, expected {arm.value}"
                    )
                if part.part_id in seen:
                    raise ValueError(
                        f"duplicate part_id {part.part_id} in campaign "
                        f"{self.campaign_id!r} arm {arm.value}"
                    )
                seen.add(part.part_id)

    @property
    def m_a(self) -> int:
        return len(self.parts_a)

    @property
    def m_b(self) -> int:
        return len(self.parts_b)

    def total_spend(self) -> float:
        """Both-arm spend of the campaign, exact under micro-unit accounting."""
        return from_micros(
            sum(to_micros(p.spend) for p in self.parts_a)
            + sum(to_micros(p.spend) for p in self.parts_b)
        )


@dataclass(frozen=True)
class ExperimentDataset:
    """All campaigns observed during one experiment, plus free-form metadata."""

    campaigns: tuple[CampaignExperiment, ...]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "campaigns", tuple(self.campaigns))
        seen: set[str] = set()
        for campaign in self.campaigns:
            if campaign.campaign_id in seen:
                raise ValueError(f"duplicate campaign_id {campaign.campaign_id!r}")
            seen.add(campaign.campaign_id)

    @property
    def n(self) -> int:
        return len(self.campaigns)
