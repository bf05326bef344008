"""Seeded synthetic experiments for exercising the evaluation machinery.

Generates heterogeneous campaigns with lognormal budgets (orders-of-magnitude
disparities), per-campaign ROI levels, and per-part multiplicative lognormal
noise, with an optional treatment lift. The highest-budget campaigns can be
designated outliers that receive their own lift, which is the scenario where
spend-weighted and meta-analytic evaluations disagree.

Output is fully determined by the seed: every campaign draws from its own
hash-keyed substream, so generation is independent of execution order and
stable across platforms. Parameter defaults are chosen for test coverage, not
for fidelity to any production traffic.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

from .campaigns import Arm, CampaignExperiment, ExperimentDataset, PartMeasurement
from .errors import ConfigError
from .randomness import HashStream


@dataclass(frozen=True)
class SimConfig:
    """Knobs for one synthetic experiment; ``seed`` pins everything."""

    n_campaigns: int = 20
    m_a: int = 10
    m_b: int = 10
    treatment_share: float = 0.1
    budget_log_mean: float = 8.0
    budget_log_sd: float = 2.0
    base_roi_mean: float = 1.0
    campaign_roi_sd: float = 0.25
    part_noise_sd: float = 0.1
    treatment_lift: float = 0.0
    outlier_campaigns: int = 0
    outlier_lift: float = 0.0
    impressions_per_part_mean: float = 2000.0
    seed: int = 0

    def __post_init__(self):
        if self.n_campaigns < 1:
            raise ConfigError(f"n_campaigns must be >= 1, got {self.n_campaigns!r}")
        if self.m_a < 2 or self.m_b < 2:
            raise ConfigError(f"need >= 2 parts per arm, got m_a={self.m_a}, m_b={self.m_b}")
        if not 0.0 <= self.treatment_share <= 1.0:
            raise ConfigError(f"treatment_share must be in [0, 1], got {self.treatment_share!r}")
        if self.part_noise_sd < 0 or self.campaign_roi_sd < 0 or self.budget_log_sd < 0:
            raise ConfigError("spread parameters must be >= 0")
        if self.base_roi_mean <= 0:
            raise ConfigError(f"base_roi_mean must be > 0, got {self.base_roi_mean!r}")
        if self.treatment_lift <= -1.0 or self.outlier_lift <= -1.0:
            raise ConfigError("multiplicative lifts must be > -1")
        if not 0 <= self.outlier_campaigns <= self.n_campaigns:
            raise ConfigError("outlier_campaigns must be between 0 and n_campaigns")
        if self.impressions_per_part_mean < 0:
            raise ConfigError("impressions_per_part_mean must be >= 0")


def user_bucket_point(user_id: str, salt: str = "") -> float:
    """Map (salt, user_id) to a stable point in [0, 1)."""
    raw = hashlib.blake2b(
        f"{salt}\x1f{user_id}".encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(raw, "big") * 2.0 ** -64


def assign_arm(user_id: str, treatment_share: float, salt: str = "") -> Arm:
    """Deterministic user-level bucketing: same user, same arm, for a fixed salt."""
    if not 0.0 <= treatment_share <= 1.0:
        raise ConfigError(f"treatment_share must be in [0, 1], got {treatment_share!r}")
    point = user_bucket_point(user_id, salt)
    return Arm.TREATMENT if point < treatment_share else Arm.CONTROL


def _mean_one_lognormal(stream: HashStream, sd: float) -> float:
    """Multiplicative noise factor with unit mean; exactly 1 when sd == 0."""
    if sd == 0.0:
        stream.uniform()  # keep stream positions independent of sd
        return 1.0
    return math.exp(sd * stream.normal() - 0.5 * sd * sd)


def _campaign_stream(seed: int, index: int) -> HashStream:
    return HashStream("sim", seed, "campaign", index)


def generate_experiment(config: SimConfig) -> ExperimentDataset:
    """Generate one experiment dataset, byte-stable for a given config."""
    streams = [_campaign_stream(config.seed, i) for i in range(config.n_campaigns)]
    budgets = [
        s.lognormal(config.budget_log_mean, config.budget_log_sd) for s in streams
    ]
    by_budget = sorted(range(config.n_campaigns), key=lambda i: (-budgets[i], i))
    outliers = set(by_budget[: config.outlier_campaigns])

    width = len(str(config.n_campaigns - 1))
    campaigns = []
    for i in range(config.n_campaigns):
        stream = streams[i]
        campaign_id = f"camp_{i:0{width}d}"
        level = config.base_roi_mean * _mean_one_lognormal(stream, config.campaign_roi_sd)
        lift = config.outlier_lift if i in outliers else config.treatment_lift
        spend_a = budgets[i] * (1.0 - config.treatment_share) / config.m_a
        spend_b = budgets[i] * config.treatment_share / config.m_b
        parts_a = [
            _generate_part(stream, campaign_id, Arm.CONTROL, j, spend_a, level, config)
            for j in range(config.m_a)
        ]
        parts_b = [
            _generate_part(
                stream, campaign_id, Arm.TREATMENT, j, spend_b, level * (1.0 + lift), config
            )
            for j in range(config.m_b)
        ]
        campaigns.append(CampaignExperiment(campaign_id, parts_a, parts_b))
    metadata = {
        "generator": "roimeta-hash-stream/1",
        "seed": str(config.seed),
        "treatment_share": f"{config.treatment_share:g}",
        "n_campaigns": str(config.n_campaigns),
    }
    return ExperimentDataset(tuple(campaigns), metadata=metadata)


def _generate_part(
    stream: HashStream,
    campaign_id: str,
    arm: Arm,
    part_id: int,
    spend: float,
    roi_level: float,
    config: SimConfig,
) -> PartMeasurement:
    roi = roi_level * _mean_one_lognormal(stream, config.part_noise_sd)
    impressions = stream.poisson(config.impressions_per_part_mean)
    # roi is stored explicitly so that noise-free configurations carry exactly
    # equal ROIs; spend and value are quantized to micro-units on construction.
    return PartMeasurement(
        campaign_id=campaign_id,
        arm=arm,
        part_id=part_id,
        impressions=impressions,
        spend=spend,
        value=roi * spend,
        roi=roi,
    )
