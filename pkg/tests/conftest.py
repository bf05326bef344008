"""Shared builders and hypothesis strategies for the test suite."""

from __future__ import annotations

import re

import numpy as np
from hypothesis import strategies as st

from roimeta.campaigns import (
    Arm,
    CampaignExperiment,
    ExperimentDataset,
    PartMeasurement,
)


def pytest_runtest_logreport(report):
    """Print one PASS/FAIL line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    match = re.search(r"TestCriterion(\d+)(\w+)::test_(\w+)", report.nodeid)
    if not match:
        return
    number, name, test = match.groups()
    status = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE criterion {number} ({name}/{test}): {status}")


def make_part(
    campaign_id: str,
    arm: Arm,
    part_id: int,
    roi: float | None = None,
    spend: float = 1.0,
    value: float | None = None,
    impressions: int = 1000,
) -> PartMeasurement:
    """Part with an explicitly pinned ROI unless value is given directly."""
    if value is None:
        value = (roi if roi is not None else 0.0) * spend
    return PartMeasurement(
        campaign_id=campaign_id,
        arm=arm,
        part_id=part_id,
        impressions=impressions,
        spend=spend,
        value=value,
        roi=roi,
    )


def make_campaign(
    campaign_id: str,
    rois_a: list[float],
    rois_b: list[float],
    spend_a: float = 1.0,
    spend_b: float = 1.0,
    impressions: int = 1000,
) -> CampaignExperiment:
    parts_a = [
        make_part(campaign_id, Arm.CONTROL, j, roi=r, spend=spend_a, impressions=impressions)
        for j, r in enumerate(rois_a)
    ]
    parts_b = [
        make_part(campaign_id, Arm.TREATMENT, j, roi=r, spend=spend_b, impressions=impressions)
        for j, r in enumerate(rois_b)
    ]
    return CampaignExperiment(campaign_id, parts_a, parts_b)


def make_dataset(campaigns: list[CampaignExperiment]) -> ExperimentDataset:
    return ExperimentDataset(tuple(campaigns))


def random_dataset(
    rng: np.random.Generator,
    n_campaigns: tuple[int, int] = (2, 10),
    parts_per_arm: tuple[int, int] = (2, 6),
    spend_range: tuple[float, float] = (0.5, 50.0),
) -> ExperimentDataset:
    """Random dataset for oracle comparisons; ROIs are positive and O(1)."""
    n = int(rng.integers(n_campaigns[0], n_campaigns[1] + 1))
    campaigns = []
    for i in range(n):
        m_a = int(rng.integers(parts_per_arm[0], parts_per_arm[1] + 1))
        m_b = int(rng.integers(parts_per_arm[0], parts_per_arm[1] + 1))
        base = float(rng.uniform(0.3, 3.0))
        lift = float(rng.normal(0.0, 0.15))
        campaigns.append(make_campaign(
            f"c{i:03d}",
            rois_a=[base * float(rng.lognormal(0.0, 0.2)) for _ in range(m_a)],
            rois_b=[base * (1 + lift) * float(rng.lognormal(0.0, 0.2)) for _ in range(m_b)],
            spend_a=float(rng.uniform(*spend_range)),
            spend_b=float(rng.uniform(*spend_range)),
        ))
    return make_dataset(campaigns)


# --- hypothesis strategies ---------------------------------------------------

sane_rois = st.floats(min_value=0.05, max_value=20.0, allow_nan=False)
sane_spends = st.floats(min_value=0.1, max_value=100.0, allow_nan=False)


@st.composite
def campaign_strategy(draw, campaign_id: str = "c0", min_parts: int = 2, max_parts: int = 5):
    rois_a = draw(st.lists(sane_rois, min_size=min_parts, max_size=max_parts))
    rois_b = draw(st.lists(sane_rois, min_size=min_parts, max_size=max_parts))
    spend_a = draw(sane_spends)
    spend_b = draw(sane_spends)
    return make_campaign(campaign_id, rois_a, rois_b, spend_a=spend_a, spend_b=spend_b)


@st.composite
def dataset_strategy(draw, min_campaigns: int = 2, max_campaigns: int = 6):
    n = draw(st.integers(min_campaigns, max_campaigns))
    campaigns = [
        draw(campaign_strategy(campaign_id=f"c{i:02d}")) for i in range(n)
    ]
    return make_dataset(campaigns)


@st.composite
def mixed_quality_dataset_strategy(draw, min_campaigns: int = 1, max_campaigns: int = 5):
    """Datasets with some low-impression and zero-spend parts, for preprocessing."""
    n = draw(st.integers(min_campaigns, max_campaigns))
    campaigns = []
    for i in range(n):
        campaign_id = f"c{i:02d}"
        parts = {Arm.CONTROL: [], Arm.TREATMENT: []}
        for arm in (Arm.CONTROL, Arm.TREATMENT):
            count = draw(st.integers(1, 6))
            for j in range(count):
                impressions = draw(st.integers(0, 300))
                zero_spend = draw(st.booleans())
                spend = 0.0 if zero_spend else draw(sane_spends)
                roi = None if zero_spend else draw(sane_rois)
                parts[arm].append(make_part(
                    campaign_id, arm, j, roi=roi, spend=spend, impressions=impressions,
                ))
        campaigns.append(CampaignExperiment(campaign_id, parts[Arm.CONTROL], parts[Arm.TREATMENT]))
    return make_dataset(campaigns)
