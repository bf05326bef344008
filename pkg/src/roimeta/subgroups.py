"""Subgroup construction and the within/between heterogeneity decomposition.

Campaigns are partitioned (by cumulative-spend tiers or explicit labels) and
Cochran's Q is recomputed with the random-model weights: per-group Q around
the group mean, their sum (within-group), and the remainder of the grand-mean
Q (between-group, chi-square with K-1 degrees of freedom). A significant
between-group component means group membership explains part of the effect
variation. By default every group shares the single global between-study
variance; re-estimating it inside each group is available as a non-default
mode.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from math import fsum

from .campaigns import ExperimentDataset
from .errors import ConfigError, InsufficientDataError, SchemaError
from .meta import EffectSize, cochran_q, fixed_effect_summary, tau_squared
from .statfuncs import chi_square_sf, normal_cdf, normal_quantile

SUBGROUP_KINDS = ("by_spend_cumulative", "by_label")


@dataclass(frozen=True)
class SubgroupSpec:
    """How to partition campaigns: cumulative spend tiers or an explicit label map."""

    kind: str = "by_spend_cumulative"
    spend_fractions: tuple[float, ...] = (1 / 3, 1 / 3, 1 / 3)
    labels: dict[str, str] | None = None

    def __post_init__(self):
        if self.kind not in SUBGROUP_KINDS:
            raise ConfigError(f"kind must be one of {SUBGROUP_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "spend_fractions", tuple(self.spend_fractions))
        if self.kind == "by_spend_cumulative":
            if not self.spend_fractions or any(f <= 0 for f in self.spend_fractions):
                raise ConfigError("spend_fractions must be positive")
            if abs(fsum(self.spend_fractions) - 1.0) > 1e-12:
                raise ConfigError(
                    f"spend_fractions must sum to 1, got {fsum(self.spend_fractions)!r}"
                )
        if self.kind == "by_label" and not self.labels:
            raise ConfigError("by_label partitioning requires a labels map")


@dataclass(frozen=True)
class GroupAssignment:
    group_id: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class SubgroupSummary:
    """Random-model summary of one group: its mean effect, CI, and homogeneity."""

    group_id: str
    members: tuple[str, ...]
    mu_star_k: float
    ci_low: float
    ci_high: float
    p_z_k: float
    q_star_k: float
    p_q_star_k: float


@dataclass(frozen=True)
class SubgroupReport:
    summaries: tuple[SubgroupSummary, ...]
    q_star_total: float
    q_within: float
    q_between: float
    df_between: int
    p_between: float


def partition_by_spend(
    dataset: ExperimentDataset, fractions: tuple[float, ...] = (1 / 3, 1 / 3, 1 / 3)
) -> tuple[GroupAssignment, ...]:
    """Partition campaigns into cumulative-spend tiers, biggest spenders first.

    Campaigns are sorted by both-arm spend descending; walking the sorted list,
    a campaign joins the current group while the cumulative spend before it is
    strictly below the group's cumulative cap. Groups left empty (fewer
    campaigns than groups, or a dominant campaign spanning several caps) are
    dropped with a warning.
    """
    fractions = tuple(fractions)
    if not fractions or any(f <= 0 for f in fractions):
        raise ConfigError("fractions must be positive")
    if abs(fsum(fractions) - 1.0) > 1e-12:
        raise ConfigError(f"fractions must sum to 1, got {fsum(fractions)!r}")
    if not dataset.campaigns:
        raise InsufficientDataError("no campaigns to partition")
    spends = sorted(
        ((c.total_spend(), c.campaign_id) for c in dataset.campaigns),
        key=lambda item: (-item[0], item[1]),
    )
    total = fsum(s for s, _ in spends)
    caps = []
    cumulative_fraction = 0.0
    for fraction in fractions:
        cumulative_fraction += fraction
        caps.append(cumulative_fraction * total)
    members: list[list[str]] = [[] for _ in fractions]
    group = 0
    cumulative = 0.0
    for spend, campaign_id in spends:
        while group < len(fractions) - 1 and cumulative >= caps[group]:
            group += 1
        members[group].append(campaign_id)
        cumulative += spend
    assignments = tuple(
        GroupAssignment(f"group_{i + 1}", tuple(ids))
        for i, ids in enumerate(members)
        if ids
    )
    if len(assignments) < len(fractions):
        warnings.warn(
            f"only {len(assignments)} of {len(fractions)} spend groups are non-empty"
        )
    return assignments


def partition_by_label(
    dataset: ExperimentDataset, labels: dict[str, str]
) -> tuple[GroupAssignment, ...]:
    """Group campaigns by an explicit campaign-to-group label map."""
    members: dict[str, list[str]] = {}
    for campaign in dataset.campaigns:
        label = labels.get(campaign.campaign_id)
        if label is None:
            raise SchemaError(f"campaign {campaign.campaign_id!r} has no subgroup label")
        members.setdefault(label, []).append(campaign.campaign_id)
    return tuple(
        GroupAssignment(group_id, tuple(ids)) for group_id, ids in sorted(members.items())
    )


def resolve_subgroups(
    dataset: ExperimentDataset, spec: SubgroupSpec
) -> tuple[GroupAssignment, ...]:
    if spec.kind == "by_label":
        return partition_by_label(dataset, spec.labels or {})
    return partition_by_spend(dataset, spec.spend_fractions)


def _reestimated_tau2(group_effects: list[EffectSize]) -> float:
    """Method-of-moments between-study variance within one group."""
    fixed = fixed_effect_summary(group_effects)
    q, _ = cochran_q(group_effects, fixed.mu)
    return tau_squared(q, len(group_effects), [e.w for e in group_effects])


def subgroup_analysis(
    effects: list[EffectSize] | tuple[EffectSize, ...],
    tau2: float,
    groups: tuple[GroupAssignment, ...] | list[GroupAssignment],
    confidence_level: float = 0.95,
    tau2_mode: str = "global",
) -> SubgroupReport:
    """Decompose grand-mean heterogeneity into within- and between-group parts.

    All decomposition statistics share the random-model weights 1/(v + tau2)
    with the global ``tau2``, which makes the identity exact: the grand-mean Q
    equals the sum of per-group Qs plus the between-group component. Groups
    left empty after matching against ``effects`` are dropped.

    ``tau2_mode="per_group"`` re-estimates the between-study variance inside
    each group for that group's summary effect, interval, and homogeneity
    statistic; with separate per-group weights the between-group remainder is
    no longer guaranteed non-negative, which is why global is the default.
    """
    if not effects:
        raise InsufficientDataError("no effects to analyze")
    if tau2 < 0:
        raise ValueError(f"tau2 must be >= 0, got {tau2!r}")
    if not 0.0 < confidence_level < 1.0:
        raise ConfigError(f"confidence_level must be in (0, 1), got {confidence_level!r}")
    if tau2_mode not in ("global", "per_group"):
        raise ConfigError(
            f"tau2_mode must be 'global' or 'per_group', got {tau2_mode!r}"
        )
    by_id: dict[str, EffectSize] = {}
    for effect in effects:
        if effect.campaign_id in by_id:
            raise SchemaError(f"duplicate effect for campaign {effect.campaign_id!r}")
        by_id[effect.campaign_id] = effect
    assigned: set[str] = set()
    for group in groups:
        for campaign_id in group.members:
            if campaign_id in assigned:
                raise SchemaError(
                    f"campaign {campaign_id!r} appears in more than one subgroup"
                )
            assigned.add(campaign_id)
    missing = sorted(set(by_id) - assigned)
    if missing:
        raise SchemaError(f"campaigns not assigned to any subgroup: {', '.join(missing)}")

    w_star = {cid: 1.0 / (e.v + tau2) for cid, e in by_id.items()}
    sum_w = fsum(w_star.values())
    grand_mu = fsum(w_star[cid] * by_id[cid].d for cid in by_id) / sum_w
    q_total = fsum(w_star[cid] * (by_id[cid].d - grand_mu) ** 2 for cid in by_id)

    z_crit = normal_quantile(1.0 - (1.0 - confidence_level) / 2.0)
    summaries: list[SubgroupSummary] = []
    for group in groups:
        present = tuple(cid for cid in group.members if cid in by_id)
        if not present:
            warnings.warn(f"subgroup {group.group_id!r} has no analyzable campaigns; dropped")
            continue
        if tau2_mode == "per_group":
            group_tau2 = _reestimated_tau2([by_id[cid] for cid in present])
            weights = {cid: 1.0 / (by_id[cid].v + group_tau2) for cid in present}
        else:
            weights = {cid: w_star[cid] for cid in present}
        group_sum_w = fsum(weights.values())
        mu_k = fsum(weights[cid] * by_id[cid].d for cid in present) / group_sum_w
        nu_k = 1.0 / group_sum_w
        se_k = math.sqrt(nu_k)
        z_k = mu_k / se_k
        q_k = fsum(weights[cid] * (by_id[cid].d - mu_k) ** 2 for cid in present)
        p_q_k = chi_square_sf(q_k, len(present) - 1) if len(present) > 1 else 1.0
        summaries.append(SubgroupSummary(
            group_id=group.group_id,
            members=present,
            mu_star_k=mu_k,
            ci_low=mu_k - z_crit * se_k,
            ci_high=mu_k + z_crit * se_k,
            p_z_k=normal_cdf(-abs(z_k)),
            q_star_k=q_k,
            p_q_star_k=p_q_k,
        ))
    if not summaries:
        raise InsufficientDataError("no subgroup has analyzable campaigns")
    q_within = fsum(s.q_star_k for s in summaries)
    q_between = q_total - q_within
    df_between = len(summaries) - 1
    p_between = (
        chi_square_sf(max(q_between, 0.0), df_between) if df_between >= 1 else 1.0
    )
    return SubgroupReport(
        summaries=tuple(summaries),
        q_star_total=q_total,
        q_within=q_within,
        q_between=q_between,
        df_between=df_between,
        p_between=p_between,
    )
