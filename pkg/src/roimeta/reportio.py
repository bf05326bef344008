"""Evaluation report rendering: machine JSON (versioned, reparseable) and
human tables.

The machine format is deterministic (sorted keys, repr-exact floats), so the
same report always serializes to identical bytes, and parsing it back yields
an object equal to the original.
"""

from __future__ import annotations

import dataclasses
import json
from enum import Enum
from typing import Any

from .baselines import BaselineDecision, BaselineMethod, BaselineResult
from .campaigns import Arm, CampaignExperiment, ExperimentDataset, PartMeasurement
from .errors import SchemaError
from .meta import (
    EffectSize,
    FixedEffectSummary,
    HeterogeneityStats,
    RandomEffectSummary,
    SignificanceResult,
)
from .pipeline import (
    Decision,
    EffectExclusion,
    EvaluationReport,
    TrafficRecommendation,
    Verdict,
)
from .preprocess import DisqualifiedCampaign, ExcludedPart, QualificationReport
from .subgroups import SubgroupReport, SubgroupSummary

SCHEMA_VERSION = "1"

REPORT_FORMATS = ("human-table", "machine-json")


def to_plain(obj: Any) -> Any:
    if isinstance(obj, Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: to_plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)
        }
    if isinstance(obj, (list, tuple)):
        return [to_plain(item) for item in obj]
    if isinstance(obj, dict):
        return {key: to_plain(value) for key, value in obj.items()}
    return obj


def report_to_dict(report: EvaluationReport) -> dict:
    doc = to_plain(report)
    doc["schema_version"] = SCHEMA_VERSION
    return doc


def report_to_json(report: EvaluationReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def _part_from_dict(doc: dict) -> PartMeasurement:
    return PartMeasurement(
        campaign_id=doc["campaign_id"],
        arm=Arm(doc["arm"]),
        part_id=doc["part_id"],
        impressions=doc["impressions"],
        spend=doc["spend"],
        value=doc["value"],
        roi=doc["roi"],
    )


def _dataset_from_dict(doc: dict) -> ExperimentDataset:
    campaigns = tuple(
        CampaignExperiment(
            c["campaign_id"],
            tuple(_part_from_dict(p) for p in c["parts_a"]),
            tuple(_part_from_dict(p) for p in c["parts_b"]),
        )
        for c in doc["campaigns"]
    )
    return ExperimentDataset(campaigns, metadata=dict(doc["metadata"]))


def _qualification_from_dict(doc: dict) -> QualificationReport:
    return QualificationReport(
        qualified=_dataset_from_dict(doc["qualified"]),
        excluded_parts=tuple(
            ExcludedPart(p["campaign_id"], Arm(p["arm"]), p["part_id"], p["reason"])
            for p in doc["excluded_parts"]
        ),
        disqualified_campaigns=tuple(
            DisqualifiedCampaign(c["campaign_id"], c["reason"])
            for c in doc["disqualified_campaigns"]
        ),
        disqualified_fraction=doc["disqualified_fraction"],
    )


def _subgroup_from_dict(doc: dict | None) -> SubgroupReport | None:
    if doc is None:
        return None
    return SubgroupReport(
        summaries=tuple(
            SubgroupSummary(
                group_id=s["group_id"],
                members=tuple(s["members"]),
                mu_star_k=s["mu_star_k"],
                ci_low=s["ci_low"],
                ci_high=s["ci_high"],
                p_z_k=s["p_z_k"],
                q_star_k=s["q_star_k"],
                p_q_star_k=s["p_q_star_k"],
            )
            for s in doc["summaries"]
        ),
        q_star_total=doc["q_star_total"],
        q_within=doc["q_within"],
        q_between=doc["q_between"],
        df_between=doc["df_between"],
        p_between=doc["p_between"],
    )


def report_from_dict(doc: dict) -> EvaluationReport:
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(
            f"unsupported report schema_version {version!r}, expected {SCHEMA_VERSION!r}"
        )
    try:
        return EvaluationReport(
            qualification=_qualification_from_dict(doc["qualification"]),
            baselines=tuple(
                BaselineResult(
                    BaselineMethod(b["method"]), b["statistic"],
                    b["threshold_theta"], BaselineDecision(b["decision"]),
                )
                for b in doc["baselines"]
            ),
            effects=tuple(
                EffectSize(
                    campaign_id=e["campaign_id"], delta=e["delta"],
                    pooled_sd=e["pooled_sd"], df=e["df"],
                    correction=e["correction"], d=e["d"], v=e["v"], w=e["w"],
                )
                for e in doc["effects"]
            ),
            effect_exclusions=tuple(
                EffectExclusion(x["campaign_id"], x["reason"])
                for x in doc["effect_exclusions"]
            ),
            fixed=FixedEffectSummary(**doc["fixed"]),
            heterogeneity=HeterogeneityStats(**doc["heterogeneity"]),
            random=RandomEffectSummary(
                per_study_w_star=tuple(doc["random"]["per_study_w_star"]),
                mu_star=doc["random"]["mu_star"],
                nu_star=doc["random"]["nu_star"],
            ),
            significance=SignificanceResult(**doc["significance"]),
            subgroup=_subgroup_from_dict(doc["subgroup"]),
            decision=Decision(
                verdict=Verdict(doc["decision"]["verdict"]),
                basis=doc["decision"]["basis"],
                requires_approval=doc["decision"]["requires_approval"],
            ),
            recommendation=TrafficRecommendation(
                action=doc["recommendation"]["action"],
                next_share=doc["recommendation"]["next_share"],
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed report document: {exc}") from None


def report_from_json(text: str) -> EvaluationReport:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid report JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SchemaError("report document must be a JSON object")
    return report_from_dict(doc)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _homogeneity_note(p_value: float, level: float) -> str:
    verdict = "significant" if p_value < level else "not significant"
    return f"({verdict} at the {level * 100:g}% level)"


def render_human(report: EvaluationReport, homogeneity_level: float = 0.10) -> str:
    q = report.qualification
    lines: list[str] = []
    lines.append("model evaluation report")
    lines.append("=======================")
    lines.append("")
    lines.append("qualification")
    lines.append(
        f"  campaigns: {q.qualified.n} qualified, "
        f"{len(q.disqualified_campaigns)} disqualified "
        f"(fraction {_fmt(q.disqualified_fraction)})"
    )
    lines.append(f"  parts excluded: {len(q.excluded_parts)}")
    lines.append("")
    lines.append("baseline methods")
    lines.append(f"  {'method':<14}{'statistic':>14}{'theta':>14}  decision")
    for b in report.baselines:
        lines.append(
            f"  {b.method.value:<14}{_fmt(b.statistic):>14}"
            f"{_fmt(b.threshold_theta):>14}  {b.decision.value}"
        )
    meta_rejects = report.decision.verdict is not Verdict.ACCEPT
    disagreeing = [
        b.method.value
        for b in report.baselines
        if (b.decision is BaselineDecision.ACCEPT) == meta_rejects
    ]
    if disagreeing:
        lines.append(
            f"  note: {', '.join(disagreeing)} disagree(s) with the meta-analysis verdict"
        )
    lines.append("")
    s = report.significance
    lines.append("random-effects meta-analysis")
    lines.append(
        f"  campaigns analyzed: {report.fixed.n} "
        f"(excluded: {len(report.effect_exclusions)})"
    )
    lines.append(f"  fixed effect:  mu={_fmt(report.fixed.mu)}  nu={_fmt(report.fixed.nu)}")
    h = report.heterogeneity
    lines.append(
        f"  heterogeneity: Q={_fmt(h.q)}  df={h.df}  p_Q={_fmt(h.p_q)}  tau2={_fmt(h.tau2)}  "
        + _homogeneity_note(h.p_q, homogeneity_level)
    )
    lines.append(
        f"  random effect: mu*={_fmt(report.random.mu_star)}  nu*={_fmt(report.random.nu_star)}"
    )
    level_pct = f"{s.confidence_level * 100:g}%"
    lines.append(
        f"  significance:  Z={_fmt(s.z)}  P_z={_fmt(s.p_z)}  "
        f"CI {level_pct} = [{_fmt(s.ci_low)}, {_fmt(s.ci_high)}]  "
        f"significant={'yes' if s.significant else 'no'}"
    )
    lines.append("")
    if report.subgroup is not None:
        g = report.subgroup
        lines.append("subgroup analysis")
        lines.append(
            f"  {'group':<12}{'n':>4}{'mu*':>12}{'ci_low':>12}{'ci_high':>12}"
            f"{'P_z':>10}{'Q*':>12}{'p_Q*':>10}"
        )
        for summary in g.summaries:
            lines.append(
                f"  {summary.group_id:<12}{len(summary.members):>4}"
                f"{_fmt(summary.mu_star_k):>12}{_fmt(summary.ci_low):>12}"
                f"{_fmt(summary.ci_high):>12}{_fmt(summary.p_z_k):>10}"
                f"{_fmt(summary.q_star_k):>12}{_fmt(summary.p_q_star_k):>10}"
            )
        lines.append(
            f"  decomposition: Q*={_fmt(g.q_star_total)}  "
            f"Q*_within={_fmt(g.q_within)}  Q*_between={_fmt(g.q_between)}  "
            f"df={g.df_between}  p_between={_fmt(g.p_between)}  "
            + _homogeneity_note(g.p_between, homogeneity_level)
        )
    else:
        lines.append("subgroup analysis")
        lines.append("  skipped (strong rejection)")
    lines.append("")
    lines.append("decision")
    lines.append(f"  verdict: {report.decision.verdict.value}")
    lines.append(f"  basis: {report.decision.basis}")
    lines.append(
        f"  requires manager approval: {'yes' if report.decision.requires_approval else 'no'}"
    )
    r = report.recommendation
    if r.action == "ramp_up":
        lines.append(f"  traffic recommendation: ramp_up to share {r.next_share:g}")
    else:
        lines.append(f"  traffic recommendation: {r.action}")
    return "\n".join(lines) + "\n"


def render_report(
    report: EvaluationReport,
    output_format: str = "human-table",
    homogeneity_level: float = 0.10,
) -> str:
    """Render a report as an aligned human table or versioned machine JSON.

    ``homogeneity_level`` only annotates the human heterogeneity lines; the
    machine format carries the raw p-values.
    """
    if output_format not in REPORT_FORMATS:
        raise SchemaError(
            f"output_format must be one of {REPORT_FORMATS}, got {output_format!r}"
        )
    if output_format == "machine-json":
        return report_to_json(report)
    return render_human(report, homogeneity_level)
