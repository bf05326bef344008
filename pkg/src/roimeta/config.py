"""Flat key/value configuration files and their command-line twins.

Config files hold one ``key = value`` pair per line (``#`` comments allowed).
Every evaluation key has a CLI flag of the same name, and flags override file
values. Baseline thresholds come either from A/A calibration (``aa_*`` keys)
or from explicit ``micro_theta``/``macro_theta`` values, never both.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable

from .errors import ConfigError
from .pipeline import AaSettings, EvaluationConfig, ExplicitThetas, TrafficSchedule
from .preprocess import QualificationConfig
from .simulate import SimConfig
from .subgroups import SubgroupSpec


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {raw!r}")


def _parse_float(raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"expected a number, got {raw!r}") from None


def _parse_int(raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"expected an integer, got {raw!r}") from None


def _parse_float_list(raw: str) -> tuple[float, ...]:
    items = [item.strip() for item in raw.split(",") if item.strip()]
    if not items:
        raise ConfigError(f"expected a comma-separated number list, got {raw!r}")
    return tuple(_parse_float(item) for item in items)


def _parse_labels(raw: str) -> dict[str, str]:
    labels: dict[str, str] = {}
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" not in item:
            raise ConfigError(f"labels must be campaign:group pairs, got {item!r}")
        campaign_id, group = item.split(":", 1)
        labels[campaign_id.strip()] = group.strip()
    if not labels:
        raise ConfigError(f"expected campaign:group pairs, got {raw!r}")
    return labels


def _parse_str(raw: str) -> str:
    return raw.strip()


EVAL_KEY_PARSERS: dict[str, Callable[[str], object]] = {
    "confidence_level": _parse_float,
    "homogeneity_level": _parse_float,
    "min_impressions_per_part": _parse_int,
    "min_qualified_fraction": _parse_float,
    "aa_repeats_k": _parse_int,
    "aa_seed": _parse_int,
    "aa_treatment_share": _parse_float,
    "micro_theta": _parse_float,
    "macro_theta": _parse_float,
    "subgroup_kind": _parse_str,
    "spend_fractions": _parse_float_list,
    "subgroup_labels": _parse_labels,
    "variance_formula": _parse_str,
    "skip_subgroup_on_strong_reject": _parse_bool,
    "phases": _parse_float_list,
    "current_share": _parse_float,
}

SIM_KEY_PARSERS: dict[str, Callable[[str], object]] = {
    "n_campaigns": _parse_int,
    "m_a": _parse_int,
    "m_b": _parse_int,
    "treatment_share": _parse_float,
    "budget_log_mean": _parse_float,
    "budget_log_sd": _parse_float,
    "base_roi_mean": _parse_float,
    "campaign_roi_sd": _parse_float,
    "part_noise_sd": _parse_float,
    "treatment_lift": _parse_float,
    "outlier_campaigns": _parse_int,
    "outlier_lift": _parse_float,
    "impressions_per_part_mean": _parse_float,
    "seed": _parse_int,
}


def parse_kv_text(text: str, source: str = "config") -> dict[str, str]:
    """Parse ``key = value`` lines; later occurrences of a key override earlier ones."""
    values: dict[str, str] = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source} line {line_no}: expected 'key = value', got {raw_line!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"{source} line {line_no}: empty key or value")
        values[key] = value
    return values


def _typed_values(
    raw: dict[str, str], parsers: dict[str, Callable[[str], object]], source: str
) -> dict[str, object]:
    typed: dict[str, object] = {}
    for key, value in raw.items():
        if key not in parsers:
            raise ConfigError(f"{source}: unknown key {key!r}")
        typed[key] = parsers[key](value)
    return typed


def evaluation_config_from_values(values: dict[str, object]) -> EvaluationConfig:
    qualification = QualificationConfig(
        min_impressions_per_part=values.get("min_impressions_per_part", 100),
        min_qualified_fraction=values.get("min_qualified_fraction", 0.9),
    )
    has_thetas = "micro_theta" in values or "macro_theta" in values
    has_aa = any(k in values for k in ("aa_repeats_k", "aa_seed", "aa_treatment_share"))
    if has_thetas and has_aa:
        raise ConfigError(
            "give either explicit micro_theta/macro_theta or aa_* calibration keys, not both"
        )
    if has_thetas:
        if "micro_theta" not in values or "macro_theta" not in values:
            raise ConfigError("explicit thresholds need both micro_theta and macro_theta")
        aa: AaSettings | ExplicitThetas = ExplicitThetas(
            micro_theta=values["micro_theta"], macro_theta=values["macro_theta"]
        )
    else:
        aa = AaSettings(
            repeats_k=values.get("aa_repeats_k", 5),
            seed=values.get("aa_seed", 0),
            treatment_share=values.get("aa_treatment_share"),
        )
    kind = values.get("subgroup_kind", "by_label" if "subgroup_labels" in values else "by_spend_cumulative")
    subgroups = SubgroupSpec(
        kind=kind,
        spend_fractions=values.get("spend_fractions", (1 / 3, 1 / 3, 1 / 3)),
        labels=values.get("subgroup_labels"),
    )
    schedule = TrafficSchedule(
        phases=values.get("phases", (0.01, 0.10, 0.20, 0.50)),
        current_share=values.get("current_share", 0.01),
    )
    return EvaluationConfig(
        confidence_level=values.get("confidence_level", 0.95),
        homogeneity_level=values.get("homogeneity_level", 0.10),
        qualification=qualification,
        aa=aa,
        subgroups=subgroups,
        variance_formula=values.get("variance_formula", "noncentral_t"),
        skip_subgroup_on_strong_reject=values.get("skip_subgroup_on_strong_reject", True),
        schedule=schedule,
    )


def load_evaluation_config(
    path: str | Path | None = None, overrides: dict[str, str] | None = None
) -> EvaluationConfig:
    """Build an EvaluationConfig from an optional file plus raw-string overrides."""
    raw: dict[str, str] = {}
    if path is not None:
        raw.update(parse_kv_text(Path(path).read_text(encoding="utf-8"), source=str(path)))
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    return evaluation_config_from_values(_typed_values(raw, EVAL_KEY_PARSERS, "evaluation config"))


def load_sim_config(
    path: str | Path | None = None, overrides: dict[str, str] | None = None
) -> SimConfig:
    """Build a SimConfig from an optional file plus raw-string overrides."""
    raw: dict[str, str] = {}
    if path is not None:
        raw.update(parse_kv_text(Path(path).read_text(encoding="utf-8"), source=str(path)))
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = value
    typed = _typed_values(raw, SIM_KEY_PARSERS, "simulation config")
    return SimConfig(**typed)
