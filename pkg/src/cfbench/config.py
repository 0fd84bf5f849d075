"""Run configuration: strict JSON in, validated RunConfig out.

The schema is strict on purpose: an unknown key anywhere in the document
is an error, so a typo like "parallelsim" can never silently change an
experiment. Error messages carry the path to the offending field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from cfbench import registry
from cfbench.metrics import METRIC_NAMES

OUTPUT_FORMATS = ("csv", "json", "markdown")


class ConfigError(ValueError):
    """Malformed, incomplete, or contradictory run configuration."""


@dataclass(frozen=True)
class ComponentSpec:
    """A (name, params) reference into the factory registry."""

    name: str
    params: dict = field(default_factory=dict)
    path: str | None = None

    def to_json_obj(self) -> dict:
        obj = {"name": self.name, "params": dict(self.params)}
        if self.path is not None:
            obj["path"] = self.path
        return obj


@dataclass(frozen=True)
class RunConfig:
    run_id: str
    seed: int
    dataset: ComponentSpec
    oracle: ComponentSpec
    explainers: tuple[ComponentSpec, ...]
    metric_names: tuple[str, ...] = METRIC_NAMES
    data_dir: str = "data"
    model_dir: str = "models"
    output_dir: str = "output"
    parallelism: int = 1
    output_formats: tuple[str, ...] = OUTPUT_FORMATS
    figures: bool = True

    def to_json_obj(self) -> dict:
        return {
            "run_id": self.run_id,
            "seed": self.seed,
            "data_dir": self.data_dir,
            "model_dir": self.model_dir,
            "output_dir": self.output_dir,
            "dataset_spec": self.dataset.to_json_obj(),
            "oracle_spec": self.oracle.to_json_obj(),
            "explainer_specs": [e.to_json_obj() for e in self.explainers],
            "metric_names": list(self.metric_names),
            "parallelism": self.parallelism,
            "output_formats": list(self.output_formats),
            "figures": self.figures,
        }


def _expect(obj, type_, where: str):
    if not isinstance(obj, type_):
        want = type_.__name__ if isinstance(type_, type) else "/".join(t.__name__ for t in type_)
        raise ConfigError(f"{where}: expected {want}, got {type(obj).__name__}")
    return obj


def _component(obj, where: str, kind: str, allow_path: bool = False) -> ComponentSpec:
    _expect(obj, dict, where)
    allowed = {"name", "params"} | ({"path"} if allow_path else set())
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{where}.{key}: unknown key")
    if "name" not in obj:
        raise ConfigError(f"{where}.name: required")
    name = _expect(obj["name"], str, f"{where}.name")
    if name not in registry.names(kind):
        raise ConfigError(
            f"{where}.name: unknown component {name!r}; "
            f"known: {', '.join(registry.names(kind))}"
        )
    params = _expect(obj.get("params", {}), dict, f"{where}.params")
    for key in params:
        _expect(key, str, f"{where}.params key")
    path = obj.get("path")
    if path is not None:
        _expect(path, str, f"{where}.path")
    return ComponentSpec(name=name, params=params, path=path)


def parse_config(data: bytes | str) -> RunConfig:
    """Parse and validate a JSON run configuration."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _expect(raw, dict, "config")

    known = {
        "run_id",
        "seed",
        "data_dir",
        "model_dir",
        "output_dir",
        "dataset_spec",
        "oracle_spec",
        "explainer_specs",
        "metric_names",
        "parallelism",
        "output_formats",
        "figures",
    }
    for key in raw:
        if key not in known:
            raise ConfigError(f"config.{key}: unknown key")
    for key in ("run_id", "seed", "dataset_spec", "oracle_spec", "explainer_specs"):
        if key not in raw:
            raise ConfigError(f"config.{key}: required")

    run_id = _expect(raw["run_id"], str, "config.run_id")
    if not run_id or "/" in run_id or run_id in (".", ".."):
        raise ConfigError(f"config.run_id: {run_id!r} is not usable as a directory name")
    seed = _expect(raw["seed"], int, "config.seed")
    if isinstance(seed, bool):
        raise ConfigError("config.seed: expected int, got bool")

    dataset = _component(raw["dataset_spec"], "config.dataset_spec", "dataset", allow_path=True)
    oracle = _component(raw["oracle_spec"], "config.oracle_spec", "oracle")

    specs = _expect(raw["explainer_specs"], list, "config.explainer_specs")
    if not specs:
        raise ConfigError("config.explainer_specs: must not be empty")
    explainers = tuple(
        _component(item, f"config.explainer_specs[{i}]", "explainer")
        for i, item in enumerate(specs)
    )
    seen = set()
    for e in explainers:
        if e.name in seen:
            raise ConfigError(
                f"config.explainer_specs: explainer {e.name!r} listed twice"
            )
        seen.add(e.name)

    metric_names = raw.get("metric_names", list(METRIC_NAMES))
    _expect(metric_names, list, "config.metric_names")
    if not metric_names:
        raise ConfigError("config.metric_names: must not be empty")
    for i, m in enumerate(metric_names):
        if m not in METRIC_NAMES:
            raise ConfigError(
                f"config.metric_names[{i}]: unknown metric {m!r}; "
                f"known: {', '.join(METRIC_NAMES)}"
            )

    parallelism = raw.get("parallelism", 1)
    _expect(parallelism, int, "config.parallelism")
    if isinstance(parallelism, bool) or parallelism < 1:
        raise ConfigError(f"config.parallelism: must be a positive integer, got {parallelism!r}")

    formats = raw.get("output_formats", list(OUTPUT_FORMATS))
    _expect(formats, list, "config.output_formats")
    if not formats:
        raise ConfigError("config.output_formats: must not be empty")
    for i, f in enumerate(formats):
        if f not in OUTPUT_FORMATS:
            raise ConfigError(
                f"config.output_formats[{i}]: unknown format {f!r}; "
                f"known: {', '.join(OUTPUT_FORMATS)}"
            )

    figures = raw.get("figures", True)
    if not isinstance(figures, bool):
        raise ConfigError(f"config.figures: expected bool, got {type(figures).__name__}")

    return RunConfig(
        run_id=run_id,
        seed=seed,
        dataset=dataset,
        oracle=oracle,
        explainers=explainers,
        metric_names=tuple(metric_names),
        data_dir=_expect(raw.get("data_dir", "data"), str, "config.data_dir"),
        model_dir=_expect(raw.get("model_dir", "models"), str, "config.model_dir"),
        output_dir=_expect(raw.get("output_dir", "output"), str, "config.output_dir"),
        parallelism=parallelism,
        output_formats=tuple(formats),
        figures=figures,
    )
