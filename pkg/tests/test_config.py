"""Strict config schema: good documents parse, everything else says where."""

import json

import pytest

from cfbench.config import ConfigError, RunConfig, parse_config
from cfbench.metrics import METRIC_NAMES


def minimal():
    return {
        "run_id": "r1",
        "seed": 7,
        "dataset_spec": {"name": "tree-cycles", "params": {"n": 4, "nodes": 6, "max_cycles": 1, "seed": 0}},
        "oracle_spec": {"name": "nearest-centroid", "params": {}},
        "explainer_specs": [{"name": "dce"}],
    }


def parse(doc):
    return parse_config(json.dumps(doc))


def test_minimal_config_gets_defaults():
    cfg = parse(minimal())
    assert cfg.run_id == "r1"
    assert cfg.seed == 7
    assert cfg.metric_names == METRIC_NAMES
    assert cfg.parallelism == 1
    assert cfg.output_formats == ("csv", "json", "markdown")
    assert cfg.figures is True
    assert cfg.data_dir == "data"
    assert cfg.dataset.name == "tree-cycles"
    assert cfg.explainers[0].params == {}


def test_full_config_round_trips():
    doc = dict(
        minimal(),
        data_dir="dd",
        model_dir="mm",
        output_dir="oo",
        metric_names=["ged", "calls"],
        parallelism=4,
        output_formats=["csv"],
        figures=False,
        explainer_specs=[
            {"name": "dce"},
            {"name": "obs", "params": {"max_forward_flips": 9}},
        ],
    )
    cfg = parse(doc)
    assert parse_config(json.dumps(cfg.to_json_obj())) == cfg


def test_bytes_input_accepted():
    assert parse_config(json.dumps(minimal()).encode()) == parse(minimal())


def test_not_json_at_all():
    with pytest.raises(ConfigError, match="not valid JSON"):
        parse_config(b"{nope")


@pytest.mark.parametrize("key", ["run_id", "seed", "dataset_spec", "oracle_spec", "explainer_specs"])
def test_required_fields(key):
    doc = minimal()
    del doc[key]
    with pytest.raises(ConfigError, match=f"config.{key}: required"):
        parse(doc)


def test_unknown_top_level_key_is_rejected():
    with pytest.raises(ConfigError, match="config.parallelsim: unknown key"):
        parse(dict(minimal(), parallelsim=2))


def test_unknown_nested_key_carries_its_path():
    doc = minimal()
    doc["oracle_spec"]["weights"] = [1, 2]
    with pytest.raises(ConfigError, match=r"config.oracle_spec.weights: unknown key"):
        parse(doc)


def test_unknown_explainer_lists_known_names():
    doc = minimal()
    doc["explainer_specs"] = [{"name": "macss"}]
    with pytest.raises(ConfigError, match="unknown component 'macss'; known: dce, obs, dbs"):
        parse(doc)


def test_unknown_dataset_and_oracle_names():
    doc = minimal()
    doc["dataset_spec"]["name"] = "enron"
    with pytest.raises(ConfigError, match=r"config.dataset_spec.name: unknown component"):
        parse(doc)
    doc = minimal()
    doc["oracle_spec"]["name"] = "gcn"
    with pytest.raises(ConfigError, match=r"config.oracle_spec.name: unknown component"):
        parse(doc)


def test_empty_explainer_list():
    with pytest.raises(ConfigError, match="must not be empty"):
        parse(dict(minimal(), explainer_specs=[]))


def test_duplicate_explainer():
    with pytest.raises(ConfigError, match="listed twice"):
        parse(dict(minimal(), explainer_specs=[{"name": "dce"}, {"name": "dce"}]))


def test_empty_and_unknown_metric_names():
    with pytest.raises(ConfigError, match="config.metric_names: must not be empty"):
        parse(dict(minimal(), metric_names=[]))
    with pytest.raises(ConfigError, match=r"config.metric_names\[1\]: unknown metric 'speed'"):
        parse(dict(minimal(), metric_names=["ged", "speed"]))


def test_bad_types_name_the_field():
    with pytest.raises(ConfigError, match="config.seed: expected int"):
        parse(dict(minimal(), seed="7"))
    with pytest.raises(ConfigError, match="config.seed: expected int, got bool"):
        parse(dict(minimal(), seed=True))
    with pytest.raises(ConfigError, match="config.parallelism"):
        parse(dict(minimal(), parallelism=0))
    with pytest.raises(ConfigError, match=r"config.output_formats\[0\]: unknown format"):
        parse(dict(minimal(), output_formats=["yaml"]))
    with pytest.raises(ConfigError, match="config.figures: expected bool"):
        parse(dict(minimal(), figures="yes"))
    doc = minimal()
    doc["dataset_spec"]["params"] = 3
    with pytest.raises(ConfigError, match=r"config.dataset_spec.params: expected dict"):
        parse(doc)


def test_run_id_must_be_a_safe_directory_name():
    for bad in ["", "a/b", ".", ".."]:
        with pytest.raises(ConfigError, match="config.run_id"):
            parse(dict(minimal(), run_id=bad))


def test_runconfig_is_usable_as_a_value():
    a = parse(minimal())
    b = parse(minimal())
    assert a == b
    assert a is not b
