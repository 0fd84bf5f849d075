"""Run orchestration: resolve components, explain every instance, aggregate.

One run pairs one dataset and one fitted oracle with any number of
explainers. Each (explainer, instance) task derives its own seed from the
run seed, so results are identical whether tasks run on one worker or
many; runtime columns are the only schedule-dependent output.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import logging
import os
import platform
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import cfbench
from cfbench import registry
from cfbench.config import RunConfig
from cfbench.datasets import Dataset
from cfbench.explainers import Explainer
from cfbench.graphs import GraphInstance
from cfbench.metrics import EvaluationRecord, aggregate, evaluate_record, oracle_accuracy
from cfbench.oracles import CountingOracle, Oracle
from cfbench.report import RunReport, write_report

log = logging.getLogger("cfbench")


class RunError(RuntimeError):
    """Internal inconsistency detected while executing a run."""


def mix_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary labels (hash-based, not Python hash)."""
    key = ":".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def instance_seed(run_seed: int, explainer_name: str, instance_id: int) -> int:
    """Per-task seed; independent of scheduling and worker count."""
    return mix_seed(run_seed, explainer_name, instance_id)


@dataclass
class Evaluator:
    """One explainer paired with the dataset, oracle, and metric selection."""

    explainer: Explainer
    dataset: Dataset
    oracle: Oracle
    metric_names: tuple[str, ...]
    total_calls: int = 0

    def evaluate(self, g: GraphInstance, rng_seed: int) -> EvaluationRecord:
        """Explain one instance and score it; explainer crashes become
        found=false records instead of killing the run."""
        handle = CountingOracle(self.oracle)
        t0 = time.perf_counter()
        try:
            expl = self.explainer.explain(g, handle, self.dataset, rng_seed)
        except Exception as exc:
            log.warning(
                "explainer %s failed on instance %d: %s", self.explainer.name, g.id, exc
            )
            pred_g = self.oracle.classify(g)
            return EvaluationRecord(
                explainer=self.explainer.name,
                instance_id=g.id,
                runtime_s=time.perf_counter() - t0,
                ged=0,
                calls=handle.calls,
                correctness=0,
                sparsity=1.0,
                edit_ratio=0.0,
                fidelity=0,
                oracle_correct=oracle_accuracy(pred_g, g.label),
                found=False,
                error=f"{type(exc).__name__}: {exc}",
            )
        if expl.oracle_calls != handle.calls:
            raise RunError(
                f"explainer {self.explainer.name} reported {expl.oracle_calls} calls "
                f"on instance {g.id} but the handle counted {handle.calls}"
            )
        pred_g = self.oracle.classify(g)
        pred_cf = self.oracle.classify(expl.counterfactual)
        return evaluate_record(g, expl, pred_g, pred_cf, self.explainer.name)


def _resolved_dataset_params(cfg: RunConfig) -> dict:
    """Dataset params with a concrete seed, derived from the run seed when
    the config leaves it out, so the cache key is always explicit."""
    params = dict(cfg.dataset.params)
    if "seed" not in params:
        params["seed"] = mix_seed(cfg.seed, "dataset", cfg.dataset.name)
    return params


def execute(cfg: RunConfig) -> RunReport:
    """Perform the whole run described by cfg and persist its outputs.

    CFBENCH_DATA_DIR and CFBENCH_MODEL_DIR override the config's cache
    directories. Component or I/O failures leave a FAILED marker in the
    run directory before propagating.
    """
    t_start = time.perf_counter()
    data_dir = os.environ.get("CFBENCH_DATA_DIR", cfg.data_dir)
    model_dir = os.environ.get("CFBENCH_MODEL_DIR", cfg.model_dir)
    out_dir = Path(cfg.output_dir) / cfg.run_id
    out_dir.mkdir(parents=True, exist_ok=True)

    handler = logging.FileHandler(out_dir / "run.log", mode="w", encoding="utf-8")
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
    log.addHandler(handler)
    if log.level == logging.NOTSET:
        log.setLevel(logging.INFO)
    try:
        report = _execute_inner(cfg, data_dir, model_dir, out_dir, t_start)
    except Exception as exc:
        log.error("run %s aborted: %s", cfg.run_id, exc)
        marker = out_dir / "FAILED"
        marker.write_text(f"{type(exc).__name__}: {exc}\n", encoding="utf-8")
        raise
    finally:
        log.removeHandler(handler)
        handler.close()
    return report


def _execute_inner(
    cfg: RunConfig, data_dir: str, model_dir: str, out_dir: Path, t_start: float
) -> RunReport:
    failed_marker = out_dir / "FAILED"
    if failed_marker.exists():
        failed_marker.unlink()

    log.info("run %s: resolving dataset %s", cfg.run_id, cfg.dataset.name)
    dataset_spec = registry.create("dataset", cfg.dataset.name, _resolved_dataset_params(cfg))
    dataset = dataset_spec.materialize(data_dir, cfg.dataset.path)

    log.info("run %s: resolving oracle %s", cfg.run_id, cfg.oracle.name)
    oracle_spec = registry.create("oracle", cfg.oracle.name, dict(cfg.oracle.params))
    oracle = oracle_spec.materialize(dataset, model_dir)

    evaluators = [
        Evaluator(
            explainer=registry.create("explainer", spec.name, dict(spec.params)),
            dataset=dataset,
            oracle=oracle,
            metric_names=cfg.metric_names,
        )
        for spec in cfg.explainers
    ]

    tasks = [
        (ev, inst, instance_seed(cfg.seed, ev.explainer.name, inst.id))
        for ev in evaluators
        for inst in dataset.instances
    ]
    log.info(
        "run %s: %d tasks (%d explainers x %d instances), parallelism %d",
        cfg.run_id, len(tasks), len(evaluators), len(dataset), cfg.parallelism,
    )
    if cfg.parallelism > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
            results = list(pool.map(lambda t: t[0].evaluate(t[1], t[2]), tasks))
    else:
        results = [ev.evaluate(inst, seed) for ev, inst, seed in tasks]

    records: dict[str, tuple[EvaluationRecord, ...]] = {}
    for ev in evaluators:
        mine = sorted(
            (r for r in results if r.explainer == ev.explainer.name),
            key=lambda r: r.instance_id,
        )
        if len(mine) != len(dataset):
            raise RunError(
                f"{ev.explainer.name}: {len(mine)} records for {len(dataset)} instances"
            )
        ev.total_calls = sum(r.calls for r in mine)
        records[ev.explainer.name] = tuple(mine)
        log.info(
            "run %s: %s done, %d oracle calls total",
            cfg.run_id, ev.explainer.name, ev.total_calls,
        )

    aggregates = {name: aggregate(list(recs)) for name, recs in records.items()}
    report = RunReport(
        run_id=cfg.run_id,
        config=cfg.to_json_obj(),
        environment={
            "version": cfbench.__version__,
            "python": platform.python_version(),
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        },
        total_wall_time_s=time.perf_counter() - t_start,
        records=records,
        aggregates=aggregates,
    )
    paths = write_report(report, cfg.output_formats, out_dir, figures=cfg.figures)
    for kind, path in sorted(paths.items()):
        log.info("run %s: wrote %s (%s)", cfg.run_id, path, kind)
    return report
