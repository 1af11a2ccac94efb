"""Config-driven experiment runner and report writer."""
from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
import time
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from . import datasets
from .combinatorial import PARTITIONERS, make_partitioner, modularity
from .graph import Graph, GroundTruthCover, parse_community_file
from .lfr import LfrParams, generate_lfr
from .metrics import evaluate
from .pipeline import METHODS, SOURCES, CommunityEmbedding

logger = logging.getLogger(__name__)

CSV_HEADER = ("dataset", "method", "partition_source", "seed", "K", "nmi", "nmi_sqrt", "omega", "f1",
              "modularity", "seconds")
METRICS = ("nmi", "nmi_sqrt", "omega", "f1", "modularity", "seconds")
COMB_METHODS = tuple(f"comb.{name}" for name in PARTITIONERS)
GRID_KEYS = ("p", "q", "window")
WALK_KEYS = ("p", "q", "walk_len", "walks_per_node")
SGNS_KEYS = ("dim", "window", "negatives", "epochs", "lr", "alpha")
KMEANS_KEYS = ("restarts", "normalize")


class ConfigError(ValueError):
    """Invalid or infeasible run configuration."""


@dataclass(frozen=True)
class DatasetSpec:
    """A named network, an edge-list (+ community) file pair, or an LFR family."""

    name: str
    edges: str | None = None
    communities: str | None = None
    lfr: dict | None = None
    instances: int = 1

    def load(self) -> list[tuple[str, Graph, GroundTruthCover | None]]:
        if self.lfr is not None:
            base = dict(self.lfr)
            seed0 = int(base.pop("seed", 0))
            out = []
            for i in range(self.instances):
                graph, cover = generate_lfr(LfrParams(seed=seed0 + i, **base))
                out.append((f"{self.name}#{i}" if self.instances > 1 else self.name, graph, cover))
            return out
        if self.edges is not None:
            graph, cover = datasets.load_files(self.edges, self.communities)
            return [(self.name, graph, cover)]
        graph, cover = datasets.load(self.name)
        return [(self.name, graph, cover)]

    @property
    def has_truth(self) -> bool:
        return self.lfr is not None or self.communities is not None or self.edges is None


@dataclass
class RunConfig:
    datasets: list[DatasetSpec]
    methods: list[str]
    partition_sources: list[str] = field(default_factory=lambda: ["lpa"])
    seeds: list[int] = field(default_factory=lambda: [0])
    walk: dict = field(default_factory=dict)
    sgns: dict = field(default_factory=dict)
    kmeans: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    partition_file: str | None = None
    output: str | None = None
    format: str = "csv"
    deterministic: bool = True
    timing: bool | None = None
    workers: int = 1

    def __post_init__(self):
        self.validate()

    @property
    def record_time(self) -> bool:
        # wall time would break byte-identical reruns, so it is off in deterministic mode by default
        return (not self.deterministic) if self.timing is None else bool(self.timing)

    def validate(self) -> None:
        if not self.datasets:
            raise ConfigError("no dataset given")
        if not self.methods:
            raise ConfigError("no method given")
        for m in self.methods:
            if m not in METHODS and m not in COMB_METHODS:
                raise ConfigError(f"unknown method {m!r}; choose from {sorted(METHODS) + list(COMB_METHODS)}")
        embedding = [m for m in self.methods if m in METHODS]
        if embedding and not self.partition_sources:
            raise ConfigError("embedding methods need at least one partition_source (it supplies K)")
        for s in self.partition_sources:
            if s not in SOURCES:
                raise ConfigError(f"unknown partition_source {s!r}; choose from {list(SOURCES)}")
        if embedding and "oracle" in self.partition_sources:
            missing = [d.name for d in self.datasets if not d.has_truth]
            if missing:
                raise ConfigError(f"oracle partition source needs ground truth; missing for {missing}")
        if embedding and "file" in self.partition_sources and not self.partition_file:
            raise ConfigError("partition_source 'file' needs partition_file")
        if not self.seeds or not all(isinstance(s, int) and not isinstance(s, bool) for s in self.seeds):
            raise ConfigError("seeds must be a non-empty list of integers")
        for name, section, keys in (("walk", self.walk, WALK_KEYS), ("sgns", self.sgns, SGNS_KEYS),
                                    ("kmeans", self.kmeans, KMEANS_KEYS), ("grid", self.grid, GRID_KEYS)):
            if not isinstance(section, dict):
                raise ConfigError(f"{name} must be a mapping")
            unknown = set(section) - set(keys)
            if unknown:
                raise ConfigError(f"unknown {name} keys {sorted(unknown)}; allowed: {list(keys)}")
        for key, values in self.grid.items():
            if not isinstance(values, list) or not values:
                raise ConfigError(f"grid.{key} must be a non-empty list")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be 'csv' or 'json'")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.deterministic and self.workers > 1:
            raise ConfigError("deterministic mode runs single-threaded; set workers: 1 or deterministic: false")
        try:
            est = CommunityEmbedding(**self.estimator_params())
            est.set_params(**{k: v[0] for k, v in self.grid.items()})
            from .walks import WalkParams
            from .embed import SgnsParams
            WalkParams(**{k: self.walk[k] for k in WALK_KEYS if k in self.walk})
            SgnsParams(**{k: self.sgns[k] for k in SGNS_KEYS if k in self.sgns})
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None

    def estimator_params(self) -> dict:
        return {**self.walk, **self.sgns, **self.kmeans, "workers": self.workers}

    @classmethod
    def from_dict(cls, raw: dict, base_dir: str | Path = ".") -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a mapping")
        raw = dict(raw)
        base = Path(base_dir)

        def path(p):
            return None if p is None else str((base / p) if not Path(p).is_absolute() else Path(p))

        specs = raw.pop("datasets", None)
        if specs is None:
            specs = [raw.pop("dataset")] if "dataset" in raw else []
        elif "dataset" in raw:
            raise ConfigError("give either dataset or datasets, not both")
        parsed = []
        for spec in specs if isinstance(specs, list) else [specs]:
            if isinstance(spec, str):
                parsed.append(DatasetSpec(spec))
            elif isinstance(spec, dict) and "lfr" in spec:
                lfr = spec["lfr"]
                if not isinstance(lfr, dict):
                    raise ConfigError("lfr must be a mapping of generator parameters")
                try:
                    LfrParams(**lfr)
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"lfr: {exc}") from None
                name = spec.get("name", f"lfr{lfr.get('n', 1000)}_mu{lfr.get('mu', 0.3)}")
                parsed.append(DatasetSpec(name, lfr=lfr, instances=int(spec.get("instances", 1))))
            elif isinstance(spec, dict) and "edges" in spec:
                name = spec.get("name", Path(spec["edges"]).stem)
                parsed.append(DatasetSpec(name, edges=path(spec["edges"]), communities=path(spec.get("communities"))))
            else:
                raise ConfigError(f"cannot interpret dataset entry {spec!r}")
        if "method" in raw:
            raw.setdefault("methods", [raw.pop("method")])
        if "partition_source" in raw:
            raw.setdefault("partition_sources", [raw.pop("partition_source")])
        for key in ("methods", "partition_sources"):
            if isinstance(raw.get(key), str):
                raw[key] = [raw[key]]
        if raw.get("partition_file"):
            raw["partition_file"] = path(raw["partition_file"])
        known = {f.name for f in fields(cls)} - {"datasets"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        if "methods" not in raw:
            raise ConfigError("config needs method or methods")
        return cls(datasets=parsed, **raw)

    @classmethod
    def from_yaml(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            raw = yaml.safe_load(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed config: {exc}") from None
        return cls.from_dict(raw or {}, path.parent)


@dataclass
class RunRecord:
    dataset: str
    method: str
    partition_source: str
    seed: int
    K: int
    nmi: float = math.nan
    nmi_sqrt: float = math.nan
    omega: float = math.nan
    f1: float = math.nan
    modularity: float = math.nan
    seconds: float = 0.0
    error: str | None = None


@dataclass
class EvalReport:
    records: list[RunRecord]
    metadata: dict = field(default_factory=dict)

    def groups(self) -> list[dict]:
        """Median / min / max of every metric per (dataset family, method, partition source)."""
        keyed: dict[tuple, list[RunRecord]] = {}
        for r in self.records:
            keyed.setdefault((r.dataset.split("#")[0], r.method, r.partition_source), []).append(r)
        out = []
        for (ds, method, source), recs in keyed.items():
            ok = [r for r in recs if r.error is None]
            row = {"dataset": ds, "method": method, "partition_source": source,
                   "runs": len(recs), "errors": len(recs) - len(ok)}
            for m in ("K",) + METRICS:
                vals = np.array([getattr(r, m) for r in ok], dtype=np.float64)
                vals = vals[~np.isnan(vals)]
                stats = (np.median(vals), vals.min(), vals.max()) if len(vals) else (math.nan,) * 3
                row.update({f"{m}_median": float(stats[0]), f"{m}_min": float(stats[1]), f"{m}_max": float(stats[2])})
            out.append(row)
        return out

    def median(self, method: str, partition_source: str, metric: str = "nmi", dataset: str | None = None) -> float:
        for g in self.groups():
            if g["method"] == method and g["partition_source"] == partition_source and (
                    dataset is None or g["dataset"] == dataset):
                return g[f"{metric}_median"]
        raise KeyError((method, partition_source, dataset))


def _grid_points(grid: dict) -> list[dict]:
    keys = [k for k in GRID_KEYS if k in grid]
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def _label(method: str, point: dict) -> str:
    if not point:
        return method
    short = {"window": "ws"}
    return method + "[" + ",".join(f"{short.get(k, k)}={v}" for k, v in point.items()) + "]"


def _score(record: RunRecord, graph: Graph, cover, labels) -> None:
    record.modularity = modularity(graph, labels)
    if cover is not None:
        scores = evaluate(cover, labels)
        record.nmi, record.nmi_sqrt, record.omega, record.f1 = scores.nmi, scores.nmi_sqrt, scores.omega, scores.f1


def run_method(config: RunConfig) -> EvalReport:
    """Run every (dataset, method, source, grid point, seed) cell of ``config``.

    A failing cell becomes an error row; the run continues.
    """
    config.validate()
    partition = None
    records: list[RunRecord] = []
    for spec in config.datasets:
        for ds_name, graph, cover in spec.load():
            if config.partition_file and "file" in config.partition_sources:
                partition = parse_community_file(Path(config.partition_file).read_text(encoding="utf-8"), graph)
            for method in config.methods:
                if method in COMB_METHODS:
                    cells = [(method, "none", {})]
                else:
                    cells = [(method, src, pt) for src in config.partition_sources for pt in _grid_points(config.grid)]
                for m, src, point in cells:
                    for seed in config.seeds:
                        records.append(_run_cell(config, ds_name, graph, cover, m, src, point, seed, partition))
    meta = {"deterministic": config.deterministic, "seeds": list(config.seeds),
            "lfr_instances": {d.name: d.instances for d in config.datasets if d.lfr is not None}}
    return EvalReport(records, meta)


def _run_cell(config, ds_name, graph, cover, method, src, point, seed, partition) -> RunRecord:
    record = RunRecord(ds_name, _label(method, point), src, seed, 0)
    start = time.perf_counter()
    try:
        if method in COMB_METHODS:
            est = make_partitioner(method.split(".", 1)[1], seed).fit(graph)
            labels = est.partition_
        else:
            if src == "oracle" and cover is None:
                raise ValueError("oracle source without ground truth")
            params = {**config.estimator_params(), **point}
            est = CommunityEmbedding(method=method, partition_source=src, seed=seed,
                                     partition=partition.to_partition() if src == "file" else None, **params)
            est.fit(graph, cover)
            labels = est.partition_
        record.K = est.n_clusters_ if method in METHODS else est.n_communities_
        _score(record, graph, cover, labels)
    except Exception as exc:  # recorded, not raised: one bad cell must not sink the grid
        logger.error("%s %s/%s seed %d failed: %s", ds_name, record.method, src, seed, exc)
        record.error = f"{type(exc).__name__}: {exc}"
    if config.record_time:
        record.seconds = time.perf_counter() - start
    return record


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.6f}"


def report_csv(report: EvalReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in report.records:
        w.writerow([r.dataset, r.method, r.partition_source, r.seed, r.K] +
                   [_fmt(getattr(r, m)) for m in METRICS])
    return buf.getvalue()


def _round(x):
    if isinstance(x, float):
        return None if math.isnan(x) else round(x, 6)
    return x


def report_json(report: EvalReport) -> str:
    records = []
    for r in report.records:
        row = {k: _round(getattr(r, k)) for k in CSV_HEADER}
        if r.error is not None:
            row["error"] = r.error
        records.append(row)
    groups = [{k: _round(v) for k, v in g.items()} for g in report.groups()]
    return json.dumps({"records": records, "groups": groups, "metadata": report.metadata}, indent=2) + "\n"


def emit_report(report: EvalReport, path: str | Path, fmt: str = "csv") -> Path:
    """Write ``report`` as CSV (records only) or JSON (records, group medians, metadata)."""
    if not report.records:
        raise ValueError("empty report")
    if fmt not in ("csv", "json"):
        raise ValueError("fmt must be 'csv' or 'json'")
    text = report_csv(report) if fmt == "csv" else report_json(report)
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return path


def read_csv_report(text: str) -> EvalReport:
    """Parse :func:`report_csv` output back into records."""
    rows = list(csv.DictReader(io.StringIO(text)))
    if rows and tuple(rows[0].keys()) != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    records = []
    for row in rows:
        records.append(RunRecord(row["dataset"], row["method"], row["partition_source"], int(row["seed"]),
                                 int(row["K"]), *(float(row[m]) for m in METRICS)))
    return EvalReport(records)
