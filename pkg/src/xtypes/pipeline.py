"""Pipeline orchestration: configuration, staged artifacts, caching, and
the end-to-end run.

Stages write their outputs under one artifact directory and record a
content hash of their inputs in ``stage_meta.json``; a stage whose inputs
are unchanged and whose outputs still exist is skipped as "cached".
Artifacts contain no absolute paths or timestamps, so two runs with the
same configuration produce byte-identical files wherever they execute.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import logging
import os
from contextlib import contextmanager
from dataclasses import dataclass, replace
from pathlib import Path

from .category_clf import CategoryModel, train_category
from .clustering import ClusterModel, fit_kmeans
from .dataset import (
    load_smart_json,
    report_unknown_types,
    save_smart_json,
    split_train_validation,
)
from .errors import ConfigError, DataError, StageError
from .evaluate import (
    MODE_END_TO_END,
    MODE_TYPE_ONLY,
    MODES,
    EvalReport,
    evaluate_run,
    format_report_table,
    load_predictions,
    save_predictions,
)
from .kg_store import load_kg_tables
from .linear import DEFAULT_BATCH_SIZE, TrainConfig
from .matcher import (
    ClusterScorer,
    MatcherModel,
    QuestionFeaturizer,
    import_external_scores,
    train_matcher,
)
from .ranker import (
    DEFAULT_CLUSTERS_OPENED,
    DEFAULT_TOP_K,
    FusionModel,
    RankerModel,
    fit_fusion,
    predict_topk,
    train_ranker,
)
from .type_repr import (
    KIND_DESCRIPTION,
    KIND_JACCARD,
    KIND_LOADED,
    KIND_QUESTION_TFIDF,
    MATRIX_KINDS,
    assemble_type_descriptions,
    build_jaccard_repr,
    build_question_tfidf_repr,
    load_embedding_repr,
    normalize_repr,
    read_type_matrix,
    write_description_documents,
    write_type_matrix,
)

log = logging.getLogger(__name__)

PIPELINE_VERSION = "1"

METRIC_NDCG = "ndcg"
METRIC_MRR = "mrr"
PRIMARY_METRIC_KEY = {METRIC_NDCG: "ndcg@3", METRIC_MRR: "mrr"}

REPR_FILE = "repr.tsv"
DESCRIPTIONS_FILE = "descriptions.tsv"
CLUSTERS_FILE = "clusters.json"
QUESTION_CLUSTERS_FILE = "question_clusters.tsv"
MODEL_FILE = "model.json"
PREDICTIONS_FILE = "predictions.json"
REPORT_JSON_FILE = "report.json"
REPORT_TEXT_FILE = "report.txt"
STAGE_META_FILE = "stage_meta.json"
LOCK_FILE = ".lock"

_CONFIG_SCHEMA = {
    "paths": {"kg_dir", "train_json", "test_json", "artifacts", "embedding_file", "external_scores"},
    "model": {
        "repr",
        "k",
        "b",
        "k_out",
        "seed",
        "epochs",
        "learning_rate",
        "l2",
        "batch_size",
        "split_ratio",
    },
    "evaluate": {"metric", "mode"},
}


@dataclass(frozen=True)
class PipelineConfig:
    kg_dir: str = ""
    train_json: str = ""
    test_json: str = ""
    artifacts: str = "artifacts"
    embedding_file: str = ""
    external_scores: str = ""
    repr_kind: str = KIND_QUESTION_TFIDF
    k: int = 64
    b: int = DEFAULT_CLUSTERS_OPENED
    k_out: int = DEFAULT_TOP_K
    seed: int = 7
    epochs: int = 30
    learning_rate: float = 0.1
    l2: float = 1e-4
    batch_size: int = DEFAULT_BATCH_SIZE
    split_ratio: float = 0.8
    metric: str = METRIC_NDCG
    mode: str = MODE_TYPE_ONLY

    def validate(self) -> None:
        if self.repr_kind not in MATRIX_KINDS:
            raise ConfigError(f"repr must be one of {MATRIX_KINDS}, got {self.repr_kind!r}")
        if self.k < 1 or self.b < 1 or self.k_out < 1:
            raise ConfigError("k, b, and k_out must be positive")
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be positive")
        if self.learning_rate <= 0 or self.l2 < 0:
            raise ConfigError("learning_rate must be positive and l2 non-negative")
        if not 0.0 < self.split_ratio < 1.0:
            raise ConfigError("split_ratio must lie strictly between 0 and 1")
        if self.metric not in PRIMARY_METRIC_KEY:
            raise ConfigError(f"metric must be 'ndcg' or 'mrr', got {self.metric!r}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.repr_kind in (KIND_LOADED, KIND_DESCRIPTION) and not self.embedding_file:
            raise ConfigError(f"repr {self.repr_kind} needs paths.embedding_file")

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            l2=self.l2,
            batch_size=self.batch_size,
            seed=self.seed,
        )

    def echo(self) -> dict:
        """Configuration fingerprint embedded in artifacts.  Deliberately
        path-free so artifact bytes do not depend on where files live."""
        return {
            "version": PIPELINE_VERSION,
            "repr": self.repr_kind,
            "k": self.k,
            "b": self.b,
            "k_out": self.k_out,
            "seed": self.seed,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "l2": self.l2,
            "batch_size": self.batch_size,
            "split_ratio": self.split_ratio,
            "metric": self.metric,
            "mode": self.mode,
        }


def load_config_file(path: str | Path) -> PipelineConfig:
    file_path = Path(path)
    if not file_path.is_file():
        raise ConfigError(f"config file not found: {file_path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(file_path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {file_path}: {exc}") from exc
    for section in parser.sections():
        if section not in _CONFIG_SCHEMA:
            raise ConfigError(f"{file_path.name}: unknown config section [{section}]")
        for key in parser[section]:
            if key not in _CONFIG_SCHEMA[section]:
                raise ConfigError(f"{file_path.name}: unknown key {key!r} in [{section}]")

    def get(section: str, key: str, fallback):
        if not parser.has_option(section, key):
            return fallback
        raw = parser.get(section, key)
        try:
            if isinstance(fallback, bool):
                return parser.getboolean(section, key)
            if isinstance(fallback, int):
                return int(raw)
            if isinstance(fallback, float):
                return float(raw)
        except ValueError as exc:
            raise ConfigError(f"{file_path.name}: bad value for {section}.{key}: {raw!r}") from exc
        return raw

    defaults = PipelineConfig()
    return PipelineConfig(
        kg_dir=get("paths", "kg_dir", defaults.kg_dir),
        train_json=get("paths", "train_json", defaults.train_json),
        test_json=get("paths", "test_json", defaults.test_json),
        artifacts=get("paths", "artifacts", defaults.artifacts),
        embedding_file=get("paths", "embedding_file", defaults.embedding_file),
        external_scores=get("paths", "external_scores", defaults.external_scores),
        repr_kind=get("model", "repr", defaults.repr_kind),
        k=get("model", "k", defaults.k),
        b=get("model", "b", defaults.b),
        k_out=get("model", "k_out", defaults.k_out),
        seed=get("model", "seed", defaults.seed),
        epochs=get("model", "epochs", defaults.epochs),
        learning_rate=get("model", "learning_rate", defaults.learning_rate),
        l2=get("model", "l2", defaults.l2),
        batch_size=get("model", "batch_size", defaults.batch_size),
        split_ratio=get("model", "split_ratio", defaults.split_ratio),
        metric=get("evaluate", "metric", defaults.metric),
        mode=get("evaluate", "mode", defaults.mode),
    )


def _require_file(path: str, what: str) -> Path:
    if not path:
        raise ConfigError(f"missing required path: {what}")
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigError(f"{what} does not exist: {file_path}")
    return file_path


def atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _hash_bytes(*parts: bytes) -> str:
    digest = hashlib.sha256()
    for part in parts:
        digest.update(len(part).to_bytes(8, "big"))
        digest.update(part)
    return digest.hexdigest()


def _file_digest(path: Path) -> bytes:
    return hashlib.sha256(path.read_bytes()).digest()


def _json_digest(payload) -> bytes:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).digest()


class StageCache:
    """Per-artifact-dir record of stage input hashes and outputs."""

    def __init__(self, artifacts: Path) -> None:
        self.artifacts = artifacts
        self.meta_path = artifacts / STAGE_META_FILE
        self.meta: dict[str, dict] = {}
        if self.meta_path.is_file():
            try:
                self.meta = json.loads(self.meta_path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError):
                log.warning("unreadable %s; all stages will rebuild", STAGE_META_FILE)
                self.meta = {}

    def is_fresh(self, stage: str, input_hash: str, outputs: list[str]) -> bool:
        entry = self.meta.get(stage)
        if not entry or entry.get("input_hash") != input_hash:
            return False
        return all((self.artifacts / name).is_file() for name in outputs)

    def record(self, stage: str, input_hash: str, outputs: list[str]) -> None:
        self.meta[stage] = {"input_hash": input_hash, "outputs": sorted(outputs)}
        atomic_write_text(
            self.meta_path, json.dumps(self.meta, indent=2, sort_keys=True) + "\n"
        )


@contextmanager
def artifact_lock(artifacts: Path):
    """One command at a time per artifact directory."""
    artifacts.mkdir(parents=True, exist_ok=True)
    lock_path = artifacts / LOCK_FILE
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise StageError(
            f"artifact dir {artifacts} is locked by another run "
            f"(remove {lock_path} if that run is dead)"
        ) from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        try:
            os.unlink(lock_path)
        except OSError:
            pass


def _run_stage(
    name: str, cache: StageCache, input_hash: str, outputs: list[str], builder
) -> str:
    if cache.is_fresh(name, input_hash, outputs):
        log.info("stage %s: cached", name)
        return "cached"
    log.info("stage %s: building", name)
    try:
        builder()
    except (ConfigError, DataError):
        raise
    except Exception as exc:
        raise StageError(f"stage {name} failed: {exc}") from exc
    missing = [n for n in outputs if not (cache.artifacts / n).is_file()]
    if missing:
        raise StageError(f"stage {name} did not produce {missing[0]}")
    cache.record(name, input_hash, outputs)
    return "built"


@dataclass
class PipelineModel:
    """Everything predict needs, bar the cluster model it was trained
    against (referenced by content hash)."""

    version: str
    config_echo: dict
    cluster_hash: str
    featurizer: QuestionFeaturizer
    category: CategoryModel
    matcher: MatcherModel
    ranker: RankerModel
    fusion: FusionModel

    def save(self, path: Path) -> None:
        payload = {
            "version": self.version,
            "config": self.config_echo,
            "cluster_hash": self.cluster_hash,
            "featurizer": self.featurizer.to_dict(),
            "category": self.category.to_dict(),
            "matcher": self.matcher.to_dict(),
            "ranker": self.ranker.to_dict(),
            "fusion": self.fusion.to_dict(),
        }
        atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: Path) -> "PipelineModel":
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read pipeline model {path}: {exc}") from exc
        if "version" not in payload:
            raise DataError(f"pipeline model {path} has no version string")
        try:
            return cls(
                version=str(payload["version"]),
                config_echo=dict(payload["config"]),
                cluster_hash=str(payload["cluster_hash"]),
                featurizer=QuestionFeaturizer.from_dict(payload["featurizer"]),
                category=CategoryModel.from_dict(payload["category"]),
                matcher=MatcherModel.from_dict(payload["matcher"]),
                ranker=RankerModel.from_dict(payload["ranker"]),
                fusion=FusionModel.from_dict(payload["fusion"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed pipeline model {path}: {exc}") from exc


def _load_inputs(config: PipelineConfig):
    kg_dir = _require_file(config.kg_dir, "paths.kg_dir")
    train_path = _require_file(config.train_json, "paths.train_json")
    type_system, entity_index = load_kg_tables(kg_dir)
    train = load_smart_json(train_path)
    report_unknown_types(train, type_system.types)
    return type_system, entity_index, train


# ---------------------------------------------------------------- stages


def stage_repr(config: PipelineConfig, cache: StageCache) -> str:
    kg_dir = _require_file(config.kg_dir, "paths.kg_dir")
    train_path = _require_file(config.train_json, "paths.train_json")
    parts = [
        b"repr",
        config.repr_kind.encode(),
        _file_digest(train_path),
    ]
    for name in sorted(p.name for p in kg_dir.glob("*.tsv")):
        parts.append(_file_digest(kg_dir / name))
    if config.embedding_file:
        parts.append(_file_digest(_require_file(config.embedding_file, "paths.embedding_file")))
    input_hash = _hash_bytes(*parts)
    outputs = [REPR_FILE, DESCRIPTIONS_FILE]

    def build() -> None:
        type_system, entity_index, train = _load_inputs(config)
        if not train.type_vocabulary:
            raise DataError("training data has no resource questions with gold types")
        if config.repr_kind == KIND_QUESTION_TFIDF:
            matrix, _ = build_question_tfidf_repr(train)
        elif config.repr_kind == KIND_JACCARD:
            matrix = build_jaccard_repr(train.type_vocabulary, entity_index)
        else:
            matrix = load_embedding_repr(config.embedding_file, train.type_vocabulary)
        write_type_matrix(matrix, cache.artifacts / REPR_FILE)
        documents = assemble_type_descriptions(
            type_system, entity_index, train.type_vocabulary
        )
        write_description_documents(documents, cache.artifacts / DESCRIPTIONS_FILE)

    return _run_stage("repr", cache, input_hash, outputs, build)


def stage_cluster(config: PipelineConfig, cache: StageCache) -> str:
    repr_path = cache.artifacts / REPR_FILE
    if not repr_path.is_file():
        raise StageError("cluster stage needs the repr stage output; run build-repr first")
    train_path = _require_file(config.train_json, "paths.train_json")
    input_hash = _hash_bytes(
        b"cluster",
        _file_digest(repr_path),
        _file_digest(train_path),
        str(config.k).encode(),
        str(config.seed).encode(),
    )
    outputs = [CLUSTERS_FILE, QUESTION_CLUSTERS_FILE]

    def build() -> None:
        matrix = normalize_repr(read_type_matrix(repr_path))
        model = fit_kmeans(matrix, k=config.k, seed=config.seed)
        model.save(cache.artifacts / CLUSTERS_FILE)
        train = load_smart_json(train_path)
        lines = []
        for question in train.questions:
            clustered = [t for t in question.gold_types if t in model.assignment]
            if clustered:
                lines.append(f"{question.id}\t{model.assignment[clustered[0]]}")
        atomic_write_text(
            cache.artifacts / QUESTION_CLUSTERS_FILE, "\n".join(sorted(lines)) + "\n"
        )

    return _run_stage("cluster", cache, input_hash, outputs, build)


def stage_train(config: PipelineConfig, cache: StageCache) -> str:
    clusters_path = cache.artifacts / CLUSTERS_FILE
    if not clusters_path.is_file():
        raise StageError("train stage needs the cluster stage output; run cluster first")
    train_path = _require_file(config.train_json, "paths.train_json")
    hyper = {
        "epochs": config.epochs,
        "learning_rate": config.learning_rate,
        "l2": config.l2,
        "batch_size": config.batch_size,
        "seed": config.seed,
        "split_ratio": config.split_ratio,
        "b": config.b,
    }
    input_hash = _hash_bytes(
        b"train", _file_digest(clusters_path), _file_digest(train_path), _json_digest(hyper)
    )
    outputs = [MODEL_FILE]

    def build() -> None:
        cluster_model = ClusterModel.load(clusters_path)
        full = load_smart_json(train_path)
        train_part, val_part = split_train_validation(
            full, ratio=config.split_ratio, seed=config.seed
        )
        featurizer = QuestionFeaturizer.fit(train_part)
        train_cfg = config.train_config()
        category = train_category(train_part, featurizer, train_cfg)
        matcher = train_matcher(train_part, cluster_model, featurizer, train_cfg)
        ranker = train_ranker(train_part, cluster_model, featurizer, train_cfg)
        scorer = ClusterScorer(matcher, featurizer)
        fusion = fit_fusion(
            val_part, scorer, ranker, cluster_model, featurizer, b=config.b, config=train_cfg
        )
        model = PipelineModel(
            version=PIPELINE_VERSION,
            config_echo=config.echo(),
            cluster_hash=_file_digest(clusters_path).hex(),
            featurizer=featurizer,
            category=category,
            matcher=matcher,
            ranker=ranker,
            fusion=fusion,
        )
        model.save(cache.artifacts / MODEL_FILE)

    return _run_stage("train", cache, input_hash, outputs, build)


def stage_predict(config: PipelineConfig, cache: StageCache) -> str:
    model_path = cache.artifacts / MODEL_FILE
    clusters_path = cache.artifacts / CLUSTERS_FILE
    for path, hint in ((model_path, "train"), (clusters_path, "cluster")):
        if not path.is_file():
            raise StageError(f"predict stage needs the {hint} stage output")
    test_path = _require_file(config.test_json, "paths.test_json")
    parts = [
        b"predict",
        _file_digest(model_path),
        _file_digest(clusters_path),
        _file_digest(test_path),
        str(config.b).encode(),
        str(config.k_out).encode(),
    ]
    if config.external_scores:
        parts.append(_file_digest(_require_file(config.external_scores, "paths.external_scores")))
    input_hash = _hash_bytes(*parts)
    outputs = [PREDICTIONS_FILE]

    def build() -> None:
        model = PipelineModel.load(model_path)
        cluster_model = ClusterModel.load(clusters_path)
        if model.cluster_hash != _file_digest(clusters_path).hex():
            raise StageError(
                "model.json was trained against a different clusters.json; re-run train"
            )
        external = None
        if config.external_scores:
            external = import_external_scores(config.external_scores, cluster_model.k)
        scorer = ClusterScorer(model.matcher, model.featurizer, external)
        test = load_smart_json(test_path)
        predictions = [
            predict_topk(
                question,
                model.category,
                model.featurizer,
                scorer,
                model.ranker,
                cluster_model,
                model.fusion,
                b=config.b,
                k_out=config.k_out,
            )
            for question in test.questions
        ]
        save_predictions(predictions, cache.artifacts / PREDICTIONS_FILE)

    return _run_stage("predict", cache, input_hash, outputs, build)


def stage_evaluate(config: PipelineConfig, cache: StageCache) -> str:
    predictions_path = cache.artifacts / PREDICTIONS_FILE
    if not predictions_path.is_file():
        raise StageError("evaluate stage needs the predict stage output")
    kg_dir = _require_file(config.kg_dir, "paths.kg_dir")
    test_path = _require_file(config.test_json, "paths.test_json")
    parts = [
        b"evaluate",
        _file_digest(predictions_path),
        _file_digest(test_path),
        config.metric.encode(),
    ]
    for name in sorted(p.name for p in kg_dir.glob("*.tsv")):
        parts.append(_file_digest(kg_dir / name))
    input_hash = _hash_bytes(*parts)
    outputs = [REPORT_JSON_FILE, REPORT_TEXT_FILE]

    def build() -> None:
        type_system, _ = load_kg_tables(kg_dir)
        gold = load_smart_json(test_path)
        predictions = load_predictions(predictions_path)
        primary = PRIMARY_METRIC_KEY[config.metric]
        reports = {
            mode: evaluate_run(type_system, predictions, gold, mode, primary_metric=primary)
            for mode in (MODE_TYPE_ONLY, MODE_END_TO_END)
        }
        payload = {mode: report.to_dict() for mode, report in reports.items()}
        atomic_write_text(
            cache.artifacts / REPORT_JSON_FILE,
            json.dumps(payload, indent=2, sort_keys=True) + "\n",
        )
        table = format_report_table(
            [(config.repr_kind, reports[MODE_TYPE_ONLY]), (config.repr_kind, reports[MODE_END_TO_END])]
        )
        atomic_write_text(cache.artifacts / REPORT_TEXT_FILE, table + "\n")

    return _run_stage("evaluate", cache, input_hash, outputs, build)


# ---------------------------------------------------------------- commands

_STAGES = {
    "repr": stage_repr,
    "cluster": stage_cluster,
    "train": stage_train,
    "predict": stage_predict,
    "evaluate": stage_evaluate,
}
_STAGE_ORDER = ("repr", "cluster", "train", "predict", "evaluate")


def run_stages(config: PipelineConfig, upto: str = "evaluate") -> dict[str, str]:
    """Run stages in order through ``upto`` under the artifact lock."""
    config.validate()
    if upto not in _STAGE_ORDER:
        raise ValueError(f"unknown stage {upto!r}")
    artifacts = Path(config.artifacts)
    statuses: dict[str, str] = {}
    with artifact_lock(artifacts):
        cache = StageCache(artifacts)
        for stage in _STAGE_ORDER:
            statuses[stage] = _STAGES[stage](config, cache)
            if stage == upto:
                break
    return statuses


def cmd_run(config: PipelineConfig) -> tuple[dict[str, str], dict[str, EvalReport]]:
    statuses = run_stages(config, upto="evaluate")
    payload = json.loads((Path(config.artifacts) / REPORT_JSON_FILE).read_text(encoding="utf-8"))
    reports = {mode: EvalReport.from_dict(entry) for mode, entry in payload.items()}
    return statuses, reports


def cmd_sweep(config: PipelineConfig, ks: list[int]) -> dict:
    """Try each cluster count on a held-out validation split and report the
    winner (ties resolved toward the smaller k)."""
    config.validate()
    if not ks:
        raise ConfigError("sweep needs at least one k value")
    full = load_smart_json(_require_file(config.train_json, "paths.train_json"))
    artifacts = Path(config.artifacts)
    with artifact_lock(artifacts):
        sweep_dir = artifacts / "sweep"
        sweep_dir.mkdir(parents=True, exist_ok=True)
        train_part, val_part = split_train_validation(
            full, ratio=config.split_ratio, seed=config.seed
        )
        sweep_train = sweep_dir / "train.json"
        sweep_val = sweep_dir / "val.json"
        save_smart_json(train_part, sweep_train)
        save_smart_json(val_part, sweep_val)

        primary = PRIMARY_METRIC_KEY[config.metric]
        results: dict[int, float] = {}
        for k in sorted(set(ks)):
            sub = replace(
                config,
                artifacts=str(sweep_dir / f"k{k:04d}"),
                train_json=str(sweep_train),
                test_json=str(sweep_val),
                k=k,
            )
            _, reports = cmd_run(sub)
            results[k] = reports[config.mode].metric_means[primary]
        winner = min(results, key=lambda k: (-results[k], k))
        table_lines = [f"{'k':>6}  {primary} ({config.mode})"]
        for k in sorted(results):
            mark = "  <- winner" if k == winner else ""
            table_lines.append(f"{k:>6}  {results[k]:.4f}{mark}")
        summary = {
            "metric": primary,
            "mode": config.mode,
            "results": {str(k): results[k] for k in sorted(results)},
            "winner": winner,
        }
        atomic_write_text(
            artifacts / "sweep.json", json.dumps(summary, indent=2, sort_keys=True) + "\n"
        )
        atomic_write_text(artifacts / "sweep.txt", "\n".join(table_lines) + "\n")
    return summary


def ingest_summary(config: PipelineConfig) -> dict:
    """Validation pass over the input files; raises DataError on breakage."""
    type_system, entity_index, train = _load_inputs(config)
    unknown = report_unknown_types(train, type_system.types)
    summary = {
        "types": len(type_system.types),
        "root_types": len(type_system.roots),
        "entities": len(entity_index.entities),
        "train_questions": len(train.questions),
        "train_resource_questions": len(train.resource_questions()),
        "train_type_vocabulary": len(train.type_vocabulary),
        "gold_types_unknown_to_kg": len(unknown),
    }
    if config.test_json:
        test = load_smart_json(_require_file(config.test_json, "paths.test_json"))
        summary["test_questions"] = len(test.questions)
    return summary
