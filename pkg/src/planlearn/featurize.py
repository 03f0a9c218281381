"""Turn plan trees into scalar / structural / semantic feature vectors.

Two modes exist side by side:

* ``full`` uses estimated and actual per-operator metrics, mirroring the
  collection-time dataset (and leaking runtime components, which is why the
  other mode exists).
* ``estimate_only`` restricts features to planner estimates and structure:
  nothing derived from any "Actual *" field.  Every column carries a
  provenance tag so this wall is assertable, not aspirational.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import tfidf as tfidf_mod
from .plan_ingest import PlanNode, PlanTree, assign_level_numbers

META_FORMAT = "planlearn-features"
META_VERSION = 1

# Fixed operator catalog: one-hot width must be stable across datasets.
NODE_TYPE_CATALOG = (
    "Aggregate",
    "Append",
    "Bitmap Heap Scan",
    "Bitmap Index Scan",
    "CTE Scan",
    "Function Scan",
    "Gather",
    "Gather Merge",
    "Hash",
    "Hash Join",
    "Incremental Sort",
    "Index Only Scan",
    "Index Scan",
    "Limit",
    "Materialize",
    "Memoize",
    "Merge Join",
    "Nested Loop",
    "Result",
    "Seq Scan",
    "Sort",
    "Subquery Scan",
    "Unique",
    "WindowAgg",
)
OTHER_LABEL = "Other"

SOURCE_ESTIMATE = "estimate"
SOURCE_ACTUAL = "actual"
SOURCE_STRUCTURE = "structure"
SOURCE_SEMANTIC = "semantic"

# (column, provenance) in documented aggregation order.
ESTIMATE_SCALARS = (
    ("sc", SOURCE_ESTIMATE),
    ("tc", SOURCE_ESTIMATE),
    ("plan_rows", SOURCE_ESTIMATE),
    ("pw", SOURCE_ESTIMATE),
)
FULL_EXTRA_SCALARS = (
    ("st", SOURCE_ACTUAL),
    ("tt", SOURCE_ACTUAL),
    ("actual_rows", SOURCE_ACTUAL),
    ("loops", SOURCE_ACTUAL),
    ("ic", SOURCE_ACTUAL),
    ("oc", SOURCE_ACTUAL),
    ("bc", SOURCE_ACTUAL),
    ("cardinality_error", SOURCE_ACTUAL),
    ("cost_per_row", SOURCE_ACTUAL),
    ("time_per_loop", SOURCE_ACTUAL),
)


class FeaturizeError(Exception):
    pass


class LeakageError(FeaturizeError):
    """An estimate-only feature set contains an Actual-derived column."""


@dataclass(frozen=True)
class FeatureConfig:
    mode: str = "full"                   # estimate_only | full
    node_type_encoding: str = "one_hot"  # one_hot | label
    normalization: str = "zscore"        # zscore | minmax | none
    tfidf_enabled: bool = True
    tfidf_max_vocab: int = 200
    external_embeddings: str | None = None

    def __post_init__(self):
        if self.mode not in ("estimate_only", "full"):
            raise FeaturizeError(f"unknown mode {self.mode!r}")
        if self.node_type_encoding not in ("one_hot", "label"):
            raise FeaturizeError(f"unknown node_type_encoding {self.node_type_encoding!r}")
        if self.normalization not in ("zscore", "minmax", "none"):
            raise FeaturizeError(f"unknown normalization {self.normalization!r}")

    def scalar_columns(self):
        cols = list(ESTIMATE_SCALARS)
        if self.mode == "full":
            cols += list(FULL_EXTRA_SCALARS)
        return cols

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "node_type_encoding": self.node_type_encoding,
            "normalization": self.normalization,
            "tfidf_enabled": self.tfidf_enabled,
            "tfidf_max_vocab": self.tfidf_max_vocab,
            "external_embeddings": self.external_embeddings,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureConfig":
        return cls(**d)


@dataclass(frozen=True)
class FeatureColumn:
    name: str
    source: str


@dataclass
class NodeFeatureRow:
    """One Table-2-style CSV row per plan node."""

    ln: str
    pl: str
    nt: str
    pa: bool
    sc: float
    tc: float
    pw: float
    st: float
    tt: float
    ic: int
    oc: int
    bc: int
    plan_rows: float
    actual_rows: float
    loops: float
    depth: int
    subtree_size: int
    cardinality_error: float
    cost_per_row: float
    time_per_loop: float
    query_id: str = ""


@dataclass
class _NodeInfo:
    depth: int
    subtree_size: int
    oc: int | None = None
    ic: int | None = None
    bc: int | None = None


def _walk_info(node: PlanNode, depth: int, info: dict[int, _NodeInfo], with_actuals: bool):
    size = 1
    leaf_ic_sum = 0
    children_oc = 0
    for child in node.children:
        child_size, child_leaf_ic, child_oc = _walk_info(child, depth + 1, info, with_actuals)
        size += child_size
        leaf_ic_sum += child_leaf_ic
        children_oc += child_oc
    entry = _NodeInfo(depth=depth, subtree_size=size)
    if with_actuals:
        entry.oc = round(node.actual_rows * node.loops)
        if node.children:
            entry.ic = children_oc
        elif node.rows_removed_by_filter is not None:
            entry.ic = entry.oc + round(node.rows_removed_by_filter * node.loops)
        else:
            entry.ic = entry.oc
        leaf_ic_sum = entry.ic if not node.children else leaf_ic_sum
        entry.bc = leaf_ic_sum
    info[id(node)] = entry
    return size, leaf_ic_sum, (entry.oc or 0)


def _tree_info(tree: PlanTree, need_actuals: bool) -> dict[int, _NodeInfo]:
    if need_actuals and not tree.root.has_actuals:
        raise FeaturizeError(
            "plan has no actual metrics (plain EXPLAIN); full-mode features need "
            "an ANALYZE trace"
        )
    info: dict[int, _NodeInfo] = {}
    _walk_info(tree.root, 1, info, with_actuals=need_actuals and tree.root.has_actuals)
    return info


def node_feature_rows(tree: PlanTree) -> list[NodeFeatureRow]:
    """Per-node rows with level numbers, cardinalities, and derived metrics."""
    info = _tree_info(tree, need_actuals=True)
    rows = []
    for ln, pl, node in assign_level_numbers(tree):
        e = info[id(node)]
        oc = e.oc
        rows.append(
            NodeFeatureRow(
                ln=ln.render(),
                pl=pl,
                nt=node.node_type,
                pa=node.parallel_aware,
                sc=node.startup_cost,
                tc=node.total_cost,
                pw=node.plan_width,
                st=node.actual_startup_ms,
                tt=node.actual_total_ms,
                ic=e.ic,
                oc=oc,
                bc=e.bc,
                plan_rows=node.plan_rows,
                actual_rows=node.actual_rows,
                loops=node.loops,
                depth=e.depth,
                subtree_size=e.subtree_size,
                cardinality_error=(node.actual_rows * node.loops) / max(node.plan_rows, 1.0),
                cost_per_row=node.total_cost / max(oc, 1),
                time_per_loop=node.actual_total_ms / max(node.loops, 1.0),
                query_id=tree.query_id,
            )
        )
    return rows


def structural_summary(tree: PlanTree) -> dict[str, float]:
    """Plan-wide shape statistics plus per-operator counts over the catalog."""
    info = _tree_info(tree, need_actuals=False)
    depths = [e.depth for e in info.values()]
    counts = {label: 0 for label in NODE_TYPE_CATALOG}
    counts[OTHER_LABEL] = 0
    parallel = 0
    for _, _, node in assign_level_numbers(tree):
        label = node.node_type if node.node_type in counts else OTHER_LABEL
        counts[label] += 1
        parallel += int(node.parallel_aware)
    out = {
        "node_count": float(len(depths)),
        "max_depth": float(max(depths)),
        "mean_depth": float(sum(depths)) / len(depths),
        "parallel_aware_count": float(parallel),
    }
    for label in (*NODE_TYPE_CATALOG, OTHER_LABEL):
        out[f"nt_count_{label.lower().replace(' ', '_')}"] = float(counts[label])
    return out


def _node_scalars(node: PlanNode, e: _NodeInfo, mode: str) -> list[float]:
    vals = [node.startup_cost, node.total_cost, node.plan_rows, node.plan_width]
    if mode == "full":
        vals += [
            node.actual_startup_ms,
            node.actual_total_ms,
            node.actual_rows,
            node.loops,
            float(e.ic),
            float(e.oc),
            float(e.bc),
            (node.actual_rows * node.loops) / max(node.plan_rows, 1.0),
            node.total_cost / max(e.oc, 1),
            node.actual_total_ms / max(node.loops, 1.0),
        ]
    return vals


def feature_columns(config: FeatureConfig, semantic_names: list[str]) -> list[FeatureColumn]:
    """Column metadata for aggregate vectors; a pure function of the inputs."""
    cols = []
    for name, source in config.scalar_columns():
        for stat in ("sum", "mean", "max"):
            cols.append(FeatureColumn(f"{name}_{stat}", source))
    cols.append(FeatureColumn("node_count", SOURCE_STRUCTURE))
    cols.append(FeatureColumn("max_depth", SOURCE_STRUCTURE))
    cols.append(FeatureColumn("mean_depth", SOURCE_STRUCTURE))
    cols.append(FeatureColumn("parallel_aware_count", SOURCE_STRUCTURE))
    for label in (*NODE_TYPE_CATALOG, OTHER_LABEL):
        cols.append(
            FeatureColumn(f"nt_count_{label.lower().replace(' ', '_')}", SOURCE_STRUCTURE)
        )
    for name in semantic_names:
        cols.append(FeatureColumn(name, SOURCE_SEMANTIC))
    return cols


def aggregate_query_vector(
    tree: PlanTree,
    config: FeatureConfig,
    tfidf_model: tfidf_mod.TfidfModel | None = None,
    embedding: np.ndarray | None = None,
) -> tuple[np.ndarray, list[FeatureColumn]]:
    """Fixed-order concatenation: scalar aggregates, structure, semantics."""
    info = _tree_info(tree, need_actuals=config.mode == "full")
    per_node = np.array(
        [
            _node_scalars(node, info[id(node)], config.mode)
            for _, _, node in assign_level_numbers(tree)
        ]
    )
    parts = []
    for j in range(per_node.shape[1]):
        col = per_node[:, j]
        parts += [float(col.sum()), float(col.mean()), float(col.max())]

    parts += list(structural_summary(tree).values())

    if embedding is not None:
        semantic = np.asarray(embedding, dtype=float)
        names = [f"sem_{i}" for i in range(semantic.size)]
    elif tfidf_model is not None:
        semantic = tfidf_model.transform(tree.query_text)
        names = [f"sem_{t}" for t in tfidf_model.vocabulary]
    else:
        semantic = np.zeros(0)
        names = []

    vec = np.concatenate([np.array(parts), semantic])
    return vec, feature_columns(config, names)


def sequence_columns(config: FeatureConfig) -> list[FeatureColumn]:
    cols = [FeatureColumn(f"{n}", s) for n, s in config.scalar_columns()]
    if config.node_type_encoding == "one_hot":
        for label in (*NODE_TYPE_CATALOG, OTHER_LABEL):
            cols.append(
                FeatureColumn(f"nt_is_{label.lower().replace(' ', '_')}", SOURCE_STRUCTURE)
            )
    else:
        cols.append(FeatureColumn("nt_label", SOURCE_STRUCTURE))
    cols.append(FeatureColumn("depth", SOURCE_STRUCTURE))
    cols.append(FeatureColumn("subtree_size", SOURCE_STRUCTURE))
    return cols


def node_sequence_vectors(tree: PlanTree, config: FeatureConfig) -> np.ndarray:
    """Pre-order sequence of fixed-width per-node vectors (no semantic block)."""
    info = _tree_info(tree, need_actuals=config.mode == "full")
    catalog_index = {label: i for i, label in enumerate(NODE_TYPE_CATALOG)}
    rows = []
    for _, _, node in assign_level_numbers(tree):
        e = info[id(node)]
        vals = _node_scalars(node, e, config.mode)
        idx = catalog_index.get(node.node_type, len(NODE_TYPE_CATALOG))
        if config.node_type_encoding == "one_hot":
            onehot = [0.0] * (len(NODE_TYPE_CATALOG) + 1)
            onehot[idx] = 1.0
            vals += onehot
        else:
            vals.append(float(idx))
        vals += [float(e.depth), float(e.subtree_size)]
        rows.append(vals)
    return np.array(rows)


def assert_estimate_only(columns: list[FeatureColumn]):
    """The leakage wall: no estimate-only column may derive from Actual fields."""
    bad = [c.name for c in columns if c.source == SOURCE_ACTUAL]
    if bad:
        raise LeakageError(
            f"estimate-only features contain Actual-derived columns: {', '.join(bad)}"
        )


# -- normalization ---------------------------------------------------------

@dataclass
class NormalizationStats:
    """Affine per-column transform x' = (x - center) / scale."""

    scheme: str
    center: np.ndarray
    scale: np.ndarray

    def apply(self, matrix: np.ndarray) -> np.ndarray:
        return (np.asarray(matrix, dtype=float) - self.center) / self.scale

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "center": self.center.tolist(),
            "scale": self.scale.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationStats":
        return cls(d["scheme"], np.array(d["center"], dtype=float),
                   np.array(d["scale"], dtype=float))


def normalize_fit(matrix: np.ndarray, scheme: str,
                  skip: np.ndarray | None = None) -> NormalizationStats:
    """Fit per-column statistics; ``skip`` marks columns left untouched.

    Zero-variance (or constant) columns map to 0 under both schemes.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        raise FeaturizeError("cannot fit normalization on an empty matrix")
    if scheme == "none":
        center = np.zeros(matrix.shape[1])
        scale = np.ones(matrix.shape[1])
    elif scheme == "zscore":
        center = matrix.mean(axis=0)
        scale = matrix.std(axis=0)  # population sigma
    elif scheme == "minmax":
        center = matrix.min(axis=0)
        scale = matrix.max(axis=0) - center
    else:
        raise FeaturizeError(f"unknown normalization scheme {scheme!r}")
    scale = np.where(scale == 0.0, 1.0, scale)
    if skip is not None:
        center = np.where(skip, 0.0, center)
        scale = np.where(skip, 1.0, scale)
    return NormalizationStats(scheme, center, scale)


def normalize_fit_apply(matrix: np.ndarray, scheme: str,
                        skip: np.ndarray | None = None):
    stats = normalize_fit(matrix, scheme, skip)
    return stats.apply(matrix), stats


# -- target transform -------------------------------------------------------

TARGET_TRANSFORM = "log1p_ms"


def transform_target(execution_time_ms):
    """ln(1 + ms); defined for ms >= 0 only."""
    arr = np.asarray(execution_time_ms, dtype=float)
    if np.any(arr < 0):
        raise FeaturizeError("execution time must be >= 0")
    out = np.log1p(arr)
    return float(out) if np.isscalar(execution_time_ms) or arr.ndim == 0 else out


def inverse_transform_target(value):
    arr = np.asarray(value, dtype=float)
    out = np.expm1(arr)
    return float(out) if np.isscalar(value) or arr.ndim == 0 else out


# -- dataset ----------------------------------------------------------------

@dataclass
class Dataset:
    query_ids: list[str]
    template_ids: np.ndarray
    features: np.ndarray
    columns: list[FeatureColumn]
    target_ms: np.ndarray
    target: np.ndarray
    normalization: NormalizationStats | None = None

    def __post_init__(self):
        if len({c.name for c in self.columns}) != len(self.columns):
            raise FeaturizeError("duplicate feature column names")
        if self.features.ndim != 2 or self.features.shape[1] != len(self.columns):
            raise FeaturizeError("feature matrix width does not match column metadata")
        if not np.all(np.isfinite(self.features)):
            raise FeaturizeError("feature matrix contains NaN or infinity")

    def __len__(self):
        return len(self.query_ids)

    @property
    def width(self) -> int:
        return self.features.shape[1]

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices)
        return Dataset(
            [self.query_ids[i] for i in indices],
            self.template_ids[indices],
            self.features[indices],
            self.columns,
            self.target_ms[indices],
            self.target[indices],
            self.normalization,
        )


def read_embeddings(path: str | Path) -> dict[str, np.ndarray]:
    """External embedding file: one ``query_id<TAB>v1,v2,...`` record per line."""
    table = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            qid, values = line.split("\t")
            table[qid] = np.array([float(v) for v in values.split(",")])
        except ValueError as exc:
            raise FeaturizeError(f"{path}:{lineno}: bad embedding record") from exc
    widths = {v.size for v in table.values()}
    if len(widths) > 1:
        raise FeaturizeError(f"{path}: embeddings have mixed widths {sorted(widths)}")
    return table


def build_dataset(
    trees: list[PlanTree],
    config: FeatureConfig,
    tfidf_model: tfidf_mod.TfidfModel | None = None,
    embeddings: dict[str, np.ndarray] | None = None,
) -> tuple[Dataset, tfidf_mod.TfidfModel | None]:
    """Aggregate every tree, fit normalization, and transform targets.

    Semantic source precedence: external embeddings when supplied, else
    TF-IDF (fitted here on the trees' query texts when not given), else none.
    The semantic block is excluded from normalization (TF-IDF vectors are
    already unit length; external embeddings are taken as-is).
    """
    if not trees:
        raise FeaturizeError("no plans to featurize")
    if embeddings is None and config.tfidf_enabled and tfidf_model is None:
        tfidf_model = tfidf_mod.fit(
            [t.query_text for t in trees], max_vocab=config.tfidf_max_vocab
        )

    vectors, columns = [], None
    for tree in trees:
        embedding = None
        if embeddings is not None:
            embedding = embeddings.get(tree.query_id)
            if embedding is None:
                raise FeaturizeError(f"no external embedding for query {tree.query_id}")
        vec, cols = aggregate_query_vector(
            tree, config, None if embeddings is not None else tfidf_model, embedding
        )
        if columns is None:
            columns = cols
        elif len(cols) != len(columns):
            raise FeaturizeError("inconsistent feature width across plans")
        vectors.append(vec)

    if config.mode == "estimate_only":
        assert_estimate_only(columns)

    features = np.vstack(vectors)
    skip = np.array([c.source == SOURCE_SEMANTIC for c in columns])
    features, stats = normalize_fit_apply(features, config.normalization, skip)

    for tree in trees:
        if tree.execution_time_ms is None:
            raise FeaturizeError(
                f"plan {tree.query_id} has no execution time; dataset needs ANALYZE traces"
            )
    target_ms = np.array([t.execution_time_ms for t in trees], dtype=float)

    dataset = Dataset(
        query_ids=[t.query_id for t in trees],
        template_ids=np.array([t.template_id for t in trees], dtype=int),
        features=features,
        columns=columns,
        target_ms=target_ms,
        target=transform_target(target_ms),
        normalization=stats,
    )
    return dataset, tfidf_model


def build_sequences(
    trees: list[PlanTree], config: FeatureConfig
) -> tuple[dict[str, np.ndarray], list[FeatureColumn], NormalizationStats]:
    """Per-query node sequences, normalized with their own statistics."""
    raw = {t.query_id: node_sequence_vectors(t, config) for t in trees}
    columns = sequence_columns(config)
    if config.mode == "estimate_only":
        assert_estimate_only(columns)
    stacked = np.vstack(list(raw.values()))
    stats = normalize_fit(stacked, config.normalization)
    return {qid: stats.apply(m) for qid, m in raw.items()}, columns, stats


# -- CSV / metadata I/O ------------------------------------------------------

NODE_CSV_HEADER = (
    "LN,PL,NT,PA,SC,TC,PW,ST,TT,IC,OC,"
    "BC,plan_rows,actual_rows,loops,depth,subtree_size,"
    "cardinality_error,cost_per_row,time_per_loop,query_id"
)


def format_value(value) -> str:
    """Shortest round-trip float text; integral floats drop the '.0'."""
    if isinstance(value, bool):
        return "TRUE" if value else "FALSE"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def write_node_csv(rows: list[NodeFeatureRow], path: str | Path):
    lines = [NODE_CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                format_value(v)
                for v in (
                    r.ln, r.pl, r.nt, r.pa, r.sc, r.tc, r.pw, r.st, r.tt, r.ic, r.oc,
                    r.bc, r.plan_rows, r.actual_rows, r.loops, r.depth, r.subtree_size,
                    r.cardinality_error, r.cost_per_row, r.time_per_loop, r.query_id,
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_dataset_csv(dataset: Dataset, path: str | Path):
    header = ["query_id", "template_id"] + [c.name for c in dataset.columns]
    header += ["target_ms", "target_log"]
    lines = [",".join(header)]
    for i in range(len(dataset)):
        row = [dataset.query_ids[i], str(int(dataset.template_ids[i]))]
        row += [format_value(v) for v in dataset.features[i]]
        row += [format_value(dataset.target_ms[i]), format_value(dataset.target[i])]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_dataset_csv(path: str | Path, meta: dict | None = None) -> Dataset:
    """Read a query-level dataset CSV; ``meta`` restores provenance and stats."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise FeaturizeError(f"{path}: empty dataset file")
    header = lines[0].split(",")
    for required in ("query_id", "template_id", "target_ms", "target_log"):
        if required not in header:
            raise FeaturizeError(f"{path}: missing column {required!r}")
    feature_names = header[2:-2]

    if meta is not None:
        meta_cols = [FeatureColumn(c["name"], c["source"]) for c in meta["columns"]]
        meta_names = [c.name for c in meta_cols]
        if meta_names != feature_names:
            pairs = zip(feature_names, meta_names)
            mismatch = next((a or b for a, b in pairs if a != b), None)
            if mismatch is None:  # same prefix, different lengths
                longer = meta_names if len(meta_names) > len(feature_names) else feature_names
                mismatch = longer[min(len(meta_names), len(feature_names))]
            raise FeaturizeError(f"{path}: column mismatch with metadata near {mismatch!r}")
        columns = meta_cols
        stats = (
            NormalizationStats.from_dict(meta["normalization"])
            if meta.get("normalization")
            else None
        )
    else:
        columns = [FeatureColumn(n, "unspecified") for n in feature_names]
        stats = None

    qids, tids, rows, t_ms, t_log = [], [], [], [], []
    for line in lines[1:]:
        if not line.strip():
            continue
        cols = line.split(",")
        if len(cols) != len(header):
            raise FeaturizeError(f"{path}: row width does not match header")
        qids.append(cols[0])
        tids.append(int(cols[1]))
        rows.append([float(v) for v in cols[2:-2]])
        t_ms.append(float(cols[-2]))
        t_log.append(float(cols[-1]))

    features = np.array(rows) if rows else np.zeros((0, len(feature_names)))
    return Dataset(
        qids,
        np.array(tids, dtype=int),
        features,
        columns,
        np.array(t_ms),
        np.array(t_log),
        stats,
    )


def write_feature_meta(
    path: str | Path,
    config: FeatureConfig,
    columns: list[FeatureColumn],
    normalization: NormalizationStats | None,
    seq_columns: list[FeatureColumn] | None = None,
    seq_normalization: NormalizationStats | None = None,
    semantic_source: str = "none",
):
    doc = {
        "format": META_FORMAT,
        "version": META_VERSION,
        "config": config.to_dict(),
        "semantic_source": semantic_source,
        "target_transform": TARGET_TRANSFORM,
        "columns": [{"name": c.name, "source": c.source} for c in columns],
        "normalization": normalization.to_dict() if normalization else None,
        "sequence_columns": (
            [{"name": c.name, "source": c.source} for c in seq_columns]
            if seq_columns
            else None
        ),
        "sequence_normalization": (
            seq_normalization.to_dict() if seq_normalization else None
        ),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def read_feature_meta(path: str | Path) -> dict:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != META_FORMAT:
        raise FeaturizeError(f"{path}: not a feature metadata document")
    if doc.get("version") != META_VERSION:
        raise FeaturizeError(f"{path}: unsupported metadata version")
    return doc
