"""Parse PostgreSQL ``EXPLAIN (ANALYZE, FORMAT JSON)`` output into plan trees.

A plan document is a one-element JSON array whose element carries a "Plan"
object plus top-level "Execution Time" / "Planning Time".  Node keys are kept
exactly as PostgreSQL emits them; unknown keys survive in ``PlanNode.extra``
so newer server versions round-trip cleanly.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field


class PlanError(Exception):
    """Base class for plan ingestion failures."""


class PlanParseError(PlanError):
    """Document is not valid plan JSON; carries the byte offset when known."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class AnalyzeRequiredError(PlanError):
    """Document came from plain EXPLAIN; ANALYZE metrics are missing."""


class PlanValidationError(PlanError):
    """A node violates an invariant; carries the path to the node."""

    def __init__(self, message, path):
        super().__init__(f"{message} (at {path})")
        self.path = path


# Node keys consumed into PlanNode fields.  Everything else lands in `extra`.
_NODE_KEYS = (
    "Node Type",
    "Parallel Aware",
    "Startup Cost",
    "Total Cost",
    "Plan Rows",
    "Plan Width",
    "Actual Startup Time",
    "Actual Total Time",
    "Actual Rows",
    "Actual Loops",
    "Rows Removed by Filter",
    "Plans",
)


@dataclass
class PlanNode:
    """One physical operator of an execution plan.

    Actual-* fields are per-loop averages exactly as PostgreSQL reports them;
    they are ``None`` when the plan came from plain EXPLAIN.  Totalisation
    (multiplying by loops) is featurization's job, never the parser's.
    """

    node_type: str
    parallel_aware: bool
    startup_cost: float
    total_cost: float
    plan_rows: float
    plan_width: float
    actual_startup_ms: float | None = None
    actual_total_ms: float | None = None
    actual_rows: float | None = None
    loops: float | None = None
    rows_removed_by_filter: float | None = None
    children: list["PlanNode"] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def has_actuals(self) -> bool:
        return self.actual_total_ms is not None


@dataclass
class PlanTree:
    root: PlanNode
    execution_time_ms: float | None
    planning_time_ms: float | None
    query_text: str
    query_id: str
    template_id: int  # 1..22, or 0 when unknown
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class LevelNumber:
    """The "depth.index" node identifier; the root is 1.1, its parent -1."""

    depth: int
    index_at_depth: int

    def render(self) -> str:
        return f"{self.depth}.{self.index_at_depth}"


ROOT_PARENT = "-1"

_WS = re.compile(r"\s+")


def query_id_for(query_text: str) -> str:
    """Lowercase hex of a 64-bit stable hash of whitespace-normalized SQL."""
    normalized = _WS.sub(" ", query_text).strip()
    return hashlib.blake2b(normalized.encode("utf-8"), digest_size=8).hexdigest()


def _number(value, key, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise PlanValidationError(f'"{key}" must be a number, got {value!r}', path)
    return float(value)


def _parse_node(obj, path, require_analyze):
    if not isinstance(obj, dict):
        raise PlanValidationError("plan node must be a JSON object", path)
    if "Node Type" not in obj:
        raise PlanValidationError('missing "Node Type"', path)

    node = PlanNode(
        node_type=str(obj["Node Type"]),
        parallel_aware=bool(obj.get("Parallel Aware", False)),
        startup_cost=_number(obj.get("Startup Cost", 0.0), "Startup Cost", path),
        total_cost=_number(obj.get("Total Cost", 0.0), "Total Cost", path),
        plan_rows=_number(obj.get("Plan Rows", 0.0), "Plan Rows", path),
        plan_width=_number(obj.get("Plan Width", 0.0), "Plan Width", path),
    )

    if "Actual Total Time" in obj:
        node.actual_startup_ms = _number(
            obj.get("Actual Startup Time", 0.0), "Actual Startup Time", path
        )
        node.actual_total_ms = _number(obj["Actual Total Time"], "Actual Total Time", path)
        node.actual_rows = _number(obj.get("Actual Rows", 0.0), "Actual Rows", path)
        node.loops = _number(obj.get("Actual Loops", 1.0), "Actual Loops", path)
    elif require_analyze:
        raise AnalyzeRequiredError(
            f'plain EXPLAIN, ANALYZE required: no "Actual Total Time" at {path}'
        )
    if "Rows Removed by Filter" in obj:
        node.rows_removed_by_filter = _number(
            obj["Rows Removed by Filter"], "Rows Removed by Filter", path
        )

    node.extra = {k: v for k, v in obj.items() if k not in _NODE_KEYS}

    for i, child in enumerate(obj.get("Plans", [])):
        node.children.append(_parse_node(child, f"{path}/Plans/{i}", require_analyze))

    _validate_node(node, path)
    return node


def _validate_node(node, path):
    if node.startup_cost > node.total_cost:
        raise PlanValidationError(
            f"startup cost {node.startup_cost} > total cost {node.total_cost}", path
        )
    if node.plan_rows < 0 or node.plan_width < 0:
        raise PlanValidationError("negative plan rows or width", path)
    if node.has_actuals:
        if node.actual_startup_ms > node.actual_total_ms:
            raise PlanValidationError(
                f"actual startup {node.actual_startup_ms} > actual total "
                f"{node.actual_total_ms}",
                path,
            )
        if node.actual_rows < 0:
            raise PlanValidationError("negative actual rows", path)
        if node.loops < 1:
            raise PlanValidationError(f"loops {node.loops} < 1", path)


def parse_plan_document(json_text: str, query_text: str | None = None,
                        require_analyze: bool = True) -> PlanTree:
    """Parse one EXPLAIN (FORMAT JSON) document into a validated PlanTree.

    ``query_text`` overrides the document's "Query Text" key (which the
    collector injects, following auto_explain's convention).  With
    ``require_analyze=False`` a plain-EXPLAIN document is accepted and all
    actual metrics stay ``None``.
    """
    try:
        doc = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise PlanParseError(
            f"malformed plan document at byte offset {exc.pos}: {exc.msg}",
            offset=exc.pos,
        ) from exc

    if isinstance(doc, list):
        if len(doc) != 1:
            raise PlanParseError(f"expected a one-element array, got {len(doc)} elements")
        top = doc[0]
    elif isinstance(doc, dict):
        # auto_explain logs the element bare; accept it.
        top = doc
    else:
        raise PlanParseError("plan document must be a JSON array or object")

    if not isinstance(top, dict) or "Plan" not in top:
        raise PlanParseError('plan document element has no "Plan" object')

    root = _parse_node(top["Plan"], "/Plan", require_analyze)

    execution_time = top.get("Execution Time")
    planning_time = top.get("Planning Time")
    if require_analyze and execution_time is None:
        raise AnalyzeRequiredError('plain EXPLAIN, ANALYZE required: no "Execution Time"')
    if execution_time is not None:
        execution_time = float(execution_time)
        if execution_time <= 0:
            raise PlanValidationError("Execution Time must be > 0", "/")
    if planning_time is not None:
        planning_time = float(planning_time)

    text = query_text if query_text is not None else str(top.get("Query Text", ""))
    template_id = int(top.get("Template Id", 0))

    return PlanTree(
        root=root,
        execution_time_ms=execution_time,
        planning_time_ms=planning_time,
        query_text=text,
        query_id=query_id_for(text),
        template_id=template_id,
        extra={
            k: v
            for k, v in top.items()
            if k not in ("Plan", "Execution Time", "Planning Time", "Query Text", "Template Id")
        },
    )


def _node_to_json(node: PlanNode) -> dict:
    obj = {
        "Node Type": node.node_type,
        "Parallel Aware": node.parallel_aware,
        "Startup Cost": node.startup_cost,
        "Total Cost": node.total_cost,
        "Plan Rows": node.plan_rows,
        "Plan Width": node.plan_width,
    }
    if node.has_actuals:
        obj["Actual Startup Time"] = node.actual_startup_ms
        obj["Actual Total Time"] = node.actual_total_ms
        obj["Actual Rows"] = node.actual_rows
        obj["Actual Loops"] = node.loops
    if node.rows_removed_by_filter is not None:
        obj["Rows Removed by Filter"] = node.rows_removed_by_filter
    for key in sorted(node.extra):
        obj[key] = node.extra[key]
    if node.children:
        obj["Plans"] = [_node_to_json(c) for c in node.children]
    return obj


def serialize_plan_document(tree: PlanTree, indent: int | None = 2) -> str:
    """Re-serialize a tree to the canonical EXPLAIN JSON document format."""
    top = {"Plan": _node_to_json(tree.root)}
    if tree.planning_time_ms is not None:
        top["Planning Time"] = tree.planning_time_ms
    if tree.execution_time_ms is not None:
        top["Execution Time"] = tree.execution_time_ms
    if tree.query_text:
        top["Query Text"] = tree.query_text
    if tree.template_id:
        top["Template Id"] = tree.template_id
    for key in sorted(tree.extra):
        top[key] = tree.extra[key]
    return json.dumps([top], indent=indent)


def flatten_preorder(tree: PlanTree) -> list[PlanNode]:
    """Nodes in pre-order: a node before its children, children left to right."""
    out = []

    def walk(node):
        out.append(node)
        for child in node.children:
            walk(child)

    walk(tree.root)
    return out


def assign_level_numbers(tree: PlanTree) -> list[tuple[LevelNumber, str, PlanNode]]:
    """Pre-order listing of (level number, rendered parent level, node).

    Depth starts at 1 for the root; within one depth nodes are ranked 1..k in
    pre-order.  The root's parent renders as "-1".
    """
    counts: dict[int, int] = {}
    out: list[tuple[LevelNumber, str, PlanNode]] = []

    def walk(node, depth, parent_rendered):
        counts[depth] = counts.get(depth, 0) + 1
        ln = LevelNumber(depth, counts[depth])
        out.append((ln, parent_rendered, node))
        for child in node.children:
            walk(child, depth + 1, ln.render())

    walk(tree.root, 1, ROOT_PARENT)
    return out
