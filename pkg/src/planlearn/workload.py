"""Instantiate the 22 parameterized analytical query templates into SQL.

Templates live in a directory as ``q1.sql`` .. ``q22.sql`` with ``:name``
placeholders, plus a ``params.tsv`` manifest declaring one parameter domain
per line (columns: template_id, name, kind, low, high, choices, render).
Choices are ``|``-separated.  Render rules: ``date`` emits ``DATE 'Y-M-D'``,
``number`` a bare literal, ``string`` a single-quoted literal.
"""

from __future__ import annotations

import datetime as dt
import logging
import random
import re
from dataclasses import dataclass, field
from pathlib import Path

from .plan_ingest import query_id_for

log = logging.getLogger(__name__)

TEMPLATE_COUNT = 22

_PLACEHOLDER = re.compile(r":([a-z_][a-z0-9_]*)")


class WorkloadError(Exception):
    pass


class TemplateLoadError(WorkloadError):
    pass


class DomainError(WorkloadError):
    pass


@dataclass(frozen=True)
class ParameterSpec:
    name: str
    kind: str                    # date | integer | decimal | choice
    low: str | None = None       # inclusive bound (ISO date or numeric text)
    high: str | None = None
    choices: tuple[str, ...] = ()
    render: str = "number"       # date | number | string

    def __post_init__(self):
        if self.kind not in ("date", "integer", "decimal", "choice"):
            raise TemplateLoadError(f"parameter {self.name}: unknown kind {self.kind!r}")
        if self.render not in ("date", "number", "string"):
            raise TemplateLoadError(f"parameter {self.name}: unknown render {self.render!r}")
        if self.kind == "choice":
            if not self.choices:
                raise TemplateLoadError(f"parameter {self.name}: empty choice list")
        elif self.low is None or self.high is None:
            raise TemplateLoadError(f"parameter {self.name}: missing low/high bounds")
        elif self._lo() > self._hi():
            raise TemplateLoadError(f"parameter {self.name}: low > high")

    def _lo(self):
        return _coerce(self.kind, self.low)

    def _hi(self):
        return _coerce(self.kind, self.high)

    def contains(self, value) -> bool:
        if self.kind == "choice":
            return str(value) in self.choices
        value = _coerce(self.kind, value)
        return self._lo() <= value <= self._hi()

    def sample(self, rng: random.Random):
        if self.kind == "choice":
            return rng.choice(self.choices)
        if self.kind == "date":
            lo, hi = self._lo().toordinal(), self._hi().toordinal()
            return dt.date.fromordinal(rng.randrange(lo, hi + 1))
        if self.kind == "integer":
            return rng.randrange(int(self.low), int(self.high) + 1)
        return rng.uniform(float(self.low), float(self.high))


def _coerce(kind, value):
    if kind == "date":
        if isinstance(value, dt.date):
            return value
        return dt.date.fromisoformat(str(value))
    if kind == "integer":
        return int(value)
    if kind == "decimal":
        return float(value)
    return str(value)


def render_literal(spec: ParameterSpec, value) -> str:
    """Format a parameter value per the spec's render rule."""
    if spec.render == "date":
        value = _coerce("date", value)
        return f"DATE '{value.isoformat()}'"
    if spec.render == "number":
        if isinstance(value, float):
            text = f"{value:.6f}".rstrip("0").rstrip(".")
            return text if text else "0"
        return str(value)
    escaped = str(value).replace("'", "''")
    return f"'{escaped}'"


@dataclass
class QueryTemplate:
    template_id: int
    sql_text: str
    params: list[ParameterSpec] = field(default_factory=list)

    def placeholder_names(self) -> set[str]:
        return set(_PLACEHOLDER.findall(self.sql_text))

    def validate(self):
        placeholders = self.placeholder_names()
        declared = {p.name for p in self.params}
        dangling = placeholders - declared
        if dangling:
            raise TemplateLoadError(
                f"template {self.template_id}: placeholder :{sorted(dangling)[0]} has no "
                "parameter spec"
            )
        unused = declared - placeholders
        if unused:
            raise TemplateLoadError(
                f"template {self.template_id}: parameter {sorted(unused)[0]!r} is never "
                "referenced"
            )
        if len(declared) != len(self.params):
            raise TemplateLoadError(f"template {self.template_id}: duplicate parameter spec")


@dataclass
class GeneratedQuery:
    template_id: int
    bindings: dict[str, str]     # name -> rendered literal
    sql_text: str
    query_id: str


def load_templates(directory: str | Path) -> list[QueryTemplate]:
    """Load and validate the 22 templates plus the parameter manifest."""
    directory = Path(directory)
    manifest = directory / "params.tsv"
    if not manifest.is_file():
        raise TemplateLoadError(f"parameter manifest missing: {manifest}")

    specs_by_template: dict[int, list[ParameterSpec]] = {}
    for lineno, line in enumerate(manifest.read_text().splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if lineno == 1 and cols[0] == "template_id":
            continue
        if len(cols) != 7:
            raise TemplateLoadError(f"{manifest}:{lineno}: expected 7 columns, got {len(cols)}")
        tid, name, kind, low, high, choices, render = cols
        spec = ParameterSpec(
            name=name,
            kind=kind,
            low=low or None,
            high=high or None,
            choices=tuple(choices.split("|")) if choices else (),
            render=render,
        )
        specs_by_template.setdefault(int(tid), []).append(spec)

    templates = []
    for tid in range(1, TEMPLATE_COUNT + 1):
        path = directory / f"q{tid}.sql"
        if not path.is_file():
            raise TemplateLoadError(f"template {tid} missing: {path}")
        sql = path.read_text().strip().rstrip(";").strip()
        template = QueryTemplate(tid, sql, specs_by_template.get(tid, []))
        template.validate()
        templates.append(template)
    return templates


def instantiate(template: QueryTemplate, bindings: dict) -> GeneratedQuery:
    """Substitute explicit bindings into a template, validating domains."""
    specs = {p.name: p for p in template.params}
    missing = set(specs) - set(bindings)
    if missing:
        raise DomainError(
            f"template {template.template_id}: no binding for {sorted(missing)[0]!r}"
        )
    rendered = {}
    for name, value in bindings.items():
        spec = specs.get(name)
        if spec is None:
            raise DomainError(f"template {template.template_id}: unknown parameter {name!r}")
        if not spec.contains(value):
            bounds = (
                f"one of {list(spec.choices)}"
                if spec.kind == "choice"
                else f"[{spec.low}, {spec.high}]"
            )
            raise DomainError(
                f"template {template.template_id}: {name}={value!r} outside domain {bounds}"
            )
        rendered[name] = render_literal(spec, value)

    sql = _PLACEHOLDER.sub(lambda m: rendered[m.group(1)], template.sql_text)
    assert not _PLACEHOLDER.search(sql)
    return GeneratedQuery(template.template_id, rendered, sql, query_id_for(sql))


def generate_workload(templates: list[QueryTemplate], n_per_template: int,
                      seed: int) -> list[GeneratedQuery]:
    """Sample ``n_per_template`` parameterizations of every template.

    Each template draws from its own generator seeded with ``seed ^ id`` so
    per-template streams are independent of each other.  Duplicate bindings
    within a template are re-drawn up to 100 times, then kept with a warning.
    """
    if n_per_template < 1:
        raise WorkloadError("n_per_template must be >= 1")
    out = []
    for template in templates:
        rng = random.Random(seed ^ template.template_id)
        seen: set[tuple] = set()
        for _ in range(n_per_template):
            query = None
            for attempt in range(100):
                values = {p.name: p.sample(rng) for p in template.params}
                query = instantiate(template, values)
                key = tuple(sorted(query.bindings.items()))
                if key not in seen:
                    seen.add(key)
                    break
            else:
                log.warning(
                    "template %d: duplicate bindings kept after 100 attempts",
                    template.template_id,
                )
            out.append(query)
    return out


# -- single-statement sanity checking ------------------------------------

def split_statements(sql: str) -> list[str]:
    """Split SQL on top-level semicolons, respecting quotes and comments.

    Raises WorkloadError on unbalanced quotes or parentheses.
    """
    statements = []
    buf = []
    depth = 0
    i, n = 0, len(sql)
    while i < n:
        ch = sql[i]
        if ch == "'":
            j = i + 1
            while j < n:
                if sql[j] == "'":
                    if j + 1 < n and sql[j + 1] == "'":
                        j += 2
                        continue
                    break
                j += 1
            else:
                raise WorkloadError("unterminated string literal")
            buf.append(sql[i:j + 1])
            i = j + 1
            continue
        if ch == '"':
            j = sql.find('"', i + 1)
            if j < 0:
                raise WorkloadError("unterminated quoted identifier")
            buf.append(sql[i:j + 1])
            i = j + 1
            continue
        if sql.startswith("--", i):
            j = sql.find("\n", i)
            i = n if j < 0 else j
            continue
        if sql.startswith("/*", i):
            j = sql.find("*/", i + 2)
            if j < 0:
                raise WorkloadError("unterminated block comment")
            i = j + 2
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise WorkloadError("unbalanced parentheses")
        elif ch == ";" and depth == 0:
            text = "".join(buf).strip()
            if text:
                statements.append(text)
            buf = []
            i += 1
            continue
        buf.append(ch)
        i += 1
    if depth != 0:
        raise WorkloadError("unbalanced parentheses")
    tail = "".join(buf).strip()
    if tail:
        statements.append(tail)
    return statements


def check_single_statement(sql: str):
    """Raise unless ``sql`` is exactly one well-formed statement."""
    statements = split_statements(sql)
    if len(statements) != 1:
        raise WorkloadError(f"expected exactly one statement, found {len(statements)}")


# -- workload file format -------------------------------------------------

def write_workload_file(queries: list[GeneratedQuery], path: str | Path):
    """One statement per record, preceded by query_id/template_id comments."""
    lines = []
    for q in queries:
        lines.append(f"-- query_id: {q.query_id}")
        lines.append(f"-- template_id: {q.template_id}")
        lines.append(q.sql_text)
        lines.append(";")
        lines.append("")
    Path(path).write_text("\n".join(lines))


def read_workload_file(path: str | Path) -> list[GeneratedQuery]:
    text = Path(path).read_text()
    queries = []
    qid, tid = None, 0
    buf: list[str] = []

    def flush():
        nonlocal qid, tid, buf
        sql = "\n".join(buf).strip().rstrip(";").strip()
        if sql:
            queries.append(GeneratedQuery(tid, {}, sql, qid or query_id_for(sql)))
        qid, tid, buf = None, 0, []

    for line in text.splitlines():
        stripped = line.strip()
        m = re.match(r"--\s*query_id:\s*(\S+)", stripped)
        if m:
            qid = m.group(1)
            continue
        m = re.match(r"--\s*template_id:\s*(\d+)", stripped)
        if m:
            tid = int(m.group(1))
            continue
        if stripped == ";":
            flush()
            continue
        buf.append(line)
    flush()
    return queries
