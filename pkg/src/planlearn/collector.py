"""Run a workload against PostgreSQL under EXPLAIN ANALYZE and persist traces.

Queries execute strictly sequentially (overlapping statements would pollute
the actual timings).  Every record is flushed to ``manifest.tsv`` as soon as
it finishes, so a crash loses at most the statement in flight, and re-running
against the same output directory skips query_ids already marked ok.

Output layout::

    <out>/queries/<query_id>.sql
    <out>/plans/<query_id>.json
    <out>/manifest.tsv
"""

from __future__ import annotations

import datetime as dt
import json
import logging
import os
import statistics
from dataclasses import dataclass, field, replace
from pathlib import Path

from .plan_ingest import parse_plan_document

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.tsv"
_MANIFEST_COLUMNS = (
    "query_id",
    "template_id",
    "status",
    "execution_time_ms",
    "sql_path",
    "plan_path",
    "error",
    "collected_at",
    "server_version",
)

STATUS_OK = "ok"
STATUS_TIMEOUT = "timeout"
STATUS_ERROR = "error"


class CollectorError(Exception):
    pass


@dataclass
class CollectionConfig:
    dsn: str = ""
    output_dir: str | Path = "."
    timeout_s: float = 300.0
    repeats: int = 1
    warmup: bool = False
    preamble: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.timeout_s <= 0:
            raise CollectorError("timeout must be > 0")
        if self.repeats < 1:
            raise CollectorError("repeats must be >= 1")


@dataclass
class CollectionRecord:
    query_id: str
    template_id: int
    status: str
    execution_time_ms: float | None
    sql_path: str
    plan_path: str
    error: str = ""
    collected_at: str = ""
    server_version: str = ""


def _connect_default(dsn: str):
    try:
        import psycopg  # type: ignore
        return psycopg.connect(dsn)
    except ImportError:
        pass
    try:
        import psycopg2  # type: ignore
        return psycopg2.connect(dsn)
    except ImportError:
        raise CollectorError(
            "no PostgreSQL driver available; install psycopg (or psycopg2), "
            "or pass an explicit connect function"
        )


def _is_timeout(exc: Exception) -> bool:
    code = getattr(exc, "sqlstate", None) or getattr(exc, "pgcode", None)
    if code is None:
        diag = getattr(exc, "diag", None)
        code = getattr(diag, "sqlstate", None) if diag is not None else None
    return code == "57014"  # query_canceled


def _explain_once(conn, sql: str) -> str:
    """Run EXPLAIN ANALYZE once and return the raw JSON document text."""
    cur = conn.cursor()
    try:
        cur.execute("EXPLAIN (ANALYZE, FORMAT JSON) " + sql)
        value = cur.fetchone()[0]
    finally:
        cur.close()
    if isinstance(value, str):
        return value
    return json.dumps(value)


def _tsv_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _tsv_unescape(text: str) -> str:
    out, i = [], 0
    while i < len(text):
        if text[i] == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"t": "\t", "n": "\n", "\\": "\\"}.get(nxt, nxt))
            i += 2
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _record_line(r: CollectionRecord) -> str:
    time_text = "" if r.execution_time_ms is None else repr(r.execution_time_ms)
    return "\t".join(
        (
            r.query_id,
            str(r.template_id),
            r.status,
            time_text,
            r.sql_path,
            r.plan_path,
            _tsv_escape(r.error),
            r.collected_at,
            r.server_version,
        )
    )


def load_manifest(path: str | Path, check_plans: bool = True) -> list[CollectionRecord]:
    """Read a manifest; verifies that ok-records' plan files still exist."""
    path = Path(path)
    if not path.is_file():
        raise CollectorError(f"manifest not found: {path}")
    records = []
    lines = path.read_text().splitlines()
    if not lines or lines[0].split("\t") != list(_MANIFEST_COLUMNS):
        raise CollectorError(f"{path}: bad or missing manifest header")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != len(_MANIFEST_COLUMNS):
            raise CollectorError(f"{path}:{lineno}: expected {len(_MANIFEST_COLUMNS)} columns")
        record = CollectionRecord(
            query_id=cols[0],
            template_id=int(cols[1]),
            status=cols[2],
            execution_time_ms=float(cols[3]) if cols[3] else None,
            sql_path=cols[4],
            plan_path=cols[5],
            error=_tsv_unescape(cols[6]),
            collected_at=cols[7],
            server_version=cols[8],
        )
        if check_plans and record.status == STATUS_OK:
            plan_file = path.parent / record.plan_path
            if not plan_file.is_file():
                raise CollectorError(
                    f"manifest integrity: plan file missing for query {record.query_id}"
                )
        records.append(record)
    return records


def collect(workload, config: CollectionConfig, connect=None) -> list[CollectionRecord]:
    """Execute every query in order, persisting (sql, plan, runtime) records.

    ``connect`` is a ``dsn -> DB-API connection`` callable; it defaults to
    psycopg/psycopg2.  Statement failures never abort the run; connection
    failure does, leaving the records collected so far intact.
    """
    out_dir = Path(config.output_dir)
    (out_dir / "queries").mkdir(parents=True, exist_ok=True)
    (out_dir / "plans").mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / MANIFEST_NAME

    lock_path = out_dir / ".collect.lock"
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise CollectorError(
            f"another collection appears to be running ({lock_path} exists)"
        )
    os.write(fd, str(os.getpid()).encode())
    os.close(fd)

    try:
        done: dict[str, CollectionRecord] = {}
        if manifest_path.is_file():
            for record in load_manifest(manifest_path, check_plans=False):
                if record.status == STATUS_OK:
                    done[record.query_id] = record

        connect = connect or _connect_default
        conn = connect(config.dsn)
        try:
            records = list(done.values())
            cur = conn.cursor()
            cur.execute("SHOW server_version")
            server_version = str(cur.fetchone()[0])
            cur.execute(f"SET statement_timeout = {int(config.timeout_s * 1000)}")
            for stmt in config.preamble:
                cur.execute(stmt)
            cur.close()
            conn.commit()

            new_file = not manifest_path.is_file() or manifest_path.stat().st_size == 0
            with open(manifest_path, "a") as manifest:
                if new_file:
                    manifest.write("\t".join(_MANIFEST_COLUMNS) + "\n")
                    manifest.flush()
                for i, query in enumerate(workload):
                    if query.query_id in done:
                        continue
                    record = _collect_one(conn, query, config, out_dir, server_version)
                    manifest.write(_record_line(record) + "\n")
                    manifest.flush()
                    records.append(record)
                    log.info(
                        "[%d/%d] %s %s", i + 1, len(workload), query.query_id, record.status
                    )
        finally:
            conn.close()
        return records
    finally:
        lock_path.unlink(missing_ok=True)


def _collect_one(conn, query, config, out_dir, server_version) -> CollectionRecord:
    sql_rel = f"queries/{query.query_id}.sql"
    plan_rel = f"plans/{query.query_id}.json"
    (out_dir / sql_rel).write_text(query.sql_text + "\n")

    record = CollectionRecord(
        query_id=query.query_id,
        template_id=query.template_id,
        status=STATUS_OK,
        execution_time_ms=None,
        sql_path=sql_rel,
        plan_path=plan_rel,
        collected_at=dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
        server_version=server_version,
    )

    runs: list[tuple[float, str]] = []
    try:
        if config.warmup:
            _explain_once(conn, query.sql_text)
        for _ in range(config.repeats):
            text = _explain_once(conn, query.sql_text)
            tree = parse_plan_document(text, query_text=query.sql_text)
            runs.append((tree.execution_time_ms, text))
    except Exception as exc:  # noqa: BLE001 - statement faults must not abort the run
        try:
            conn.rollback()
        except Exception:
            pass
        return replace(
            record,
            status=STATUS_TIMEOUT if _is_timeout(exc) else STATUS_ERROR,
            error=str(exc),
            plan_path="",
        )

    # Lower-median repeat: the recorded runtime always comes from the trace
    # that is actually persisted (exact median for odd repeat counts).
    runs.sort(key=lambda pair: pair[0])
    median_ms, median_text = runs[(len(runs) - 1) // 2]
    assert median_ms == statistics.median_low(run[0] for run in runs)

    doc = json.loads(median_text)
    element = doc[0] if isinstance(doc, list) else doc
    element["Query Text"] = query.sql_text
    if query.template_id:
        element["Template Id"] = query.template_id
    (out_dir / plan_rel).write_text(json.dumps([element], indent=2) + "\n")

    return replace(record, execution_time_ms=median_ms)
