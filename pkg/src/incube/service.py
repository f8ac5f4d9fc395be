"""Read-only HTTP facade over a loaded cube snapshot.

Every response body is a pure function of (snapshot, request): cell
order is canonical, JSON is serialized with sorted keys and no
whitespace, and request timing travels in the ``X-Elapsed-Ms`` header
so replays stay byte-identical.  Mining endpoints are transports for
the mining module and take their inputs inline; outlier scoring can
also run server-side over a cube aggregation.

Status codes: 400 malformed request, 422 unknown dim/member/measure or
bad thresholds, 503 no cube loaded.
"""

from __future__ import annotations

import itertools
import json
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .codebook import CodebookTables, load_tables
from .cube import (
    FORMAT_VERSION,
    CellQuery,
    CellResult,
    FactTable,
    Filter,
    GroupBy,
    HIERARCHIES,
    MEASURES,
    QueryError,
    aggregate,
    snapshot_load,
)
from .mining import (
    SequentialPattern,
    Transaction,
    mine_association_rules,
    mine_sequence_lists,
    score_outliers,
)


class BadRequest(ValueError):
    """Structurally malformed request body (HTTP 400)."""


def canonical_json(payload) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


# ---------------------------------------------------------------------------
# Request parsing and canonical payloads (pure; reused by tests and CLI)


_TRISTATE_MEMBERS = {"yes": "Yes", "no": "No", "unknown": "Unknown"}


def parse_query_request(body) -> CellQuery:
    if not isinstance(body, dict):
        raise BadRequest("request body must be a JSON object")
    group_by = []
    for entry in _expect_list(body, "group_by", default=[]):
        if not isinstance(entry, dict) or "hierarchy" not in entry:
            raise BadRequest("group_by entries must be objects with a 'hierarchy'")
        depth = entry.get("depth", 1)
        if not isinstance(depth, int) or isinstance(depth, bool):
            raise BadRequest("group_by depth must be an integer")
        if not isinstance(entry["hierarchy"], str):
            raise BadRequest("group_by hierarchy must be a string")
        group_by.append(GroupBy(entry["hierarchy"], depth))
    filters = []
    for entry in _expect_list(body, "filters", default=[]):
        if not isinstance(entry, dict) or "dim" not in entry or not isinstance(entry["dim"], str):
            raise BadRequest("filters entries must be objects with a 'dim'")
        members = entry.get("members", [])
        if not isinstance(members, list) or not all(isinstance(m, str) for m in members):
            raise BadRequest("filter members must be a list of strings")
        members = list(members)
        if "tristate" in entry:
            tristate = entry["tristate"]
            if not isinstance(tristate, str) or tristate.lower() not in _TRISTATE_MEMBERS:
                raise BadRequest("filter tristate must be one of Yes/No/Unknown")
            members.append(_TRISTATE_MEMBERS[tristate.lower()])
        filters.append(Filter(entry["dim"], tuple(members)))
    measures = _expect_list(body, "measures", default=["incident_count"])
    if not all(isinstance(m, str) for m in measures):
        raise BadRequest("measures must be strings")
    return CellQuery(group_by=tuple(group_by), filters=tuple(filters), measures=tuple(measures))


def _expect_list(body: dict, key: str, default):
    value = body.get(key, default)
    if not isinstance(value, list):
        raise BadRequest(f"{key} must be a list")
    return value


def query_to_payload(q: CellQuery) -> dict:
    return {
        "group_by": [{"hierarchy": g.hierarchy, "depth": g.depth} for g in q.group_by],
        "filters": [{"dim": f.dim, "members": sorted(f.members)} for f in q.filters],
        "measures": list(q.measures),
    }


def result_to_payload(result: CellResult) -> dict:
    return {
        "query": query_to_payload(result.query),
        "cells": [
            {
                "path": list(cell.path),
                "values": {
                    m: {"sum": v.sum, "known": v.known, "unknown": v.unknown}
                    for m, v in cell.values.items()
                },
            }
            for cell in result.cells
        ],
        "total": result.total,
    }


def query_payload(table: FactTable, body) -> dict:
    """Canonical /query response payload for a parsed JSON body."""
    q = parse_query_request(body)
    return result_to_payload(aggregate(table, q))


def schema_payload(table: FactTable, tables: CodebookTables) -> dict:
    hierarchies = []
    for name, hierarchy in HIERARCHIES.items():
        levels = []
        for i, level in enumerate(hierarchy.levels):
            column = name if len(hierarchy.levels) == 1 else f"{name}.{level}"
            levels.append({"name": level, "members": len(table.dictionaries[column])})
        hierarchies.append({"name": name, "levels": levels})
    return {
        "format_version": FORMAT_VERSION,
        "codebook_version": tables.version,
        "hierarchies": hierarchies,
        "measures": sorted(MEASURES),
        "total_facts": table.num_rows,
    }


def rules_payload(body) -> dict:
    if not isinstance(body, dict):
        raise BadRequest("request body must be a JSON object")
    raw = _expect_list(body, "transactions", default=None)
    if raw is None:
        raise BadRequest("'transactions' is required")
    transactions = []
    for i, items in enumerate(raw):
        if not isinstance(items, list) or not all(isinstance(x, str) for x in items):
            raise BadRequest("each transaction must be a list of string items")
        transactions.append(Transaction(incident_id=str(i), items=frozenset(items)))
    min_support = _number(body, "min_support")
    min_confidence = _number(body, "min_confidence")
    rules = mine_association_rules(transactions, min_support, min_confidence)
    return {
        "rules": [
            {
                "antecedent": list(r.antecedent),
                "consequent": list(r.consequent),
                "support": r.support,
                "confidence": r.confidence,
                "lift": r.lift,
                "support_count": r.support_count,
            }
            for r in rules
        ],
        "transaction_count": len(transactions),
    }


def sequences_payload(body) -> dict:
    if not isinstance(body, dict):
        raise BadRequest("request body must be a JSON object")
    raw = _expect_list(body, "sequences", default=None)
    if raw is None:
        raise BadRequest("'sequences' is required")
    sequences = []
    for seq in raw:
        if not isinstance(seq, list):
            raise BadRequest("each sequence must be a list of itemsets")
        steps = []
        for step in seq:
            if not isinstance(step, list) or not all(isinstance(x, str) for x in step):
                raise BadRequest("each itemset must be a list of string items")
            if step:
                steps.append(frozenset(step))
        sequences.append(steps)
    min_support = body.get("min_support")
    if not isinstance(min_support, int) or isinstance(min_support, bool):
        raise BadRequest("min_support must be an integer count")
    max_items = body.get("max_items")
    if max_items is not None and (not isinstance(max_items, int) or isinstance(max_items, bool)):
        raise BadRequest("max_items must be an integer")
    patterns: list[SequentialPattern] = mine_sequence_lists(
        sequences, min_support, max_items=max_items
    )
    return {
        "patterns": [
            {"elements": [list(e) for e in p.elements], "support": p.support}
            for p in patterns
        ],
        "entity_count": len(sequences),
    }


def outliers_payload(body, table: FactTable | None) -> dict:
    if not isinstance(body, dict):
        raise BadRequest("request body must be a JSON object")
    threshold = _number(body, "threshold")
    method = body.get("method", "robust_z")
    if not isinstance(method, str):
        raise BadRequest("method must be a string")
    if "series" in body:
        series = _expect_list(body, "series", default=None)
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in series):
            raise BadRequest("series must be numeric")
        reports = score_outliers(series, threshold, method)
        measure = ""
    elif "query" in body and "measure" in body:
        if table is None:
            raise NoCube()
        measure = body["measure"]
        if not isinstance(measure, str):
            raise BadRequest("measure must be a string")
        if measure not in MEASURES:
            raise QueryError(f"unknown measure {measure!r}")
        q = parse_query_request(body["query"])
        if measure not in q.measures:
            q = CellQuery(q.group_by, q.filters, q.measures + (measure,))
        result = aggregate(table, q)
        values = [cell.values[measure].sum for cell in result.cells]
        coords = [cell.path for cell in result.cells]
        reports = score_outliers(values, threshold, method, coords=coords, measure=measure)
    else:
        raise BadRequest("provide either 'series' or 'query' plus 'measure'")
    return {
        "outliers": [
            {
                "coords": list(r.coords),
                "measure": r.measure,
                "value": r.value,
                "score": r.score,
                "flagged": r.flagged,
                "method": r.method,
            }
            for r in reports
        ]
    }


def _number(body: dict, key: str) -> float:
    value = body.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise BadRequest(f"{key} must be a number")
    return value


class NoCube(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# App wiring


@dataclass
class _Job:
    status: str = "running"
    result: dict | None = None
    error: str | None = None


@dataclass
class ServiceState:
    table: FactTable | None = None
    tables: CodebookTables | None = None
    async_threshold: int = 5000
    jobs: dict[str, _Job] = field(default_factory=dict)
    _job_ids: "itertools.count" = field(default_factory=lambda: itertools.count(1))
    _lock: threading.Lock = field(default_factory=threading.Lock)

    def submit(self, fn) -> str:
        with self._lock:
            job_id = f"job-{next(self._job_ids)}"
            self.jobs[job_id] = _Job()

        def run() -> None:
            try:
                result = fn()
            except Exception as exc:  # report, don't kill the worker
                self.jobs[job_id].status = "failed"
                self.jobs[job_id].error = str(exc)
            else:
                self.jobs[job_id].result = result
                self.jobs[job_id].status = "done"

        threading.Thread(target=run, daemon=True).start()
        return job_id


def create_app(
    snapshot_path: str | None = None,
    table: FactTable | None = None,
    async_threshold: int = 5000,
) -> FastAPI:
    """Build the app; a snapshot may be given as a path or a live table."""
    tables = load_tables()
    if table is None and snapshot_path is not None:
        table = snapshot_load(snapshot_path, tables)
    state = ServiceState(table=table, tables=tables, async_threshold=async_threshold)

    app = FastAPI(title="incube", docs_url=None, redoc_url=None)
    app.state.cube = state
    # read-only API without credentials: permissive CORS lets the static
    # explorer run from any origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def respond(payload: dict, started: float, status: int = 200) -> Response:
        return Response(
            content=canonical_json(payload),
            status_code=status,
            media_type="application/json",
            headers={"X-Elapsed-Ms": f"{(time.perf_counter() - started) * 1000:.3f}"},
        )

    def error(status: int, message: str, started: float) -> Response:
        return respond({"error": message}, started, status)

    async def read_json(request: Request):
        raw = await request.body()
        try:
            return json.loads(raw)
        except ValueError as exc:
            raise BadRequest(f"body is not valid JSON: {exc}") from exc

    def guarded(handler):
        async def wrapped(request: Request) -> Response:
            started = time.perf_counter()
            try:
                payload = await handler(request)
            except BadRequest as exc:
                return error(400, str(exc), started)
            except (QueryError, ValueError) as exc:
                return error(422, str(exc), started)
            except NoCube:
                return error(503, "no cube loaded", started)
            return respond(payload, started)

        return wrapped

    def need_table() -> FactTable:
        if state.table is None:
            raise NoCube()
        return state.table

    @app.get("/schema")
    @guarded
    async def schema(request: Request) -> dict:
        return schema_payload(need_table(), state.tables)

    @app.post("/query")
    @guarded
    async def query(request: Request) -> dict:
        table = need_table()
        return query_payload(table, await read_json(request))

    @app.post("/mine/rules")
    @guarded
    async def mine_rules(request: Request) -> dict:
        body = await read_json(request)
        if isinstance(body, dict) and isinstance(body.get("transactions"), list) and len(
            body["transactions"]
        ) > state.async_threshold:
            return {"job": state.submit(lambda: rules_payload(body))}
        return rules_payload(body)

    @app.post("/mine/sequences")
    @guarded
    async def mine_seqs(request: Request) -> dict:
        body = await read_json(request)
        if isinstance(body, dict) and isinstance(body.get("sequences"), list) and len(
            body["sequences"]
        ) > state.async_threshold:
            return {"job": state.submit(lambda: sequences_payload(body))}
        return sequences_payload(body)

    @app.post("/mine/outliers")
    @guarded
    async def mine_outliers(request: Request) -> dict:
        return outliers_payload(await read_json(request), state.table)

    @app.get("/jobs/{job_id}")
    async def job_status(job_id: str) -> Response:
        started = time.perf_counter()
        job = state.jobs.get(job_id)
        if job is None:
            return error(404, f"no job {job_id!r}", started)
        payload: dict = {"status": job.status}
        if job.status == "done":
            payload["result"] = job.result
        elif job.status == "failed":
            payload["error"] = job.error
        return respond(payload, started)

    return app
