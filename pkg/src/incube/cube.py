"""Columnar star-schema fact store and the OLAP query algebra.

Facts are one row per incident.  Dimension keys are integer ids into
per-level member dictionaries (insertion order by first occurrence, so
builds are deterministic).  Measures are int64 columns paired with an
unknown-mask; sums are exact integer arithmetic and unknown cells are
excluded from sums but tallied per cell.

Multi-slot fields key the cube on slot 1 only, which keeps every
measure additive (one fact, one cell); the remaining slots feed the
mining module instead.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from .codebook import CodebookTables, load_tables
from .dimensions import FLAT_DIMS, HIERARCHIES, flat_member, member_label, space_path, time_path
from .ingest import Incident


class QueryError(ValueError):
    """Query does not fit the cube schema (dim, depth, member, measure)."""


class SnapshotError(ValueError):
    """Snapshot file cannot be used."""


class SnapshotFormatError(SnapshotError):
    """Corrupt, truncated, or structurally wrong snapshot."""


class SnapshotVersionError(SnapshotError):
    """Snapshot carries an unsupported format or codebook version."""


FORMAT_VERSION = 1

# ---------------------------------------------------------------------------
# Measures


@dataclass(frozen=True)
class MeasureDef:
    name: str
    aggregator: str  # "count" | "sum"
    source: str | None  # Incident attribute holding a CodedCell


MEASURES: dict[str, MeasureDef] = {
    "incident_count": MeasureDef("incident_count", "count", None),
    **{
        name: MeasureDef(name, "sum", name)
        for name in (
            "nkill",
            "nwound",
            "nkillus",
            "nkillter",
            "nwoundus",
            "nwoundte",
            "nperps",
            "nperpcap",
            "propvalue",
            "ransomamt",
            "ransompaid",
            "nhostkid",
            "nreleased",
        )
    },
}


# ---------------------------------------------------------------------------
# Fact table


def _level_columns(hierarchy: str) -> list[str]:
    levels = HIERARCHIES[hierarchy].levels
    if len(levels) == 1:
        return [hierarchy]
    return [f"{hierarchy}.{level}" for level in levels]

KEY_COLUMNS: tuple[str, ...] = tuple(
    col for name in ("time", "space", *FLAT_DIMS) for col in _level_columns(name)
)


@dataclass
class FactTable:
    """Immutable-after-build columnar store."""

    num_rows: int
    keys: dict[str, np.ndarray]  # column -> int32 member ids
    dictionaries: dict[str, list[str]]  # column -> id -> label
    measures: dict[str, np.ndarray]  # measure -> int64 values (0 where unknown)
    masks: dict[str, np.ndarray]  # measure -> bool, True where unknown
    codebook_version: str = ""

    def equals(self, other: "FactTable") -> bool:
        if self.num_rows != other.num_rows or self.codebook_version != other.codebook_version:
            return False
        if self.dictionaries != other.dictionaries:
            return False
        for mine, theirs in ((self.keys, other.keys), (self.measures, other.measures), (self.masks, other.masks)):
            if mine.keys() != theirs.keys():
                return False
            if any(not np.array_equal(mine[k], theirs[k]) for k in mine):
                return False
        return True


def build_facts(
    incidents: Iterable[Incident], tables: CodebookTables | None = None
) -> FactTable:
    """Encode incidents into the columnar store.

    Callers decide the validation policy; incidents with Error-severity
    violations should normally be excluded before this point.
    """
    tables = tables or load_tables()
    label_rows: dict[str, list[str]] = {col: [] for col in KEY_COLUMNS}
    measure_rows: dict[str, list[int]] = {m: [] for m in MEASURES if m != "incident_count"}
    mask_rows: dict[str, list[bool]] = {m: [] for m in measure_rows}

    count = 0
    for inc in incidents:
        count += 1
        tpath = time_path(inc).labels()
        spath = space_path(inc, tables).labels()
        for level, value in zip(_level_columns("time"), tpath):
            label_rows[level].append(value)
        for level, value in zip(_level_columns("space"), spath):
            label_rows[level].append(value)
        for dim in FLAT_DIMS:
            label_rows[dim].append(member_label(flat_member(inc, dim, tables)))
        for name in measure_rows:
            cell = getattr(inc, name)
            measure_rows[name].append(cell.value if cell.known else 0)
            mask_rows[name].append(cell.unknown)

    keys: dict[str, np.ndarray] = {}
    dictionaries: dict[str, list[str]] = {}
    for col, labels in label_rows.items():
        ids: dict[str, int] = {}
        encoded = np.empty(count, dtype=np.int32)
        for i, label in enumerate(labels):
            encoded[i] = ids.setdefault(label, len(ids))
        keys[col] = encoded
        dictionaries[col] = list(ids)

    return FactTable(
        num_rows=count,
        keys=keys,
        dictionaries=dictionaries,
        measures={m: np.asarray(v, dtype=np.int64) for m, v in measure_rows.items()},
        masks={m: np.asarray(v, dtype=bool) for m, v in mask_rows.items()},
        codebook_version=tables.version,
    )


# ---------------------------------------------------------------------------
# Queries


@dataclass(frozen=True)
class GroupBy:
    hierarchy: str
    depth: int = 1


@dataclass(frozen=True)
class Filter:
    """Membership filter on one dimension level.

    `dim` is a flat dimension name ("attack") or a dotted hierarchy
    level ("space.country").  Tri-state criteria predicates are ordinary
    filters on crit1/crit2/crit3/doubtterr with members from
    {"Yes", "No", "Unknown"}.
    """

    dim: str
    members: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(self.members))


@dataclass(frozen=True)
class CellQuery:
    group_by: tuple[GroupBy, ...] = ()
    filters: tuple[Filter, ...] = ()
    measures: tuple[str, ...] = ("incident_count",)

    def __post_init__(self) -> None:
        object.__setattr__(self, "group_by", tuple(self.group_by))
        object.__setattr__(self, "filters", tuple(self.filters))
        object.__setattr__(self, "measures", tuple(self.measures))


@dataclass(frozen=True)
class MeasureValue:
    sum: int
    known: int
    unknown: int


@dataclass
class ResultCell:
    path: tuple[str, ...]
    values: dict[str, MeasureValue]


@dataclass
class CellResult:
    query: CellQuery
    cells: list[ResultCell]
    total: int  # facts passing the filters


def _axis_columns(table: FactTable, q: CellQuery) -> list[str]:
    columns: list[str] = []
    for entry in q.group_by:
        if entry.hierarchy not in HIERARCHIES:
            raise QueryError(f"unknown hierarchy or dimension {entry.hierarchy!r}")
        hierarchy = HIERARCHIES[entry.hierarchy]
        if not 1 <= entry.depth <= hierarchy.depth:
            raise QueryError(
                f"depth {entry.depth} out of range 1-{hierarchy.depth} for {hierarchy.name}"
            )
        columns.extend(_level_columns(hierarchy.name)[: entry.depth])
    return columns


def resolve_filter_column(dim: str) -> str:
    """Map a filter dim spec onto a key column name."""
    if dim in FLAT_DIMS:
        return dim
    if "." in dim:
        hierarchy, _, level = dim.partition(".")
        if hierarchy in HIERARCHIES and level in HIERARCHIES[hierarchy].levels:
            return dim if len(HIERARCHIES[hierarchy].levels) > 1 else hierarchy
    raise QueryError(f"unknown filter dimension {dim!r}")


def aggregate(table: FactTable, q: CellQuery) -> CellResult:
    """Exact group-by aggregation: filters first, then hash grouping.

    Cells with zero facts are omitted; cell order is canonical
    (lexicographic by path labels).
    """
    for m in q.measures:
        if m not in MEASURES:
            raise QueryError(f"unknown measure {m!r}")

    mask = np.ones(table.num_rows, dtype=bool)
    for f in q.filters:
        column = resolve_filter_column(f.dim)
        if not f.members:
            raise QueryError(f"filter on {f.dim!r} has no members")
        dictionary = table.dictionaries[column]
        ids = []
        for member in f.members:
            try:
                ids.append(dictionary.index(member))
            except ValueError:
                raise QueryError(f"member {member!r} not present in {f.dim}") from None
        mask &= np.isin(table.keys[column], ids)

    axis_columns = _axis_columns(table, q)
    total = int(mask.sum())

    if axis_columns:
        key_matrix = np.stack([table.keys[col][mask] for col in axis_columns], axis=1)
        if key_matrix.shape[0] == 0:
            return CellResult(query=q, cells=[], total=0)
        unique_keys, inverse = np.unique(key_matrix, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        n_groups = unique_keys.shape[0]
    else:
        if total == 0:
            # grand total over an empty selection: emit nothing
            return CellResult(query=q, cells=[], total=0)
        unique_keys = np.zeros((1, 0), dtype=np.int32)
        inverse = np.zeros(total, dtype=np.int64)
        n_groups = 1

    group_counts = np.bincount(inverse, minlength=n_groups)

    per_measure: dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
    for m in q.measures:
        if MEASURES[m].aggregator == "count":
            per_measure[m] = (group_counts, group_counts, np.zeros(n_groups, dtype=np.int64))
            continue
        values = table.measures[m][mask]
        unknown = table.masks[m][mask]
        known = ~unknown
        sums = np.zeros(n_groups, dtype=np.int64)
        np.add.at(sums, inverse[known], values[known])
        known_counts = np.bincount(inverse[known], minlength=n_groups)
        unknown_counts = np.bincount(inverse[unknown], minlength=n_groups)
        per_measure[m] = (sums, known_counts, unknown_counts)

    cells = []
    for g in range(n_groups):
        path = tuple(
            table.dictionaries[col][unique_keys[g, i]] for i, col in enumerate(axis_columns)
        )
        values = {
            m: MeasureValue(int(s[g]), int(k[g]), int(u[g]))
            for m, (s, k, u) in per_measure.items()
        }
        cells.append(ResultCell(path=path, values=values))
    cells.sort(key=lambda cell: cell.path)
    return CellResult(query=q, cells=cells, total=total)


# ---------------------------------------------------------------------------
# Query algebra


def _find_group(q: CellQuery, hierarchy: str) -> int:
    for i, entry in enumerate(q.group_by):
        if entry.hierarchy == hierarchy:
            return i
    raise QueryError(f"hierarchy {hierarchy!r} is not in the query's group-by")


def rollup(q: CellQuery, hierarchy: str) -> CellQuery:
    """One level coarser along `hierarchy`."""
    i = _find_group(q, hierarchy)
    entry = q.group_by[i]
    if entry.depth <= 1:
        raise QueryError(f"{hierarchy} is already at its root level")
    group_by = list(q.group_by)
    group_by[i] = GroupBy(hierarchy, entry.depth - 1)
    return replace(q, group_by=tuple(group_by))


def drilldown(q: CellQuery, hierarchy: str) -> CellQuery:
    """One level finer along `hierarchy`."""
    i = _find_group(q, hierarchy)
    entry = q.group_by[i]
    if entry.depth >= HIERARCHIES[hierarchy].depth:
        raise QueryError(f"{hierarchy} is already at its leaf level")
    group_by = list(q.group_by)
    group_by[i] = GroupBy(hierarchy, entry.depth + 1)
    return replace(q, group_by=tuple(group_by))


def slice(q: CellQuery, hierarchy: str, member: str) -> CellQuery:  # noqa: A001
    """Fix one member at the hierarchy's current depth and drop the axis."""
    i = _find_group(q, hierarchy)
    entry = q.group_by[i]
    level = HIERARCHIES[hierarchy].levels[entry.depth - 1]
    dim = hierarchy if len(HIERARCHIES[hierarchy].levels) == 1 else f"{hierarchy}.{level}"
    group_by = tuple(e for j, e in enumerate(q.group_by) if j != i)
    filters = q.filters + (Filter(dim, (member,)),)
    return replace(q, group_by=group_by, filters=filters)


def dice(q: CellQuery, dim: str, members: Iterable[str]) -> CellQuery:
    """Restrict to a member set, keeping the group-by as is."""
    members = tuple(members)
    if not members:
        raise QueryError("dice needs a non-empty member set")
    resolve_filter_column(dim)
    return replace(q, filters=q.filters + (Filter(dim, members),))


# ---------------------------------------------------------------------------
# Result export


def result_to_delimited(result: CellResult, delimiter: str = ",") -> str:
    """Axis columns, then one value/known/unknown triple per measure."""
    import csv
    import io

    header: list[str] = []
    for entry in result.query.group_by:
        header.extend(_level_columns(entry.hierarchy)[: entry.depth])
    for m in result.query.measures:
        header.extend([m, f"{m}_known", f"{m}_unknown"])
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(header)
    for cell in result.cells:
        row: list[object] = list(cell.path)
        for m in result.query.measures:
            value = cell.values[m]
            row.extend([value.sum, value.known, value.unknown])
        writer.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Snapshot container (byte layout documented in docs/snapshot_format.md)


def _encode_array(arr: np.ndarray) -> dict[str, str]:
    canonical = np.ascontiguousarray(arr)
    if canonical.dtype == bool:
        canonical = canonical.astype(np.uint8)
    little = canonical.astype(canonical.dtype.newbyteorder("<"), copy=False)
    return {
        "dtype": canonical.dtype.name,
        "data": base64.b64encode(little.tobytes()).decode("ascii"),
    }


def _decode_array(spec: dict, expected_len: int, name: str) -> np.ndarray:
    try:
        dtype = np.dtype(spec["dtype"]).newbyteorder("<")
        raw = base64.b64decode(spec["data"].encode("ascii"), validate=True)
        arr = np.frombuffer(raw, dtype=dtype).astype(np.dtype(spec["dtype"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SnapshotFormatError(f"column {name}: {exc}") from exc
    if arr.shape[0] != expected_len:
        raise SnapshotFormatError(
            f"column {name}: expected {expected_len} entries, found {arr.shape[0]}"
        )
    if spec["dtype"] == "uint8":
        return arr.astype(bool)
    return arr


def snapshot_bytes(table: FactTable) -> bytes:
    payload = {
        "format": "incube-snapshot",
        "format_version": FORMAT_VERSION,
        "codebook_version": table.codebook_version,
        "num_rows": table.num_rows,
        "hierarchies": {name: list(h.levels) for name, h in HIERARCHIES.items()},
        "dictionaries": table.dictionaries,
        "keys": {col: _encode_array(arr) for col, arr in table.keys.items()},
        "measures": {m: _encode_array(arr) for m, arr in table.measures.items()},
        "masks": {m: _encode_array(arr) for m, arr in table.masks.items()},
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def snapshot_save(table: FactTable, path: str) -> None:
    with open(path, "wb") as handle:
        handle.write(snapshot_bytes(table))


def snapshot_load(path: str, tables: CodebookTables | None = None) -> FactTable:
    """Load a snapshot, rejecting version mismatches and corrupt files."""
    tables = tables or load_tables()
    try:
        with open(path, "rb") as handle:
            payload = json.loads(handle.read().decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise SnapshotFormatError(f"snapshot is not readable: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != "incube-snapshot":
        raise SnapshotFormatError("not an incube snapshot")
    if payload.get("format_version") != FORMAT_VERSION:
        raise SnapshotVersionError(
            f"snapshot format version {payload.get('format_version')!r}, "
            f"this build reads {FORMAT_VERSION}"
        )
    if payload.get("codebook_version") != tables.version:
        raise SnapshotVersionError(
            f"snapshot codebook version {payload.get('codebook_version')!r} does not match "
            f"bundled tables ({tables.version})"
        )
    expected_hierarchies = {name: list(h.levels) for name, h in HIERARCHIES.items()}
    if payload.get("hierarchies") != expected_hierarchies:
        raise SnapshotFormatError("snapshot hierarchy definitions do not match this build")
    try:
        num_rows = int(payload["num_rows"])
        dictionaries = {col: list(map(str, labels)) for col, labels in payload["dictionaries"].items()}
        keys = {
            col: _decode_array(spec, num_rows, col) for col, spec in payload["keys"].items()
        }
        measures = {
            m: _decode_array(spec, num_rows, m) for m, spec in payload["measures"].items()
        }
        masks = {m: _decode_array(spec, num_rows, m) for m, spec in payload["masks"].items()}
    except (KeyError, TypeError, AttributeError) as exc:
        raise SnapshotFormatError(f"snapshot is missing sections: {exc}") from exc
    if set(keys) != set(KEY_COLUMNS) or set(dictionaries) != set(KEY_COLUMNS):
        raise SnapshotFormatError("snapshot key columns do not match the schema")
    sum_measures = {m for m, d in MEASURES.items() if d.aggregator == "sum"}
    if set(measures) != sum_measures or set(masks) != sum_measures:
        raise SnapshotFormatError("snapshot measure columns do not match the schema")
    for col, arr in keys.items():
        if arr.size and (arr.min() < 0 or arr.max() >= len(dictionaries[col])):
            raise SnapshotFormatError(f"column {col} has ids outside its dictionary")
    table = FactTable(
        num_rows=num_rows,
        keys=keys,
        dictionaries=dictionaries,
        measures=measures,
        masks=masks,
        codebook_version=payload["codebook_version"],
    )
    return table
