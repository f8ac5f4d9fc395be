"""Flat-file ingestion: delimited parsing, record decoding, validation.

The decode step is total: any raw record yields an ``Incident`` plus a
list of violations, never an exception.  Cross-field consistency rules
(R1-R9, documented in docs/validation_rules.md) are checked separately
by :func:`validate_incident` so they can run over already-decoded data.
"""

from __future__ import annotations

import calendar
import csv
import datetime
import enum
import io
import json
from dataclasses import dataclass, field
from typing import IO, Iterable

from .codebook import (
    UNKNOWN,
    CodebookTables,
    CodedCell,
    EventId,
    EventIdError,
    FieldKind,
    UnknownCodeError,
    decode_coded_numeric,
    format_event_id,
    load_tables,
    parse_event_id,
)


class IngestError(ValueError):
    """Unusable input: bad header, duplicate columns, unreadable stream."""


class Severity(enum.Enum):
    ERROR = "Error"
    WARNING = "Warning"


@dataclass(frozen=True)
class Violation:
    """One rule breach.  Rule ids are stable, documented identifiers."""

    rule: str
    severity: Severity
    fields: tuple[str, ...]
    message: str
    line: int = 0

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR


@dataclass
class RawRecord:
    """One data row: header-named cells, preserved verbatim."""

    cells: dict[str, str]
    line: int


# ---------------------------------------------------------------------------
# Delimited parsing


def parse_delimited(
    stream: IO[bytes] | IO[str] | str, delimiter: str = ","
) -> tuple[list[RawRecord], list[Violation]]:
    """Parse delimited text with RFC-4180 quoting into raw records.

    First row is the header.  Ragged rows (P1) and rows left open by an
    unbalanced quote (P2) are skipped with a diagnostic; cells are kept
    verbatim, leading zeros and surrounding spaces included.  Duplicate
    header names make the whole input unusable.
    """
    if len(delimiter) != 1:
        raise IngestError(f"delimiter must be a single character, got {delimiter!r}")
    if isinstance(stream, str):
        text = stream
    else:
        data = stream.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data

    rows, diagnostics = _tokenize(text, delimiter)
    if not rows:
        return [], diagnostics

    header_cells, _ = rows[0]
    header = [cell.strip() for cell in header_cells]
    dupes = {name for name in header if header.count(name) > 1}
    if dupes:
        raise IngestError(f"duplicate header column(s): {sorted(dupes)}")

    records: list[RawRecord] = []
    for cells, line in rows[1:]:
        if len(cells) != len(header):
            diagnostics.append(
                Violation(
                    rule="P1",
                    severity=Severity.ERROR,
                    fields=(),
                    message=f"row has {len(cells)} cells, header has {len(header)}; skipped",
                    line=line,
                )
            )
            continue
        records.append(RawRecord(cells=dict(zip(header, cells)), line=line))
    return records, diagnostics


def _tokenize(text: str, delimiter: str) -> tuple[list[tuple[list[str], int]], list[Violation]]:
    rows: list[tuple[list[str], int]] = []
    diagnostics: list[Violation] = []
    fields_: list[str] = []
    cell: list[str] = []
    line = 1
    row_start = 1
    in_quotes = False
    cell_started = False
    i = 0
    n = len(text)

    def end_cell() -> None:
        nonlocal cell, cell_started
        fields_.append("".join(cell))
        cell = []
        cell_started = False

    def end_row() -> None:
        nonlocal fields_
        end_cell()
        if not (len(fields_) == 1 and fields_[0] == ""):  # skip blank lines
            rows.append((fields_, row_start))
        fields_ = []

    while i < n:
        ch = text[i]
        if in_quotes:
            if ch == '"':
                if i + 1 < n and text[i + 1] == '"':
                    cell.append('"')
                    i += 2
                    continue
                in_quotes = False
                i += 1
                continue
            if ch == "\n":
                line += 1
            cell.append(ch)
            i += 1
            continue
        if ch == '"' and not cell:
            in_quotes = True
            cell_started = True
            i += 1
            continue
        if ch == delimiter:
            end_cell()
            i += 1
            continue
        if ch == "\r" or ch == "\n":
            end_row()
            line += 1
            row_start = line
            i += 2 if (ch == "\r" and i + 1 < n and text[i + 1] == "\n") else 1
            continue
        cell.append(ch)
        cell_started = True
        i += 1

    if in_quotes:
        diagnostics.append(
            Violation(
                rule="P2",
                severity=Severity.ERROR,
                fields=(),
                message="unbalanced quote; row skipped",
                line=row_start,
            )
        )
        return rows, diagnostics
    if cell or cell_started or fields_:
        end_row()
    return rows, diagnostics


# ---------------------------------------------------------------------------
# Incident record and the per-column decode registry


@dataclass
class Incident:
    """Fully decoded incident: one field per codebook variable."""

    # defined before the `property` *field* below shadows the decorator
    @property
    def eventid_text(self) -> str:
        return format_event_id(self.eventid) if self.eventid else ""

    eventid: EventId | None = None
    year: CodedCell = UNKNOWN
    month: CodedCell = UNKNOWN
    day: CodedCell = UNKNOWN
    approxdate: str = ""
    extended: CodedCell = UNKNOWN
    resolution: datetime.date | None = None
    country: int | None = None
    region: int | None = None
    provstate: str = ""
    city: str = ""
    vicinity: CodedCell = UNKNOWN
    location: str = ""
    summary: str = ""
    crit1: CodedCell = UNKNOWN
    crit2: CodedCell = UNKNOWN
    crit3: CodedCell = UNKNOWN
    doubtterr: CodedCell = UNKNOWN
    alternative: int | None = None
    multiple: CodedCell = UNKNOWN
    conflict: CodedCell = UNKNOWN
    success: CodedCell = UNKNOWN
    suicide: CodedCell = UNKNOWN
    attacktype1: int | None = None
    attacktype2: int | None = None
    attacktype3: int | None = None
    targtype1: int | None = None
    entity1: int | None = None
    corp1: str = ""
    target1: str = ""
    natlty1: int | None = None
    targtype2: int | None = None
    entity2: int | None = None
    corp2: str = ""
    target2: str = ""
    natlty2: int | None = None
    targtype3: int | None = None
    entity3: int | None = None
    corp3: str = ""
    target3: str = ""
    natlty3: int | None = None
    gname: str = ""
    gsubname: str = ""
    gname2: str = ""
    gsubname2: str = ""
    gname3: str = ""
    gsubname3: str = ""
    motive: str = ""
    guncertain: CodedCell = UNKNOWN
    nperps: CodedCell = UNKNOWN
    nperpcap: CodedCell = UNKNOWN
    claimed: CodedCell = UNKNOWN
    claimmode: int | None = None
    claimconf: CodedCell = UNKNOWN
    claim2: CodedCell = UNKNOWN
    claimmode2: int | None = None
    claimconf2: CodedCell = UNKNOWN
    claim3: CodedCell = UNKNOWN
    claimmode3: int | None = None
    claimconf3: CodedCell = UNKNOWN
    compclaim: CodedCell = UNKNOWN
    weaptype1: int | None = None
    weapsubtype1: int | None = None
    weaptype2: int | None = None
    weapsubtype2: int | None = None
    weaptype3: int | None = None
    weapsubtype3: int | None = None
    weaptype4: int | None = None
    weapsubtype4: int | None = None
    weapdetail: str = ""
    nkill: CodedCell = UNKNOWN
    nkillus: CodedCell = UNKNOWN
    nkillter: CodedCell = UNKNOWN
    nwound: CodedCell = UNKNOWN
    nwoundus: CodedCell = UNKNOWN
    nwoundte: CodedCell = UNKNOWN
    property: CodedCell = UNKNOWN
    propextent: int | None = None
    propvalue: CodedCell = UNKNOWN
    propcomment: str = ""
    ishostkid: CodedCell = UNKNOWN
    nhostkid: CodedCell = UNKNOWN
    nhostkidus: CodedCell = UNKNOWN
    nhours: CodedCell = UNKNOWN
    ndays: CodedCell = UNKNOWN
    divert: str = ""
    kidhijcountry: str = ""
    ransom: CodedCell = UNKNOWN
    ransomamt: CodedCell = UNKNOWN
    ransomamtus: CodedCell = UNKNOWN
    ransompaid: CodedCell = UNKNOWN
    ransompaidus: CodedCell = UNKNOWN
    ransomnote: str = ""
    hostkidoutcome: int | None = None
    nreleased: CodedCell = UNKNOWN
    addnotes: str = ""
    scite1: str = ""
    scite2: str = ""
    scite3: str = ""
    extras: dict[str, str] = field(default_factory=dict)
    source_line: int = field(default=0, compare=False)


# Column kinds drive both decoding and canonical re-encoding.
_EVENTID = "eventid"
_TEXT = "text"
_DATE = "date"


def _domain(tables: CodebookTables, name: str) -> dict:
    return {
        "country": tables.countries,
        "region": tables.regions,
        "natlty": tables.countries,
        "alternative": tables.alternatives,
        "attacktype": tables.attack_types,
        "targtype": tables.target_types,
        "entity": tables.entity_types,
        "claimmode": tables.claim_modes,
        "weaptype": tables.weapon_types,
        "weapsubtype": tables.weapon_subtypes,
        "propextent": tables.property_extents,
        "hostkidoutcome": tables.hostage_outcomes,
    }[name]


# column name -> kind; kind is a FieldKind, a code-domain name, or one of
# the local markers above.  Order is the canonical flat-file column order.
FIELD_SPECS: dict[str, object] = {
    "eventid": _EVENTID,
    "year": FieldKind.DATE_PART,
    "month": FieldKind.DATE_PART,
    "day": FieldKind.DATE_PART,
    "approxdate": _TEXT,
    "extended": FieldKind.TRISTATE,
    "resolution": _DATE,
    "country": "country",
    "region": "region",
    "provstate": _TEXT,
    "city": _TEXT,
    "vicinity": FieldKind.TRISTATE,
    "location": _TEXT,
    "summary": _TEXT,
    "crit1": FieldKind.TRISTATE,
    "crit2": FieldKind.TRISTATE,
    "crit3": FieldKind.TRISTATE,
    "doubtterr": FieldKind.TRISTATE,
    "alternative": "alternative",
    "multiple": FieldKind.TRISTATE,
    "conflict": FieldKind.TRISTATE,
    "success": FieldKind.TRISTATE,
    "suicide": FieldKind.TRISTATE,
    "attacktype1": "attacktype",
    "attacktype2": "attacktype",
    "attacktype3": "attacktype",
    "targtype1": "targtype",
    "entity1": "entity",
    "corp1": _TEXT,
    "target1": _TEXT,
    "natlty1": "natlty",
    "targtype2": "targtype",
    "entity2": "entity",
    "corp2": _TEXT,
    "target2": _TEXT,
    "natlty2": "natlty",
    "targtype3": "targtype",
    "entity3": "entity",
    "corp3": _TEXT,
    "target3": _TEXT,
    "natlty3": "natlty",
    "gname": _TEXT,
    "gsubname": _TEXT,
    "gname2": _TEXT,
    "gsubname2": _TEXT,
    "gname3": _TEXT,
    "gsubname3": _TEXT,
    "motive": _TEXT,
    "guncertain": FieldKind.TRISTATE,
    "nperps": FieldKind.COUNT,
    "nperpcap": FieldKind.COUNT,
    "claimed": FieldKind.TRISTATE,
    "claimmode": "claimmode",
    "claimconf": FieldKind.TRISTATE,
    "claim2": FieldKind.TRISTATE,
    "claimmode2": "claimmode",
    "claimconf2": FieldKind.TRISTATE,
    "claim3": FieldKind.TRISTATE,
    "claimmode3": "claimmode",
    "claimconf3": FieldKind.TRISTATE,
    "compclaim": FieldKind.TRISTATE,
    "weaptype1": "weaptype",
    "weapsubtype1": "weapsubtype",
    "weaptype2": "weaptype",
    "weapsubtype2": "weapsubtype",
    "weaptype3": "weaptype",
    "weapsubtype3": "weapsubtype",
    "weaptype4": "weaptype",
    "weapsubtype4": "weapsubtype",
    "weapdetail": _TEXT,
    "nkill": FieldKind.COUNT,
    "nkillus": FieldKind.COUNT,
    "nkillter": FieldKind.COUNT,
    "nwound": FieldKind.COUNT,
    "nwoundus": FieldKind.COUNT,
    "nwoundte": FieldKind.COUNT,
    "property": FieldKind.TRISTATE,
    "propextent": "propextent",
    "propvalue": FieldKind.COUNT,
    "propcomment": _TEXT,
    "ishostkid": FieldKind.TRISTATE,
    "nhostkid": FieldKind.COUNT,
    "nhostkidus": FieldKind.COUNT,
    "nhours": FieldKind.COUNT,
    "ndays": FieldKind.COUNT,
    "divert": _TEXT,
    "kidhijcountry": _TEXT,
    "ransom": FieldKind.TRISTATE,
    "ransomamt": FieldKind.COUNT,
    "ransomamtus": FieldKind.COUNT,
    "ransompaid": FieldKind.COUNT,
    "ransompaidus": FieldKind.COUNT,
    "ransomnote": _TEXT,
    "hostkidoutcome": "hostkidoutcome",
    "nreleased": FieldKind.COUNT,
    "addnotes": _TEXT,
    "scite1": _TEXT,
    "scite2": _TEXT,
    "scite3": _TEXT,
}

COLUMNS: tuple[str, ...] = tuple(FIELD_SPECS)

REQUIRED_COLUMNS = ("eventid", "year", "month", "day", "country", "region")


def decode_record(
    raw: RawRecord,
    tables: CodebookTables | None = None,
    aliases: dict[str, str] | None = None,
) -> tuple[Incident, list[Violation]]:
    """Decode one raw record into a typed Incident.

    Never raises on cell content: decode problems become D-rule
    violations (D1 bad event id, D2 unparseable cell, D3 code outside
    its domain) and the affected field falls back to Unknown/absent so
    the record can still be linted.
    """
    tables = tables or load_tables()
    violations: list[Violation] = []
    inc = Incident(source_line=raw.line)

    cells = raw.cells
    if aliases:
        cells = {aliases.get(name, name): value for name, value in raw.cells.items()}

    for name, value in cells.items():
        if name not in FIELD_SPECS:
            inc.extras[name] = value
            continue
        kind = FIELD_SPECS[name]
        if kind is _EVENTID:
            try:
                inc.eventid = parse_event_id(value.strip())
            except EventIdError as exc:
                violations.append(
                    Violation("D1", Severity.ERROR, ("eventid",), str(exc), raw.line)
                )
        elif kind is _TEXT:
            setattr(inc, name, value)
        elif kind is _DATE:
            text = value.strip()
            if text:
                try:
                    setattr(inc, name, datetime.date.fromisoformat(text))
                except ValueError:
                    violations.append(
                        Violation(
                            "D2",
                            Severity.ERROR,
                            (name,),
                            f"{name} cell {value!r} is not an ISO date",
                            raw.line,
                        )
                    )
        elif isinstance(kind, FieldKind):
            try:
                setattr(inc, name, decode_coded_numeric(kind, value))
            except ValueError:
                violations.append(
                    Violation(
                        "D2",
                        Severity.ERROR,
                        (name,),
                        f"{name} cell {value!r} is not numeric",
                        raw.line,
                    )
                )
        else:  # code-domain cell
            text = value.strip()
            if text == "" or text.lower() == "unknown":
                continue
            try:
                code = int(text)
            except ValueError:
                violations.append(
                    Violation(
                        "D2",
                        Severity.ERROR,
                        (name,),
                        f"{name} cell {value!r} is not a numeric code",
                        raw.line,
                    )
                )
                continue
            if code not in _domain(tables, kind):  # type: ignore[arg-type]
                violations.append(
                    Violation(
                        "D3",
                        Severity.ERROR,
                        (name,),
                        f"{name} code {code} is outside its domain",
                        raw.line,
                    )
                )
                continue
            setattr(inc, name, code)

    return inc, violations


_SLOT_CHAINS = (
    ("attacktype1", "attacktype2", "attacktype3"),
    ("targtype1", "targtype2", "targtype3"),
    ("weaptype1", "weaptype2", "weaptype3", "weaptype4"),
)


def validate_incident(inc: Incident, tables: CodebookTables | None = None) -> list[Violation]:
    """Cross-field consistency rules R1-R9, in stable rule order."""
    tables = tables or load_tables()
    out: list[Violation] = []
    line = inc.source_line

    def add(rule: str, severity: Severity, fields_: tuple[str, ...], message: str) -> None:
        out.append(Violation(rule, severity, fields_, message, line))

    # R1: a resolution date only applies to extended incidents
    if inc.resolution is not None and inc.extended != CodedCell(1):
        add(
            "R1",
            Severity.ERROR,
            ("resolution", "extended"),
            "resolution date recorded but incident is not extended",
        )

    # R2: weapon subtype must belong to the weapon type in the same slot
    for slot in range(1, 5):
        sub = getattr(inc, f"weapsubtype{slot}")
        if sub is None:
            continue
        parent = tables.weapon_subtype_parent(sub)
        wtype = getattr(inc, f"weaptype{slot}")
        if wtype != parent:
            add(
                "R2",
                Severity.ERROR,
                (f"weaptype{slot}", f"weapsubtype{slot}"),
                f"weapon subtype {sub} belongs to type {parent}, slot has {wtype}",
            )

    # R3: hours field only holds sub-24h durations, and excludes days
    if inc.nhours.known:
        if inc.nhours.value >= 24:
            add("R3", Severity.ERROR, ("nhours",), "nhours must be below 24; use ndays")
        if inc.ndays.known:
            add(
                "R3",
                Severity.ERROR,
                ("nhours", "ndays"),
                "duration recorded in both hours and days",
            )

    # R4: the region cell must agree with the country's region
    if inc.country is not None and inc.country in tables.countries:
        try:
            derived = tables.region_of_country(inc.country)
        except UnknownCodeError:
            add(
                "R4",
                Severity.ERROR,
                ("country", "region"),
                f"country {inc.country} has no region assignment",
            )
        else:
            if inc.region != derived:
                add(
                    "R4",
                    Severity.ERROR,
                    ("country", "region"),
                    f"region cell {inc.region} disagrees with derived region {derived}",
                )

    # R5: defunct/pre-independence country codes for the incident date
    if inc.country is not None and inc.country in tables.countries:
        window = _possible_dates(inc)
        if window is not None:
            early = tables.country_validity_at_date(inc.country, window[0])
            late = tables.country_validity_at_date(inc.country, window[1])
            if early.anachronism and late.anachronism:
                hint = (
                    f"; suggested code {early.suggestion}" if early.suggestion is not None else ""
                )
                add(
                    "R5",
                    Severity.WARNING,
                    ("country", "year", "month", "day"),
                    f"country {inc.country} is anachronistic for the incident date{hint}",
                )

    # R6: exact damage amount should land in the recorded extent band
    if inc.propvalue.known and inc.propextent in tables.property_extents:
        band = tables.property_extents[inc.propextent]
        if (band.min_usd is not None or band.max_usd is not None) and not band.contains(
            inc.propvalue.value
        ):
            add(
                "R6",
                Severity.WARNING,
                ("propextent", "propvalue"),
                f"propvalue {inc.propvalue.value} outside the {band.name} band",
            )

    # R7: multi-slot fields fill low slots first
    for chain in _SLOT_CHAINS:
        for prev, cur in zip(chain, chain[1:]):
            if getattr(inc, cur) is not None and getattr(inc, prev) is None:
                add(
                    "R7",
                    Severity.ERROR,
                    (prev, cur),
                    f"{cur} is set but {prev} is empty; slots fill low-to-high",
                )

    # R8: hostage-outcome fields presuppose a hostage incident
    if (inc.hostkidoutcome is not None or inc.nreleased.known) and inc.ishostkid == CodedCell(0):
        add(
            "R8",
            Severity.WARNING,
            ("ishostkid", "hostkidoutcome", "nreleased"),
            "hostage outcome recorded but ishostkid is No",
        )

    # R9: a known day requires a known month
    if inc.day.known and inc.month.unknown:
        add("R9", Severity.ERROR, ("month", "day"), "day is known but month is unknown")

    return out


def _possible_dates(inc: Incident) -> tuple[datetime.date, datetime.date] | None:
    """Earliest/latest calendar dates consistent with the known parts."""
    if inc.year.unknown:
        return None
    year = inc.year.value
    if not 1 <= year <= 9999:
        return None
    if inc.month.known:
        month = inc.month.value
        if not 1 <= month <= 12:
            return None
        last = calendar.monthrange(year, month)[1]
        if inc.day.known:
            if not 1 <= inc.day.value <= last:
                return None
            exact = datetime.date(year, month, inc.day.value)
            return exact, exact
        return datetime.date(year, month, 1), datetime.date(year, month, last)
    return datetime.date(year, 1, 1), datetime.date(year, 12, 31)


def distribute_casualties(linked: list[str], total: CodedCell) -> list[CodedCell]:
    """Evenly distribute a cumulative casualty figure over linked incidents.

    The list must be time-ordered, earliest first; the remainder goes to
    the earliest incidents so outputs always sum back to the total.
    """
    if not linked:
        raise ValueError("linked incident list must be non-empty")
    n = len(linked)
    if total.unknown:
        return [UNKNOWN] * n
    share, remainder = divmod(total.value, n)
    return [CodedCell(share + 1) if i < remainder else CodedCell(share) for i in range(n)]


# ---------------------------------------------------------------------------
# Canonical re-encoding (inverse of decode over canonical columns)


def encode_incident(inc: Incident) -> dict[str, str]:
    """Render an Incident back to canonical cell spellings."""
    row: dict[str, str] = {}
    for name, kind in FIELD_SPECS.items():
        if kind is _EVENTID:
            row[name] = inc.eventid_text
        elif kind is _TEXT:
            row[name] = getattr(inc, name)
        elif kind is _DATE:
            value = getattr(inc, name)
            row[name] = value.isoformat() if value else ""
        elif isinstance(kind, FieldKind):
            cell: CodedCell = getattr(inc, name)
            if cell.known:
                row[name] = str(cell.value)
            else:
                row[name] = {
                    FieldKind.COUNT: "-99",
                    FieldKind.TRISTATE: "-9",
                    FieldKind.DATE_PART: "0",
                }[kind]
        else:
            code = getattr(inc, name)
            row[name] = "" if code is None else str(code)
    return row


def write_incidents(incidents: Iterable[Incident], stream: IO[str], delimiter: str = ",") -> None:
    writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
    writer.writerow(COLUMNS)
    for inc in incidents:
        row = encode_incident(inc)
        writer.writerow([row[name] for name in COLUMNS])


def incidents_to_text(incidents: Iterable[Incident], delimiter: str = ",") -> str:
    buf = io.StringIO()
    write_incidents(incidents, buf, delimiter)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Whole-file pipeline helpers


def read_incidents(
    stream: IO[bytes] | IO[str] | str,
    tables: CodebookTables | None = None,
    delimiter: str = ",",
    aliases: dict[str, str] | None = None,
) -> tuple[list[Incident], list[Violation]]:
    """parse + decode + validate in one pass.

    Returns incidents in input order and every violation (parser
    diagnostics, decode issues, rule breaches) sorted by line.
    """
    tables = tables or load_tables()
    records, violations = parse_delimited(stream, delimiter)
    if records:
        present = set(records[0].cells)
        if aliases:
            present = {aliases.get(name, name) for name in present}
        missing = [name for name in REQUIRED_COLUMNS if name not in present]
        if missing:
            raise IngestError(f"header is missing required column(s): {missing}")
    incidents: list[Incident] = []
    for record in records:
        inc, decode_violations = decode_record(record, tables, aliases)
        violations.extend(decode_violations)
        violations.extend(validate_incident(inc, tables))
        incidents.append(inc)
    violations.sort(key=lambda v: (v.line, v.rule, v.fields))
    return incidents, violations


def load_alias_map(path: str) -> dict[str, str]:
    """Load a header-alias map (JSON object: file column -> canonical)."""
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in data.items()
    ):
        raise IngestError("alias map must be a JSON object of strings")
    return data


def write_violation_report(
    violations: Iterable[Violation],
    stream: IO[str],
    incidents_by_line: dict[int, Incident] | None = None,
) -> None:
    """Delimited report: rule,severity,line,eventid,fields,message."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["rule", "severity", "line", "eventid", "fields", "message"])
    by_line = incidents_by_line or {}
    for v in violations:
        inc = by_line.get(v.line)
        writer.writerow(
            [
                v.rule,
                v.severity.value,
                v.line,
                inc.eventid_text if inc else "",
                " ".join(v.fields),
                v.message,
            ]
        )


