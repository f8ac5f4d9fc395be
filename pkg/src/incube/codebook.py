"""Coded domains of the GTD-style incident codebook.

Everything that is a fixed vocabulary lives here: event-id grammar,
country/region tables, attack/target/weapon/claim/outcome code lists,
political watershed dates, and the sentinel conventions used to mark
unknown values in raw cells.

Code tables are loaded from delimited data files bundled with the
package (``incube/data/``), so corrections are data edits, not code
edits.  All tables are immutable after construction and safe for
concurrent reads.
"""

from __future__ import annotations

import csv
import datetime
import enum
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources


class EventIdError(ValueError):
    """Raised when a 12-digit event id does not follow the grammar."""


class UnknownCodeError(LookupError):
    """Raised when a numeric code is absent from its code table."""


@dataclass(frozen=True)
class EventId:
    """Identity of one incident: recording date plus per-day sequence.

    Canonical text form is 12 digits: ``yyyymmdd`` + ``"00"`` + the
    zero-padded sequence number (00-99).
    """

    year: int
    month: int
    day: int
    sequence: int

    def date(self) -> datetime.date:
        return datetime.date(self.year, self.month, self.day)

    def __str__(self) -> str:
        return format_event_id(self)


def parse_event_id(text: str) -> EventId:
    """Decode the canonical 12-digit event id.

    Unlike the year/month/day incident fields, an event id always
    carries a real recording date, so zero month/day parts are rejected.
    """
    if not isinstance(text, str) or len(text) != 12:
        raise EventIdError(f"event id must be exactly 12 characters, got {text!r}")
    if not text.isascii() or not text.isdigit():
        raise EventIdError(f"event id must be all digits, got {text!r}")
    if text[8:10] != "00":
        raise EventIdError(f"digits 9-10 of an event id must be '00', got {text!r}")
    year, month, day = int(text[0:4]), int(text[4:6]), int(text[6:8])
    if not 1970 <= year <= 2100:
        raise EventIdError(f"event id year {year} outside 1970-2100")
    try:
        datetime.date(year, month, day)
    except ValueError as exc:
        raise EventIdError(f"event id {text!r} has no valid calendar date: {exc}") from exc
    return EventId(year=year, month=month, day=day, sequence=int(text[10:12]))


def format_event_id(eid: EventId) -> str:
    """Inverse of :func:`parse_event_id`."""
    return f"{eid.year:04d}{eid.month:02d}{eid.day:02d}00{eid.sequence:02d}"


@dataclass(frozen=True)
class CodedCell:
    """Decoded numeric cell: either a known integer or Unknown.

    Unknown arises only from the sentinel spellings of the field's kind
    (-99 for counts, -9 for tri-states, 0 for date parts, or the literal
    word "Unknown").
    """

    value: int | None = None

    @property
    def known(self) -> bool:
        return self.value is not None

    @property
    def unknown(self) -> bool:
        return self.value is None

    def __repr__(self) -> str:
        return "Unknown" if self.value is None else f"Known({self.value})"


UNKNOWN = CodedCell(None)
TRI_YES = CodedCell(1)
TRI_NO = CodedCell(0)


class FieldKind(enum.Enum):
    """Sentinel convention groups for numeric codebook cells."""

    COUNT = "count"        # -99 means unknown (casualties, hostages, dollars)
    TRISTATE = "tristate"  # -9 means unknown (yes/no flags)
    DATE_PART = "date"     # 0 means unknown (year/month/day)


_SENTINELS = {
    FieldKind.COUNT: -99,
    FieldKind.TRISTATE: -9,
    FieldKind.DATE_PART: 0,
}


def decode_coded_numeric(kind: FieldKind, raw: str) -> CodedCell:
    """Decode raw cell text under the sentinel convention of `kind`.

    Empty cells and the literal spelling "Unknown" decode to Unknown for
    every kind; everything else must parse as an integer.
    """
    text = raw.strip()
    if text == "" or text.lower() == "unknown":
        return UNKNOWN
    try:
        value = int(text)
    except ValueError:
        raise ValueError(f"cell {raw!r} is neither an integer nor a sentinel") from None
    if value == _SENTINELS[kind]:
        return UNKNOWN
    return CodedCell(value)


@dataclass(frozen=True)
class Region:
    code: int
    name: str
    members: tuple[int, ...]


@dataclass(frozen=True)
class WeaponSubtype:
    code: int
    name: str
    parent: int


@dataclass(frozen=True)
class PropertyExtent:
    """Damage band; bounds are exclusive and "likely", not exact."""

    code: int
    name: str
    min_usd: int | None
    max_usd: int | None

    def contains(self, value: int) -> bool:
        if self.min_usd is not None and value <= self.min_usd:
            return False
        if self.max_usd is not None and value >= self.max_usd:
            return False
        return True


@dataclass(frozen=True)
class Watershed:
    """One political-transition date bounding a country's validity window.

    ``role`` says which side of the window the date closes: a "start"
    row means the code is usable from `date` (inclusive) onward, an
    "end" row means the code stops being usable on `date`.  The
    counterpart, when present, is the predecessor (start rows) or
    successor (end rows) code to suggest.
    """

    country: int
    event: str  # independence | termination | unification | rename
    date: datetime.date
    role: str  # start | end
    counterpart: int | None


@dataclass(frozen=True)
class Validity:
    """Verdict of a country-code-at-date check."""

    valid: bool
    suggestion: int | None = None

    @property
    def anachronism(self) -> bool:
        return not self.valid


VALID = Validity(True)


@dataclass(frozen=True)
class CodebookTables:
    """All coded domains, loaded once from the bundled data files."""

    version: str
    countries: dict[int, str]
    country_region: dict[int, int | None]
    regions: dict[int, Region]
    attack_types: dict[int, str]
    target_types: dict[int, str]
    entity_types: dict[int, str]
    weapon_types: dict[int, str]
    weapon_subtypes: dict[int, WeaponSubtype]
    claim_modes: dict[int, str]
    hostage_outcomes: dict[int, str]
    property_extents: dict[int, PropertyExtent]
    alternatives: dict[int, str]
    watersheds: tuple[Watershed, ...]

    def region_of_country(self, country: int) -> int:
        """Region whose member list contains `country`.

        Nationality-only codes (Kurdish, Jewish, ...) belong to no
        region and raise :class:`UnknownCodeError`.
        """
        if country not in self.countries:
            raise UnknownCodeError(f"unknown country code {country}")
        region = self.country_region[country]
        if region is None:
            raise UnknownCodeError(
                f"country code {country} ({self.countries[country]}) is not "
                "assigned to any region"
            )
        return region

    def country_validity_at_date(self, country: int, date: datetime.date) -> Validity:
        """Check a country code against the watershed table.

        Comparisons are inclusive of the watershed date: on the day of
        German unification the valid code is already Germany.  Countries
        with no watershed entry are always valid.
        """
        if country not in self.countries:
            raise UnknownCodeError(f"unknown country code {country}")
        for row in self.watersheds:
            if row.country != country:
                continue
            if row.role == "start" and date < row.date:
                return Validity(False, row.counterpart)
            if row.role == "end" and date >= row.date:
                return Validity(False, row.counterpart)
        return VALID

    def weapon_subtype_parent(self, subtype: int) -> int:
        """Parent weapon type of a subtype code (total on 1-26)."""
        try:
            return self.weapon_subtypes[subtype].parent
        except KeyError:
            raise UnknownCodeError(f"unknown weapon subtype code {subtype}") from None


def region_of_country(country: int, tables: CodebookTables | None = None) -> int:
    return (tables or load_tables()).region_of_country(country)


def country_validity_at_date(
    country: int, date: datetime.date, tables: CodebookTables | None = None
) -> Validity:
    return (tables or load_tables()).country_validity_at_date(country, date)


def weapon_subtype_parent(subtype: int, tables: CodebookTables | None = None) -> int:
    return (tables or load_tables()).weapon_subtype_parent(subtype)


def _read_rows(filename: str) -> list[dict[str, str]]:
    path = resources.files("incube.data").joinpath(filename)
    with path.open("r", encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


def _code_name_table(filename: str) -> dict[int, str]:
    return {int(row["code"]): row["name"] for row in _read_rows(filename)}


@lru_cache(maxsize=1)
def load_tables() -> CodebookTables:
    """Load and integrity-check the bundled code tables (cached)."""
    version = (
        resources.files("incube.data").joinpath("VERSION").read_text(encoding="utf-8").strip()
    )

    countries: dict[int, str] = {}
    country_region: dict[int, int | None] = {}
    for row in _read_rows("countries.csv"):
        code = int(row["code"])
        countries[code] = row["name"]
        country_region[code] = int(row["region"]) if row["region"] else None

    members: dict[int, list[int]] = {}
    for code, region in country_region.items():
        if region is not None:
            members.setdefault(region, []).append(code)
    regions = {
        int(row["code"]): Region(
            code=int(row["code"]),
            name=row["name"],
            members=tuple(sorted(members.get(int(row["code"]), ()))),
        )
        for row in _read_rows("regions.csv")
    }

    weapon_types = _code_name_table("weapon_types.csv")
    weapon_subtypes = {
        int(row["code"]): WeaponSubtype(int(row["code"]), row["name"], int(row["parent"]))
        for row in _read_rows("weapon_subtypes.csv")
    }
    property_extents = {
        int(row["code"]): PropertyExtent(
            code=int(row["code"]),
            name=row["name"],
            min_usd=int(row["min_usd"]) if row["min_usd"] else None,
            max_usd=int(row["max_usd"]) if row["max_usd"] else None,
        )
        for row in _read_rows("property_extents.csv")
    }
    watersheds = tuple(
        Watershed(
            country=int(row["country"]),
            event=row["event"],
            date=datetime.date.fromisoformat(row["date"]),
            role=row["role"],
            counterpart=int(row["counterpart"]) if row["counterpart"] else None,
        )
        for row in _read_rows("watersheds.csv")
    )

    tables = CodebookTables(
        version=version,
        countries=countries,
        country_region=country_region,
        regions=regions,
        attack_types=_code_name_table("attack_types.csv"),
        target_types=_code_name_table("target_types.csv"),
        entity_types=_code_name_table("entity_types.csv"),
        weapon_types=weapon_types,
        weapon_subtypes=weapon_subtypes,
        claim_modes=_code_name_table("claim_modes.csv"),
        hostage_outcomes=_code_name_table("hostage_outcomes.csv"),
        property_extents=property_extents,
        alternatives=_code_name_table("alternatives.csv"),
        watersheds=watersheds,
    )
    _check_integrity(tables)
    return tables


def _check_integrity(tables: CodebookTables) -> None:
    for code, region in tables.country_region.items():
        if region is not None and region not in tables.regions:
            raise ValueError(f"country {code} references unknown region {region}")
    seen: set[int] = set()
    for region in tables.regions.values():
        overlap = seen.intersection(region.members)
        if overlap:
            raise ValueError(f"countries {sorted(overlap)} appear in more than one region")
        seen.update(region.members)
        for member in region.members:
            if member not in tables.countries:
                raise ValueError(f"region {region.code} lists unknown country {member}")
    for sub in tables.weapon_subtypes.values():
        if sub.parent not in tables.weapon_types:
            raise ValueError(f"weapon subtype {sub.code} has unknown parent {sub.parent}")
    for row in tables.watersheds:
        if row.country not in tables.countries:
            raise ValueError(f"watershed row references unknown country {row.country}")
        if row.counterpart is not None and row.counterpart not in tables.countries:
            raise ValueError(f"watershed row references unknown counterpart {row.counterpart}")
        if row.role not in ("start", "end"):
            raise ValueError(f"watershed row for {row.country} has bad role {row.role!r}")
