"""Dimension hierarchies and the mapping from incidents onto members.

Two real hierarchies exist: Time (year > month > day) and Space
(region > country > provstate > city).  Everything else is a flat,
single-level dimension.  Unknown values cascade downward: once a level
is unknown, every deeper level is unknown too, so roll-ups stay exact.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass

from .codebook import CodebookTables, UnknownCodeError, load_tables
from .ingest import Incident


class _UnknownMember:
    """Singleton member for an unknown value at some level."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "UnknownMember"


UNKNOWN_MEMBER = _UnknownMember()

UNKNOWN_LABEL = "Unknown"

Member = object  # str | int | _UnknownMember


@dataclass(frozen=True)
class Hierarchy:
    name: str
    levels: tuple[str, ...]

    @property
    def depth(self) -> int:
        return len(self.levels)


TIME = Hierarchy("time", ("year", "month", "day"))
SPACE = Hierarchy("space", ("region", "country", "provstate", "city"))

FLAT_DIMS: tuple[str, ...] = (
    "attack",
    "target",
    "weapon",
    "perpetrator",
    "success",
    "suicide",
    "claimmode",
    "hostkidoutcome",
    "propextent",
    "crit1",
    "crit2",
    "crit3",
    "doubtterr",
)

HIERARCHIES: dict[str, Hierarchy] = {
    "time": TIME,
    "space": SPACE,
    **{name: Hierarchy(name, (name,)) for name in FLAT_DIMS},
}


@dataclass(frozen=True)
class MemberPath:
    """Per-level members for one incident along one hierarchy."""

    hierarchy: str
    members: tuple[Member, ...]

    def __post_init__(self) -> None:
        seen_unknown = False
        for member in self.members:
            if member is UNKNOWN_MEMBER:
                seen_unknown = True
            elif seen_unknown:
                raise ValueError(
                    f"known member below an unknown level in {self.hierarchy} path"
                )

    def labels(self) -> tuple[str, ...]:
        return tuple(member_label(m) for m in self.members)


def member_label(member: Member) -> str:
    if member is UNKNOWN_MEMBER:
        return UNKNOWN_LABEL
    return str(member)


def time_path(inc: Incident) -> MemberPath:
    """Time members; an unknown year blanks the whole path."""
    if inc.year.unknown:
        return MemberPath("time", (UNKNOWN_MEMBER,) * 3)
    members: list[Member] = [f"{inc.year.value:04d}"]
    if inc.month.unknown:
        members += [UNKNOWN_MEMBER, UNKNOWN_MEMBER]
    else:
        members.append(f"{inc.month.value:02d}")
        members.append(f"{inc.day.value:02d}" if inc.day.known else UNKNOWN_MEMBER)
    return MemberPath("time", tuple(members))


def space_path(inc: Incident, tables: CodebookTables | None = None) -> MemberPath:
    """Space members; region comes from the country table, never the file."""
    tables = tables or load_tables()
    if inc.country is None:
        raise UnknownCodeError("incident has no country code")
    region = tables.region_of_country(inc.country)
    members: tuple[Member, ...] = (
        tables.regions[region].name,
        tables.countries[inc.country],
        inc.provstate if inc.provstate else UNKNOWN_MEMBER,
        (inc.city if inc.city else UNKNOWN_MEMBER) if inc.provstate else UNKNOWN_MEMBER,
    )
    return MemberPath("space", members)


def _tristate_member(cell) -> Member:
    if cell.unknown:
        return UNKNOWN_MEMBER
    return "Yes" if cell.value == 1 else "No" if cell.value == 0 else str(cell.value)


def flat_member(inc: Incident, dim: str, tables: CodebookTables | None = None) -> Member:
    """Slot-1 member of a flat dimension (multi-slot handling is the
    mining module's job; the cube stays one-fact-per-incident)."""
    tables = tables or load_tables()
    if dim == "attack":
        return _coded(inc.attacktype1, tables.attack_types)
    if dim == "target":
        return _coded(inc.targtype1, tables.target_types)
    if dim == "weapon":
        return _coded(inc.weaptype1, tables.weapon_types)
    if dim == "perpetrator":
        return inc.gname if inc.gname else UNKNOWN_MEMBER
    if dim == "success":
        return _tristate_member(inc.success)
    if dim == "suicide":
        return _tristate_member(inc.suicide)
    if dim == "claimmode":
        return _coded(inc.claimmode, tables.claim_modes)
    if dim == "hostkidoutcome":
        return _coded(inc.hostkidoutcome, tables.hostage_outcomes)
    if dim == "propextent":
        return (
            tables.property_extents[inc.propextent].name
            if inc.propextent in tables.property_extents
            else UNKNOWN_MEMBER
        )
    if dim == "crit1":
        return _tristate_member(inc.crit1)
    if dim == "crit2":
        return _tristate_member(inc.crit2)
    if dim == "crit3":
        return _tristate_member(inc.crit3)
    if dim == "doubtterr":
        return _tristate_member(inc.doubtterr)
    raise ValueError(f"unrecognized flat dimension {dim!r}")


def _coded(code: int | None, table: dict[int, str]) -> Member:
    if code is None:
        return UNKNOWN_MEMBER
    if code not in table:
        raise UnknownCodeError(f"code {code} missing from its table")
    return table[code]


def extended_duration_days(inc: Incident) -> int | None:
    """Days from the incident date to its resolution, when both are known.

    Derived attribute for extended incidents; deliberately not a
    hierarchy level.
    """
    if inc.resolution is None or inc.year.unknown or inc.month.unknown or inc.day.unknown:
        return None
    try:
        start = datetime.date(inc.year.value, inc.month.value, inc.day.value)
    except ValueError:
        return None
    return (inc.resolution - start).days
