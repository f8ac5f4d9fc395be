"""Deterministic synthetic incident corpora.

The real dataset cannot be redistributed, so fixtures and benchmarks are
generated instead: seeded, reproducible byte-for-byte, drawing codes
only from the bundled tables, and guaranteed to pass validation with
zero Error-severity violations.
"""

from __future__ import annotations

import calendar
import datetime
import json
import random
from dataclasses import dataclass, fields, replace

from .codebook import CodebookTables, CodedCell, EventId, TRI_NO, TRI_YES, UNKNOWN, load_tables
from .ingest import Incident


@dataclass(frozen=True)
class GeneratorProfile:
    """Knobs for the synthetic generator; all rates are probabilities."""

    start_year: int = 1970
    end_year: int = 2008
    unknown_year: float = 0.002
    unknown_month: float = 0.03
    unknown_day: float = 0.08
    unknown_count: float = 0.15
    empty_provstate: float = 0.10
    empty_city: float = 0.15
    second_attack: float = 0.12
    third_attack: float = 0.03
    second_target: float = 0.15
    third_target: float = 0.04
    second_weapon: float = 0.10
    third_weapon: float = 0.02
    fourth_weapon: float = 0.005
    second_group: float = 0.06
    third_group: float = 0.015
    unknown_group: float = 0.25
    claim_rate: float = 0.35
    suicide_rate: float = 0.05
    doubt_rate: float = 0.08
    property_rate: float = 0.45
    extended_rate: float = 0.04
    group_pool: int = 24
    provstate_pool: int = 18
    city_pool: int = 120

    def validate(self) -> None:
        if self.start_year > self.end_year:
            raise ValueError("profile start_year must not exceed end_year")
        if not (1970 <= self.start_year and self.end_year <= 2100):
            raise ValueError("profile years must lie in 1970-2100")
        integer_fields = {"start_year", "end_year", "group_pool", "provstate_pool", "city_pool"}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in integer_fields:
                if int(value) != value or value < 0:
                    raise ValueError(f"profile field {f.name} must be a non-negative integer")
            elif not 0.0 <= value <= 1.0:
                raise ValueError(f"profile rate {f.name} must be in [0, 1], got {value}")
        if self.group_pool < 1 or self.provstate_pool < 1 or self.city_pool < 1:
            raise ValueError("profile pools must be at least 1")


DEFAULT_PROFILE = GeneratorProfile()


def load_profile(path: str) -> GeneratorProfile:
    """Read a profile from a JSON object; unknown keys are rejected."""
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        raise ValueError("profile file must hold a JSON object")
    known = {f.name for f in fields(GeneratorProfile)}
    bad = sorted(set(data) - known)
    if bad:
        raise ValueError(f"unknown profile field(s): {bad}")
    profile = replace(DEFAULT_PROFILE, **data)
    profile.validate()
    return profile


_MONTH_NAMES = [
    "",
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
]

_GROUP_ADJ = [
    "Red", "Black", "Northern", "Southern", "United", "Free", "Popular",
    "Revolutionary", "National", "Liberation", "People's", "Eastern",
]
_GROUP_NOUN = [
    "Front", "Brigade", "Army", "Movement", "Faction", "Commando",
    "League", "Cell", "Vanguard", "Militia", "Union", "Organization",
]


def generate_synthetic(
    seed: int,
    n: int,
    profile: GeneratorProfile | None = None,
    tables: CodebookTables | None = None,
) -> list[Incident]:
    """Produce `n` incidents, reproducibly for a given (seed, profile)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    profile = profile or DEFAULT_PROFILE
    profile.validate()
    tables = tables or load_tables()
    rng = random.Random(seed)

    geo_countries = sorted(
        code for code, region in tables.country_region.items() if region is not None
    )
    group_names = [
        f"{_GROUP_ADJ[i % len(_GROUP_ADJ)]} {_GROUP_NOUN[(i * 7 + i // len(_GROUP_ADJ)) % len(_GROUP_NOUN)]} {i + 1}"
        for i in range(profile.group_pool)
    ]
    subtypes_by_parent: dict[int, list[int]] = {}
    for sub in tables.weapon_subtypes.values():
        subtypes_by_parent.setdefault(sub.parent, []).append(sub.code)
    for lst in subtypes_by_parent.values():
        lst.sort()

    seq_counter: dict[tuple[int, int, int], int] = {}
    out: list[Incident] = []
    for _ in range(n):
        out.append(
            _one_incident(rng, profile, tables, geo_countries, group_names,
                          subtypes_by_parent, seq_counter)
        )
    return out


def _one_incident(
    rng: random.Random,
    profile: GeneratorProfile,
    tables: CodebookTables,
    geo_countries: list[int],
    group_names: list[str],
    subtypes_by_parent: dict[int, list[int]],
    seq_counter: dict[tuple[int, int, int], int],
) -> Incident:
    inc = Incident()

    # --- real recording date, with per-day sequence numbers
    year = rng.randint(profile.start_year, profile.end_year)
    month = rng.randint(1, 12)
    day = rng.randint(1, calendar.monthrange(year, month)[1])
    while seq_counter.get((year, month, day), 0) >= 99:
        nxt = datetime.date(year, month, day) + datetime.timedelta(days=1)
        year, month, day = nxt.year, nxt.month, nxt.day
    seq = seq_counter.get((year, month, day), 0)
    seq_counter[(year, month, day)] = seq + 1
    real_date = datetime.date(year, month, day)
    inc.eventid = EventId(year, month, day, seq)

    # --- incident date fields with unknown masking (day cascades with month)
    if rng.random() < profile.unknown_year:
        inc.year, inc.month, inc.day = UNKNOWN, UNKNOWN, UNKNOWN
        inc.approxdate = f"circa {year}"
    elif rng.random() < profile.unknown_month:
        inc.year = CodedCell(year)
        inc.month, inc.day = UNKNOWN, UNKNOWN
        inc.approxdate = f"{'first' if month <= 6 else 'second'} half of {year}"
    elif rng.random() < profile.unknown_day:
        inc.year, inc.month = CodedCell(year), CodedCell(month)
        inc.day = UNKNOWN
        inc.approxdate = f"{_MONTH_NAMES[month]} {year}"
    else:
        inc.year, inc.month, inc.day = CodedCell(year), CodedCell(month), CodedCell(day)

    # --- location: country valid at the real date, region derived from it
    while True:
        country = rng.choice(geo_countries)
        if tables.country_validity_at_date(country, real_date).valid:
            break
    inc.country = country
    inc.region = tables.region_of_country(country)
    if rng.random() >= profile.empty_provstate:
        inc.provstate = f"Province {rng.randint(1, profile.provstate_pool):02d}"
    if rng.random() >= profile.empty_city:
        inc.city = f"City {rng.randint(1, profile.city_pool):03d}"
    inc.vicinity = TRI_YES if rng.random() < 0.12 else TRI_NO
    if rng.random() < 0.05:
        inc.location = f"Near landmark {rng.randint(1, 40)}"

    # --- inclusion criteria and incident flags
    inc.crit1 = TRI_YES if rng.random() < 0.96 else TRI_NO
    inc.crit2 = TRI_YES if rng.random() < 0.93 else TRI_NO
    inc.crit3 = TRI_YES if rng.random() < 0.88 else TRI_NO
    if year < 1998:
        inc.doubtterr = UNKNOWN  # coded -9 before 1998
    else:
        inc.doubtterr = TRI_YES if rng.random() < profile.doubt_rate else TRI_NO
        if inc.doubtterr == TRI_YES:
            inc.alternative = rng.randint(1, 4)
    inc.multiple = TRI_YES if rng.random() < 0.10 else TRI_NO
    inc.conflict = TRI_YES if rng.random() < 0.18 else TRI_NO
    inc.success = TRI_YES if rng.random() < 0.86 else TRI_NO
    inc.suicide = TRI_YES if rng.random() < profile.suicide_rate else TRI_NO

    # --- attack types (slots fill low-to-high, distinct codes)
    attack_codes = rng.sample(sorted(tables.attack_types), 3)
    inc.attacktype1 = attack_codes[0]
    if rng.random() < profile.second_attack:
        inc.attacktype2 = attack_codes[1]
        if rng.random() < profile.third_attack:
            inc.attacktype3 = attack_codes[2]

    # --- targets
    target_codes = rng.sample(sorted(tables.target_types), 3)
    slots = 1
    if rng.random() < profile.second_target:
        slots = 2
        if rng.random() < profile.third_target:
            slots = 3
    for i in range(1, slots + 1):
        setattr(inc, f"targtype{i}", target_codes[i - 1])
        setattr(inc, f"entity{i}", rng.randint(1, 26))
        if rng.random() < 0.5:
            setattr(inc, f"corp{i}", f"Entity {rng.randint(1, 60)}")
        setattr(inc, f"target{i}", f"Target {rng.randint(1, 300)}")
        natlty = country if rng.random() < 0.8 else rng.choice(sorted(tables.countries))
        setattr(inc, f"natlty{i}", natlty)

    # --- weapons, subtype consistent with its slot's type
    weapon_codes = rng.sample(sorted(tables.weapon_types), 4)
    wslots = 1
    if rng.random() < profile.second_weapon:
        wslots = 2
        if rng.random() < profile.third_weapon:
            wslots = 3
            if rng.random() < profile.fourth_weapon:
                wslots = 4
    for i in range(1, wslots + 1):
        wtype = weapon_codes[i - 1]
        setattr(inc, f"weaptype{i}", wtype)
        children = subtypes_by_parent.get(wtype)
        if children and rng.random() < 0.7:
            setattr(inc, f"weapsubtype{i}", rng.choice(children))
    if rng.random() < 0.25:
        inc.weapdetail = f"Weapon detail note {rng.randint(1, 500)}"

    # --- perpetrators and claims
    groups = 0
    if rng.random() >= profile.unknown_group:
        groups = 1
        if rng.random() < profile.second_group:
            groups = 2
            if rng.random() < profile.third_group:
                groups = 3
    chosen = rng.sample(group_names, groups) if groups else []
    for i, name in enumerate(chosen, start=1):
        suffix = "" if i == 1 else str(i)
        setattr(inc, f"gname{suffix}", name)
        if rng.random() < 0.2:
            setattr(inc, f"gsubname{suffix}", f"{name} splinter wing")
    if groups:
        inc.guncertain = TRI_YES if rng.random() < 0.25 else TRI_NO
        if rng.random() < 0.3:
            inc.motive = f"Stated motive {rng.randint(1, 200)}"
    inc.nperps = _count(rng, profile, 1, 40)
    if inc.nperps.known:
        inc.nperpcap = (
            CodedCell(rng.randint(0, inc.nperps.value)) if rng.random() < 0.5 else UNKNOWN
        )

    claim_slots = [("claimed", "claimmode", "claimconf")]
    if groups >= 2:
        claim_slots.append(("claim2", "claimmode2", "claimconf2"))
    if groups >= 3:
        claim_slots.append(("claim3", "claimmode3", "claimconf3"))
    claimed_any = 0
    for flag, mode, conf in claim_slots:
        if rng.random() < profile.claim_rate:
            setattr(inc, flag, TRI_YES)
            claimed_any += 1
            setattr(inc, mode, rng.randint(1, 10))
            setattr(inc, conf, TRI_YES if rng.random() < 0.5 else TRI_NO)
        else:
            setattr(inc, flag, TRI_NO if rng.random() < 0.7 else UNKNOWN)
    if claimed_any >= 2:
        inc.compclaim = TRI_YES if rng.random() < 0.6 else TRI_NO
    elif rng.random() < 0.2:
        inc.compclaim = TRI_NO

    # --- casualties
    inc.nkill = _count(rng, profile, 0, 30)
    inc.nwound = _count(rng, profile, 0, 80)
    if inc.nkill.known:
        inc.nkillus = CodedCell(_sub_count(rng, inc.nkill.value))
        inc.nkillter = CodedCell(_sub_count(rng, inc.nkill.value))
    if inc.nwound.known:
        inc.nwoundus = CodedCell(_sub_count(rng, inc.nwound.value))
        inc.nwoundte = CodedCell(_sub_count(rng, inc.nwound.value))

    # --- property damage, amount consistent with the extent band
    if rng.random() < profile.property_rate:
        inc.property = TRI_YES
        extent = rng.choices([1, 2, 3, 4], weights=[1, 8, 70, 21])[0]
        inc.propextent = extent
        if extent == 1:
            inc.propvalue = CodedCell(rng.randint(1_000_000_001, 5_000_000_000))
        elif extent == 2:
            inc.propvalue = CodedCell(rng.randint(1_000_001, 999_999_999))
        elif extent == 3 and rng.random() < 0.7:
            inc.propvalue = CodedCell(rng.randint(100, 999_999))
        if rng.random() < 0.2:
            inc.propcomment = f"Damage note {rng.randint(1, 100)}"
    else:
        inc.property = TRI_NO if rng.random() < 0.8 else UNKNOWN

    # --- hostage / kidnapping block for barricade, kidnapping, hijacking
    extended_days: int | None = None
    if inc.attacktype1 in (4, 5, 6):
        inc.ishostkid = TRI_YES if rng.random() < 0.9 else UNKNOWN
        if inc.ishostkid == TRI_YES:
            inc.nhostkid = _count(rng, profile, 1, 60)
            if inc.nhostkid.known:
                inc.nhostkidus = CodedCell(_sub_count(rng, inc.nhostkid.value))
            if rng.random() < 0.55:
                inc.nhours = CodedCell(rng.randint(1, 23))
            else:
                extended_days = rng.randint(1, 45)
                inc.ndays = CodedCell(extended_days)
            inc.hostkidoutcome = rng.randint(1, 7)
            if inc.nhostkid.known:
                inc.nreleased = CodedCell(rng.randint(0, inc.nhostkid.value))
            else:
                inc.nreleased = _count(rng, profile, 0, 60)
            inc.ransom = TRI_YES if rng.random() < 0.4 else TRI_NO
            if inc.ransom == TRI_YES:
                inc.ransomamt = _money(rng, profile)
                if rng.random() < 0.3:
                    inc.ransomamtus = _money(rng, profile)
                if rng.random() < 0.5:
                    inc.ransompaid = _money(rng, profile)
                    if rng.random() < 0.3:
                        inc.ransompaidus = _money(rng, profile)
                if rng.random() < 0.25:
                    inc.ransomnote = f"Ransom note {rng.randint(1, 50)}"
            if inc.attacktype1 in (4, 6) and rng.random() < 0.15:
                inc.divert = tables.countries[rng.choice(sorted(tables.countries))]
            if inc.attacktype1 in (4, 6) and rng.random() < 0.2:
                inc.kidhijcountry = tables.countries[rng.choice(sorted(tables.countries))]
    else:
        inc.ishostkid = TRI_NO

    # --- extended incidents carry a resolution date
    if extended_days is not None:
        inc.extended = TRI_YES
        inc.resolution = real_date + datetime.timedelta(days=extended_days)
    elif rng.random() < profile.extended_rate:
        inc.extended = TRI_YES
        inc.resolution = real_date + datetime.timedelta(days=rng.randint(2, 90))
    else:
        inc.extended = TRI_NO

    # --- free text
    if year >= 1998:
        inc.summary = (
            f"Incident {inc.eventid_text}: synthetic narrative {rng.randint(1, 10_000)}."
        )
    inc.scite1 = f"Wire report {rng.randint(1, 5000)}"
    if rng.random() < 0.4:
        inc.scite2 = f"Regional daily {rng.randint(1, 2000)}"
    if rng.random() < 0.1:
        inc.scite3 = f"Archive item {rng.randint(1, 900)}"
    if rng.random() < 0.15:
        inc.addnotes = f"Additional note {rng.randint(1, 400)}"

    return inc


def _count(rng: random.Random, profile: GeneratorProfile, lo: int, hi: int) -> CodedCell:
    if rng.random() < profile.unknown_count:
        return UNKNOWN
    # skew towards small values, heavy tail
    span = hi - lo
    value = lo + min(span, int(rng.expovariate(1 / max(1.0, span / 8.0))))
    return CodedCell(value)


def _sub_count(rng: random.Random, total: int) -> int:
    return rng.randint(0, total) if total else 0


def _money(rng: random.Random, profile: GeneratorProfile) -> CodedCell:
    if rng.random() < profile.unknown_count:
        return UNKNOWN
    return CodedCell(rng.randint(1, 200) * 5_000)
