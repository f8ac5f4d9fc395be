"""Walk through the coded domains and the ingest validation rules.

Run:  python3 demos/01_codebook_and_validation.py
"""

import datetime

from incube import (
    FieldKind,
    decode_coded_numeric,
    format_event_id,
    load_tables,
    parse_event_id,
    read_incidents,
)

tables = load_tables()

# --- the 12-digit event id grammar ---------------------------------------
eid = parse_event_id("199307250001")
print("event id 199307250001 ->", eid)
print("second case that day  ->", parse_event_id("199307250002"))
print("formatted back        ->", format_event_id(eid))

# --- country and region tables --------------------------------------------
print()
print("country 92  =", tables.countries[92], "-> region", tables.region_of_country(92),
      f"({tables.regions[tables.region_of_country(92)].name})")
print("country 217 =", tables.countries[217], "-> region", tables.region_of_country(217))
print("13 regions, member counts:",
      {code: len(r.members) for code, r in sorted(tables.regions.items())})

# --- watershed dates: which country code is valid when ---------------------
print()
for country, when in ((362, "1989-05-01"), (362, "1991-06-01"), (63, "1990-01-01")):
    verdict = tables.country_validity_at_date(country, datetime.date.fromisoformat(when))
    label = "valid" if verdict.valid else f"anachronism (suggest {verdict.suggestion})"
    print(f"{tables.countries[country]:<22} on {when}: {label}")

# --- sentinel decoding ------------------------------------------------------
print()
print('count "-99"      ->', decode_coded_numeric(FieldKind.COUNT, "-99"))
print('tri-state "-9"   ->', decode_coded_numeric(FieldKind.TRISTATE, "-9"))
print('date part "0"    ->', decode_coded_numeric(FieldKind.DATE_PART, "0"))
print('count "5"        ->', decode_coded_numeric(FieldKind.COUNT, "5"))

# --- cross-field validation on a deliberately dirty file --------------------
dirty = (
    "eventid,year,month,day,country,region,weaptype1,weapsubtype1,nhours,extended,resolution\n"
    "199307250001,1993,7,25,92,6,5,7,30,0,1993-08-01\n"  # R1 R2 R3 all at once
    "199307250002,1993,7,25,92,1,,,,-9,\n"  # region cell disagrees: R4
)
incidents, violations = read_incidents(dirty)
print()
print(f"dirty file: {len(incidents)} incidents, {len(violations)} violations")
for v in violations:
    print(f"  line {v.line}  {v.rule} [{v.severity.value}] {v.message}")
