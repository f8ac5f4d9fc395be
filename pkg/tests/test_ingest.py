import datetime
import io
import random

import pytest
from hypothesis import given, strategies as st

from incube.codebook import CodedCell, TRI_NO, TRI_YES, UNKNOWN
from incube.ingest import (
    Incident,
    IngestError,
    RawRecord,
    Severity,
    decode_record,
    distribute_casualties,
    incidents_to_text,
    parse_delimited,
    read_incidents,
    validate_incident,
    write_violation_report,
)
from incube.synthetic import generate_synthetic


def _record(**cells) -> RawRecord:
    base = {"eventid": "199307250001", "year": "1993", "month": "7", "day": "25",
            "country": "92", "region": "6"}
    base.update(cells)
    return RawRecord(cells=base, line=2)


class TestParseDelimited:
    def test_header_plus_one_row(self):
        records, diags = parse_delimited("a,b\n1,2\n")
        assert len(records) == 1 and not diags
        assert records[0].cells == {"a": "1", "b": "2"}
        assert records[0].line == 2

    def test_quoted_delimiter(self):
        records, _ = parse_delimited('a,b\n"x,y",2\n')
        assert records[0].cells["a"] == "x,y"

    def test_doubled_quote_escape(self):
        records, _ = parse_delimited('a\n"say ""hi"""\n')
        assert records[0].cells["a"] == 'say "hi"'

    def test_newline_inside_quotes(self):
        records, _ = parse_delimited('a,b\n"line1\nline2",2\nq,r\n')
        assert records[0].cells["a"] == "line1\nline2"
        assert records[1].line == 4  # line numbers track embedded newlines

    def test_ragged_row_skipped_with_diagnostic(self):
        records, diags = parse_delimited("a,b,c,d\n1,2,3\n1,2,3,4\n")
        assert len(records) == 1
        assert [d.rule for d in diags] == ["P1"]
        assert diags[0].line == 2

    def test_unbalanced_quote(self):
        records, diags = parse_delimited('a,b\n"oops,2\n')
        assert not records
        assert [d.rule for d in diags] == ["P2"]

    def test_duplicate_header_rejected(self):
        with pytest.raises(IngestError):
            parse_delimited("a,b,a\n1,2,3\n")

    def test_cells_kept_verbatim(self):
        records, _ = parse_delimited("a,b\n007, padded \n")
        assert records[0].cells == {"a": "007", "b": " padded "}

    def test_tab_delimiter_and_bytes(self):
        records, _ = parse_delimited(io.BytesIO(b"a\tb\n1\t2\n"), delimiter="\t")
        assert records[0].cells == {"a": "1", "b": "2"}

    def test_crlf(self):
        records, _ = parse_delimited("a,b\r\n1,2\r\n")
        assert records[0].cells == {"a": "1", "b": "2"}


class TestDecodeRecord:
    def test_unknown_month_day(self, tables):
        inc, violations = decode_record(_record(month="0", day="0"), tables)
        assert inc.month == UNKNOWN and inc.day == UNKNOWN
        assert not violations

    def test_count_sentinel(self, tables):
        inc, _ = decode_record(_record(nkill="-99", nwound="3"), tables)
        assert inc.nkill == UNKNOWN
        assert inc.nwound == CodedCell(3)

    def test_country_and_region(self, tables):
        inc, violations = decode_record(_record(), tables)
        assert inc.country == 92 and inc.region == 6
        assert not violations
        assert not validate_incident(inc, tables)

    def test_bad_eventid_still_emits_record(self, tables):
        inc, violations = decode_record(_record(eventid="not-an-id"), tables)
        assert inc.eventid is None
        assert [v.rule for v in violations] == ["D1"]
        assert inc.country == 92

    def test_unparseable_cell(self, tables):
        inc, violations = decode_record(_record(nkill="many"), tables)
        assert inc.nkill == UNKNOWN
        assert [v.rule for v in violations] == ["D2"]

    def test_out_of_domain_code(self, tables):
        inc, violations = decode_record(_record(attacktype1="77"), tables)
        assert inc.attacktype1 is None
        assert [v.rule for v in violations] == ["D3"]

    def test_extras_preserved(self, tables):
        inc, _ = decode_record(_record(mystery="42"), tables)
        assert inc.extras == {"mystery": "42"}

    def test_alias_map(self, tables):
        raw = RawRecord(
            cells={"event_id": "199307250001", "iyear": "1993", "imonth": "7",
                   "iday": "25", "country": "92", "region": "6"},
            line=2,
        )
        aliases = {"event_id": "eventid", "iyear": "year", "imonth": "month", "iday": "day"}
        inc, violations = decode_record(raw, tables, aliases)
        assert not violations
        assert inc.year == CodedCell(1993) and inc.eventid_text == "199307250001"

    def test_total_on_garbage(self, tables):
        rng = random.Random(5)
        pool = ["", "0", "-9", "-99", "x", "9999", "1.5", "Unknown", '"q"', "-1"]
        from incube.ingest import COLUMNS

        for trial in range(50):
            cells = {c: rng.choice(pool) for c in rng.sample(COLUMNS, 30)}
            inc, violations = decode_record(RawRecord(cells=cells, line=trial), tables)
            assert isinstance(inc, Incident)
            validate_incident(inc, tables)  # must not raise either


class TestValidationRules:
    def test_r1_resolution_requires_extended(self, tables):
        inc = Incident(extended=TRI_NO, resolution=datetime.date(1998, 4, 2))
        assert ["R1"] == [v.rule for v in validate_incident(inc, tables)]
        inc.extended = TRI_YES
        assert not validate_incident(inc, tables)

    def test_r2_subtype_parent_mismatch(self, tables):
        inc = Incident(weaptype1=5, weapsubtype1=7)  # grenade under firearms
        assert ["R2"] == [v.rule for v in validate_incident(inc, tables)]
        inc.weaptype1 = 6
        assert not validate_incident(inc, tables)

    def test_r3_hours_bound(self, tables):
        inc = Incident(nhours=CodedCell(30))
        assert ["R3"] == [v.rule for v in validate_incident(inc, tables)]

    def test_r3_hours_and_days_conflict(self, tables):
        inc = Incident(nhours=CodedCell(5), ndays=CodedCell(2))
        assert ["R3"] == [v.rule for v in validate_incident(inc, tables)]

    def test_r4_region_disagrees(self, tables):
        inc = Incident(country=92, region=1)
        assert ["R4"] == [v.rule for v in validate_incident(inc, tables)]

    def test_r4_regionless_country(self, tables):
        inc = Incident(country=296, region=6)  # Kurdish: no region exists
        assert ["R4"] == [v.rule for v in validate_incident(inc, tables)]

    def test_r5_anachronism_warns(self, tables):
        inc = Incident(country=362, region=8, year=CodedCell(1991),
                       month=CodedCell(6), day=CodedCell(1))
        violations = validate_incident(inc, tables)
        assert [v.rule for v in violations] == ["R5"]
        assert violations[0].severity is Severity.WARNING
        assert "75" in violations[0].message

    def test_r5_partial_date_needs_certainty(self, tables):
        # month unknown in 1990 straddles the unification date: no warning
        inc = Incident(country=362, region=8, year=CodedCell(1990))
        assert not validate_incident(inc, tables)
        inc.year = CodedCell(1992)  # every completion is anachronistic
        assert ["R5"] == [v.rule for v in validate_incident(inc, tables)]

    def test_r6_band_mismatch(self, tables):
        inc = Incident(propextent=3, propvalue=CodedCell(5_000_000))
        violations = validate_incident(inc, tables)
        assert [v.rule for v in violations] == ["R6"]
        assert violations[0].severity is Severity.WARNING
        inc.propvalue = CodedCell(500)
        assert not validate_incident(inc, tables)

    def test_r7_slots_fill_low_to_high(self, tables):
        inc = Incident(attacktype2=2)
        assert ["R7"] == [v.rule for v in validate_incident(inc, tables)]
        inc = Incident(weaptype1=5, weaptype3=6)
        assert ["R7"] == [v.rule for v in validate_incident(inc, tables)]

    def test_r8_hostage_outcome_without_hostages(self, tables):
        inc = Incident(ishostkid=TRI_NO, hostkidoutcome=2)
        violations = validate_incident(inc, tables)
        assert [v.rule for v in violations] == ["R8"]
        assert violations[0].severity is Severity.WARNING

    def test_r9_day_without_month(self, tables):
        inc = Incident(year=CodedCell(1978), day=CodedCell(12))
        assert ["R9"] == [v.rule for v in validate_incident(inc, tables)]

    def test_validation_is_pure(self, tables):
        inc = Incident(country=92, region=1, nhours=CodedCell(30), attacktype2=2)
        first = validate_incident(inc, tables)
        assert first == validate_incident(inc, tables)
        assert [v.rule for v in first] == ["R3", "R4", "R7"]


class TestDistributeCasualties:
    def test_examples(self):
        ten = distribute_casualties(["a", "b", "c", "d"], CodedCell(10))
        assert [c.value for c in ten] == [3, 3, 2, 2]
        eight = distribute_casualties(["a", "b", "c", "d"], CodedCell(8))
        assert [c.value for c in eight] == [2, 2, 2, 2]
        assert distribute_casualties(["a", "b", "c"], UNKNOWN) == [UNKNOWN] * 3

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            distribute_casualties([], CodedCell(4))

    @given(st.integers(0, 10_000), st.integers(1, 50))
    def test_total_preserved_and_even(self, total, n):
        shares = distribute_casualties([str(i) for i in range(n)], CodedCell(total))
        values = [c.value for c in shares]
        assert sum(values) == total
        assert max(values) - min(values) <= 1
        assert values == sorted(values, reverse=True)  # remainder goes earliest


class TestSynthetic:
    def test_empty(self):
        assert generate_synthetic(1, 0) == []

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            generate_synthetic(1, -1)

    def test_deterministic_bytes(self):
        a = incidents_to_text(generate_synthetic(1, 100))
        b = incidents_to_text(generate_synthetic(1, 100))
        assert a == b

    def test_different_seeds_differ(self):
        assert incidents_to_text(generate_synthetic(1, 50)) != incidents_to_text(
            generate_synthetic(2, 50)
        )

    def test_zero_errors(self, fixture_incidents, tables):
        for inc in fixture_incidents:
            errors = [v for v in validate_incident(inc, tables) if v.is_error]
            assert not errors, errors

    def test_roundtrip_law(self, fixture_incidents):
        text = incidents_to_text(fixture_incidents)
        reread, violations = read_incidents(text)
        assert not [v for v in violations if v.is_error]
        assert reread == fixture_incidents

    def test_eventids_unique(self, fixture_incidents):
        ids = [inc.eventid_text for inc in fixture_incidents]
        assert len(set(ids)) == len(ids)


class TestPipeline:
    def test_missing_required_columns(self):
        with pytest.raises(IngestError):
            read_incidents("a,b\n1,2\n")

    def test_violation_report_format(self, tables):
        incidents, violations = read_incidents(
            "eventid,year,month,day,country,region,nhours\n"
            "199307250001,1993,7,25,92,6,30\n"
        )
        buf = io.StringIO()
        write_violation_report(violations, buf, {i.source_line: i for i in incidents})
        lines = buf.getvalue().splitlines()
        assert lines[0] == "rule,severity,line,eventid,fields,message"
        assert lines[1].startswith("R3,Error,2,199307250001,nhours,")
