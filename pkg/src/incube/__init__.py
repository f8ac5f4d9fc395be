"""incube: OLAP cube engine and mining toolkit for incident flat files.

The package restructures GTD-codebook incident records into a columnar
star-schema cube (Time/Space/attack/target/weapon/perpetrator/...
dimensions), answers roll-up/drill-down/slice/dice queries over it, and
mines association rules, sequential patterns, and outliers.
"""

from .codebook import (
    CodebookTables,
    CodedCell,
    EventId,
    EventIdError,
    FieldKind,
    UNKNOWN,
    UnknownCodeError,
    Validity,
    country_validity_at_date,
    decode_coded_numeric,
    format_event_id,
    load_tables,
    parse_event_id,
    region_of_country,
    weapon_subtype_parent,
)
from .cube import (
    CellQuery,
    CellResult,
    FactTable,
    Filter,
    GroupBy,
    MeasureValue,
    MEASURES,
    QueryError,
    SnapshotError,
    SnapshotFormatError,
    SnapshotVersionError,
    aggregate,
    build_facts,
    dice,
    drilldown,
    result_to_delimited,
    rollup,
    snapshot_load,
    snapshot_save,
)
from .dimensions import (
    FLAT_DIMS,
    HIERARCHIES,
    Hierarchy,
    MemberPath,
    UNKNOWN_MEMBER,
    extended_duration_days,
    flat_member,
    member_label,
    space_path,
    time_path,
)
from .ingest import (
    Incident,
    IngestError,
    RawRecord,
    Severity,
    Violation,
    decode_record,
    distribute_casualties,
    parse_delimited,
    read_incidents,
    validate_incident,
    write_incidents,
)
from .mining import (
    AssociationRule,
    OutlierReport,
    SequentialPattern,
    Transaction,
    build_transactions,
    mine_association_rules,
    mine_sequence_lists,
    mine_sequences,
    outliers_for_measure,
    score_outliers,
)
from .synthetic import DEFAULT_PROFILE, GeneratorProfile, generate_synthetic

__version__ = "0.1.0"
