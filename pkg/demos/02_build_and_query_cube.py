"""Build a cube from synthetic incidents and explore it with the OLAP algebra.

Run:  python3 demos/02_build_and_query_cube.py
"""

import tempfile

from incube import (
    CellQuery,
    Filter,
    GroupBy,
    aggregate,
    build_facts,
    dice,
    drilldown,
    generate_synthetic,
    rollup,
    snapshot_load,
    snapshot_save,
)
from incube.cube import slice as slice_query


def show(title, result, limit=6):
    print(f"\n--- {title} (total facts: {result.total})")
    for cell in result.cells[:limit]:
        values = {m: v.sum for m, v in cell.values.items()}
        unknowns = {m: v.unknown for m, v in cell.values.items() if v.unknown}
        note = f"  unknowns={unknowns}" if unknowns else ""
        print(f"  {'/'.join(cell.path) or '(grand total)':<58} {values}{note}")
    if len(result.cells) > limit:
        print(f"  ... {len(result.cells) - limit} more cells")


incidents = generate_synthetic(seed=7, n=2000)
table = build_facts(incidents)
print(f"built cube: {table.num_rows} facts, "
      f"{len(table.dictionaries['space.country'])} countries, "
      f"{len(table.dictionaries['perpetrator'])} perpetrator names")

# start at region level with two measures
q = CellQuery(
    group_by=(GroupBy("space", 1),),
    measures=("incident_count", "nkill"),
)
show("by region", aggregate(table, q))

# drill down one level: region -> country
q2 = drilldown(q, "space")
show("by country (top slice)", aggregate(table, q2))

# roll back up: inverse of the drill
assert rollup(q2, "space") == q

# slice: fix one member and drop the axis
sliced = slice_query(q, "space", "Sub-Saharan Africa")
show("slice on Sub-Saharan Africa, grand total", aggregate(table, sliced))

# dice: restrict to a member set while keeping the axis
diced = dice(q, "attack", ("Bombing/Explosion", "Assassination"))
show("by region, bombings and assassinations only", aggregate(table, diced))

# criteria predicates are ordinary filters on the tri-state dimensions
strict = CellQuery(
    group_by=(GroupBy("attack", 1),),
    filters=(Filter("crit1", ("Yes",)), Filter("crit2", ("Yes",)), Filter("crit3", ("Yes",))),
    measures=("incident_count", "nwound"),
)
show("attacks meeting all three inclusion criteria", aggregate(table, strict))

# snapshots round-trip the whole store
with tempfile.NamedTemporaryFile(suffix=".icq") as handle:
    snapshot_save(table, handle.name)
    reloaded = snapshot_load(handle.name)
    print(f"\nsnapshot round-trip ok: {reloaded.equals(table)}")
