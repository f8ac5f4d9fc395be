"""Mine the synthetic corpus: rules, sequences, and outlier scores.

Run:  python3 demos/03_mining_patterns.py
"""

from incube import (
    CellQuery,
    GroupBy,
    aggregate,
    build_facts,
    build_transactions,
    generate_synthetic,
    mine_association_rules,
    mine_sequences,
    outliers_for_measure,
)

incidents = generate_synthetic(seed=21, n=3000)

# --- association rules ------------------------------------------------------
# Transactions itemize every populated slot (attacktype1..3, weaptype1..4,
# ...), unlike the cube which keys on slot 1 only.
transactions = build_transactions(incidents, dims=("attack", "weapon", "suicide"))
print("example transaction:", sorted(transactions[0].items))

rules = mine_association_rules(transactions, min_support=0.05, min_confidence=0.4)
print(f"\n{len(rules)} rules at support>=0.05, confidence>=0.4; strongest first:")
for rule in rules[:8]:
    print(f"  {{{', '.join(rule.antecedent)}}} -> {{{', '.join(rule.consequent)}}}"
          f"  supp={rule.support:.3f} conf={rule.confidence:.2f} lift={rule.lift:.2f}")

# --- sequential patterns ----------------------------------------------------
# Entities are perpetrator groups; their incidents are ordered by event-id
# date and mined for recurring attack progressions (gaps allowed).
patterns = mine_sequences(
    incidents, key=("perpetrator",), min_support=16, dims=("attack",), max_items=3
)
print(f"\n{len(patterns)} sequential patterns at entity support >= 16:")
for p in patterns[:8]:
    steps = " => ".join("{" + ", ".join(e) + "}" for e in p.elements)
    print(f"  {steps}  [{p.support} groups]")

# --- outlier scores over a cube series ---------------------------------------
table = build_facts(incidents)
by_year = aggregate(
    table,
    CellQuery(group_by=(GroupBy("time", 1),), measures=("incident_count", "nkill")),
)
reports = outliers_for_measure(by_year, "nkill", threshold=2.5)
print("\nrobust z-scores of yearly fatality sums (threshold 2.5):")
for r in reports:
    marker = "  <-- flagged" if r.flagged else ""
    print(f"  {r.coords[0]}: nkill={r.value:>6.0f}  score={r.score:+.2f}{marker}")
