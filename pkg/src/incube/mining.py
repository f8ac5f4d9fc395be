"""Pattern mining over incidents: association rules, sequences, outliers.

Transactions itemize *all* slots of multi-slot fields (the cube keys on
slot 1 only), so co-occurrence patterns see second and third attack
types, every weapon slot, and every named group.  Unknown members never
become items: rules about missingness would reflect source coverage,
not behavior.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .codebook import CodebookTables, load_tables
from .dimensions import UNKNOWN_LABEL, flat_member, member_label, space_path
from .ingest import Incident

MAD_CONSISTENCY = 1.4826

DEFAULT_ITEM_DIMS: tuple[str, ...] = ("attack", "weapon", "target", "region", "suicide")

_DIM_ALIASES = {
    "targtype": "target",
    "gname": "perpetrator",
}

_SLOTTED_FIELDS = {
    "attack": ("attacktype1", "attacktype2", "attacktype3"),
    "target": ("targtype1", "targtype2", "targtype3"),
    "weapon": ("weaptype1", "weaptype2", "weaptype3", "weaptype4"),
    "claimmode": ("claimmode", "claimmode2", "claimmode3"),
}

_CODE_TABLES = {
    "attack": "attack_types",
    "target": "target_types",
    "weapon": "weapon_types",
    "claimmode": "claim_modes",
}

_ITEMIZABLE = (
    "attack",
    "target",
    "weapon",
    "perpetrator",
    "claimmode",
    "region",
    "country",
    "success",
    "suicide",
    "hostkidoutcome",
    "propextent",
    "crit1",
    "crit2",
    "crit3",
    "doubtterr",
)


@dataclass(frozen=True)
class Transaction:
    incident_id: str
    items: frozenset[str]


def _dim_members(inc: Incident, dim: str, tables: CodebookTables) -> list[str]:
    """All member labels one incident contributes to `dim`."""
    if dim in _SLOTTED_FIELDS:
        table = getattr(tables, _CODE_TABLES[dim])
        labels = []
        for attr in _SLOTTED_FIELDS[dim]:
            code = getattr(inc, attr)
            if code is not None:
                labels.append(table[code])
        return labels
    if dim == "perpetrator":
        return [name for name in (inc.gname, inc.gname2, inc.gname3) if name]
    if dim == "region":
        if inc.country is None or tables.country_region.get(inc.country) is None:
            return []
        return [tables.regions[tables.country_region[inc.country]].name]
    if dim == "country":
        if inc.country is None or inc.country not in tables.countries:
            return []
        return [tables.countries[inc.country]]
    # single-level coded/tri-state dims share the cube's member mapping
    return [member_label(flat_member(inc, dim, tables))]


def normalize_item_dims(dims: Iterable[str]) -> tuple[str, ...]:
    out = []
    for dim in dims:
        name = _DIM_ALIASES.get(dim, dim)
        if name not in _ITEMIZABLE:
            raise ValueError(f"unknown item dimension {dim!r}")
        out.append(name)
    return tuple(out)


def build_transactions(
    incidents: Iterable[Incident],
    dims: Iterable[str] = DEFAULT_ITEM_DIMS,
    tables: CodebookTables | None = None,
) -> list[Transaction]:
    """One transaction per incident; every populated slot contributes."""
    tables = tables or load_tables()
    dims = normalize_item_dims(dims)
    out = []
    for inc in incidents:
        items = set()
        for dim in dims:
            for label in _dim_members(inc, dim, tables):
                if label != UNKNOWN_LABEL:
                    items.add(f"{dim}={label}")
        out.append(Transaction(incident_id=inc.eventid_text, items=frozenset(items)))
    return out


# ---------------------------------------------------------------------------
# Association rules (classic level-wise frequent itemsets)


@dataclass(frozen=True)
class AssociationRule:
    antecedent: tuple[str, ...]
    consequent: tuple[str, ...]
    support: float
    confidence: float
    lift: float
    support_count: int


def frequent_itemsets(
    item_sets: Sequence[frozenset[str]], min_support: float
) -> dict[tuple[str, ...], int]:
    """Counts of all itemsets at or above min_support (sorted-tuple keys)."""
    n = len(item_sets)
    if n == 0:
        return {}
    counts: dict[str, int] = {}
    for t in item_sets:
        for item in t:
            counts[item] = counts.get(item, 0) + 1
    frequent: dict[tuple[str, ...], int] = {
        (item,): c for item, c in counts.items() if c / n >= min_support
    }
    level = sorted((item,) for item in counts if counts[item] / n >= min_support)
    k = 1
    while level:
        k += 1
        prev = set(level)
        candidates = []
        for i, a in enumerate(level):
            for b in level[i + 1 :]:
                if a[: k - 2] != b[: k - 2]:
                    break  # sorted level: shared prefixes are contiguous
                candidate = a + (b[k - 2],)
                if all(
                    candidate[:j] + candidate[j + 1 :] in prev for j in range(k)
                ):
                    candidates.append(candidate)
        if not candidates:
            break
        tallies = {c: 0 for c in candidates}
        for t in item_sets:
            if len(t) < k:
                continue
            for c in candidates:
                if t.issuperset(c):
                    tallies[c] += 1
        level = sorted(c for c, tally in tallies.items() if tally / n >= min_support)
        for c in level:
            frequent[c] = tallies[c]
    return frequent


def mine_association_rules(
    transactions: Sequence[Transaction],
    min_support: float,
    min_confidence: float,
) -> list[AssociationRule]:
    """All rules meeting both thresholds, canonically ordered
    (support desc, confidence desc, then items)."""
    if not 0 < min_support <= 1:
        raise ValueError(f"min_support must be in (0, 1], got {min_support}")
    if not 0 < min_confidence <= 1:
        raise ValueError(f"min_confidence must be in (0, 1], got {min_confidence}")
    n = len(transactions)
    if n == 0:
        return []
    item_sets = [t.items for t in transactions]
    frequent = frequent_itemsets(item_sets, min_support)

    rules: list[AssociationRule] = []
    for itemset, count in frequent.items():
        if len(itemset) < 2:
            continue
        support = count / n
        for r in range(1, len(itemset)):
            for antecedent in itertools.combinations(itemset, r):
                consequent = tuple(x for x in itemset if x not in antecedent)
                confidence = count / frequent[antecedent]
                if confidence >= min_confidence:
                    lift = confidence / (frequent[consequent] / n)
                    rules.append(
                        AssociationRule(
                            antecedent=antecedent,
                            consequent=consequent,
                            support=support,
                            confidence=confidence,
                            lift=lift,
                            support_count=count,
                        )
                    )
    rules.sort(
        key=lambda rule: (
            -rule.support,
            -rule.confidence,
            rule.antecedent,
            rule.consequent,
        )
    )
    return rules


# ---------------------------------------------------------------------------
# Sequential patterns (generalized subsequences: order kept, gaps allowed)


@dataclass(frozen=True)
class SequentialPattern:
    key: tuple[str, ...]  # grouping dims that defined the entities
    elements: tuple[tuple[str, ...], ...]  # ordered itemsets
    support: int  # entities containing the pattern


_KEY_EXTRACTORS = ("perpetrator", "country", "region")


def entity_sequences(
    incidents: Iterable[Incident],
    key: Sequence[str] = ("perpetrator",),
    dims: Iterable[str] = DEFAULT_ITEM_DIMS,
    tables: CodebookTables | None = None,
) -> dict[tuple[str, ...], list[frozenset[str]]]:
    """Per-entity, date-ordered itemset sequences.

    Incidents with no event id or an incomplete key (e.g. unnamed
    perpetrator) are left out; sort order is event-id date then
    sequence number.
    """
    tables = tables or load_tables()
    key = tuple(_DIM_ALIASES.get(k, k) for k in key)
    for k in key:
        if k not in _KEY_EXTRACTORS:
            raise ValueError(f"unknown grouping dimension {k!r}")
    dims = normalize_item_dims(dims)

    def key_of(inc: Incident) -> tuple[str, ...] | None:
        parts = []
        for k in key:
            if k == "perpetrator":
                if not inc.gname:
                    return None
                parts.append(inc.gname)
            elif k == "country":
                if inc.country is None or inc.country not in tables.countries:
                    return None
                parts.append(tables.countries[inc.country])
            else:  # region
                if inc.country is None or tables.country_region.get(inc.country) is None:
                    return None
                parts.append(tables.regions[tables.country_region[inc.country]].name)
        return tuple(parts)

    dated: dict[tuple[str, ...], list[tuple[tuple, frozenset[str]]]] = {}
    for inc in incidents:
        if inc.eventid is None:
            continue
        entity = key_of(inc)
        if entity is None:
            continue
        items = set()
        for dim in dims:
            for label in _dim_members(inc, dim, tables):
                if label != UNKNOWN_LABEL:
                    items.add(f"{dim}={label}")
        order = (inc.eventid.date(), inc.eventid.sequence)
        dated.setdefault(entity, []).append((order, frozenset(items)))

    sequences = {}
    for entity, steps in dated.items():
        steps.sort(key=lambda pair: pair[0])
        sequences[entity] = [items for _, items in steps if items]
    return sequences


def pattern_supported(
    elements: Sequence[Sequence[str]], sequence: Sequence[frozenset[str]]
) -> bool:
    """Greedy subsequence containment with gaps allowed."""
    i = 0
    for element in elements:
        element = frozenset(element)
        while i < len(sequence) and not sequence[i].issuperset(element):
            i += 1
        if i == len(sequence):
            return False
        i += 1
    return True


def mine_sequences(
    incidents: Iterable[Incident],
    key: Sequence[str] = ("perpetrator",),
    min_support: int = 2,
    dims: Iterable[str] = DEFAULT_ITEM_DIMS,
    tables: CodebookTables | None = None,
    max_items: int | None = None,
) -> list[SequentialPattern]:
    """Level-wise sequential pattern growth over entity histories.

    Support counts each entity at most once.  Patterns grow one item at
    a time: either a new trailing itemset or an addition to the last
    itemset (in item order), so every pattern is generated exactly once.
    Long histories with rich item sets support combinatorially many
    patterns; `max_items` caps the total pattern size when exhaustive
    output is not wanted.
    """
    if min_support < 1:
        raise ValueError(f"min_support must be a count >= 1, got {min_support}")
    sequences = list(entity_sequences(incidents, key, dims, tables).items())
    return _grow_patterns(
        [seq for _, seq in sequences],
        min_support,
        tuple(_DIM_ALIASES.get(k, k) for k in key),
        max_items,
    )


def mine_sequence_lists(
    sequences: list[list[frozenset[str]]],
    min_support: int,
    key: tuple[str, ...] = ("inline",),
    max_items: int | None = None,
) -> list[SequentialPattern]:
    """Mine already-built per-entity itemset sequences."""
    if min_support < 1:
        raise ValueError(f"min_support must be a count >= 1, got {min_support}")
    return _grow_patterns(sequences, min_support, tuple(key), max_items)


def _grow_patterns(
    sequences: list[list[frozenset[str]]],
    min_support: int,
    key: tuple[str, ...],
    max_items: int | None = None,
) -> list[SequentialPattern]:
    def support_of(elements: tuple[tuple[str, ...], ...]) -> int:
        return sum(1 for seq in sequences if pattern_supported(elements, seq))

    single_counts: dict[str, int] = {}
    for seq in sequences:
        seen = {item for step in seq for item in step}
        for item in seen:
            single_counts[item] = single_counts.get(item, 0) + 1
    alphabet = sorted(item for item, c in single_counts.items() if c >= min_support)

    results: list[SequentialPattern] = []
    level: list[tuple[tuple[tuple[str, ...], ...], int]] = [
        (((item,),), single_counts[item]) for item in alphabet
    ]
    size = 1
    while level:
        results.extend(
            SequentialPattern(key=key, elements=elements, support=support)
            for elements, support in level
        )
        size += 1
        if max_items is not None and size > max_items:
            break
        nxt = []
        for elements, _ in level:
            last = elements[-1]
            extensions = [elements + ((item,),) for item in alphabet]
            extensions += [
                elements[:-1] + (last + (item,),) for item in alphabet if item > last[-1]
            ]
            for candidate in extensions:
                support = support_of(candidate)
                if support >= min_support:
                    nxt.append((candidate, support))
        level = nxt
    results.sort(
        key=lambda p: (-p.support, sum(len(e) for e in p.elements), p.elements)
    )
    return results


# ---------------------------------------------------------------------------
# Outlier scoring (robust z over a cell-value series)


@dataclass(frozen=True)
class OutlierReport:
    coords: tuple[str, ...]
    measure: str
    value: float
    score: float
    flagged: bool
    method: str


def score_outliers(
    values: Sequence[float],
    threshold: float,
    method: str = "robust_z",
    coords: Sequence[tuple[str, ...]] | None = None,
    measure: str = "",
) -> list[OutlierReport]:
    """Robust z-score per point: (x - median) / (1.4826 * MAD).

    Degenerate series fall back in two documented steps: MAD of zero
    switches to (x - mean) / population stddev, and zero stddev scores
    everything 0.  A point is flagged when |score| > threshold.
    """
    if method != "robust_z":
        raise ValueError(f"unknown outlier method {method!r}")
    if len(values) < 3:
        raise ValueError(f"series needs at least 3 values, got {len(values)}")
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    if coords is None:
        coords = [(str(i),) for i in range(len(values))]
    elif len(coords) != len(values):
        raise ValueError("coords and values must have equal length")

    arr = np.asarray(values, dtype=float)
    median = float(np.median(arr))
    mad = float(np.median(np.abs(arr - median)))
    if mad > 0:
        scores = (arr - median) / (MAD_CONSISTENCY * mad)
    else:
        std = float(np.std(arr))
        scores = (arr - arr.mean()) / std if std > 0 else np.zeros_like(arr)

    return [
        OutlierReport(
            coords=tuple(coords[i]),
            measure=measure,
            value=float(arr[i]),
            score=float(scores[i]),
            flagged=bool(abs(scores[i]) > threshold),
            method=method,
        )
        for i in range(len(arr))
    ]


def outliers_for_measure(result, measure: str, threshold: float) -> list[OutlierReport]:
    """Score one measure across the cells of an aggregation result."""
    values = [cell.values[measure].sum for cell in result.cells]
    coords = [cell.path for cell in result.cells]
    return score_outliers(values, threshold, coords=coords, measure=measure)
