import random

import pytest

from incube.codebook import load_tables
from incube.cube import CellQuery, Filter, GroupBy, build_facts
from incube.synthetic import generate_synthetic


@pytest.fixture(scope="session")
def tables():
    return load_tables()


@pytest.fixture(scope="session")
def fixture_incidents():
    return generate_synthetic(seed=7, n=200)


@pytest.fixture(scope="session")
def fixture_table(fixture_incidents, tables):
    return build_facts(fixture_incidents, tables)


@pytest.fixture(scope="session")
def big_incidents():
    return generate_synthetic(seed=42, n=10_000)


@pytest.fixture(scope="session")
def big_table(big_incidents, tables):
    return build_facts(big_incidents, tables)


GROUPABLE = [
    ("time", 3),
    ("space", 4),
    ("attack", 1),
    ("target", 1),
    ("weapon", 1),
    ("perpetrator", 1),
    ("success", 1),
    ("suicide", 1),
    ("claimmode", 1),
    ("hostkidoutcome", 1),
    ("propextent", 1),
    ("crit1", 1),
    ("crit2", 1),
    ("crit3", 1),
    ("doubtterr", 1),
]

FILTERABLE = [
    "time.year",
    "space.region",
    "space.country",
    "attack",
    "target",
    "weapon",
    "success",
    "suicide",
    "crit1",
    "crit2",
    "crit3",
    "doubtterr",
    "propextent",
]

SOME_MEASURES = ["incident_count", "nkill", "nwound", "propvalue", "nperps", "nhostkid"]


def random_query(rng: random.Random, table) -> CellQuery:
    """A random well-formed query whose filter members exist in the cube."""
    group_by = []
    for name, max_depth in rng.sample(GROUPABLE, rng.randint(0, 2)):
        group_by.append(GroupBy(name, rng.randint(1, max_depth)))
    filters = []
    for dim in rng.sample(FILTERABLE, rng.randint(0, 2)):
        dictionary = table.dictionaries[dim]
        members = rng.sample(dictionary, min(len(dictionary), rng.randint(1, 3)))
        filters.append(Filter(dim, tuple(members)))
    measures = tuple(
        ["incident_count"] + rng.sample(SOME_MEASURES[1:], rng.randint(0, 3))
    )
    return CellQuery(tuple(group_by), tuple(filters), measures)
