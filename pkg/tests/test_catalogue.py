import pytest

from netsym.catalogue import analyze_table, catalogue_report, cayley_network, identify, named_tables
from netsym.errors import BoundExceeded
from netsym.network import composition_table, enumerate_monoids, monoid_isomorphic


def test_named_tables_cover_both_sizes():
    names = [name for name, _ in named_tables()]
    assert len(names) == 9
    assert "two_cell/sigma1" in names
    assert "three_cell/sigma7" in names

def test_every_named_table_identifies_as_itself():
    for name, table in named_tables():
        found, witness = identify(table)
        assert found == name
        assert sorted(witness) == list(range(1, table.size + 1))

def test_running_example_is_sigma3(running_spec):
    name, _ = identify(composition_table(running_spec))
    assert name == "three_cell/sigma3"

def test_cayley_network_reproduces_the_table():
    for _, table in named_tables():
        same, _ = monoid_isomorphic(composition_table(cayley_network(table)), table)
        assert same

def test_analyze_table_kinds():
    table = dict(named_tables())["three_cell/sigma4"]
    result = analyze_table(table, seed=1)
    assert sorted(result["kinds"]) == ["saddle-node", "transcritical"]
    assert result["classification"]["hypothesis_ok"]
    assert set(result) == {"decomposition", "classification", "kinds"}

def test_catalogue_of_two_element_monoids():
    report = catalogue_report(2, seed=7)
    assert report["count"] == 2
    assert report["seed"] == 7
    assert {m["name"] for m in report["monoids"]} == {"two_cell/sigma1", "two_cell/sigma2"}
    by_name = {m["name"]: m for m in report["monoids"]}
    assert sorted(by_name["two_cell/sigma1"]["kinds"]) == ["pitchfork", "saddle-node"]
    assert sorted(by_name["two_cell/sigma2"]["kinds"]) == ["saddle-node", "transcritical"]
    assert [m["index"] for m in report["monoids"]] == [1, 2]

@pytest.mark.slow
def test_three_element_monoids_are_the_named_examples():
    report = catalogue_report(3, seed=1)
    assert report["count"] == 7
    assert {m["name"] for m in report["monoids"]} == {f"three_cell/sigma{i}" for i in range(1, 8)}
    assert all("error" not in m for m in report["monoids"])

def test_catalogue_respects_the_bound():
    with pytest.raises(BoundExceeded):
        catalogue_report(4, bound=3)

def test_enumeration_is_canonical():
    tables = enumerate_monoids(3)
    assert all(t.unit_index == 0 for t in tables)
    assert len({t.flattened() for t in tables}) == len(tables)
