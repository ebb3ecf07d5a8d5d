import pytest

from netsym.network.monoid import NetworkSpec, composition_table
from netsym.network.tables import CATALOGUE, RUNNING_EXAMPLE, named_network
from netsym.utils import helpers


@pytest.fixture(autouse=True)
def _quiet_and_seeded(monkeypatch):
    helpers.set_verbose(False)
    monkeypatch.delenv("NETSYM_SEED", raising=False)


@pytest.fixture
def running_spec():
    return NetworkSpec.from_dict(RUNNING_EXAMPLE)


def three_cell(name):
    return NetworkSpec.from_dict(named_network(3, name))


def two_cell(name):
    return NetworkSpec.from_dict(named_network(2, name))


@pytest.fixture
def three_cell_specs():
    return {name: three_cell(name) for name in CATALOGUE[3]}


@pytest.fixture
def three_cell_tables(three_cell_specs):
    return {name: composition_table(spec) for name, spec in three_cell_specs.items()}
