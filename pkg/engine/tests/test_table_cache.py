import lancedb
import numpy as np
import pytest

from exstruct.services.exactfield import Field
from exstruct.services.table_cache import TABLES, TableCache

F = Field(5)


@pytest.fixture
def cache(tmp_path):
    table_cache = TableCache()
    table_cache.open(tmp_path / "lancedb", "digest")
    yield table_cache
    table_cache.close()


def test_memory_only_cache():
    table_cache = TableCache()
    assert table_cache.get(("a", "b"), F) is None
    table_cache.put(("a", "b"), F.identity(2))
    assert F.equal(table_cache.get(("a", "b"), F), F.identity(2))
    assert table_cache.get(("a", "b"), F, kind="ext") is None
    assert (table_cache.hits, table_cache.misses) == (1, 2)
    with pytest.raises(KeyError):
        table_cache.put(("a", "b"), F.identity(2), kind="tor")


def test_hom_and_ext_rows_persist(cache, tmp_path):
    hom = F.matrix([[1, 2], [0, 3]])
    ext = F.matrix([[1, 4], [0, 0], [2, 1]])
    cache.put(("x", "y"), hom)
    cache.put(("x", "y"), ext, kind="ext")
    cache.put(("x", "y"), F.zeros(2, 2))
    cache.close()

    db = lancedb.connect(str(tmp_path / "lancedb"))
    assert {name: db.open_table(name).count_rows() for name in TABLES.values()} == {
        "hom_spaces": 1,
        "ext_groups": 1,
    }

    reopened = TableCache()
    reopened.open(tmp_path / "lancedb", "digest")
    assert F.equal(reopened.get(("x", "y"), F), hom)
    assert F.equal(reopened.get(("x", "y"), F, kind="ext"), ext)
    reopened.close()


def test_rows_are_scoped_by_input_hash(cache, tmp_path):
    cache.put(("x", "y"), F.identity(1))
    cache.close()
    other = TableCache()
    other.open(tmp_path / "lancedb", "another digest")
    assert other.get(("x", "y"), F) is None
    other.close()


def test_empty_matrices_survive(cache, tmp_path):
    cache.put(("x", "y"), F.zeros(3, 0), kind="ext")
    cache.close()
    reopened = TableCache()
    reopened.open(tmp_path / "lancedb", "digest")
    assert np.asarray(reopened.get(("x", "y"), F, kind="ext")).shape == (3, 0)
    reopened.close()


def test_entries_computed_before_opening_are_written(tmp_path):
    table_cache = TableCache()
    table_cache.put(("x", "y"), F.identity(2))
    table_cache.open(tmp_path / "lancedb", "digest")
    assert table_cache.get(("x", "y"), F) is not None
    table_cache.close()
    db = lancedb.connect(str(tmp_path / "lancedb"))
    assert db.open_table("hom_spaces").count_rows() == 1
