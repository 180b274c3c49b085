"""Hom and Ext table cache.

An in-memory table is always active. When opened against a directory it is
backed by LanceDB tables, keyed by the input hash, so a second run on the same
input reads its morphism bases and Ext quotients instead of recomputing them.
"""

import json
import logging
from pathlib import Path

import galois
import lancedb
import numpy as np
import pyarrow as pa
import pyarrow.compute as pc

logger = logging.getLogger(__name__)

# kind -> table name
TABLES = {"hom": "hom_spaces", "ext": "ext_groups"}

SCHEMA = pa.schema([
    pa.field("input_hash", pa.string()),
    pa.field("source", pa.string()),
    pa.field("target", pa.string()),
    pa.field("basis_json", pa.string()),
])


class TableCache:
    """Matrices keyed by (kind, source fingerprint, target fingerprint).

    ``hom`` rows hold a basis of Hom(source, target) as coordinate columns;
    ``ext`` rows hold the complement and transposed projection of the Ext quotient
    side by side.
    """

    def __init__(self):
        self._memory: dict[tuple[str, str, str], np.ndarray] = {}
        self._pending: dict[str, list[dict]] = {kind: [] for kind in TABLES}
        # keys already stored under the open input hash
        self._stored: set[tuple[str, str, str]] = set()
        self._db: lancedb.DBConnection | None = None
        self._tables: dict[str, lancedb.table.Table] = {}
        self.input_hash: str | None = None
        self.hits = 0
        self.misses = 0

    @property
    def persistent(self) -> bool:
        return bool(self._tables)

    def open(self, path: Path, input_hash: str) -> None:
        """Attach the on-disk tables and preload every row stored for ``input_hash``."""
        self.close()
        Path(path).mkdir(parents=True, exist_ok=True)
        self._db = lancedb.connect(str(path))
        self.input_hash = input_hash
        loaded = 0
        for kind, name in TABLES.items():
            table = self._db.create_table(name, schema=SCHEMA, exist_ok=True)
            self._tables[kind] = table
            stored = table.to_arrow()
            rows = stored.filter(pc.equal(stored["input_hash"], input_hash)).to_pylist()
            for record in rows:
                key = (kind, record["source"], record["target"])
                self._memory[key] = self._record_to_matrix(record)
                self._stored.add(key)
            loaded += len(rows)
        logger.info("table cache at %s: %d stored matrices for this input", path, loaded)

    def get(self, key: tuple[str, str], field, kind: str = "hom") -> galois.FieldArray | None:
        raw = self._memory.get((kind, *key))
        if raw is None:
            self.misses += 1
            return None
        self.hits += 1
        self._persist(kind, key, raw)
        return field.GF(raw)

    def put(self, key: tuple[str, str], matrix: np.ndarray, kind: str = "hom") -> None:
        if kind not in TABLES:
            raise KeyError(f"unknown table kind {kind!r}")
        raw = np.asarray(matrix.view(np.ndarray), dtype=np.int64)
        self._memory.setdefault((kind, *key), raw)
        self._persist(kind, key, self._memory[(kind, *key)])

    def _persist(self, kind: str, key: tuple[str, str], raw: np.ndarray) -> None:
        if self.persistent and (kind, *key) not in self._stored:
            self._stored.add((kind, *key))
            self._pending[kind].append(self._matrix_to_record(key, raw))

    def flush(self) -> None:
        for kind, table in self._tables.items():
            pending = self._pending[kind]
            if pending:
                table.add(pending)
                logger.info("table cache: wrote %d new %s rows", len(pending), kind)
        self._pending = {kind: [] for kind in TABLES}

    def close(self) -> None:
        self.flush()
        self._db = None
        self._tables = {}
        self._stored = set()
        self.input_hash = None

    def clear(self) -> None:
        self.close()
        self._memory.clear()
        self.hits = self.misses = 0

    # ==================== Records ====================

    def _matrix_to_record(self, key: tuple[str, str], raw: np.ndarray) -> dict:
        return {
            "input_hash": self.input_hash,
            "source": key[0],
            "target": key[1],
            "basis_json": json.dumps({"shape": list(raw.shape), "entries": raw.ravel().tolist()}),
        }

    def _record_to_matrix(self, record: dict) -> np.ndarray:
        data = json.loads(record["basis_json"])
        return np.asarray(data["entries"], dtype=np.int64).reshape(data["shape"])


# Singleton instance
_table_cache: TableCache | None = None


def get_table_cache() -> TableCache:
    """Get the process-wide table cache."""
    global _table_cache
    if _table_cache is None:
        _table_cache = TableCache()
    return _table_cache
