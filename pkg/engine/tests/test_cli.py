import json
from pathlib import Path

import lancedb
import pytest

from exstruct.core.config import get_settings
from exstruct.main import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    monkeypatch.setenv("EXSTRUCT_CACHE_DIR", str(tmp_path / "cache"))
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze(capsys, tmp_path):
    dot = tmp_path / "serre.dot"
    code, out, _ = run(
        capsys, "analyze", str(FIXTURES / "a3.json"), "--no-cache", "--dot", str(dot)
    )
    assert code == 0
    assert "simple defects: {S1, I2, S2}" in out
    assert "substructures: 8" in out
    text = dot.read_text(encoding="utf-8")
    assert text.startswith("digraph serre {")
    assert text.count("->") == 12


def test_substructures(capsys, tmp_path):
    dot = tmp_path / "subs.dot"
    code, out, _ = run(
        capsys, "substructures", str(FIXTURES / "a2.json"), "--no-cache", "--dot", str(dot)
    )
    assert code == 0
    assert "substructures: 2" in out
    assert "exact structures: 2" in out
    assert "S2 -> P1 -> S1" in out
    assert dot.read_text(encoding="utf-8").count("->") == 1


def test_defect(capsys):
    code, out, _ = run(
        capsys, "defect", str(FIXTURES / "a2.json"), "--no-cache", "--class", "S1", "S2", "1"
    )
    assert code == 0
    assert "defect dims: [1, 0, 0]" in out
    assert "composition factors: S1^1" in out


def test_defect_of_split_class(capsys):
    code, out, _ = run(
        capsys, "defect", str(FIXTURES / "a2.json"), "--no-cache", "--class", "0", "2", "0"
    )
    assert code == 0
    assert "(split)" in out
    assert "composition factors: none" in out


def test_defect_with_wrong_coordinates(capsys):
    code, _, err = run(
        capsys, "defect", str(FIXTURES / "a2.json"), "--no-cache", "--class", "S1", "S2", "1", "1"
    )
    assert code == 2
    assert "dimension 1" in err


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", str(FIXTURES / "a3_p2.json"), "--no-cache")
    assert code == 0
    assert "oracle = 8, serre = 8, sets identical" in out
    assert "stable families: 13" in out


def test_oracle_refuses_large_field(capsys):
    code, _, err = run(capsys, "oracle", str(FIXTURES / "a3.json"), "--no-cache")
    assert code == 2
    assert err.startswith("error:")


def test_verify(capsys):
    code, out, _ = run(
        capsys, "verify", str(FIXTURES / "a2.json"), "--no-cache", "--samples", "3", "--seed", "4"
    )
    assert code == 0
    assert out.startswith("seed 4, 3 samples")
    assert "all checks passed" in out


def test_prime_override(capsys):
    code, out, _ = run(capsys, "analyze", str(FIXTURES / "a2.json"), "--no-cache", "--p", "7")
    assert code == 0
    assert out.startswith("p = 7, dim A = 3")


def test_non_prime_override(capsys):
    code, _, err = run(capsys, "analyze", str(FIXTURES / "a2.json"), "--no-cache", "--p", "6")
    assert code == 2
    assert "error:" in err


def test_malformed_json(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"quiver": ', encoding="utf-8")
    code, _, err = run(capsys, "analyze", str(path), "--no-cache")
    assert code == 2
    assert "error:" in err


def test_bad_matrix_shape(capsys, tmp_path):
    description = json.loads((FIXTURES / "a2.json").read_text(encoding="utf-8"))
    description["atlas"][1]["matrices"]["a"] = [[1, 0]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(description), encoding="utf-8")
    code, _, _ = run(capsys, "analyze", str(path), "--no-cache")
    assert code == 2


def test_cache_is_reused(capsys, tmp_path):
    first = run(capsys, "analyze", str(FIXTURES / "a2.json"))
    assert (tmp_path / "cache" / "lancedb").exists()
    db = lancedb.connect(str(tmp_path / "cache" / "lancedb"))
    assert db.open_table("hom_spaces").count_rows() > 0
    assert db.open_table("ext_groups").count_rows() > 0
    second = run(capsys, "analyze", str(FIXTURES / "a2.json"))
    assert first[:2] == second[:2]
    assert first[0] == 0
