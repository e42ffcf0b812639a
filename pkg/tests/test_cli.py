from __future__ import annotations

import pytest

from coherator.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_pairs_census(capsys):
    code, out, err = run(capsys, "pairs", "--dim=0", "--max-arity-len=3", "--max-depth=0")
    assert code == 0
    assert len(out.splitlines()) == 14
    assert "# 14 pairs" in err


def test_catalog_lists_named_cells(capsys, tmp_path):
    code, out, _ = run(capsys, "catalog", "--mode=ic", "--stages=2", "--max-arity-len=5", "--max-depth=2", "--figures", str(tmp_path))
    assert code == 0
    labels = {line.split("\t")[0] for line in out.splitlines()[1:]}
    assert {"Z", "c", "ω", "a", "Z_l", "Z_r"} <= labels
    assert (tmp_path / "catalog.tsv").read_text(encoding="utf-8") == out
    assert (tmp_path / "catalog.png").stat().st_size > 0


def test_verify_yang_baxter(capsys):
    code, out, _ = run(capsys, "verify", "--law=yang-baxter", "--indices=0,1,2")
    assert code == 0
    assert out.splitlines()[-1] == "status PASS"
    assert "truncation R0.0 fixpoint" in out


def test_verify_alias_runs_both_triangles(capsys):
    code, out, _ = run(capsys, "verify", "--law=unit-triangle", "--indices=0,1", "--mode=strict")
    assert code == 0
    assert out.count("status PASS") == 2 and "mode=strict" in out


def test_verify_fail_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "--law=mu-hat-uniqueness", "--indices=3", "--dim-bound=2:1:1", "--max-iter=1")
    assert code == 1
    assert "status FAIL" in out


def test_hom_oracle_and_theta(capsys):
    assert run(capsys, "hom", "--arity=1,0,1", "--dim=1", "--strict")[1] == "oracle (1,0,1) 1 9\n"
    assert run(capsys, "hom", "--arity=(0)", "--target=(1)")[1] == "theta (0) (1) 2\n"
    code, _, err = run(capsys, "hom", "--arity=2", "--dim=1", "--strict")
    assert code == 3 and "height" in err


def test_hom_crosscheck_against_saved_tower(capsys, tmp_path):
    path = tmp_path / "strict.txt"
    assert run(capsys, "build", "--mode=strict", "--stages=2", "--max-arity-len=5", "--max-depth=2", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "hom", "--arity=1", "--dim=1", "--strict", "--tower", str(path), "--depth=2")
    assert code == 0
    assert "status PASS" in out and "oracle (1) 1 4" in out


def test_hom_stage_counts_with_figure(capsys, tmp_path):
    code, out, _ = run(capsys, "hom", "--arity=1", "--dim=1", "--stages=2", "--figures", str(tmp_path))
    assert code == 0
    assert out.splitlines()[0] == "stage\tarity\tdim\tcount"
    assert (tmp_path / "stage_counts.png").exists()


def test_build_is_deterministic(capsys):
    a = run(capsys, "build", "--mode=ic", "--stages=2")[1]
    b = run(capsys, "build", "--mode=ic", "--stages=2")[1]
    assert a == b and a.startswith("tower mode=ic")


def test_errors_and_usage(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("gen g#zz\n", encoding="utf-8")
    code, _, err = run(capsys, "catalog", "--tower", str(bad))
    assert code == 3 and "line 1, column 1" in err
    code, _, err = run(capsys, "catalog", "--tower", str(tmp_path / "missing.txt"))
    assert code == 3
    code, _, err = run(capsys, "build", "--stages=5")
    assert code == 3 and "max_dim" in err
    with pytest.raises(SystemExit) as info:
        main(["pairs"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["pairs", "--dim=0", "--dim-bound=1:2"])
    assert info.value.code == 2
