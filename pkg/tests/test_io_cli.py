import json

import numpy as np
import pytest

from zbrace.braces import cyclic_unit_brace, trivial_skew_brace
from zbrace.cli import main
from zbrace.fileio import (
    SchemaError,
    brace_from_dict,
    brace_to_dict,
    matrix_coo_text,
    parse_brace,
    write_brace,
    write_matrix,
)
from zbrace.groups import cyclic_group
from zbrace.reporting import build_report, report_failed, select_shifts, serialize_report
from zbrace.solutions import build_solution
from zbrace.tensor import build_twists, permutation_p


@pytest.fixture()
def cyclic3_file(tmp_path):
    path = tmp_path / "cyclic3.brace"
    write_brace(cyclic_unit_brace(3), path)
    return path


def test_brace_roundtrip_is_identity(tmp_path, cyclic3_file):
    b = cyclic_unit_brace(3)
    parsed = parse_brace(cyclic3_file)
    assert parsed.name == b.name and parsed.labels == b.labels
    assert np.array_equal(parsed.add.table, b.add.table)
    assert np.array_equal(parsed.mul.table, b.mul.table)
    again = tmp_path / "again.brace"
    write_brace(parsed, again)
    assert again.read_text() == cyclic3_file.read_text()


def test_order2_file_parses(tmp_path):
    path = tmp_path / "c2.brace"
    write_brace(cyclic_unit_brace(2), path)
    assert parse_brace(path).order == 2


def test_schema_errors_carry_paths():
    good = brace_to_dict(cyclic_unit_brace(2))
    with pytest.raises(SchemaError, match=r"\$\.add"):
        brace_from_dict({**good, "add": [0, 1, 1]})
    with pytest.raises(SchemaError, match=r"\$\.labels"):
        brace_from_dict({**good, "labels": ["1"]})
    with pytest.raises(SchemaError, match=r"\$\.format"):
        brace_from_dict({**good, "format": "something/9"})
    with pytest.raises(SchemaError, match=r"\$\.order"):
        brace_from_dict({k: v for k, v in good.items() if k != "order"})
    with pytest.raises(SchemaError, match=r"\$\.mul\[0\]"):
        brace_from_dict({**good, "mul": [True, 1, 1, 0]})
    with pytest.raises(SchemaError):
        brace_from_dict(["not", "an", "object"])


def test_non_brace_table_file_is_rejected(tmp_path):
    doc = brace_to_dict(cyclic_unit_brace(2))
    doc["mul"] = [1, 0, 0, 1]  # a valid group, but its identity sits at index 1
    path = tmp_path / "broken.brace"
    path.write_text(json.dumps(doc))
    from zbrace.braces import BraceError

    with pytest.raises(BraceError):
        parse_brace(path)


def test_matrix_export_golden_flip_operator():
    text = matrix_coo_text(permutation_p(2))
    assert text == "4 4 4\n0 0 1\n1 2 1\n2 1 1\n3 3 1\n"


def test_matrix_export_one_element_brace():
    one = trivial_skew_brace(cyclic_group(1), name="one")
    tb = build_twists(build_solution(one, 0))
    assert matrix_coo_text(tb.rcheck()) == "1 1 1\n0 0 1\n"


def test_matrix_export_rcheck_is_doubly_stochastic_pattern(tmp_path):
    tb = build_twists(build_solution(cyclic_unit_brace(3), 1))
    path = tmp_path / "rcheck.coo"
    write_matrix(tb.rcheck(), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "16 16 16"
    rows = [int(l.split()[0]) for l in lines[1:]]
    cols = [int(l.split()[1]) for l in lines[1:]]
    vals = [int(l.split()[2]) for l in lines[1:]]
    assert rows == list(range(16))  # ascending row-major
    assert sorted(cols) == list(range(16))  # one entry per column
    assert set(vals) == {1}


def test_report_is_byte_stable():
    b = cyclic_unit_brace(3)
    zs = select_shifts(b, "all", seed=0)
    r1 = build_report(b, zs, level="all", family="cyclic2n", seed=0)
    r2 = build_report(b, zs, level="all", family="cyclic2n", seed=0)
    assert serialize_report(r1) == serialize_report(r2)
    assert not report_failed(r1)


def test_report_carries_dedup_discrepancy_note():
    b = cyclic_unit_brace(3)
    report = build_report(b, select_shifts(b, "all", seed=0), level="maps", family="cyclic2n")
    assert report["dedup"]["class_labels"] == [["1", "5"], ["3", "7"]]
    assert any("known-discrepancy" in note for note in report["dedup"]["notes"])


def test_report_threads_do_not_change_output():
    b = cyclic_unit_brace(3)
    zs = select_shifts(b, "all", seed=0)
    seq = build_report(b, zs, level="maps", family="cyclic2n", threads=1)
    par = build_report(b, zs, level="maps", family="cyclic2n", threads=4)
    assert serialize_report(seq) == serialize_report(par)


def test_select_shifts_modes():
    b = cyclic_unit_brace(3)
    assert select_shifts(b, "all", seed=0) == [0, 1, 2, 3]
    assert select_shifts(b, [3, 1, 3], seed=0) == [1, 3]
    sampled = select_shifts(b, {"sample": 2}, seed=0)
    assert len(sampled) == 2 and sampled == select_shifts(b, {"sample": 2}, seed=0)
    from zbrace.solutions import InadmissibleZError

    with pytest.raises(InadmissibleZError):
        select_shifts(b, [9], seed=0)


def test_cli_make_validate_socle_solve(tmp_path, capsys):
    out = tmp_path / "c3.brace"
    assert main(["make", "--family", "cyclic2n", "--n", "3", "-o", str(out)]) == 0
    assert main(["validate", str(out)]) == 0
    assert main(["socle", str(out)]) == 0
    captured = capsys.readouterr().out
    assert "socle labels:  1 5" in captured
    assert main(["solve", str(out), "--z", "all", "--dedup"]) == 0
    captured = capsys.readouterr().out
    assert "class {1,5}" in captured and "class {3,7}" in captured


def test_cli_solve_cyclic2_prints_single_class(tmp_path, capsys):
    out = tmp_path / "c2.brace"
    main(["make", "--family", "cyclic2n", "--n", "2", "-o", str(out)])
    assert main(["solve", str(out), "--z", "all", "--dedup"]) == 0
    assert "class {1,3}" in capsys.readouterr().out


def test_cli_verify_exit_codes(tmp_path, capsys):
    out = tmp_path / "c3.brace"
    main(["make", "--family", "cyclic2n", "--n", "3", "-o", str(out)])
    assert main(["verify", str(out), "--z", "3", "--level", "all"]) == 0
    capsys.readouterr()
    missing = main(["verify", str(tmp_path / "nope.brace"), "--z", "all"])
    assert missing == 2


def test_cli_verify_rejects_corrupted_brace(tmp_path, capsys):
    doc = brace_to_dict(cyclic_unit_brace(2))
    doc["mul"] = [1, 0, 0, 1]
    bad = tmp_path / "bad.brace"
    bad.write_text(json.dumps(doc))
    assert main(["verify", str(bad), "--z", "all"]) == 2
    assert "error:" in capsys.readouterr().err


def test_cli_z_tokens_resolve_labels_then_indices(tmp_path, capsys):
    out = tmp_path / "s3.brace"
    main(["make", "--family", "trivial", "--group", "s3", "-o", str(out)])
    capsys.readouterr()
    # "012" is a label; "3" is not a label of S3, so it is an index
    assert main(["solve", str(out), "--z", "012,3"]) == 0
    printed = capsys.readouterr().out
    assert "z=0" in printed and "z=3" in printed


def test_cli_trivial_s3_report_fails_on_gv_conjugation(tmp_path, capsys):
    # honest failure: the substitution identity does not hold for nonabelian
    # addition, so a full S3 verification exits 1 with that check failed
    out = tmp_path / "s3.brace"
    main(["make", "--family", "trivial", "--group", "s3", "-o", str(out)])
    code = main(["verify", str(out), "--z", "all", "--level", "maps"])
    printed = capsys.readouterr().out
    assert code == 1
    assert "[   fail] gv:gv-conjugation-identity" in printed
    assert "gv:gv-inverse-relation" in printed


def test_cli_export_and_twist(tmp_path, capsys):
    brace = tmp_path / "c3.brace"
    coo = tmp_path / "P.coo"
    main(["make", "--family", "cyclic2n", "--n", "2", "-o", str(brace)])
    assert main(["export", str(brace), "--z", "1", "--object", "P", "-o", str(coo)]) == 0
    assert coo.read_text() == "4 4 4\n0 0 1\n1 2 1\n2 1 1\n3 3 1\n"
    assert main(["export", str(brace), "--z", "1", "--object", "bogus", "-o", str(coo)]) == 2
    capsys.readouterr()
    assert main(["twist", str(brace), "--z", "all", "--check", "cocycle,grouplike"]) == 0


def test_cli_report_roundtrip(tmp_path):
    cfg = tmp_path / "cfg.json"
    rep = tmp_path / "report.json"
    cfg.write_text(json.dumps({"brace": {"family": "cyclic2n", "n": 3}, "z": "all", "level": "maps"}))
    assert main(["report", "--config", str(cfg), "-o", str(rep)]) == 0
    doc = json.loads(rep.read_text())
    assert doc["summary"]["all_passed"] is True
    assert doc["brace"]["order"] == 4
    rep2 = tmp_path / "report2.json"
    assert main(["report", "--config", str(cfg), "-o", str(rep2)]) == 0
    assert rep.read_text() == rep2.read_text()


def test_cli_report_from_file_and_product(tmp_path):
    left = tmp_path / "c2.brace"
    right = tmp_path / "s3.brace"
    prod = tmp_path / "p.brace"
    main(["make", "--family", "cyclic2n", "--n", "2", "-o", str(left)])
    main(["make", "--family", "trivial", "--group", "s3", "-o", str(right)])
    assert main(["make", "--family", "product", "--left", str(left), "--right", str(right), "-o", str(prod)]) == 0
    assert parse_brace(prod).order == 12


def test_cli_usage_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["verify"])  # missing file argument
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["make", "--family", "not-a-family", "-o", "x"])
    assert exc.value.code == 2


def test_cli_malformed_report_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"z": "all"}))
    assert main(["report", "--config", str(cfg)]) == 2
    cfg.write_text("not json {")
    assert main(["report", "--config", str(cfg)]) == 2


def test_budget_env_switches_matrix_checks_to_sampled(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ZBRACE_BUDGET", "1")
    out = tmp_path / "c3.brace"
    main(["make", "--family", "cyclic2n", "--n", "3", "-o", str(out)])
    capsys.readouterr()
    code = main(["verify", str(out), "--z", "3", "--level", "matrices"])
    printed = capsys.readouterr().out
    assert code == 0
    assert "[sampled] tensor:matrix-braid" in printed
