from __future__ import annotations

import json
import subprocess
import sys

import pytest

from domiso.cli import main
from domiso.graph import build_collapsed, parse_spec
from domiso.setops import VertexSet, fiber, write_subset


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines() if line.strip()]


def test_alpha(capsys):
    code, rows = run(capsys, "alpha", "K[2,3]xK_3^2")
    assert code == 0 and rows[0]["param"] == "alpha" and rows[0]["value"] == 18
    assert rows[0]["optimal"] is True and "millis" not in rows[0]


def test_ir_and_gamma(capsys):
    for param in ("ir", "gamma"):
        code, rows = run(capsys, param, "K_3^2")
        assert code == 0 and rows[0]["value"] == 3


def test_profile_both(capsys):
    code, rows = run(capsys, "profile", "K_3^2", "--nu", "1/9", "--method", "both")
    r = rows[0]
    assert code == 0 and r["recursive"] == "4/9" and r["oracle"] == "4/9" and r["match"] is True


def test_profile_refused_but_oracle_runs(capsys):
    code, rows = run(capsys, "profile", "K(3,1)^3", "--nu", "1/3", "--method", "both")
    assert code == 1 and rows[0]["recursive"] is None and rows[0]["oracle"] == "1/64"


def test_profile_table_tsv(capsys):
    code = main(["profile-table", "K_3^2", "--format", "tsv"])
    lines = capsys.readouterr().out.splitlines()
    assert code == 0 and lines[0] == "threshold_num\tthreshold_den\tvalue_num\tvalue_den"
    assert lines[1:] == ["1\t9\t4\t9", "1\t3\t2\t3", "5\t9\t8\t9", "1\t1\t1\t1"]


def test_exceptions(capsys):
    code, rows = run(capsys, "exceptions")
    assert code == 0 and len(rows) == 38
    assert sum(r["verdict"] == "exceptional" for r in rows) == 37
    assert rows[-1]["spec"] == "K_3^7" and rows[-1]["verdict"] == "special-case" and rows[-1]["note"]


def test_verify_single_id(capsys):
    code, rows = run(capsys, "verify", "thm7-chain-t5")
    assert code == 0 and rows[0]["verdict"] == "verified"
    code, rows = run(capsys, "verify", "thm7-eps0-k3-7")
    assert code == 1 and rows[0]["verdict"] == "failed"


def test_verify_suite_summary(capsys):
    code, rows = run(capsys, "verify", "cor1-eq1")
    assert code == 0 and rows[-1]["suite"] == "cor1-eq1" and rows[-1]["verdict"] == "verified"


def test_stability_with_set(tmp_path, capsys):
    g = build_collapsed(parse_spec("K_3^3"))
    J = fiber(g, 1, 1)
    write_subset(tmp_path / "i.txt", J.with_vertex(J.indices()[0], False))
    code, rows = run(capsys, "stability", "K_3^3", "--set", str(tmp_path / "i.txt"))
    assert code == 0 and rows[0]["status"] == "ok" and rows[0]["eps"] == "1/9"


def test_decompose(tmp_path, capsys):
    g = build_collapsed(parse_spec("K_3^2"))
    write_subset(tmp_path / "s.txt", VertexSet.from_coords(g, [(1, 1), (2, 2)]))
    code, rows = run(capsys, "decompose", "K_3^2", "--set", str(tmp_path / "s.txt"))
    assert code == 0 and rows[0]["irredundant"] is True and rows[0]["soc_rank"] == 2


def test_fold_and_compress(tmp_path, capsys):
    g = build_collapsed(parse_spec("K_3^2"))
    write_subset(tmp_path / "t.txt", VertexSet.from_coords(g, [(1, 1), (1, 2)]))
    code, rows = run(capsys, "fold", "K_3^2", "1", "--set", str(tmp_path / "t.txt"))
    assert code == 0 and rows[0]["output"]["set"] == VertexSet.from_coords(g, [(1, 1), (2, 1), (3, 1)]).to_hex()
    write_subset(tmp_path / "u.txt", VertexSet.from_coords(g, [(1, 2), (2, 1)]))
    code, rows = run(capsys, "compress", "K_3^2", "1", "--set", str(tmp_path / "u.txt"))
    assert code == 0 and rows[0]["output"]["set"] == VertexSet.from_coords(g, [(1, 1), (1, 2)]).to_hex()


@pytest.mark.parametrize("argv", [
    ["alpha", "K[0,3]"],
    ["profile", "K_3^2"],
    ["decompose", "K_3^2"],
    ["verify", "nope"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_argparse_rejects_unknown_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main(["alpha", "K_3", "--nu", "1/2"])
    assert info.value.code == 2


def test_budget_error_exit_1(capsys):
    assert main(["alpha", "K_3^4", "--budget", "10"]) == 1


def test_output_is_byte_stable():
    cmd = [sys.executable, "-m", "domiso.cli", "profile-table", "K_4xK_3", "--method", "both"]
    a = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    assert a == b and a
