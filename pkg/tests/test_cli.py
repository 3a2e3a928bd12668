import io
import json

import pytest

from cychom import cli
from cychom.dga import dump_algebra, koszul_resolution


def run_cli(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def test_hh_text_table(capsys):
    code, out = run_cli(["hh", "--ring", "zmod:3^2"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "HH_0: Z/9"
    assert lines[1] == "HH_1: 0"
    assert len(lines) == 6  # degrees 0..2p-1


def test_hc_structured_schema(capsys):
    code, out = run_cli(["hc", "--ring", "zmod:3", "--format", "structured"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert doc["command"] == "hc"
    assert doc["params"]["ring"] == "zmod:3"
    rows = doc["results"]
    assert rows[0] == {
        "degree": 0,
        "free_rank": 0,
        "invariant_factors": ["3"],
        "flags": [],
        "provenance": ["HC"],
    }
    assert rows[4]["invariant_factors"] == ["27"]
    # invariant factors are decimal strings throughout
    assert all(
        isinstance(f, str) for r in rows for f in r["invariant_factors"]
    )


def test_structured_output_deterministic(capsys):
    _, first = run_cli(["hc", "--ring", "zmod:5", "--format", "structured"], capsys)
    _, second = run_cli(["hc", "--ring", "zmod:5", "--format", "structured"], capsys)
    assert first == second  # byte-identical


def test_rel_hc_table(capsys):
    code, out = run_cli(["rel-hc", "--ring", "zmod:3^2"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "rel-HC_0: Z/3"
    assert lines[2] == "rel-HC_2: Z/9"
    assert lines[4] == "rel-HC_4: Z/27"


def test_rel_hc_needs_tower(capsys):
    code, _ = run_cli(["rel-hc", "--ring", "zmod:3"], capsys)
    assert code == cli.EXIT_BAD_ARGS


def test_degree_window_gate(capsys):
    code, _ = run_cli(["hh", "--ring", "zmod:3", "--max-degree", "8"], capsys)
    assert code == cli.EXIT_RANGE
    code, out = run_cli(
        ["hh", "--ring", "zmod:3", "--max-degree", "7", "--allow-unverified"],
        capsys,
    )
    assert code == 0
    assert "HH_7: 0 [UNVERIFIED]" in out
    assert "HH_5: 0\n" in out  # inside the window: no flag


def test_ring_descriptor_errors(capsys):
    assert run_cli(["hh", "--ring", "zmod:4"], capsys)[0] == cli.EXIT_BAD_ARGS
    assert run_cli(["hh", "--ring", "zmod:x"], capsys)[0] == cli.EXIT_BAD_ARGS
    assert run_cli(["hh", "--ring", "/no/such/file"], capsys)[0] == cli.EXIT_PARSE


def test_file_ring(tmp_path, capsys):
    path = tmp_path / "ring.alg"
    path.write_text(dump_algebra(koszul_resolution(6)))
    code, out = run_cli(
        ["hh", "--ring", str(path), "--max-degree", "3"], capsys
    )
    assert code == 0
    assert out.splitlines()[0] == "HH_0: Z/6"
    # file rings have no builtin verified window: max-degree is mandatory
    code, _ = run_cli(["hh", "--ring", str(path)], capsys)
    assert code == cli.EXIT_BAD_ARGS


def test_file_ring_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.alg"
    path.write_text("[basis]\nbroken\n")
    assert run_cli(["hh", "--ring", str(path)], capsys)[0] == cli.EXIT_PARSE


def test_k_groups_command(capsys):
    code, out = run_cli(["k-groups", "--p", "7", "--n", "2"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "K_1: Z/42"
    code, _ = run_cli(["k-groups", "--p", "3", "--n", "2"], capsys)
    assert code == cli.EXIT_RANGE  # empty range 1..p-3
    code, _ = run_cli(["k-groups", "--p", "8", "--n", "2"], capsys)
    assert code == cli.EXIT_BAD_ARGS


def test_k_groups_structured_provenance(capsys):
    code, out = run_cli(
        ["k-groups", "--p", "7", "--n", "2", "--format", "structured"], capsys
    )
    assert code == 0
    doc = json.loads(out)
    odd = [r for r in doc["results"] if r["degree"] % 2 == 1]
    assert all(any("AXIOM-TC" in p for p in r["provenance"]) for r in odd)


def test_gr_check_command(capsys):
    code, out = run_cli(["gr-check", "--ring", "zmod:3^2", "--max-q", "1"], capsys)
    assert code == 0
    assert "FAIL" not in out
    assert "q=1,k=-1:PASS" in out


def test_reproduce_paper_known_failures(capsys):
    # the published relative table claims 0 at the boundary degree 2p-1;
    # the computed group there is Z/p, so those cells report FAIL honestly
    code, out = run_cli(
        ["reproduce-paper", "--p-list", "3", "--n-list", "1,2"], capsys
    )
    assert code == cli.EXIT_CHECK_FAILED
    fails = [l for l in out.splitlines() if l.startswith("FAIL ")]
    assert fails == ["FAIL rel-hc p=3 n=2 i=5 (got Z/3, want 0)"]
    assert out.strip().endswith("FAILED: 1 failing cells")


def test_reproduce_paper_passes_off_boundary(capsys):
    code, out = run_cli(
        ["reproduce-paper", "--p-list", "3", "--n-list", "1"], capsys
    )
    assert code == 0
    assert "FAIL" not in out
    assert out.strip().endswith("OK: 0 failing cells")


def test_reproduce_paper_rejects_non_prime(capsys):
    code, _ = run_cli(["reproduce-paper", "--p-list", "4"], capsys)
    assert code == cli.EXIT_BAD_ARGS


def test_run_with_jobspec_directly():
    spec = cli.JobSpec(
        command="hh", params={"ring": "zmod:3"}, structured=True
    )
    buf = io.StringIO()
    assert cli.run(spec, out=buf) == 0
    doc = json.loads(buf.getvalue())
    assert doc["command"] == "hh"
    spec = cli.JobSpec(command="nope", params={}, structured=False)
    assert cli.run(spec) == cli.EXIT_BAD_ARGS


def test_bad_argv(capsys):
    assert cli.main(["hh"]) == cli.EXIT_BAD_ARGS  # missing --ring
    capsys.readouterr()
    assert cli.main(["k-groups", "--p", "7", "--n", "0"]) == cli.EXIT_BAD_ARGS
    capsys.readouterr()
