import json
import subprocess
import sys
from pathlib import Path

import pytest

from img_branch import checks
from img_branch.cli import main
from img_branch.levels import PermGroup, parse_cycles
from img_branch import img

DATA = Path(__file__).parent / "data"


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list_contains_every_check(capsys):
    code, out, _ = run_cli(capsys, "list")
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert len(rows) == len(checks.REGISTRY)
    text = "\n".join(rows)
    assert any(r.startswith("theorem-kk-c45 ") and "K/K' is isomorphic to C_4^5" in r for r in rows)
    assert any(r.startswith("branch-kernel-sigma ") and "A = ⟨2z+w⟩ ≃ C₄" in r for r in rows)
    assert "levels=[5, 6, 7, 8]" in text


def test_registry_ids_unique_and_standalone():
    ids = [d.id for d in checks.REGISTRY.values()]
    assert len(ids) == len(set(ids))
    for d in checks.REGISTRY.values():
        assert d.anchor.statement and d.operations


def test_verify_single_check(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, err = run_cli(capsys, "verify", "--check", "lemma-k-contains-st3", "--report", str(path))
    assert code == 0
    report = json.loads(out)
    assert json.loads(path.read_text()) == report
    (c,) = report["checks"]
    assert c["status"] == "pass" and c["summary"]["index"] == 16
    assert c["anchor"]["statement"].startswith("[pi_3(G):pi_3(K)] = 16")
    assert report["verdict"] == "pass" and report["schema_version"] == checks.SCHEMA_VERSION
    assert "PASS  lemma-k-contains-st3" in err


def test_unknown_check_exits_nonzero(capsys):
    code, out, err = run_cli(capsys, "verify", "--check", "nonexistent")
    assert code != 0 and out == ""
    assert "nonexistent" in err


@pytest.mark.parametrize(
    "flags",
    [["--max-level", "11"], ["--max-level", "5"], ["--phi-depth", "9"], ["--state-budget", "0"], ["--enum-budget", "-1"]],
)
def test_config_out_of_range(capsys, flags):
    code, _, err = run_cli(capsys, "verify", "--check", "lemma-orders", *flags)
    assert code == 2 and err


def test_failures_carry_reproduction(monkeypatch):
    from img_branch.report import Report

    def broken(config):
        rep = Report("broken")
        rep.add("always false", False, detail=1)
        return rep

    desc = checks.REGISTRY["lemma-orders"]
    monkeypatch.setitem(checks.REGISTRY, "lemma-orders", checks.CheckDescriptor(
        desc.id, desc.anchor, desc.operations, desc.defaults, broken))
    report = checks.run(["lemma-orders"])
    (c,) = report["checks"]
    assert c["status"] == "fail" and report["verdict"] == "fail"
    assert c["failures"] == [{"check": "always false", "ok": False, "detail": 1}]
    assert "--check lemma-orders" in c["reproduce"] and "--seed 0" in c["reproduce"]


def test_errors_are_reported_not_raised(monkeypatch):
    def explode(config):
        raise RuntimeError("boom")

    desc = checks.REGISTRY["lemma-orders"]
    monkeypatch.setitem(checks.REGISTRY, "lemma-orders", checks.CheckDescriptor(
        desc.id, desc.anchor, desc.operations, desc.defaults, explode))
    (c,) = checks.run(["lemma-orders"])["checks"]
    assert c["status"] == "error" and "boom" in c["error"]


def test_exit_status_reflects_failure(monkeypatch, capsys):
    from img_branch.report import Report

    desc = checks.REGISTRY["lemma-orders"]
    failing = checks.CheckDescriptor(desc.id, desc.anchor, desc.operations, desc.defaults,
                                     lambda c: Report("x", [{"check": "no", "ok": False}]))
    monkeypatch.setitem(checks.REGISTRY, "lemma-orders", failing)
    code, _, _ = run_cli(capsys, "verify", "--check", "lemma-orders", "--quiet")
    assert code == 1


def test_reports_are_deterministic():
    sel = ["lemma-formula-e-tau", "branch-kernel-sigma", "lemma-pin-k-ab"]
    a = checks.strip_timings(checks.run(sel))
    b = checks.strip_timings(checks.run(sel))
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_parallel_run_matches_serial():
    sel = ["lemma-orders", "lemma-conjugation-table", "theorem-kk-c45", "lemma-squared-words"]
    serial = checks.strip_timings(checks.run(sel, jobs=1))
    parallel = checks.strip_timings(checks.run(sel, jobs=2))
    assert serial == parallel


def test_seed_changes_sampled_checks_only():
    a = checks.run(["lemma-formula-e-tau"], checks.Config(seed=1), full=True)
    b = checks.run(["lemma-formula-e-tau"], checks.Config(seed=2), full=True)
    assert a["checks"][0]["items"] != b["checks"][0]["items"]
    assert a["verdict"] == b["verdict"] == "pass"


def test_import_command(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "import", str(DATA / "grigorchuk.aut"), "--level", "4")
    assert code == 0
    assert "|level 4 image| = 4096" in out
    assert "|a| = 2" in out
    bad = tmp_path / "bad.aut"
    bad.write_text("state s: 0/0 -> s, 1/0 -> s\n")
    code, _, err = run_cli(capsys, "import", str(bad))
    assert code == 1 and "'s'" in err
    garbled = tmp_path / "garbled.aut"
    garbled.write_text("state s 0/1 -> s\n")
    code, _, err = run_cli(capsys, "import", str(garbled))
    assert code == 1 and "line 1, column" in err


def test_relators_export(capsys):
    code, out, _ = run_cli(capsys, "relators", "--depth", "1")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 14 and lines[0] == "aa"


def test_export_group_round_trip(capsys):
    code, out, _ = run_cli(capsys, "export-group", "--group", "K", "--level", "4")
    assert code == 0
    G = PermGroup(4, [parse_cycles(line, 4) for line in out.splitlines()])
    assert G.order() == img.k_level(4).order()


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "img_branch.cli", "verify", "--check", "nonexistent"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
