"""End-to-end tests of the command-line interface (in-process)."""

import json
import math
from importlib import resources

import jsonschema
import pytest

from clonebench.cli import main, resolve_machine, resolve_set
from clonebench.states import equatorial_trio

F_PHASE = 0.5 + math.sqrt(2.0) / 4.0


def load_schema(name):
    text = resources.files("clonebench.schemas").joinpath(name).read_text()
    return json.loads(text)


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def test_resolve_set_variants(tmp_path):
    assert len(resolve_set("trio")) == 3
    assert len(resolve_set("six-state")) == 6
    assert len(resolve_set("pair:90")) == 2
    assert len(resolve_set("equator:12")) == 12
    inline = equatorial_trio().to_json()
    assert resolve_set(inline).label == "trio"
    path = tmp_path / "set.json"
    path.write_text(inline)
    assert resolve_set(str(path)).label == "trio"


def test_resolve_machine_variants():
    assert resolve_machine("pqcm-economic").a == 1.0
    assert resolve_machine("nclone:4").n == 4
    from clonebench.cli import UsageError

    with pytest.raises(UsageError):
        resolve_machine("nclone:99")
    with pytest.raises(UsageError):
        resolve_set("moon")


def test_verify_pqcm_trio(tmp_path, capsys):
    out = tmp_path / "verify.json"
    code = main(["verify", "--machine", "pqcm-economic", "--set", "trio", "--out", str(out)])
    assert code == 0
    doc = read_json(out)
    jsonschema.validate(doc, load_schema("verify_report.schema.json"))
    assert all(abs(f["fidelity"] - F_PHASE) < 1e-12 for f in doc["fidelities"])
    assert doc["passed"]
    manifest = read_json(str(out) + ".manifest.json")
    jsonschema.validate(manifest, load_schema("manifest.schema.json"))
    assert manifest["outputs"] == [str(out)]


def test_verify_uqcm_six_state(capsys):
    assert main(["verify", "--machine", "uqcm", "--set", "six-state"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert all(abs(f["fidelity"] - 5.0 / 6.0) < 1e-12 for f in doc["fidelities"])


def test_verify_non_universal_machine_off_equator(capsys):
    assert main(["verify", "--machine", "pqcm-economic", "--set", "tetrahedron"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["bound_comparison"] == "not applicable"
    fids = [f["fidelity"] for f in doc["fidelities"]]
    assert max(fids) - min(fids) > 1e-3  # non-flat on a non-equatorial set


def test_verify_unknown_names_exit_2(capsys):
    assert main(["verify", "--machine", "bogus", "--set", "trio"]) == 2
    assert main(["verify", "--machine", "uqcm", "--set", "bogus"]) == 2


def test_optimize_trio(tmp_path, capsys):
    out = tmp_path / "opt.json"
    code = main(
        [
            "optimize",
            "--set",
            "trio",
            "--symmetric",
            "--economic",
            "--restarts",
            "20",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    doc = read_json(out)
    jsonschema.validate(doc, load_schema("optimize_result.schema.json"))
    assert abs(doc["objective"] - F_PHASE) < 1e-4
    manifest = read_json(str(out) + ".manifest.json")
    jsonschema.validate(manifest, load_schema("manifest.schema.json"))
    assert manifest["config"]["restarts"] == 20


def test_optimize_csv_format(capsys):
    code = main(
        ["optimize", "--set", "pair:90", "--symmetric", "--economic", "--restarts", "10", "--format", "csv"]
    )
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "state,copy,fidelity"
    assert len(lines) == 1 + 4  # two states, two copies


def test_optimize_inconsistent_flags_exit_2(capsys):
    code = main(["optimize", "--set", "trio", "--economic", "--ancilla-dim", "2"])
    assert code == 2


def test_optimize_env_seed(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CLONEBENCH_SEED", "17")
    out = tmp_path / "opt.json"
    args = ["optimize", "--set", "pair:120", "--symmetric", "--economic", "--restarts", "5", "--out", str(out)]
    assert main(args) == 0
    first = read_json(out)
    assert first["seed"] == 17
    assert main(args) == 0
    assert read_json(out) == first  # same env seed, identical output


@pytest.mark.slow
def test_scan_resolution_8(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code = main(["scan", "--resolution", "8", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "phi2_deg,phi3_deg,fidelity,degenerate"
    assert len(lines) == 8 * 8 + 1
    summary = read_json(str(out) + ".summary.json")
    jsonschema.validate(summary, load_schema("scan_summary.schema.json"))
    assert summary["grid_limited"]
    assert summary["located"]


def test_scan_budget_exceeded(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code = main(["scan", "--resolution", "8", "--budget", "0.5", "--out", str(out)])
    assert code == 4
    manifest = read_json(str(out) + ".manifest.json")
    assert "exceeded" in manifest["note"]
    lines = out.read_text().splitlines()
    assert lines[0] == "phi2_deg,phi3_deg,fidelity,degenerate"
    assert len(lines) < 8 * 8 + 1


def test_scan_low_resolution_exit_2(capsys):
    assert main(["scan", "--resolution", "4"]) == 2


def test_nclone_n2(tmp_path, capsys):
    out = tmp_path / "nclone.json"
    code = main(["nclone", "--n", "2", "--restarts", "20", "--out", str(out)])
    assert code == 0
    doc = read_json(out)
    jsonschema.validate(doc, load_schema("nclone_report.schema.json"))
    assert doc["parity"] == "even"
    assert abs(doc["objective"] - F_PHASE) < 1e-4
    assert doc["oracle_delta"] < 1e-10


def test_nclone_out_of_range_exit_2(capsys):
    assert main(["nclone", "--n", "9"]) == 2
