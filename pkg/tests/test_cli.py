import csv
import io
import json

import pytest

from cavityent import cli, entanglement
from cavityent.scans import JUMP_RECORD_KEYS


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_scan_time_csv(capsys):
    code, out, _ = run(capsys, "scan-time", "--grid-nt", "3", "--grid-t", "4", "--t-max", "3")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:5] == ["n_t", "kappa", "t", "neg_traced", "neg_measured"]
    assert len(rows) == 1 + 3 * 4
    assert {r[1] for r in rows[1:]} == {"2"}  # default decay rate of the time scan


def test_scan_steady_to_file(tmp_path, capsys):
    out = tmp_path / "steady.csv"
    code, stdout, _ = run(capsys, "scan-steady", "--grid-nt", "2", "--grid-kappa", "2",
                          "--kappa-max", "1", "--out", str(out))
    assert code == 0 and stdout == ""
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 2 * 3


def test_config_file_and_override(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("n_t = 2\nkappa = 0.5\ncutoff = 4\n")
    code, out, _ = run(capsys, "jump-diag", "--config", str(conf), "--kappa", "1.0")
    assert code == 0
    record = json.loads(out)
    assert tuple(record) == JUMP_RECORD_KEYS
    assert record["n_t"] == 2.0 and record["kappa"] == 1.0 and record["cutoff"] == 4


def test_steady_and_evolve(capsys):
    code, out, _ = run(capsys, "steady", "--n-t", "1", "--kappa", "1")
    assert code == 0
    record = json.loads(out)
    assert record["residual"] <= 1e-9 and record["neg_measured"] >= record["neg_traced"] > 0
    code, out, _ = run(capsys, "evolve", "--t-max", "1", "--grid-t", "3")
    assert code == 0 and len(out.splitlines()) == 4


@pytest.mark.parametrize(
    "argv",
    [
        ["steady", "--cutoff", "0"],
        ["steady", "--gamma", "-1"],
        ["scan-time", "--grid-t", "1"],
        ["jump-diag", "--n-t", "0"],
        ["nonsense"],
        ["steady", "--unknown-flag"],
    ],
)
def test_usage_errors(argv):
    # argparse exits directly; everything else returns the code
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_bad_config(tmp_path, capsys):
    conf = tmp_path / "bad.conf"
    conf.write_text("colour = red\n")
    code, _, err = run(capsys, "steady", "--config", str(conf))
    assert code == 2 and "colour" in err
    code, _, _ = run(capsys, "steady", "--config", str(tmp_path / "missing.conf"))
    assert code == 2


def test_numerical_failures(capsys):
    code, _, err = run(capsys, "jump-diag", "--n-t", "1e-14")
    assert code == 3 and "JumpProbabilityError" in err
    code, _, _ = run(capsys, "steady", "--cutoff", "40")
    assert code == 3
    code, _, _ = run(capsys, "evolve", "--t-max", "20", "--dt", "1.5")
    assert code == 3


def test_validate_subset(capsys):
    code, out, err = run(capsys, "validate", "--only", "bell_calibration", "--only", "kappa0_separable")
    assert code == 0
    report = json.loads(out)
    assert [c["name"] for c in report["checks"]] == ["bell_calibration", "kappa0_separable"]
    assert "PASS" in err


def test_validate_injected_fault(monkeypatch, capsys):
    real = entanglement.log_negativity

    def broken(rho, base=2.0):
        result = real(rho, base)
        return type(result)(result.value * 0.9, result.min_pt_eigenvalue, result.trace_norm)

    monkeypatch.setattr(entanglement, "log_negativity", broken)
    code, out, _ = run(capsys, "validate", "--only", "bell_calibration")
    assert code == 1
    assert json.loads(out)["checks"][0]["status"] == "fail"
