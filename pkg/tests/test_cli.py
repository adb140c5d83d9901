import json

import pytest

from py_phase_ident.cli import main
from py_phase_ident.errors import DATA_EXIT, NUMERIC_EXIT, USAGE_EXIT
from py_phase_ident.exports import read_assignment, read_ground_truth
from py_phase_ident.validation import agreement

PERIODS = ["--period", "2021-06", "--period", "2021-07"]


@pytest.fixture(scope="module")
def feeder_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth") / "feeder_f"
    code = main(["synth", "--out", str(out), "--seed", "11", *PERIODS])
    assert code == 0
    return out


def run_args(feeder_dir, out, *extra):
    return [
        "--readings",
        str(feeder_dir / "readings.csv"),
        "--topology",
        str(feeder_dir / "topology.csv"),
        "--feeder",
        "F",
        "--out",
        str(out),
        *extra,
    ]


def tree_bytes(root):
    return {
        str(path.relative_to(root)): path.read_bytes()
        for path in sorted(root.rglob("*"))
        if path.is_file()
    }


def test_synth_writes_inputs(feeder_dir):
    assert (feeder_dir / "readings.csv").read_text().startswith("meter_id,timestamp,voltage\n")
    assert (feeder_dir / "topology.csv").read_text().startswith(
        "meter_id,transformer_id,feeder_id\n"
    )
    manifest = json.loads((feeder_dir / "manifest.json").read_text())
    assert manifest["command"] == "synth"
    assert manifest["config"]["seed"] == 11
    assert len(read_ground_truth(feeder_dir / "ground_truth.csv")) == 26


def test_synth_is_byte_identical(tmp_path, feeder_dir):
    again = tmp_path / "again"

    assert main(["synth", "--out", str(again), "--seed", "11", *PERIODS]) == 0
    assert tree_bytes(again) == tree_bytes(feeder_dir)


def test_cluster_recovers_phases(tmp_path, feeder_dir):
    out = tmp_path / "cluster"

    code = main(["cluster", *run_args(feeder_dir, out, *PERIODS)])

    assert code == 0
    for period_id in ("2021-06", "2021-07"):
        for name in ("assignment.csv", "dendrogram.csv", "leaves.csv", "features.csv"):
            assert (out / period_id / name).is_file()
        assignment = read_assignment(out / period_id / "assignment.csv")
        assert assignment.period_id == period_id
        truth = read_ground_truth(feeder_dir / "ground_truth.csv")
        assert agreement(assignment, truth) == 1.0
    header = (out / "2021-06" / "features.csv").read_text().splitlines()[0]
    assert header == "meter_id,a30,b30,a60,b60,a90,b90,a120,b120,a150,b150,a180,b180"
    manifest = json.loads((out / "manifest.json").read_text())
    assert "out" not in manifest["config"]
    assert set(manifest["config"]["inputs_sha256"]) == {"readings", "topology"}


def test_config_file_with_flag_override(tmp_path, feeder_dir):
    config = tmp_path / "run.env"
    config.write_text(
        f"readings={feeder_dir / 'readings.csv'}\n"
        f"topology={feeder_dir / 'topology.csv'}\n"
        "feeder=F\nperiods=2021-06\nk=2\n",
        encoding="utf-8",
    )
    out = tmp_path / "cluster"

    assert main(["cluster", "--config", str(config), "--k", "4", "--out", str(out)]) == 0
    assignment = read_assignment(out / "2021-06" / "assignment.csv")
    assert len(set(assignment.labels.values())) == 4


def test_validate_and_embed(tmp_path, feeder_dir):
    clustered = tmp_path / "cluster"
    assert main(["cluster", *run_args(feeder_dir, clustered, *PERIODS)]) == 0

    reports = tmp_path / "reports"
    code = main(
        [
            "validate",
            "--assignments",
            str(clustered / "2021-06" / "assignment.csv"),
            str(clustered / "2021-07" / "assignment.csv"),
            "--topology",
            str(feeder_dir / "topology.csv"),
            "--out",
            str(reports),
        ]
    )
    assert code == 0
    purity = json.loads((reports / "purity_2021-06.json").read_text())
    assert purity["purity"] == 1.0
    assert purity["impure_transformers"] == []
    stability = json.loads((reports / "stability.json").read_text())
    assert stability["stable_fraction"] == 1.0
    assert "Stable fraction: 1" in (reports / "stability.txt").read_text()
    assert "Purity: 1" in (reports / "purity_2021-07.txt").read_text()

    embedded = tmp_path / "embed"
    code = main(
        [
            "embed",
            "--features",
            str(clustered / "2021-06" / "features.csv"),
            "--assignment",
            str(clustered / "2021-06" / "assignment.csv"),
            "--out",
            str(embedded),
        ]
    )
    assert code == 0
    lines = (embedded / "coordinates.csv").read_text().splitlines()
    assert lines[0] == "meter_id,x,y,cluster"
    assert len(lines) == 27
    assert json.loads((embedded / "embedding.json").read_text())["rank"] == 2


def test_report_is_deterministic(tmp_path, feeder_dir):
    first, second = tmp_path / "first", tmp_path / "second"

    assert main(["report", *run_args(feeder_dir, first, *PERIODS)]) == 0
    assert main(["report", *run_args(feeder_dir, second, *PERIODS)]) == 0

    files = tree_bytes(first)
    assert "validation/stability.txt" in files
    assert "2021-07/coordinates.csv" in files
    assert "manifest.json" in files
    assert files == tree_bytes(second)


def test_report_needs_two_periods(tmp_path, feeder_dir):
    code = main(["report", *run_args(feeder_dir, tmp_path / "r", "--period", "2021-06")])

    assert code == USAGE_EXIT


def test_spectrum(tmp_path, feeder_dir):
    out = tmp_path / "spectra"

    code = main(["spectrum", *run_args(feeder_dir, out, "--period", "2021-06")])

    assert code == 0
    spectrum = (out / "2021-06" / "spectra" / "F-M01.csv").read_text().splitlines()
    assert spectrum[0] == "n,a,b"
    assert len(spectrum) == 361
    curve = (out / "2021-06" / "error_curve.csv").read_text().splitlines()
    assert curve[0] == "meter_id,pairs,coefficients,error"
    assert len(curve) == 1 + 26 * 6
    assert (out / "2021-06" / "magnitudes.csv").is_file()


def test_cluster_into_input_directory_keeps_inputs(tmp_path):
    data = tmp_path / "feeder_f"
    assert main(["synth", "--out", str(data), "--seed", "11", "--period", "2021-06"]) == 0
    (data / "notes.txt").write_text("field notes", encoding="utf-8")
    before = tree_bytes(data)

    code = main(["cluster", *run_args(data, data, "--period", "2021-06")])

    assert code == 0
    after = tree_bytes(data)
    for name in ["readings.csv", "topology.csv", "ground_truth.csv", "notes.txt"]:
        assert after[name] == before[name]
    assert "2021-06/assignment.csv" in after
    assert not any(p.name.startswith(".") for p in data.iterdir())


def test_output_over_an_input_is_usage_error(tmp_path, feeder_dir):
    out = tmp_path / "out"
    out.mkdir()
    readings = out / "manifest.json"
    readings.write_bytes((feeder_dir / "readings.csv").read_bytes())
    args = run_args(feeder_dir, out, "--period", "2021-06")
    args[1] = str(readings)

    assert main(["cluster", *args]) == USAGE_EXIT
    assert readings.read_bytes() == (feeder_dir / "readings.csv").read_bytes()
    assert [p.name for p in out.iterdir()] == ["manifest.json"]


def test_no_command_is_usage_error():
    assert main([]) == USAGE_EXIT


def test_missing_input_is_usage_error(tmp_path, capsys):
    code = main(
        [
            "cluster",
            "--readings",
            str(tmp_path / "missing.csv"),
            "--topology",
            str(tmp_path / "missing.csv"),
            "--feeder",
            "F",
            "--period",
            "2021-06",
        ]
    )

    assert code == USAGE_EXIT
    assert "Error:" in capsys.readouterr().err


def test_parse_error_exit_code(tmp_path, feeder_dir, capsys):
    readings = tmp_path / "readings.csv"
    readings.write_text(
        "meter_id,timestamp,voltage\nF-M01,2021-06-01T00:00:00,oops\n", encoding="utf-8"
    )
    code = main(
        [
            "cluster",
            "--readings",
            str(readings),
            "--topology",
            str(feeder_dir / "topology.csv"),
            "--feeder",
            "F",
            "--period",
            "2021-06",
            "--out",
            str(tmp_path / "out"),
        ]
    )

    assert code == DATA_EXIT
    assert ":2:" in capsys.readouterr().err


def test_empty_dataset_exit_code(tmp_path, feeder_dir):
    readings = tmp_path / "readings.csv"
    readings.write_text(
        "meter_id,timestamp,voltage\nF-M01,2021-06-01T00:00:00,240\n", encoding="utf-8"
    )
    args = run_args(feeder_dir, tmp_path / "out", "--period", "2021-06")
    args[1] = str(readings)

    assert main(["cluster", *args]) == DATA_EXIT
    assert main(["spectrum", *args]) == DATA_EXIT


def test_bad_mask_exit_codes(tmp_path, feeder_dir):
    out = tmp_path / "out"
    out.mkdir()
    (out / "keep.txt").write_text("previous run")

    args = run_args(feeder_dir, out, "--period", "2021-06")
    assert main(["cluster", *args, "--mask", "fixed:9999"]) == NUMERIC_EXIT
    assert main(["cluster", *args, "--mask", "bogus:1"]) == USAGE_EXIT
    assert main(["cluster", *args, "--k", "100"]) == USAGE_EXIT
    # failed runs leave the previous output alone
    assert (out / "keep.txt").read_text() == "previous run"
