import json
import subprocess
from pathlib import Path

from qaction.experiments import CATALOG


def _run(qact_path: Path, *args: str) -> subprocess.CompletedProcess:
    return subprocess.run([str(qact_path), *args], capture_output=True, text=True)


def test_cli_version_flag(qact_path: Path) -> None:
    p = _run(qact_path, "--version")
    assert p.returncode == 0
    assert "qaction" in (p.stdout or "")


def test_list_shows_every_experiment(qact_path: Path) -> None:
    p = _run(qact_path, "list")
    assert p.returncode == 0, p.stderr
    lines = p.stdout.strip().splitlines()
    assert [line.split(":", 1)[0] for line in lines] == sorted(CATALOG)
    assert any("partition-product" in line and "omega" in line for line in lines)

    bare = _run(qact_path)
    assert bare.returncode == 0
    assert bare.stdout == p.stdout


def test_template_prints_valid_config(qact_path: Path) -> None:
    p = _run(qact_path, "template", "finite-product")
    assert p.returncode == 0, p.stderr
    payload = json.loads(p.stdout)
    assert payload["experiment"] == "finite-product"
    assert payload["schema_version"] == "experiment.v0"


def test_unknown_template_is_exit_2(qact_path: Path) -> None:
    p = _run(qact_path, "template", "finite-prodct")
    assert p.returncode == 2
    assert p.stderr.startswith("ERROR:")
    assert "did you mean 'finite-product'" in p.stderr


def test_run_propagator_identity(qact_path: Path, tmp_path: Path) -> None:
    config = tmp_path / "propagator.json"
    config.write_text(_run(qact_path, "template", "propagator-identity").stdout, encoding="utf-8")
    out = tmp_path / "out"
    p = _run(qact_path, "run", str(config), "--output-dir", str(out))
    assert p.returncode == 0, p.stderr
    assert "PASS relative_error" in p.stdout

    result = json.loads((out / "propagator-identity_result.json").read_text(encoding="utf-8"))
    assert result["passed"] is True
    assert result["schema_version"] == "result_record.v0"
    assert result["config"]["seed"] == 7
    for table in result["tables"]:
        assert (out / table["file"]).exists()

    events = [json.loads(line) for line in (out / "run_log.jsonl").read_text().splitlines()]
    assert [e["event"] for e in events] == [
        "run_started",
        "config_loaded",
        "experiment_finished",
        "result_written",
    ]


def test_rerun_is_byte_identical(qact_path: Path, tmp_path: Path, write_config) -> None:
    config = write_config(
        {"experiment": "finite-product", "params": {"omega": 1.0, "slice_counts": [1, 3, 5]}}
    )
    first, second = tmp_path / "first", tmp_path / "second"
    assert _run(qact_path, "run", str(config), "--output-dir", str(first)).returncode == 0
    assert _run(qact_path, "run", str(config), "--output-dir", str(second)).returncode == 0
    names = sorted(p.name for p in first.iterdir() if p.name != "run_log.jsonl")
    assert names == sorted(p.name for p in second.iterdir() if p.name != "run_log.jsonl")
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_missing_omega_is_exit_2(qact_path: Path, tmp_path: Path, write_config) -> None:
    config = write_config({"experiment": "partition-product", "params": {}})
    p = _run(qact_path, "run", str(config), "--output-dir", str(tmp_path / "out"))
    assert p.returncode == 2
    assert "ERROR:" in p.stderr
    assert "params.omega is required" in p.stderr
    assert not (tmp_path / "out" / "partition-product_result.json").exists()


def test_unknown_experiment_is_exit_2(qact_path: Path, write_config) -> None:
    config = write_config({"experiment": "trotter-ordr", "params": {}})
    p = _run(qact_path, "run", str(config))
    assert p.returncode == 2
    assert "did you mean 'trotter-order'" in p.stderr


def test_randomized_run_without_seed_is_exit_2(qact_path: Path, write_config) -> None:
    config = write_config({"experiment": "legendre-phase", "params": {}})
    p = _run(qact_path, "run", str(config))
    assert p.returncode == 2
    assert "seed is required" in p.stderr


def test_seed_flag_supplies_missing_seed(qact_path: Path, tmp_path: Path, write_config) -> None:
    config = write_config({"experiment": "legendre-phase", "params": {"samples": 4}})
    out = tmp_path / "out"
    p = _run(qact_path, "run", str(config), "--seed", "5", "--output-dir", str(out))
    assert p.returncode == 0, p.stderr
    result = json.loads((out / "legendre-phase_result.json").read_text(encoding="utf-8"))
    assert result["config"]["seed"] == 5


def test_failed_identity_is_exit_1(qact_path: Path, tmp_path: Path, write_config) -> None:
    config = write_config(
        {"experiment": "green-function", "params": {"omega": 1.0, "order_tolerance": 1e-12}}
    )
    p = _run(qact_path, "run", str(config), "--output-dir", str(tmp_path / "out"))
    assert p.returncode == 1, p.stderr
    assert "identity check failed: lattice_order_deviation" in p.stderr
    assert "FAIL lattice_order_deviation" in p.stdout
    assert (tmp_path / "out" / "green-function_result.json").exists()


def test_bad_threads_is_exit_2(qact_path: Path, tmp_path: Path, write_config) -> None:
    config = write_config({"experiment": "finite-product", "params": {"omega": 1.0}})
    p = _run(qact_path, "run", str(config), "--threads", "0", "--output-dir", str(tmp_path))
    assert p.returncode == 2
    assert "--threads" in p.stderr
    events = [json.loads(line) for line in (tmp_path / "run_log.jsonl").read_text().splitlines()]
    assert events[-1]["event"] == "run_failed"
    assert events[-1]["payload"]["exit_code"] == 2


def test_large_lam_scan_has_no_traceback(qact_path: Path, tmp_path: Path, write_config) -> None:
    config = write_config(
        {"experiment": "conjecture-scan", "params": {"lam": 10.0, "steps": 2, "lams": [10.0]}}
    )
    out = tmp_path / "out"
    p = _run(qact_path, "run", str(config), "--output-dir", str(out))
    assert "Traceback" not in p.stderr
    assert p.returncode in (0, 1), p.stderr
    result = json.loads((out / "conjecture-scan_result.json").read_text(encoding="utf-8"))
    assert result["diagnostics"]["max_tail_bound"] < 1e-12
