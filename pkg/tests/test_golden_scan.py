"""The archived conjecture-scan table.

Set QACTION_UPDATE_GOLDEN=1 to re-record tests/golden/conjecture-scan.csv
after an intended numerical change; a missing file is recorded on first run.
"""

import os
import subprocess
from pathlib import Path

import pytest

GOLDEN = Path(__file__).resolve().parent / "golden" / "conjecture-scan.csv"
HEADER = "tau,variant,value_re,value_im,error,cutoff,tail_bound"
VARIANTS = ("inverse", "inverse_vacuum", "product", "product_vacuum")


def _emit_scan_table(qact_path: Path, tmp_path: Path) -> bytes:
    config = tmp_path / "scan.json"
    template = subprocess.run(
        [str(qact_path), "template", "conjecture-scan"], capture_output=True, text=True
    )
    assert template.returncode == 0, template.stderr
    config.write_text(template.stdout, encoding="utf-8")
    out = tmp_path / "out"
    p = subprocess.run(
        [str(qact_path), "run", str(config), "--output-dir", str(out)],
        capture_output=True,
        text=True,
    )
    assert p.returncode == 0, p.stderr
    return (out / "conjecture-scan_scan.csv").read_bytes()


def test_scan_table_matches_golden(qact_path: Path, tmp_path: Path) -> None:
    emitted = _emit_scan_table(qact_path, tmp_path)
    lines = emitted.decode("utf-8").splitlines()
    assert lines[0] == HEADER
    keys = [tuple(line.split(",")[:2]) for line in lines[1:]]
    taus = [repr(0.1 * 0.5**k) for k in range(8)]
    assert keys == [(tau, variant) for tau in taus for variant in VARIANTS]

    if os.environ.get("QACTION_UPDATE_GOLDEN") == "1" or not GOLDEN.exists():
        GOLDEN.parent.mkdir(parents=True, exist_ok=True)
        GOLDEN.write_bytes(emitted)
        pytest.skip(f"recorded {GOLDEN.name}")
    assert emitted == GOLDEN.read_bytes()
