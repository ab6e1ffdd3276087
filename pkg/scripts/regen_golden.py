"""Rewrite the golden files under tests/golden from the bundled data.

Run only after an intentional output change, then review the diff:

    python scripts/regen_golden.py
"""

import shutil
import tempfile
from pathlib import Path

from ecosysna.cli import main

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
GOLDEN = ROOT / "tests" / "golden"

SAMPLE_ARGS = ["sample", "--seeds", str(DATA / "seeds.txt"), "--fixture", str(DATA / "fixture.json")]
PIPELINE_ARGS = SAMPLE_ARGS[1:] + [
    "--filter", str(DATA / "blocklist.txt"), "--mode", "block", "--labels", str(DATA / "labels.csv"),
]


def regenerate():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        assert main(SAMPLE_ARGS + ["--out", str(tmp / "raw.csv"), "--trace", str(tmp / "trace.json")]) == 0
        assert main(["pipeline", *PIPELINE_ARGS, "--out", str(tmp / "run")]) == 0
        shutil.copy(tmp / "raw.csv", GOLDEN / "sample.csv")
        shutil.copy(tmp / "trace.json", GOLDEN / "trace.json")
        shutil.copy(tmp / "run" / "report.json", GOLDEN / "report.json")


if __name__ == "__main__":
    regenerate()
