"""Trace files and the command-line front end: run, check, corrupt, re-check."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

here = Path(__file__).parent
out = Path(tempfile.mkdtemp()) / "cycle3.trace.jsonl"

run = [sys.executable, "-m", "itersim.cli"]
subprocess.run(run + ["run", "--direction", "iis-to-as", "--mode", "baseline",
                      "--schedule", str(here / "cycle3.sched"),
                      "--n", "3", "--horizon", "1000", "--out", str(out)],
               check=True)

lines = out.read_text().splitlines()
print(f"trace has {len(lines)} records; first two:")
for line in lines[:2]:
    print(" ", line)

print("\nchecker on the pristine trace:")
subprocess.run(run + ["check", str(out)], check=True)

# corrupt one recorded round and watch the axiom checker object
rec = json.loads(lines[1])
rec["blocks"] = [[1, 2], [2, 3]]  # overlapping blocks: not a partition
lines[1] = json.dumps(rec, sort_keys=True, separators=(",", ":"))
out.write_text("\n".join(lines) + "\n")
print("\nchecker on the corrupted trace (exit code should be nonzero):")
code = subprocess.run(run + ["check", str(out)]).returncode
print(f"exit code {code}")
