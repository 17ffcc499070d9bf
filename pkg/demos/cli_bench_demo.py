"""Drive the command line: decide an instance file and run a scaling sweep."""

import subprocess
import sys
from pathlib import Path

instances = Path(__file__).resolve().parent.parent / "instances"


def run(*args: str) -> None:
    print("$ cfineq", " ".join(args))
    out = subprocess.run([sys.executable, "-m", "cfineq", *args], capture_output=True, text=True)
    print(out.stdout.rstrip() or out.stderr.rstrip(), f"\n(exit {out.returncode})\n")


run("decide", "ultimate-ineq", str(instances / "cosh_vs_5exp_half.json"))
run("decide", "ultimate-ineq", str(instances / "boundary_exp_minus.json"), "--fuel", "8")
run("coeff", str(instances / "boundary_exp_minus.json"), "--m1", "1")
run("bench", "--family", "identically-equal", "--k", "1..8", "--fuel", "60")
