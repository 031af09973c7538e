#!/usr/bin/env python3
"""Run ltlab commands and validate each JSON report against schema/report.schema.json."""
import json
import pathlib
import subprocess
import sys

import jsonschema

ROOT = pathlib.Path(__file__).resolve().parent.parent

RUNS = [
    ["verify", "--suite", "all", "--seed", "4", "--json"],
    ["verify", "--suite", "descent", "--p", "2", "--json", "--allow-skip"],
    ["group-law", "--p", "2", "--order", "8"],
    ["torsion", "--p", "3", "--level", "2"],
    ["eps", "gauss", "--p", "5", "--conductor", "1", "--all-characters"],
    ["eps", "equivariant", "--p", "3", "--level", "1"],
    ["coh", "--p", "3", "--N", "4"],
    ["dist", "--p", "3", "--seed", "2"],
]


def main():
    binary = sys.argv[1]
    schema = json.loads((ROOT / "schema" / "report.schema.json").read_text())
    validator = jsonschema.Draft202012Validator(schema)
    bad = 0
    for args in RUNS:
        proc = subprocess.run([binary, *args], capture_output=True, text=True)
        try:
            report = json.loads(proc.stdout)
        except json.JSONDecodeError as e:
            print(f"FAIL {' '.join(args)}: not JSON ({e})")
            bad += 1
            continue
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        for e in errors[:3]:
            print(f"FAIL {' '.join(args)}: {'/'.join(map(str, e.path))}: {e.message[:200]}")
        bad += bool(errors)
        if not errors:
            print(f"ok   {' '.join(args)} (exit {proc.returncode})")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
