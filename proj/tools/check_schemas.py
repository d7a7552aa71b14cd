#!/usr/bin/env python3
"""Validates the shipped fixtures and a sample of CLI reports against schemas/.

usage: check_schemas.py TREERANK_BINARY [REPO_ROOT]
"""

import json
import subprocess
import sys
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

REPORT_COMMANDS = [
    ["analyze", "--tree", "gallery:pairs", "--max-element", "4"],
    ["analyze", "--tree", "gallery:fullspread", "--node", "[0]"],
    ["game", "--tree", "gallery:depthk:3", "--node", "[]"],
    ["branch", "--tree", "gallery:bushspine", "--prefix-len", "6", "--konig"],
    ["branch", "--tree", "gallery:pairs"],
    ["interp", "mul", "--size", "4", "--law"],
    ["interp", "check-number", "--structure", "fixtures/structures/fib1.json"],
    ["interp", "tmp", "--tree", "gallery:depthk:2"],
    ["lemmas", "--suite", "tmp"],
    ["fo", "eval", "--size", "3", "--formula", "forall i:idx . empty(fiber(0, i))"],
    ["fo", "builtin", "--name", "addition"],
    ["gallery"],
    ["gallery", "--tree", "fixtures/trees/small_explicit.json", "--truncate", "10"],
]


def main():
    binary = sys.argv[1]
    root = Path(sys.argv[2]) if len(sys.argv) > 2 else Path(__file__).resolve().parent.parent
    schemas = {p.name: json.loads(p.read_text()) for p in (root / "schemas").glob("*.json")}
    registry = Registry().with_resources((name, Resource.from_contents(s)) for name, s in schemas.items())

    def validator(name):
        return jsonschema.Draft202012Validator(schemas[name], registry=registry)

    failures = 0

    def check(v, doc, label):
        nonlocal failures
        errors = list(v.iter_errors(doc))
        for e in errors:
            print("FAIL %s: %s at %s" % (label, e.message, "/".join(map(str, e.absolute_path))))
        failures += bool(errors)

    trees = validator("tree_fixture.schema.json")
    for p in sorted((root / "fixtures" / "trees").glob("*.json")):
        check(trees, json.loads(p.read_text()), p.name)
    structures = validator("structure_fixture.schema.json")
    for p in sorted((root / "fixtures" / "structures").rglob("*.json")):
        check(structures, json.loads(p.read_text()), p.name)
    reports = validator("report.schema.json")
    for cmd in REPORT_COMMANDS:
        out = subprocess.run([binary] + cmd, cwd=root, capture_output=True, text=True)
        if out.returncode != 0:
            print("FAIL %s: exit %d %s" % (" ".join(cmd), out.returncode, out.stderr.strip()))
            failures += 1
            continue
        check(reports, json.loads(out.stdout), " ".join(cmd))
    print("%d schema failures" % failures)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
