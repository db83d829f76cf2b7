#!/usr/bin/env python3
"""Validate fgb reports against report.schema.json and check byte determinism."""
import json
import pathlib
import subprocess
import sys

import jsonschema

GALLERY = [
    "flat_disk", "sphere_cap", "cuspidal_edge_flat", "cuspidal_edge_revolution", "cuspidal_edge_tilted",
    "swallowtail_std", "parabolic_graph", "helicoid_annulus", "hyperbolic_paraboloid",
]


def run(exe, args, out):
    p = subprocess.run([exe, *args, "--out", str(out)], capture_output=True, text=True)
    return p.returncode, p.stderr


def main():
    exe, schema_path, work = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    work.mkdir(parents=True, exist_ok=True)
    schema = json.loads(schema_path.read_text())
    validator = jsonschema.Draft202012Validator(schema)
    failures = []

    def check(name, args, expect_codes):
        out = work / f"{name}.json"
        code, err = run(exe, args, out)
        if code not in expect_codes:
            failures.append(f"{name}: exit {code}, expected {expect_codes}: {err.strip()[-400:]}")
            return None
        doc = json.loads(out.read_text())
        errs = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        for e in errs[:5]:
            failures.append(f"{name}: {'/'.join(map(str, e.path))}: {e.message}")
        return out

    for g in GALLERY:
        check(f"analyze_{g}", ["analyze", f"gallery:{g}", "--grid", "64"], {0, 2})
        check(f"verify_{g}", ["verify", f"gallery:{g}", "--grid", "64"], {0, 1, 2})
    check("convergence", ["convergence", "gallery:swallowtail_std", "--formulas", "Thm3.5(1)", "--grids", "64,128"],
          {0, 1, 2})

    a = check("det_a", ["verify", "gallery:swallowtail_std", "--grid", "128"], {0})
    b = check("det_b", ["verify", "gallery:swallowtail_std", "--grid", "128"], {0})
    if a and b and a.read_bytes() != b.read_bytes():
        failures.append("verify output differs between identical runs")
    run(exe, ["plot", "gallery:swallowtail_std", "--grid", "128"], work / "a.svg")
    run(exe, ["plot", "gallery:swallowtail_std", "--grid", "128"], work / "b.svg")
    if (work / "a.svg").read_bytes() != (work / "b.svg").read_bytes():
        failures.append("plot output differs between identical runs")

    if a:
        doc = json.loads(a.read_text())
        doc["formulas"][0]["verdict"] = "maybe"
        if validator.is_valid(doc):
            failures.append("schema accepted an unknown verdict")

    bad = work / "bad.surface"
    bad.write_text("f = (u, v,\n")
    code, err = run(exe, ["analyze", str(bad)], work / "bad.json")
    if code != 1 or "line" not in err:
        failures.append(f"bad surface: exit {code}, stderr {err!r}")

    for f in failures:
        print("FAIL", f)
    print(f"{len(failures)} problem(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
