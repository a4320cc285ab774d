#!/usr/bin/env python3
"""Black-box checks of the gmspec executable: exit codes, CSV headers,
determinism and JSON outputs against the shipped schemas."""

import argparse
import json
import math
import os
import subprocess
import sys
import tempfile

import jsonschema

FAILURES = []


def run(binary, *args, env=None):
    full_env = dict(os.environ)
    full_env.pop("GMSPEC_SEED", None)
    full_env["LC_ALL"] = "de_DE.UTF-8"
    if env:
        full_env.update(env)
    return subprocess.run([binary, *args], capture_output=True, text=True, env=full_env)


def check(name, cond, detail=""):
    print(("PASS " if cond else "FAIL ") + name + (": " + detail if detail else ""))
    if not cond:
        FAILURES.append(name)


def load_schema(schemas, name):
    with open(os.path.join(schemas, name), encoding="utf-8") as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def valid(validator, instance):
    errors = list(validator.iter_errors(instance))
    return not errors, "; ".join(e.message for e in errors[:3])


def schema_group(binary, schemas, tmp):
    trace = load_schema(schemas, "trace_moments.schema.json")
    part = load_schema(schemas, "partition.schema.json")
    report = load_schema(schemas, "verify_report.schema.json")

    out = os.path.join(tmp, "tm.json")
    r = run(binary, "trace-moments", "--m", "2", "--n", "10", "--q-max", "3", "--reps", "2",
            "--seed", "5", "--out", out)
    check("trace_moments_exit_0", r.returncode == 0, r.stderr.strip())
    with open(out, encoding="utf-8") as f:
        doc = json.load(f)
    ok, why = valid(trace, doc)
    check("trace_moments_validates", ok, why)
    check("trace_moments_has_q_max_rows", [e["q"] for e in doc] == [1, 2, 3])
    check("trace_moments_prints_seed", "seed: 5" in r.stderr)

    out = os.path.join(tmp, "dominant.jsonl")
    r = run(binary, "count-dominant", "--m", "2", "--q", "2", "--list", out)
    with open(out, encoding="utf-8") as f:
        lines = [json.loads(line) for line in f if line.strip()]
    check("partition_list_length", r.returncode == 0 and len(lines) == 3, str(len(lines)))
    ok = all(valid(part, line)[0] for line in lines)
    check("partition_lines_validate", ok)
    check("partition_lines_cover_all_vertices",
          all(sorted(v for b in line for v in b) ==
              sorted(f"{c}_{i}_{j}" for c in "ab" for i in (1, 2) for j in (1, 2)) for line in lines))

    out = os.path.join(tmp, "report.json")
    r = run(binary, "verify", "--suite", "combinatorics", "--report", out)
    check("verify_combinatorics_exit_0", r.returncode == 0, r.stderr.strip())
    with open(out, encoding="utf-8") as f:
        doc = json.load(f)
    ok, why = valid(report, doc)
    check("verify_report_validates", ok, why)
    check("verify_report_passed", doc["passed"] is True)


def cli_group(binary, tmp):
    r = run(binary, "count-formula", "--m", "2", "--n", "3")
    check("count_formula", r.returncode == 0 and r.stdout.strip() == "12", r.stdout.strip())
    r = run(binary, "count-formula", "--m", "3", "--n", "30")
    check("count_formula_big", r.stdout.strip() == str(math.comb(120, 30) // 91), r.stdout.strip())
    r = run(binary, "gridwalks", "--m", "2", "--n", "3", "--compare")
    check("gridwalks", r.returncode == 0 and r.stdout.strip() == "12", r.stdout.strip())
    r = run(binary, "count-dominant", "--m", "2", "--q", "3")
    check("count_dominant_2_3", r.returncode == 0 and r.stdout.strip() == "12", r.stdout.strip())
    r = run(binary, "count-dominant", "--m", "1", "--q", "5", "--check-structure")
    check("count_dominant_structure", r.returncode == 0 and r.stdout.strip() == "42"
          and "0 violations" in r.stderr, r.stderr.strip())
    r = run(binary, "count-dominant", "--m", "2", "--q", "4")
    check("count_dominant_needs_allow_slow", r.returncode == 2 and "allow_slow" in r.stderr,
          r.stderr.strip())

    r = run(binary, "density", "--family", "z", "--grid", "10", "--out", "-")
    rows = r.stdout.strip().splitlines()
    xs = [float(line.split(",")[0]) for line in rows[1:]]
    check("density_header", rows[0] == "x,f", rows[0])
    check("density_ten_rows", r.returncode == 0 and len(xs) == 10, str(len(xs)))
    check("density_x_increasing", all(a < b for a, b in zip(xs, xs[1:])))
    r = run(binary, "density", "--family", "z3", "--ode", "--eps", "1e-2", "--grid", "5")
    rows = r.stdout.strip().splitlines()
    check("density_z3_ode", r.returncode == 0 and rows[0] == "x,f" and len(rows) == 6
          and all(float(line.split(",")[1]) > 0 for line in rows[1:]))
    r = run(binary, "density", "--family", "z3", "--closed-form", "--grid", "5")
    check("density_z3_closed_form_is_usage_error", r.returncode == 2)

    out = os.path.join(tmp, "h.csv")
    r = run(binary, "sample", "--m", "2", "--n", "8", "--reps", "2", "--bins", "12", "--out", out)
    with open(out, encoding="utf-8") as f:
        rows = f.read().splitlines()
    check("sample_header", rows[0] == "bin_lo,bin_hi,count,density", rows[0])
    check("sample_rows", r.returncode == 0 and len(rows) == 13, str(len(rows)))
    check("sample_prints_seed", "seed: 20240611" in r.stderr, r.stderr.strip())
    area = sum((float(c[1]) - float(c[0])) * float(c[3]) for c in (x.split(",") for x in rows[1:]))
    check("sample_unit_area", abs(area - 1) < 1e-12, repr(area))

    a = run(binary, "sample", "--n", "8", "--reps", "2", "--bins", "12", "--out", "-",
            env={"GMSPEC_SEED": "99"})
    b = run(binary, "sample", "--n", "8", "--reps", "2", "--bins", "12", "--out", "-", "--seed", "99")
    c = run(binary, "sample", "--n", "8", "--reps", "2", "--bins", "12", "--out", "-", "--seed", "98")
    check("seed_from_environment", "seed: 99" in a.stderr and a.stdout == b.stdout)
    check("different_seed_differs", b.stdout != c.stdout)

    r = run(binary, "moments-check", "--family", "z", "--k-max", "6", "--tol", "1e-4")
    check("moments_check_z", r.returncode == 0, r.stderr.strip())
    r = run(binary, "moments-check", "--family", "z", "--k-max", "6", "--tol", "1e-20")
    check("moments_check_violation_exit_1", r.returncode == 1)

    r = run(binary, "frobnicate")
    check("unknown_subcommand_exit_2", r.returncode == 2 and "Usage" in r.stderr)
    r = run(binary, "count-formula", "--m", "2", "--n", "3", "--bogus")
    check("unknown_flag_exit_2", r.returncode == 2 and "Usage" in r.stderr)
    r = run(binary, "count-formula", "--m", "0", "--n", "3")
    check("invalid_value_exit_2", r.returncode == 2)
    r = run(binary, "sample", "--n", "8", "--bins", "5")
    check("too_few_bins_exit_2", r.returncode == 2)

    r = run(binary, "verify", "--suite", "spectrum", "--mutate-z3-fprime")
    check("verify_mutation_exit_1", r.returncode == 1 and "FAIL spectrum/z3_ode_solution_moments" in r.stdout)
    r = run(binary, "verify", "--suite", "spectrum", "--split-fraction", "0.5")
    check("verify_split_half_exit_0", r.returncode == 0, r.stdout[-300:])


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--bin", required=True)
    p.add_argument("--schemas", required=True)
    p.add_argument("--group", choices=["cli", "schema"], required=True)
    a = p.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        if a.group == "schema":
            schema_group(a.bin, a.schemas, tmp)
        else:
            cli_group(a.bin, tmp)
    if FAILURES:
        print(f"{len(FAILURES)} check(s) failed: {', '.join(FAILURES)}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
