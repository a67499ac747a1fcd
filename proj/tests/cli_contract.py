#!/usr/bin/env python3
"""End-to-end checks of the polarize CLI: exit codes, known values, schema
validity of every JSON output, and byte-identical reruns."""

import argparse
import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

FAILURES = []


def check(cond, what):
    print(("PASS " if cond else "FAIL ") + what)
    if not cond:
        FAILURES.append(what)


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


class Cli:
    def __init__(self, exe, env=None):
        self.exe = exe
        self.env = env

    def run(self, args, cwd, env_extra=None):
        env = dict(os.environ)
        env.pop("POLARIZE_SEED", None)
        if env_extra:
            env.update(env_extra)
        return subprocess.run([self.exe, *args], cwd=cwd, env=env, capture_output=True, text=True)


def load_schemas(directory):
    resources = []
    schemas = {}
    for path in sorted(Path(directory).glob("*.schema.json")):
        doc = json.loads(path.read_text())
        schemas[path.name] = doc
        resources.append((doc["$id"], Resource.from_contents(doc)))
    registry = Registry().with_resources(resources)
    validators = {
        name: jsonschema.Draft202012Validator(doc, registry=registry) for name, doc in schemas.items()
    }
    for name, doc in schemas.items():
        jsonschema.Draft202012Validator.check_schema(doc)
    return validators


def validate(validators, schema, doc, what):
    errors = list(validators[schema].iter_errors(doc))
    check(not errors, f"{what} validates against {schema}" + (f": {errors[0].message}" if errors else ""))


def csv_rows(text):
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--schemas", required=True)
    ap.add_argument("--fixtures", required=True)
    args = ap.parse_args()

    cli = Cli(os.path.abspath(args.cli))
    validators = load_schemas(args.schemas)
    fx = Path(args.fixtures).resolve()
    k2, k2s, const_s = str(fx / "k2.edges"), str(fx / "k2_opinions.csv"), str(fx / "constant_opinions.csv")

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)

        # Seeded synthetic inputs shared by later commands.
        r = cli.run(["--seed", "11", "generate", "--model", "two-community", "--n", "24", "--p-in", "0.4",
                     "--p-out", "0.05", "--wlo", "0.5", "--whi", "1.5", "--opinions", "split",
                     "--opinions-out", "s.csv", "--out", "g.edges"], tmp)
        check(r.returncode == 0, "generate exits 0")
        validate(validators, "manifest.schema.json", json.loads((tmp / "g.edges.manifest.json").read_text()),
                 "generate manifest")
        r_env = cli.run(["generate", "--model", "two-community", "--n", "24", "--p-in", "0.4", "--p-out", "0.05",
                         "--wlo", "0.5", "--whi", "1.5"], tmp, {"POLARIZE_SEED": "11"})
        check(r_env.stdout == (tmp / "g.edges").read_text(), "POLARIZE_SEED fallback matches --seed")
        r_other = cli.run(["--seed", "12", "generate", "--model", "two-community", "--n", "24"], tmp)
        check(r_other.stdout != (tmp / "g.edges").read_text(), "a different seed gives a different graph")
        graph, opinions = str(tmp / "g.edges"), str(tmp / "s.csv")
        r = cli.run(["--seed", "3", "generate", "--model", "random", "--n", "16", "--p", "0.3", "--wlo", "0.2",
                     "--whi", "1", "--out", "u.edges"], tmp)
        check(r.returncode == 0, "generate a unit-box graph")
        unit = str(tmp / "u.edges")

        # simulate
        r = cli.run(["simulate", "--graph", k2, "--opinions", k2s], tmp)
        rows = csv_rows(r.stdout)
        check(r.returncode == 0 and close(float(rows[0]["value"]), 1 / 3) and close(float(rows[1]["value"]), 2 / 3),
              "simulate K2 gives z = [1/3, 2/3]")
        r = cli.run(["simulate", "--graph", k2, "--opinions", const_s], tmp)
        check(all(close(float(row["value"]), 0.4) for row in csv_rows(r.stdout)), "simulate constant s gives z = s")
        r = cli.run(["simulate", "--graph", k2, "--opinions", k2s, "--trajectory", "traj.csv"], tmp)
        traj = (tmp / "traj.csv").read_text().splitlines()
        check(r.returncode == 0 and traj[0] == "step,z_0,z_1" and len(traj) > 2, "simulate writes a trajectory")

        # metrics
        values = {}
        for route in ["from_z", "from_sbar", "from_s"]:
            r = cli.run(["metrics", "--graph", k2, "--opinions", k2s, "--route", route], tmp)
            doc = json.loads(r.stdout)
            validate(validators, "metric_report.schema.json", doc, f"metrics {route}")
            values[route] = doc
        z = values["from_z"]
        check(close(z["polarization"], 1 / 18) and close(z["disagreement"], 1 / 9) and close(z["pdi"], 1 / 6),
              "metrics K2 gives P = 1/18, D = 1/9, PDI = 1/6")
        check(all(close(values[r][key], z[key], 1e-9) for r in values for key in ["polarization", "disagreement", "pdi"]),
              "metrics routes agree")
        r = cli.run(["metrics", "--graph", k2, "--opinions", const_s], tmp)
        doc = json.loads(r.stdout)
        check(abs(doc["polarization"]) < 1e-15 and abs(doc["disagreement"]) < 1e-15 and abs(doc["pdi"]) < 1e-15,
              "metrics constant s gives zeros")

        # demo-echo
        r = cli.run(["demo-echo"], tmp)
        doc = json.loads(r.stdout)
        validate(validators, "demo_echo.schema.json", doc, "demo-echo")
        echo, cross = (s["report"] for s in doc["scenarios"])
        check(r.returncode == 0 and echo["polarization"] > cross["polarization"]
              and echo["disagreement"] < cross["disagreement"], "demo-echo orders P and D")

        # admin
        r = cli.run(["admin", "--graph", graph, "--opinions", opinions, "--epsilon", "0", "--rounds", "1"], tmp)
        base = json.loads(cli.run(["metrics", "--graph", graph, "--opinions", opinions], tmp).stdout)
        first = csv_rows(r.stdout)[0]
        check(r.returncode == 0 and close(float(first["polarization"]), base["polarization"], 1e-12)
              and close(float(first["disagreement"]), base["disagreement"], 1e-12),
              "admin with epsilon 0 matches the metrics baseline")
        r = cli.run(["--jobs", "2", "admin", "--graph", graph, "--opinions", opinions, "--epsilon", "0.1,0.4",
                     "--rounds", "3", "--jsonl", "trace.jsonl"], tmp)
        lines = (tmp / "trace.jsonl").read_text().splitlines()
        check(r.returncode == 0 and len(lines) > 0, "admin writes JSON lines")
        for i, line in enumerate(lines):
            validate(validators, "admin_record.schema.json", json.loads(line), f"admin record {i}")
        serial = cli.run(["admin", "--graph", graph, "--opinions", opinions, "--epsilon", "0.1,0.4",
                          "--rounds", "3"], tmp)
        check(serial.stdout == r.stdout, "admin output does not depend on --jobs")

        # attack
        r1 = json.loads(cli.run(["attack", "--graph", graph, "--opinions", opinions, "--k", "1",
                                 "--algorithm", "greedy"], tmp).stdout)
        b1 = json.loads(cli.run(["attack", "--graph", graph, "--opinions", opinions, "--k", "1",
                                 "--algorithm", "brute_force"], tmp).stdout)
        check(r1["plans"][0]["objective"] == b1["plans"][0]["objective"], "attack k = 1 greedy equals brute force")
        r = cli.run(["attack", "--graph", graph, "--opinions", opinions, "--k", "2", "--algorithm", "all",
                     "--objective", "disagreement", "--curve", "curve.csv"], tmp)
        doc = json.loads(r.stdout)
        validate(validators, "attack_report.schema.json", doc, "attack all")
        check(all(p["bounds"]["polarization_slack"] >= 0 and p["bounds"]["disagreement_slack"] >= 0
                  for p in doc["plans"]), "attack bounds hold for every plan")
        curve = csv_rows((tmp / "curve.csv").read_text())
        per_alg = {}
        for row in curve:
            per_alg.setdefault(row["algorithm"], []).append(int(row["k"]))
        check(len(per_alg) == 5 and all(ks == [0, 1, 2] for ks in per_alg.values()),
              "attack curve has one row per k per algorithm")
        r = cli.run(["attack", "--graph", graph, "--opinions", opinions, "--k", "12", "--algorithm", "brute_force"], tmp)
        check(r.returncode == 3, "attack brute force beyond the guard exits 3")
        r = cli.run(["attack", "--graph", graph, "--opinions", opinions, "--k", "99"], tmp)
        check(r.returncode == 3, "attack with k > n exits 3")

        # optimize
        r = cli.run(["optimize", "shift", "--graph", graph, "--opinions", opinions, "--alpha", "0"], tmp)
        doc = json.loads(r.stdout)
        validate(validators, "optimize_report.schema.json", doc, "optimize shift")
        check(all(d == 0 for d in doc["shift"]) and close(doc["objective"], doc["initial_objective"]),
              "optimize shift with alpha 0 leaves opinions unchanged")
        r = cli.run(["optimize", "shift", "--graph", graph, "--opinions", opinions, "--alpha", "100"], tmp)
        check(json.loads(r.stdout)["objective"] <= 1e-9, "optimize shift with alpha >= sum(s) reaches PDI 0")
        r = cli.run(["optimize", "acr", "--graph", graph, "--k", "0.5"], tmp)
        check(r.returncode == 3, "optimize acr exits 3 when k cannot reach the [0, 1] box")
        r = cli.run(["optimize", "acr", "--graph", graph, "--k", "0", "--graph-out", "acr.edges"], tmp)
        doc = json.loads(r.stdout)
        validate(validators, "optimize_report.schema.json", doc, "optimize acr")
        check(doc["objective"] == doc["initial_objective"] and (tmp / "acr.edges").read_text() == (tmp / "g.edges").read_text(),
              "optimize acr with k 0 leaves the graph unchanged")
        r = cli.run(["optimize", "pdi-laplacian", "--opinions", opinions, "--m", "20"], tmp)
        doc = json.loads(r.stdout)
        validate(validators, "optimize_report.schema.json", doc, "optimize pdi-laplacian")
        check(doc["objective"] <= doc["initial_objective"], "optimize pdi-laplacian improves on the start")

        # exit codes
        check(cli.run(["simulate", "--graph", "missing.edges", "--opinions", k2s], tmp).returncode == 2,
              "missing file exits 2")
        (tmp / "bad.edges").write_text("n=2\n0,1,x\n")
        check(cli.run(["metrics", "--graph", "bad.edges", "--opinions", k2s], tmp).returncode == 2,
              "malformed edge list exits 2")
        check(cli.run(["metrics", "--graph", graph, "--opinions", k2s], tmp).returncode == 3,
              "opinion count mismatch exits 3")
        check(cli.run(["metrics", "--no-such-flag"], tmp).returncode == 2, "unknown flag exits 2")
        check(cli.run(["simulate", "--graph", graph, "--opinions", opinions, "--trajectory", "t.csv",
                       "--max-iter", "1"], tmp).returncode == 4, "unconverged trajectory exits 4")

        # byte-identical reruns, manifests included
        commands = [
            ["--seed", "5", "generate", "--model", "power-law", "--n", "40", "--opinions", "power-law",
             "--opinions-out", "o.csv"],
            ["simulate", "--graph", graph, "--opinions", opinions, "--trajectory", "t.csv"],
            ["metrics", "--graph", graph, "--opinions", opinions, "--route", "from_s"],
            ["demo-echo"],
            ["--jobs", "2", "admin", "--graph", graph, "--opinions", opinions, "--epsilon", "0.2,0.5",
             "--rounds", "4", "--jsonl", "a.jsonl"],
            ["attack", "--graph", graph, "--opinions", opinions, "--k", "2", "--algorithm", "all", "--curve", "c.csv"],
            ["optimize", "pdi-laplacian", "--opinions", opinions, "--m", "10", "--graph-out", "p.edges"],
            ["optimize", "acr", "--graph", unit, "--k", "3", "--graph-out", "q.edges"],
            ["optimize", "shift", "--graph", graph, "--opinions", opinions, "--alpha", "2"],
        ]
        for cmd in commands:
            outputs = []
            for rep in range(2):
                d = tmp / f"rerun{rep}"
                d.mkdir(exist_ok=True)
                for f in d.iterdir():
                    f.unlink()
                res = cli.run([*cmd, "--out", "out.txt"], d)
                files = {f.name: f.read_bytes() for f in sorted(d.iterdir())}
                outputs.append((res.returncode, files))
            name = next(c for c in cmd if not c.startswith("-") and not c.isdigit())
            same = outputs[0] == outputs[1] and outputs[0][0] == 0
            check(same, f"{' '.join(cmd[:4])} ... reruns byte-identically")
            if "out.txt.manifest.json" not in outputs[0][1]:
                check(False, f"{name} writes a manifest")
                continue
            manifest = json.loads(outputs[0][1]["out.txt.manifest.json"])
            validate(validators, "manifest.schema.json", manifest, f"{name} manifest")

    print(f"{len(FAILURES)} failure(s)")
    return 1 if FAILURES else 0


if __name__ == "__main__":
    sys.exit(main())
