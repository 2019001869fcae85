#!/usr/bin/env python3
"""End-to-end checks of the coex binary: report, metrics corpus, serve, export."""

import json
import os
import re
import subprocess
import sys
import tempfile
import urllib.error
import urllib.request
from pathlib import Path

import jsonschema

EXE = sys.argv[1]
SRC = Path(sys.argv[2])
DOCS = SRC / "docs"
failures = []


def check(cond, what):
    if not cond:
        failures.append(what)
        print("FAIL", what)


def run(*args, ok=True):
    p = subprocess.run([EXE, *args], capture_output=True, text=True, timeout=60)
    if ok and p.returncode != 0:
        raise RuntimeError(f"{args} exited {p.returncode}: {p.stderr}")
    return p


def schema(name):
    s = json.loads((DOCS / name).read_text())
    return jsonschema.Draft202012Validator(s)


def request(base, method, path, body=None, etag=None):
    data = None if body is None else json.dumps(body).encode()
    req = urllib.request.Request(base + path, data=data, method=method)
    req.add_header("Content-Type", "application/json")
    if etag:
        req.add_header("If-Match", etag)
    try:
        with urllib.request.urlopen(req, timeout=10) as r:
            raw = r.read()
            return r.status, r.headers.get("ETag"), json.loads(raw) if raw else None
    except urllib.error.HTTPError as e:
        return e.code, None, json.loads(e.read())


def test_report(tmp):
    empty = tmp / "empty"
    empty.mkdir()
    out = json.loads(run("report", "--data-dir", str(empty)).stdout)
    check(out["total"]["generated"] == 0 and out["events"] == 0, "report on empty store")
    p = run("report", "--log", str(tmp / "missing.ndjson"), ok=False)
    check(p.returncode != 0, "report on a missing log exits nonzero")
    p = run("report", ok=False)
    check(p.returncode != 0, "report without a source exits nonzero")


def test_metrics(tmp):
    for label in ("a", "b"):
        d = tmp / label
        d.mkdir()
        (d / "1.txt").write_text("The loop adds each value to the sum. It prints the result.")
        (d / "2.txt").write_text("The variable stores the total.")
    out = json.loads(run("metrics", "corpus", "--dir", f"a={tmp / 'a'}", "--dir", f"b={tmp / 'b'}").stdout)
    check(len(out["lexical"]) == 2, "metrics lexical rows")
    rows = out["similarity"]
    check(len(rows) == 2, "metrics similarity rows")
    # scores average over every document pair, so identical groups are symmetric, not 1
    check(abs(rows[0]["chrf"] - rows[1]["chrf"]) < 1e-12, "similarity symmetric for identical groups")
    one = tmp / "one"
    one.mkdir()
    (one / "x.txt").write_text("Adds one to the counter.")
    out = json.loads(run("metrics", "corpus", "--dir", f"p={one}", "--dir", f"q={one}").stdout)
    check(all(abs(r["chrf"] - 1.0) < 1e-12 for r in out["similarity"]), "chrF 1.0 for identical single documents")
    csv = run("metrics", "corpus", "--dir", f"p={one}", "--dir", f"q={one}", "--format", "csv").stdout
    check(csv.count("\n\n") == 1, "csv has two tables")
    p = run("metrics", "corpus", "--dir", "nolabel", ok=False)
    check(p.returncode != 0, "bad --dir exits nonzero")


def test_serve_and_export(tmp):
    data = tmp / "store"
    proc = subprocess.Popen([EXE, "serve", "--data-dir", str(data), "--port", "0", "--provider", "mock"],
                            stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True)
    try:
        line = proc.stdout.readline()
        m = re.search(r"http://([\d.]+):(\d+)", line)
        check(m is not None, f"serve prints its address (got {line!r})")
        if not m:
            return
        base = f"http://{m.group(1)}:{m.group(2)}"
        source = "public class A {\n  public static void main(String[] args) {\n    int x = 2;\n    x *= 3;\n    System.out.println(x);\n  }\n}"
        st, etag, ex = request(base, "POST", "/api/examples",
                               {"title": "Triple", "problem": "Multiply.", "language": "java", "source": source})
        check(st == 201, "create returns 201")
        st, setag, s = request(base, "POST", f"/api/examples/{ex['id']}/sessions")
        check(st == 201, "session created")
        st, setag, s = request(base, "POST", f"/api/sessions/{s['id']}/generate", {}, setag)
        check(st == 200 and s["batch"]["candidates"] > 0, "generate with mock provider")
        first = s["batch"]["lines"][0]
        st, setag, s = request(base, "PUT", f"/api/sessions/{s['id']}/lines/{first['line']}/fragments/0/include",
                               {"included": False}, setag)
        st, setag, s = request(base, "POST", f"/api/sessions/{s['id']}/lines/{first['line']}/fragments/1/like",
                               None, setag)
        st, _, out = request(base, "POST", f"/api/sessions/{s['id']}/apply", None, setag)
        check(st == 200 and out["result"]["excluded"] == 1 and out["result"]["liked"] == 1, "apply honours marks")
        st, _, err = request(base, "POST", f"/api/sessions/{s['id']}/apply", None, '"1"')
        check(st == 409 and err["error"]["code"] == "conflict", "stale apply is a conflict")
        st, _, err = request(base, "GET", "/api/examples/nope")
        check(st == 404, "unknown example is 404")
        st, _, doc = request(base, "GET", f"/api/examples/{ex['id']}/export")
        check(st == 200, "http export")
        errors = list(schema("portable.schema.json").iter_errors(doc))
        check(not errors, f"http export matches portable schema {errors[:1]}")
    finally:
        proc.terminate()
        proc.wait(timeout=10)
    check(proc.returncode == 0, "serve exits cleanly on SIGTERM")

    portable = json.loads(run("export", "--data-dir", str(data), "--id", ex["id"]).stdout)
    check(portable == doc, "cli export equals http export")
    pcex = json.loads(run("export", "--data-dir", str(data), "--id", ex["id"], "--format", "pcex").stdout)
    errors = list(schema("pcex.schema.json").iter_errors(pcex))
    check(not errors, f"pcex export matches schema {errors[:1]}")
    check(pcex["lines"][0]["default_explanation"] == first["fragments"][1]["text"], "pcex default is the kept fragment")
    p = run("export", "--data-dir", str(data), "--id", "ex-missing", ok=False)
    check(p.returncode != 0, "export of a missing id exits nonzero")
    p = run("export", "--data-dir", str(data), "--id", "../etc", ok=False)
    check(p.returncode != 0, "export rejects unsafe ids")

    stored = schema("portable.schema.json")
    for f in sorted((data / "examples").glob("*.json")):
        errors = list(stored.iter_errors(json.loads(f.read_text())))
        check(not errors, f"stored {f.name} matches portable schema {errors[:1]}")
    events = schema("event.schema.json")
    lines = (data / "events.ndjson").read_text().splitlines()
    kinds = [json.loads(l)["kind"] for l in lines]
    expected = ["example_created", "dialog_opened", "generated", "fragment_excluded",
                "fragment_liked", "explanations_used", "exported"]
    check(kinds == expected, f"event kinds in order (got {kinds})")
    for i, line in enumerate(lines):
        errors = list(events.iter_errors(json.loads(line)))
        check(not errors, f"event {i + 1} matches schema {errors[:1]}")
    report = json.loads(run("report", "--data-dir", str(data)).stdout)
    check(report["total"]["sessions_applied"] == 1 and report["total"]["excluded"] == 1, "report over served store")
    text = run("report", "--log", str(data / "events.ndjson"), "--format", "text").stdout
    check("excluded" in text.lower(), "text report")


def main():
    with tempfile.TemporaryDirectory(prefix="coex-cli-") as t:
        tmp = Path(t)
        for name, fn in [("report", test_report), ("metrics", test_metrics), ("serve", test_serve_and_export)]:
            sub = tmp / name
            sub.mkdir()
            try:
                fn(sub)
            except Exception as e:  # noqa: BLE001
                failures.append(f"{name}: {e}")
                print("FAIL", name, e)
    config = json.loads((DOCS / "config.example.json").read_text())
    check("model" in config, "config example readable")
    if failures:
        print(f"{len(failures)} failure(s)")
        return 1
    print("all cli checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
