#!/usr/bin/env python3
"""End-to-end checks of the treesep command line on the corpus."""
import json
import os
import subprocess
import sys
import tempfile

BIN, CORPUS = sys.argv[1], sys.argv[2]
failures = []


def corpus(name):
    return os.path.join(CORPUS, name)


def run(*args):
    p = subprocess.run([BIN, *args], capture_output=True, text=True)
    return p.returncode, p.stdout.splitlines(), p.stderr


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


SCHEMA = json.load(open(sys.argv[3]))
try:
    import jsonschema
except ImportError:
    jsonschema = None


def schema_ok(doc):
    if jsonschema is None:
        # Fallback: required keys and the decision/separator consistency rule.
        return (set(doc) == set(SCHEMA["required"]) and
                (doc["separator"] is None or doc["decision"] == "SEPARABLE"))
    try:
        jsonschema.validate(doc, SCHEMA)
        return True
    except jsonschema.ValidationError as e:
        print(e.message)
        return False


with tempfile.TemporaryDirectory() as tmp:
    sep, report = os.path.join(tmp, "s.aut"), os.path.join(tmp, "r.json")
    all_a, some_b = corpus("all_a_safety.aut"), corpus("some_b.aut")

    rc, out, _ = run("decide", "--variant", "det-c", "--priorities", "0,1", "--a", all_a, "--b", some_b,
                     "--separator", sep, "--json", report)
    check(rc == 0 and out[0] == "SEPARABLE", "det-c {0,1} separates all-a from some-b")
    doc = json.load(open(report))
    check(schema_ok(doc), "decide report matches the schema")
    check(doc["verification"]["pass"] is True and doc["separator"] == sep, "report records the certified separator")
    rc, out, _ = run("verify", "--a", all_a, "--b", some_b, "--separator", sep)
    check(rc == 0 and out[0] == "PASS", "emitted separator passes verify")
    rc, out, _ = run("verify", "--a", all_a, "--b", some_b, "--separator", sep, "--variant", "det-c",
                     "--priorities", "0..1")
    check(rc == 0 and out[0] == "PASS", "emitted separator passes verify with its C")

    rc, out, _ = run("decide", "--variant", "det", "--a", some_b, "--b", all_a, "--json", report)
    check(rc == 0 and out[0] == "NOT_SEPARABLE", "det: some-b vs all-a is not separable")
    doc = json.load(open(report))
    check(schema_ok(doc) and doc["separator"] is None, "negative report has no separator")
    gsep = os.path.join(tmp, "g.aut")
    rc, out, _ = run("decide", "--variant", "game", "--a", some_b, "--b", all_a, "--separator", gsep)
    check(rc == 0 and out[0] == "SEPARABLE", "game: some-b vs all-a is separable")
    rc, out, _ = run("verify", "--a", some_b, "--b", all_a, "--separator", gsep)
    check(rc == 0 and out[0] == "PASS", "game separator passes verify")

    # Deterministic decision line across runs.
    lines = {tuple(run("decide", "--variant", "game-c", "--priorities", "1,2", "--a", some_b, "--b", all_a)[1])
             for _ in range(3)}
    check(len(lines) == 1, "decide output is deterministic")

    # A wrong separator: the universal automaton meets some-b.
    universal = os.path.join(tmp, "u.aut")
    with open(universal, "w") as f:
        f.write("tree det\nalphabet a b\nstates u TOP\ninitial u\npriorities u=0 TOP=0\n"
                "u a -> u u\nu b -> u u\nTOP a -> TOP TOP\nTOP b -> TOP TOP\n")
    cex = os.path.join(tmp, "cex.tree")
    rc, out, _ = run("verify", "--a", all_a, "--b", some_b, "--separator", universal, "--counterexample", cex)
    check(rc == 1 and out[0] == "FAIL" and any(cex in l for l in out), "verify fails with a counterexample path")
    rc, out, _ = run("member", "--automaton", some_b, "--tree", cex)
    check(rc == 0 and out == ["true"], "the counterexample lies in B")
    rc, out, _ = run("member", "--automaton", universal, "--tree", cex)
    check(rc == 0 and out == ["true"], "the counterexample lies in S")

    # Input errors exit 2 and never write a separator.
    bad = os.path.join(tmp, "bad.aut")
    with open(bad, "w") as f:
        f.write("tree nondet\nalphabet a b\nstates p\ninitial p\npriorities p=0\np c -> p p\n")
    out_sep = os.path.join(tmp, "never.aut")
    rc, _, err = run("decide", "--variant", "det", "--a", bad, "--b", some_b, "--separator", out_sep)
    check(rc == 2 and "line 6" in err and not os.path.exists(out_sep), "undeclared letter: exit 2 naming the line")
    rc, _, _ = run("decide", "--variant", "det-c", "--a", all_a, "--b", some_b)
    check(rc == 2, "det-c without --priorities is an input error")
    rc, _, _ = run("decide", "--variant", "game", "--priorities", "0,1", "--a", all_a, "--b", some_b)
    check(rc == 2, "--priorities is rejected for game")
    rc, _, _ = run("decide", "--variant", "game", "--universally-rejecting", "--a", all_a, "--b", some_b)
    check(rc == 2, "--universally-rejecting needs det-c")

    rc, out, _ = run("decide", "--variant", "det-c", "--priorities", "0,1", "--universally-rejecting",
                     "--a", all_a, "--b", corpus("root_b.aut"))
    check(rc == 0 and out[0] == "SEPARABLE", "universally rejecting separator for all-a vs root-b")

    rc, out, _ = run("member", "--automaton", all_a, "--tree", corpus("b_right.tree"))
    check(rc == 0 and out == ["false"], "b_right is not all-a")
    alla_tree = os.path.join(tmp, "alla.tree")
    with open(alla_tree, "w") as f:
        f.write("regtree\nalphabet a b\nstates n\ninitial n\nn a -> n n\n")
    rc, out, _ = run("member", "--automaton", all_a, "--tree", alla_tree)
    check(rc == 0 and out == ["true"], "the all-a tree is in the all-a automaton")

    wit = os.path.join(tmp, "w.tree")
    rc, out, _ = run("witness", "--a", some_b, "--out", wit)
    check(rc == 0 and out[0] == "NONEMPTY" and run("member", "--automaton", some_b, "--tree", wit)[1] == ["true"],
          "witness is accepted")

    dpa = os.path.join(tmp, "d.word")
    rc, _, _ = run("determinize", "--in", corpus("fin_a.word"), "--out", dpa)
    check(rc == 0 and open(dpa).readline().strip() == "word det", "determinize writes a deterministic automaton")

    wsep = os.path.join(tmp, "s.word")
    rc, out, _ = run("decide", "--variant", "word-det-c", "--priorities", "1,2", "--a", corpus("inf_a.word"),
                     "--b", corpus("fin_a.word"), "--separator", wsep)
    check(rc == 0 and out[0] == "SEPARABLE", "word-det-c {1,2} separates inf-a from fin-a")
    rc, out, _ = run("verify", "--a", corpus("inf_a.word"), "--b", corpus("fin_a.word"), "--separator", wsep)
    check(rc == 0 and out[0] == "PASS", "word separator passes verify")
    rc, out, _ = run("decide", "--variant", "word-det-c", "--priorities", "0,1", "--a", corpus("inf_a.word"),
                     "--b", corpus("fin_a.word"))
    check(rc == 0 and out[0] == "NOT_SEPARABLE", "word-det-c {0,1} does not separate inf-a from fin-a")

    pg = os.path.join(tmp, "g.pg")
    with open(pg, "w") as f:
        f.write("parity 2;\n0 1 0 1;\n1 2 1 0,2;\n2 1 1 2;\n")
    rc, out, _ = run("solve-game", "--in", pg)
    check(rc == 0 and out == ["paritysol 2;", "0 1;", "1 1 2;", "2 1 2;"], "solve-game prints the pgsolver solution")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
