import io
import json

from booktri.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, run
from booktri.graph import complete_bipartite, complete_graph, construct_s_bn, write_graph6


def call(capsys, argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def docs(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_construct(capsys):
    code, out, _ = call(capsys, ["construct", "--s-bn", "12", "2"])
    assert code == EXIT_OK and out.strip() == write_graph6(construct_s_bn(12, 2))
    code, out, _ = call(capsys, ["construct", "--blowup", "2,2,2,2,2,2"])
    assert out.strip() == write_graph6(construct_s_bn(12, 2))
    code, out, _ = call(capsys, ["construct", "--bipartite", "6"])
    assert out.strip() == write_graph6(complete_bipartite(3, 3))
    code, _, err = call(capsys, ["construct", "--s-bn", "12", "1"])
    assert code == EXIT_USAGE and "usage" in err


def test_usage_errors(capsys):
    assert call(capsys, ["frobnicate"])[0] == EXIT_USAGE
    assert call(capsys, [])[0] == EXIT_USAGE
    assert call(capsys, ["exhaustive", "--n", "9"])[0] == EXIT_USAGE
    assert call(capsys, ["exhaustive", "--n", "5", "--check", "foo"])[0] == EXIT_USAGE
    assert call(capsys, ["verify-blowups", "--n", "12..10"])[0] == EXIT_USAGE
    assert call(capsys, ["anneal", "--n", "12", "--b", "3", "--iters", "10"])[0] == EXIT_USAGE
    assert call(capsys, ["adjust-trace", "--a", "1,2,3", "--b", "1"])[0] == EXIT_USAGE
    assert call(capsys, ["invariants", "--workers", "0"])[0] == EXIT_USAGE


def test_invariants_stdin_and_file_agree(capsys, monkeypatch, tmp_path):
    lines = "\n".join(write_graph6(g) for g in (complete_graph(4), construct_s_bn(12, 2))) + "\n"
    f = tmp_path / "in.g6"
    f.write_text(lines)
    _, piped, _ = call(capsys, ["invariants"], stdin=lines, monkeypatch=monkeypatch)
    _, filed, _ = call(capsys, ["invariants", str(f)])
    assert piped == filed
    reps = docs(piped)
    assert [(r["e"], r["t"], r["b"]) for r in reps] == [(6, 4, 2), (36, 16, 2)]
    assert reps[0]["config"]["subcommand"] == "invariants"
    assert reps[0]["config"]["parameters"]["seed"] == 20240601


def test_malformed_graph6_is_usage_error(capsys, monkeypatch):
    code, _, err = call(capsys, ["invariants"], stdin="C~~\n", monkeypatch=monkeypatch)
    assert code == EXIT_USAGE and "error" in err


def test_check_bn(capsys, monkeypatch):
    code, out, _ = call(capsys, ["check-bn"], stdin=write_graph6(complete_graph(4)) + "\n",
                        monkeypatch=monkeypatch)
    d = docs(out)[0]
    assert code == EXIT_OK and (d["lhs"], d["rhs"], d["holds"]) == (24, 24, True)
    code, out, _ = call(capsys, ["check-bn", "--random", "200", "--random-n", "8..20", "--seed", "3"])
    d = docs(out)[0]
    assert code == EXIT_OK and d["count"] == 200 and d["violations"] == 0


def test_verify_blowups_range(capsys):
    code, out, _ = call(capsys, ["verify-blowups", "--n", "12..16"])
    ds = docs(out)
    assert code == EXIT_OK and len(ds) == 5
    assert all(d["conjecture_holds_in_class"] and d["minimizers_are_extremal_orbit"] for d in ds)
    code, out, _ = call(capsys, ["verify-blowups", "--n", "24", "--b", "4"])
    assert docs(out)[0]["min_t"] == 128
    assert call(capsys, ["verify-blowups", "--n", "24", "--b", "6"])[0] == EXIT_USAGE


def test_adjust_trace(capsys):
    code, out, _ = call(capsys, ["adjust-trace", "--a", "5,4,3,5,4,3", "--b", "4"])
    d = docs(out)[0]
    assert code == EXIT_OK and d["terminal"] == [5, 5, 2, 5, 4, 3] and d["monotone"]
    code, out, _ = call(capsys, ["adjust-trace", "--a", "7,5,5,4,5,6", "--b", "4", "--full"])
    d = docs(out)[0]
    assert [s["label"] for s in d["steps"]][-2:] == ["equalize", "case2"]


def test_identity_suite(capsys):
    code, out, _ = call(capsys, ["identity-suite", "--trials", "200", "--monotone-trials", "200"])
    d = docs(out)[0]
    assert code == EXIT_OK
    assert d["identities"]["mismatch_count"] == 0 and d["monotonicity"]["failure_count"] == 0


def test_decompose_and_classify(capsys, monkeypatch, tmp_path):
    g6 = write_graph6(construct_s_bn(24, 4)) + "\n"
    code, out, _ = call(capsys, ["decompose"], stdin=g6, monkeypatch=monkeypatch)
    d = docs(out)[0]
    assert code == EXIT_OK and d["ok"] and d["exceptional"] == []
    assert d["config"]["stability"]["tau0"] == 0.05
    code, out, _ = call(capsys, ["classify", "--b", "4"], stdin=g6, monkeypatch=monkeypatch)
    d = docs(out)[0]
    assert code == EXIT_OK and d["certificate"]["F"] == 0 and d["certificate"]["H2"] == 0
    toml = tmp_path / "p.toml"
    toml.write_text("[stability]\nfallback = false\n")
    g6 = write_graph6(complete_bipartite(12, 12)) + "\n"
    code, out, _ = call(capsys, ["decompose", "--params", str(toml)], stdin=g6, monkeypatch=monkeypatch)
    d = docs(out)[0]
    assert code == EXIT_VIOLATION and d == {**d, "ok": False, "failed_step": "first_anchor"}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"tau0": 2}))
    code, _, _ = call(capsys, ["decompose", "--params", str(bad)], stdin=g6, monkeypatch=monkeypatch)
    assert code == EXIT_USAGE


def test_exhaustive_defaults(capsys):
    code, out, _ = call(capsys, ["exhaustive", "--n", "5", "--check", "rademacher,edwards"])
    d = docs(out)[0]
    assert code == EXIT_OK and d["edge_min"] == 7 and d["total_violations"] == 0
    code, out, _ = call(capsys, ["exhaustive", "--n", "5"])
    assert docs(out)[0]["checked"] == 1024


def test_anneal_output_file_and_determinism(capsys, tmp_path):
    argv = ["anneal", "--n", "12", "--b", "2", "--iters", "5000", "--restarts", "2", "--seed", "7"]
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    assert run(argv + ["-o", str(p1)]) == EXIT_OK
    assert run(argv + ["-o", str(p2), "--workers", "2"]) == EXIT_OK
    a, b = json.loads(p1.read_text()), json.loads(p2.read_text())
    assert a["config"]["parameters"].pop("workers") == 1
    b["config"]["parameters"].pop("workers")
    assert a == b
    assert a["note"].startswith("stochastic") and a["audit_mismatches"] == 0
