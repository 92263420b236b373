import json
import os

import pytest

from mgcm.graded_poly import InputError
from mgcm.theorem_harness import AggregateReport, CheckRecord, VerificationReport
from mgcm.cli_io import (
    Diagnostic,
    RunFlags,
    SessionDiagnostics,
    build_session,
    cache_directory,
    cache_fetch,
    cache_store,
    _cache_path,
    emit_report,
    execute_session,
    load_manifest,
    main,
    parse_session,
    print_session,
    run_corpus_files,
    shipped_manifest_path,
)

SMALL = """\
ring A = poly(char=default; a,b : deg=(0), weight=1);
ideal I = (a, b);
module N = free(A);
rees R = rees(N; I);
verify lem41 R;
"""


# ---------------------------------------------------------------------------
# parsing


def test_parse_ring_declaration():
    s = parse_session("ring A = poly(char=0; a,b : deg=(0), weight=1);")
    decl = s.declarations[0]
    assert decl.name == "A" and decl.char == 0
    assert decl.groups[0].names == ("a", "b")
    assert decl.groups[0].mdeg == (0,) and decl.groups[0].weight == 1


def test_parse_pipeline():
    text = """\
ring A = poly(char=default; a,b : deg=(0,0), weight=1);
ideal I1 = (a);
ideal I2 = (b);
module N = free(A);
multirees M = rees(N; I1, I2);
verify thm42 M;
"""
    s = parse_session(text)
    assert [t.theorem for t in s.directives] == ["thm42"]
    assert s.declarations[-1].ideals == ("I1", "I2")


def test_parse_empty_generator_diagnostic():
    with pytest.raises(SessionDiagnostics) as ei:
        parse_session("ideal I = (a, );")
    d = ei.value.diagnostics[0]
    assert d.message == "empty generator at line 1"
    assert d.line == 1


def test_parse_collects_all_diagnostics():
    text = """\
ring A = poly(char=default; a,b : deg=(0), weight=1);
ideal I = (a, z);
module N = free(B);
verify thm99 N;
"""
    with pytest.raises(SessionDiagnostics) as ei:
        parse_session(text)
    msgs = [d.message for d in ei.value.diagnostics]
    assert "unknown identifier 'z' in ring 'A'" in msgs
    assert "'B' is not a declared ring" in msgs
    assert "unknown verification id 'thm99'" in msgs
    lines = [d.line for d in ei.value.diagnostics]
    assert lines == [2, 3, 4]


def test_parse_duplicate_name():
    text = """\
ring A = poly(char=default; a : deg=(0), weight=1);
ideal A = (a);
"""
    with pytest.raises(SessionDiagnostics) as ei:
        parse_session(text)
    assert "duplicate name 'A'" in str(ei.value)


def test_parse_missing_semicolon():
    with pytest.raises(SessionDiagnostics) as ei:
        parse_session("ring A = poly(char=0; a : deg=(0), weight=1)")
    assert "terminating ';'" in str(ei.value)


def test_parse_verify_target_kind_mismatch():
    text = SMALL + "verify thm31 R;\n"
    with pytest.raises(SessionDiagnostics) as ei:
        parse_session(text)
    assert "expects a module target" in str(ei.value)


def test_parse_rees_arity():
    text = """\
ring A = poly(char=default; a,b : deg=(0,0), weight=1);
ideal I = (a);
ideal J = (b);
module N = free(A);
rees R = rees(N; I, J);
"""
    with pytest.raises(SessionDiagnostics) as ei:
        parse_session(text)
    assert "exactly one ideal" in str(ei.value)


def test_parse_comments_and_blanks():
    s = parse_session("# header\n\n" + SMALL + "# trailing\n")
    assert len(s.declarations) == 4


# ---------------------------------------------------------------------------
# round trip


def test_round_trip_small():
    s = parse_session(SMALL)
    assert parse_session(print_session(s)) == s


def test_round_trip_shipped_corpus():
    manifest = shipped_manifest_path()
    items = load_manifest(manifest)
    assert len(items) >= 14
    for path, _expected in items:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        s = parse_session(text)
        assert parse_session(print_session(s)) == s, path


# ---------------------------------------------------------------------------
# building and execution


def test_build_char_resolution():
    s = parse_session("ring A = poly(char=default; a : deg=(0), weight=1);")
    assert build_session(s)["A"][1].field.char == 32003
    assert build_session(s, char=101)["A"][1].field.char == 101
    s0 = parse_session("ring A = poly(char=0; a : deg=(0), weight=1);")
    assert build_session(s0, char=101)["A"][1].field.char == 0


def test_execute_session_runs_directives():
    agg = execute_session(parse_session(SMALL), RunFlags(), "t")
    assert [r.verdict for r in agg.entries] == ["holds"]
    assert agg.entries[0].instance == "t:1:lem41:R"
    assert agg.exit_code() == 0


def test_execute_session_only_filter():
    text = SMALL + "verify thm42 R;\n"
    agg = execute_session(parse_session(text), RunFlags(), "t", only=("thm42", None))
    assert [r.theorem for r in agg.entries] == ["thm42"]
    agg = execute_session(parse_session(text), RunFlags(), "t", only=("lem44", "R"))
    assert [r.theorem for r in agg.entries] == ["lem44"]
    with pytest.raises(InputError):
        execute_session(parse_session(text), RunFlags(), "t", only=("lem44", None))


def test_execute_check_and_table():
    text = """\
ring S = poly(char=default; x0,x1 : deg=(1), weight=1);
module M = quotient(S; x0*x1);
check M;
table M i=0..1 window=(-2)..(2);
"""
    agg = execute_session(parse_session(text), RunFlags(), "t")
    assert [r.theorem for r in agg.entries] == ["check", "table"]
    check = agg.entries[0]
    facts = {c.check: c.value for c in check.checks}
    assert facts["dim"] == "1" and facts["cm"] == "True"
    table = agg.entries[1]
    cells = {(c.i, c.degree): c.value for c in table.checks}
    # two points: constant sections in high twists
    assert cells[(0, (2,))] == "2"
    assert cells[(1, (2,))] == "0"


# ---------------------------------------------------------------------------
# report emission


def test_emit_empty_aggregate_frame():
    empty = AggregateReport((), 0, 0, 0, 0)
    assert emit_report(empty, "json") == b'{"entries":[],"summary":{"pass":0,"fail":0}}'


def test_emit_deterministic():
    agg = execute_session(parse_session(SMALL), RunFlags(), "t")
    assert emit_report(agg, "json") == emit_report(agg, "json")
    assert emit_report(agg, "csv") == emit_report(agg, "csv")


def test_emit_csv_shape():
    rep = VerificationReport(
        "demo", "inst", (), None, True, "holds", ((-1, -1), (1, 1)), 7, (),
        (CheckRecord("cell", 2, (0, -3), "5", "5", "pass", "duality"),),
    )
    text = emit_report(rep, "csv").decode()
    lines = text.splitlines()
    assert lines[0] == "object,check,i,degree,value,expected,verdict,mode,window"
    assert lines[1] == "inst,cell,2,(0|-3),5,5,pass,duality,(-1|-1)..(1|1)"
    assert lines[2].startswith("inst,verdict,,,holds")


def test_emit_unknown_format():
    with pytest.raises(InputError):
        emit_report(AggregateReport((), 0, 0, 0, 0), "yaml")


# ---------------------------------------------------------------------------
# cache


def test_cache_roundtrip(tmp_path):
    d = str(tmp_path)
    assert cache_fetch(d, "key1") is None
    cache_store(d, "key1", {"x": 1})
    assert cache_fetch(d, "key1") == {"x": 1}


def test_cache_collision_is_miss(tmp_path):
    d = str(tmp_path)
    cache_store(d, "key1", {"x": 1})
    path = _cache_path(d, "key1")
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    data["key"] = "other-material"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh)
    assert cache_fetch(d, "key1") is None


def test_cache_corrupt_file_is_miss(tmp_path):
    d = str(tmp_path)
    cache_store(d, "key1", {"x": 1})
    with open(_cache_path(d, "key1"), "w", encoding="utf-8") as fh:
        fh.write("not json")
    assert cache_fetch(d, "key1") is None


def test_cache_directory_env(monkeypatch, tmp_path):
    monkeypatch.setenv("MGCM_CACHE_DIR", str(tmp_path))
    assert cache_directory(None) == str(tmp_path)
    assert cache_directory("/explicit") == "/explicit"
    monkeypatch.delenv("MGCM_CACHE_DIR")
    assert cache_directory(None) == ".mgcm-cache"


# ---------------------------------------------------------------------------
# command line


def test_main_parse_ok(tmp_path, capsys):
    f = tmp_path / "ok.mgcm"
    f.write_text(SMALL)
    assert main(["parse", str(f)]) == 0
    assert "ok" in capsys.readouterr().out


def test_main_parse_diagnostics(tmp_path, capsys):
    f = tmp_path / "bad.mgcm"
    f.write_text("ideal I = (a, );\n")
    assert main(["parse", str(f)]) == 2
    out = capsys.readouterr().out
    assert "empty generator at line 1" in out
    assert str(f) in out


def test_main_run(tmp_path, capsys):
    f = tmp_path / "s.mgcm"
    f.write_text(SMALL)
    assert main(["run", str(f)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["summary"] == {"pass": 1, "fail": 0}
    assert data["entries"][0]["verdict"] == "holds"


def test_main_run_malformed(tmp_path, capsys):
    f = tmp_path / "bad.mgcm"
    f.write_text("nonsense;\n")
    assert main(["run", str(f)]) == 2


def test_main_verify_synthesizes_target(tmp_path, capsys):
    f = tmp_path / "s.mgcm"
    f.write_text(SMALL)
    assert main(["verify", "thm42", str(f), "R"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["entries"][0]["theorem"] == "thm42"


def test_main_verify_missing_directive(tmp_path, capsys):
    f = tmp_path / "s.mgcm"
    f.write_text(SMALL)
    assert main(["verify", "thm42", str(f)]) == 2


def test_main_bad_window_flag(tmp_path, capsys):
    f = tmp_path / "s.mgcm"
    f.write_text(SMALL)
    assert main(["run", str(f), "--window", "oops"]) == 2


def test_corpus_files_expected_mismatch(tmp_path):
    f = tmp_path / "s.mgcm"
    f.write_text(SMALL)
    report, code = run_corpus_files([(str(f), "holds")], RunFlags(), None)
    assert code == 0 and report["summary"] == {"pass": 1, "fail": 0}
    report, code = run_corpus_files([(str(f), "violated")], RunFlags(), None)
    assert code == 1 and report["summary"] == {"pass": 0, "fail": 1}


def test_corpus_files_malformed_entry(tmp_path):
    f = tmp_path / "bad.mgcm"
    f.write_text("ideal I = (a, );\n")
    report, code = run_corpus_files([(str(f), "input-error")], RunFlags(), None)
    assert code == 0 and report["entries"][0]["ok"]
    report, code = run_corpus_files([(str(f), "holds")], RunFlags(), None)
    assert code == 2


def test_corpus_cache_byte_identity(tmp_path):
    f = tmp_path / "s.mgcm"
    f.write_text(SMALL)
    cache = str(tmp_path / "cache")
    items = [(str(f), "holds")]
    cold, code1 = run_corpus_files(items, RunFlags(), cache)
    warm, code2 = run_corpus_files(items, RunFlags(), cache)
    assert code1 == code2 == 0
    assert emit_report(cold, "json") == emit_report(warm, "json")
    assert os.listdir(cache)


def test_main_corpus_with_manifest(tmp_path, capsys):
    f = tmp_path / "s.mgcm"
    f.write_text(SMALL)
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps([{"path": "s.mgcm", "expected": "holds"}]))
    code = main(["corpus", "--manifest", str(manifest), "--cache-dir", str(tmp_path / "c")])
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["summary"] == {"pass": 1, "fail": 0}


def test_diagnostic_render():
    d = Diagnostic(3, 7, "boom")
    assert d.render() == "3:7: boom"
    assert d.render("f.mgcm") == "f.mgcm:3:7: boom"
