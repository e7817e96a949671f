import re

import pytest

from dercross import CheckResult, SuiteConfig, emit_report, parse_config, run_suite
from dercross.cli import main
from dercross.errors import ConfigParseError, ConfigurationError
from dercross.harness import with_overrides
from dercross.suites import SUITES

QUICK = SuiteConfig(samples=4, suites=("axioms", "gauge", "identities"))


# --- configuration -----------------------------------------------------------------
def test_empty_config_gives_defaults():
    cfg = parse_config("")
    assert cfg == SuiteConfig()
    assert (cfg.samples, cfg.seed, cfg.fd_step, cfg.tol_alg, cfg.tol_fd) == \
        (50, 42, 1e-5, 1e-9, 1e-5)
    assert cfg.suites == SUITES and cfg.fixture == "CONJ(SO3)" and cfg.report == "text"


def test_single_key():
    cfg = parse_config("[run]\nseed = 7\n")
    assert cfg.seed == 7
    assert cfg == SuiteConfig(seed=7)


def test_full_config_with_comments():
    src = """# a comment
[run]
fixture = LIN(2)   # inline comment
samples = 12
fd_step = 2e-5
suites = axioms, bundle
report = MACHINE
"""
    cfg = parse_config(src)
    assert cfg.fixture == "LIN(2)" and cfg.samples == 12 and cfg.fd_step == 2e-5
    assert cfg.suites == ("axioms", "bundle") and cfg.report == "machine"
    assert parse_config("[run]\nsuites = all\n").suites == SUITES


@pytest.mark.parametrize("src", ["[run]\ntol_fd = -1\n", "[run]\nsamples = 0\n",
                                 "[run]\nfixture = FOO\n", "[run]\nsuites = nope\n",
                                 "[run]\nseed = -3\n", "[run]\nreport = pdf\n",
                                 "[run]\ntol_alg = nan\n"])
def test_validation_errors(src):
    with pytest.raises(ConfigurationError):
        parse_config(src)


def test_malformed_line_reports_line_number():
    with pytest.raises(ConfigParseError) as info:
        parse_config("[run]\nseed = 7\nthis line is junk\n")
    assert info.value.line == 3
    assert "line 3" in str(info.value)


def test_unknown_key_and_section():
    with pytest.raises(ConfigParseError) as info:
        parse_config("[run]\nseed = 1\ncolour = red\n")
    assert info.value.line == 3 and "colour" in str(info.value)
    with pytest.raises(ConfigParseError):
        parse_config("[other]\nseed = 1\n")
    with pytest.raises(ConfigParseError):
        parse_config("seed = 1\n")
    with pytest.raises(ConfigParseError):
        parse_config("[run]\nseed = x\n")
    with pytest.raises(ConfigParseError):
        parse_config("[run]\nseed = 1\nseed = 2\n")


def test_overrides():
    cfg = with_overrides(SuiteConfig(), seed=3, samples=None)
    assert cfg.seed == 3 and cfg.samples == 50
    with pytest.raises(ConfigurationError):
        with_overrides(SuiteConfig(), fixture="FOO")


# --- reports -------------------------------------------------------------------------
def test_empty_report_is_header_only():
    assert emit_report([], "text") == "# dercross report: 0 checks, 0 failed\n"
    assert emit_report([], "machine") == "name\tfixture\tmax_residual\ttol\tpassed\telapsed\n"


def test_single_pass_line():
    r = CheckResult("axioms.group.peiffer", "CONJ(SO3)", 1.234567e-13, 1e-9, True)
    line = emit_report([r]).splitlines()[1]
    assert line == "CHECK axioms.group.peiffer CONJ(SO3) max_residual=1.23457e-13 tol=1e-09 PASS"
    assert re.fullmatch(r"CHECK \S+ \S+ max_residual=\S+ tol=\S+ (PASS|FAIL)", line)


def test_failures_sorted_first():
    rs = [CheckResult("b", "F", 0.0, 1.0, True), CheckResult("c", "F", 2.0, 1.0, False),
          CheckResult("a", "F", 0.0, 1.0, True), CheckResult("d", "F", 3.0, 1.0, False)]
    lines = emit_report(rs).splitlines()
    assert lines[0] == "# dercross report: 4 checks, 2 failed"
    assert [l.split()[1] for l in lines[1:]] == ["c", "d", "a", "b"]
    assert lines[1].endswith("FAIL") and lines[3].endswith("PASS")


def test_machine_record_fields():
    r = CheckResult("x.y", "LIN(3)", 0.1, 1e-5, False, elapsed=0.25)
    rec = emit_report([r], "machine").splitlines()[1].split("\t")
    assert rec == ["x.y", "LIN(3)", "0.1", "1e-05", "0", "-"]
    rec = emit_report([r], "machine", timing=True).splitlines()[1].split("\t")
    assert rec[-1] == "0.250000"
    with pytest.raises(ValueError):
        emit_report([r], "xml")


def test_passed_matches_tolerance():
    results, _ = run_suite(QUICK)
    assert results
    for r in results:
        assert r.passed == (r.max_residual <= r.tolerance)


# --- running ---------------------------------------------------------------------------
def test_run_suite_exit_codes():
    results, code = run_suite(QUICK)
    assert code == 0 and all(r.passed for r in results)
    _, code = run_suite(with_overrides(QUICK, negative_control=True))
    assert code == 1
    bad = SuiteConfig(fixture="FOO")
    assert run_suite(bad) == ([], 2)


def test_run_is_deterministic_across_workers():
    cfg = with_overrides(QUICK, report="machine")
    one = emit_report(run_suite(cfg)[0], "machine")
    again = emit_report(run_suite(cfg)[0], "machine")
    par = emit_report(run_suite(cfg, workers=3)[0], "machine")
    assert one == again == par


def test_seed_changes_results():
    a = run_suite(with_overrides(QUICK, suites=("identities",)))[0]
    b = run_suite(with_overrides(QUICK, suites=("identities",), seed=43))[0]
    assert [r.max_residual for r in a] != [r.max_residual for r in b]


# --- command line ----------------------------------------------------------------------
def test_cli_runs_and_writes(tmp_path, capsys):
    out = tmp_path / "report.txt"
    code = main(["run", "--samples", "3", "--suites", "axioms,gauge", "--output", str(out)])
    assert code == 0
    text = out.read_text()
    assert text.startswith("# dercross report:") and "FAIL" not in text


def test_cli_config_file_and_env(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[run]\nfixture = COVER\nsamples = 3\nsuites = gauge\nreport = machine\n")
    assert main(["run", "--config", str(cfg)]) == 0
    first = capsys.readouterr().out
    assert first.splitlines()[0].startswith("name\tfixture")
    assert "\tCOVER\t" in first
    monkeypatch.setenv("DERCROSS_CONFIG", str(cfg))
    assert main(["run"]) == 0
    assert capsys.readouterr().out == first
    assert main(["run", "--fixture", "LIN"]) == 0
    assert "\tLIN(3)\t" in capsys.readouterr().out


def test_cli_negative_control(capsys):
    code = main(["run", "--samples", "3", "--suites", "axioms", "--negative-control"])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_cli_configuration_errors(tmp_path, capsys):
    assert main(["run", "--fixture", "FOO"]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.ini")]) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[run]\nsamples = 3\nwhat\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert "line 3" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["run", "--report", "pdf"])
