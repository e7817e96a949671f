"""Configuration, seeded suite execution and reports."""
from __future__ import annotations

import configparser
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .crossed_module import make_fixture
from .errors import ConfigParseError, ConfigurationError
from .suites import SUITE_FUNCS, SUITES, Settings

ENV_VAR = "DERCROSS_CONFIG"
DEFAULT_FIXTURE = "CONJ(SO3)"
REPORT_FORMATS = ("text", "machine")
MACHINE_FIELDS = ("name", "fixture", "max_residual", "tol", "passed", "elapsed")


@dataclass(frozen=True)
class SuiteConfig:
    fixture: str = DEFAULT_FIXTURE
    samples: int = 50
    seed: int = 42
    fd_step: float = 1e-5
    tol_alg: float = 1e-9
    tol_fd: float = 1e-5
    suites: tuple = SUITES
    report: str = "text"
    negative_control: bool = False

    def validate(self):
        if self.samples < 1:
            raise ConfigurationError("samples must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        for key in ("fd_step", "tol_alg", "tol_fd"):
            v = getattr(self, key)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigurationError(f"{key} must be positive, got {v}")
        unknown = set(self.suites) - set(SUITES)
        if unknown or not self.suites:
            raise ConfigurationError(f"unknown suites {sorted(unknown)}; choose from {SUITES}")
        if self.report not in REPORT_FORMATS:
            raise ConfigurationError(f"report must be one of {REPORT_FORMATS}")
        make_fixture(self.fixture)
        return self


@dataclass(frozen=True)
class CheckResult:
    name: str
    fixture: str
    max_residual: float
    tolerance: float
    passed: bool
    elapsed: float = field(default=0.0, compare=False)


def _parse_value(key, raw):
    if key == "fixture":
        return raw
    if key in ("samples", "seed"):
        return int(raw, 0)
    if key in ("fd_step", "tol_alg", "tol_fd"):
        return float(raw)
    if key == "suites":
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        return SUITES if parts == ["all"] else tuple(parts)
    if key == "report":
        return raw.lower()
    raise KeyError(key)


def parse_config(source: str) -> SuiteConfig:
    """Parse the line-oriented config format; keys live under a [run] section."""
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#",),
                                       inline_comment_prefixes=("#",), delimiters=("=",),
                                       empty_lines_in_values=False, default_section="\0")
    parser.optionxform = str
    try:
        parser.read_string(source)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigParseError("key outside a [section]", exc.lineno) from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ConfigParseError("malformed line", line) from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigParseError(f"duplicate key {exc.option!r}", exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigParseError(f"duplicate section {exc.section!r}", exc.lineno) from None
    lines = source.splitlines()

    def lineno(section, key=None):
        for i, text in enumerate(lines, 1):
            s = text.strip()
            if key is None and s == f"[{section}]":
                return i
            if key is not None and s.split("=")[0].strip() == key:
                return i
        return None

    values = {}
    for section in parser.sections():
        if section != "run":
            raise ConfigParseError(f"unknown section [{section}]", lineno(section))
        for key, raw in parser.items(section):
            if key not in SuiteConfig.__dataclass_fields__ or key == "negative_control":
                raise ConfigParseError(f"unknown key {key!r}", lineno(section, key))
            try:
                values[key] = _parse_value(key, raw.strip())
            except ValueError:
                raise ConfigParseError(f"bad value {raw.strip()!r} for {key}",
                                       lineno(section, key)) from None
    return SuiteConfig(**values).validate()


def _run_one(args):
    suite, cfg = args
    settings = Settings(cfg.samples, cfg.seed, cfg.fd_step, cfg.tol_alg, cfg.tol_fd,
                        cfg.negative_control)
    fixture = make_fixture(cfg.fixture).name
    out = []
    start = time.perf_counter()
    rows = SUITE_FUNCS[suite](cfg.fixture, settings)
    per = (time.perf_counter() - start) / max(len(rows), 1)
    for name, res, tol in rows:
        res = float(res)
        out.append(CheckResult(name, fixture, res, float(tol),
                               bool(math.isfinite(res) and res <= tol) or res == tol == 0,
                               per))
    return out


def run_suite(cfg: SuiteConfig, workers=1):
    """Run the configured suites; returns (results, exit code)."""
    try:
        cfg.validate()
    except ConfigurationError:
        return [], 2
    jobs = [(s, cfg) for s in SUITES if s in cfg.suites]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_one, jobs))
    else:
        chunks = [_run_one(j) for j in jobs]
    results = sorted((r for c in chunks for r in c), key=lambda r: (r.name, r.fixture))
    return results, 0 if all(r.passed for r in results) else 1


def _order(results):
    return sorted(results, key=lambda r: (r.passed, r.name, r.fixture))


def emit_report(results, fmt="text", timing=False) -> str:
    results = list(results)
    failed = sum(not r.passed for r in results)
    if fmt == "text":
        lines = [f"# dercross report: {len(results)} checks, {failed} failed"]
        for r in _order(results):
            lines.append(f"CHECK {r.name} {r.fixture} max_residual={r.max_residual:.6g} "
                         f"tol={r.tolerance:g} {'PASS' if r.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"
    if fmt == "machine":
        lines = ["\t".join(MACHINE_FIELDS)]
        for r in _order(results):
            elapsed = f"{r.elapsed:.6f}" if timing else "-"
            lines.append("\t".join([r.name, r.fixture, repr(r.max_residual), repr(r.tolerance),
                                    "1" if r.passed else "0", elapsed]))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def with_overrides(cfg: SuiteConfig, **kw) -> SuiteConfig:
    kw = {k: v for k, v in kw.items() if v is not None}
    return replace(cfg, **kw).validate()
