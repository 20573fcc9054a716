"""Command-line front end.

A run is described by an INI document: one ``[run]`` section plus one
``[scheme NAME]`` section per system configuration::

    [run]
    mode = simulate
    snr_start = -10
    snr_stop = 10
    snr_step = 2

    [scheme rasm]
    scheme = RASM
    n_res = 8
    n_rx = 4
    order = 2

Run ``rasm --config run.ini`` (or ``python -m rasm.cli``).  The number of
numba threads can be capped with ``RASM_NUM_THREADS``.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import logging
import math
import re
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .analysis import union_bound_aber
from .baselines import RASM
from .errors import InvalidConfiguration
from .montecarlo import SystemConfig, run_ber

log = logging.getLogger("rasm")

MODES = ("simulate", "analyze", "compare")
MODELS = ("moment", "closed_form")
DEFAULT_TRIALS = 1_000_000
DEFAULT_SEED = 0
DEFAULT_NODES = 64

_RUN_KEYS = {"mode", "snr_start", "snr_stop", "snr_step", "trials", "seed",
             "quadrature_nodes", "output", "model", "pep_table"}
_SCHEME_KEYS = {"scheme", "n_res", "n_rx", "order", "modulation", "n_s", "gray",
                "table_seed", "es"}
_SCHEME_REQUIRED = ("n_res", "n_rx")
_SECTION_RE = re.compile(r"^scheme\s+([A-Za-z0-9_.+-]+)$")


class ConfigError(ValueError):
    """Invalid run configuration; the message carries the offending line."""


@dataclass(frozen=True)
class RunSpec:
    mode: str
    configs: tuple[SystemConfig, ...]
    snr_start: float
    snr_stop: float
    snr_step: float
    trials: int = DEFAULT_TRIALS
    output: str = "results"
    seed: int = DEFAULT_SEED
    quadrature_nodes: int = DEFAULT_NODES
    model: str = "moment"
    pep_table: bool = False
    source: str = field(default="<config>", compare=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if not self.configs:
            raise ConfigError("at least one [scheme NAME] section is required")
        if not self.snr_step > 0:
            raise ConfigError("snr_step must be > 0")
        if self.snr_start > self.snr_stop:
            raise ConfigError("snr_start must not exceed snr_stop")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 <= self.seed < 1 << 64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        if self.quadrature_nodes < 1:
            raise ConfigError("quadrature_nodes must be >= 1")
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {', '.join(MODELS)}")
        names = [c.label for c in self.configs]
        if len(set(names)) != len(names):
            raise ConfigError("scheme section names must be unique")

    @property
    def snr_grid(self) -> np.ndarray:
        n = int(math.floor((self.snr_stop - self.snr_start) / self.snr_step + 1e-9)) + 1
        grid = np.round(self.snr_start + self.snr_step * np.arange(n), 10)
        return grid + 0.0  # no negative zero

    def with_overrides(self, **kw) -> "RunSpec":
        kw = {k: v for k, v in kw.items() if v is not None}
        spec = replace(self, **kw)
        if "seed" in kw:
            spec = replace(spec, configs=tuple(replace(c, master_seed=kw["seed"])
                                               for c in spec.configs))
        return spec


def _key_lines(text):
    """Map (section, key) to the 1-based line it appears on."""
    lines, section = {}, None
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            lines[(section, None)] = no
        elif section is not None:
            key = re.split(r"[=:]", s, maxsplit=1)[0].strip().lower()
            lines.setdefault((section, key), no)
    return lines


class _Reader:
    def __init__(self, text, source):
        self.source = source
        self.lines = _key_lines(text)
        self.parser = configparser.ConfigParser(interpolation=None,
                                                inline_comment_prefixes=("#", ";"))
        try:
            self.parser.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(f"{source}: {exc}") from None

    def fail(self, section, key, message):
        no = self.lines.get((section, key)) or self.lines.get((section, None))
        where = f"{self.source}:{no}" if no else self.source
        what = f"[{section}] {key}" if key else f"[{section}]"
        raise ConfigError(f"{where}: {what}: {message}")

    def get(self, section, key, cast, default=None, required=False):
        sec = self.parser[section]
        if key not in sec or sec[key].strip() == "":
            if required:
                self.fail(section, None, f"missing required key {key!r}")
            return default
        raw = sec[key].strip()
        try:
            return cast(raw)
        except ValueError:
            self.fail(section, key, f"invalid value {raw!r}")

    def check_keys(self, section, allowed):
        for key in self.parser[section]:
            if key not in allowed:
                self.fail(section, key, f"unknown key {key!r}")


def _bool(raw):
    v = raw.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(raw)


def _int(raw):
    return int(raw.replace("_", ""), 0)


def parse_run_spec(text: str, source: str = "<config>") -> RunSpec:
    """Parse and validate a run configuration document."""
    rd = _Reader(text, source)
    if not rd.parser.has_section("run"):
        raise ConfigError(f"{source}: missing [run] section")
    for section in rd.parser.sections():
        if section != "run" and not _SECTION_RE.match(section):
            rd.fail(section, None, "unknown section; expected [run] or [scheme NAME]")
    rd.check_keys("run", _RUN_KEYS)

    mode = rd.get("run", "mode", str.lower, required=True)
    if mode not in MODES:
        rd.fail("run", "mode", f"must be one of {', '.join(MODES)}")
    seed = rd.get("run", "seed", _int, DEFAULT_SEED)
    if not 0 <= seed < 1 << 64:
        rd.fail("run", "seed", "must fit in an unsigned 64-bit integer")

    configs = []
    for section in rd.parser.sections():
        m = _SECTION_RE.match(section)
        if not m:
            continue
        rd.check_keys(section, _SCHEME_KEYS)
        for key in _SCHEME_REQUIRED:
            rd.get(section, key, str, required=True)
        kw = dict(
            name=m.group(1),
            scheme=rd.get(section, "scheme", str.upper, RASM),
            n_res=rd.get(section, "n_res", _int),
            n_rx=rd.get(section, "n_rx", _int),
            order=rd.get(section, "order", _int, 2),
            modulation=rd.get(section, "modulation", str.lower, "psk"),
            n_s=rd.get(section, "n_s", _int),
            gray=rd.get(section, "gray", _bool, False),
            table_seed=rd.get(section, "table_seed", _int),
            es=rd.get(section, "es", float, 1.0),
            master_seed=seed,
        )
        try:
            configs.append(SystemConfig(**kw))
        except InvalidConfiguration as exc:
            rd.fail(section, None, str(exc))
        if kw["modulation"] not in ("psk", "qam"):
            rd.fail(section, "modulation", "must be psk or qam")

    try:
        return RunSpec(
            mode=mode,
            configs=tuple(configs),
            snr_start=rd.get("run", "snr_start", float, required=True),
            snr_stop=rd.get("run", "snr_stop", float, required=True),
            snr_step=rd.get("run", "snr_step", float, required=True),
            trials=rd.get("run", "trials", _int, DEFAULT_TRIALS),
            output=rd.get("run", "output", str, "results"),
            seed=seed,
            quadrature_nodes=rd.get("run", "quadrature_nodes", _int, DEFAULT_NODES),
            model=rd.get("run", "model", str.lower, "moment"),
            pep_table=rd.get("run", "pep_table", _bool, False),
            source=source,
        )
    except ConfigError as exc:
        raise ConfigError(f"{source}: [run]: {exc}") from None


def fmt(x) -> str:
    """Locale-independent number formatting (shortest round-trip repr)."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x) + 0.0)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    log.info("wrote %s", path)


def _progress(config, point):
    log.info("%s  %6.2f dB  ber=%.4g", config.label, point.snr_db, point.ber)


def _simulate(spec: RunSpec, out: Path):
    curves = []
    for cfg in spec.configs:
        curve = run_ber(cfg, spec.snr_grid, spec.trials, progress=_progress)
        _write_csv(out / f"{cfg.label}_ber.csv", ("snr_db", "ber", "ci95", "trials"),
                   [(p.snr_db, p.ber, p.ci95, p.trials) for p in curve.points])
        curves.append(curve)
    return curves


def _analyze(spec: RunSpec, out: Path):
    for cfg in spec.configs:
        if cfg.scheme != RASM:
            raise InvalidConfiguration(f"{cfg.label}: the union bound covers RASM only")
    for cfg in spec.configs:
        table, symbols = cfg.tables()
        res = union_bound_aber(cfg.n_res, table, symbols, cfg.constellation().points,
                               spec.snr_grid, model=spec.model,
                               nodes=spec.quadrature_nodes, es=cfg.es,
                               keep_pairs=spec.pep_table)
        _write_csv(out / f"{cfg.label}_aber.csv", ("snr_db", "aber_bound"),
                   zip(res.snr_db, res.aber))
        if spec.pep_table:
            header = ["r", "k", "r_hat", "k_hat", "case", "weight"]
            header += [f"pep@{fmt(s)}" for s in res.snr_db]
            _write_csv(out / f"{cfg.label}_pep.csv", header,
                       [[e.r, e.k, e.r_hat, e.k_hat, e.case, e.weight, *e.pep]
                        for e in res.pairs])


def _compare(spec: RunSpec, out: Path):
    curves = [run_ber(cfg, spec.snr_grid, spec.trials, progress=_progress)
              for cfg in spec.configs]
    labels = [c.config.label for c in curves]
    _write_csv(out / "compare.csv", ["snr_db", *labels],
               [(s, *[c.points[i].ber for c in curves])
                for i, s in enumerate(spec.snr_grid)])
    _write_csv(out / "compare_bpcu.csv", labels, [[c.bpcu for c in curves]])


def run(spec: RunSpec) -> int:
    """Execute a run; returns 0 on success.  Errors propagate as exceptions."""
    out = Path(spec.output)
    out.mkdir(parents=True, exist_ok=True)
    {"simulate": _simulate, "analyze": _analyze, "compare": _compare}[spec.mode](spec, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rasm", description=__doc__.split("\n")[0])
    p.add_argument("--config", required=True, help="INI run configuration")
    p.add_argument("--mode", choices=MODES, help="override [run] mode")
    p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    p.add_argument("--trials", type=int, help="Monte Carlo trials per SNR point")
    p.add_argument("--out", help="output directory")
    p.add_argument("--quadrature-nodes", type=int, help="Gauss-Legendre nodes")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        text = Path(args.config).read_text(encoding="utf-8")
        spec = parse_run_spec(text, source=args.config).with_overrides(
            mode=args.mode, seed=args.seed, trials=args.trials, output=args.out,
            quadrature_nodes=args.quadrature_nodes)
        return run(spec)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"rasm: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
