"""INI run configuration: [equation], [run], [tolerances], [output].

Any key in [equation] other than f and g is a named parameter of the
expressions.  Values given on the command line override the file.
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field, fields

from .dsl import ExprError, ExprSyntaxError, NonlinearitySpec

SECTIONS = ("equation", "run", "tolerances", "output")
MODES = ("simulate", "simulate-n", "classify", "verify", "design-breather", "catalog")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass
class EquationConfig:
    f: str = ""
    g: str = ""
    params: dict = field(default_factory=dict)

    def spec(self) -> NonlinearitySpec:
        return NonlinearitySpec.from_text(self.f, self.g, self.params)


@dataclass
class RunSection:
    mode: str = "simulate"
    t0: float = 0.0
    horizon: float = 10.0        # final time; below t0 runs backward
    sample_dt: float = 0.01
    A: float = 1.0
    X: float = 0.0
    a: list = field(default_factory=list)
    x: list = field(default_factory=list)
    oscillatory: bool = False
    direction: str = "forward"   # classify: forward | backward | both


@dataclass
class Tolerances:
    quad_tol: float = 1e-10
    ode_tol: float = 1e-10
    eps_ext: float = 1e-9
    eps_eq: float = 1e-12
    A_max: float = 1e8
    gap_min: float = 1e-9
    slope_tol: float = 0.1


@dataclass
class OutputSection:
    csv_path: str = ""
    report_path: str = ""


@dataclass
class RunConfig:
    equation: EquationConfig = field(default_factory=EquationConfig)
    run: RunSection = field(default_factory=RunSection)
    tolerances: Tolerances = field(default_factory=Tolerances)
    output: OutputSection = field(default_factory=OutputSection)
    lines: dict = field(default_factory=dict, repr=False)

    def validate(self, need_equation: bool = True):
        if need_equation:
            for name in ("f", "g"):
                if not getattr(self.equation, name):
                    raise ConfigError(f"[equation] is missing required field '{name}'",
                                      self.lines.get(("equation", None)))
            try:
                self.equation.spec()
            except ExprSyntaxError as exc:
                key = "f" if _fails(self.equation.f) else "g"
                raise ConfigError(f"[equation] {key}: {exc}", self.lines.get(("equation", key))) from exc
            except ExprError as exc:
                raise ConfigError(f"[equation] {exc}", self.lines.get(("equation", None))) from exc
        if self.run.mode not in MODES:
            raise ConfigError(f"[run] mode must be one of {', '.join(MODES)}", self.lines.get(("run", "mode")))
        if self.run.direction not in ("forward", "backward", "both"):
            raise ConfigError("[run] direction must be forward, backward or both",
                              self.lines.get(("run", "direction")))
        for f_ in fields(Tolerances):
            if not getattr(self.tolerances, f_.name) > 0:
                raise ConfigError(f"[tolerances] {f_.name} must be positive",
                                  self.lines.get(("tolerances", f_.name)))
        if not self.run.sample_dt > 0:
            raise ConfigError("[run] sample_dt must be positive", self.lines.get(("run", "sample_dt")))
        if len(self.run.a) != len(self.run.x):
            raise ConfigError("[run] a and x must have the same length", self.lines.get(("run", "a")))
        return self


def _fails(text):
    try:
        NonlinearitySpec.from_text(text or "0", "0", {})
    except ExprSyntaxError:
        return True
    except ExprError:
        return False
    return False


def _line_map(text: str) -> dict:
    lines, section = {}, None
    for no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        m = re.match(r"\[([^\]]+)\]", stripped)
        if m:
            section = m.group(1).strip()
            lines[(section, None)] = no
            continue
        m = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", stripped)
        if m and section is not None:
            lines[(section, m.group(1).strip())] = no
    return lines


def _number(value, where, line):
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"cannot parse {value!r} as a number for {where}", line) from None


def _vector(value, where, line):
    parts = [p for p in re.split(r"[,\s]+", value.strip()) if p]
    return [_number(p, where, line) for p in parts]


def _bool(value, where, line):
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse {value!r} as a boolean for {where}", line)


def parse_config(text: str) -> RunConfig:
    """Parse configuration text; errors carry the offending line number."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], getattr(exc, "lineno", None)) from None
    lines = _line_map(text)
    cfg = RunConfig(lines=lines)
    unknown = [s for s in parser.sections() if s not in SECTIONS]
    if unknown:
        raise ConfigError(f"unknown section [{unknown[0]}]", lines.get((unknown[0], None)))

    if parser.has_section("equation"):
        for key, value in parser.items("equation"):
            line = lines.get(("equation", key))
            if key in ("f", "g"):
                setattr(cfg.equation, key, value.strip().strip('"'))
            else:
                cfg.equation.params[key] = _number(value, f"parameter {key}", line)

    typed = {
        "run": (cfg.run, {"mode": str, "direction": str, "a": list, "x": list, "oscillatory": bool}),
        "tolerances": (cfg.tolerances, {}),
        "output": (cfg.output, {"csv_path": str, "report_path": str}),
    }
    for section, (target, kinds) in typed.items():
        if not parser.has_section(section):
            continue
        known = {f_.name for f_ in fields(target)}
        for key, value in parser.items(section):
            line = lines.get((section, key))
            if key not in known:
                raise ConfigError(f"unknown field '{key}' in [{section}]", line)
            kind = kinds.get(key, float)
            where = f"[{section}] {key}"
            if kind is str:
                setattr(target, key, value.strip().strip('"'))
            elif kind is list:
                setattr(target, key, _vector(value, where, line))
            elif kind is bool:
                setattr(target, key, _bool(value, where, line))
            else:
                setattr(target, key, _number(value, where, line))
    return cfg


def load_config(path: str, overrides: dict | None = None, need_equation: bool = True) -> RunConfig:
    """Read ``path``, apply ``overrides`` (section.key -> value), and validate."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    cfg = parse_config(text)
    apply_overrides(cfg, overrides or {})
    return cfg.validate(need_equation)


def apply_overrides(cfg: RunConfig, overrides: dict) -> RunConfig:
    for dotted, value in overrides.items():
        if value is None:
            continue
        section, key = dotted.split(".", 1)
        if section == "equation" and key == "params":
            cfg.equation.params.update(value)
        else:
            setattr(getattr(cfg, section), key, value)
    return cfg
