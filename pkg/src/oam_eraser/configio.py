"""Declarative experiment configuration.

The format is a small line-based sections file::

    [source]
    kind = spdc
    l_max = 1

    [arm_a.element]
    type = qplate
    q = 0.5

    [analyzers]
    alpha_rad = 0.0

Repeated ``[arm_a.element]`` / ``[arm_b.element]`` sections build the
ordered element lists.  All angles are radians; unknown sections or keys
are rejected with the offending line; every default is written out by the
canonical emitter, so ``emit -> parse -> emit`` is byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import elements as el
from .experiment import CountingModel, ExperimentConfig, SourceSpec

TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    """Malformed configuration; carries the line/key that failed."""

    def __init__(self, message: str, line: int | None = None,
                 key: str | None = None):
        place = []
        if line is not None:
            place.append(f"line {line}")
        if key is not None:
            place.append(f"key '{key}'")
        suffix = f" ({', '.join(place)})" if place else ""
        super().__init__(message + suffix)
        self.line = line
        self.key = key


@dataclass(frozen=True)
class ScanSpec:
    """What to sweep: hologram angle, polarizer angle, or the full grid."""

    variable: str = "theta"
    theta_start: float = 0.0
    theta_stop: float = TWO_PI
    theta_points: int = 72
    alpha_start: float = 0.0
    alpha_stop: float = math.pi / 4
    alpha_points: int = 9

    def __post_init__(self):
        if self.variable not in ("theta", "alpha", "grid"):
            raise ValueError(f"unknown scan variable {self.variable!r}")
        if self.theta_points < 1 or self.alpha_points < 1:
            raise ValueError("scan needs at least one point")

    def thetas(self) -> np.ndarray:
        return np.linspace(self.theta_start, self.theta_stop, self.theta_points)

    def alphas(self) -> np.ndarray:
        return np.linspace(self.alpha_start, self.alpha_stop, self.alpha_points)


@dataclass(frozen=True)
class RunSpec:
    config: ExperimentConfig
    scan: ScanSpec


# ---------------------------------------------------------------------------
# schema tables: key -> (type tag, default); None default means required


_SOURCE_KEYS = {
    "kind": ("str", "spdc"),
    "l_max": ("int", 1),
    "spectrum": ("str", "flat"),
    "sigma_l": ("float", None),
}

_ANALYZER_KEYS = {
    "alpha_rad": ("float", 0.0),
    "extinction": ("float", 0.0),
    "hologram_l": ("int", 1),
    "hologram_mode": ("str", "ideal"),
    "hologram_theta_rad": ("float", 0.0),
}

_COUNTING_KEYS = {
    "pair_rate_hz": ("float", 1000.0),
    "integration_time_s": ("float", 5.0),
    "gate_s": ("float", 25e-9),
    "delay_m": ("float", 0.0),
    "singles_a_hz": ("float", 0.0),
    "singles_b_hz": ("float", 0.0),
    "seed": ("int", 0),
}

_SCAN_KEYS = {
    "variable": ("str", "theta"),
    "theta_start_rad": ("float", 0.0),
    "theta_stop_rad": ("float", TWO_PI),
    "theta_points": ("int", 72),
    "alpha_start_rad": ("float", 0.0),
    "alpha_stop_rad": ("float", math.pi / 4),
    "alpha_points": ("int", 9),
}

_ELEMENT_KEYS = {
    "qplate": {"q": ("float", None)},
    "waveplate": {"kind": ("str", None), "fast_axis_rad": ("float", None)},
    "polarizer": {"alpha_rad": ("float", None), "extinction": ("float", 0.0)},
    "fiber": {"accepted_l": ("int", 0)},
    "hologram": {"l": ("int", None), "theta_rad": ("float", 0.0),
                 "mode": ("str", "ideal")},
    "delay": {"extra_path_m": ("float", None)},
}


def _convert(raw: str, tag: str, line: int, key: str):
    try:
        if tag == "int":
            return int(raw)
        if tag == "float":
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"expected {tag} value, got {raw!r}", line, key) from None


class _Section:
    def __init__(self, name: str, line: int):
        self.name = name
        self.line = line
        self.values: dict = {}
        self.lines: dict = {}


def _tokenize(text: str):
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = _Section(line[1:-1].strip(), lineno)
            sections.append(current)
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno)
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if current is None:
            raise ConfigError("key outside any section", lineno, key)
        if key in current.values:
            raise ConfigError("duplicate key", lineno, key)
        current.values[key] = value
        current.lines[key] = lineno
    return sections


def _take(section: _Section | None, schema: dict, name: str) -> dict:
    out = {}
    if section is not None:
        for key in section.values:
            if key not in schema:
                raise ConfigError(f"unknown key in [{name}]",
                                  section.lines[key], key)
    for key, (tag, default) in schema.items():
        if section is not None and key in section.values:
            out[key] = _convert(section.values[key], tag,
                                section.lines[key], key)
        else:
            out[key] = default
    return out


def _build_element(section: _Section):
    if "type" not in section.values:
        raise ConfigError("element section needs a 'type' key", section.line)
    etype = section.values["type"]
    if etype not in _ELEMENT_KEYS:
        raise ConfigError(f"unknown element type {etype!r}",
                          section.lines["type"], "type")
    schema = _ELEMENT_KEYS[etype]
    body = _Section(section.name, section.line)
    body.values = {k: v for k, v in section.values.items() if k != "type"}
    body.lines = {k: v for k, v in section.lines.items() if k != "type"}
    vals = _take(body, schema, section.name)
    for key, (_, default) in schema.items():
        if vals[key] is None and default is None:
            raise ConfigError(f"element '{etype}' needs key '{key}'", section.line)
    arm = "A" if section.name == "arm_a.element" else "B"
    try:
        if etype == "qplate":
            return el.QPlateSpec(q=vals["q"], arm=arm)
        if etype == "waveplate":
            return el.WavePlateSpec(kind=vals["kind"],
                                    fast_axis=vals["fast_axis_rad"], arm=arm)
        if etype == "polarizer":
            return el.PolarizerSpec(alpha=vals["alpha_rad"],
                                    extinction=vals["extinction"], arm=arm)
        if etype == "fiber":
            return el.FiberSpec(arm=arm, accepted_ell=vals["accepted_l"])
        if etype == "hologram":
            return el.HologramSpec(ell=vals["l"], theta=vals["theta_rad"],
                                   mode=vals["mode"], arm=arm)
        return el.DelaySpec(extra_path=vals["extra_path_m"], arm=arm)
    except ValueError as exc:
        raise ConfigError(str(exc), section.line) from exc


def parse_config(text: str) -> RunSpec:
    """Parse and validate a configuration document."""
    sections = _tokenize(text)
    singles: dict = {}
    arm_a, arm_b = [], []
    for section in sections:
        if section.name == "arm_a.element":
            arm_a.append(_build_element(section))
        elif section.name == "arm_b.element":
            arm_b.append(_build_element(section))
        elif section.name in ("source", "analyzers", "counting", "scan"):
            if section.name in singles:
                raise ConfigError(f"duplicate section [{section.name}]",
                                  section.line)
            singles[section.name] = section
        else:
            raise ConfigError(f"unknown section [{section.name}]", section.line)

    src = _take(singles.get("source"), _SOURCE_KEYS, "source")
    ana = _take(singles.get("analyzers"), _ANALYZER_KEYS, "analyzers")
    cnt = _take(singles.get("counting"), _COUNTING_KEYS, "counting")
    scn = _take(singles.get("scan"), _SCAN_KEYS, "scan")

    def guard(build, section_name):
        section = singles.get(section_name)
        try:
            return build()
        except ValueError as exc:
            raise ConfigError(
                str(exc), section.line if section else None) from exc

    source = guard(lambda: SourceSpec(kind=src["kind"], l_max=src["l_max"],
                                      spectrum=src["spectrum"],
                                      sigma_ell=src["sigma_l"]), "source")
    counting = guard(lambda: CountingModel(
        pair_rate=cnt["pair_rate_hz"],
        integration_time=cnt["integration_time_s"],
        gate=cnt["gate_s"],
        singles_a=cnt["singles_a_hz"],
        singles_b=cnt["singles_b_hz"],
        seed=cnt["seed"]), "counting")
    analyzer_a = guard(lambda: el.PolarizerSpec(
        alpha=ana["alpha_rad"], extinction=ana["extinction"], arm="A"),
        "analyzers")
    analyzer_b = guard(lambda: el.HologramSpec(
        ell=ana["hologram_l"], theta=ana["hologram_theta_rad"],
        mode=ana["hologram_mode"], arm="B"), "analyzers")
    if cnt["delay_m"] > 0.0:
        arm_a.append(guard(lambda: el.DelaySpec(extra_path=cnt["delay_m"],
                                                arm="A"), "counting"))
    config = guard(lambda: ExperimentConfig(
        source=source, elements_a=tuple(arm_a), elements_b=tuple(arm_b),
        analyzer_a=analyzer_a, analyzer_b=analyzer_b, counting=counting),
        "counting")
    scan = guard(lambda: ScanSpec(
        variable=scn["variable"],
        theta_start=scn["theta_start_rad"],
        theta_stop=scn["theta_stop_rad"],
        theta_points=scn["theta_points"],
        alpha_start=scn["alpha_start_rad"],
        alpha_stop=scn["alpha_stop_rad"],
        alpha_points=scn["alpha_points"]), "scan")
    return RunSpec(config=config, scan=scan)


def parse_config_file(path) -> RunSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


# ---------------------------------------------------------------------------
# canonical emitter


def _num(value) -> str:
    if isinstance(value, bool):
        raise TypeError("no boolean config values")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _element_lines(spec) -> list:
    name = el.element_name(spec)
    lines = [f"type = {name}"]
    if isinstance(spec, el.QPlateSpec):
        lines.append(f"q = {_num(spec.q)}")
    elif isinstance(spec, el.WavePlateSpec):
        lines.append(f"kind = {spec.kind}")
        lines.append(f"fast_axis_rad = {_num(spec.fast_axis)}")
    elif isinstance(spec, el.PolarizerSpec):
        lines.append(f"alpha_rad = {_num(spec.alpha)}")
        lines.append(f"extinction = {_num(spec.extinction)}")
    elif isinstance(spec, el.FiberSpec):
        lines.append(f"accepted_l = {_num(spec.accepted_ell)}")
    elif isinstance(spec, el.HologramSpec):
        lines.append(f"l = {_num(spec.ell)}")
        lines.append(f"theta_rad = {_num(spec.theta)}")
        lines.append(f"mode = {spec.mode}")
    elif isinstance(spec, el.DelaySpec):
        lines.append(f"extra_path_m = {_num(spec.extra_path)}")
    return lines


def emit_config(run: RunSpec) -> str:
    """Canonical text form: fixed section/key order, defaults included."""
    cfg, scan = run.config, run.scan
    out = ["[source]",
           f"kind = {cfg.source.kind}",
           f"l_max = {_num(cfg.source.l_max)}",
           f"spectrum = {cfg.source.spectrum}"]
    if cfg.source.sigma_ell is not None:
        out.append(f"sigma_l = {_num(cfg.source.sigma_ell)}")
    delay_m = 0.0
    for arm_name, elems in (("arm_a", cfg.elements_a), ("arm_b", cfg.elements_b)):
        for spec in elems:
            if isinstance(spec, el.DelaySpec) and arm_name == "arm_a":
                delay_m = spec.extra_path  # emitted under [counting]
                continue
            out.append("")
            out.append(f"[{arm_name}.element]")
            out.extend(_element_lines(spec))
    out += ["",
            "[analyzers]",
            f"alpha_rad = {_num(cfg.analyzer_a.alpha)}",
            f"extinction = {_num(cfg.analyzer_a.extinction)}",
            f"hologram_l = {_num(cfg.analyzer_b.ell)}",
            f"hologram_mode = {cfg.analyzer_b.mode}",
            f"hologram_theta_rad = {_num(cfg.analyzer_b.theta)}"]
    cm = cfg.counting
    out += ["",
            "[counting]",
            f"pair_rate_hz = {_num(cm.pair_rate)}",
            f"integration_time_s = {_num(cm.integration_time)}",
            f"gate_s = {_num(cm.gate)}",
            f"delay_m = {_num(delay_m)}",
            f"singles_a_hz = {_num(cm.singles_a)}",
            f"singles_b_hz = {_num(cm.singles_b)}",
            f"seed = {_num(cm.seed)}"]
    out += ["",
            "[scan]",
            f"variable = {scan.variable}",
            f"theta_start_rad = {_num(scan.theta_start)}",
            f"theta_stop_rad = {_num(scan.theta_stop)}",
            f"theta_points = {_num(scan.theta_points)}",
            f"alpha_start_rad = {_num(scan.alpha_start)}",
            f"alpha_stop_rad = {_num(scan.alpha_stop)}",
            f"alpha_points = {_num(scan.alpha_points)}"]
    return "\n".join(out) + "\n"
