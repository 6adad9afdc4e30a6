"""Scenario configuration: INI-style sections, schema version 1.

Every recognised key is listed in ``SCHEMA`` with its type and default;
unknown keys are rejected so that typos surface as config errors.
"""

from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .errors import ConfigError

SCHEMA_VERSION = 1

BATH_KINDS = ("ladder", "transmission_line", "ohmic", "table")
THERMO_KINDS = ("line", "volume", "table")


def _floats(text: str) -> tuple:
    parts = [p for p in text.replace(",", " ").split() if p]
    if not parts:
        raise ValueError("empty list")
    return tuple(float(p) for p in parts)


def _int(text: str) -> int:
    v = float(text)
    if not v.is_integer():
        raise ValueError("expected an integer")
    return int(v)


def _opt_int(text: str) -> Optional[int]:
    return None if text.strip().lower() in ("", "auto", "none") else _int(text)


def _opt_float(text: str) -> Optional[float]:
    return None if text.strip().lower() in ("", "none") else float(text)


def _str(text: str) -> str:
    return text.strip()


# (section, key) -> (parser, default); a default of None means "unset"
SCHEMA: dict[tuple[str, str], tuple[Any, Any]] = {
    ("decomc", "version"): (_int, SCHEMA_VERSION),
    ("bath", "kind"): (_str, None),
    ("bath", "omega0"): (float, None),
    ("bath", "n_modes"): (_int, None),
    ("bath", "coupling"): (_str, "uniform"),
    ("bath", "mode_amplitude"): (float, 1.0),
    ("bath", "eta"): (float, None),
    ("bath", "deta_dT"): (float, 0.0),
    ("bath", "length"): (float, None),
    ("bath", "speed"): (float, None),
    ("bath", "volume"): (float, None),
    ("bath", "thermo"): (_str, None),
    ("bath", "logz_table"): (_str, None),
    ("bath", "spectral_table"): (_str, None),
    ("drive", "amplitude"): (float, 1.0),
    ("drive", "omega_r"): (float, math.inf),
    ("drive", "t"): (_floats, None),
    ("drive", "t_start"): (float, None),
    ("drive", "t_stop"): (float, None),
    ("drive", "t_num"): (_int, None),
    ("ensemble", "kind"): (_str, None),
    ("ensemble", "beta"): (float, None),
    ("ensemble", "energy"): (float, None),
    ("ensemble", "quanta"): (_int, None),
    ("ensemble", "n_eff"): (float, None),
    ("numerics", "rtol"): (float, 1e-8),
    ("numerics", "micro_method"): (_str, "auto"),
    ("numerics", "ohmic_q"): (_str, "closed"),
    ("numerics", "contour_mode"): (_str, "auto"),
    ("numerics", "contour_half_width"): (float, 12.0),
    ("numerics", "contour_points"): (_int, 2048),
    ("numerics", "contour_window"): (_opt_float, None),
    ("numerics", "fock_n_max"): (_opt_int, None),
    ("numerics", "shell_max"): (_int, 60),
    ("numerics", "oracle_tol"): (float, 1e-8),
    ("output", "path"): (_str, "-"),
    ("output", "format"): (_str, "csv"),
    ("sweep", "command"): (_str, "compare"),
    ("sweep", "parameter"): (_str, None),
    ("sweep", "values"): (_floats, None),
}

_CHOICES = {
    ("bath", "kind"): BATH_KINDS,
    ("bath", "coupling"): ("uniform", "ohmic"),
    ("bath", "thermo"): THERMO_KINDS,
    ("ensemble", "kind"): ("canonical", "microcanonical"),
    ("numerics", "micro_method"): ("auto", "contour", "saddle", "ohmic"),
    ("numerics", "ohmic_q"): ("closed", "exact", "quadrature"),
    ("numerics", "contour_mode"): ("auto", "period", "line"),
    ("output", "format"): ("csv",),
    ("sweep", "command"): ("thermal", "micro", "compare", "oracle"),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario. ``values`` maps ``"section.key"`` to parsed values."""

    values: dict = field(repr=False)
    base_dir: Path = Path(".")

    def __getitem__(self, dotted: str):
        return self.values[dotted]

    def get(self, dotted: str, default=None):
        v = self.values.get(dotted)
        return default if v is None else v

    @property
    def t_grid(self) -> np.ndarray:
        return np.asarray(self.values["drive.t"], dtype=float)

    def canonical_text(self) -> str:
        """Stable serialisation used for hashing; unset keys are omitted.

        The output path is left out: where results go does not change them.
        """
        lines = []
        for (sec, key), _ in SCHEMA.items():
            if (sec, key) == ("output", "path"):
                continue
            v = self.values.get(f"{sec}.{key}")
            if v is not None:
                lines.append(f"{sec}.{key}={_fmt(v)}")
        return "\n".join(lines) + "\n"

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()

    def with_override(self, dotted: str, value: str) -> "ScenarioConfig":
        raw = {k: _fmt(v) for k, v in self.values.items() if v is not None}
        raw[dotted] = value
        if dotted in ("drive.t_start", "drive.t_stop", "drive.t_num"):
            raw.pop("drive.t", None)
        return _validate(raw, self.base_dir)

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def parse_overrides(items) -> dict[str, str]:
    """``["section.key=value", ...]`` -> ``{"section.key": "value"}``."""
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or "." not in key:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        out[key.strip()] = value.strip()
    return out


def load_config(
    path: Optional[str] = None, text: Optional[str] = None, overrides: Optional[dict] = None
) -> ScenarioConfig:
    """Read a config file (or string), apply ``section.key`` overrides and validate."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keep key case (deta_dT)
    base = Path(".")
    try:
        if path is not None:
            p = Path(path)
            if not p.is_file():
                raise ConfigError(f"config file {path} not found")
            parser.read_string(p.read_text(), source=str(p))
            base = p.resolve().parent
        elif text is not None:
            parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    raw = {f"{s}.{k}": v for s in parser.sections() for k, v in parser.items(s)}
    raw.update(overrides or {})
    return _validate(raw, base)


def _validate(raw: dict, base: Path) -> ScenarioConfig:
    values: dict[str, Any] = {}
    for dotted, text in raw.items():
        sec, _, key = dotted.partition(".")
        if (sec, key) not in SCHEMA:
            raise ConfigError(f"unknown config key {dotted!r}")
        conv, _ = SCHEMA[(sec, key)]
        try:
            values[dotted] = conv(text)
        except ValueError as exc:
            raise ConfigError(f"bad value for {dotted}: {text!r} ({exc})") from None
        choices = _CHOICES.get((sec, key))
        if choices and values[dotted] not in choices:
            raise ConfigError(f"{dotted} must be one of {', '.join(choices)}")
    for (sec, key), (_, default) in SCHEMA.items():
        values.setdefault(f"{sec}.{key}", default)

    def need(*keys):
        for k in keys:
            if values.get(k) is None:
                raise ConfigError(f"missing required key {k}")

    def positive(*keys):
        for k in keys:
            v = values.get(k)
            if v is not None and not v > 0:
                raise ConfigError(f"{k} must be positive")

    if values["decomc.version"] != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {values['decomc.version']}")

    kind = values["bath.kind"]
    need("bath.kind")
    if kind == "ladder":
        need("bath.omega0", "bath.n_modes")
        if values["bath.coupling"] == "ohmic":
            need("bath.eta")
    elif kind == "transmission_line":
        need("bath.length", "bath.speed", "bath.n_modes")
    elif kind == "ohmic":
        need("bath.eta")
    elif kind == "table":
        need("bath.spectral_table")
    if values["bath.n_modes"] is not None and values["bath.n_modes"] < 1:
        raise ConfigError("bath.n_modes must be >= 1")
    positive("bath.omega0", "bath.length", "bath.speed", "bath.volume", "drive.omega_r")
    if values["bath.eta"] is not None and values["bath.eta"] < 0:
        raise ConfigError("bath.eta must be >= 0")
    thermo = values["bath.thermo"]
    if thermo == "line":
        need("bath.length", "bath.speed")
    elif thermo == "volume":
        need("bath.volume", "bath.speed")
    elif thermo == "table":
        need("bath.logz_table")
    if kind in ("ladder", "transmission_line") and thermo is not None:
        raise ConfigError("bath.thermo applies only to ohmic and table baths")

    # drive grid: an explicit list or a linspace
    if values["drive.t"] is None:
        need("drive.t_start", "drive.t_stop", "drive.t_num")
        if values["drive.t_num"] < 1:
            raise ConfigError("drive.t_num must be >= 1")
        values["drive.t"] = tuple(
            float(x)
            for x in np.linspace(values["drive.t_start"], values["drive.t_stop"], values["drive.t_num"])
        )
    t = np.asarray(values["drive.t"])
    if t.size == 0 or np.any(t < 0) or np.any(np.diff(t) <= 0) or not np.all(np.isfinite(t)):
        raise ConfigError("drive.t must be non-empty, finite, >= 0 and increasing")

    ens = values["ensemble.kind"]
    need("ensemble.kind")
    given = [k for k in ("beta", "energy", "quanta", "n_eff") if values[f"ensemble.{k}"] is not None]
    if ens == "canonical" and given != ["beta"]:
        raise ConfigError("canonical ensemble takes exactly ensemble.beta")
    if ens == "microcanonical" and (len(given) != 1 or given == ["beta"]):
        raise ConfigError("microcanonical ensemble takes one of energy, quanta, n_eff")
    positive("ensemble.beta", "ensemble.energy", "ensemble.n_eff")
    if values["ensemble.quanta"] is not None and values["ensemble.quanta"] < 0:
        raise ConfigError("ensemble.quanta must be >= 0")

    rtol = values["numerics.rtol"]
    if not 0 < rtol <= 1e-2:
        raise ConfigError("numerics.rtol must lie in (0, 1e-2]")
    positive("numerics.contour_half_width", "numerics.contour_points", "numerics.oracle_tol")
    if values["numerics.shell_max"] < 0:
        raise ConfigError("numerics.shell_max must be >= 0")

    if values["sweep.parameter"] is not None:
        need("sweep.values")
        if values["sweep.parameter"].split(".")[0] == "sweep":
            raise ConfigError("cannot sweep a sweep key")
        sec, _, key = values["sweep.parameter"].partition(".")
        if (sec, key) not in SCHEMA:
            raise ConfigError(f"unknown sweep parameter {values['sweep.parameter']!r}")
    return ScenarioConfig(values, base)
