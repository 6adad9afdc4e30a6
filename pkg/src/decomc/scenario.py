"""Scenario runner: turn a validated config into result rows.

Each row is computed by the library operations alone. Failures inside a
row become NaN values plus a diagnostic; the sweep carries on.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import __version__
from .bath import (
    CurrentProfile,
    ModeSet,
    Ohmic,
    LineSpec,
    Tabulated,
    ladder_modes,
    ohmic_ladder,
    transmission_line_modes,
    uniform_coupling,
)
from .config import ScenarioConfig
from .errors import ConfigError, DecomcError
from .fock import ExactShell, coherence_exact_canonical, coherence_exact_microcanonical
from .microcanonical import (
    ContourSpec,
    MicroCoherence,
    coherence_contour,
    coherence_micro_saddle,
    coherence_ohmic,
    coherence_saddle_corrected,
)
from .thermal import canonical_exponent, q_beta_derivatives
from .thermo import (
    Line1D,
    TabulatedLogZ,
    Volume3D,
    beta_from_n_eff,
    solve_beta,
    thermo_derivatives,
)

COLUMNS = {
    "thermal": ("t", "Q_R", "Q_I", "C_thermal_abs", "method"),
    "micro": (
        "t", "Q_R", "Q_I", "C_thermal_abs", "C_micro_abs",
        "preexp_correction", "exponent_correction", "n_eff", "method",
    ),
    "compare": (
        "t", "Q_R", "Q_I", "C_thermal_abs", "C_micro_abs", "gap_abs",
        "preexp_correction", "exponent_correction", "n_eff", "method",
    ),
    "oracle": (
        "t", "C_contour_abs", "C_fock_micro_abs", "micro_err",
        "C_thermal_abs", "C_fock_canonical_abs", "canonical_err", "n_eff", "method",
    ),
}


@dataclass
class Bath:
    """Everything a row needs: ``ln Z`` source, ``Q`` source and ladder unit."""

    thermo: object
    q_source: object
    omega0: Optional[float] = None
    eta: Optional[float] = None
    deta_dT: float = 0.0


@dataclass
class ResultTable:
    command: str
    columns: tuple
    rows: list
    diagnostics: list = field(default_factory=list)
    oracle_failed: bool = False
    config_sha256: str = ""
    numerics: str = ""
    sweep_parameter: Optional[str] = None

    @property
    def failed(self) -> bool:
        return bool(self.diagnostics)


def _two_columns(path) -> tuple[np.ndarray, np.ndarray]:
    try:
        data = np.loadtxt(path, delimiter=None, comments="#", ndmin=2, converters=None)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read table {path}: {exc}") from None
    if data.shape[1] != 2:
        raise ConfigError(f"table {path} must have exactly two columns")
    return data[:, 0], data[:, 1]


def _read_table(cfg: ScenarioConfig, key: str):
    path = cfg.resolve(cfg[key])
    text = path.read_text() if path.is_file() else None
    if text is None:
        raise ConfigError(f"table {path} not found")
    return _two_columns([ln.replace(",", " ") for ln in text.splitlines()])


def build_bath(cfg: ScenarioConfig) -> Bath:
    """Construct the bath objects named by the ``[bath]`` section."""
    kind = cfg["bath.kind"]
    try:
        if kind == "ladder":
            w0, n = cfg["bath.omega0"], cfg["bath.n_modes"]
            if cfg["bath.coupling"] == "ohmic":
                modes = ohmic_ladder(w0, n, cfg["bath.eta"])
            else:
                modes = ladder_modes(w0, n, cfg["bath.mode_amplitude"])
            return Bath(modes, modes, omega0=w0)
        if kind == "transmission_line":
            spec = LineSpec(cfg["bath.length"], cfg["bath.speed"], cfg["bath.n_modes"])
            modes = transmission_line_modes(spec, uniform_coupling(cfg["bath.mode_amplitude"]))
            # odd multiples of the fundamental: shells sit on its integer multiples
            return Bath(modes, modes, omega0=float(modes.frequencies[0]))
        thermo = None
        th = cfg["bath.thermo"]
        if th == "line":
            thermo = Line1D(cfg["bath.length"], cfg["bath.speed"])
        elif th == "volume":
            thermo = Volume3D(cfg["bath.volume"], cfg["bath.speed"])
        elif th == "table":
            thermo = TabulatedLogZ(*_read_table(cfg, "bath.logz_table"))
        if kind == "ohmic":
            return Bath(thermo, Ohmic(cfg["bath.eta"]), eta=cfg["bath.eta"],
                        deta_dT=cfg["bath.deta_dT"])
        return Bath(thermo, Tabulated(*_read_table(cfg, "bath.spectral_table")))
    except ValueError as exc:
        raise ConfigError(f"invalid bath: {exc}") from None


def ensemble_point(cfg: ScenarioConfig, bath: Bath) -> tuple[Optional[float], float]:
    """``(E, beta)`` for the configured ensemble; E is None for canonical."""
    kind = cfg["ensemble.kind"]
    if kind == "canonical":
        return None, cfg["ensemble.beta"]
    if bath.thermo is None:
        raise ConfigError("microcanonical ensemble needs bath.thermo (line, volume or table)")
    if cfg["ensemble.quanta"] is not None:
        if bath.omega0 is None:
            raise ConfigError("ensemble.quanta needs a discrete commensurate bath")
        M = cfg["ensemble.quanta"]
        E = M * bath.omega0
        if M == 0:
            return 0.0, math.inf
    elif cfg["ensemble.energy"] is not None:
        E = cfg["ensemble.energy"]
    else:
        beta = beta_from_n_eff(bath.thermo, cfg["ensemble.n_eff"])
        return thermo_derivatives(bath.thermo, beta).energy, beta
    return E, solve_beta(bath.thermo, E, rtol=min(cfg["numerics.rtol"], 1e-10))


def micro_method(cfg: ScenarioConfig, bath: Bath) -> str:
    m = cfg["numerics.micro_method"]
    if m != "auto":
        return m
    if isinstance(bath.q_source, ModeSet):
        return "contour"
    if isinstance(bath.q_source, Ohmic):
        return "ohmic"
    return "saddle"


def contour_spec(cfg: ScenarioConfig, bath: Bath, E: float) -> ContourSpec:
    mode = cfg["numerics.contour_mode"]
    if mode == "auto":
        units = None if bath.omega0 is None else E / bath.omega0
        on_shell = units is not None and (
            E == 0 or (round(units) >= 1 and math.isclose(units, round(units), abs_tol=1e-9))
        )
        mode = "period" if on_shell else "line"
    return ContourSpec(
        half_width=cfg["numerics.contour_half_width"],
        n_points=cfg["numerics.contour_points"],
        mode=mode,
        omega0=bath.omega0,
        window=cfg["numerics.contour_window"],
        rtol=cfg["numerics.rtol"],
    )


def numerics_summary(cfg: ScenarioConfig) -> str:
    keys = [k for k in cfg.values if k.startswith("numerics.")]
    return " ".join(f"{k.split('.', 1)[1]}={cfg.values[k]}" for k in sorted(keys))


# --- rows ----------------------------------------------------------------


def _profile(cfg, t) -> CurrentProfile:
    return CurrentProfile(float(t), cfg["drive.omega_r"], cfg["drive.amplitude"])


def _thermal_row(cfg, bath, E, beta, t) -> dict:
    q = canonical_exponent(bath.q_source, _profile(cfg, t), beta, cfg["numerics.ohmic_q"])
    return {"t": t, "Q_R": q.q_r, "Q_I": q.q_i, "C_thermal_abs": abs(q.coherence),
            "method": q.provenance}


def _micro(cfg, bath, E, beta, t) -> MicroCoherence:
    profile = _profile(cfg, t)
    method = micro_method(cfg, bath)
    if E is None:
        raise ConfigError("microcanonical results need a microcanonical ensemble")
    if method == "contour":
        contour = contour_spec(cfg, bath, E)
        mc = coherence_contour(bath.thermo, profile, E, contour, bath.q_source)
        if E == 0:
            return mc
        # attach the saddle-expansion split of the same point for reference
        tp = thermo_derivatives(bath.thermo, beta)
        sc = coherence_saddle_corrected(*q_beta_derivatives(bath.q_source, profile, beta), tp)
        return MicroCoherence(mc.c, mc.q_thermal, sc.preexp_correction,
                              sc.exponent_correction, tp.n_eff, f"contour-{contour.mode}")
    if method == "saddle":
        return coherence_micro_saddle(bath.thermo, bath.q_source, profile, E)
    if method == "ohmic":
        if bath.eta is None:
            raise ConfigError("micro_method=ohmic needs an ohmic bath")
        return coherence_ohmic(bath.eta, bath.deta_dT, thermo_derivatives(bath.thermo, beta), t)
    raise ConfigError(f"unknown micro method {method!r}")


def _micro_row(cfg, bath, E, beta, t, with_gap=False) -> dict:
    mc = _micro(cfg, bath, E, beta, t)
    ct = abs(mc.c_thermal)
    row = {
        "t": t, "Q_R": mc.q_thermal.real, "Q_I": mc.q_thermal.imag, "C_thermal_abs": ct,
        "C_micro_abs": abs(mc.c), "preexp_correction": mc.preexp_correction,
        "exponent_correction": mc.exponent_correction, "n_eff": mc.n_eff, "method": mc.method,
    }
    if with_gap:
        row["gap_abs"] = abs(mc.c - mc.c_thermal)
    return row


def _oracle_row(cfg, bath, E, beta, t) -> dict:
    if not isinstance(bath.thermo, ModeSet) or bath.omega0 is None:
        raise ConfigError("oracle needs a ladder or transmission_line bath")
    if E is None or cfg["ensemble.quanta"] is None:
        raise ConfigError("oracle needs ensemble.quanta (an exact shell)")
    profile = _profile(cfg, t)
    M = cfg["ensemble.quanta"]
    contour = ContourSpec(mode="period", omega0=bath.omega0,
                          n_points=cfg["numerics.contour_points"])
    c_contour = coherence_contour(bath.thermo, profile, E, contour).c
    c_fock = coherence_exact_microcanonical(
        bath.thermo, profile, ExactShell(M, bath.omega0), cfg["numerics.shell_max"]
    )
    beta_c = beta if np.isfinite(beta) else 1e6 / bath.omega0
    q = canonical_exponent(bath.thermo, profile, beta_c)
    c_canon = coherence_exact_canonical(bath.thermo, profile, beta_c, cfg["numerics.fock_n_max"])
    return {
        "t": t, "C_contour_abs": abs(c_contour), "C_fock_micro_abs": abs(c_fock),
        "micro_err": abs(c_contour - c_fock), "C_thermal_abs": abs(q.coherence),
        "C_fock_canonical_abs": abs(c_canon), "canonical_err": abs(q.coherence - c_canon),
        "n_eff": E * beta if np.isfinite(beta) else 0.0, "method": "contour-period/fock",
    }


ROW_FUNCS: dict[str, Callable] = {
    "thermal": _thermal_row,
    "micro": _micro_row,
    "compare": lambda *a: _micro_row(*a, with_gap=True),
    "oracle": _oracle_row,
}


def worker_count() -> int:
    env = os.environ.get("DECOMC_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"DECOMC_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError("DECOMC_THREADS must be >= 1")
        return n
    return min(4, os.cpu_count() or 1)


def _tasks(cfg: ScenarioConfig, command: str):
    """Prepare per-row closures; config-level problems raise ConfigError here."""
    bath = build_bath(cfg)
    if command in ("micro", "compare", "oracle") and cfg["ensemble.kind"] != "microcanonical":
        raise ConfigError(f"'{command}' needs a microcanonical ensemble")
    if command == "oracle" and (cfg["ensemble.quanta"] or 0) > cfg["numerics.shell_max"]:
        raise ConfigError("ensemble.quanta exceeds numerics.shell_max")
    func = ROW_FUNCS[command]
    setup_error = None
    try:
        E, beta = ensemble_point(cfg, bath)
    except ConfigError:
        raise
    except (DecomcError, ValueError) as exc:
        setup_error, E, beta = exc, None, None
    if command == "thermal" and E is not None and not np.isfinite(beta):
        beta = math.inf

    def make(t):
        def run():
            if setup_error is not None:
                raise setup_error
            return func(cfg, bath, E, beta, float(t))
        return run

    return [(float(t), make(t)) for t in cfg.t_grid]


def _run_tasks(tasks, columns, threads):
    """Evaluate in a pool; results come back in grid order."""

    def safe(item):
        key, fn = item
        try:
            return fn(), None
        except ConfigError:
            raise
        except (DecomcError, ValueError, ArithmeticError) as exc:
            row = {c: math.nan for c in columns}
            row["method"] = "failed"
            return row, f"{key}: {type(exc).__name__}: {exc}"

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(safe, tasks))


def run_scenario(
    cfg: ScenarioConfig, command: str, threads: Optional[int] = None
) -> ResultTable:
    """Compute the table for ``command`` (thermal, micro, compare, oracle or sweep)."""
    threads = threads or worker_count()
    sweep_param = None
    if command == "sweep":
        sweep_param = cfg["sweep.parameter"]
        if sweep_param is None:
            raise ConfigError("sweep needs [sweep] parameter and values")
        inner = cfg["sweep.command"]
        tasks = []
        for v in cfg["sweep.values"]:
            sub = cfg.with_override(sweep_param, repr(float(v)))
            tasks += [((v, t), fn) for t, fn in _tasks(sub, inner)]
        columns = ("sweep_value",) + COLUMNS[inner]
    else:
        if command not in COLUMNS:
            raise ConfigError(f"unknown command {command!r}")
        inner = command
        tasks = [((None, t), fn) for t, fn in _tasks(cfg, command)]
        columns = COLUMNS[command]

    labelled = [(_label(sweep_param, key), fn) for key, fn in tasks]
    results = _run_tasks(labelled, COLUMNS[inner], threads)
    rows, diags = [], []
    for (key, _), (row, diag) in zip(tasks, results):
        if sweep_param is not None:
            row = {"sweep_value": key[0], **row}
        row["t"] = key[1]
        rows.append(row)
        if diag:
            diags.append(diag)
    oracle_failed = False
    if inner == "oracle":
        tol = cfg["numerics.oracle_tol"]
        oracle_failed = any(
            r["micro_err"] > tol or r["canonical_err"] > tol
            for r in rows if np.isfinite(r["micro_err"])
        )
    return ResultTable(command, columns, rows, diags, oracle_failed, cfg.sha256,
                       numerics_summary(cfg), sweep_param)


def _label(param, key) -> str:
    v, t = key
    return f"t={t!r}" if param is None else f"{param}={v!r} t={t!r}"


# --- output --------------------------------------------------------------


def format_value(v) -> str:
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    return repr(v)


def render_csv(table: ResultTable) -> str:
    """CSV text with a ``#`` provenance header; identical input gives identical bytes."""
    lines = [
        f"# decomc {__version__}",
        f"# command: {table.command}",
        f"# config_sha256: {table.config_sha256}",
        "# schema: 1",
        f"# numerics: {table.numerics}",
    ]
    if table.sweep_parameter:
        lines.append(f"# sweep_parameter: {table.sweep_parameter}")
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(format_value(row[c]) for c in table.columns))
    for d in table.diagnostics:
        lines.append(f"# error: {d}")
    return "\n".join(lines) + "\n"
