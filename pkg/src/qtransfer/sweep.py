"""Bandwidth sweeps: efficiency-vs-bandwidth tables, CSV output, plot script.

A sweep runs one simulation per (envelope kind, bandwidth) grid point and
tabulates the numerical transfer probability against the closed-form
adiabatic-limit efficiency.  Grid points are independent and run in
parallel (the ``QTRANSFER_THREADS`` environment variable caps the worker
count; 0 or unset uses all cores); the output is deterministic regardless
of scheduling because every point is computed independently and the rows
are sorted before writing.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from .analytics import cavity_efficiency, waveguide_efficiency
from .dynamics import default_grid, simulate_cavity, simulate_waveguide
from .errors import InvalidInputError, QTransferError
from .params import CavityParams, ScenarioParams, WaveguideParams
from .pulses import ANALYTIC_KINDS, PulseEnvelope

CSV_HEADER = "delta_omega,envelope,P_numeric,eta_analytic,rel_dev,adiabaticity_max"

# Default bandwidth grid of the bundled sweep configs: 25 log-spaced points
# spanning three decades below the reference rate.
DEFAULT_GRID = (1e-3, 1.0, 25)


@dataclass(frozen=True)
class SweepConfig:
    """One sweep: scenario parameters, envelope kinds, bandwidth grid, output."""

    scenario: str
    params: ScenarioParams
    envelopes: Tuple[str, ...]
    delta_omega_grid: Tuple[float, float, int]
    output_path: Path
    stop_norm: float = 1e-12

    def __post_init__(self):
        if self.scenario not in ("cavity", "waveguide"):
            raise InvalidInputError(f"scenario must be cavity or waveguide, got {self.scenario!r}")
        expected = CavityParams if self.scenario == "cavity" else WaveguideParams
        if not isinstance(self.params, expected):
            raise InvalidInputError(
                f"params type {type(self.params).__name__} does not match scenario {self.scenario!r}"
            )
        if not self.envelopes:
            raise InvalidInputError("at least one envelope kind is required")
        for kind in self.envelopes:
            if kind not in ANALYTIC_KINDS:
                raise InvalidInputError(
                    f"sweep envelopes must be analytic kinds {ANALYTIC_KINDS}, got {kind!r}"
                )
        lo, hi, count = self.delta_omega_grid
        if not (lo > 0 and hi > lo and int(count) >= 2):
            raise InvalidInputError(
                f"delta_omega_grid must satisfy min > 0, max > min, count >= 2, got {self.delta_omega_grid}"
            )


@dataclass(frozen=True)
class SweepRow:
    delta_omega: float
    envelope: str
    P_numeric: float
    eta_analytic: float
    rel_dev: float
    adiabaticity_max: float


@dataclass(frozen=True)
class SweepTable:
    rows: Tuple[SweepRow, ...]

    def to_csv_text(self) -> str:
        lines = [CSV_HEADER]
        for r in self.rows:
            lines.append(
                ",".join(
                    [
                        _fmt(r.delta_omega),
                        r.envelope,
                        _fmt(r.P_numeric),
                        _fmt(r.eta_analytic),
                        _fmt(r.rel_dev),
                        _fmt(r.adiabaticity_max),
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        path = Path(path)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv_text())


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _worker_count() -> int:
    raw = os.environ.get("QTRANSFER_THREADS", "0").strip()
    try:
        n = int(raw) if raw else 0
    except ValueError:
        raise InvalidInputError(f"QTRANSFER_THREADS must be an integer, got {raw!r}")
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def _run_point(cfg: SweepConfig, kind: str, delta_omega: float) -> Tuple[float, float]:
    env = (
        PulseEnvelope.gaussian(delta_omega)
        if kind == "gaussian"
        else PulseEnvelope.antisymmetric(delta_omega)
    )
    grid = default_grid(env, cfg.params, stop_norm=cfg.stop_norm)
    simulate = simulate_cavity if cfg.scenario == "cavity" else simulate_waveguide
    try:
        _, outcome = simulate(cfg.params, env, grid, record_every=10**9)
    except QTransferError as exc:
        raise type(exc)(
            f"sweep point (envelope={kind}, delta_omega={delta_omega!r}) failed: {exc}"
        ) from exc
    return outcome.P_sf, max(outcome.adiabaticity)


def run_sweep(cfg: SweepConfig) -> SweepTable:
    """Run every grid point, write the CSV and its companion plot script.

    ``P_numeric`` is the simulated probability of ending in the target
    level; ``eta_analytic`` is the corresponding closed-form adiabatic
    limit (they coincide with the total triggering efficiency when
    gamma_eo = 0).
    """
    lo, hi, count = cfg.delta_omega_grid
    grid_values = np.geomspace(lo, hi, int(count))
    if cfg.scenario == "cavity":
        eta_analytic = cavity_efficiency(cfg.params).eta_sf
    else:
        eta_analytic = waveguide_efficiency(cfg.params).eta_sf

    points = [(kind, float(dw)) for kind in cfg.envelopes for dw in grid_values]
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        results = list(pool.map(lambda kd: _run_point(cfg, kd[0], kd[1]), points))

    rows = []
    for (kind, dw), (p_numeric, adiab) in zip(points, results):
        if eta_analytic > 0:
            rel_dev = abs(p_numeric - eta_analytic) / eta_analytic
        else:
            rel_dev = math.inf if p_numeric > 0 else 0.0
        rows.append(
            SweepRow(
                delta_omega=dw,
                envelope=kind,
                P_numeric=p_numeric,
                eta_analytic=eta_analytic,
                rel_dev=rel_dev,
                adiabaticity_max=adiab,
            )
        )
    rows.sort(key=lambda r: (r.envelope, r.delta_omega))
    table = SweepTable(rows=tuple(rows))
    table.write(cfg.output_path)
    write_plot_script(cfg.output_path)
    return table


def plot_script_path(csv_path) -> Path:
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.stem + "_plot.py")


def write_plot_script(csv_path) -> Path:
    """Emit a small matplotlib script next to the CSV (display convenience only)."""
    csv_path = Path(csv_path)
    script = plot_script_path(csv_path)
    body = f'''"""Plot transfer probability vs bandwidth from {csv_path.name}."""
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

series = defaultdict(lambda: ([], []))
with open("{csv_path.name}", newline="") as fh:
    for row in csv.DictReader(fh):
        xs, ys = series[row["envelope"]]
        xs.append(float(row["delta_omega"]))
        ys.append(float(row["P_numeric"]))

fig, ax = plt.subplots()
eta = None
for kind, (xs, ys) in sorted(series.items()):
    ax.semilogx(xs, ys, marker="o", ms=3, label=kind)
with open("{csv_path.name}", newline="") as fh:
    eta = float(next(iter(csv.DictReader(fh)))["eta_analytic"])
ax.axhline(eta, color="gray", ls="--", lw=1, label="adiabatic limit")
ax.set_xlabel("bandwidth (reference-rate units)")
ax.set_ylabel("transfer probability")
ax.legend()
fig.savefig("{csv_path.stem}.png", dpi=150)
print("wrote {csv_path.stem}.png")
'''
    with open(script, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(body)
    return script


_COMMON_KEYS = {"scenario", "envelopes", "delta_omega_min", "delta_omega_max",
                "delta_omega_count", "output", "stop_norm"}
_CAVITY_KEYS = {"g_es", "g_ef", "kappa_es", "kappa_ef", "gamma_es", "gamma_ef", "gamma_eo"}
_WAVEGUIDE_KEYS = {"Gamma_es", "Gamma_ef", "gamma_es", "gamma_ef", "gamma_eo"}


def load_sweep_config(path) -> SweepConfig:
    """Parse a flat key = value config file (# starts a comment).

    Keys mirror the CLI flags with dashes replaced by underscores; see the
    README for a complete example.
    """
    path = Path(path)
    raw = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInputError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            key = key.strip().replace("-", "_")
            if key in raw:
                raise InvalidInputError(f"{path}:{lineno}: duplicate key {key!r}")
            raw[key] = value.strip()

    scenario = raw.get("scenario")
    if scenario not in ("cavity", "waveguide"):
        raise InvalidInputError(f"{path}: scenario must be cavity or waveguide, got {scenario!r}")
    param_keys = _CAVITY_KEYS if scenario == "cavity" else _WAVEGUIDE_KEYS
    unknown = set(raw) - _COMMON_KEYS - param_keys
    if unknown:
        raise InvalidInputError(f"{path}: unknown keys for {scenario}: {sorted(unknown)}")

    def fnum(key: str, default: Optional[float] = None) -> float:
        if key not in raw:
            if default is None:
                raise InvalidInputError(f"{path}: missing required key {key!r}")
            return default
        try:
            return float(raw[key])
        except ValueError:
            raise InvalidInputError(f"{path}: {key} must be a number, got {raw[key]!r}")

    if scenario == "cavity":
        params: ScenarioParams = CavityParams(
            g_es=fnum("g_es"),
            kappa_es=fnum("kappa_es"),
            g_ef=fnum("g_ef", 0.0),
            kappa_ef=fnum("kappa_ef", 0.0),
            gamma_es=fnum("gamma_es", 0.0),
            gamma_ef=fnum("gamma_ef", 0.0),
            gamma_eo=fnum("gamma_eo", 0.0),
        )
    else:
        params = WaveguideParams(
            Gamma_es=fnum("Gamma_es"),
            Gamma_ef=fnum("Gamma_ef", 0.0),
            gamma_es=fnum("gamma_es", 0.0),
            gamma_ef=fnum("gamma_ef", 0.0),
            gamma_eo=fnum("gamma_eo", 0.0),
        )

    envelopes = tuple(
        k.strip() for k in raw.get("envelopes", "gaussian,antisymmetric").split(",") if k.strip()
    )
    if "output" not in raw:
        raise InvalidInputError(f"{path}: missing required key 'output'")

    return SweepConfig(
        scenario=scenario,
        params=params,
        envelopes=envelopes,
        delta_omega_grid=(
            fnum("delta_omega_min", DEFAULT_GRID[0]),
            fnum("delta_omega_max", DEFAULT_GRID[1]),
            int(fnum("delta_omega_count", DEFAULT_GRID[2])),
        ),
        output_path=Path(raw["output"]),
        stop_norm=fnum("stop_norm", 1e-12),
    )
