"""Time-domain integration of the driven excitation-transfer dynamics.

Cavity scenario: the three complex amplitudes (S, E, F) evolve under a
non-Hermitian generator G with a source term on S,

    d psi / dt = -i G psi + e_S * sqrt(2 kappa_es) f_in(t).

Waveguide scenario: a single excited-state amplitude obeys

    d psi_e / dt = -(Gamma_es + Gamma_ef + gamma_es + gamma_ef + gamma_eo)/2 psi_e
                   + i sqrt(Gamma_es) f_in(t).

Both are driven linear ODEs and share one integrator: a classical
fixed-step 4th-order scheme whose one-step update is precomputed as a
linear map (state matrix plus three drive coefficients).  Channel
probabilities are accumulated with the same scheme by treating each
integral as an extra state component; the quadratic integrands are
evaluated at the integrator's internal stage points, so probabilities
converge at the same order as the amplitudes.  After the drive window the
integration continues source-free until the state norm drops below the
grid's stop threshold, which captures tail contributions.

An exact propagator (matrix exponential via eigendecomposition) is
provided as an independent oracle for the homogeneous part.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm
from scipy.signal import lfilter

from .errors import (
    InvalidGridError,
    InvalidParametersError,
    NumericFailureError,
)
from .params import CavityParams, WaveguideParams, ScenarioParams
from .pulses import PulseEnvelope

# Step bound for the fixed-step integrator: step <= 0.05 / max(rates, bandwidth).
STEP_BOUND_FACTOR = 0.05

_TAIL_STEP_CAP = 10**6
_CHUNK = 32768
_MODAL_COND_LIMIT = 1e6


# ---------------------------------------------------------------------------
# containers


@dataclass(frozen=True)
class CavityState:
    """Complex amplitudes of the photon-in-s-mode (S), excited (E), photon-in-f-mode (F) states."""

    psi_S: complex
    psi_E: complex
    psi_F: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.psi_S, self.psi_E, self.psi_F], dtype=complex)

    @classmethod
    def from_array(cls, a) -> "CavityState":
        a = np.asarray(a, dtype=complex)
        return cls(psi_S=complex(a[0]), psi_E=complex(a[1]), psi_F=complex(a[2]))

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


@dataclass(frozen=True)
class TimeGrid:
    """Fixed-step integration window plus the tail-termination threshold."""

    t_start: float
    t_end: float
    step: float
    stop_norm: float = 1e-12

    def __post_init__(self):
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)):
            raise InvalidGridError("t_start and t_end must be finite")
        if not self.t_start < self.t_end:
            raise InvalidGridError(f"t_start must be < t_end, got [{self.t_start}, {self.t_end}]")
        if not (math.isfinite(self.step) and self.step > 0):
            raise InvalidGridError(f"step must be > 0, got {self.step!r}")
        if not (math.isfinite(self.stop_norm) and self.stop_norm > 0):
            raise InvalidGridError(f"stop_norm must be > 0, got {self.stop_norm!r}")


@dataclass(frozen=True)
class Trajectory:
    """Time-sampled amplitudes of a single run.

    ``states`` has one column per label: (S, E, F) for cavity runs, (e,)
    for waveguide runs.  ``input_values`` samples f_in at the same times.
    """

    times: np.ndarray
    states: np.ndarray
    input_values: np.ndarray
    labels: Tuple[str, ...]

    def to_csv(self, path) -> None:
        """Write columns t, re/im of each amplitude, |f_in(t)|."""
        cols = ["t"]
        for lab in self.labels:
            cols += [f"re_{lab}", f"im_{lab}"]
        cols.append("abs_f_in")
        states = self.states if self.states.ndim == 2 else self.states[:, None]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(cols) + "\n")
            for i in range(self.times.size):
                row = [_fmt(self.times[i])]
                for j in range(states.shape[1]):
                    row += [_fmt(states[i, j].real), _fmt(states[i, j].imag)]
                row.append(_fmt(abs(self.input_values[i])))
                fh.write(",".join(row) + "\n")


@dataclass(frozen=True)
class TransferOutcome:
    """Channel-resolved probabilities accumulated over a full run.

    ``adiabaticity`` lists the envelope bandwidth divided by each adiabatic
    threshold of the scenario (small values mean the adiabatic regime).
    """

    P_sf: float
    P_other: float
    P_back_bg: float
    residual_norm: float
    input_norm: float
    adiabaticity: Tuple[float, ...]

    @property
    def P_back(self) -> float:
        """Probability returned to the input channel (reflected/re-emitted photon)."""
        return self.input_norm - self.P_sf - self.P_other - self.P_back_bg - self.residual_norm


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


# ---------------------------------------------------------------------------
# generator, thresholds, single-step propagators


def generator_matrix(p: CavityParams) -> np.ndarray:
    """Non-Hermitian generator in the (S, E, F) basis.

    Coherent coupling i(g_es |S><E| + g_ef |F><E| - h.c.) plus anti-Hermitian
    loss terms -i kappa on the photonic states and -i(gamma_es + gamma_ef +
    gamma_eo)/2 on the excited state; the decay to states outside the
    three-level system enters the excited-state width only.
    """
    g = np.zeros((3, 3), dtype=complex)
    g[0, 1] = 1j * p.g_es
    g[1, 0] = -1j * p.g_es
    g[2, 1] = 1j * p.g_ef
    g[1, 2] = -1j * p.g_ef
    g[0, 0] = -1j * p.kappa_es
    g[2, 2] = -1j * p.kappa_ef
    g[1, 1] = -1j * (p.gamma_es + p.gamma_ef + p.gamma_eo) / 2.0
    return g


def adiabatic_thresholds(p: CavityParams) -> Tuple[float, float, float]:
    """Rates the envelope bandwidth must stay well below (cavity scenario).

    Returns (kappa_es, |lambda_+|, |lambda_-|) where lambda_+- are the
    representative generator eigenfrequencies; the square root is taken on
    the principal branch.
    """
    half_gamma = (p.gamma_es + p.gamma_ef) / 2.0
    mean = (p.kappa_es + half_gamma) / 2.0
    disc = ((p.kappa_es - half_gamma) / 2.0) ** 2 - p.g_es**2 - p.g_ef**2
    root = cmath.sqrt(complex(disc))
    return (p.kappa_es, abs(mean + root), abs(mean - root))


def waveguide_adiabatic_threshold(p: WaveguideParams) -> float:
    """Half the total excited-state decay rate (waveguide scenario)."""
    return (p.Gamma_es + p.Gamma_ef + p.gamma_es + p.gamma_ef + p.gamma_eo) / 2.0


def rk4_step(G: np.ndarray, state: CavityState, dt: float) -> CavityState:
    """One classical 4th-order step of the homogeneous equation dpsi/dt = -iG psi."""
    a = np.asarray(G, dtype=complex) * (-1j)
    y = state.as_array()
    k1 = a @ y
    k2 = a @ (y + 0.5 * dt * k1)
    k3 = a @ (y + 0.5 * dt * k2)
    k4 = a @ (y + dt * k3)
    return CavityState.from_array(y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))


def exact_propagator(G: np.ndarray, dt: float) -> Tuple[np.ndarray, bool]:
    """exp(-i G dt) via eigendecomposition; falls back to the series form.

    Returns (matrix, used_series).  The series fallback (scaling and
    squaring) kicks in when the eigenvector matrix is ill-conditioned
    (condition number above 1e12), i.e. the generator is defective.
    """
    b = np.asarray(G, dtype=complex) * (-1j * dt)
    w, v = np.linalg.eig(b)
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond > 1e12:
        return expm(b), True
    return v @ np.diag(np.exp(w)) @ np.linalg.inv(v), False


def propagate_exact(G: np.ndarray, state: CavityState, dt: float) -> CavityState:
    """Exact matrix-exponential advance of the homogeneous equation.

    Warns when the eigendecomposition is unusable and the series fallback
    is applied.
    """
    if not dt > 0:
        raise InvalidGridError(f"dt must be > 0, got {dt!r}")
    u, used_series = exact_propagator(G, dt)
    if used_series:
        warnings.warn(
            "generator is numerically defective; used scaling-and-squaring series",
            RuntimeWarning,
            stacklevel=2,
        )
    return CavityState.from_array(u @ state.as_array())


# ---------------------------------------------------------------------------
# fixed-step driven integrator


def _step_bound(p: ScenarioParams, env: PulseEnvelope) -> float:
    rates = [r for r in p.all_rates()]
    rates.append(env.nominal_bandwidth())
    fastest = max(rates)
    if fastest <= 0:
        raise InvalidParametersError("all rates and the bandwidth are zero; nothing to integrate")
    return STEP_BOUND_FACTOR / fastest


def default_grid(
    env: PulseEnvelope,
    p: ScenarioParams,
    stop_norm: float = 1e-12,
) -> TimeGrid:
    """Grid covering the envelope support at the integrator's step bound."""
    lo, hi = env.support
    return TimeGrid(t_start=lo, t_end=hi, step=_step_bound(p, env), stop_norm=stop_norm)


class _Rk4Maps:
    """One-step update maps for y' = A y + b f(t) with fixed step h.

    Advancing:   y+ = M y + c1 f(t) + c2 f(t + h/2) + c3 f(t + h)
    Stage states (where quadratic integrands are sampled):
        s1 = y
        s2 = S2y y + S2f1 f(t)
        s3 = S3y y + S3f1 f(t) + S3f2 f(t + h/2)
        s4 = S4y y + S4f1 f(t) + S4f2 f(t + h/2)
    """

    def __init__(self, a: np.ndarray, b: np.ndarray, h: float):
        k = a.shape[0]
        eye = np.eye(k, dtype=complex)
        a2 = a @ a
        a3 = a2 @ a
        a4 = a3 @ a
        self.h = h
        self.M = eye + h * a + (h**2 / 2) * a2 + (h**3 / 6) * a3 + (h**4 / 24) * a4
        self.c1 = (h / 6) * (b + h * (a @ b) + (h**2 / 2) * (a2 @ b) + (h**3 / 4) * (a3 @ b))
        self.c2 = (h / 6) * (4 * b + 2 * h * (a @ b) + (h**2 / 2) * (a2 @ b))
        self.c3 = (h / 6) * b
        self.S2y = eye + (h / 2) * a
        self.S2f1 = (h / 2) * b
        self.S3y = eye + (h / 2) * a + (h**2 / 4) * a2
        self.S3f1 = (h**2 / 4) * (a @ b)
        self.S3f2 = (h / 2) * b
        self.S4y = eye + h * a + (h**2 / 2) * a2 + (h**3 / 4) * a3
        self.S4f1 = (h**3 / 4) * (a2 @ b)
        self.S4f2 = (h**2 / 2) * (a @ b) + h * b


class _Modal:
    """Eigendecomposition of the one-step matrix, if well conditioned."""

    def __init__(self, m: np.ndarray):
        mu, v = np.linalg.eig(m)
        cond = np.linalg.cond(v)
        self.ok = bool(np.isfinite(cond) and cond < _MODAL_COND_LIMIT)
        if self.ok:
            self.mu = mu
            self.v = v
            self.vinv = np.linalg.inv(v)


def _solve_recurrence(maps: _Rk4Maps, drive: np.ndarray, modal: _Modal) -> np.ndarray:
    """States y_0..y_N of y_{n+1} = M y_n + drive_n with y_0 = 0."""
    n, k = drive.shape
    if modal.ok:
        g = drive @ modal.vinv.T
        z = np.empty_like(g)
        for j in range(k):
            z[:, j] = lfilter(
                np.array([1.0 + 0j]), np.array([1.0, -modal.mu[j]]), g[:, j]
            )
        y = np.vstack([np.zeros((1, k), dtype=complex), z @ modal.v.T])
        return y
    y = np.zeros((n + 1, k), dtype=complex)
    cur = np.zeros(k, dtype=complex)
    for i in range(n):
        cur = maps.M @ cur + drive[i]
        y[i + 1] = cur
    return y


def _accumulate_driven(
    maps: _Rk4Maps,
    weights: np.ndarray,
    y_base: np.ndarray,
    f1: np.ndarray,
    f2: np.ndarray,
) -> np.ndarray:
    """Integrals of sum_i weights[a,i] |y_i(t)|^2 over the given steps."""
    h = maps.h
    totals = np.zeros(weights.shape[0])
    for a in range(0, y_base.shape[0], _CHUNK):
        b = min(a + _CHUNK, y_base.shape[0])
        s1 = y_base[a:b]
        g1 = f1[a:b, None]
        g2 = f2[a:b, None]
        s2 = s1 @ maps.S2y.T + g1 * maps.S2f1
        s3 = s1 @ maps.S3y.T + g1 * maps.S3f1 + g2 * maps.S3f2
        s4 = s1 @ maps.S4y.T + g1 * maps.S4f1 + g2 * maps.S4f2
        quad_sum = (
            _absq(s1) + 2.0 * _absq(s2) + 2.0 * _absq(s3) + _absq(s4)
        ).sum(axis=0)
        totals += (h / 6.0) * (weights @ quad_sum)
    return totals


def _absq(s: np.ndarray) -> np.ndarray:
    return s.real**2 + s.imag**2


class _Recorder:
    """Strided collection of (t, state, f_in) samples across run phases."""

    def __init__(self, stride: int):
        self.stride = max(1, int(stride))
        self.times: List[float] = []
        self.states: List[np.ndarray] = []
        self.inputs: List[complex] = []
        self._next = 0

    def add_block(self, idx0: int, times: np.ndarray, states: np.ndarray, inputs) -> None:
        # block covers consecutive global step indices idx0 .. idx0 + n - 1;
        # self._next is the next global index due for recording
        n = times.size
        first = self._next - idx0
        if first >= n:
            return
        take = np.arange(first, n, self.stride, dtype=int)
        self.times.extend(times[take].tolist())
        self.states.extend(states[take])
        if np.isscalar(inputs) or getattr(inputs, "ndim", 1) == 0:
            self.inputs.extend([complex(inputs)] * take.size)
        else:
            self.inputs.extend(np.asarray(inputs)[take].tolist())
        self._next = idx0 + int(take[-1]) + self.stride

    def add_final(self, t: float, state: np.ndarray, f: complex) -> None:
        if not self.times or self.times[-1] != t:
            self.times.append(float(t))
            self.states.append(np.asarray(state, dtype=complex))
            self.inputs.append(complex(f))

    def build(self, labels: Tuple[str, ...]) -> Trajectory:
        states = np.array(self.states, dtype=complex)
        if len(labels) == 1:
            states = states.reshape(-1)
        return Trajectory(
            times=np.array(self.times, dtype=float),
            states=states,
            input_values=np.array(self.inputs, dtype=complex),
            labels=labels,
        )


def _run_driven(
    a: np.ndarray,
    b: np.ndarray,
    weights: np.ndarray,
    env: PulseEnvelope,
    grid: TimeGrid,
    record_every: int,
    labels: Tuple[str, ...],
) -> Tuple[Trajectory, np.ndarray, float, float]:
    """Integrate the driven system plus source-free tail.

    Returns (trajectory, channel integrals, input_norm, residual_norm).
    """
    h = grid.step
    k = a.shape[0]
    n_steps = max(1, int(math.ceil((grid.t_end - grid.t_start) / h - 1e-9)))
    times = grid.t_start + h * np.arange(n_steps + 1)

    f_grid = np.asarray(env.evaluate(times), dtype=complex)
    f_mid = np.asarray(env.evaluate(times[:-1] + 0.5 * h), dtype=complex)

    maps = _Rk4Maps(a, b, h)
    modal = _Modal(maps.M)

    drive = (
        f_grid[:-1, None] * maps.c1 + f_mid[:, None] * maps.c2 + f_grid[1:, None] * maps.c3
    )
    y = _solve_recurrence(maps, drive, modal)

    acc = _accumulate_driven(maps, weights, y[:-1], f_grid[:-1], f_mid)
    input_norm = float(
        (h / 6.0)
        * np.sum(_absq(f_grid[:-1, None]) + 4.0 * _absq(f_mid[:, None]) + _absq(f_grid[1:, None]))
    )

    rec = _Recorder(record_every)
    rec.add_block(0, times, y, f_grid)

    # source-free tail until the state norm falls below the stop threshold
    zero_f = np.zeros(1)
    y_cur = y[-1].copy()
    t_cur = float(times[-1])
    idx = n_steps
    tail_steps = 0
    residual = float(np.sqrt(_absq(y_cur).sum()))
    if residual >= grid.stop_norm:
        while True:
            block = min(_CHUNK, _TAIL_STEP_CAP - tail_steps)
            if block <= 0:
                raise NumericFailureError(
                    f"tail did not decay below stop_norm={grid.stop_norm} "
                    f"within {_TAIL_STEP_CAP} extra steps (norm={residual:.3e})"
                )
            if modal.ok:
                z_cur = modal.vinv @ y_cur
                powers = modal.mu[None, :] ** np.arange(1, block + 1)[:, None]
                y_blk = (z_cur[None, :] * powers) @ modal.v.T
            else:
                y_blk = np.empty((block, k), dtype=complex)
                cur = y_cur
                for i in range(block):
                    cur = maps.M @ cur
                    y_blk[i] = cur
            norms = np.sqrt(_absq(y_blk).sum(axis=1))
            hit = np.nonzero(norms < grid.stop_norm)[0]
            n_take = int(hit[0]) + 1 if hit.size else block
            base = np.vstack([y_cur[None, :], y_blk[: n_take - 1]])
            acc += _accumulate_driven(maps, weights, base, zero_f.repeat(n_take), zero_f.repeat(n_take))
            blk_times = t_cur + h * np.arange(1, n_take + 1)
            rec.add_block(idx + 1, blk_times, y_blk[:n_take], 0.0)
            y_cur = y_blk[n_take - 1].copy()
            t_cur = float(blk_times[-1])
            idx += n_take
            tail_steps += n_take
            residual = float(norms[n_take - 1])
            if hit.size:
                break

    rec.add_final(t_cur, y_cur, 0.0)
    trajectory = rec.build(labels)
    return trajectory, acc, input_norm, residual**2


def _check_grid(p: ScenarioParams, env: PulseEnvelope, grid: Optional[TimeGrid]) -> TimeGrid:
    bound = _step_bound(p, env)
    if grid is None:
        return default_grid(env, p)
    if grid.step > bound * (1 + 1e-12):
        raise InvalidGridError(
            f"step {grid.step} exceeds the bound {bound} "
            f"(= {STEP_BOUND_FACTOR} / max(rates, bandwidth))"
        )
    return grid


def _outcome_sanity(out: "TransferOutcome") -> None:
    tol = 1e-8
    probs = (out.P_sf, out.P_other, out.P_back_bg)
    if any((x < -tol or x > 1 + tol) for x in probs):
        raise NumericFailureError(f"accumulated probabilities out of range: {out}")
    if out.P_sf + out.P_other + out.P_back_bg > out.input_norm + tol:
        raise NumericFailureError(f"channel probabilities exceed supplied input norm: {out}")


def simulate_cavity(
    p: CavityParams,
    env: PulseEnvelope,
    grid: Optional[TimeGrid] = None,
    record_every: int = 1,
) -> Tuple[Trajectory, TransferOutcome]:
    """Integrate the cavity three-state dynamics for one incoming photon.

    The run starts from the empty state at ``grid.t_start``, is driven by
    sqrt(2 kappa_es) f_in(t) on the S amplitude over the grid window, then
    decays source-free until the state norm is below ``grid.stop_norm``.

    Accumulated channels: P_sf integrates 2 kappa_ef |psi_F|^2 +
    gamma_ef |psi_E|^2 (population that ends in the f level), P_other
    integrates gamma_eo |psi_E|^2 and P_back_bg integrates
    gamma_es |psi_E|^2.
    """
    if not p.kappa_es > 0:
        raise InvalidParametersError("simulation requires kappa_es > 0 (input channel)")
    grid = _check_grid(p, env, grid)
    a = np.asarray(generator_matrix(p), dtype=complex) * (-1j)
    b = np.array([math.sqrt(2.0 * p.kappa_es), 0.0, 0.0], dtype=complex)
    weights = np.array(
        [
            [0.0, p.gamma_ef, 2.0 * p.kappa_ef],
            [0.0, p.gamma_eo, 0.0],
            [0.0, p.gamma_es, 0.0],
        ]
    )
    trajectory, acc, input_norm, residual = _run_driven(
        a, b, weights, env, grid, record_every, labels=("S", "E", "F")
    )
    dw = env.nominal_bandwidth()
    ratios = tuple(
        (dw / th if th > 0 else math.inf) for th in adiabatic_thresholds(p)
    )
    outcome = TransferOutcome(
        P_sf=float(acc[0]),
        P_other=float(acc[1]),
        P_back_bg=float(acc[2]),
        residual_norm=residual,
        input_norm=input_norm,
        adiabaticity=ratios,
    )
    _outcome_sanity(outcome)
    return trajectory, outcome


def simulate_waveguide(
    p: WaveguideParams,
    env: PulseEnvelope,
    grid: Optional[TimeGrid] = None,
    record_every: int = 1,
) -> Tuple[Trajectory, TransferOutcome]:
    """Integrate the waveguide excited-state amplitude for one incoming photon.

    P_sf integrates (Gamma_ef + gamma_ef) |psi_e|^2, P_other integrates
    gamma_eo |psi_e|^2 and P_back_bg integrates gamma_es |psi_e|^2; the
    remaining decayed population went back into the input channel.
    """
    if not p.Gamma_es > 0:
        raise InvalidParametersError("simulation requires Gamma_es > 0 (input channel)")
    grid = _check_grid(p, env, grid)
    total = p.Gamma_es + p.Gamma_ef + p.gamma_es + p.gamma_ef + p.gamma_eo
    a = np.array([[-0.5 * total]], dtype=complex)
    b = np.array([1j * math.sqrt(p.Gamma_es)], dtype=complex)
    weights = np.array([[p.Gamma_ef + p.gamma_ef], [p.gamma_eo], [p.gamma_es]])
    trajectory, acc, input_norm, residual = _run_driven(
        a, b, weights, env, grid, record_every, labels=("e",)
    )
    dw = env.nominal_bandwidth()
    th = waveguide_adiabatic_threshold(p)
    outcome = TransferOutcome(
        P_sf=float(acc[0]),
        P_other=float(acc[1]),
        P_back_bg=float(acc[2]),
        residual_norm=residual,
        input_norm=input_norm,
        adiabaticity=((dw / th if th > 0 else math.inf),),
    )
    _outcome_sanity(outcome)
    return trajectory, outcome


def waveguide_amplitude_analytic(
    p: WaveguideParams,
    env: PulseEnvelope,
    t: float,
    t_start: Optional[float] = None,
) -> complex:
    """Excited-state amplitude by direct convolution (independent oracle).

    Evaluates i sqrt(Gamma_es) * int_{t_start}^{t} exp(-R (t - t') / 2)
    f_in(t') dt' with R the total decay rate, using adaptive quadrature
    (absolute tolerance 1e-10 per quadrature).
    """
    if not p.Gamma_es > 0:
        raise InvalidParametersError("requires Gamma_es > 0")
    if t_start is None:
        t_start = env.support[0]
    if t <= t_start:
        return 0.0 + 0.0j
    r = p.Gamma_es + p.gamma_es + p.Gamma_ef + p.gamma_ef + p.gamma_eo
    # the kernel is negligible further than ~320/R back from t
    lo = t_start if r == 0 else max(t_start, t - 320.0 / r)

    def integrand(tp: float, part: str) -> float:
        val = cmath.exp(-0.5 * r * (t - tp)) * complex(env.evaluate(tp))
        return val.real if part == "re" else val.imag

    out = []
    for part in ("re", "im"):
        res = quad(
            integrand,
            lo,
            t,
            args=(part,),
            epsabs=5e-11,
            epsrel=1e-10,
            limit=400,
            full_output=True,
        )
        value, abserr = res[0], res[1]
        if abserr > 1e-9:
            raise NumericFailureError(
                f"convolution quadrature did not converge at t={t}: abserr={abserr!r}"
            )
        out.append(value)
    return 1j * math.sqrt(p.Gamma_es) * complex(out[0], out[1])
