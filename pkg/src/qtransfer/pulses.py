"""Incoming single-photon envelopes and the RMS bandwidth functional.

Two analytic envelope families are provided (a symmetric Gaussian and an
antisymmetric one) whose normalizing constants make the RMS bandwidth

    bandwidth = sqrt( int |f'(t)|^2 dt / int |f(t)|^2 dt )

equal to the nominal ``delta_omega`` parameter.  Arbitrary (possibly
complex, chirped) envelopes are supported through tabulated samples with
linear interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import quad

from .errors import InvalidInputError, NumericFailureError

GAUSSIAN = "gaussian"
ANTISYMMETRIC = "antisymmetric"
TABULATED = "tabulated"

ANALYTIC_KINDS = (GAUSSIAN, ANTISYMMETRIC)

# Analytic envelopes are truncated at |t| <= SUPPORT_WIDTHS / delta_omega in
# downstream integrations; the neglected tail mass is < 1e-20 for both kinds.
SUPPORT_WIDTHS = 10.0


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PulseEnvelope:
    """Temporal amplitude f_in(t) of the incoming single photon.

    Construct via :meth:`gaussian`, :meth:`antisymmetric`, :meth:`tabulated`
    or :meth:`from_csv`; instances are immutable.
    """

    kind: str
    delta_omega: Optional[float] = None
    times: Optional[np.ndarray] = field(default=None, repr=False)
    values: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def gaussian(cls, delta_omega: float) -> "PulseEnvelope":
        """Symmetric Gaussian envelope with RMS bandwidth ``delta_omega``."""
        cls._check_bandwidth(delta_omega)
        return cls(kind=GAUSSIAN, delta_omega=float(delta_omega))

    @classmethod
    def antisymmetric(cls, delta_omega: float) -> "PulseEnvelope":
        """Antisymmetric (odd) envelope with RMS bandwidth ``delta_omega``."""
        cls._check_bandwidth(delta_omega)
        return cls(kind=ANTISYMMETRIC, delta_omega=float(delta_omega))

    @classmethod
    def tabulated(cls, times, values) -> "PulseEnvelope":
        """Envelope given by samples; evaluation interpolates linearly.

        Times must be strictly increasing; the amplitude is zero outside
        the sampled range.
        """
        t = np.asarray(times, dtype=float)
        v = np.asarray(values, dtype=complex)
        if t.ndim != 1 or v.shape != t.shape:
            raise InvalidInputError("times and values must be 1-d arrays of equal length")
        if t.size < 2:
            raise InvalidInputError("tabulated envelope needs at least 2 samples")
        if not np.all(np.diff(t) > 0):
            raise InvalidInputError("tabulated times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise InvalidInputError("tabulated samples must be finite")
        return cls(kind=TABULATED, times=_readonly(t), values=_readonly(v))

    @classmethod
    def from_csv(cls, path) -> "PulseEnvelope":
        """Load a tabulated envelope from CSV: time, re [, im]; header optional."""
        rows = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = [p.strip() for p in line.split(",")]
                try:
                    nums = [float(p) for p in parts]
                except ValueError:
                    if lineno == 1:  # header line
                        continue
                    raise InvalidInputError(f"{path}: non-numeric data on line {lineno}")
                if len(nums) not in (2, 3):
                    raise InvalidInputError(f"{path}: expected 2 or 3 columns on line {lineno}")
                re = nums[1]
                im = nums[2] if len(nums) == 3 else 0.0
                rows.append((nums[0], complex(re, im)))
        if len(rows) < 2:
            raise InvalidInputError(f"{path}: fewer than 2 data rows")
        t, v = zip(*rows)
        return cls.tabulated(np.array(t), np.array(v))

    @staticmethod
    def _check_bandwidth(delta_omega: float) -> None:
        if not (math.isfinite(delta_omega) and delta_omega > 0):
            raise InvalidInputError(f"delta_omega must be > 0, got {delta_omega!r}")

    # -- evaluation -------------------------------------------------------

    def __call__(self, t):
        return self.evaluate(t)

    def evaluate(self, t):
        """Amplitude f_in(t); accepts scalars or arrays, returns complex."""
        t = np.asarray(t, dtype=float)
        if self.kind == GAUSSIAN:
            dw = self.delta_omega
            out = (2.0 * dw * dw / np.pi) ** 0.25 * np.exp(-(dw * t) ** 2)
        elif self.kind == ANTISYMMETRIC:
            dw = self.delta_omega
            c = 2.0 * (2.0 / np.pi) ** 0.25 * dw**1.5 / 3.0**0.75
            out = c * t * np.exp(-(dw * t) ** 2 / 3.0)
        else:
            re = np.interp(t, self.times, self.values.real, left=0.0, right=0.0)
            im = np.interp(t, self.times, self.values.imag, left=0.0, right=0.0)
            out = re + 1j * im
        return np.asarray(out, dtype=complex)[()]

    def derivative(self, t):
        """df_in/dt: analytic for the closed-form kinds, central differences otherwise."""
        t = np.asarray(t, dtype=float)
        if self.kind == GAUSSIAN:
            dw = self.delta_omega
            out = -2.0 * dw * dw * t * (2.0 * dw * dw / np.pi) ** 0.25 * np.exp(-(dw * t) ** 2)
        elif self.kind == ANTISYMMETRIC:
            dw = self.delta_omega
            c = 2.0 * (2.0 / np.pi) ** 0.25 * dw**1.5 / 3.0**0.75
            out = c * (1.0 - 2.0 * dw * dw * t * t / 3.0) * np.exp(-(dw * t) ** 2 / 3.0)
        else:
            grad = np.gradient(self.values, self.times)
            re = np.interp(t, self.times, grad.real, left=0.0, right=0.0)
            im = np.interp(t, self.times, grad.imag, left=0.0, right=0.0)
            out = re + 1j * im
        return np.asarray(out, dtype=complex)[()]

    @property
    def support(self) -> Tuple[float, float]:
        """Time window used for downstream integrations."""
        if self.kind == TABULATED:
            return float(self.times[0]), float(self.times[-1])
        half = SUPPORT_WIDTHS / self.delta_omega
        return -half, half

    # -- integral functionals ---------------------------------------------

    def norm_squared(self, tol: float = 1e-8) -> float:
        """int |f_in(t)|^2 dt with absolute error <= tol.

        Analytic kinds use adaptive quadrature over the truncated support;
        tabulated kinds integrate the interpolant exactly per segment.
        """
        if tol <= 0:
            raise InvalidInputError(f"tol must be > 0, got {tol!r}")
        if self.kind == TABULATED:
            return self._segment_norm_squared()
        lo, hi = self.support
        return self._quad(lambda t: abs(self.evaluate(t)) ** 2, lo, hi, tol)

    def _segment_norm_squared(self) -> float:
        # exact integral of |piecewise-linear interpolant|^2
        y0 = self.values[:-1]
        y1 = self.values[1:]
        dt = np.diff(self.times)
        seg = (np.abs(y0) ** 2 + np.abs(y1) ** 2 + (y0 * np.conj(y1)).real) / 3.0
        return float(np.sum(seg * dt))

    def bandwidth(self) -> float:
        """RMS bandwidth sqrt( int|f'|^2 / int|f|^2 ), zero for a null envelope."""
        if self.kind == TABULATED:
            if self.times.size < 3:
                raise InvalidInputError("bandwidth needs at least 3 tabulated samples")
            grad = np.gradient(self.values, self.times)
            num = float(np.trapezoid(np.abs(grad) ** 2, self.times))
            den = self._segment_norm_squared()
            if den == 0.0:
                return 0.0
            return math.sqrt(num / den)
        lo, hi = self.support
        dw = self.delta_omega
        num = self._quad(lambda t: abs(self.derivative(t)) ** 2, lo, hi, 1e-8 * max(1.0, dw * dw))
        den = self._quad(lambda t: abs(self.evaluate(t)) ** 2, lo, hi, 1e-9)
        return math.sqrt(num / den)

    def nominal_bandwidth(self) -> float:
        """delta_omega for analytic kinds, the computed bandwidth otherwise."""
        if self.kind in ANALYTIC_KINDS:
            return float(self.delta_omega)
        return self.bandwidth()

    @staticmethod
    def _quad(fn, lo: float, hi: float, tol: float) -> float:
        out = quad(fn, lo, hi, epsabs=tol, epsrel=1e-10, limit=200, full_output=True)
        value, abserr, info = out[0], out[1], out[2]
        if abserr > tol:
            raise NumericFailureError(
                f"quadrature did not converge on [{lo}, {hi}]: "
                f"estimate={value!r}, abserr={abserr!r}, evaluations={info.get('neval')}"
            )
        return float(value)
