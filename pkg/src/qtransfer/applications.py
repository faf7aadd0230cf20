"""Condition checkers for the polarization-qubit memory and frequency-converter setups.

A polarization qubit is transferred without which-path leakage only when
the photon emitted during the transfer carries no information about the
qubit state, i.e. when the two polarization branches look identical to the
photonic environment.  The converter additionally needs every re-emission
branch to feed the guided channel much faster than the background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Union

from .analytics import EfficiencyReport, cavity_efficiency, waveguide_efficiency
from .errors import InvalidInputError, InvalidParametersError, InvalidSetupError
from .params import CavityParams, ScenarioParams


@dataclass(frozen=True)
class MemorySetup:
    """Scenario parameters of the two polarization branches (same kind)."""

    sigma_plus: ScenarioParams
    sigma_minus: ScenarioParams

    def __post_init__(self):
        if type(self.sigma_plus) is not type(self.sigma_minus):
            raise InvalidSetupError("both branches must use the same scenario kind")

    @property
    def is_cavity(self) -> bool:
        return isinstance(self.sigma_plus, CavityParams)


@dataclass(frozen=True)
class MemoryCheckReport:
    passed: bool
    mismatches: Dict[str, float]


def _rel_mismatch(a: float, b: float) -> float:
    m = max(a, b)
    return abs(a - b) / m if m > 0 else 0.0


def memory_check(m: MemorySetup, rel_tol: float = 1e-3) -> MemoryCheckReport:
    """Branch indistinguishability for the input transition.

    Cavity: the sigma+ and sigma- vacuum Rabi frequencies and cavity loss
    rates must agree within ``rel_tol`` (relative).  Waveguide: the guided
    emission rates must agree.  Background rates are not constrained.
    """
    if rel_tol < 0:
        raise InvalidInputError(f"rel_tol must be >= 0, got {rel_tol!r}")
    if m.is_cavity:
        mismatches = {
            "g": _rel_mismatch(m.sigma_plus.g_es, m.sigma_minus.g_es),
            "kappa": _rel_mismatch(m.sigma_plus.kappa_es, m.sigma_minus.kappa_es),
        }
    else:
        mismatches = {
            "Gamma": _rel_mismatch(m.sigma_plus.Gamma_es, m.sigma_minus.Gamma_es),
        }
    return MemoryCheckReport(
        passed=all(v <= rel_tol for v in mismatches.values()),
        mismatches=mismatches,
    )


@dataclass(frozen=True)
class MemoryEfficiencyReport:
    sigma_plus: EfficiencyReport
    sigma_minus: EfficiencyReport
    overall_eta: float
    overall_eta_sf: float


def memory_efficiency(m: MemorySetup) -> MemoryEfficiencyReport:
    """Per-branch transfer efficiencies; the overall figure is the worst branch."""
    eff = cavity_efficiency if m.is_cavity else waveguide_efficiency
    plus = eff(m.sigma_plus)
    minus = eff(m.sigma_minus)
    return MemoryEfficiencyReport(
        sigma_plus=plus,
        sigma_minus=minus,
        overall_eta=min(plus.eta, minus.eta),
        overall_eta_sf=min(plus.eta_sf, minus.eta_sf),
    )


@dataclass(frozen=True)
class CavityBranch:
    """One re-emission branch of the converter: coupling g, loss kappa, background gamma."""

    g: float
    kappa: float
    gamma: float

    def __post_init__(self):
        for name in ("g", "kappa", "gamma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidParametersError(f"{name} must be finite and >= 0, got {v!r}")
        if self.kappa == 0 and self.g > 0:
            raise InvalidSetupError("cavity branch with kappa = 0 cannot have g > 0")

    def guided_rate(self) -> float:
        return 2.0 * self.g**2 / self.kappa if self.kappa > 0 else 0.0


@dataclass(frozen=True)
class WaveguideBranch:
    """One re-emission branch of the converter: guided rate Gamma, background gamma."""

    Gamma: float
    gamma: float

    def __post_init__(self):
        for name in ("Gamma", "gamma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InvalidParametersError(f"{name} must be finite and >= 0, got {v!r}")

    def guided_rate(self) -> float:
        return self.Gamma


ConverterBranch = Union[CavityBranch, WaveguideBranch]

_BRANCH_KEYS = ("high_plus", "high_minus", "low_plus", "low_minus")


@dataclass(frozen=True)
class ConverterSetup:
    """The four converter branches: sigma+- at the high and low frequency."""

    high_plus: ConverterBranch
    high_minus: ConverterBranch
    low_plus: ConverterBranch
    low_minus: ConverterBranch

    def __post_init__(self):
        kinds = {type(getattr(self, k)) for k in _BRANCH_KEYS}
        if len(kinds) != 1:
            raise InvalidSetupError("all four branches must use the same scenario kind")

    def branches(self) -> Dict[str, ConverterBranch]:
        return {k: getattr(self, k) for k in _BRANCH_KEYS}


@dataclass(frozen=True)
class ConverterCheckReport:
    passed: bool
    ratios: Dict[str, float]


def converter_check(c: ConverterSetup, factor: float = 10.0) -> ConverterCheckReport:
    """Guided-to-background ratio per branch; every ratio must be >= factor.

    The ratio is (2 g^2 / kappa) / gamma for a cavity branch and
    Gamma / gamma for a waveguide branch; gamma = 0 reports infinity.
    """
    if not factor > 1:
        raise InvalidInputError(f"factor must be > 1, got {factor!r}")
    ratios = {}
    for name, branch in c.branches().items():
        guided = branch.guided_rate()
        if branch.gamma == 0:
            ratios[name] = math.inf
        else:
            ratios[name] = guided / branch.gamma
    return ConverterCheckReport(
        passed=all(r >= factor for r in ratios.values()),
        ratios=ratios,
    )
