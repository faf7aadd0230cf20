"""Scenario parameter types and derived rate quantities.

All rates are dimensionless, expressed in units of a reference rate (the
s-side vacuum Rabi frequency for cavity scenarios, the s-side waveguide
emission rate for waveguide scenarios); times are in inverse reference-rate
units.  Coupling constants are real and non-negative: every observable
implemented here depends only on their squared magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from .errors import InvalidParametersError


def _require_finite_nonnegative(**fields: float) -> None:
    for name, value in fields.items():
        if not math.isfinite(value):
            raise InvalidParametersError(f"{name} must be finite, got {value!r}")
        if value < 0:
            raise InvalidParametersError(f"{name} must be >= 0, got {value!r}")


@dataclass(frozen=True)
class CavityParams:
    """Rates defining a single-sided-cavity scenario.

    Attributes
    ----------
    g_es, g_ef : float
        Vacuum Rabi frequencies of the e-s and e-f transitions.
    kappa_es, kappa_ef : float
        Cavity half-loss rates of the two modes (photon leakage into the
        input/output channel happens at twice these values).
    gamma_es, gamma_ef : float
        Background spontaneous decay rates of the two dipole transitions.
    gamma_eo : float
        Spontaneous decay rate from the excited state to levels outside
        the three-level system.
    """

    g_es: float
    kappa_es: float
    g_ef: float = 0.0
    kappa_ef: float = 0.0
    gamma_es: float = 0.0
    gamma_ef: float = 0.0
    gamma_eo: float = 0.0

    def __post_init__(self):
        _require_finite_nonnegative(
            g_es=self.g_es,
            g_ef=self.g_ef,
            kappa_es=self.kappa_es,
            kappa_ef=self.kappa_ef,
            gamma_es=self.gamma_es,
            gamma_ef=self.gamma_ef,
            gamma_eo=self.gamma_eo,
        )
        # A coupled cavity mode needs a loss channel, otherwise its
        # cooperativity (and the transition rate chi) diverges.
        if self.kappa_es == 0 and self.g_es > 0:
            raise InvalidParametersError("kappa_es = 0 requires g_es = 0")
        if self.kappa_ef == 0 and self.g_ef > 0:
            raise InvalidParametersError("kappa_ef = 0 requires g_ef = 0")

    def all_rates(self) -> Tuple[float, ...]:
        return (
            self.g_es,
            self.g_ef,
            self.kappa_es,
            self.kappa_ef,
            self.gamma_es,
            self.gamma_ef,
            self.gamma_eo,
        )


@dataclass(frozen=True)
class WaveguideParams:
    """Rates defining a waveguide (or free-space) scenario.

    Attributes
    ----------
    Gamma_es, Gamma_ef : float
        Photon emission rates into the guided modes for the two transitions.
    gamma_es, gamma_ef : float
        Emission rates out of the waveguide into background modes.
    gamma_eo : float
        Decay rate to states outside the three-level system.
    """

    Gamma_es: float
    Gamma_ef: float = 0.0
    gamma_es: float = 0.0
    gamma_ef: float = 0.0
    gamma_eo: float = 0.0

    def __post_init__(self):
        _require_finite_nonnegative(
            Gamma_es=self.Gamma_es,
            Gamma_ef=self.Gamma_ef,
            gamma_es=self.gamma_es,
            gamma_ef=self.gamma_ef,
            gamma_eo=self.gamma_eo,
        )

    def all_rates(self) -> Tuple[float, ...]:
        return (
            self.Gamma_es,
            self.Gamma_ef,
            self.gamma_es,
            self.gamma_ef,
            self.gamma_eo,
        )


ScenarioParams = Union[CavityParams, WaveguideParams]


@dataclass(frozen=True)
class DerivedRates:
    """Transition rates chi and (where defined) cooperativities.

    ``C_es``/``C_ef`` are ``None`` when the cooperativity is undefined
    (zero cavity loss or zero background decay) or not applicable
    (waveguide scenarios).
    """

    chi_es: float
    chi_ef: float
    C_es: Optional[float] = None
    C_ef: Optional[float] = None


def _cavity_chi(g: float, kappa: float, gamma: float) -> float:
    # gamma-free algebraic form of gamma*(1 + 2C): exact in the gamma -> 0 limit.
    if kappa > 0:
        return gamma + 2.0 * g * g / kappa
    return gamma


def derive_cavity_rates(p: CavityParams) -> DerivedRates:
    """Transition rates chi_k = gamma_k + 2 g_k^2 / kappa_k and cooperativities.

    The cooperativity C_k = g_k^2 / (kappa_k * gamma_k) is reported only when
    both kappa_k and gamma_k are positive; otherwise it is ``None``.
    """
    if p.kappa_es == 0 and p.g_es > 0:
        raise InvalidParametersError("kappa_es = 0 requires g_es = 0")
    if p.kappa_ef == 0 and p.g_ef > 0:
        raise InvalidParametersError("kappa_ef = 0 requires g_ef = 0")

    def coop(g: float, kappa: float, gamma: float) -> Optional[float]:
        if kappa > 0 and gamma > 0:
            return g * g / (kappa * gamma)
        return None

    return DerivedRates(
        chi_es=_cavity_chi(p.g_es, p.kappa_es, p.gamma_es),
        chi_ef=_cavity_chi(p.g_ef, p.kappa_ef, p.gamma_ef),
        C_es=coop(p.g_es, p.kappa_es, p.gamma_es),
        C_ef=coop(p.g_ef, p.kappa_ef, p.gamma_ef),
    )


def derive_waveguide_rates(p: WaveguideParams) -> DerivedRates:
    """Transition rates chi_k = gamma_k + Gamma_k; cooperativities do not apply."""
    return DerivedRates(
        chi_es=p.gamma_es + p.Gamma_es,
        chi_ef=p.gamma_ef + p.Gamma_ef,
    )


def free_space_params(
    Gamma_es: float,
    gamma_es: float,
    Gamma_ef: float,
    gamma_eo: float = 0.0,
) -> WaveguideParams:
    """Waveguide-form parameters for a free-space scenario.

    In free space the guided e-f reservoir is the only channel on that
    transition, so the background rate gamma_ef is zero by construction.
    """
    return WaveguideParams(
        Gamma_es=Gamma_es,
        Gamma_ef=Gamma_ef,
        gamma_es=gamma_es,
        gamma_ef=0.0,
        gamma_eo=gamma_eo,
    )
