"""Closed-form transfer efficiencies, matching conditions and the matching solver.

The adiabatic-limit efficiency factorizes into a channel-balance prefactor
4 a b / (a + b)^2 with a = chi_es, b = chi_ef + gamma_eo, and a scenario
entry factor (2 C_es / (1 + 2 C_es) for a cavity, Gamma_es / (Gamma_es +
gamma_es) for a waveguide).  The prefactor is maximal exactly when the two
effective channel rates balance, which plays the role of an impedance
matching condition.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from .errors import (
    InfeasibleMatchingError,
    InvalidInputError,
    UndefinedEfficiencyError,
)
from .params import (
    CavityParams,
    ScenarioParams,
    WaveguideParams,
    derive_cavity_rates,
    derive_waveguide_rates,
)


class LimitingFactor(enum.Enum):
    IMPEDANCE_MISMATCH = "impedance-mismatch"
    BACKGROUND_LOSS = "background-loss"
    OTHER_DECAY = "other-decay"
    NONE = "none"


@dataclass(frozen=True)
class EfficiencyReport:
    """Adiabatic-limit transfer probabilities and the quantities behind them.

    ``eta`` is the probability of leaving the initial level at all;
    ``eta_sf`` the probability of ending in the target level.  The
    ``limiting_factor`` names the repair (balance the channels, remove the
    background loss, or remove the decay to other states) that would gain
    the most probability.
    """

    eta: float
    eta_sf: float
    chi_es: float
    chi_ef: float
    matching_ratio: float
    limiting_factor: LimitingFactor


def _mismatch_prefactor(a: float, b: float) -> float:
    if a <= 0 or b <= 0:
        return 0.0
    return 4.0 * a * b / (a + b) ** 2


def _classify(
    eta_sf: float,
    chi_es: float,
    chi_ef: float,
    gamma_eo: float,
    entry: float,
    prefactor: float,
) -> LimitingFactor:
    b = chi_ef + gamma_eo
    sf_share = chi_ef / b if b > 0 else 0.0
    repaired = {
        LimitingFactor.IMPEDANCE_MISMATCH: entry * sf_share,
        LimitingFactor.BACKGROUND_LOSS: prefactor * sf_share,
        LimitingFactor.OTHER_DECAY: _mismatch_prefactor(chi_es, chi_ef) * entry,
    }
    best = LimitingFactor.NONE
    best_gain = 1e-12
    for factor, value in repaired.items():
        gain = value - eta_sf
        if gain > best_gain:
            best = factor
            best_gain = gain
    return best


def _report(
    chi_es: float,
    chi_ef: float,
    gamma_eo: float,
    entry: float,
) -> EfficiencyReport:
    b = chi_ef + gamma_eo
    prefactor = _mismatch_prefactor(chi_es, b)
    eta = prefactor * entry
    eta_sf = eta * (chi_ef / b) if b > 0 else 0.0
    matching_ratio = chi_es / b if b > 0 else math.inf
    return EfficiencyReport(
        eta=eta,
        eta_sf=eta_sf,
        chi_es=chi_es,
        chi_ef=chi_ef,
        matching_ratio=matching_ratio,
        limiting_factor=_classify(eta_sf, chi_es, chi_ef, gamma_eo, entry, prefactor),
    )


def cavity_efficiency(p: CavityParams) -> EfficiencyReport:
    """Adiabatic-limit efficiency of the cavity scenario.

    eta = [4 chi_es (chi_ef + gamma_eo) / (chi_es + chi_ef + gamma_eo)^2]
          * [2 C_es / (1 + 2 C_es)],  eta_sf = eta * chi_ef / (chi_ef + gamma_eo).
    """
    rates = derive_cavity_rates(p)
    if rates.chi_es + rates.chi_ef + p.gamma_eo <= 0:
        raise UndefinedEfficiencyError("all transition rates vanish; efficiency undefined")
    # 2C/(1+2C) in the gamma-free form 2 g^2 / (kappa chi): exact as gamma -> 0
    if p.kappa_es > 0 and rates.chi_es > 0:
        entry = 2.0 * p.g_es**2 / (p.kappa_es * rates.chi_es)
    else:
        entry = 0.0
    return _report(rates.chi_es, rates.chi_ef, p.gamma_eo, entry)


def waveguide_efficiency(p: WaveguideParams) -> EfficiencyReport:
    """Adiabatic-limit efficiency of the waveguide (or free-space) scenario.

    eta = [4 chi_es (chi_ef + gamma_eo) / (chi_es + chi_ef + gamma_eo)^2]
          * [Gamma_es / (Gamma_es + gamma_es)].
    """
    if p.Gamma_es + p.gamma_es <= 0:
        raise UndefinedEfficiencyError("Gamma_es + gamma_es must be > 0")
    rates = derive_waveguide_rates(p)
    entry = p.Gamma_es / (p.Gamma_es + p.gamma_es)
    return _report(rates.chi_es, rates.chi_ef, p.gamma_eo, entry)


def efficiency(p: ScenarioParams) -> EfficiencyReport:
    """Dispatch on the scenario parameter type."""
    if isinstance(p, CavityParams):
        return cavity_efficiency(p)
    return waveguide_efficiency(p)


@dataclass(frozen=True)
class ConditionCheck:
    """Verdicts for the two requirements behind near-unit efficiency."""

    matching_deviation: float
    matching_ok: bool
    coupling_ratio: float
    coupling_ok: bool

    @property
    def passed(self) -> bool:
        return self.matching_ok and self.coupling_ok


def check_conditions(
    report: EfficiencyReport,
    p: ScenarioParams,
    factor: float = 10.0,
    matching_tol: float = 0.01,
) -> ConditionCheck:
    """Evaluate the matching and strong-coupling conditions.

    The matching deviation is |chi_es - chi_ef - gamma_eo| / (chi_es +
    chi_ef + gamma_eo) and passes below ``matching_tol``.  The coupling
    ratio is C_es for a cavity and Gamma_es / gamma_es for a waveguide;
    "much greater than one" is operationalized as >= ``factor``.
    """
    denom = report.chi_es + report.chi_ef + p.gamma_eo
    deviation = (
        abs(report.chi_es - report.chi_ef - p.gamma_eo) / denom if denom > 0 else math.inf
    )
    if isinstance(p, CavityParams):
        if p.gamma_es > 0 and p.kappa_es > 0:
            ratio = p.g_es**2 / (p.kappa_es * p.gamma_es)
        elif p.g_es > 0:
            ratio = math.inf
        else:
            ratio = 0.0
    else:
        if p.gamma_es > 0:
            ratio = p.Gamma_es / p.gamma_es
        elif p.Gamma_es > 0:
            ratio = math.inf
        else:
            ratio = 0.0
    return ConditionCheck(
        matching_deviation=deviation,
        matching_ok=deviation <= matching_tol,
        coupling_ratio=ratio,
        coupling_ok=ratio >= factor,
    )


_CAVITY_FREE = ("g_es", "g_ef", "gamma_es", "gamma_ef")
_WAVEGUIDE_FREE = ("Gamma_es", "Gamma_ef", "gamma_es", "gamma_ef")


def solve_matching(p: ScenarioParams, free: str) -> float:
    """Value of one free parameter that balances chi_es = chi_ef + gamma_eo.

    All other parameters stay fixed.  Raises
    :class:`~qtransfer.errors.InfeasibleMatchingError` (carrying the
    missing rate as ``deficit``) when no non-negative value works.
    """
    free = free.replace("-", "_")
    if isinstance(p, CavityParams):
        if free not in _CAVITY_FREE:
            raise InvalidInputError(
                f"free parameter must be one of {_CAVITY_FREE} for a cavity, got {free!r}"
            )
        rates = derive_cavity_rates(p)
        if free == "g_ef":
            need = rates.chi_es - p.gamma_ef - p.gamma_eo  # = 2 g_ef^2 / kappa_ef
            if need < 0:
                raise InfeasibleMatchingError(
                    f"matching needs 2 g_ef^2/kappa_ef = {need}, impossible", deficit=-need
                )
            if p.kappa_ef == 0:
                if need == 0:
                    return 0.0
                raise InfeasibleMatchingError(
                    f"kappa_ef = 0 forbids g_ef coupling but {need} of rate is required",
                    deficit=need,
                )
            return math.sqrt(p.kappa_ef * need / 2.0)
        if free == "g_es":
            need = rates.chi_ef + p.gamma_eo - p.gamma_es
            if need < 0:
                raise InfeasibleMatchingError(
                    f"matching needs 2 g_es^2/kappa_es = {need}, impossible", deficit=-need
                )
            if p.kappa_es == 0:
                if need == 0:
                    return 0.0
                raise InfeasibleMatchingError(
                    f"kappa_es = 0 forbids g_es coupling but {need} of rate is required",
                    deficit=need,
                )
            return math.sqrt(p.kappa_es * need / 2.0)
        if free == "gamma_ef":
            value = rates.chi_es - p.gamma_eo - _coupling_rate(p.g_ef, p.kappa_ef)
            return _require_nonnegative(value, free)
        value = rates.chi_ef + p.gamma_eo - _coupling_rate(p.g_es, p.kappa_es)
        return _require_nonnegative(value, free)

    if free not in _WAVEGUIDE_FREE:
        raise InvalidInputError(
            f"free parameter must be one of {_WAVEGUIDE_FREE} for a waveguide, got {free!r}"
        )
    rates = derive_waveguide_rates(p)
    if free == "Gamma_ef":
        return _require_nonnegative(rates.chi_es - p.gamma_ef - p.gamma_eo, free)
    if free == "Gamma_es":
        return _require_nonnegative(rates.chi_ef + p.gamma_eo - p.gamma_es, free)
    if free == "gamma_ef":
        return _require_nonnegative(rates.chi_es - p.gamma_eo - p.Gamma_ef, free)
    return _require_nonnegative(rates.chi_ef + p.gamma_eo - p.Gamma_es, free)


def matched_params(p: ScenarioParams, free: str) -> ScenarioParams:
    """Copy of ``p`` with the free parameter replaced by its matching value."""
    value = solve_matching(p, free)
    return replace(p, **{free.replace("-", "_"): value})


def _coupling_rate(g: float, kappa: float) -> float:
    return 2.0 * g * g / kappa if kappa > 0 else 0.0


def _require_nonnegative(value: float, name: str) -> float:
    if value < 0:
        raise InfeasibleMatchingError(
            f"matching requires {name} = {value} < 0", deficit=-value
        )
    return value
