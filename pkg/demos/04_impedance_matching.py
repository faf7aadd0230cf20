"""Balancing the two decay channels: diagnostics and the one-unknown solver.

The transfer efficiency is the product of a channel-balance prefactor and
an input-coupling factor.  This demo inspects an unbalanced setup, solves
for the coupling that balances it, and shows the infeasible case where
the fixed channel is already too strong.
"""

from qtransfer import (
    CavityParams,
    InfeasibleMatchingError,
    cavity_efficiency,
    check_conditions,
    derive_cavity_rates,
    matched_params,
    solve_matching,
)

p = CavityParams(g_es=1, kappa_es=1, g_ef=0.4, kappa_ef=1,
                 gamma_es=0.01, gamma_ef=0.01)
rates = derive_cavity_rates(p)
report = cavity_efficiency(p)
check = check_conditions(report, p)

print("== unbalanced cavity ==")
print(f"chi_es = {rates.chi_es:.4f}, chi_ef = {rates.chi_ef:.4f}, C_es = {rates.C_es:.1f}")
print(f"eta = {report.eta:.6f}, matching deviation = {check.matching_deviation:.4f}, "
      f"limiting factor = {report.limiting_factor.value}")

print()
print("== solve for the balancing g_ef ==")
value = solve_matching(p, "g_ef")
q = matched_params(p, "g_ef")
fixed = derive_cavity_rates(q)
print(f"g_ef -> {value:.6f}")
print(f"chi_es = {fixed.chi_es:.6f}, chi_ef = {fixed.chi_ef:.6f} "
      f"(residual {abs(fixed.chi_es - fixed.chi_ef):.2e})")
print(f"eta rises {report.eta:.6f} -> {cavity_efficiency(q).eta:.6f}")

print()
print("== infeasible direction ==")
weak = CavityParams(g_es=0.1, kappa_es=1, gamma_es=0.08, g_ef=0, kappa_ef=1, gamma_ef=0.5)
try:
    solve_matching(weak, "g_ef")
except InfeasibleMatchingError as err:
    print(f"as expected: {err}")
    print(f"deficit = {err.deficit:.3f} (rate that would have to be removed from the e-f side)")
