"""Two applications: a polarization-qubit memory and a frequency converter.

Storing a polarization qubit needs the two circular-polarization branches
to be indistinguishable to the emitted photon (equal couplings and loss
rates); converting between wavelengths additionally needs every
re-emission branch to feed the guided channel much faster than the
background.
"""

from qtransfer import (
    CavityBranch,
    CavityParams,
    ConverterSetup,
    MemorySetup,
    WaveguideParams,
    converter_check,
    memory_check,
    memory_efficiency,
)

print("== quantum memory: branch symmetry ==")
branch = CavityParams(g_es=1, kappa_es=1, g_ef=1, kappa_ef=1, gamma_es=1e-3, gamma_ef=1e-3)
good = MemorySetup(sigma_plus=branch, sigma_minus=branch)
report = memory_check(good)
print(f"identical branches: verdict = {'pass' if report.passed else 'fail'}, "
      f"mismatches = {report.mismatches}")
eff = memory_efficiency(good)
print(f"per-branch eta = {eff.sigma_plus.eta:.6f}; overall storage eta = {eff.overall_eta:.6f}")

skew = MemorySetup(
    sigma_plus=branch,
    sigma_minus=CavityParams(g_es=1.1, kappa_es=1, g_ef=1, kappa_ef=1,
                             gamma_es=1e-3, gamma_ef=1e-3),
)
report = memory_check(skew, rel_tol=0.05)
print(f"10% coupling skew:  verdict = {'pass' if report.passed else 'fail'}, "
      f"mismatches = { {k: round(v, 4) for k, v in report.mismatches.items()} }")

print()
print("== waveguide memory ignores background asymmetry ==")
wg = MemorySetup(
    sigma_plus=WaveguideParams(Gamma_es=1, Gamma_ef=1, gamma_es=0.02),
    sigma_minus=WaveguideParams(Gamma_es=1, Gamma_ef=1, gamma_es=0.08),
)
print(f"verdict = {'pass' if memory_check(wg).passed else 'fail'} "
      "(only the guided rates must match)")

print()
print("== frequency converter: four re-emission branches ==")
strong = CavityBranch(g=1, kappa=1, gamma=0.01)
weak = CavityBranch(g=1, kappa=1, gamma=0.5)
ok = converter_check(ConverterSetup(strong, strong, strong, strong))
print(f"all strong: verdict = {'pass' if ok.passed else 'fail'}, ratios = "
      f"{ {k: round(v, 1) for k, v in ok.ratios.items()} }")
bad = converter_check(ConverterSetup(strong, strong, strong, weak))
print(f"one weak:   verdict = {'pass' if bad.passed else 'fail'}, "
      f"ratio_low_minus = {bad.ratios['low_minus']:.1f} (needs >= 10)")
