"""Waveguide and free-space scenarios: no resonator required.

The same channel-balance logic applies when the emitter couples directly
to guided or focused free-space modes.  The excited-state amplitude obeys
a single driven decay equation; an independent convolution oracle checks
the integrator, and the free-space helper builds the parameter set where
the guided e-f reservoir is the only channel on that transition.
"""

import numpy as np

from qtransfer import (
    PulseEnvelope,
    WaveguideParams,
    free_space_params,
    simulate_waveguide,
    waveguide_adiabatic_threshold,
    waveguide_amplitude_analytic,
    waveguide_efficiency,
)

print("== matched waveguide ==")
p = WaveguideParams(Gamma_es=1, Gamma_ef=1)
env = PulseEnvelope.gaussian(2e-3)
traj, out = simulate_waveguide(p, env, record_every=2000)
print(f"P_sf = {out.P_sf:.9f} (closed form {waveguide_efficiency(p).eta:.9f})")
print(f"adiabatic threshold = {waveguide_adiabatic_threshold(p)}")

print()
print("== integrator vs convolution oracle ==")
check_times = traj.times[:: max(1, traj.times.size // 6)]
worst = max(
    abs(waveguide_amplitude_analytic(p, env, float(t)) - traj.states[np.searchsorted(traj.times, t)])
    for t in check_times
)
print(f"max |ODE - convolution| over {len(check_times)} sample times = {worst:.2e}")

print()
print("== free space: branching-ratio robustness ==")
exact = free_space_params(Gamma_es=1, gamma_es=0, Gamma_ef=1)
skewed = free_space_params(Gamma_es=1, gamma_es=0, Gamma_ef=2)
print(f"equal branching:      eta = {waveguide_efficiency(exact).eta:.6f}")
print(f"factor-2 branching:   eta = {waveguide_efficiency(skewed).eta:.6f} (= 8/9)")
lossy = free_space_params(Gamma_es=1, gamma_es=0, Gamma_ef=1, gamma_eo=0.25)
rep = waveguide_efficiency(lossy)
print(f"with decay elsewhere: eta = {rep.eta:.6f}, eta_sf = {rep.eta_sf:.6f} "
      f"(limited by {rep.limiting_factor.value})")
