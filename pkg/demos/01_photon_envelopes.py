"""Single-photon envelopes: evaluation, normalization, RMS bandwidth.

The two analytic envelope families are normalized so that the photon
certainly arrives, and their normalizing constants make the RMS bandwidth
equal to the nominal parameter.  Arbitrary sampled envelopes (two- or
three-column CSV) are supported through linear interpolation.
"""

import numpy as np

from qtransfer import PulseEnvelope

print("== analytic envelopes ==")
for make in (PulseEnvelope.gaussian, PulseEnvelope.antisymmetric):
    for dw in (0.05, 1.0, 3.0):
        env = make(dw)
        print(
            f"{env.kind:>13s}  dw={dw:<5g} "
            f"norm^2 = {env.norm_squared():.12f}  "
            f"bandwidth = {env.bandwidth():.9g}"
        )

print()
print("== peak values and symmetry ==")
g = PulseEnvelope.gaussian(1.0)
a = PulseEnvelope.antisymmetric(1.0)
print(f"gaussian(t=0)      = {g(0.0).real:.6f}   (expect (2/pi)^(1/4) = {(2/np.pi)**0.25:.6f})")
print(f"antisymmetric(t=0) = {a(0.0).real:.6f}   (odd function)")
t = np.linspace(-4, 4, 9)
print("antisymmetric is odd:", np.array_equal(a(-t), -a(t)))

print()
print("== tabulated envelope from samples ==")
dw = 0.5
t = np.linspace(-10 / dw, 10 / dw, 4096)
tab = PulseEnvelope.tabulated(t, g_samples := PulseEnvelope.gaussian(dw)(t))
print(f"sampled gaussian: norm^2 = {tab.norm_squared():.8f}, bandwidth = {tab.bandwidth():.6f}")
print(f"support window: {tab.support}")
