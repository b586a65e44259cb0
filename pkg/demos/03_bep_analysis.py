"""Per-bit error probabilities of Gray-coded 8-DPSK on a two-branch channel.

Bits j1 and j2 are single half-plane decisions and come out identical. For
j3 two routes are shown: the published closed form and a corrected closed form
for the actual sign-of-product decision. Only the corrected one agrees with
simulation (see 04_monte_carlo.py).
"""

from mdpsk_div import bep_average, bep_j3_exact, resolve_branches, spectral_params
from mdpsk_div.config import DEFAULT_CONFIG, parse_config

config, _ = parse_config(DEFAULT_CONFIG)
print("gamma_b/dB   p_j1=p_j2     p_j3 published  p_j3 corrected  p_avg corrected")
for gi, snr in enumerate(config.snr_db):
    p = spectral_params(resolve_branches(config, gi))
    r = bep_average(p)
    x = bep_j3_exact(p)
    print(f"{snr:8.0f}    {r.p_j1:.4e}    {r.p_j3:.4e}      {x:.4e}      {(2 * r.p_j1 + x) / 3:.4e}")

print("\nThe published j3 curve drops below j1 at higher SNR; the corrected one stays about twice j1,")
print("which is what four decision boundaries instead of two should give.")
