# Where does the gate stop beating the effective decay? Prints the
# crossing diameter (omega_gate = gamma_eff) for a few off-resonance
# choices, for bulk and shallow-implant optical linewidths, with and
# without the second excited branch in the Raman amplitude.

from dataclasses import replace

from nvphonon.analysis import crossing_diameter
from nvphonon.material import diamond_default

# ordinary-frequency strain-coupling convention, as in the fig2c preset
mat = replace(diamond_default(), zeta=6.1e14)

print("kappa2   bulk d* (nm)   nd d* (nm)   bulk, single-branch (nm)")
for k2 in (0.05, 0.1, 0.35):
    d_bulk = crossing_diameter(k2, mat)
    d_nd = crossing_diameter(k2, mat, gamma=mat.gamma_nd)
    d_single = crossing_diameter(k2, mat, second_state=False)
    print(f"{k2:6.2f}   {d_bulk * 1e9:12.2f}   {d_nd * 1e9:10.2f}"
          f"   {d_single * 1e9:24.2f}")

# halving gamma moves the single-branch crossing by exactly sqrt(2)
d1 = crossing_diameter(0.05, mat, second_state=False)
d2 = crossing_diameter(0.05, mat, second_state=False, gamma=mat.gamma_nd)
print(f"\nsingle-branch nd/bulk crossing ratio: {d2 / d1:.6f}"
      f" (sqrt 2 = 1.414214)")
