"""Frozen closed-form reference values.

Each value is derived by hand from the two-level eigenvalue formula and the
rotation-angle eigenvectors, or from the affine coalescence condition
``eps1(a) - eps2(a) = +-2i omega``; none is produced by the code under test.
"""
import math

# exceptional points of the two-level presets (exact real roots)
EP_LOCATIONS = {
    "fig1a-d": (-0.1, 0.1),  # d = +-2 omega_0, omega_0 = 0.05
    "fig1e-h": (0.8, 1.2),  # gamma1 - gamma2 = a - 1 = +-4 omega -> +-0.2
    "fig2a-d": (0.05,),  # other root -0.05 + 0.1i is complex
    "fig2e-h": (0.9,),
    "fig3a-d": (-1.0, 1.0),
    "fig3e-h": (-0.5,),
    "fig4a-e": (0.6,),
    "fig4f-j": (2.0,),
    "fig6-2lev": (0.51,),
}

# fig1a-d at d = 0: 2/3 - i/2 +- 0.05i
FIG1_D0_EIGENVALUES = (complex(2 / 3, -0.55), complex(2 / 3, -0.45))

# fig1a-d at d = 0.12: 4 Z**2 = 0.0044, cos 2t = -0.12 / (2Z), sin 2t = i 0.05 / Z.
# A = 1 / r = |cos t|**2 + |sin t|**2 = |cos 2t| = 6 / sqrt(11)
FIG1_D012_A = 6 / math.sqrt(11)
FIG1_D012_R = math.sqrt(11) / 6
FIG1_D012_B = 5 / math.sqrt(11)  # |sin 2t|
FIG1_D012_B_ROW = (
    math.sqrt((FIG1_D012_A + 1) / 2),
    math.sqrt((FIG1_D012_A - 1) / 2),
)

# the values listed for the same point in the acceptance list
STATED_D012 = {"r": 0.5486, "A": 1.8227, "B": 1.5226, "b": (1.1885, 0.6405)}

# fig3a-d at a = 0.5: 0.5 +- sqrt(0.0075) / 2
FIG3_A05_EIGENVALUES = (0.5 - math.sqrt(0.0075) / 2, 0.5 + math.sqrt(0.0075) / 2)

# two-level seeds of the three-level clustering preset: |e1 - e2| = 2 omega_0
FIG5_SEEDS = ((1 - 0.02) * 2 / 3, (1 + 0.02) * 2 / 3)
