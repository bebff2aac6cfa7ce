#!/usr/bin/env python3
"""Regenerate the bundled Rb level and dipole tables.

Requires ARC (pip install ARC-Alkali-Rydberg-Calculator). Low-lying
5s-np matrix elements are literature values and are written verbatim;
Rydberg ns-np matrix elements come from ARC's model-potential Numerov
radial integrals, scaled by sqrt((2j'+1)/3) for the s1/2 -> p_j' reduced
element.
"""
import math
import sys

from arc import Rubidium87
from scipy.constants import c, e, h

EV_TO_CM1 = e / (h * c * 100.0)
L_LETTER = "spdfgh"

atom = Rubidium87()
ground_ev = atom.getEnergy(5, 0, 0.5)


def label(n, l, two_j):
    return f"{n}{L_LETTER[l]}{two_j}/2"


def energy_cm1(n, l, j):
    return (atom.getEnergy(n, l, j) - ground_ev) * EV_TO_CM1


def level_source(n, l):
    if n < atom.minQuantumDefectN:
        return "NIST ASD via ARC"
    return "Rydberg-Ritz quantum defects via ARC"


def levels():
    out = []
    for l, n_lo, n_hi in ((0, 5, 25), (1, 5, 25), (2, 4, 24), (3, 4, 14)):
        for n in range(n_lo, n_hi + 1):
            for two_j in sorted({2 * l - 1, 2 * l + 1}):
                if two_j <= 0:
                    continue
                out.append((label(n, l, two_j), n, l, two_j,
                            energy_cm1(n, l, two_j / 2), level_source(n, l)))
    out.sort(key=lambda r: (r[4], r[0]))
    return out


# 5s-5p: Volz & Schmoranzer, Phys. Scr. T65, 48 (1996).
# 5s-6p..8p: relativistic SD all-order literature values;
# 1 % relative uncertainty assumed where the source quotes none.
GROUND_DIPOLES = [
    ("5s1/2", "5p1/2", 4.231, 0.003, "experiment (Volz & Schmoranzer 1996)"),
    ("5s1/2", "5p3/2", 5.977, 0.005, "experiment (Volz & Schmoranzer 1996)"),
    ("5s1/2", "6p1/2", 0.333, 0.003, "SD all-order literature value"),
    ("5s1/2", "6p3/2", 0.541, 0.005, "SD all-order literature value"),
    ("5s1/2", "7p1/2", 0.115, 0.001, "SD all-order literature value"),
    ("5s1/2", "7p3/2", 0.202, 0.002, "SD all-order literature value"),
    ("5s1/2", "8p1/2", 0.059, 0.001, "SD all-order literature value"),
    ("5s1/2", "8p3/2", 0.111, 0.001, "SD all-order literature value"),
]


def rydberg_dipoles():
    out = []
    for ns in range(6, 24):
        for n in range(5, 24):
            for two_j in (1, 3):
                j = two_j / 2
                radial = atom.getRadialMatrixElement(ns, 0, 0.5, n, 1, j)
                value = math.sqrt((two_j + 1) / 3.0) * radial
                out.append((label(ns, 0, 1), label(n, 1, two_j), value, 0.0,
                            "ARC model-potential Numerov"))
    return out


def main(levels_path, dipoles_path):
    with open(levels_path, "w") as f:
        f.write("# Rb I fine-structure levels, energies relative to 5s1/2.\n")
        f.write("# Provenance per row in the source column.\n")
        f.write("label,n,l,two_j,energy_cm1,source\n")
        for row in levels():
            f.write("%s,%d,%d,%d,%.3f,%s\n" % row)
    with open(dipoles_path, "w") as f:
        f.write("# Reduced E1 matrix elements <a||D||b> in atomic units.\n")
        f.write("# Rydberg rows carry no uncertainty estimate (0).\n")
        f.write("state_a,state_b,reduced_me_au,uncertainty_au,source\n")
        for a, b, v, u, s in GROUND_DIPOLES:
            f.write(f"{a},{b},{v:.3f},{u:.3f},{s}\n")
        for a, b, v, u, s in rydberg_dipoles():
            f.write(f"{a},{b},{v:.4f},{u:.1f},{s}\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
