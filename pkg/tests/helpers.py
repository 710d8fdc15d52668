"""Shared test utilities: brute-force oracles and config-file builders.

The oracles here are deliberately primitive (uniform midpoint rules) and
independent of the production quadrature path; they exist to bound the
production results, not to be fast.
"""

import math

import numpy as np

from magcas import _kernels


def riemann_2d(f, a, b, n):
    """Midpoint Riemann sum of f over [a, b]^2 with n x n cells, row-chunked."""
    h = (b - a) / n
    x = a + h * (np.arange(n) + 0.5)
    total = 0.0
    for xi in x:
        total += float(np.sum(f(xi, x)))
    return total * h * h


def afm_casimir_oracle(params, n_z, nperp=512, nkz=65536):
    """Brute-force AFM Casimir energy: nperp^2 midpoint in-plane grid,
    nkz-point midpoint k_z rule, 8-fold symmetry reduction."""
    m = np.arange(nperp // 2, dtype=float)
    u = math.pi * (2 * m + 1) / nperp
    mult = np.zeros((u.size, u.size))
    for i in range(u.size):
        mult[i, i] = 4.0
        mult[i, i + 1:] = 8.0
    kz = 2.0 * math.pi * (np.arange(nkz) + 0.5) / nkz
    regz4 = 0.5 * (1.0 - np.cos(kz))
    ns = np.arange(1, 2 * n_z + 1, dtype=float)
    regs4 = 0.5 * (1.0 - np.cos(math.pi * ns / n_z))
    total = _kernels.afm_midpoint_casimir(u, mult, n_z, params.delta, regs4, regz4)
    return params.hbar_omega0 * total / nperp ** 2


YIG_CONFIG = """\
# ferrimagnet bundle quoted in ueV
kind = Ferrimagnet
name = YIG
provenance = yttrium iron garnet thin film, block-spin estimate
a_nm = 1.2376
H0_ueV = 8.10373
hbar_omegaM_ueV = 20.3369
delta_plus_meV = 2.13191
delta_minus_meV = 41.98072
D_over_a2_meV = 3.37645
"""

CR2O3_CONFIG = """\
kind = AFM
name = Cr2O3
a_nm = 0.49607
J_meV = 15.0
S = 1.5
K_meV = 0.03
"""
