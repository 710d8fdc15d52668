"""Lattice-regularized magnon dispersions for AFM and ferrimagnetic thin films.

Wavevectors are dimensionless lattice wavevectors (k_x a, k_y a, k_z a) on
the magnetic Brillouin zone; all energies are in meV. Squared wavenumbers
are regularized as (k a)^2 -> 2[1 - cos(k a)], which makes every dispersion
2*pi periodic and even in each component. For a non-integer thickness
exponent l the z exchange term is regularized as (2[1 - cos(k_z a)])^(l/2),
which reduces to the plain rule at l = 2 and keeps periodicity and evenness.

Dipolar quantities (the thin-film mode profile and the direction cosines)
are deliberately left unregularized: they come from magnetostatics, not
from a lattice Laplacian, so they use raw wavevector components.

All functions are pure, accept scalars or broadcastable arrays, and are
safe to call concurrently. Parameter records are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import ComplexFrequency, InvariantViolation, NonPositiveSquareBracket

__all__ = [
    "SIGMAS",
    "AfmParams",
    "FerriParams",
    "DispersionModel",
    "reg",
    "afm_energy",
    "mode_profile",
    "form_factor",
    "ferri_energy",
    "energy",
]

SIGMAS = (+1, -1)  # the two magnon modes


def _check_sigma(sigma: int) -> int:
    if sigma not in SIGMAS:
        raise ValueError(f"sigma must be +1 or -1, got {sigma}")
    return sigma


def _isclose_rel(x: float, y: float, rel: float = 1e-12) -> bool:
    return abs(x - y) <= rel * max(abs(x), abs(y))


@dataclass(frozen=True)
class AfmParams:
    """Antiferromagnet dispersion parameters.

    ``hbar_omega0`` (meV) and the dimensionless gap parameter ``delta`` are
    the quantities entering the dispersion; the microscopic couplings J, S,
    K are optional provenance and, when present, must reproduce them:
    hbar_omega0 = 2*sqrt(3)*J*S and delta = 3[(K/6J)^2 + 2(K/6J)].
    """

    hbar_omega0: float
    delta: float
    a: float
    J: Optional[float] = None
    S: Optional[float] = None
    K: Optional[float] = None

    def __post_init__(self):
        if not self.hbar_omega0 > 0:
            raise InvariantViolation("hbar_omega0 must be > 0")
        if self.delta < 0:
            raise InvariantViolation("delta must be >= 0")
        if not self.a > 0:
            raise InvariantViolation("a must be > 0")
        if self.J is not None and self.S is not None:
            expect = 2.0 * math.sqrt(3.0) * self.J * self.S
            if not _isclose_rel(self.hbar_omega0, expect):
                raise InvariantViolation(
                    f"hbar_omega0={self.hbar_omega0} inconsistent with "
                    f"2*sqrt(3)*J*S={expect}"
                )
        if self.J is not None and self.K is not None:
            if self.K < 0:
                raise InvariantViolation("K must be >= 0")
            r = self.K / (6.0 * self.J)
            expect = 3.0 * (r * r + 2.0 * r)
            if not (self.delta == expect or _isclose_rel(self.delta, expect)):
                raise InvariantViolation(
                    f"delta={self.delta} inconsistent with anisotropy value {expect}"
                )

    @classmethod
    def from_couplings(cls, J: float, S: float, K: float, a: float) -> "AfmParams":
        """Build from exchange J, spin S, easy-axis anisotropy K (all meV but S)."""
        if not J > 0:
            raise InvariantViolation("J must be > 0")
        if not S > 0:
            raise InvariantViolation("S must be > 0")
        if K < 0:
            raise InvariantViolation("K must be >= 0")
        r = K / (6.0 * J)
        return cls(
            hbar_omega0=2.0 * math.sqrt(3.0) * J * S,
            delta=3.0 * (r * r + 2.0 * r),
            a=a, J=J, S=S, K=K,
        )


@dataclass(frozen=True)
class FerriParams:
    """Ferrimagnetic thin-film dispersion parameters (energies in meV).

    ``H0`` is the Zeeman energy of the in-plane field, ``delta_plus`` /
    ``delta_minus`` the intrinsic gaps of the two modes, ``D_over_a2`` and
    ``Dz_over_a2`` the in-plane and out-of-plane stiffness over a^2,
    ``l_exponent`` the thickness exponent of the z exchange term and
    ``hbar_omegaM`` the dipolar energy scale (4*pi*gamma*M_s as a single
    parameter; gamma and M_s never appear separately).
    """

    H0: float
    delta_plus: float
    delta_minus: float
    D_over_a2: float
    Dz_over_a2: float
    l_exponent: float
    hbar_omegaM: float
    a: float

    def __post_init__(self):
        if not self.delta_minus > self.H0:
            raise InvariantViolation("delta_minus must exceed H0")
        if not self.delta_plus + self.H0 > 0:
            raise InvariantViolation("delta_plus + H0 must be > 0")
        if not self.D_over_a2 > 0:
            raise InvariantViolation("D_over_a2 must be > 0")
        if not self.Dz_over_a2 > 0:
            raise InvariantViolation("Dz_over_a2 must be > 0")
        if self.hbar_omegaM < 0:
            raise InvariantViolation("hbar_omegaM must be >= 0")
        if not self.l_exponent > 0:
            raise InvariantViolation("l_exponent must be > 0")
        if not self.a > 0:
            raise InvariantViolation("a must be > 0")

    def gap(self, sigma: int) -> float:
        return self.delta_plus if sigma == +1 else self.delta_minus


DispersionModel = Union[AfmParams, FerriParams]


def reg(k_comp):
    """Lattice regularization 2[1 - cos(k a)] of a squared wavenumber.

    Even, 2*pi periodic, range [0, 4]; ~ (k a)^2 for small arguments.
    """
    return 2.0 * (1.0 - np.cos(k_comp))


def afm_energy(k, p: AfmParams, sigma: int = +1):
    """AFM magnon energy hbar*omega0 * sqrt(delta + sum_j reg(k_j a)/4).

    The two modes are degenerate, so the result is independent of sigma.
    """
    _check_sigma(sigma)
    kx, ky, kz = k
    s = reg(kx) + reg(ky) + reg(kz)
    out = p.hbar_omega0 * np.sqrt(p.delta + 0.25 * s)
    return float(out) if np.ndim(out) == 0 else out


def mode_profile(kperp_a, N_z: int):
    """Thickness-averaged dipolar mode profile P = 1 - (1 - e^-x)/x.

    x = (k_perp a) * N_z is the raw in-plane wavenumber times the film
    thickness in magnetic unit cells. Continuous at x = 0 with limit 0,
    monotone increasing, range [0, 1).
    """
    x = np.asarray(kperp_a, dtype=float) * N_z
    safe = np.where(x > 0.0, x, 1.0)
    out = np.where(x > 0.0, 1.0 + np.expm1(-safe) / safe, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def _ferri_bracket(k, p: FerriParams, sigma: int):
    """Square-bracket term A_sigma(k) shared by dispersion and form factor."""
    kx, ky, kz = (np.asarray(c, dtype=float) for c in k)
    return (
        sigma * p.H0
        + p.gap(sigma)
        + p.D_over_a2 * (reg(kx) + reg(ky))
        + p.Dz_over_a2 * reg(kz) ** (0.5 * p.l_exponent)
    )


def form_factor(k, p: FerriParams, sigma: int, N_z: int):
    """Dipolar form factor of the ferrimagnetic thin film.

    F = P(1-P) * (sigma*hbar_omegaM / A_sigma) * (k_x/k_perp)^2
        + 1 - P * (k_y/k_perp)^2

    with P the mode profile at (k_perp a) * N_z and direction cosines from
    raw components. The grouping above is the one that reproduces both
    magnetostatic limits: along k_y = 0 the first term alone survives
    (surface-mode geometry), along k_x = 0 the factor reduces to 1 - P
    (backward-volume geometry). At k_perp = 0 the removable singularity is
    resolved by the continuous limit F = 1.
    """
    _check_sigma(sigma)
    kx, ky, kz = (np.asarray(c, dtype=float) for c in k)
    A = _ferri_bracket((kx, ky, kz), p, sigma)
    if np.any(A <= 0.0):
        raise NonPositiveSquareBracket(
            f"A_sigma <= 0 encountered for sigma={sigma:+d}"
        )
    kperp2 = kx * kx + ky * ky
    safe = np.where(kperp2 > 0.0, kperp2, 1.0)
    cos2x = np.where(kperp2 > 0.0, kx * kx / safe, 0.0)
    cos2y = np.where(kperp2 > 0.0, ky * ky / safe, 0.0)
    P = mode_profile(np.sqrt(kperp2), N_z)
    F = P * (1.0 - P) * (sigma * p.hbar_omegaM / A) * cos2x + 1.0 - P * cos2y
    return float(F) if np.ndim(F) == 0 else F


def ferri_energy(k, p: FerriParams, sigma: int, N_z: int):
    """Ferrimagnet magnon energy sqrt(A_sigma) * sqrt(A_sigma + sigma*hbar_omegaM*F).

    Raises NonPositiveSquareBracket if A_sigma <= 0 and ComplexFrequency if
    the second square-root argument goes negative (unstable ground state
    for the given parameters).
    """
    _check_sigma(sigma)
    kx, ky, kz = (np.asarray(c, dtype=float) for c in k)
    A = _ferri_bracket((kx, ky, kz), p, sigma)
    if np.any(A <= 0.0):
        raise NonPositiveSquareBracket(
            f"A_sigma <= 0 encountered for sigma={sigma:+d}"
        )
    F = form_factor((kx, ky, kz), p, sigma, N_z)
    arg2 = A + sigma * p.hbar_omegaM * F
    if np.any(arg2 < 0.0):
        raise ComplexFrequency(
            f"negative square-root argument for sigma={sigma:+d}; "
            "the assumed ground state is unstable for these parameters"
        )
    out = np.sqrt(A) * np.sqrt(arg2)
    return float(out) if np.ndim(out) == 0 else out


def energy(k, model: DispersionModel, sigma: int, N_z: int = 1):
    """Dispatch to the AFM or ferrimagnet dispersion for a tagged model."""
    if isinstance(model, AfmParams):
        return afm_energy(k, model, sigma)
    if isinstance(model, FerriParams):
        return ferri_energy(k, model, sigma, N_z)
    raise TypeError(f"unsupported model type {type(model).__name__}")
