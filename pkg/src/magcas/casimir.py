"""Zero-point energies, their difference, and derived observables.

The thin-film Casimir energy per surface magnetic unit cell is

    E_cas = E_sum(N_z) - E_int(N_z)

where E_sum carries the discrete thickness modes k_z a = pi n / N_z,
n = 1..2 N_z, and E_int the continuum k_z integral with prefactor N_z.
Both are Brillouin-zone integrals over the in-plane wavevector. The two
terms are individually of order N_z * 10 meV while their difference can
be twelve orders of magnitude smaller, so the difference g(k_perp) is
formed pointwise, before the outer 2D integration, and every k_z
accumulation is compensated. Constant (wavevector-independent) terms of
the zero-point energy are dropped throughout; nothing is ever added to
the dispersion.

The outer integral runs over the quadrant [0, pi]^2 (times 4 by evenness)
with panels graded toward the zone center, where the gapless AFM cone and
the thin-film dipolar structure live. The k_z integral uses the window
[0, 2 pi] with panels graded toward both endpoints, where the exchange
term (2[1-cos k_z a])^(l/2) has branch points for non-integer l; the
discrete-sum nodes are never quadrature nodes (Gauss nodes are interior),
which keeps the two discretizations honestly distinct.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import _kernels
from .dispersion import AfmParams, DispersionModel, FerriParams, SIGMAS, energy, reg
from .errors import (
    ComplexFrequency,
    NonPositiveSquareBracket,
    NotApplicable,
    ToleranceNotMet,
)
from .quadrature import QuadratureSpec, panel_nodes

__all__ = [
    "CasimirQuad",
    "CasimirResult",
    "MagnetizationResult",
    "default_inner_spec",
    "default_outer_spec",
    "kz_discrete_sum",
    "kz_continuum_integral",
    "casimir_energy",
    "casimir_coefficient",
    "casimir_magnetization",
    "continuum_asymptote",
]

_TWO_PI = 2.0 * math.pi

# graded break points: k_z window [0, 2*pi], branch points at both ends
_INNER_LEFT = (0.0, 1e-4, 4e-4, 1.6e-3, 6.4e-3, 2.56e-2, 0.1024, 0.41, 1.2, math.pi)
_INNER_BREAKS = _INNER_LEFT + tuple(_TWO_PI - b for b in reversed(_INNER_LEFT[:-1]))

# outer quadrant [0, pi] per axis, graded toward the zone center
_OUTER_BREAKS = (0.0, 5e-4, 1.5e-3, 4e-3, 1e-2, 2.5e-2, 6e-2, 0.14,
                 0.3, 0.65, 1.3, 2.2, math.pi)


def default_inner_spec(abs_tol: float = 1e-12) -> QuadratureSpec:
    """Default k_z integration spec; abs_tol applies to the N-scaled integral."""
    return QuadratureSpec.from_breaks(
        _INNER_BREAKS, order=12, abs_tol=abs_tol, rel_tol=1e-15, refinement_limit=4
    )


def default_outer_spec(abs_tol: float = 1e-10) -> QuadratureSpec:
    """Default in-plane integration spec for one axis of the quadrant."""
    return QuadratureSpec.from_breaks(
        _OUTER_BREAKS, order=10, abs_tol=abs_tol, rel_tol=1e-12, refinement_limit=3
    )


@dataclass(frozen=True)
class CasimirQuad:
    """Quadrature settings: one inner k_z axis plus the two outer axes."""

    inner: QuadratureSpec
    outer_x: QuadratureSpec
    outer_y: QuadratureSpec

    @classmethod
    def default(cls) -> "CasimirQuad":
        outer = default_outer_spec()
        return cls(inner=default_inner_spec(), outer_x=outer, outer_y=outer)

    @classmethod
    def fast(cls) -> "CasimirQuad":
        """Relaxed tolerances for quick scans; refuse for l = 2 studies."""
        inner = QuadratureSpec.from_breaks(
            _INNER_BREAKS, order=8, abs_tol=1e-10, rel_tol=1e-12, refinement_limit=4
        )
        outer = QuadratureSpec.from_breaks(
            _OUTER_BREAKS, order=7, abs_tol=1e-8, rel_tol=1e-10, refinement_limit=3
        )
        return cls(inner=inner, outer_x=outer, outer_y=outer)


@dataclass(frozen=True)
class CasimirResult:
    """One Casimir-energy evaluation (energies in meV per surface cell)."""

    N_z: int
    E_cas: float
    coefficient: float
    b_exponent: float
    E_sum: float
    E_int: float
    error_estimate: float
    evaluations: int
    flags: Tuple[str, ...] = ()


@dataclass(frozen=True)
class MagnetizationResult:
    """Field derivative of the zero-point energies (dimensionless, per surface cell)."""

    N_z: int
    h_step: float
    casimir_term: float  # -d E_cas / d H0
    bulk_term: float     # -d E_int / d H0
    error_estimate: float


def _check_nz(N_z) -> int:
    if not isinstance(N_z, (int, np.integer)) or isinstance(N_z, bool) or N_z < 1:
        raise ValueError(f"N_z must be a positive integer, got {N_z!r}")
    return int(N_z)


def _sum_nodes(N_z: int) -> np.ndarray:
    n = np.arange(1, 2 * N_z + 1, dtype=float)
    return math.pi * n / N_z


def kz_discrete_sum(model: DispersionModel, kperp, N: int) -> float:
    """Zero-point sum over the discrete k_z modes at fixed in-plane wavevector.

    Returns (1/4) * sum over both modes and n = 1..2N of |eps(kx, ky, pi n/N)|,
    i.e. the k_perp integrand of the discrete part, in meV.
    """
    N = _check_nz(N)
    kx, ky = float(kperp[0]), float(kperp[1])
    kz = _sum_nodes(N)
    values = []
    for sigma in SIGMAS:
        eps = np.abs(np.asarray(energy((kx, ky, kz), model, sigma, N)))
        values.extend(eps.tolist())
    return 0.25 * math.fsum(values)


def kz_continuum_integral(model: DispersionModel, kperp, N: int,
                          spec: Optional[QuadratureSpec] = None) -> float:
    """Continuum counterpart: (N/2) * sum over modes of the k_z mean of |eps|.

    The k_z integral runs over one full period (the window the spec tiles,
    [0, 2 pi] by default); by periodicity and evenness the window choice is
    immaterial. The spec's abs_tol applies to the returned N-scaled value.
    """
    from .quadrature import integrate_1d

    N = _check_nz(N)
    spec = spec if spec is not None else default_inner_spec()
    kx, ky = float(kperp[0]), float(kperp[1])

    def f(kz):
        total = np.zeros_like(kz)
        for sigma in SIGMAS:
            total = total + np.abs(np.asarray(energy((kx, ky, kz), model, sigma, N)))
        return total

    scale = N / (2.0 * _TWO_PI)
    raw_spec = dataclasses.replace(spec, abs_tol=spec.abs_tol / scale)
    res = integrate_1d(f, raw_spec)
    return scale * res.value


# ---------------------------------------------------------------------------
# hot-path table construction and grid evaluation
# ---------------------------------------------------------------------------

def _inner_tables(model: DispersionModel, N_z: int, inner: QuadratureSpec, level: int):
    kz_lo, w_lo = panel_nodes(inner, level)
    kz_hi, w_hi = panel_nodes(inner, level + 1)
    window = inner.hi - inner.lo
    w_lo = w_lo / window  # turn the integral into the k_z mean
    w_hi = w_hi / window
    kz_sum = _sum_nodes(N_z)
    if isinstance(model, AfmParams):
        return (0.5 * (1.0 - np.cos(kz_sum)),
                0.5 * (1.0 - np.cos(kz_lo)), w_lo,
                0.5 * (1.0 - np.cos(kz_hi)), w_hi)
    half_l = 0.5 * model.l_exponent
    dz = model.Dz_over_a2
    return (dz * reg(kz_sum) ** half_l,
            dz * reg(kz_lo) ** half_l, w_lo,
            dz * reg(kz_hi) ** half_l, w_hi)


class _Grid:
    """Aggregates of one outer-level evaluation."""

    __slots__ = ("i_g", "i_s", "prop_err", "inner_ok", "evaluations")


def _eval_outer_level(model, N_z, inner_spec, tables, outer_x, outer_y, level):
    xs, wx = panel_nodes(outer_x, level)
    ys, wy = panel_nodes(outer_y, level)
    nx, ny = xs.size, ys.size
    g = np.empty(nx)
    s = np.empty(nx)
    m = np.empty(nx)
    err = np.empty(nx)

    afm = isinstance(model, AfmParams)
    if afm:
        t_sum, t_lo, w_lo, t_hi, w_hi = tables
        scale = model.hbar_omega0
    else:
        t_sum, t_lo, w_lo, t_hi, w_hi = tables
        errcode = np.zeros(nx, dtype=np.int64)

    row_g, row_s, row_perr = [], [], []
    worst = 0.0
    inner_ok = True
    for j in range(ny):
        if afm:
            _kernels.afm_row(xs, float(ys[j]), N_z, model.delta,
                             t_sum, t_lo, w_lo, t_hi, w_hi, g, s, m, err)
            g_row, s_row, m_row, e_row = scale * g, scale * s, scale * m, scale * err
        else:
            _kernels.ferri_row(xs, float(ys[j]), N_z, model.H0, model.delta_plus,
                               model.delta_minus, model.hbar_omegaM,
                               model.D_over_a2,
                               t_sum, t_lo, w_lo, t_hi, w_hi,
                               g, s, m, err, errcode)
            if errcode.any():
                if (errcode & 1).any():
                    raise NonPositiveSquareBracket(
                        "A_sigma <= 0 on the Brillouin zone for these parameters"
                    )
                raise ComplexFrequency(
                    "negative square-root argument on the Brillouin zone; "
                    "the assumed ground state is unstable for these parameters"
                )
            g_row, s_row, m_row, e_row = g, s, m, err
        tol_row = np.maximum(inner_spec.abs_tol, inner_spec.rel_tol * np.abs(m_row))
        bad = e_row > tol_row
        if bad.any():
            inner_ok = False
            worst = max(worst, float((e_row - tol_row).max()))
        row_g.append(math.fsum((wx * g_row).tolist()))
        row_s.append(math.fsum((wx * s_row).tolist()))
        row_perr.append(math.fsum((wx * e_row).tolist()))

    inv_pi2 = 1.0 / (math.pi * math.pi)  # 4/(2 pi)^2 with the quadrant x4
    out = _Grid()
    out.i_g = inv_pi2 * math.fsum((wy * np.asarray(row_g)).tolist())
    out.i_s = inv_pi2 * math.fsum((wy * np.asarray(row_s)).tolist())
    out.prop_err = inv_pi2 * math.fsum((wy * np.asarray(row_perr)).tolist())
    out.inner_ok = inner_ok
    nodes_per_point = t_sum.size + t_lo.size + t_hi.size
    out.evaluations = nx * ny * nodes_per_point * 2  # both modes
    return out


class _InnerTooCoarse(Exception):
    pass


def casimir_energy(model: DispersionModel, N_z: int,
                   quad: Optional[CasimirQuad] = None,
                   b_exponent: Optional[float] = None) -> CasimirResult:
    """Casimir energy per surface magnetic unit cell at thickness N_z.

    The difference g(k_perp) between the discrete zero-point sum and its
    continuum counterpart is formed at fixed k_perp and then integrated
    over the quadrant [0, pi]^2 (times 4 by evenness). The reported error
    estimate combines the two-level difference of the outer quadrature
    with the propagated k_z error estimates.

    Raises ToleranceNotMet when the requested tolerances cannot be reached
    within the refinement limits; dispersion errors propagate.
    """
    N_z = _check_nz(N_z)
    if not isinstance(model, (AfmParams, FerriParams)):
        raise TypeError(f"unsupported model type {type(model).__name__}")
    quad = quad if quad is not None else CasimirQuad.default()
    if b_exponent is None:
        b_exponent = 3.0 if isinstance(model, AfmParams) else model.l_exponent
    b_exponent = float(b_exponent)

    evaluations = 0
    for inner_level in range(quad.inner.refinement_limit + 1):
        tables = _inner_tables(model, N_z, quad.inner, inner_level)

        def level_aggregate(outer_level):
            nonlocal evaluations
            agg = _eval_outer_level(model, N_z, quad.inner, tables,
                                    quad.outer_x, quad.outer_y, outer_level)
            evaluations += agg.evaluations
            if not agg.inner_ok:
                raise _InnerTooCoarse()
            return agg

        try:
            prev = level_aggregate(0)
            outer_err = math.inf
            for outer_level in range(1, quad.outer_x.refinement_limit + 2):
                cur = level_aggregate(outer_level)
                outer_err = abs(cur.i_g - prev.i_g)
                total_err = outer_err + cur.prop_err
                if total_err <= max(quad.outer_x.abs_tol,
                                    quad.outer_x.rel_tol * abs(cur.i_g)):
                    e_cas = cur.i_g
                    e_sum = cur.i_s
                    flags = ("ultrathin",) if N_z == 1 else ()
                    return CasimirResult(
                        N_z=N_z,
                        E_cas=e_cas,
                        coefficient=e_cas * float(N_z) ** b_exponent,
                        b_exponent=b_exponent,
                        E_sum=e_sum,
                        E_int=e_sum - e_cas,
                        error_estimate=total_err,
                        evaluations=evaluations,
                        flags=flags,
                    )
                prev = cur
            raise ToleranceNotMet(
                f"outer integral error {outer_err:.3e} above tolerance "
                f"abs_tol={quad.outer_x.abs_tol:.1e} after "
                f"{quad.outer_x.refinement_limit} refinements (N_z={N_z})"
            )
        except _InnerTooCoarse:
            continue  # promote the k_z level and restart the outer loop
    raise ToleranceNotMet(
        f"k_z integral error above abs_tol={quad.inner.abs_tol:.1e} after "
        f"{quad.inner.refinement_limit} refinements (N_z={N_z})"
    )


def casimir_coefficient(result: CasimirResult, b: float) -> float:
    """Rescaled energy E_cas * N_z^b exposing the power-law thickness dependence."""
    return result.E_cas * float(result.N_z) ** float(b)


def casimir_magnetization(model: FerriParams, N_z: int,
                          quad: Optional[CasimirQuad] = None,
                          h_step: float = 1e-4,
                          b_exponent: Optional[float] = None) -> MagnetizationResult:
    """Field derivative of the zero-point energies by central difference.

    Returns -dE_cas/dH0 (the thin-film Casimir contribution to the
    magnetization per surface cell, scaling like 1/N_z^l) alongside
    -dE_int/dH0 (the bulk component, scaling like N_z).
    """
    if not isinstance(model, FerriParams):
        raise NotApplicable("magnetization derivative requires a ferrimagnet model")
    if not h_step > 0:
        raise ValueError("h_step must be > 0")
    up = casimir_energy(dataclasses.replace(model, H0=model.H0 + h_step),
                        N_z, quad, b_exponent)
    dn = casimir_energy(dataclasses.replace(model, H0=model.H0 - h_step),
                        N_z, quad, b_exponent)
    inv = 1.0 / (2.0 * h_step)
    return MagnetizationResult(
        N_z=_check_nz(N_z),
        h_step=h_step,
        casimir_term=-(up.E_cas - dn.E_cas) * inv,
        bulk_term=-(up.E_int - dn.E_int) * inv,
        error_estimate=(up.error_estimate + dn.error_estimate) * inv,
    )


def continuum_asymptote(p: AfmParams) -> float:
    """Large-N_z limit of E_cas * N_z^3 for the gapless AFM: -pi^2 hbar_omega0/1440."""
    if not isinstance(p, AfmParams):
        raise NotApplicable("the closed-form asymptote applies to AFM models")
    if p.delta != 0.0:
        raise NotApplicable("the closed-form asymptote requires delta = 0")
    return -(math.pi ** 2) * p.hbar_omega0 / 1440.0
