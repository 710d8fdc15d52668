"""Hot numerical kernels: zero-point sums and k_z means per in-plane wavevector.

Two interchangeable backends live here:

* scalar loops compiled with ``numba.njit`` (default when numba is
  importable), and
* a pure-numpy path that vectorizes the same arithmetic, in the same
  accumulation order, over the row of outer quadrature nodes.

The backend is selected once at import time by the environment variable
``MAGCAS_BACKEND`` ("numba", "numpy", or unset for auto). Both paths use
Neumaier compensated accumulation along k_z so the discrete-sum minus
continuum-integral difference survives at the 1e-13 meV level under
integrands of tens of meV.

Row convention: a kernel receives the array ``xs`` of k_x a nodes and one
scalar k_y a value ``y``, plus precomputed k_z tables, and fills per-node
output arrays:

* ``s``   zero-point sum per unit surface cell (the k_perp integrand of
          the discrete part),
* ``m``   its continuum counterpart at the finer quadrature level,
* ``g``   the difference s - m formed before any outer integration,
* ``err`` N/2-scaled two-level error estimate of the k_z integral.

AFM kernels work in units of hbar_omega0 (the caller rescales);
ferrimagnet kernels work directly in meV.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = ["BACKEND", "HAVE_NUMBA", "afm_row", "ferri_row", "afm_midpoint_casimir"]

_choice = os.environ.get("MAGCAS_BACKEND", "").strip().lower()
if _choice not in ("", "auto", "numba", "numpy"):
    raise RuntimeError(f"MAGCAS_BACKEND must be 'numba' or 'numpy', got {_choice!r}")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False
    if _choice == "numba":
        raise RuntimeError("MAGCAS_BACKEND=numba but numba is not importable")

BACKEND = "numpy" if _choice == "numpy" or not HAVE_NUMBA else "numba"


# ---------------------------------------------------------------------------
# scalar-loop implementations (numba-compiled on the numba backend)
# ---------------------------------------------------------------------------

def _py_afm_row(xs, y, n_z, delta, regs4_sum, regq4_lo, w_lo, regq4_hi, w_hi,
                g, s, m, err):
    inv_nodes = 1.0 / regs4_sum.shape[0]
    c4y = 0.5 * (1.0 - math.cos(y))
    for j in range(xs.shape[0]):
        c4 = c4y + 0.5 * (1.0 - math.cos(xs[j]))
        base = delta + c4

        acc = 0.0
        comp = 0.0
        for i in range(regs4_sum.shape[0]):
            v = math.sqrt(base + regs4_sum[i])
            t = acc + v
            if abs(acc) >= abs(v):
                comp += (acc - t) + v
            else:
                comp += (v - t) + acc
            acc = t
        tmean = (acc + comp) * inv_nodes

        acc = 0.0
        comp = 0.0
        for i in range(regq4_lo.shape[0]):
            v = w_lo[i] * math.sqrt(base + regq4_lo[i])
            t = acc + v
            if abs(acc) >= abs(v):
                comp += (acc - t) + v
            else:
                comp += (v - t) + acc
            acc = t
        m_lo = acc + comp

        acc = 0.0
        comp = 0.0
        for i in range(regq4_hi.shape[0]):
            v = w_hi[i] * math.sqrt(base + regq4_hi[i])
            t = acc + v
            if abs(acc) >= abs(v):
                comp += (acc - t) + v
            else:
                comp += (v - t) + acc
            acc = t
        m_hi = acc + comp

        # two degenerate modes: sigma sum is an exact doubling
        s[j] = n_z * tmean
        m[j] = n_z * m_hi
        g[j] = n_z * (tmean - m_hi)
        err[j] = n_z * abs(m_hi - m_lo)


def _py_ferri_row(xs, y, n_z, h0, dplus, dminus, omega_m, d_perp_coef,
                  dz_sum, dz_lo, w_lo, dz_hi, w_hi,
                  g, s, m, err, errcode):
    half_n = 0.5 * n_z
    inv_nodes = 1.0 / dz_sum.shape[0]
    reg_y = 2.0 * (1.0 - math.cos(y))
    y2 = y * y
    for j in range(xs.shape[0]):
        x = xs[j]
        dperp = d_perp_coef * (reg_y + 2.0 * (1.0 - math.cos(x)))
        kperp2 = x * x + y2
        if kperp2 > 0.0:
            kperp = math.sqrt(kperp2)
            cos2x = x * x / kperp2
            cos2y = y2 / kperp2
            xn = kperp * n_z
            prof = 1.0 + math.expm1(-xn) / xn
        else:
            cos2x = 0.0
            cos2y = 0.0
            prof = 0.0
        p1p = prof * (1.0 - prof)

        g[j] = 0.0
        s[j] = 0.0
        m[j] = 0.0
        err[j] = 0.0
        errcode[j] = 0
        for sigma in (1.0, -1.0):
            gap = dplus if sigma > 0.0 else dminus
            base = sigma * h0 + gap + dperp
            som = sigma * omega_m

            acc = 0.0
            comp = 0.0
            for i in range(dz_sum.shape[0]):
                a = base + dz_sum[i]
                if a <= 0.0:
                    errcode[j] |= 1
                    a = 1.0
                f = p1p * (som / a) * cos2x + 1.0 - prof * cos2y
                arg2 = a + som * f
                if arg2 < 0.0:
                    errcode[j] |= 2
                    arg2 = 0.0
                v = math.sqrt(a) * math.sqrt(arg2)
                t = acc + v
                if abs(acc) >= abs(v):
                    comp += (acc - t) + v
                else:
                    comp += (v - t) + acc
                acc = t
            tmean = (acc + comp) * inv_nodes

            acc = 0.0
            comp = 0.0
            for i in range(dz_lo.shape[0]):
                a = base + dz_lo[i]
                if a <= 0.0:
                    errcode[j] |= 1
                    a = 1.0
                f = p1p * (som / a) * cos2x + 1.0 - prof * cos2y
                arg2 = a + som * f
                if arg2 < 0.0:
                    errcode[j] |= 2
                    arg2 = 0.0
                v = w_lo[i] * (math.sqrt(a) * math.sqrt(arg2))
                t = acc + v
                if abs(acc) >= abs(v):
                    comp += (acc - t) + v
                else:
                    comp += (v - t) + acc
                acc = t
            m_lo = acc + comp

            acc = 0.0
            comp = 0.0
            for i in range(dz_hi.shape[0]):
                a = base + dz_hi[i]
                if a <= 0.0:
                    errcode[j] |= 1
                    a = 1.0
                f = p1p * (som / a) * cos2x + 1.0 - prof * cos2y
                arg2 = a + som * f
                if arg2 < 0.0:
                    errcode[j] |= 2
                    arg2 = 0.0
                v = w_hi[i] * (math.sqrt(a) * math.sqrt(arg2))
                t = acc + v
                if abs(acc) >= abs(v):
                    comp += (acc - t) + v
                else:
                    comp += (v - t) + acc
                acc = t
            m_hi = acc + comp

            s[j] += half_n * tmean
            m[j] += half_n * m_hi
            g[j] += half_n * (tmean - m_hi)
            err[j] += half_n * abs(m_hi - m_lo)


def _py_afm_midpoint_casimir(u_nodes, mult, n_z, delta, regs4_sum, regz4_mid):
    """Brute-force oracle accumulator: midpoint k_perp grid x midpoint k_z rule.

    ``u_nodes`` are the distinct |k a| values of the in-plane midpoint grid,
    ``mult[i, j]`` the symmetry multiplicity of the pair (u_i, u_j) for
    j >= i. Returns sum over the grid of mult * (sum - integral) per mode
    pair, in units of hbar_omega0; the caller divides by the grid size.
    """
    nu = u_nodes.shape[0]
    nsum = regs4_sum.shape[0]
    nmid = regz4_mid.shape[0]
    inv_sum = 1.0 / nsum
    inv_mid = 1.0 / nmid
    total = 0.0
    total_c = 0.0
    for i in range(nu):
        c4i = 0.5 * (1.0 - math.cos(u_nodes[i]))
        for j in range(i, nu):
            base = delta + c4i + 0.5 * (1.0 - math.cos(u_nodes[j]))

            acc = 0.0
            comp = 0.0
            for n in range(nsum):
                v = math.sqrt(base + regs4_sum[n])
                t = acc + v
                if abs(acc) >= abs(v):
                    comp += (acc - t) + v
                else:
                    comp += (v - t) + acc
                acc = t
            tmean = (acc + comp) * inv_sum

            acc = 0.0
            comp = 0.0
            for n in range(nmid):
                v = math.sqrt(base + regz4_mid[n])
                t = acc + v
                if abs(acc) >= abs(v):
                    comp += (acc - t) + v
                else:
                    comp += (v - t) + acc
                acc = t
            mmean = (acc + comp) * inv_mid

            term = mult[i, j] * (n_z * (tmean - mmean))
            t = total + term
            if abs(total) >= abs(term):
                total_c += (total - t) + term
            else:
                total_c += (term - t) + total
            total = t
    return total + total_c


# ---------------------------------------------------------------------------
# numpy-vectorized fallback (same k_z iteration order, vectorized over xs)
# ---------------------------------------------------------------------------

def _neumaier_axis0(terms_iter, shape):
    acc = np.zeros(shape)
    comp = np.zeros(shape)
    for term in terms_iter:
        t = acc + term
        comp += np.where(np.abs(acc) >= np.abs(term), (acc - t) + term,
                         (term - t) + acc)
        acc = t
    return acc + comp


def _np_afm_row(xs, y, n_z, delta, regs4_sum, regq4_lo, w_lo, regq4_hi, w_hi,
                g, s, m, err):
    base = delta + 0.5 * (1.0 - math.cos(y)) + 0.5 * (1.0 - np.cos(xs))
    nx = xs.shape[0]

    tmean = _neumaier_axis0(
        (np.sqrt(base + r) for r in regs4_sum), nx) / regs4_sum.shape[0]
    m_lo = _neumaier_axis0(
        (w * np.sqrt(base + r) for r, w in zip(regq4_lo, w_lo)), nx)
    m_hi = _neumaier_axis0(
        (w * np.sqrt(base + r) for r, w in zip(regq4_hi, w_hi)), nx)

    s[:] = n_z * tmean
    m[:] = n_z * m_hi
    g[:] = n_z * (tmean - m_hi)
    err[:] = n_z * np.abs(m_hi - m_lo)


def _np_ferri_row(xs, y, n_z, h0, dplus, dminus, omega_m, d_perp_coef,
                  dz_sum, dz_lo, w_lo, dz_hi, w_hi,
                  g, s, m, err, errcode):
    half_n = 0.5 * n_z
    nx = xs.shape[0]
    dperp = d_perp_coef * (2.0 * (1.0 - math.cos(y)) + 2.0 * (1.0 - np.cos(xs)))
    kperp2 = xs * xs + y * y
    pos = kperp2 > 0.0
    safe = np.where(pos, kperp2, 1.0)
    cos2x = np.where(pos, xs * xs / safe, 0.0)
    cos2y = np.where(pos, y * y / safe, 0.0)
    xn = np.sqrt(safe) * n_z
    prof = np.where(pos, 1.0 + np.expm1(-xn) / xn, 0.0)
    p1p = prof * (1.0 - prof)

    g[:] = 0.0
    s[:] = 0.0
    m[:] = 0.0
    err[:] = 0.0
    errcode[:] = 0

    def eps(dz, base, som):
        a = base + dz
        bad_a = a <= 0.0
        if np.any(bad_a):
            errcode[bad_a] |= 1
            a = np.where(bad_a, 1.0, a)
        f = p1p * (som / a) * cos2x + 1.0 - prof * cos2y
        arg2 = a + som * f
        bad_2 = arg2 < 0.0
        if np.any(bad_2):
            errcode[bad_2] |= 2
            arg2 = np.where(bad_2, 0.0, arg2)
        return np.sqrt(a) * np.sqrt(arg2)

    for sigma in (1.0, -1.0):
        gap = dplus if sigma > 0.0 else dminus
        base = sigma * h0 + gap + dperp
        som = sigma * omega_m

        tmean = _neumaier_axis0(
            (eps(dz, base, som) for dz in dz_sum), nx) / dz_sum.shape[0]
        m_lo = _neumaier_axis0(
            (w * eps(dz, base, som) for dz, w in zip(dz_lo, w_lo)), nx)
        m_hi = _neumaier_axis0(
            (w * eps(dz, base, som) for dz, w in zip(dz_hi, w_hi)), nx)

        s += half_n * tmean
        m += half_n * m_hi
        g += half_n * (tmean - m_hi)
        err += half_n * np.abs(m_hi - m_lo)


def _np_afm_midpoint_casimir(u_nodes, mult, n_z, delta, regs4_sum, regz4_mid):
    nu = u_nodes.shape[0]
    c4 = 0.5 * (1.0 - np.cos(u_nodes))
    nmid = regz4_mid.shape[0]
    terms = []
    # one (i, j) pair at a time keeps temporaries at nmid doubles; pairwise
    # np.sum noise (~1e-15 per mean) is far below the midpoint-rule
    # discretization error this oracle is used to bound
    for i in range(nu):
        base_row = delta + c4[i] + c4[i:]
        row = []
        for jj in range(base_row.shape[0]):
            b = base_row[jj]
            tmean = np.sqrt(b + regs4_sum).sum() / regs4_sum.shape[0]
            mmean = np.sqrt(b + regz4_mid).sum() / nmid
            row.append(mult[i, i + jj] * (n_z * (tmean - mmean)))
        terms.append(math.fsum(row))
    return math.fsum(terms)


if BACKEND == "numba":
    _jit = numba.njit(cache=True, nogil=True, fastmath=False)
    afm_row = _jit(_py_afm_row)
    ferri_row = _jit(_py_ferri_row)
    afm_midpoint_casimir = _jit(_py_afm_midpoint_casimir)
else:
    afm_row = _np_afm_row
    ferri_row = _np_ferri_row
    afm_midpoint_casimir = _np_afm_midpoint_casimir
