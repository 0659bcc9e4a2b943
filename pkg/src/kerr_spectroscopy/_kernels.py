"""Compiled time-stepping kernels for the Lindblad equation.

Operators arrive as nonzero triplets (row, col, value).  The density matrix
is assumed Hermitian, which lets the coherent part be formed as Z + Z^dagger
with Z = -i H_eff(t) rho, where H_eff = H - (i/2) sum_j L_j^dagger L_j.
"""

import numpy as np
from numba import njit

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


@njit(cache=True)
def lindblad_rhs_hermitian(rho, t, sr, sc, sv, dr, dc, dv, dk, lam, freq, jr, jc, jv, jptr, out):
    d = rho.shape[0]
    for i in range(d):
        for j in range(d):
            out[i, j] = 0.0
    for n in range(sr.shape[0]):
        a = -1j * sv[n]
        i = sr[n]
        k = sc[n]
        for j in range(d):
            out[i, j] += a * rho[k, j]
    for n in range(dr.shape[0]):
        m = dk[n]
        amp = lam[m] * np.exp(1j * freq[m] * t) * dv[n]
        a = -1j * amp
        b = -1j * np.conj(amp)
        i = dr[n]
        k = dc[n]
        for j in range(d):
            out[i, j] += a * rho[k, j]
            out[k, j] += b * rho[i, j]
    for i in range(d):
        out[i, i] = 2.0 * out[i, i].real
        for j in range(i + 1, d):
            z = out[i, j] + np.conj(out[j, i])
            out[i, j] = z
            out[j, i] = np.conj(z)
    for m in range(jptr.shape[0] - 1):
        for p in range(jptr[m], jptr[m + 1]):
            for q in range(jptr[m], jptr[m + 1]):
                out[jr[p], jr[q]] += jv[p] * np.conj(jv[q]) * rho[jc[p], jc[q]]


@njit(cache=True)
def rk4_steps(rho, t0, dt, nsteps, sr, sc, sv, dr, dc, dv, dk, lam, freq, jr, jc, jv, jptr):
    """Advance ``rho`` in place by ``nsteps`` classical RK4 steps of size ``dt``."""
    d = rho.shape[0]
    k1 = np.empty((d, d), np.complex128)
    k2 = np.empty_like(k1)
    k3 = np.empty_like(k1)
    k4 = np.empty_like(k1)
    y = np.empty_like(k1)
    h2 = 0.5 * dt
    for s in range(nsteps):
        t = t0 + s * dt
        lindblad_rhs_hermitian(rho, t, sr, sc, sv, dr, dc, dv, dk, lam, freq, jr, jc, jv, jptr, k1)
        for i in range(d):
            for j in range(d):
                y[i, j] = rho[i, j] + h2 * k1[i, j]
        lindblad_rhs_hermitian(y, t + h2, sr, sc, sv, dr, dc, dv, dk, lam, freq, jr, jc, jv, jptr, k2)
        for i in range(d):
            for j in range(d):
                y[i, j] = rho[i, j] + h2 * k2[i, j]
        lindblad_rhs_hermitian(y, t + h2, sr, sc, sv, dr, dc, dv, dk, lam, freq, jr, jc, jv, jptr, k3)
        for i in range(d):
            for j in range(d):
                y[i, j] = rho[i, j] + dt * k3[i, j]
        lindblad_rhs_hermitian(y, t + dt, sr, sc, sv, dr, dc, dv, dk, lam, freq, jr, jc, jv, jptr, k4)
        for i in range(d):
            for j in range(d):
                rho[i, j] += dt / 6.0 * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])


@njit(cache=True)
def dopri5_steps(
    rho, t, t_end, h, h_max, rtol, atol, max_accept,
    sr, sc, sv, dr, dc, dv, dk, lam, freq, jr, jc, jv, jptr,
):
    """Adaptive Dormand-Prince integration of ``rho`` in place.

    Stops at ``t_end`` or after ``max_accept`` accepted steps.  Returns
    ``(t, h_next, accepted, rejected)``.
    """
    d = rho.shape[0]
    k1 = np.empty((d, d), np.complex128)
    k2 = np.empty_like(k1)
    k3 = np.empty_like(k1)
    k4 = np.empty_like(k1)
    k5 = np.empty_like(k1)
    k6 = np.empty_like(k1)
    k7 = np.empty_like(k1)
    y = np.empty_like(k1)
    accepted = 0
    rejected = 0
    lindblad_rhs_hermitian(rho, t, sr, sc, sv, dr, dc, dv, dk, lam, freq, jr, jc, jv, jptr, k1)
    while t < t_end and accepted < max_accept:
        if h > h_max:
            h = h_max
        h_free = h
        last = False
        if t + h >= t_end:
            h = t_end - t
            last = True
        for i in range(d):
            for j in range(d):
                y[i, j] = rho[i, j] + h * _A21 * k1[i, j]
        lindblad_rhs_hermitian(y, t + _C2 * h, sr, sc, sv, dr, dc, dv, dk, lam, freq, jr, jc, jv, jptr, k2)
        for i in range(d):
            for j in range(d):
                y[i, j] = rho[i, j] + h * (_A31 * k1[i, j] + _A32 * k2[i, j])
        lindblad_rhs_hermitian(y, t + _C3 * h, sr, sc, sv, dr, dc, dv, dk, lam, freq, jr, jc, jv, jptr, k3)
        for i in range(d):
            for j in range(d):
                y[i, j] = rho[i, j] + h * (_A41 * k1[i, j] + _A42 * k2[i, j] + _A43 * k3[i, j])
        lindblad_rhs_hermitian(y, t + _C4 * h, sr, sc, sv, dr, dc, dv, dk, lam, freq, jr, jc, jv, jptr, k4)
        for i in range(d):
            for j in range(d):
                y[i, j] = rho[i, j] + h * (
                    _A51 * k1[i, j] + _A52 * k2[i, j] + _A53 * k3[i, j] + _A54 * k4[i, j]
                )
        lindblad_rhs_hermitian(y, t + _C5 * h, sr, sc, sv, dr, dc, dv, dk, lam, freq, jr, jc, jv, jptr, k5)
        for i in range(d):
            for j in range(d):
                y[i, j] = rho[i, j] + h * (
                    _A61 * k1[i, j] + _A62 * k2[i, j] + _A63 * k3[i, j] + _A64 * k4[i, j] + _A65 * k5[i, j]
                )
        lindblad_rhs_hermitian(y, t + h, sr, sc, sv, dr, dc, dv, dk, lam, freq, jr, jc, jv, jptr, k6)
        for i in range(d):
            for j in range(d):
                y[i, j] = rho[i, j] + h * (
                    _B1 * k1[i, j] + _B3 * k3[i, j] + _B4 * k4[i, j] + _B5 * k5[i, j] + _B6 * k6[i, j]
                )
        lindblad_rhs_hermitian(y, t + h, sr, sc, sv, dr, dc, dv, dk, lam, freq, jr, jc, jv, jptr, k7)
        err = 0.0
        for i in range(d):
            for j in range(d):
                e = h * (
                    _E1 * k1[i, j] + _E3 * k3[i, j] + _E4 * k4[i, j]
                    + _E5 * k5[i, j] + _E6 * k6[i, j] + _E7 * k7[i, j]
                )
                scale = atol + rtol * max(abs(rho[i, j]), abs(y[i, j]))
                err += (abs(e) / scale) ** 2
        err = np.sqrt(err / (d * d))
        if err <= 1.0:
            t = t_end if last else t + h
            for i in range(d):
                for j in range(d):
                    rho[i, j] = y[i, j]
                    k1[i, j] = k7[i, j]
            accepted += 1
            factor = 10.0 if err == 0.0 else min(10.0, 0.9 * err ** -0.2)
            if last:
                return t, max(h * factor, h_free), accepted, rejected
        else:
            rejected += 1
            factor = max(0.2, 0.9 * err ** -0.2)
        h = h * factor
    return t, h, accepted, rejected
