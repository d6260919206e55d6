"""Tridiagonal solves for the lumped ladder network.

Two interchangeable backends: numba-compiled loops and a pure-numpy path that
vectorises over frequency. Set ``CAVITYHEAT_NUMBA=0`` to force numpy; numpy is
also used when numba cannot be imported.
"""

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("CAVITYHEAT_NUMBA", "1").strip().lower() not in (
    "0",
    "false",
    "no",
    "off",
)


def _thomas_numpy(sub, diag, sup, rhs):
    n = diag.shape[0]
    cp = np.empty(n, dtype=np.complex128)
    dp = np.empty(n, dtype=np.complex128)
    piv = diag[0]
    if piv == 0 or not np.isfinite(piv):
        return None
    cp[0] = sup[0] / piv if n > 1 else 0.0
    dp[0] = rhs[0] / piv
    for k in range(1, n):
        piv = diag[k] - sub[k - 1] * cp[k - 1]
        if piv == 0 or not np.isfinite(piv):
            return None
        cp[k] = sup[k] / piv if k < n - 1 else 0.0
        dp[k] = (rhs[k] - sub[k - 1] * dp[k - 1]) / piv
    x = dp
    for k in range(n - 2, -1, -1):
        x[k] = dp[k] - cp[k] * x[k + 1]
    return x


def _ladder_column_numpy(omega, series_r, series_l, cap, col):
    """(Z^-1)[:, col] for each frequency; shape (len(omega), n_branches)."""
    omega = np.asarray(omega, dtype=np.float64)
    m = omega.shape[0]
    nb = series_r.shape[0]
    shunt = 1.0 / (1j * omega * cap)  # 1 / (i w C)
    off = -shunt
    cp = np.empty((m, nb), dtype=np.complex128)
    dp = np.empty((m, nb), dtype=np.complex128)
    bad = np.zeros(m, dtype=bool)
    prev_cp = np.zeros(m, dtype=np.complex128)
    prev_dp = np.zeros(m, dtype=np.complex128)
    for k in range(nb):
        d = series_r[k] + 1j * omega * series_l[k] + 2.0 * shunt
        piv = d - off * prev_cp if k > 0 else d
        bad |= (piv == 0) | ~np.isfinite(piv)
        piv = np.where(bad, 1.0, piv)
        cp[:, k] = off / piv
        r = 1.0 if k == col else 0.0
        dp[:, k] = (r - off * prev_dp) / piv if k > 0 else r / piv
        prev_cp, prev_dp = cp[:, k], dp[:, k]
    x = dp
    for k in range(nb - 2, -1, -1):
        x[:, k] = dp[:, k] - cp[:, k] * x[:, k + 1]
    x[bad] = np.nan
    return x


def _ladder_element_numpy(omega, series_r, series_l, cap, row, col):
    return _ladder_column_numpy(omega, series_r, series_l, cap, col)[:, row]


if HAVE_NUMBA:

    @njit(cache=True)
    def _thomas_numba(sub, diag, sup, rhs):
        n = diag.shape[0]
        cp = np.empty(n, dtype=np.complex128)
        dp = np.empty(n, dtype=np.complex128)
        piv = diag[0]
        if piv == 0 or not np.isfinite(piv.real) or not np.isfinite(piv.imag):
            return None
        cp[0] = sup[0] / piv if n > 1 else 0.0
        dp[0] = rhs[0] / piv
        for k in range(1, n):
            piv = diag[k] - sub[k - 1] * cp[k - 1]
            if piv == 0 or not np.isfinite(piv.real) or not np.isfinite(piv.imag):
                return None
            cp[k] = sup[k] / piv if k < n - 1 else 0.0
            dp[k] = (rhs[k] - sub[k - 1] * dp[k - 1]) / piv
        for k in range(n - 2, -1, -1):
            dp[k] = dp[k] - cp[k] * dp[k + 1]
        return dp

    @njit(cache=True)
    def _ladder_element_numba(omega, series_r, series_l, cap, row, col):
        m = omega.shape[0]
        nb = series_r.shape[0]
        out = np.empty(m, dtype=np.complex128)
        cp = np.empty(nb, dtype=np.complex128)
        dp = np.empty(nb, dtype=np.complex128)
        for q in range(m):
            w = omega[q]
            shunt = 1.0 / (1j * w * cap)
            off = -shunt
            ok = True
            for k in range(nb):
                d = series_r[k] + 1j * w * series_l[k] + 2.0 * shunt
                r = 1.0 + 0j if k == col else 0j
                if k == 0:
                    piv = d
                    dk = r / piv if piv != 0 else 0j
                else:
                    piv = d - off * cp[k - 1]
                    dk = (r - off * dp[k - 1]) / piv if piv != 0 else 0j
                if piv == 0 or not np.isfinite(piv.real) or not np.isfinite(piv.imag):
                    ok = False
                    break
                cp[k] = off / piv
                dp[k] = dk
            if not ok:
                out[q] = np.nan + 0j
                continue
            # back substitution only needs rows >= row
            x = dp[nb - 1]
            for k in range(nb - 2, row - 1, -1):
                x = dp[k] - cp[k] * x
            out[q] = x
        return out


def thomas_solve(sub, diag, sup, rhs):
    """Solve a complex tridiagonal system; returns None on a zero or non-finite pivot."""
    args = [np.ascontiguousarray(a, dtype=np.complex128) for a in (sub, diag, sup, rhs)]
    if USE_NUMBA:
        return _thomas_numba(*args)
    return _thomas_numpy(*args)


def ladder_element(omega, series_r, series_l, cap, row, col):
    """(Z^-1)[row, col] of the open-ended ladder at every frequency in ``omega``.

    Row ``k`` of Z reads (r_k + i w l_k + 2/(i w C)) I_k - (I_{k-1} + I_{k+1})/(i w C).
    Frequencies where elimination hits a zero pivot return NaN.
    """
    omega = np.ascontiguousarray(np.atleast_1d(omega), dtype=np.float64)
    series_r = np.ascontiguousarray(series_r, dtype=np.float64)
    series_l = np.ascontiguousarray(series_l, dtype=np.float64)
    if USE_NUMBA:
        return _ladder_element_numba(omega, series_r, series_l, float(cap), int(row), int(col))
    return _ladder_element_numpy(omega, series_r, series_l, float(cap), int(row), int(col))
