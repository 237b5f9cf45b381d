"""
Eigenvalues of complex symmetric tridiagonal matrices.

Implicitly shifted QL iteration with complex orthogonal plane rotations
(c^2 + s^2 = 1), which keep the matrix complex symmetric and tridiagonal;
for a tridiagonal input the Hessenberg reduction is the identity. The
shift is the eigenvalue of the leading 2x2 block closest to its corner.
"""
import cmath

import numpy as np
from numba import njit
from numpy.polynomial import Polynomial

from errors import NoConvergence
from logger_config import logger
from spectral.operator import TridiagonalOperator

MAX_ITER = 100
EPS = np.finfo(float).eps
TINY = 1e-300


@njit(cache=True)
def _ql_implicit(d, e, max_iter, eps, tiny):
    """In-place QL sweep; d gets the eigenvalues.

    Returns 0 on success, l + 1 when row l ran out of iterations and
    -(l + 1) when a rotation broke down on an isotropic vector.
    """
    n = d.shape[0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return l + 1
            it += 1

            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = cmath.sqrt(g * g + 1.0)
            if abs(g + r) >= abs(g - r):
                g = d[m] - d[l] + e[l] / (g + r)
            else:
                g = d[m] - d[l] + e[l] / (g - r)

            s = 1.0 + 0j
            c = 1.0 + 0j
            p = 0j
            underflow = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = cmath.sqrt(f * f + g * g)
                e[i + 1] = r
                size = abs(f) + abs(g)
                if abs(r) <= tiny:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                if abs(r) < 1e3 * eps * size:
                    return -(l + 1)
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def sort_spectrum(values) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    return values[np.lexsort((values.imag, values.real))]


def eig_complex_tridiagonal(T: TridiagonalOperator, max_iter: int = MAX_ITER) -> np.ndarray:
    """All eigenvalues of T, sorted by real part"""
    n = T.n
    d = T.diag.astype(complex).copy()
    if n <= 1:
        return d
    e = np.zeros(n, dtype=complex)
    e[: n - 1] = T.off

    status = _ql_implicit(d, e, max_iter, EPS, TINY)
    if status > 0:
        logger.warning("eig_no_convergence", row=status - 1, n=n)
        raise NoConvergence(f"eigenvalue {status - 1} needed more than {max_iter} iterations",
                            {"row": status - 1, "n": n, "max_iter": max_iter})
    if status < 0:
        logger.warning("eig_rotation_breakdown", row=-status - 1, n=n)
        raise NoConvergence("complex rotation broke down on an isotropic vector",
                            {"row": -status - 1, "n": n})
    return sort_spectrum(d)


def characteristic_roots(T: TridiagonalOperator) -> np.ndarray:
    """Eigenvalues as roots of det(T - lambda) from the three-term recursion"""
    prev = Polynomial([1.0 + 0j])
    cur = Polynomial([T.diag[0], -1.0])
    for k in range(1, T.n):
        nxt = Polynomial([T.diag[k], -1.0]) * cur - (T.off[k - 1] ** 2) * prev
        prev, cur = cur, nxt
    return sort_spectrum(cur.roots())
