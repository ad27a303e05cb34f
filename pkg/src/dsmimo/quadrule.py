"""Quadrature rules shared across the package.

Two families are provided:

* Gauss-Legendre rules on [0, b], used for the finite angular integrals
  in the error-probability expressions.
* Generalized Gauss-Laguerre rules with weight t^alpha e^-t, normalized
  so the weights sum to one (i.e. quadrature against the Gamma(alpha+1)
  probability measure).  Normalization keeps everything finite for alpha
  in the thousands, where the raw weights would overflow through the
  Gamma(alpha+1) mass factor.

Rules are cached by (degree, parameter); computing a fresh Laguerre rule
costs one symmetric tridiagonal eigendecomposition (Golub-Welsch).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import eigh_tridiagonal

_GL_CACHE: dict[tuple[int, float], tuple[np.ndarray, np.ndarray]] = {}
_LAG_CACHE: dict[tuple[int, float], tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights integrating f over [0, b] exactly for deg < 2n."""
    key = (n, float(b))
    if key not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(n)
        nodes = 0.5 * b * (x + 1.0)
        weights = 0.5 * b * w
        nodes.setflags(write=False)
        weights.setflags(write=False)
        _GL_CACHE[key] = (nodes, weights)
    return _GL_CACHE[key]


def gauss_laguerre_prob(n: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Generalized Gauss-Laguerre rule against t^alpha e^-t / Gamma(alpha+1).

    sum_i w_i f(t_i) ~ (1/Gamma(alpha+1)) * int_0^inf f(t) t^alpha e^-t dt,
    exact for polynomials of degree < 2n.  Weights sum to 1 by construction,
    so the rule stays representable for arbitrarily large alpha.
    """
    if alpha <= -1:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    key = (n, float(alpha))
    if key not in _LAG_CACHE:
        k = np.arange(n, dtype=float)
        diag = 2.0 * k + alpha + 1.0
        off = np.sqrt(k[1:] * (k[1:] + alpha))
        nodes, vecs = eigh_tridiagonal(diag, off)
        weights = vecs[0] ** 2
        nodes.setflags(write=False)
        weights.setflags(write=False)
        _LAG_CACHE[key] = (nodes, weights)
    return _LAG_CACHE[key]


def orthonormal_laguerre(t: np.ndarray, alpha: float, kmax: int) -> np.ndarray:
    """Evaluate the first kmax orthonormal Laguerre polynomials at t.

    Orthonormal against the Gamma(alpha+1)-normalized measure used by
    gauss_laguerre_prob: int p_i p_j dmu = delta_ij.  Returned array has
    shape (kmax, len(t)).  Three-term recurrence with coefficients
    a_k = 2k+alpha+1, b_k = sqrt(k(k+alpha)).
    """
    t = np.asarray(t, dtype=float)
    out = np.empty((kmax, t.shape[0]))
    out[0] = 1.0
    if kmax > 1:
        out[1] = (t - (alpha + 1.0)) / math.sqrt(alpha + 1.0)
    for k in range(1, kmax - 1):
        bk = math.sqrt(k * (k + alpha))
        bk1 = math.sqrt((k + 1) * (k + 1 + alpha))
        out[k + 1] = ((t - (2.0 * k + alpha + 1.0)) * out[k] - bk * out[k - 1]) / bk1
    return out
