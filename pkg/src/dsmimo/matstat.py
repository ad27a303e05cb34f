"""Gaussian/double-scattering channel sampling and closed-form trace moments.

Conventions: a circular complex Gaussian entry has i.i.d. real and
imaginary parts of variance 1/2, so E|g|^2 = 1 and channel entries are
unit power.  A matrix-variate Gaussian X with row covariance S and column
covariance P is realized as S^(1/2) G P^(1/2) with G i.i.d. standard.

The moment/cumulant evaluators consume spectra rather than matrices: the
quantities depend on the eigenvalues only, and callers often have exact
spectra available.  Matrix inputs go through corrmat.spectrum_of first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .codes import OstbcCode
from .corrmat import CorrelationMatrix, Spectrum, correlation_figure, matrix_sqrt


@dataclass(frozen=True)
class GaussianMatrixSpec:
    """Zero-mean matrix Gaussian: rows x cols with row/column covariances."""

    rows: int
    cols: int
    row_cov: np.ndarray
    col_cov: np.ndarray

    def __post_init__(self):
        r = np.atleast_2d(np.asarray(self.row_cov))
        c = np.atleast_2d(np.asarray(self.col_cov))
        if r.shape != (self.rows, self.rows) or c.shape != (self.cols, self.cols):
            raise ValueError("covariance dimensions must match rows/cols")
        object.__setattr__(self, "row_cov", r)
        object.__setattr__(self, "col_cov", c)
        for name, m in (("row_cov", r), ("col_cov", c)):
            if np.min(np.linalg.eigvalsh(m)) <= 0:
                raise ValueError(f"{name} must be positive definite")

    @cached_property
    def _row_sqrt(self) -> np.ndarray:
        return matrix_sqrt(self.row_cov)

    @cached_property
    def _col_sqrt(self) -> np.ndarray:
        return matrix_sqrt(self.col_cov)


@dataclass(frozen=True, eq=False)
class Scenario:
    """One double-scattering environment: dimensions, correlations, code.

    `no_double_scattering` marks the scatterer-free limit (rich scattering,
    n_s -> infinity): the channel is a single correlated Gaussian matrix and
    every scatterer correlation-figure term is zero.  n_s/phi_s are ignored
    in that mode.
    """

    n_t: int
    n_s: int
    n_r: int
    phi_t: CorrelationMatrix
    phi_s: CorrelationMatrix
    phi_r: CorrelationMatrix
    code: OstbcCode | None = None
    no_double_scattering: bool = False

    def __post_init__(self):
        if min(self.n_t, self.n_s, self.n_r) < 1:
            raise ValueError("antenna/scatterer counts must be positive")
        if self.phi_t.dim != self.n_t or self.phi_r.dim != self.n_r:
            raise ValueError("correlation matrix dimensions must match the scenario")
        if not self.no_double_scattering and self.phi_s.dim != self.n_s:
            raise ValueError("correlation matrix dimensions must match the scenario")
        if self.code is not None and self.code.n_t != self.n_t:
            raise ValueError(
                f"code {self.code.name!r} is for {self.code.n_t} antennas, scenario has {self.n_t}"
            )
        object.__setattr__(self, "code", self.code or OstbcCode.rate_only(self.n_t))

    @classmethod
    def uncorrelated(cls, n_t: int, n_s: int, n_r: int, code: OstbcCode | None = None,
                     no_double_scattering: bool = False) -> "Scenario":
        from .corrmat import identity_corr

        return cls(n_t, n_s, n_r, identity_corr(n_t), identity_corr(n_s),
                   identity_corr(n_r), code, no_double_scattering)

    @property
    def rate(self):
        return self.code.rate

    def zetas(self) -> tuple[float, float, float]:
        """Correlation figures (zeta_T, zeta_S, zeta_R); zeta_S = 0 without
        double scattering."""
        zt = correlation_figure(self.phi_t)
        zr = correlation_figure(self.phi_r)
        zs = 0.0 if self.no_double_scattering else correlation_figure(self.phi_s)
        return zt, zs, zr


def _std_complex(rng: np.random.Generator, shape) -> np.ndarray:
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    z *= math.sqrt(0.5)
    return z


def sample_gaussian(spec: GaussianMatrixSpec, rng: np.random.Generator,
                    size: int | None = None) -> np.ndarray:
    """Draw from the matrix Gaussian; size=None for one matrix, else a batch
    of shape (size, rows, cols)."""
    shape = (spec.rows, spec.cols) if size is None else (size, spec.rows, spec.cols)
    g = _std_complex(rng, shape)
    return spec._row_sqrt @ g @ spec._col_sqrt


def sample_channel(scn: Scenario, rng: np.random.Generator,
                   size: int | None = None) -> np.ndarray:
    """Draw channel matrices H of shape (n_r, n_t), batched when size is set.

    Double-scattering: H = phi_r^(1/2) H1 phi_s^(1/2) H2 phi_t^(1/2)/sqrt(n_s)
    with independent standard H1 (n_r x n_s) and H2 (n_s x n_t).  Without
    double scattering: H = phi_r^(1/2) G phi_t^(1/2), one Gaussian factor.
    """
    one = size is None
    b = 1 if one else size
    sr, st = scn.phi_r.sqrt, scn.phi_t.sqrt
    if scn.no_double_scattering:
        h = sr @ _std_complex(rng, (b, scn.n_r, scn.n_t)) @ st
    else:
        h1 = _std_complex(rng, (b, scn.n_r, scn.n_s))
        h2 = _std_complex(rng, (b, scn.n_s, scn.n_t))
        h = (sr @ h1 @ scn.phi_s.sqrt @ h2 @ st) / math.sqrt(scn.n_s)
    return h[0] if one else h


def trace_quadratic_cumulant(k: int, s1: Spectrum, s2: Spectrum) -> float:
    """k-th cumulant of tr(A X B X^H): (k-1)! tr{(A Sigma)^k} tr{(Psi B)^k}.

    s1 and s2 are the spectra of A*Sigma and Psi*B respectively.
    """
    if k < 1:
        raise ValueError("cumulant order must be >= 1")
    return math.factorial(k - 1) * s1.trace_power(k) * s2.trace_power(k)


def expected_trace_square(sigma_spec: Spectrum, psi_spec: Spectrum) -> float:
    """E tr[(A X B X^H)^2] = tr^2(ASigma)tr{(PsiB)^2} + tr^2(PsiB)tr{(ASigma)^2}."""
    t1, t2 = sigma_spec.trace_power(1), sigma_spec.trace_power(2)
    u1, u2 = psi_spec.trace_power(1), psi_spec.trace_power(2)
    return t1 * t1 * u2 + u1 * u1 * t2


def double_product_moments(sigma1: Spectrum, psi1sigma2: Spectrum,
                           psi2: Spectrum) -> tuple[float, float]:
    """Fourth-order moments of W = X1 X2 X2^H X1^H for independent Gaussian
    factors X1 ~ (Sigma1, Psi1) and X2 ~ (Sigma2, Psi2).

    Arguments are the spectra of Sigma1, Psi1*Sigma2 (as one product), and
    Psi2.  Returns (E[tr^2 W], E[tr(W^2)]).
    """
    a1, a2 = sigma1.trace_power(1), sigma1.trace_power(2)
    b1, b2 = psi1sigma2.trace_power(1), psi1sigma2.trace_power(2)
    c1, c2 = psi2.trace_power(1), psi2.trace_power(2)
    tr_sq_mean = (a2 * b1 * b1 * c2 + a2 * c1 * c1 * b2
                  + a1 * a1 * b2 * c2 + a1 * a1 * b1 * b1 * c1 * c1)
    tr_of_sq = (a1 * a1 * b1 * b1 * c2 + a1 * a1 * c1 * c1 * b2
                + b2 * c2 * a2 + b1 * b1 * c1 * c1 * a2)
    return tr_sq_mean, tr_of_sq


def kurtosis_frobenius(scn: Scenario) -> float:
    """Kurtosis of ||H||_F: zt*zr + zt*zs + zr*zs + 1 in correlation figures."""
    zt, zs, zr = scn.zetas()
    return zt * zr + zt * zs + zr * zs + 1.0


def frobenius_moments(scn: Scenario) -> tuple[float, float]:
    """(E||H||_F^2, E||H||_F^4) for the scenario."""
    m2 = float(scn.n_t * scn.n_r)
    return m2, kurtosis_frobenius(scn) * m2 * m2
