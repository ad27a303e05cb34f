"""Closed-form M-PSK symbol error probability for OSTBCs over
double-scattering channels.

Every formula is the angular average of the SNR moment generating function:
SEP = (1/pi) int_0^Theta MGF(g/sin^2 theta) dtheta with Theta = pi - pi/M
and g = sin^2(pi/M).  The MGF argument always enters through the composite
xi = g*gbar/(n_s*n_t*rate*sin^2 theta); the three scenario families differ
only in which expected-inverse-determinant identity evaluates the MGF:

* spatially uncorrelated: Hankel determinant of 2F0 kernels;
* doubly correlated (transmit/receive correlation, identity scatterers,
  n_s >= n_t): confluent block determinant with characteristic coefficients;
* MISO (n_r = 1): quadruple characteristic-coefficient sum.

A fourth closed form covers the no-double-scattering (rich scattering)
limit, where the MGF is a plain product over transmit/receive eigenvalue
pairs; with identity correlations it is the i.i.d. Rayleigh reference curve
the figures compare against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import detform
from .detform import characteristic_coefficients, hyp2f0
from .matstat import Scenario
from .quadrule import gauss_legendre

#: Default Gauss-Legendre node count for the angular integral; doubling it
#: moves the shipped scenarios by less than 1e-10.
THETA_NODES = 128

_SUPPORTED_M = (2, 4, 8, 16, 32, 64)


class UnsupportedScenarioError(ValueError):
    """No closed form for this scenario family (Monte Carlo still applies)."""


@dataclass(frozen=True)
class PskConstellation:
    """M-PSK constellation constants: g = sin^2(pi/M), Theta = pi - pi/M."""

    m: int

    def __post_init__(self):
        if self.m not in _SUPPORTED_M:
            raise ValueError(f"M must be one of {_SUPPORTED_M}, got {self.m}")

    @property
    def g(self) -> float:
        return math.sin(math.pi / self.m) ** 2

    @property
    def theta_max(self) -> float:
        return math.pi - math.pi / self.m

    @property
    def sep_ceiling(self) -> float:
        """SEP at zero SNR, (M-1)/M; no formula can exceed it."""
        return 1.0 - 1.0 / self.m


@dataclass(frozen=True)
class SepResult:
    snr_db: float
    sep: float
    method: str  # "closed_form" | "monte_carlo"
    scenario_id: str = ""


def ostbc_snr_scale(scn: Scenario) -> float:
    """Factor mapping gbar*||H||_F^2 to the per-subchannel SNR: 1/(n_t*rate)."""
    return float(1 / (scn.n_t * scn.rate))


def diversity_order(scn: Scenario) -> Fraction:
    """n_t*n_s*n_r / max(n_t, n_s, n_r); n_t*n_r without double scattering."""
    if scn.no_double_scattering:
        return Fraction(scn.n_t * scn.n_r)
    return Fraction(scn.n_t * scn.n_s * scn.n_r, max(scn.n_t, scn.n_s, scn.n_r))


def sep_theta_integral(integrand, theta_max: float, nodes: int = THETA_NODES) -> float:
    """(1/pi) int_0^theta_max integrand(theta) dtheta by Gauss-Legendre."""
    th, w = gauss_legendre(nodes, theta_max)
    return float(np.asarray(integrand(th)) @ w) / math.pi


def conditional_sep_mpsk(gamma, psk: PskConstellation, nodes: int = THETA_NODES):
    """Exact M-PSK SEP conditioned on an instantaneous SNR gamma (vectorized):
    (1/pi) int_0^Theta exp(-g*gamma/sin^2 theta) dtheta."""
    th, w = gauss_legendre(nodes, psk.theta_max)
    gv = np.atleast_1d(np.asarray(gamma, dtype=float))
    out = np.exp(-np.outer(gv, psk.g / np.sin(th) ** 2)) @ w / math.pi
    return float(out[0]) if np.ndim(gamma) == 0 else out


def _xi_of_theta(scn: Scenario, psk: PskConstellation, snr: float,
                 nodes: int) -> tuple[np.ndarray, np.ndarray]:
    if snr <= 0:
        raise ValueError("snr must be positive")
    th, w = gauss_legendre(nodes, psk.theta_max)
    xi = psk.g * snr / (scn.n_s * scn.n_t * float(scn.rate) * np.sin(th) ** 2)
    return xi, w


def sep_mpsk_uncorrelated(scn: Scenario, psk: PskConstellation, snr: float,
                          nodes: int = THETA_NODES) -> float:
    """SEP with all three correlation matrices equal to identity.

    The MGF is the n1 x n1 Hankel determinant in (n1, n2) = sorted
    (n_t, n_s) with 2F0 entries of order n_r; evaluation is symmetric under
    swapping n_t and n_s.
    """
    if not (scn.phi_t.is_identity and scn.phi_s.is_identity and scn.phi_r.is_identity):
        raise ValueError("uncorrelated formula needs identity correlations")
    xi, w = _xi_of_theta(scn, psk, snr, nodes)
    n1, n2 = min(scn.n_t, scn.n_s), max(scn.n_t, scn.n_s)
    vals = _mgf_uncorr_vec(n1, n2, scn.n_r, xi)
    return float(vals @ w) / math.pi


def _mgf_uncorr_vec(m: int, n: int, nu: int, xi: np.ndarray) -> np.ndarray:
    if n <= detform._HANKEL_MAX_N:
        logf = np.empty((2 * m - 1, xi.size))
        for s in range(2, 2 * m + 1):
            f = hyp2f0(n - m + s - 1, nu, xi)
            with np.errstate(divide="ignore"):
                logf[s - 2] = math.lgamma(n - m + s - 1) + np.log(f)
        log_a = sum(math.lgamma(n - k + 1) + math.lgamma(k) for k in range(1, m + 1))
        out = np.empty(xi.size)
        lmat = np.empty((m, m))
        for a in range(xi.size):
            for i in range(m):
                lmat[i] = logf[i : i + m, a]
            sgn, log = detform._det_scaled(lmat, np.ones((m, m)))
            out[a] = 0.0 if sgn == 0.0 else sgn * math.exp(log - log_a)
        return out
    # large second dimension: factorial-free Gram determinant route
    from .quadrule import gauss_laguerre_prob, orthonormal_laguerre

    alpha = n - m
    prev = None
    for deg in (256, 512, 1024, 2048):
        t, wq = gauss_laguerre_prob(deg, alpha)
        p = orthonormal_laguerre(t, alpha, m)
        wf = wq * np.exp(-nu * np.log1p(np.outer(xi, t)))
        g = np.einsum("ad,id,jd->aij", wf, p, p)
        vals = np.linalg.det(g)
        if prev is not None and np.all(np.abs(vals - prev)
                                       <= 1e-11 * np.maximum(np.abs(vals), 1e-300)):
            return vals
        prev = vals
    return vals


def sep_mpsk_doubly_correlated(scn: Scenario, psk: PskConstellation, snr: float,
                               nodes: int = THETA_NODES) -> float:
    """SEP with transmit and receive correlation, identity scatterer
    correlation, and n_s >= n_t.

    Confluent block determinant over the distinct transmit eigenvalues,
    entries mixing receive-side characteristic coefficients with 2F0
    kernels; the normalizer is the matching block determinant of pure
    eigenvalue powers, computed once per scenario.
    """
    if not scn.phi_s.is_identity:
        raise ValueError("doubly-correlated formula needs an identity scatterer correlation")
    if scn.n_s < scn.n_t:
        raise UnsupportedScenarioError(
            f"doubly-correlated closed form needs n_s >= n_t, got ({scn.n_s}, {scn.n_t})"
        )
    xi, w = _xi_of_theta(scn, psk, snr, nodes)
    m, n = scn.n_t, scn.n_s
    spec_t = scn.phi_t.spectrum
    coef_r = characteristic_coefficients(scn.phi_r.spectrum)

    # inner 2F0 sums, one theta-vector per (transmit block, anti-diagonal)
    inner = {}
    for k, (tv, tm) in enumerate(spec_t.distinct):
        for s in range(2, 2 * m + 1):
            acc = np.zeros(xi.size)
            for _, rv, q, x in coef_r.items():
                acc += x * hyp2f0(n - m + s - 1, q, xi * rv * tv)
            inner[(k, s)] = acc

    den_s, den_l = detform._det_scaled(
        *detform._conf_vandermonde_blocks(spec_t, m, n))
    log_k = sum(math.lgamma(n - i + 1) for i in range(1, m + 1))

    out = np.empty(xi.size)
    llog = np.empty((m, m))
    lsign = np.empty((m, m))
    for a in range(xi.size):
        col = 0
        for k, (tv, tm) in enumerate(spec_t.distinct):
            ltv = math.log(tv)
            for j in range(1, tm + 1):
                for i in range(1, m + 1):
                    s = i + j
                    v = inner[(k, s)][a]
                    if v == 0.0:
                        llog[i - 1, col] = -np.inf
                        lsign[i - 1, col] = 0.0
                    else:
                        llog[i - 1, col] = (math.lgamma(n - m + s - 1)
                                            + (n - m + s - 1) * ltv
                                            + math.log(abs(v)))
                        lsign[i - 1, col] = math.copysign(1.0, v)
                col += 1
        num_s, num_l = detform._det_scaled(llog, lsign)
        sgn = num_s * den_s
        out[a] = 0.0 if sgn == 0.0 else sgn * math.exp(num_l - den_l - log_k)
    return float(out @ w) / math.pi


def sep_mpsk_miso(scn: Scenario, psk: PskConstellation, snr: float,
                  nodes: int = THETA_NODES) -> float:
    """SEP for n_r = 1: quadruple sum of scatterer/transmit characteristic
    coefficients against angular 2F0 integrals.

    The partial-fraction coefficients grow combinatorially when many nearly
    equal eigenvalues occur on one side; with the named one-coefficient
    models and the paper-scale dimensions the cancellation stays benign.
    """
    if scn.n_r != 1:
        raise ValueError("MISO formula needs n_r = 1")
    xi, w = _xi_of_theta(scn, psk, snr, nodes)
    cs = characteristic_coefficients(scn.phi_s.spectrum)
    ct = characteristic_coefficients(scn.phi_t.spectrum)
    acc = np.zeros(xi.size)
    for _, sv, i, xs in cs.items():
        for _, tv, j, xt in ct.items():
            acc += (xs * xt) * hyp2f0(i, j, xi * sv * tv)
    return float(acc @ w) / math.pi


def sep_mpsk_no_double_scattering(scn: Scenario, psk: PskConstellation, snr: float,
                                  nodes: int = THETA_NODES) -> float:
    """SEP in the rich-scattering limit (single Gaussian factor): the MGF is
    prod_{i,j} (1 + g*gbar*lt_i*lr_j/(n_t*rate*sin^2))^(-1) over transmit and
    receive eigenvalues.  With identity correlations this is the i.i.d.
    Rayleigh reference curve."""
    if snr <= 0:
        raise ValueError("snr must be positive")
    th, w = gauss_legendre(nodes, psk.theta_max)
    c = psk.g * snr / (scn.n_t * float(scn.rate) * np.sin(th) ** 2)
    pairs = np.multiply.outer(scn.phi_t.spectrum.expand(),
                              scn.phi_r.spectrum.expand()).ravel()
    mgf = np.exp(-np.log1p(np.outer(c, pairs)).sum(axis=1))
    return float(mgf @ w) / math.pi


def sep_mpsk_iid_rayleigh(n_t: int, n_r: int, rate, psk: PskConstellation,
                          snr: float, nodes: int = THETA_NODES) -> float:
    """i.i.d. Rayleigh reference: (1/pi) int (1 + g*gbar/(n_t*rate*sin^2))^(-n_t*n_r)."""
    if snr <= 0:
        raise ValueError("snr must be positive")
    th, w = gauss_legendre(nodes, psk.theta_max)
    c = psk.g * snr / (n_t * float(rate) * np.sin(th) ** 2)
    return float((1.0 + c) ** (-n_t * n_r) @ w) / math.pi


def sep_mpsk(scn: Scenario, psk: PskConstellation, snr: float,
             nodes: int = THETA_NODES) -> float:
    """Closed-form SEP dispatcher.

    Order: rich-scattering limit when flagged, else uncorrelated, then MISO,
    then doubly correlated; scenarios fitting several formulas agree to
    within quadrature accuracy, so the first applicable one is returned.
    Raises UnsupportedScenarioError when no closed form exists.
    """
    if scn.no_double_scattering:
        return sep_mpsk_no_double_scattering(scn, psk, snr, nodes)
    if scn.phi_t.is_identity and scn.phi_s.is_identity and scn.phi_r.is_identity:
        return sep_mpsk_uncorrelated(scn, psk, snr, nodes)
    if scn.n_r == 1:
        return sep_mpsk_miso(scn, psk, snr, nodes)
    if scn.phi_s.is_identity and scn.n_s >= scn.n_t:
        return sep_mpsk_doubly_correlated(scn, psk, snr, nodes)
    raise UnsupportedScenarioError(
        "no closed form: needs identity correlations, n_r = 1, or identity "
        "scatterer correlation with n_s >= n_t"
    )


def has_closed_form(scn: Scenario) -> bool:
    if scn.no_double_scattering:
        return True
    if scn.phi_t.is_identity and scn.phi_s.is_identity and scn.phi_r.is_identity:
        return True
    if scn.n_r == 1:
        return True
    return scn.phi_s.is_identity and scn.n_s >= scn.n_t
