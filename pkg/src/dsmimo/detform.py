"""Determinantal special-function kernels.

Everything here reduces to three ingredients:

* a scalar 2F0 kernel, defined (not merely represented) by the integral
      2F0(n, q; -x) = (1/(n-1)!) int_0^inf (1+x t)^(-q) t^(n-1) e^-t dt,
  which is the quantity the closed-form error-probability and
  inverse-determinant expressions call for (the hypergeometric series
  itself is divergent);
* characteristic coefficients: the partial-fraction expansion of
  det(I + xi A)^(-1) over the distinct eigenvalues of A;
* block determinants with confluent (multiplicity-aware) columns, evaluated
  in log-scaled form so factorials and eigenvalue powers never overflow.

The expected-inverse-determinant evaluators return values in (0, 1]; they
are the moment generating functions behind every closed-form SEP.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .corrmat import Spectrum
from .quadrule import gauss_laguerre_prob, orthonormal_laguerre

_RTOL = 1e-10
_DEGREES = (64, 128, 256, 512, 1024)
_TINY = 1e-300


# ---------------------------------------------------------------------------
# scalar kernel
# ---------------------------------------------------------------------------

def _hyp2f0_quad(nw: int, ne: int, x: float) -> float:
    """Adaptive-quadrature fallback on the defining integral (normalized by
    Gamma(nw)); used when the Gauss-Laguerre nodes cannot resolve the
    1/x-scale knee of (1+xt)^-ne."""
    lg = math.lgamma(nw)

    def f(t):
        if t <= 0.0:
            return 0.0 if nw > 1 else math.exp(-ne * math.log1p(x * t))
        return math.exp((nw - 1) * math.log(t) - t - lg - ne * math.log1p(x * t))

    knee = 1.0 / x
    mid = max(8.0 * nw, 200.0 * knee)
    pts = sorted({min(knee, 0.5 * mid), min(float(nw), 0.9 * mid)})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        head, _ = integrate.quad(f, 0.0, mid, points=pts, epsabs=0.0,
                                 epsrel=1e-12, limit=500)
        tail, _ = integrate.quad(f, mid, np.inf, epsrel=1e-12, limit=200)
    return head + tail


def hyp2f0(n: int, q: int, x):
    """2F0(n, q; -x) for positive integers n, q and x >= 0 (scalar or array).

    Evaluated by generalized Gauss-Laguerre quadrature on the defining
    integral, with the larger of (n, q) taken as the weight order (the
    function is symmetric in its parameters).  The node count doubles from
    64 until successive results agree to 1e-10 relative (cap 1024); any
    entry still unconverged at the cap is finished by adaptive quadrature.
    Values lie in (0, 1], equal 1 at x = 0, and decrease in x.
    """
    if n < 1 or q < 1:
        raise ValueError("parameters must be positive integers")
    scalar = np.isscalar(x) or np.ndim(x) == 0
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xv < 0.0):
        raise ValueError("argument x must be nonnegative")
    nw, ne = max(n, q), min(n, q)

    cur = np.ones_like(xv)
    conv = xv == 0.0
    prev = None
    for deg in _DEGREES:
        t, w = gauss_laguerre_prob(deg, nw - 1)
        cur = np.exp(-ne * np.log1p(np.outer(xv, t))) @ w
        if prev is not None:
            conv = np.abs(cur - prev) <= _RTOL * np.maximum(cur, _TINY)
            if conv.all():
                break
        prev = cur
    if not conv.all():
        for i in np.nonzero(~conv)[0]:
            cur[i] = _hyp2f0_quad(nw, ne, float(xv[i]))
    cur[xv == 0.0] = 1.0
    # the integrand never exceeds the weight, so round-off above 1 is noise
    np.minimum(cur, 1.0, out=cur)
    return float(cur[0]) if scalar else cur


# ---------------------------------------------------------------------------
# characteristic coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CharCoefficients:
    """Partial-fraction coefficients X[p][j-1] aligned with a Spectrum.

    det(I + xi A)^(-1) = sum_p sum_j X[p][j-1] (1 + xi a<p>)^(-j).
    The coefficients sum to one (evaluate the expansion at xi = 0).
    """

    spectrum: Spectrum
    coeffs: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        total = sum(c for row in self.coeffs for c in row)
        mag = sum(abs(c) for row in self.coeffs for c in row)
        # float summation of large alternating coefficients cannot beat
        # eps * sum|X|; widen the 1e-10 gate accordingly
        tol = max(1e-10, 64 * np.finfo(float).eps * mag)
        if abs(total - 1.0) > tol:
            raise ValueError(f"characteristic coefficients sum to {total}, not 1")

    def items(self):
        """Yield (p, eigenvalue, j, X_pj) over all coefficients (j is 1-based)."""
        for p, (val, mult) in enumerate(self.spectrum.distinct):
            for j in range(1, mult + 1):
                yield p, val, j, self.coeffs[p][j - 1]

    def reconstruct(self, xi: float) -> float:
        """Evaluate the partial-fraction expansion of det(I + xi A)^(-1)."""
        return float(sum(x * (1.0 + xi * val) ** (-j)
                         for _, val, j, x in self.items()))


def characteristic_coefficients(spec: Spectrum) -> CharCoefficients:
    """Characteristic coefficients of a Hermitian matrix from its spectrum.

    The finite-sum definition runs over compositions of the multiplicity
    deficit; it is evaluated here as a truncated power-series product, one
    binomial series per foreign eigenvalue, which is algebraically the same
    sum without the combinatorial loop.
    """
    if any(v == 0.0 for v in spec.values):
        raise ValueError("characteristic coefficients need nonzero eigenvalues")
    rows = []
    for i, (ai, ti) in enumerate(spec.distinct):
        wmax = ti - 1
        series = np.zeros(wmax + 1)
        series[0] = 1.0
        for l, (al, tl) in enumerate(spec.distinct):
            if l == i:
                continue
            gap = 1.0 - al / ai
            term = np.array([math.comb(tl + k - 1, k) * (al / gap) ** k
                             for k in range(wmax + 1)])
            term *= gap ** (-tl)
            series = np.convolve(series, term)[: wmax + 1]
        rows.append(tuple(float((-1.0) ** (ti - j) / ai ** (ti - j) * series[ti - j])
                          for j in range(1, ti + 1)))
    return CharCoefficients(spec, tuple(rows))


# ---------------------------------------------------------------------------
# log-scaled determinants
# ---------------------------------------------------------------------------

def _det_scaled(logmag: np.ndarray, sign: np.ndarray) -> tuple[float, float]:
    """(sign, log|det|) of the matrix sign*exp(logmag), via row/column
    balancing so the scaled matrix feeds slogdet with O(1) entries."""
    with np.errstate(invalid="ignore"):
        r = logmag.max(axis=1)
        if not np.all(np.isfinite(r)):
            return 0.0, -np.inf
        c = (logmag - r[:, None]).max(axis=0)
        c = np.where(np.isfinite(c), c, 0.0)
        m = sign * np.exp(logmag - r[:, None] - c[None, :])
    s, ld = np.linalg.slogdet(m)
    if s == 0.0:
        return 0.0, -np.inf
    return float(s), float(ld + r.sum() + c.sum())


def _poch(a: int, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= a + i
    return out


def _derivative_vandermonde_blocks(spec: Spectrum, nrows: int):
    """(logmag, sign) of the stacked sigma-derivative Vandermonde blocks with
    entries (i-j+1)_(j-1) sigma<k>^(i-j): column j of block k is the (j-1)th
    derivative of (sigma^0, ..., sigma^(nrows-1)) at sigma<k>."""
    dim = sum(spec.mults)
    logmag = np.full((nrows, dim), -np.inf)
    sign = np.zeros((nrows, dim))
    col = 0
    for val, mult in spec.distinct:
        lv = math.log(abs(val))
        sv = 1.0 if val > 0 else -1.0
        for j in range(1, mult + 1):
            for i in range(j, nrows + 1):
                p = _poch(i - j + 1, j - 1)
                logmag[i - 1, col] = math.log(p) + (i - j) * lv
                sign[i - 1, col] = sv ** (i - j)
            col += 1
    return logmag, sign


def _conf_vandermonde_blocks(spec: Spectrum, nrows: int, power_offset: int):
    """(logmag, sign) of the stacked confluent-Vandermonde-style blocks with
    entries (-1)^(i-j) (i-j+1)_(j-1) sigma<k>^(power_offset - i + j)."""
    dim = sum(spec.mults)
    logmag = np.full((nrows, dim), -np.inf)
    sign = np.zeros((nrows, dim))
    col = 0
    for val, mult in spec.distinct:
        lv = math.log(abs(val))
        sv = 1.0 if val > 0 else -1.0
        for j in range(1, mult + 1):
            for i in range(1, nrows + 1):
                p = _poch(i - j + 1, j - 1)
                if p == 0.0:
                    continue
                pw = power_offset - i + j
                logmag[i - 1, col] = math.log(abs(p)) + pw * lv
                sign[i - 1, col] = math.copysign(1.0, p) * (-1.0) ** (i - j) * sv**pw
            col += 1
    return logmag, sign


# ---------------------------------------------------------------------------
# generic two-matrix determinantal formula
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HypKernelId:
    """Scalar kernel selector for the generic determinantal formula.

    tag "exp" is the 0F0 kernel e^x; tag "2f0" carries the two upper
    parameters (a1, a2) of a 2F0 kernel and requires a nonpositive argument.
    """

    tag: str
    params: tuple[int, ...] = ()

    @classmethod
    def exp(cls) -> "HypKernelId":
        return cls("exp")

    @classmethod
    def two_f_zero(cls, a1: int, a2: int) -> "HypKernelId":
        return cls("2f0", (a1, a2))

    def __post_init__(self):
        if self.tag not in ("exp", "2f0"):
            raise ValueError(f"unsupported kernel tag {self.tag!r}")
        if self.tag == "2f0" and len(self.params) != 2:
            raise ValueError("2f0 kernel needs exactly two upper parameters")


def _kernel_chi(kernel: HypKernelId, n: int, nu: int) -> float:
    if kernel.tag == "exp":
        return 1.0
    a1, a2 = kernel.params
    return 1.0 / (_poch(a1 - n + 1, nu) * _poch(a2 - n + 1, nu))


def _kernel_h_log(kernel: HypKernelId, n: int, nu: int, x: float) -> tuple[float, float]:
    """(sign, log|H|) of the kernel value H_{p,q}^{n,nu}(x)."""
    if kernel.tag == "exp":
        return 1.0, x
    a1, a2 = kernel.params
    if x > 0:
        raise ValueError("2f0 kernel requires a nonpositive argument")
    val = hyp2f0(a1 - n + nu, a2 - n + nu, -x)
    return (1.0, math.log(val)) if val > 0 else (0.0, -np.inf)


def hyp_det_two_matrix(lambda_spec: Spectrum, sigma_spec: Spectrum,
                       kernel: HypKernelId) -> float:
    """Hypergeometric function of two Hermitian matrix arguments, evaluated
    by the confluent block-determinant formula.

    The first argument's eigenvalues must be simple (multiplicity one) and
    nonzero; repeated eigenvalues on that side are a degenerate-argument
    error.  Second-argument multiplicities of any pattern are handled by
    the confluent column blocks.
    """
    if any(m != 1 for m in lambda_spec.mults):
        raise ValueError("first-argument eigenvalues must be distinct")
    if any(v == 0.0 for v in lambda_spec.values):
        raise ValueError("first-argument eigenvalues must be nonzero")
    m = lambda_spec.dim
    n = sigma_spec.dim
    if m > n:
        raise ValueError("need dim(lambda) <= dim(sigma)")
    if kernel.tag == "2f0":
        a1, a2 = kernel.params
        if a1 - n + 1 < 1 or a2 - n + 1 < 1:
            raise ValueError("2f0 kernel parameters too small for this dimension")

    lams = np.array(lambda_spec.values)

    # numerator: (n-m) derivative-Vandermonde rows over m kernel rows
    top_log, top_sign = _derivative_vandermonde_blocks(sigma_spec, n - m)
    bot_log = np.full((m, n), -np.inf)
    bot_sign = np.zeros((m, n))
    col = 0
    for val, mult in sigma_spec.distinct:
        for j in range(1, mult + 1):
            chi = _kernel_chi(kernel, n, j - 1)
            for i in range(m):
                hs, hl = _kernel_h_log(kernel, n, j, lams[i] * val)
                if hs == 0.0:
                    continue
                lm = (j - 1) * math.log(abs(lams[i])) - math.log(abs(chi)) + hl
                bot_log[i, col] = lm
                bot_sign[i, col] = (np.sign(lams[i]) ** (j - 1)
                                    * math.copysign(1.0, chi) * hs)
            col += 1
    num_s, num_l = _det_scaled(np.vstack([top_log, bot_log]),
                               np.vstack([top_sign, bot_sign]))
    den_s, den_l = _det_scaled(*_derivative_vandermonde_blocks(sigma_spec, n))

    log_k = sum(math.log(abs(_kernel_chi(kernel, n, n - i))) + math.lgamma(n - i + 1)
                for i in range(1, m + 1))
    sign_k = math.prod(math.copysign(1.0, _kernel_chi(kernel, n, n - i))
                       for i in range(1, m + 1))

    vdm = 1.0
    for i in range(m):
        for j in range(i + 1, m):
            vdm *= lams[j] - lams[i]

    det_lam = float(np.prod(lams))
    sign = (num_s * den_s * sign_k * math.copysign(1.0, vdm)
            * math.copysign(1.0, det_lam) ** (n - m))
    log = (num_l - den_l + log_k - (n - m) * math.log(abs(det_lam))
           - math.log(abs(vdm)))
    return sign * math.exp(log)


# ---------------------------------------------------------------------------
# eigenvalue densities
# ---------------------------------------------------------------------------

def _check_ordered_positive(lams) -> np.ndarray:
    v = np.asarray(lams, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError("need a vector of eigenvalues")
    if np.any(v <= 0.0):
        raise ValueError("eigenvalue arguments must be positive")
    if np.any(np.diff(v) > 0.0):
        raise ValueError("eigenvalue arguments must be in decreasing order")
    return v


def _log_vandermonde(lams: np.ndarray) -> tuple[float, float]:
    """(sign, log|det|) of the matrix (lams_j^(i-1))."""
    sign, log = 1.0, 0.0
    m = lams.size
    for i in range(m):
        for j in range(i + 1, m):
            d = lams[j] - lams[i]
            if d == 0.0:
                return 0.0, -np.inf
            sign *= math.copysign(1.0, d)
            log += math.log(abs(d))
    return sign, log


def wishart_eigen_pdf(lams, n: int, sigma_spec: Spectrum) -> float:
    """Joint pdf of the ordered eigenvalues of X X^H, X an m x n standard-
    column Gaussian with row covariance Sigma (m <= n), at the point lams
    (decreasing, positive).  Handles any Sigma multiplicity pattern."""
    v = _check_ordered_positive(lams)
    m = v.size
    if sigma_spec.dim != m:
        raise ValueError("sigma spectrum dimension must match len(lams)")
    if n < m:
        raise ValueError("need n >= m")

    glog = np.empty((m, m))
    gsign = np.empty((m, m))
    col = 0
    for val, mult in sigma_spec.distinct:
        for j in range(1, mult + 1):
            glog[:, col] = (j - 1) * np.log(v) - v / val
            gsign[:, col] = 1.0
            col += 1
    gs, gl = _det_scaled(glog, gsign)
    bs, bl = _det_scaled(*_conf_vandermonde_blocks(sigma_spec, m, n))
    vs, vl = _log_vandermonde(v)
    log_k = sum(math.lgamma(n - i + 1) for i in range(1, m + 1))

    sign = gs * vs * bs
    log = gl + vl + (n - m) * float(np.log(v).sum()) - log_k - bl
    return 0.0 if sign == 0.0 else sign * math.exp(log)


def quadratic_form_eigen_pdf(lams, n: int, beta_spec: Spectrum) -> float:
    """Joint pdf of the ordered eigenvalues of X A X^H for X an m x n
    standard-row Gaussian with column covariance Psi and A Hermitian PD;
    beta_spec is the spectrum of A^(1/2) Psi A^(1/2) (dimension n)."""
    v = _check_ordered_positive(lams)
    m = v.size
    if beta_spec.dim != n:
        raise ValueError("beta spectrum dimension must equal n")
    if n < m:
        raise ValueError("need n >= m")

    top_log, top_sign = _conf_vandermonde_blocks(beta_spec, n - m, 0)
    qlog = np.empty((m, n))
    qsign = np.ones((m, n))
    col = 0
    for val, mult in beta_spec.distinct:
        for j in range(1, mult + 1):
            qlog[:, col] = (j - 1) * np.log(v) - v / val
            col += 1
    num_s, num_l = _det_scaled(np.vstack([top_log, qlog]),
                               np.vstack([top_sign, qsign]))
    den_s, den_l = _det_scaled(*_conf_vandermonde_blocks(beta_spec, n, 0))
    vs, vl = _log_vandermonde(v)
    log_k = sum(math.lgamma(m - i + 1) for i in range(1, m + 1))
    log_det_apsi = float(sum(mu * math.log(val) for val, mu in beta_spec.distinct))

    sign = num_s * den_s * vs
    log = num_l - den_l + vl - log_k - m * log_det_apsi
    return 0.0 if sign == 0.0 else sign * math.exp(log)


# ---------------------------------------------------------------------------
# expected inverse determinants (the SEP kernels)
# ---------------------------------------------------------------------------

def expected_inv_det_kron(m: int, n: int, sigma_spec: Spectrum, a_spec: Spectrum,
                          xi: float) -> float:
    """E det(I + xi A (x) XX^H)^(-1) for X m x n (m <= n) with row covariance
    Sigma and a PSD matrix A; arguments are the two spectra and xi >= 0."""
    if xi < 0:
        raise ValueError("xi must be nonnegative")
    if sigma_spec.dim != m or n < m:
        raise ValueError("need sigma spectrum of dimension m and n >= m")
    coeffs = characteristic_coefficients(a_spec)

    olog = np.empty((m, m))
    osign = np.empty((m, m))
    col = 0
    for val, mult in sigma_spec.distinct:
        lv = math.log(val)
        # entries depend on (i, j) through s = i + j; evaluate each s once
        svals = {}
        for j in range(1, mult + 1):
            for i in range(1, m + 1):
                s = i + j
                if s not in svals:
                    inner = sum(
                        x * hyp2f0(n - m + s - 1, jj, xi * av * val)
                        for _, av, jj, x in coeffs.items()
                    )
                    svals[s] = inner
                inner = svals[s]
                if inner == 0.0:
                    olog[i - 1, col] = -np.inf
                    osign[i - 1, col] = 0.0
                else:
                    olog[i - 1, col] = (math.lgamma(n - m + s - 1)
                                        + (n - m + s - 1) * lv
                                        + math.log(abs(inner)))
                    osign[i - 1, col] = math.copysign(1.0, inner)
            col += 1
    num_s, num_l = _det_scaled(olog, osign)
    den_s, den_l = _det_scaled(*_conf_vandermonde_blocks(sigma_spec, m, n))
    log_k = sum(math.lgamma(n - i + 1) for i in range(1, m + 1))
    sign = num_s * den_s
    if sign == 0.0:
        return 0.0
    return sign * math.exp(num_l - den_l - log_k)


def uncorrelated_hankel(m: int, n: int, nu: int, xi) -> np.ndarray:
    """The m x m Hankel matrix with entries
    (n-m+i+j-2)! 2F0(n-m+i+j-1, nu; -xi); xi may be a vector (leading axis)."""
    xv = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.empty((xv.size, m, m))
    for s in range(2, 2 * m + 1):
        vals = math.factorial(n - m + s - 2) * hyp2f0(n - m + s - 1, nu, xv)
        for i in range(max(1, s - m), min(m, s - 1) + 1):
            out[:, i - 1, s - i - 1] = vals
    return out[0] if np.isscalar(xi) or np.ndim(xi) == 0 else out


def _uncorr_hankel_logdet(m: int, n: int, nu: int, xi: float) -> float:
    llog = np.empty((m, m))
    for s in range(2, 2 * m + 1):
        f = hyp2f0(n - m + s - 1, nu, xi)
        lv = math.lgamma(n - m + s - 1) + (math.log(f) if f > 0 else -np.inf)
        for i in range(max(1, s - m), min(m, s - 1) + 1):
            llog[i - 1, s - i - 1] = lv
    sgn, log = _det_scaled(llog, np.ones((m, m)))
    log_a = sum(math.lgamma(n - k + 1) + math.lgamma(k) for k in range(1, m + 1))
    return 0.0 if sgn == 0.0 else sgn * math.exp(log - log_a)


def _uncorr_gram(m: int, n: int, nu: int, xi: float) -> float:
    """Same expectation through the orthonormal-polynomial Gram determinant:
    det of int p_i p_j (1+xi t)^(-nu) dmu over the Laguerre measure of order
    n-m.  No factorials appear, so this stays accurate for n in the
    thousands; it loses accuracy only for xi >> 1 with nu >= n-m+1, a corner
    the Hankel route owns."""
    alpha = n - m
    prev = None
    for deg in (256, 512, 1024, 2048):
        t, w = gauss_laguerre_prob(deg, alpha)
        p = orthonormal_laguerre(t, alpha, m)
        g = (p * (w * np.exp(-nu * np.log1p(xi * t)))) @ p.T
        val = float(np.linalg.det(g))
        if prev is not None and abs(val - prev) <= 1e-11 * max(abs(val), _TINY):
            return val
        prev = val
    return val


#: n above which the Hankel route's factorial cancellation (growing like
#: n^(m(m-1)/2) in units of eps) is traded for the Gram route.
_HANKEL_MAX_N = 64


def expected_inv_det_uncorr(m: int, n: int, nu: int, xi: float,
                            method: str = "auto") -> float:
    """E det(I + xi XX^H)^(-nu) for an m x n i.i.d. standard complex Gaussian
    X with m <= n; equals the Hankel determinant ratio of the uncorrelated
    reduction.  method: "hankel", "gram", or "auto" (hankel for n <= 64)."""
    if xi < 0:
        raise ValueError("xi must be nonnegative")
    if m > n:
        raise ValueError("need m <= n")
    if xi == 0.0:
        return 1.0
    if method == "auto":
        method = "hankel" if n <= _HANKEL_MAX_N else "gram"
    if method == "hankel":
        return _uncorr_hankel_logdet(m, n, nu, xi)
    if method == "gram":
        return _uncorr_gram(m, n, nu, xi)
    raise ValueError(f"unknown method {method!r}")


def expected_inv_det_miso(sigma_spec: Spectrum, psi_spec: Spectrum,
                          xi: float) -> float:
    """E det(I + xi XX^H)^(-1) for X with row covariance Sigma and column
    covariance Psi: a quadruple sum of characteristic-coefficient products
    against 2F0 kernels.  Symmetric in the two spectra."""
    if xi < 0:
        raise ValueError("xi must be nonnegative")
    if xi == 0.0:
        return 1.0
    cs = characteristic_coefficients(sigma_spec)
    cp = characteristic_coefficients(psi_spec)
    total = 0.0
    for _, sv, i, xs in cs.items():
        for _, pv, j, xp in cp.items():
            total += xs * xp * hyp2f0(i, j, xi * sv * pv)
    return float(total)
