"""Correlation matrices, spectra, and majorization predicates.

The three named single-coefficient models (constant, exponential,
tridiagonal) are symmetric Toeplitz with unit diagonal.  Coefficients are
restricted to ranges where the matrix is strictly positive definite;
degenerate boundary values are rejected rather than limit-handled.

Spectra are kept as (distinct eigenvalue, multiplicity) lists because the
determinantal machinery downstream is discontinuous in the multiplicity
structure: whether two eigenvalues count as equal decides which confluent
block form applies.  Clustering is centralized in `spectrum_of` with a
single relative tolerance knob.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

#: Relative tolerance used to decide when two numerical eigenvalues are
#: the same distinct eigenvalue.
DEFAULT_CLUSTER_TOL = 1e-8

_DIAG_TOL = 1e-12
_NEG_EIG_TOL = -1e-10
_SQRT_FLOOR = 1e-14
_SUM_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Distinct eigenvalues in strictly decreasing order with multiplicities."""

    values: tuple[float, ...]
    mults: tuple[int, ...]
    dim: int

    def __post_init__(self):
        if len(self.values) != len(self.mults):
            raise ValueError("values and mults must have equal length")
        if any(m < 1 for m in self.mults):
            raise ValueError("multiplicities must be positive")
        if sum(self.mults) != self.dim:
            raise ValueError(
                f"multiplicities sum to {sum(self.mults)}, expected dim={self.dim}"
            )
        if any(a <= b for a, b in zip(self.values, self.values[1:])):
            raise ValueError("distinct eigenvalues must be strictly decreasing")

    @property
    def n_distinct(self) -> int:
        return len(self.values)

    @property
    def distinct(self) -> tuple[tuple[float, int], ...]:
        return tuple(zip(self.values, self.mults))

    def expand(self) -> np.ndarray:
        """Full eigenvalue vector (decreasing, multiplicities repeated)."""
        return np.repeat(self.values, self.mults).astype(float)

    def trace_power(self, k: int) -> float:
        """tr(A^k) from the spectrum."""
        return float(sum(m * v**k for v, m in self.distinct))

    @classmethod
    def from_eigenvalues(cls, eigs, cluster_tol: float = DEFAULT_CLUSTER_TOL,
                         dim: int | None = None) -> "Spectrum":
        """Cluster a raw eigenvalue vector into a Spectrum.

        Two eigenvalues join the same group when they differ by less than
        cluster_tol*(1+|lambda|); the group representative is the mean of
        its members.
        """
        e = np.sort(np.asarray(eigs, dtype=float))[::-1]
        if dim is None:
            dim = e.size
        values, mults = [], []
        start = 0
        for i in range(1, e.size + 1):
            if i == e.size or (e[i - 1] - e[i]) >= cluster_tol * (1.0 + abs(e[i])):
                group = e[start:i]
                values.append(float(group.mean()))
                mults.append(int(group.size))
                start = i
        return cls(tuple(values), tuple(mults), dim)


def spectrum_of(matrix, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> Spectrum:
    """Spectrum of a Hermitian matrix (or CorrelationMatrix) with eigenvalue
    clustering."""
    if isinstance(matrix, CorrelationMatrix):
        matrix = matrix.entries
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("input must be a square matrix")
    eigs = np.linalg.eigvalsh(a)
    return Spectrum.from_eigenvalues(eigs, cluster_tol=cluster_tol)


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Hermitian positive-definite matrix with all diagonal entries 1.

    `known_spectrum` lets the model constructors install an exact spectrum
    (the constant model has a two-point closed-form spectrum); otherwise
    the spectrum is computed lazily by clustering numeric eigenvalues.
    """

    entries: np.ndarray
    known_spectrum: Spectrum | None = field(default=None, repr=False)

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("correlation matrix must be square")
        object.__setattr__(self, "entries", a)
        if not np.array_equal(a, a.conj().T):
            raise ValueError("correlation matrix must be exactly Hermitian as stored")
        if np.max(np.abs(np.diagonal(a) - 1.0)) > _DIAG_TOL:
            raise ValueError("all diagonal entries must equal 1")
        if self.known_spectrum is not None:
            # model constructors supply exact spectra; a trace consistency
            # check replaces the O(n^3) eigendecomposition (matters for the
            # scatterer side at n in the thousands)
            spec = self.known_spectrum
            if spec.dim != a.shape[0]:
                raise ValueError("known spectrum dimension mismatch")
            if abs(spec.trace_power(1) - float(np.trace(a).real)) > 1e-9 * spec.dim:
                raise ValueError("known spectrum inconsistent with the matrix trace")
            if spec.values[-1] <= 0.0:
                raise ValueError("correlation matrix must be positive definite")
        elif np.min(np.linalg.eigvalsh(a)) <= 0.0:
            raise ValueError("correlation matrix must be positive definite")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def spectrum(self) -> Spectrum:
        if self.known_spectrum is not None:
            return self.known_spectrum
        return spectrum_of(self.entries)

    @cached_property
    def sqrt(self) -> np.ndarray:
        return matrix_sqrt(self)

    @cached_property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.entries, np.eye(self.dim)))


def identity_corr(n: int) -> CorrelationMatrix:
    """The uncorrelated (identity) model."""
    if n < 1:
        raise ValueError("dimension must be positive")
    return CorrelationMatrix(np.eye(n), Spectrum((1.0,), (n,), n))


def constant_corr(n: int, rho: float) -> CorrelationMatrix:
    """Constant model: every off-diagonal entry equals rho.

    Spectrum is {1+(n-1)rho with multiplicity 1, 1-rho with multiplicity
    n-1}, installed exactly.  rho=1 is rank one and rejected.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"constant model needs rho in [0, 1), got {rho}")
    if rho == 0.0 or n == 1:
        return identity_corr(n)
    m = np.full((n, n), float(rho))
    np.fill_diagonal(m, 1.0)
    e1, e2 = 1.0 + (n - 1) * rho, 1.0 - rho
    if e1 > e2:
        spec = Spectrum((e1, e2), (1, n - 1), n)
    else:
        # rho below float resolution: the two branches coincide at 1
        spec = Spectrum((1.0,), (n,), n)
    return CorrelationMatrix(m, spec)


def exponential_corr(n: int, rho: float) -> CorrelationMatrix:
    """Exponential model: entry (i, j) = rho^|i-j|."""
    if n < 1:
        raise ValueError("dimension must be positive")
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"exponential model needs rho in [0, 1), got {rho}")
    if rho == 0.0 or n == 1:
        return identity_corr(n)
    idx = np.arange(n)
    m = rho ** np.abs(idx[:, None] - idx[None, :]).astype(float)
    return CorrelationMatrix(m)


def tridiagonal_corr(n: int, rho: float) -> CorrelationMatrix:
    """Tridiagonal model: rho on the first off-diagonals, zero elsewhere.

    Positive definite iff rho < 0.5/cos(pi/(n+1)); the bound is excluded.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    bound = 0.5 / np.cos(np.pi / (n + 1))
    if not 0.0 <= rho < bound:
        raise ValueError(
            f"tridiagonal model needs rho in [0, {bound:.6g}) for n={n}, got {rho}"
        )
    if rho == 0.0 or n == 1:
        return identity_corr(n)
    m = np.eye(n) + rho * (np.eye(n, k=1) + np.eye(n, k=-1))
    return CorrelationMatrix(m)


def correlation_figure(phi: CorrelationMatrix) -> float:
    """tr(Phi^2)/n^2; ranges over [1/n, 1] for unit-diagonal PD matrices."""
    a = phi.entries
    n = phi.dim
    # tr(Phi^2) = ||Phi||_F^2 for Hermitian Phi
    return float(np.vdot(a, a).real) / (n * n)


def matrix_sqrt(phi) -> np.ndarray:
    """Unique Hermitian PD square root, via eigendecomposition.

    Eigenvalues below -1e-10 are rejected; round-off negatives above that
    are floored at 1e-14 before the square root.
    """
    a = phi.entries if isinstance(phi, CorrelationMatrix) else np.asarray(phi)
    w, v = np.linalg.eigh(a)
    if np.min(w) < _NEG_EIG_TOL:
        raise ValueError("matrix_sqrt requires a positive-definite input")
    w = np.maximum(w, _SQRT_FLOOR)
    s = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def majorizes(a, b, weak: bool = False) -> bool:
    """True when `a` is majorized by `b` (a <= b in the majorization order).

    Checks dominance of sorted-descending prefix sums; the strict (default)
    mode additionally requires the total sums to agree within 1e-10.
    A relative slack of the same size is allowed on each prefix comparison
    so that numerically equal spectra compare as majorized.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("majorizes needs two equal-length vectors")
    pa = np.cumsum(np.sort(a)[::-1])
    pb = np.cumsum(np.sort(b)[::-1])
    scale = 1.0 + np.maximum(np.abs(pa), np.abs(pb))
    if not weak and abs(pa[-1] - pb[-1]) > _SUM_TOL * scale[-1]:
        return False
    return bool(np.all(pa <= pb + _SUM_TOL * scale))
