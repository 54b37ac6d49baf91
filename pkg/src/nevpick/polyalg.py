"""Polynomial and structured-matrix primitives shared by the solver.

Conventions used throughout the package:

* polynomial coefficient vectors are stored in **descending powers**,
  so ``(1, c1, ..., cn)`` represents ``z^n + c1 z^(n-1) + ... + cn``;
* a "full" coefficient vector is a plain 1-d ``numpy`` array of length
  ``n + 1`` whose leading entry may be anything (differences of monic
  polynomials have a leading 0);
* the monic case is wrapped in :class:`MonicPolynomial`, which pins the
  leading coefficient to exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import hankel, toeplitz

__all__ = [
    "MonicPolynomial",
    "CompanionData",
    "eval_poly",
    "roots_and_schur",
    "companion",
    "build_d",
    "build_S",
    "sym_coeffs",
]


def _coeff_array(poly) -> np.ndarray:
    """Coerce an argument to a 1-d float coefficient array (descending)."""
    if isinstance(poly, MonicPolynomial):
        return poly.coeffs
    arr = np.asarray(poly, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("coefficient vector must be 1-d and nonempty")
    return arr


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class MonicPolynomial:
    """Real monic polynomial ``z^n + c1 z^(n-1) + ... + cn``.

    ``coeffs`` holds ``(1, c1, ..., cn)`` in descending powers; the leading
    entry must be exactly 1.  Instances are immutable.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("coeffs must be a nonempty 1-d vector")
        if arr[0] != 1.0:
            raise ValueError("leading coefficient must be exactly 1")
        object.__setattr__(self, "coeffs", _readonly(arr))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def tail(self) -> np.ndarray:
        """Coefficients after the leading 1, i.e. ``(c1, ..., cn)``."""
        return self.coeffs[1:]

    @classmethod
    def from_roots(cls, roots, tol_imag: float = 1e-9) -> "MonicPolynomial":
        """Monic polynomial with the given (conjugate-closed) roots."""
        c = np.atleast_1d(np.poly(np.asarray(roots, dtype=complex)))
        scale = max(1.0, float(np.max(np.abs(c))))
        if np.max(np.abs(c.imag)) > tol_imag * scale:
            raise ValueError("roots are not closed under conjugation")
        return cls(c.real)

    def __call__(self, z):
        return eval_poly(self, z)

    def __repr__(self):
        return f"MonicPolynomial(degree={self.degree}, coeffs={self.coeffs.tolist()})"


@dataclass(frozen=True, eq=False)
class CompanionData:
    """Companion-form realization of a monic polynomial.

    ``Gamma`` is the n-by-n matrix whose first column is the negated tail
    of the polynomial and whose remaining columns are a shifted identity;
    its characteristic polynomial is the polynomial itself.  ``h`` is the
    unit vector ``(1, 0, ..., 0)`` and ``sigma_vec`` the coefficient tail.
    """

    Gamma: np.ndarray
    h: np.ndarray
    sigma_vec: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Gamma", _readonly(np.array(self.Gamma, dtype=float)))
        object.__setattr__(self, "h", _readonly(np.array(self.h, dtype=float)))
        object.__setattr__(self, "sigma_vec", _readonly(np.array(self.sigma_vec, dtype=float)))

    @property
    def n(self) -> int:
        return self.sigma_vec.size


def eval_poly(poly, z):
    """Evaluate a descending-coefficient polynomial at finite ``z``.

    ``z`` may be scalar or an array; the result is complex when ``z`` is.
    The point at infinity must be handled by the caller (leading-coefficient
    convention); never pass it here.
    """
    return np.polyval(_coeff_array(poly), z)


def roots_and_schur(poly, eps_schur: float = 0.0):
    """All roots of ``poly`` plus a strict unit-disk membership flag.

    Returns ``(roots, is_schur)`` where ``is_schur`` is true iff every root
    satisfies ``|root| < 1 - eps_schur``.  Roots come from the eigenvalues
    of a companion matrix (``numpy.roots``).
    """
    c = _coeff_array(poly)
    r = np.roots(c)
    is_schur = bool(r.size == 0 or np.max(np.abs(r)) < 1.0 - eps_schur)
    return r, is_schur


def companion(sigma: MonicPolynomial) -> CompanionData:
    """Companion data (Gamma, h, sigma_vec) for a monic polynomial."""
    n = sigma.degree
    sv = sigma.tail
    Gamma = np.zeros((n, n))
    if n:
        Gamma[:, 0] = -sv
    if n > 1:
        Gamma[np.arange(n - 1), np.arange(1, n)] = 1.0
    h = np.zeros(n)
    if n:
        h[0] = 1.0
    return CompanionData(Gamma=Gamma, h=h, sigma_vec=sv)


def build_d(sigma: MonicPolynomial) -> np.ndarray:
    """First ``n`` autocorrelation coefficients of a monic polynomial.

    Entry ``k`` equals ``sum_i s_i s_(i+k)`` over the full coefficient
    vector ``s = (1, c1, ..., cn)``, i.e. the ``z^k`` coefficient of
    ``sigma(z) * sigma(1/z)`` for ``k = 0, ..., n-1``.
    """
    s = sigma.coeffs
    n = sigma.degree
    return np.array([s[: n + 1 - k] @ s[k:] for k in range(n)])


def build_S(x) -> np.ndarray:
    """Symmetrized-product matrix of a full coefficient vector.

    For vectors ``x, y`` of length ``n + 1``, ``build_S(x) @ y`` gives the
    ``z^k`` coefficients (k = 0..n) of ``x(z) y(1/z) + y(z) x(1/z)``.  The
    matrix is the sum of the Hankel matrix ``H[i, j] = x[i + j]`` and the
    upper-triangular Toeplitz matrix with first row ``x``.  The leading
    entry of ``x`` may be 0 (e.g. a difference of monic polynomials).
    """
    v = _coeff_array(x)
    m = v.size
    H = hankel(v, np.zeros(m))
    col = np.zeros(m)
    col[0] = v[0]
    Tu = toeplitz(col, v)
    return H + Tu


def sym_coeffs(x, y) -> np.ndarray:
    """Coefficients of ``x(z) y(1/z) + y(z) x(1/z)`` by direct convolution.

    Independent of :func:`build_S`; serves as its cross-check.  Returns the
    ``z^k`` coefficients for ``k = 0, ..., n``.
    """
    a = _coeff_array(x)
    b = _coeff_array(y)
    if a.size != b.size:
        raise ValueError("coefficient vectors must have equal length")
    m = a.size
    return np.array([a[: m - k] @ b[k:] + b[: m - k] @ a[k:] for k in range(m)])
