"""Two-mode Gaussian covariance matrices and the degree of inseparability.

Ordering is (X1+, X1-, X2+, X2-) with [X+, X-] = i, so vacuum has variance 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import InvalidParameter, NumericalBranch
from .noise import transfer_witness

BONA_FIDE_TOL = 1e-10
BRANCH_TOL = 1e-9
# Strongly squeezed states have entries ~e^{2r} whose determinants cancel down
# to O(1); the seralian route is evaluated with this many digits.
_DPS = 80
# symplectic form for the (x1, p1, x2, p2) ordering
OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class CovarianceMatrix2Mode:
    matrix: np.ndarray
    m_squared: float = 1.0
    # optional high-precision copy (mpmath matrix) carried through channels so
    # that strongly squeezed states do not lose their O(1) structure to rounding
    exact: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise InvalidParameter("covariance matrix must be 4x4")
        if not np.allclose(m, m.T, atol=1e-12, rtol=0):
            raise InvalidParameter("covariance matrix must be symmetric")
        object.__setattr__(self, "matrix", 0.5 * (m + m.T))

    def high_precision(self):
        if self.exact is not None:
            return self.exact
        return mpmath.matrix(self.matrix.tolist())

    @property
    def a(self):
        return self.matrix[:2, :2]

    @property
    def b(self):
        return self.matrix[2:, 2:]

    @property
    def c(self):
        return self.matrix[:2, 2:]

    def is_bona_fide(self, tol=BONA_FIDE_TOL) -> bool:
        """V + (i/2) Omega >= 0."""
        return bool(np.linalg.eigvalsh(self.matrix + 0.5j * OMEGA).min() >= -tol)


def tmss_covariance(r: float) -> CovarianceMatrix2Mode:
    if r < 0:
        raise InvalidParameter("squeezing parameter must be >= 0")
    with mpmath.workdps(_DPS):
        c, s = mpmath.cosh(2 * mpmath.mpf(r)) / 2, mpmath.sinh(2 * mpmath.mpf(r)) / 2
        ex = mpmath.matrix([[c, 0, s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, -s, 0, c]])
    return CovarianceMatrix2Mode(np.array(ex.tolist(), dtype=float), exact=ex)


def apply_channel(cov: CovarianceMatrix2Mode, mode: int, g_x: float, g_y: float,
                  v_x: float, v_y: float) -> CovarianceMatrix2Mode:
    """Send one mode through a phase-insensitive-by-quadrature Gaussian channel."""
    if mode not in (1, 2):
        raise InvalidParameter("mode must be 1 or 2")
    if v_x < 0 or v_y < 0:
        raise InvalidParameter("channel noise must be >= 0")
    i = 2 * (mode - 1)
    with mpmath.workdps(_DPS):
        k = mpmath.eye(4)
        n = mpmath.zeros(4, 4)
        k[i, i], k[i + 1, i + 1] = mpmath.mpf(g_x), mpmath.mpf(g_y)
        n[i, i], n[i + 1, i + 1] = mpmath.mpf(v_x), mpmath.mpf(v_y)
        ex = k * cov.high_precision() * k.T + n
    return CovarianceMatrix2Mode(np.array(ex.tolist(), dtype=float), cov.m_squared, exact=ex)


def partial_transpose(cov: CovarianceMatrix2Mode) -> CovarianceMatrix2Mode:
    f = np.diag([1.0, 1.0, 1.0, -1.0])
    with mpmath.workdps(_DPS):
        fm = mpmath.diag([1, 1, 1, -1])
        ex = fm * cov.high_precision() * fm
    return CovarianceMatrix2Mode(f @ cov.matrix @ f, cov.m_squared, exact=ex)


def _nu_minus(cov: CovarianceMatrix2Mode, transposed: bool) -> float:
    with mpmath.workdps(_DPS):
        m = cov.high_precision()
        a, b, c = m[0:2, 0:2], m[2:4, 2:4], m[0:2, 2:4]
        sign = -1 if transposed else 1
        delta = mpmath.det(a) + mpmath.det(b) + sign * 2 * mpmath.det(c)
        det_v = mpmath.det(m)
        disc = delta ** 2 - 4 * det_v
        if disc < -BRANCH_TOL:
            raise NumericalBranch(f"negative discriminant {float(disc):.3e}; covariance matrix is not valid")
        if det_v <= 0:
            return 0.0
        # (delta - sqrt(disc))/2 rewritten to avoid cancellation
        den = delta + mpmath.sqrt(max(disc, 0))
        if den <= 0:
            raise NumericalBranch("negative symplectic invariant; covariance matrix is not valid")
        return float(mpmath.sqrt(2 * det_v / den))


def min_symplectic_eigenvalue(cov: CovarianceMatrix2Mode) -> float:
    """Smallest symplectic eigenvalue of the state itself; 1/2 for pure states."""
    return _nu_minus(cov, transposed=False)


def inseparability(cov: CovarianceMatrix2Mode) -> float:
    """I = 2 nu~_- / m^2; the state is entangled iff I < 1."""
    return 2 * _nu_minus(cov, transposed=True) / cov.m_squared


def entanglement_report(r: float, g: float, v: float) -> dict:
    """Send one half of a TMSS through a symmetric channel and compare I with W_T."""
    cov = apply_channel(tmss_covariance(r), 2, g, g, v, v)
    ins = inseparability(cov)
    w = transfer_witness(g, g, v, v).w_t
    return {"r": r, "channel": {"g": g, "v": v}, "I": ins, "W_T": w,
            "verdict": "entangled" if ins < 1 else "separable"}
