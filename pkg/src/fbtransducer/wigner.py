"""Wigner functions on a square grid, Gaussian-channel propagation, fidelity and negativity.

Quadratures follow a = (X + iY)/sqrt(2): vacuum has variance 1/2 per axis and
peak value 1/pi. Integrals use the trapezoid rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.ndimage import gaussian_filter, map_coordinates
from scipy.special import eval_laguerre

from .errors import GridMismatch, GridTooCoarse, InvalidParameter

DEFAULT_EXTENT = 8.0
# odd so that the origin is a sample point
DEFAULT_N = 513
NORM_TOL = 1e-4
MAX_FOCK = 20
MAX_CAT_ALPHA = 6.0
NEGATIVITY_FLOOR = 1e-6


@dataclass
class WignerGrid:
    extent_x: float
    extent_y: float
    nx: int
    ny: int
    values: np.ndarray   # shape (ny, nx); row index is Y
    convention: str = "sqrt2"

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.ny, self.nx):
            raise ValueError(f"values shape {self.values.shape} != ({self.ny}, {self.nx})")

    @property
    def x(self):
        return np.linspace(-self.extent_x, self.extent_x, self.nx)

    @property
    def y(self):
        return np.linspace(-self.extent_y, self.extent_y, self.ny)

    @property
    def dx(self):
        return 2 * self.extent_x / (self.nx - 1)

    @property
    def dy(self):
        return 2 * self.extent_y / (self.ny - 1)

    def mesh(self):
        return np.meshgrid(self.x, self.y)

    def integrate(self, f=None) -> float:
        v = self.values if f is None else f
        return float(trapezoid(trapezoid(v, self.x, axis=1), self.y))

    def same_grid(self, other: "WignerGrid") -> bool:
        return (self.nx, self.ny, self.convention) == (other.nx, other.ny, other.convention) \
            and math.isclose(self.extent_x, other.extent_x) and math.isclose(self.extent_y, other.extent_y)

    def with_values(self, values) -> "WignerGrid":
        return WignerGrid(self.extent_x, self.extent_y, self.nx, self.ny, values, self.convention)


def blank_grid(extent=DEFAULT_EXTENT, n=DEFAULT_N, extent_y=None, ny=None) -> WignerGrid:
    ey = extent if extent_y is None else extent_y
    ny = n if ny is None else ny
    return WignerGrid(extent, ey, n, ny, np.zeros((ny, n)))


def grid_for_noise(v_add: float, extent=DEFAULT_EXTENT, npts=DEFAULT_N):
    """(extent, npts) wide enough to hold a test state blurred by ``v_add``.

    The extent grows like sqrt(1 + v_add/2.5) and the spacing is kept, so a
    large added noise costs more samples rather than resolution.
    """
    e = extent * max(1.0, math.sqrt(1.0 + v_add / 2.5))
    n = int(math.ceil((npts - 1) * e / extent)) // 2 * 2 + 1
    return e, n


def _checked(g: WignerGrid, what: str) -> WignerGrid:
    norm = g.integrate()
    if abs(norm - 1.0) > NORM_TOL:
        raise GridTooCoarse(f"{what}: grid integral {norm:.6f} deviates from 1 by more than {NORM_TOL}")
    return g


def fock_values(n: int, x, y):
    r2 = np.asarray(x) ** 2 + np.asarray(y) ** 2
    return (-1) ** n / math.pi * np.exp(-r2) * eval_laguerre(n, 2 * r2)


def wigner_fock(n: int, extent=DEFAULT_EXTENT, npts=DEFAULT_N) -> WignerGrid:
    """Fock state |n>. Limited to n <= 20 where the Laguerre evaluation stays accurate."""
    if not (isinstance(n, (int, np.integer)) and 0 <= n <= MAX_FOCK):
        raise InvalidParameter(f"Fock number must be an integer in [0, {MAX_FOCK}]")
    g = blank_grid(extent, npts)
    X, Y = g.mesh()
    return _checked(g.with_values(fock_values(int(n), X, Y)), f"Fock |{n}>")


def cat_values(alpha: complex, parity: str, x, y):
    alpha = complex(alpha)
    sign = {"even": 1.0, "odd": -1.0}[parity]
    a2 = abs(alpha) ** 2
    # |alpha> +- |-alpha> has norm^2 2(1 +- e^{-2|alpha|^2})
    norm2 = 2.0 * (1.0 + math.exp(-2 * a2)) if sign > 0 else -2.0 * math.expm1(-2 * a2)
    if norm2 == 0.0:
        raise InvalidParameter("odd cat state undefined at alpha = 0")
    x0, y0 = math.sqrt(2) * alpha.real, math.sqrt(2) * alpha.imag
    lobes = np.exp(-(x - x0) ** 2 - (y - y0) ** 2) + np.exp(-(x + x0) ** 2 - (y + y0) ** 2)
    fringe = 2.0 * np.exp(-x ** 2 - y ** 2) * np.cos(2 * (x * y0 - y * x0))
    return (lobes + sign * fringe) / (math.pi * norm2)


def wigner_cat(alpha: complex, parity: str = "even", extent=DEFAULT_EXTENT, npts=DEFAULT_N) -> WignerGrid:
    """Cat state |alpha> +- |-alpha>; lobes sit at +-sqrt(2) alpha."""
    if abs(alpha) > MAX_CAT_ALPHA:
        raise InvalidParameter(f"|alpha| must be <= {MAX_CAT_ALPHA}")
    if parity not in ("even", "odd"):
        raise InvalidParameter("parity must be 'even' or 'odd'")
    g = blank_grid(extent, npts)
    X, Y = g.mesh()
    return _checked(g.with_values(cat_values(alpha, parity, X, Y)), f"{parity} cat")


def gaussian_state(var: float, extent=DEFAULT_EXTENT, npts=DEFAULT_N) -> WignerGrid:
    """Isotropic centred Gaussian with per-axis variance ``var`` (vacuum: 1/2)."""
    g = blank_grid(extent, npts)
    X, Y = g.mesh()
    return _checked(g.with_values(np.exp(-(X ** 2 + Y ** 2) / (2 * var)) / (2 * math.pi * var)),
                    "Gaussian")


def _resample(w: WignerGrid, gain: float, phase: float) -> np.ndarray:
    """W(R^-1 r / gain) / gain^2 sampled on the grid of ``w``."""
    X, Y = w.mesh()
    c, s = math.cos(phase), math.sin(phase)
    xs = (c * X + s * Y) / gain
    ys = (-s * X + c * Y) / gain
    ix = (xs + w.extent_x) / w.dx
    iy = (ys + w.extent_y) / w.dy
    out = map_coordinates(w.values, [iy, ix], order=3, mode="constant", cval=0.0)
    return out / gain ** 2


def propagate(w_in: WignerGrid, gain: float, v_add: float, phase: float = 0.0) -> WignerGrid:
    """Output state of a phase-insensitive Gaussian channel.

    The input is rotated by ``phase``, scaled by ``gain`` and blurred with an
    isotropic Gaussian of per-axis variance ``v_add``.
    """
    if gain < 0 or v_add < 0:
        raise InvalidParameter("gain and v_add must be non-negative")
    if gain == 0.0:
        if v_add == 0.0:
            raise GridTooCoarse("zero gain with zero added noise gives a delta distribution")
        return _gauss_on(w_in, v_add)
    if gain == 1.0 and phase == 0.0:
        scaled = w_in.values.copy()
    else:
        scaled = _resample(w_in, gain, phase)
    mass_in = w_in.integrate(scaled)
    if abs(mass_in - w_in.integrate()) > NORM_TOL:
        raise GridTooCoarse("rescaled state leaves the grid or is under-resolved")
    if v_add == 0.0:
        return w_in.with_values(scaled)
    sd = math.sqrt(v_add)
    blurred = gaussian_filter(scaled, sigma=(sd / w_in.dy, sd / w_in.dx), mode="constant",
                              cval=0.0, truncate=10.0)
    if abs(w_in.integrate(blurred) - mass_in) > NORM_TOL:
        raise GridTooCoarse("blurred state exceeds the grid extent")
    return w_in.with_values(blurred)


def _gauss_on(w: WignerGrid, var: float) -> WignerGrid:
    X, Y = w.mesh()
    return _checked(w.with_values(np.exp(-(X ** 2 + Y ** 2) / (2 * var)) / (2 * math.pi * var)),
                    "Gaussian")


def fidelity(w_in: WignerGrid, w_out: WignerGrid) -> float:
    """Overlap 2*pi * int W_in W_out; equals <psi|rho|psi> for a pure input."""
    if not w_in.same_grid(w_out):
        raise GridMismatch("fidelity needs both states on the same grid")
    return 2 * math.pi * w_in.integrate(w_in.values * w_out.values)


def negativity(w: WignerGrid) -> float:
    """Negative volume measure int |W| - 1, zero below quadrature noise.

    The grid integral of W stands in for the 1 so normalisation error cancels.
    """
    n = w.integrate(np.abs(w.values)) - w.integrate()
    return n if n > NEGATIVITY_FLOOR else 0.0
