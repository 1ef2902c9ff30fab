"""Small fixed-size complex linear algebra and two-channel wire kinematics.

Everything downstream works with 2x2 complex blocks (reflection and
transmission sub-matrices of a two-channel scatterer), so the helpers here
stay specialized to that size and use explicit cofactor formulas instead of
general-purpose solvers.

Unit convention: lengths are measured in units of the barrier spacing d
(d = 1 internally).  User-facing wavenumbers and coupling strengths are
quoted in units of 2*pi/d and converted on input, k_internal = 2*pi * k_user.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# Pauli y, used to build spin-singlet style antisymmetric combinations.
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])

# A 2x2 matrix counts as numerically singular when |det| falls below this
# fraction of the squared Frobenius norm.
SINGULAR_RTOL = 1e-14


class SingularMatrixError(ValueError):
    """Raised when a 2x2 inverse is requested for a numerically singular matrix."""


def from_cycles(x):
    """Convert a wavenumber or coupling from 2*pi/d units (phase cycles per
    barrier spacing) to internal inverse lengths."""
    return TWO_PI * np.asarray(x) if np.ndim(x) else TWO_PI * x


def to_cycles(x):
    """Convert an internal wavenumber or coupling back to 2*pi/d units."""
    return np.asarray(x) / TWO_PI if np.ndim(x) else x / TWO_PI


def mat2(a, b, c, d):
    """Assemble a 2x2 complex matrix from row-major entries."""
    return np.array([[a, b], [c, d]], dtype=complex)


def mat2_det(m):
    """Determinant of a 2x2 matrix."""
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def mat2_mul(a, b):
    """Product of two 2x2 matrices."""
    return a @ b


def frob_sq(m):
    """Squared Frobenius norm, sum of |entries|^2."""
    return float(np.sum(np.abs(m) ** 2))


def mat2_inv(m):
    """Invert a 2x2 matrix by the cofactor formula.

    Raises SingularMatrixError when |det| < SINGULAR_RTOL * frob_sq(m); the
    relative guard keeps the test meaningful for badly scaled blocks.
    """
    det = mat2_det(m)
    scale = frob_sq(m)
    if abs(det) < SINGULAR_RTOL * scale or scale == 0.0:
        raise SingularMatrixError(
            f"2x2 matrix is numerically singular: |det|={abs(det):.3e}, "
            f"frob_sq={scale:.3e}"
        )
    return np.array(
        [[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=complex
    ) / det


def transverse_wavenumber(n, w):
    """Transverse wavenumber n*pi/w of mode n in a hard-wall wire of width w."""
    if n < 1:
        raise ValueError("transverse mode index starts at 1")
    if w <= 0:
        raise ValueError("wire width must be positive")
    return n * np.pi / w


def longitudinal_k(k_total, n, w):
    """Longitudinal wavenumber of channel n at total wavenumber k_total.

    The channel is open when k_total exceeds the transverse threshold n*pi/w;
    a closed channel raises ValueError rather than returning an evanescent
    (imaginary) value.
    """
    kt = transverse_wavenumber(n, w)
    if k_total <= kt:
        raise ValueError(
            f"channel {n} is closed: k_total={k_total:.6g} <= n*pi/w={kt:.6g}"
        )
    return float(np.sqrt(k_total**2 - kt**2))


@dataclass(frozen=True)
class ChannelSetup:
    """Wire geometry with exactly two propagating channels.

    w is the transverse width; the barrier spacing d is the unit of length.
    """

    w: float
    d: float = 1.0

    def __post_init__(self):
        if self.w <= 0:
            raise ValueError("wire width must be positive")
        if self.d != 1.0:
            raise ValueError("barrier spacing is fixed to 1 (it sets the length unit)")

    def open_channels(self, k_total):
        """Number of propagating channels at total wavenumber k_total."""
        return int(np.floor(k_total * self.w / np.pi)) if k_total > 0 else 0

    def longitudinal(self, k_total, n):
        """Longitudinal wavenumber of channel n, requiring the channel open."""
        return longitudinal_k(k_total, n, self.w)

    def require_two_open(self, k_total):
        """Validate that exactly the first two channels propagate."""
        n_open = self.open_channels(k_total)
        if n_open < 2:
            raise ValueError(f"only {n_open} channel(s) open at k_total={k_total:.6g}")
        return n_open
