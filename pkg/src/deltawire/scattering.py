"""Scattering matrices for delta barriers in a two-channel wire.

Conventions used throughout:

* Amplitudes are flux normalized: the amplitude carried by channel n is
  scaled by sqrt(k_n), so |r|^2 and |t|^2 sum to 1 channel by channel for a
  unitary scatterer.
* A scatterer is stored as the four 2x2 blocks (r, t, r', t') of

      S = [[r, t'], [t, r']]

  acting on (incoming-from-left, incoming-from-right) amplitude pairs, all
  referenced to the plane x = 0 in both leads.
* Moving a scatterer to x0 re-phases the blocks: the left-reflection entry
  r_nm picks up exp(+i (k_n + k_m) x0) (the reflected wave travels an extra
  2*x0 before returning to the reference plane), the right-reflection entry
  picks up exp(-i (k_n + k_m) x0), and transmission entries pick up
  exp(i (k_m - k_n) x0), which leaves same-channel transmission untouched.
  With the two barriers placed at -d/2 and +d/2 this convention makes the
  closed-form cavity amplitudes below hold exactly, phase included.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .chanmath import frob_sq, mat2_det, mat2_inv

EYE2 = np.eye(2, dtype=complex)

# |1 - r^2 e^{2ikd}| below this is treated as a genuine pole of the cavity
# denominator rather than roundoff.
RESONANT_DENOMINATOR_TOL = 1e-14

HERMITIAN_RTOL = 1e-12


class AmplitudePair(NamedTuple):
    """Single-channel reflection and transmission amplitudes."""

    r: complex
    t: complex


@dataclass(frozen=True)
class DeltaChain:
    """Two delta barriers with identical coupling, placed at -d/2 and +d/2.

    Couplings are in internal units (d = 1); u12 may be complex, in which
    case the coupling matrix is the Hermitian [[u11, u12], [conj(u12), u22]].
    """

    u11: float
    u22: float
    u12: complex = 0.0
    d: float = 1.0

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError("barrier spacing must be positive")

    @property
    def coupling_matrix(self):
        return np.array(
            [[self.u11, self.u12], [np.conjugate(self.u12), self.u22]],
            dtype=complex,
        )

    @property
    def is_mixing(self):
        return self.u12 != 0


@dataclass(frozen=True)
class ScattererS:
    """Flux-normalized scattering matrix of a two-channel scatterer.

    Blocks are 2x2 complex arrays; (k1, k2) are the longitudinal wavenumbers
    the scatterer was built for, kept so composition can refuse mismatched
    operands.
    """

    r: np.ndarray
    t: np.ndarray
    rp: np.ndarray
    tp: np.ndarray
    k1: float
    k2: float

    def as_block_matrix(self):
        """Assemble the full 4x4 S over (in left ch1, ch2, in right ch1, ch2)."""
        top = np.hstack([self.r, self.tp])
        bottom = np.hstack([self.t, self.rp])
        return np.vstack([top, bottom])


def delta_amplitudes(u, k):
    """Reflection and transmission of a single delta of strength u in one channel.

    Parameters
    ----------
    u : float or array
        Real barrier (u > 0) or well (u < 0) strength, internal units.
    k : float or array
        Longitudinal wavenumber, must be positive (open channel).

    Returns
    -------
    AmplitudePair
        r = (u/2ik) / (1 - u/2ik) and t = 1 / (1 - u/2ik); these satisfy
        r = t - 1 and, for real u, |r|^2 + |t|^2 = 1.
    """
    k = np.asarray(k, dtype=float) if np.ndim(k) else k
    if np.any(np.asarray(k) <= 0):
        raise ValueError("longitudinal wavenumber must be positive")
    z = u / (2j * k)
    t = 1.0 / (1.0 - z)
    r = z * t
    return AmplitudePair(r, t)


def delta_smatrix(u, k1, k2, x0=0.0):
    """Scattering matrix of one matrix-coupling delta barrier at position x0.

    Parameters
    ----------
    u : (2, 2) array_like
        Hermitian coupling matrix in internal units.
    k1, k2 : float
        Positive longitudinal wavenumbers of the two channels.
    x0 : float
        Barrier position; the returned blocks stay referenced to x = 0.

    Returns
    -------
    ScattererS
        With K = diag(k1, k2) the flux-normalized transmission at the barrier
        plane is t = [1 + (i/2) K^{-1/2} u K^{-1/2}]^{-1} and r = t - 1; the
        inverse exists for every Hermitian u because 1 + iA has |det| >= 1
        when A is Hermitian.  For u12 = 0 the blocks are diagonal and reduce
        to delta_amplitudes channel by channel.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError("coupling matrix must be 2x2")
    if frob_sq(u - u.conj().T) > HERMITIAN_RTOL**2 * (1.0 + frob_sq(u)):
        raise ValueError("coupling matrix must be Hermitian")
    if k1 <= 0 or k2 <= 0:
        raise ValueError("longitudinal wavenumbers must be positive")

    inv_sqrt_k = np.diag([k1**-0.5, k2**-0.5]).astype(complex)
    a = 0.5 * (inv_sqrt_k @ u @ inv_sqrt_k)
    t0 = mat2_inv(EYE2 + 1j * a)
    r0 = t0 - EYE2

    # A delta at the origin scatters identically from both sides (the
    # potential is even in x), so r' = r and t' = t before re-phasing.
    phase = np.exp(1j * np.array([k1, k2]) * x0)
    e = np.diag(phase)
    e_inv = np.diag(1.0 / phase)
    return ScattererS(
        r=e @ r0 @ e,
        t=e_inv @ t0 @ e,
        rp=e_inv @ r0 @ e_inv,
        tp=e @ t0 @ e_inv,
        k1=float(k1),
        k2=float(k2),
    )


def free_segment(length, k1, k2):
    """Ballistic stretch of the wire: pure per-channel phase accumulation."""
    if length < 0:
        raise ValueError("segment length must be non-negative")
    if k1 <= 0 or k2 <= 0:
        raise ValueError("longitudinal wavenumbers must be positive")
    t = np.diag(np.exp(1j * np.array([k1, k2]) * length))
    zero = np.zeros((2, 2), dtype=complex)
    return ScattererS(r=zero, t=t, rp=zero.copy(), tp=t.copy(), k1=float(k1), k2=float(k2))


def compose(a, b, *more):
    """Combine scatterers left to right into one effective scatterer.

    Uses the standard composition that sums the multiple-bounce geometric
    series between the two sub-scatterers:

        r  = r_a + t'_a r_b (1 - r'_a r_b)^{-1} t_a
        t  = t_b (1 - r'_a r_b)^{-1} t_a
        r' = r'_b + t_b r'_a (1 - r_b r'_a)^{-1} t'_b
        t' = t'_a (1 - r_b r'_a)^{-1} t'_b

    Raises SingularMatrixError when the bounce series does not converge
    numerically (|det(1 - r'_a r_b)| below the singularity guard), and
    ValueError when the operands were built for different wavenumbers.
    """
    if more:
        out = compose(a, b)
        for s in more:
            out = compose(out, s)
        return out
    if not (np.isclose(a.k1, b.k1, rtol=1e-12, atol=0.0)
            and np.isclose(a.k2, b.k2, rtol=1e-12, atol=0.0)):
        raise ValueError(
            f"cannot compose scatterers built for different wavenumbers: "
            f"({a.k1:.12g}, {a.k2:.12g}) vs ({b.k1:.12g}, {b.k2:.12g})"
        )
    bounce_lr = mat2_inv(EYE2 - a.rp @ b.r)
    bounce_rl = mat2_inv(EYE2 - b.r @ a.rp)
    return ScattererS(
        r=a.r + a.tp @ b.r @ bounce_lr @ a.t,
        t=b.t @ bounce_lr @ a.t,
        rp=b.rp + b.t @ a.rp @ bounce_rl @ b.tp,
        tp=a.tp @ bounce_rl @ b.tp,
        k1=a.k1,
        k2=a.k2,
    )


def double_delta_closed_form(u, k, d=1.0):
    """Single-channel amplitudes of two identical deltas separated by d.

    Closed form of the bounce series for one uncoupled channel:

        D    = 1 - r^2 e^{2ikd}
        r_dd = r e^{-ikd} (1 + t^2 e^{2ikd} / D)
        t_dd = t^2 / D

    with (r, t) the single-delta amplitudes at wavenumber k.  Accepts arrays
    for u and k (broadcast together).  Raises ValueError on a numerically
    resonant denominator |D| < 1e-14.
    """
    r, t = delta_amplitudes(u, k)
    phase = np.exp(2j * np.asarray(k, dtype=float) * d) if np.ndim(k) else np.exp(2j * k * d)
    denom = 1.0 - r * r * phase
    if np.any(np.abs(denom) < RESONANT_DENOMINATOR_TOL):
        raise ValueError("cavity denominator is numerically singular")
    t_dd = t * t / denom
    r_dd = r * np.exp(-1j * np.asarray(k, dtype=float) * d if np.ndim(k) else -1j * k * d) * (
        1.0 + t * t * phase / denom
    )
    return AmplitudePair(r_dd, t_dd)


def double_delta_smatrix(chain, k1, k2):
    """Full two-channel scattering matrix of a DeltaChain.

    Composes the barrier at -d/2 with the barrier at +d/2; for u12 = 0 the
    diagonal entries match double_delta_closed_form exactly, phase included.
    """
    u = chain.coupling_matrix
    left = delta_smatrix(u, k1, k2, x0=-0.5 * chain.d)
    right = delta_smatrix(u, k1, k2, x0=+0.5 * chain.d)
    return compose(left, right)


def unitarity_defect(s):
    """Frobenius norm of S^dagger S - 1 for the assembled 4x4 scattering matrix."""
    m = s.as_block_matrix()
    return float(np.linalg.norm(m.conj().T @ m - np.eye(4)))
