"""Entanglement of the two-electron state leaving a two-channel scatterer.

The incident pair is the channel-singlet (1,2) combination injected from the
left.  After scattering, post-selecting coincidence events with exactly one
electron on each side leaves a two-qubit state whose channel indices carry
the entanglement.  Mode ordering for all 4x4 objects is (L1, L2, R1, R2):
left-moving channel 1 and 2, then right-moving channel 1 and 2.

Routes to the concurrence implemented here:

* a closed form in the four same-channel amplitudes, valid without channel
  mixing,
* 2 |det g| / Tr(g g^dagger) from the coincidence amplitude matrix g,
* the epsilon-tensor contraction of the antisymmetric pair matrix W.

All three agree to near machine precision and the cross-checks are part of
the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chanmath import SIGMA_Y, mat2_det
from .scattering import ScattererS

MODE_BASIS = ("L1", "L2", "R1", "R2")

# Post-selected quantities are reported as undefined below this coincidence
# probability.
P_SELECT_TOL = 1e-300

W_NORMALIZATION_TOL = 1e-10
MIXING_TOL = 1e-12


@dataclass(frozen=True)
class GammaState:
    """Amplitude matrix of the coincidence (one electron per side) outcome.

    gamma[i, j] is the amplitude for the left-mover to occupy channel i+1
    and the right-mover channel j+1; norm is Tr(gamma gamma^dagger), the
    post-selection probability.
    """

    gamma: np.ndarray
    norm: float


def gamma_of(r, t):
    """Coincidence amplitude matrix from the left-incidence blocks r and t.

    Antisymmetrizing the scattered pair over the two electrons gives

        g = [[r12 t11 - r11 t12,  r12 t21 - r11 t22],
             [r22 t11 - r21 t12,  r22 t21 - r21 t22]]

    which equals -i r sigma_y t^T; the global phase drops out of every
    observable.  For diagonal r and t only the anti-diagonal survives:
    g = [[0, -r11 t22], [r22 t11, 0]].
    """
    g = np.array(
        [
            [r[0, 1] * t[0, 0] - r[0, 0] * t[0, 1],
             r[0, 1] * t[1, 0] - r[0, 0] * t[1, 1]],
            [r[1, 1] * t[0, 0] - r[1, 0] * t[0, 1],
             r[1, 1] * t[1, 0] - r[1, 0] * t[1, 1]],
        ],
        dtype=complex,
    )
    return GammaState(gamma=g, norm=float(np.sum(np.abs(g) ** 2)))


def postselect_probability(state):
    """Probability of catching one electron on each side."""
    return state.norm


def probability_budget(s):
    """Coincidence, both-left and both-right probabilities of the scattered pair.

    Returns (p_coincidence, p_both_left, p_both_right); the three sum to 1
    for a unitary scatterer.  The same-side amplitudes are the Pfaffian-like
    entries [r sigma_y r^T]_{12} = -i det r and [t sigma_y t^T]_{12}.
    """
    g = gamma_of(s.r, s.t)
    both_left = (s.r @ SIGMA_Y @ s.r.T)[0, 1]
    both_right = (s.t @ SIGMA_Y @ s.t.T)[0, 1]
    return g.norm, float(abs(both_left) ** 2), float(abs(both_right) ** 2)


def concurrence_closed(r11, r22, t11, t22):
    """Concurrence of the coincidence pair from same-channel amplitudes only.

    eta = 2 |r22 t11| |r11 t22| / (|r22 t11|^2 + |r11 t22|^2), valid when the
    scatterer does not mix channels.  Returns 0 when both products vanish
    (no coincidence events at all).  Accepts arrays.
    """
    a = np.abs(r22) * np.abs(t11)
    b = np.abs(r11) * np.abs(t22)
    denom = a * a + b * b
    num = 2.0 * a * b
    if np.ndim(denom):
        return np.where(denom > 0.0, num / np.where(denom > 0.0, denom, 1.0), 0.0)
    return float(num / denom) if denom > 0.0 else 0.0


def concurrence_det(state):
    """Concurrence 2 |det g| / Tr(g g^dagger), the mixing-safe route."""
    if state.norm <= P_SELECT_TOL:
        raise ValueError("no post-selected state: coincidence probability is zero")
    return float(2.0 * abs(mat2_det(state.gamma)) / state.norm)


def w_postselected(state):
    """Antisymmetric pair matrix of the post-selected coincidence state.

    W = [[0, g], [-g^T, 0]] / (2 sqrt(N)) over (L1, L2, R1, R2), normalized
    so Tr(W W^dagger) = 1/2.
    """
    if state.norm <= P_SELECT_TOL:
        raise ValueError("no post-selected state: coincidence probability is zero")
    g = state.gamma / (2.0 * np.sqrt(state.norm))
    w = np.zeros((4, 4), dtype=complex)
    w[:2, 2:] = g
    w[2:, :2] = -g.T
    return w


def w_full(s):
    """Antisymmetric pair matrix of the complete scattered two-electron state.

    Includes the both-left and both-right sectors alongside the coincidence
    block, so no post-selection is applied.  Normalized to Tr(W W^dagger)
    = 1/2.
    """
    pair_lr = s.r @ SIGMA_Y @ s.t.T
    both_left = (s.r @ SIGMA_Y @ s.r.T)[0, 1]
    both_right = (s.t @ SIGMA_Y @ s.t.T)[0, 1]
    w = np.zeros((4, 4), dtype=complex)
    w[:2, 2:] = pair_lr
    w[2:, :2] = -pair_lr.T
    w[0, 1], w[1, 0] = both_left, -both_left
    w[2, 3], w[3, 2] = both_right, -both_right
    w *= 0.5
    total = float(np.sum(np.abs(w) ** 2))
    if total <= P_SELECT_TOL:
        raise ValueError("scattered state has zero norm")
    return w / np.sqrt(2.0 * total)


def concurrence_from_w(w):
    """Concurrence 8 |W12 W34 + W13 W42 + W14 W23| of an antisymmetric pair matrix.

    Validates antisymmetry and the Tr(W W^dagger) = 1/2 normalization before
    evaluating the epsilon-tensor contraction.
    """
    w = np.asarray(w, dtype=complex)
    if np.abs(w + w.T).max() > W_NORMALIZATION_TOL:
        raise ValueError("pair matrix must be antisymmetric")
    if abs(np.sum(np.abs(w) ** 2) - 0.5) > W_NORMALIZATION_TOL:
        raise ValueError("pair matrix must be normalized to Tr(W W^dagger) = 1/2")
    contraction = (
        w[0, 1] * w[2, 3] + w[0, 2] * w[3, 1] + w[0, 3] * w[1, 2]
    )
    return float(8.0 * abs(contraction))


def reduced_density(w):
    """One-electron reduced density matrix 2 W W^dagger of the coincidence state.

    Requires a post-selected pair matrix (same-side blocks zero).  Returns
    (rho, purity); rho is 4x4 over (L1, L2, R1, R2) with unit trace, and
    purity = Tr(rho^2) relates to the concurrence as (2 - eta^2) / 4.
    """
    w = np.asarray(w, dtype=complex)
    if max(np.abs(w[:2, :2]).max(), np.abs(w[2:, 2:]).max()) > W_NORMALIZATION_TOL:
        raise ValueError("pair matrix has same-side occupation: not post-selected")
    rho = 2.0 * (w @ w.conj().T)
    purity = float(np.real(np.trace(rho @ rho)))
    return rho, purity


@dataclass(frozen=True)
class EntanglementReport:
    """Every entanglement figure of merit for one scatterer at one energy.

    eta_closed is None when the scatterer mixes channels (the closed form
    needs diagonal blocks); all post-selected fields are None when the
    coincidence probability vanishes.
    """

    p_select: float
    p_both_left: float
    p_both_right: float
    eta_closed: Optional[float]
    eta_det: Optional[float]
    eta_w: Optional[float]
    purity: Optional[float]
    rho1: Optional[np.ndarray]
    full_state_eta: float

    @property
    def defined(self):
        return self.eta_det is not None


def entanglement_report(s):
    """Assemble the full EntanglementReport for a two-channel scatterer."""
    state = gamma_of(s.r, s.t)
    p_co, p_ll, p_rr = probability_budget(s)
    full_eta = concurrence_from_w(w_full(s))

    off_scale = max(np.abs(s.r[0, 1]), np.abs(s.r[1, 0]),
                    np.abs(s.t[0, 1]), np.abs(s.t[1, 0]))
    no_mixing = off_scale <= MIXING_TOL

    if state.norm <= P_SELECT_TOL:
        return EntanglementReport(
            p_select=state.norm, p_both_left=p_ll, p_both_right=p_rr,
            eta_closed=None, eta_det=None, eta_w=None,
            purity=None, rho1=None, full_state_eta=full_eta,
        )

    w = w_postselected(state)
    rho, purity = reduced_density(w)
    eta_closed = (
        concurrence_closed(s.r[0, 0], s.r[1, 1], s.t[0, 0], s.t[1, 1])
        if no_mixing else None
    )
    return EntanglementReport(
        p_select=state.norm, p_both_left=p_ll, p_both_right=p_rr,
        eta_closed=eta_closed,
        eta_det=concurrence_det(state),
        eta_w=concurrence_from_w(w),
        purity=purity,
        rho1=rho,
        full_state_eta=full_eta,
    )
