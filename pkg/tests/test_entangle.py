import numpy as np
import pytest

from deltawire.chanmath import TWO_PI
from deltawire.entangle import (
    concurrence_closed,
    concurrence_det,
    concurrence_from_w,
    entanglement_report,
    gamma_of,
    postselect_probability,
    probability_budget,
    reduced_density,
    w_full,
    w_postselected,
)
from deltawire.scattering import DeltaChain, double_delta_smatrix

from test_scattering import random_chain, random_ks


def test_gamma_diagonal_structure():
    # diagonal blocks leave only the exchange anti-diagonal
    r = np.diag([0.3 + 0.1j, 0.5 - 0.2j])
    t = np.diag([0.8j, 0.6])
    state = gamma_of(r, t)
    assert state.gamma[0, 0] == 0
    assert state.gamma[1, 1] == 0
    assert state.gamma[0, 1] == pytest.approx(-r[0, 0] * t[1, 1])
    assert state.gamma[1, 0] == pytest.approx(r[1, 1] * t[0, 0])
    assert postselect_probability(state) == pytest.approx(
        abs(r[0, 0] * t[1, 1]) ** 2 + abs(r[1, 1] * t[0, 0]) ** 2)


def test_gamma_is_pauli_y_sandwich():
    # the explicit entries equal -i r sigma_y t^T up to nothing at all
    rng = np.random.default_rng(3)
    sy = np.array([[0, -1j], [1j, 0]])
    for _ in range(20):
        r = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        t = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        np.testing.assert_allclose(
            gamma_of(r, t).gamma, -1j * r @ sy @ t.T, rtol=0, atol=1e-14)


def test_concurrence_amplitude_ratio():
    # |r22 t11| = 2 |r11 t22| gives eta = 2*2/(4+1) * 2 ... = 4/5 exactly
    r = np.diag([0.2, 0.4])
    t = np.diag([0.5, 0.5])
    assert concurrence_closed(r[0, 0], r[1, 1], t[0, 0], t[1, 1]) == pytest.approx(0.8)
    assert concurrence_det(gamma_of(r, t)) == pytest.approx(0.8, abs=1e-15)


def test_concurrence_closed_handles_no_coincidence():
    assert concurrence_closed(0.0, 0.0, 1.0, 1.0) == 0.0
    etas = concurrence_closed(
        np.array([0.0, 0.3]), np.array([0.0, 0.3]), np.ones(2), np.ones(2))
    np.testing.assert_allclose(etas, [0.0, 1.0])


def test_concurrence_det_requires_state():
    with pytest.raises(ValueError, match="post-select"):
        concurrence_det(gamma_of(np.zeros((2, 2)), np.eye(2)))


def test_symmetric_point_is_maximally_entangled():
    chain = DeltaChain(u11=0.01 * TWO_PI, u22=0.01 * TWO_PI)
    s = double_delta_smatrix(chain, TWO_PI, TWO_PI)
    state = gamma_of(s.r, s.t)
    assert concurrence_det(state) == pytest.approx(1.0, abs=1e-12)
    # coincidence probability at the symmetric point is 2 R^2 T^2
    t_sq = abs(s.t[0, 0]) ** 2
    assert state.norm == pytest.approx(2.0 * (1.0 - t_sq) * t_sq, abs=1e-14)


def test_route_equivalence_no_mixing():
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(200):
        s = double_delta_smatrix(random_chain(rng, mixing=False), *random_ks(rng))
        state = gamma_of(s.r, s.t)
        if state.norm < 1e-30:
            continue
        e1 = concurrence_closed(s.r[0, 0], s.r[1, 1], s.t[0, 0], s.t[1, 1])
        e2 = concurrence_det(state)
        e3 = concurrence_from_w(w_postselected(state))
        worst = max(worst, abs(e1 - e2), abs(e2 - e3))
    assert worst < 1e-12


def test_route_equivalence_with_mixing():
    rng = np.random.default_rng(19)
    worst = 0.0
    for _ in range(200):
        s = double_delta_smatrix(random_chain(rng, mixing=True), *random_ks(rng))
        state = gamma_of(s.r, s.t)
        if state.norm < 1e-30:
            continue
        worst = max(worst, abs(
            concurrence_det(state) - concurrence_from_w(w_postselected(state))))
    assert worst < 1e-12


def test_probability_budget_sums_to_one():
    rng = np.random.default_rng(29)
    worst = 0.0
    for _ in range(200):
        s = double_delta_smatrix(random_chain(rng, mixing=True), *random_ks(rng))
        p_co, p_ll, p_rr = probability_budget(s)
        worst = max(worst, abs(p_co + p_ll + p_rr - 1.0))
        # same-side amplitudes are determinants of the blocks
        assert p_ll == pytest.approx(abs(np.linalg.det(s.r)) ** 2, abs=1e-13)
        assert p_rr == pytest.approx(abs(np.linalg.det(s.t)) ** 2, abs=1e-13)
    assert worst < 1e-12


def test_pair_matrix_normalization_and_antisymmetry():
    s = double_delta_smatrix(DeltaChain(1.0, 2.0, 0.4 + 0.3j), 0.9 * TWO_PI, 1.7 * TWO_PI)
    for w in (w_postselected(gamma_of(s.r, s.t)), w_full(s)):
        assert np.abs(w + w.T).max() < 1e-14
        assert np.sum(np.abs(w) ** 2) == pytest.approx(0.5, abs=1e-14)


def test_concurrence_from_w_validates_input():
    with pytest.raises(ValueError, match="antisymmetric"):
        concurrence_from_w(np.eye(4, dtype=complex))
    w = np.zeros((4, 4), dtype=complex)
    w[0, 2], w[2, 0] = 1.0, -1.0  # antisymmetric but wrongly normalized
    with pytest.raises(ValueError, match="normalized"):
        concurrence_from_w(w)


def test_full_state_concurrence_vanishes():
    # the complete scattered state of two distinguishable-path electrons stays
    # separable in the pair-matrix sense: post-selection is what entangles
    rng = np.random.default_rng(37)
    worst = 0.0
    for _ in range(200):
        s = double_delta_smatrix(random_chain(rng, mixing=True), *random_ks(rng))
        worst = max(worst, concurrence_from_w(w_full(s)))
    assert worst < 1e-12


def test_reduced_density_properties():
    rng = np.random.default_rng(43)
    for _ in range(50):
        s = double_delta_smatrix(random_chain(rng, mixing=True), *random_ks(rng))
        state = gamma_of(s.r, s.t)
        if state.norm < 1e-30:
            continue
        eta = concurrence_det(state)
        rho, purity = reduced_density(w_postselected(state))
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-13)
        assert np.abs(rho - rho.conj().T).max() < 1e-14
        assert np.linalg.eigvalsh(rho).min() > -1e-13
        assert purity == pytest.approx((2.0 - eta**2) / 4.0, abs=1e-12)


def test_reduced_density_spectrum_is_doubly_degenerate():
    s = double_delta_smatrix(DeltaChain(0.8, 1.7, 0.3 * TWO_PI), 0.9 * TWO_PI, 1.6 * TWO_PI)
    state = gamma_of(s.r, s.t)
    eta = concurrence_det(state)
    rho, _ = reduced_density(w_postselected(state))
    lam = np.sort(np.linalg.eigvalsh(rho))
    lo = (1.0 - np.sqrt(1.0 - eta**2)) / 4.0
    hi = (1.0 + np.sqrt(1.0 - eta**2)) / 4.0
    np.testing.assert_allclose(lam, [lo, lo, hi, hi], rtol=0, atol=1e-12)


def test_reduced_density_rejects_same_side_occupation():
    s = double_delta_smatrix(DeltaChain(1.0, 2.0, 0.4), 0.9 * TWO_PI, 1.7 * TWO_PI)
    with pytest.raises(ValueError, match="post-select"):
        reduced_density(w_full(s))


def test_channel1_resonance_pins_the_modes():
    # channel 1 exactly on a cavity resonance: the reflected electron must be
    # in channel 2 and the transmitted one in channel 1
    k1_res = 0.25314316702383  # first resonance of u = 0.01 (2*pi/d units)
    chain = DeltaChain(u11=0.01 * TWO_PI, u22=0.01 * TWO_PI)
    s = double_delta_smatrix(chain, k1_res * TWO_PI, 0.9 * TWO_PI)
    state = gamma_of(s.r, s.t)
    assert concurrence_det(state) < 1e-9
    rho, _ = reduced_density(w_postselected(state))
    np.testing.assert_allclose(rho, np.diag([0.0, 0.5, 0.5, 0.0]), rtol=0, atol=1e-9)


def test_entanglement_report_consistency():
    s = double_delta_smatrix(DeltaChain(1.2, 0.6, 0.25 * TWO_PI * np.exp(0.9j)),
                             1.2 * TWO_PI, 0.8 * TWO_PI)
    rep = entanglement_report(s)
    assert rep.defined
    assert rep.eta_closed is None  # closed route needs a non-mixing scatterer
    assert rep.eta_det == pytest.approx(rep.eta_w, abs=1e-13)
    assert rep.p_select + rep.p_both_left + rep.p_both_right == pytest.approx(1.0, abs=1e-13)
    assert rep.purity == pytest.approx((2.0 - rep.eta_det**2) / 4.0, abs=1e-12)
    assert rep.full_state_eta < 1e-13

    s0 = double_delta_smatrix(DeltaChain(0.0, 0.0), TWO_PI, 1.5 * TWO_PI)
    rep0 = entanglement_report(s0)
    assert not rep0.defined
    assert rep0.eta_det is None
    assert rep0.p_select == 0.0
    assert rep0.p_both_right == pytest.approx(1.0, abs=1e-14)
