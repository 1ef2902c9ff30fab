import numpy as np
import pytest

from deltawire.chanmath import TWO_PI
from deltawire.oracle import (
    OracleConfig,
    OracleNotConverged,
    fd_scatter,
    fd_scatter_extrapolated,
)
from deltawire.scattering import DeltaChain, double_delta_smatrix, unitarity_defect


def amplitude_distance(a, b):
    return max(np.abs(a.r - b.r).max(), np.abs(a.t - b.t).max(),
               np.abs(a.rp - b.rp).max(), np.abs(a.tp - b.tp).max())


def test_free_wire_is_transparent():
    cfg = OracleConfig(u=np.zeros((2, 2)), k1=0.9 * TWO_PI, k2=1.4 * TWO_PI)
    s = fd_scatter(cfg)
    np.testing.assert_allclose(s.t, np.eye(2), rtol=0, atol=1e-12)
    np.testing.assert_allclose(s.r, 0.0, rtol=0, atol=1e-12)


def test_weak_coupling_matches_analytic_at_default_width():
    chain = DeltaChain(u11=0.01 * TWO_PI, u22=0.01 * TWO_PI)
    cfg = OracleConfig(u=chain.coupling_matrix, k1=1.0 * TWO_PI, k2=1.3 * TWO_PI)
    numeric = fd_scatter(cfg)
    analytic = double_delta_smatrix(chain, cfg.k1, cfg.k2)
    assert amplitude_distance(numeric, analytic) < 1e-6
    assert unitarity_defect(numeric) < 1e-6


def test_real_mixing_matches_analytic():
    # finite-width error is first order in sigma; the sigma -> 0 extrapolation
    # removes it and lands far below the regularized solver's raw accuracy
    chain = DeltaChain(u11=0.8, u22=1.7, u12=0.3 * TWO_PI)
    cfg = OracleConfig(u=chain.coupling_matrix, k1=0.9 * TWO_PI, k2=1.6 * TWO_PI,
                       sigma=1e-5)
    numeric = fd_scatter_extrapolated(cfg)
    analytic = double_delta_smatrix(chain, cfg.k1, cfg.k2)
    assert amplitude_distance(numeric, analytic) < 1e-7


def test_complex_mixing_matches_analytic_and_breaks_time_reversal():
    chain = DeltaChain(u11=1.2, u22=0.6, u12=0.25 * TWO_PI * np.exp(0.9j))
    cfg = OracleConfig(u=chain.coupling_matrix, k1=1.2 * TWO_PI, k2=0.8 * TWO_PI,
                       sigma=1e-5)
    numeric = fd_scatter_extrapolated(cfg)
    analytic = double_delta_smatrix(chain, cfg.k1, cfg.k2)
    assert amplitude_distance(numeric, analytic) < 1e-7
    # mirror symmetry survives a complex coupling ...
    assert np.abs(numeric.r - numeric.rp).max() < 1e-6
    assert np.abs(numeric.t - numeric.tp).max() < 1e-6
    # ... but transmission reciprocity does not
    assert np.abs(numeric.tp - numeric.t.T).max() > 1e-3


def test_unconverged_grid_raises():
    cfg = OracleConfig(u=np.diag([30.0, 30.0]), k1=0.3 * TWO_PI, k2=2.9 * TWO_PI,
                       sigma=0.1, grid_spacing=0.01)
    with pytest.raises(OracleNotConverged):
        fd_scatter(cfg)
    # without the halved-grid verification the same run goes through
    s = fd_scatter(cfg, verify_convergence=False)
    assert np.isfinite(s.t).all()


def test_config_validation():
    u = np.eye(2)
    with pytest.raises(ValueError, match="[Hh]ermitian"):
        OracleConfig(u=np.array([[1.0, 0.5], [0.1, 1.0]]), k1=TWO_PI, k2=TWO_PI)
    with pytest.raises(ValueError):
        OracleConfig(u=u, k1=-1.0, k2=TWO_PI)
    with pytest.raises(ValueError):  # barrier wider than the spacing allows
        OracleConfig(u=u, k1=TWO_PI, k2=TWO_PI, sigma=0.5)
    with pytest.raises(ValueError):  # step too coarse for the barrier profile
        OracleConfig(u=u, k1=TWO_PI, k2=TWO_PI, sigma=1e-3, grid_spacing=1e-3)
    with pytest.raises(ValueError):  # leads must clear the barriers
        OracleConfig(u=u, k1=TWO_PI, k2=TWO_PI, half_length=0.6)
