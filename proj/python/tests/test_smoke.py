import math

import numpy as np
import pytest

import besovtest as bt


@pytest.fixture(scope="module")
def db8():
    return bt.Wavelet(8)


def test_constants(db8):
    c = db8.constants()
    assert abs(c["f_psi_inf"] - 0.02) <= 0.005
    assert abs(c["f_psi_sup"] - 0.08) <= 0.005
    assert db8.support == 15
    assert math.isclose(db8.lowpass.sum(), math.sqrt(2.0), rel_tol=1e-12)


def test_haar_refused():
    haar = bt.Wavelet(1)
    assert not haar.has_constants
    with pytest.raises(bt.AssumptionViolation):
        haar.constants()


def test_densities():
    xi3 = bt.builtin("xi3")
    assert abs(float(xi3(1.25)) - 0.007) <= 0.0005
    f1 = bt.builtin("f1")
    assert math.isclose(f1.mass(), 1.0, rel_tol=1e-12)
    assert f1.index() == 1
    assert bt.builtin("step").index() == 0
    xs = np.linspace(-0.5, 1.5, 9)
    assert f1(xs).shape == xs.shape
    with pytest.raises(bt.ConfigError):
        bt.builtin("nope")


def test_sampling_and_estimate(db8):
    f1 = bt.builtin("f1")
    x = bt.sample(f1, 4096, 11)
    assert x.shape == (4096,)
    assert np.array_equal(x, bt.sample(f1, 4096, 11))
    y = bt.enrich(x, bt.builtin("xi3"), 0.5, 12)
    assert y.shape == (8192,)
    a = bt.estimate_energy(y, db8, 3)
    b = bt.estimate_energy(np.random.default_rng(0).permutation(y), db8, 3, threads=2)
    assert a["n"] == 8192
    assert abs(a["l_nj"] - b["l_nj"]) <= 1e-12
    assert a["e_nj"] >= a["l_nj"]


def test_oracle_pieces(db8):
    f0 = bt.builtin("f0")
    k0, beta = bt.coefficients(f0, db8, 4)
    v = bt.variance_terms(f0, db8, 4)
    assert math.isclose(float(beta @ beta), v["qj_energy"], rel_tol=1e-12)
    assert bt.id_estimate(2.0 ** -15, 5) == pytest.approx(1.0)


def test_power_study(db8):
    cfg = bt.TestConfig()
    cfg.z_alpha = -1.65
    s = bt.power_study(bt.builtin("f0"), bt.builtin("f1"), db8, cfg, 4096, 4, 3)
    assert s["n_enriched"] == 8192
    assert s["j"] == 3
    assert len(s["alt"]["l_nj"]) == 4
    assert s["terms"]["z_alpha"] == -1.65
    assert cfg.constant_mode is None
    cfg.constant_mode = "psi1"
    assert bt.threshold_terms(cfg, db8, 8192, 3)["constant_mode"] == "psi1"
