import math

import numpy as np
import pytest

from chamber_bessel import detrep
from chamber_bessel.detrep import calibrate, f00_det, f01_det, kappa_closed_form
from chamber_bessel.errors import DegenerateCoordinatesError, DomainError
from chamber_bessel.hyperseries import TruncationPolicy, hyp0f0, hyp0f1, uni_0F1


def test_rank_one():
    assert calibrate("F00", 1).kappa == pytest.approx(1.0, rel=1e-12)
    assert f00_det([0.7], [1.3]) == pytest.approx(math.exp(0.91), rel=1e-12)
    assert f01_det(0.5, [0.7], [1.3]) == pytest.approx(uni_0F1(1.5, 0.91), rel=1e-12)


def test_small_kappas():
    assert calibrate("F00", 2).kappa == pytest.approx(1.0, rel=1e-10)
    assert calibrate("F00", 3).kappa == pytest.approx(2.0, rel=1e-10)
    assert f00_det([1.0, 0.0], [1.0, 0.0]) == pytest.approx(math.e - 1, rel=1e-12)


@pytest.mark.parametrize("m", [2, 3, 4])
@pytest.mark.parametrize("phi", [None, -0.5, 0.5, 1.0])
def test_calibration_spread_and_pattern(m, phi):
    c = calibrate("F00" if phi is None else "F01", m, phi)
    assert c.spread <= 1e-8
    assert c.kappa == pytest.approx(kappa_closed_form(m, phi), rel=1e-10)


def test_against_series():
    rng = np.random.default_rng(5)
    pol = TruncationPolicy(max_weight=30)
    for m in (2, 3):
        for _ in range(5):
            x, y = rng.uniform(0.1, 1.5, m), rng.uniform(0.1, 1.5, m)
            assert f00_det(x, y) == pytest.approx(hyp0f0(1.0, x, y, pol).value, rel=1e-6)
            assert f01_det(-0.5, x, y) == pytest.approx(hyp0f1(m - 0.5, 1.0, x, y, pol).value, rel=1e-6)


def test_permutation_invariance():
    rng = np.random.default_rng(6)
    x, y = rng.uniform(0.1, 1.5, 3), rng.uniform(0.1, 1.5, 3)
    v = f01_det(0.5, x, y)
    for _ in range(5):
        assert f01_det(0.5, rng.permutation(x), y) == pytest.approx(v, rel=1e-12)


def test_degeneracy_rejected():
    with pytest.raises(DegenerateCoordinatesError):
        f00_det([0.5, 0.5 + 1e-9], [0.2, 0.9])
    with pytest.raises(DomainError):
        f01_det(-1.0, [0.5, 0.2], [0.2, 0.9])


def test_continuity_near_degeneracy():
    y = np.array([0.3, 0.8])
    a = f00_det([0.5, 0.5 + 1e-5], y)
    b = f00_det([0.5, 0.5 + 1e-4], y)
    assert a == pytest.approx(b, rel=1e-4)


def test_store_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv("CHAMBER_BESSEL_CACHE", str(tmp_path))
    monkeypatch.setattr(detrep, "_MEMO", {})
    c1 = calibrate("F01", 3, 0.25)
    text = (tmp_path / detrep.CACHE_FILE).read_text()
    assert text.startswith("detrep v1\n") and "F01 m=3 phi=0.25" in text
    monkeypatch.setattr(detrep, "_MEMO", {})
    c2 = calibrate("F01", 3, 0.25)
    assert c2.kappa == c1.kappa


def test_corrupt_store_warns(tmp_path, monkeypatch):
    monkeypatch.setenv("CHAMBER_BESSEL_CACHE", str(tmp_path))
    monkeypatch.setattr(detrep, "_MEMO", {})
    (tmp_path / detrep.CACHE_FILE).write_text("detrep v1\nF00 m=2; kappa=3 spread=0\nchecksum sha256=00\n")
    with pytest.warns(RuntimeWarning):
        c = calibrate("F00", 2)
    assert c.kappa == pytest.approx(1.0, rel=1e-10)


def test_bad_family():
    with pytest.raises(DomainError):
        calibrate("F11", 2)
    with pytest.raises(DomainError):
        calibrate("F00", 7)
