import math
import random

import pytest

import hankelspec as hs


def test_coefficients():
    assert hs.v_alpha(1.0) == pytest.approx(0.5, abs=1e-14)
    assert hs.beta(0.5, 0.5) == pytest.approx(math.pi, rel=1e-14)
    r = hs.coefficients(1.0, 1.0, 0.0)
    assert r["c_plus"] == pytest.approx(0.5)
    assert r["c_minus"] == 0.0
    assert hs.coefficients(1.0, 0.0, 0.0)["c_plus"] == 0.0
    cp, _ = hs.weyl_coefficient(1.0, 1.0, 2.0)
    assert cp == pytest.approx(hs.coefficients_continuous(2.0, 1.0, 1.0)["c_plus"], rel=1e-8)


def test_delta_and_hilbert():
    s = hs.spectrum({"type": "delta"}, 16)
    assert s.lambda_plus == [1.0]
    assert s.lambda_minus == []
    h = hs.spectrum({"type": "hilbert"}, 256)
    assert h.lambda_plus[0] < 3.141593
    assert h.to_csv().startswith("n,lambda_plus,residual_plus,lambda_minus,residual_minus\n")


def test_hs_identity_random():
    rng = random.Random(3)
    values = [rng.gauss(0, 1) for _ in range(255)]
    _, _, err = hs.hs_identity({"type": "sequence", "values": values}, 128)
    assert err <= 1e-12


def test_model_sequence_and_fit():
    seq = hs.model_sequence(1.0, 1.0, 0.0, 8)
    assert len(seq) == 8
    s = hs.spectrum(hs.model_kernel(1.0, 1.0), 1024)
    n_plus, n_minus = s.counting(0.05)
    assert n_plus >= 1
    with pytest.raises(hs.ValidationError):
        hs.fit(s, 1.0, 4, 8)


def test_laplace_ratios():
    t = hs.laplace_ratios(1.0, 0, [1e2, 1e4, 1e6])
    assert t["monotone"]
    assert t["within_bounds"]


def test_errors():
    with pytest.raises(hs.ValidationError):
        hs.v_alpha(0.0)
    with pytest.raises(ValueError):
        hs.spectrum({"type": "nonsense"}, 8)
