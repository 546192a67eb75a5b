import numpy as np
import pytest

from keyopt.core import DimensionError, RngStream, random_vector
from keyopt.variation import BlendParams, ShakeParams, blend, shake, shake_move_count


def test_shake_zero_rate_returns_input():
    rng = RngStream(1, 0)
    keys = random_vector(8, rng)
    out = shake(keys, ShakeParams(0.0, 0.0), rng)
    assert np.array_equal(out, keys)
    assert out is not keys


def test_shake_never_mutates_input():
    rng = RngStream(2, 0)
    keys = random_vector(12, rng)
    before = keys.copy()
    shake(keys, ShakeParams(0.5, 1.0), rng)
    assert np.array_equal(keys, before)


def test_shake_mirror_move_complements():
    # Force mirror moves by trying seeds until the log shows one.
    keys = np.full(4, 0.3)
    for seed in range(50):
        rng = RngStream(seed, 0)
        log = []
        out = shake(keys, ShakeParams(0.25, 0.25), rng, move_log=log)
        if log == [("mirror", log[0][1])]:
            assert out[log[0][1]] == pytest.approx(0.7)
            return
    pytest.fail("no single-mirror shake found in 50 seeds")


def test_shake_move_count_full_rate():
    rng = RngStream(3, 0)
    keys = random_vector(10, rng)
    log = []
    shake(keys, ShakeParams(1.0, 1.0), rng, move_log=log)
    assert len(log) == 10


@pytest.mark.parametrize(
    "beta,n,expected",
    [(0.0, 10, 0), (0.05, 10, 1), (0.25, 10, 3), (1.0, 10, 10), (0.01, 3, 1)],
)
def test_shake_move_count_rounding(beta, n, expected):
    assert shake_move_count(beta, n) == expected


def test_shake_deterministic_with_seed():
    keys = random_vector(20, RngStream(9, 0))
    a = shake(keys, ShakeParams(0.2, 0.6), RngStream(10, 0))
    b = shake(keys, ShakeParams(0.2, 0.6), RngStream(10, 0))
    assert np.array_equal(a, b)


def test_shake_single_key_vector():
    rng = RngStream(4, 0)
    keys = np.array([0.4])
    out = shake(keys, ShakeParams(1.0, 1.0), rng)
    assert out.shape == (1,)
    assert 0.0 <= out[0] < 1.0


def test_shake_params_validation():
    with pytest.raises(ValueError):
        ShakeParams(0.5, 0.2)
    with pytest.raises(ValueError):
        ShakeParams(-0.1, 0.5)


def test_blend_full_inheritance_equals_first_parent():
    rng = RngStream(5, 0)
    a = random_vector(50, rng)
    b = random_vector(50, rng)
    out = blend(a, b, BlendParams(rho=1.0, mu=0.0, factor=1), rng)
    assert np.array_equal(out, a)


def test_blend_complement_of_second_parent():
    rng = RngStream(6, 0)
    a = random_vector(50, rng)
    b = random_vector(50, rng)
    out = blend(a, b, BlendParams(rho=0.0, mu=0.0, factor=-1), rng)
    assert np.allclose(out, 1.0 - b)


def test_blend_identity_on_equal_parents():
    rng = RngStream(7, 0)
    a = random_vector(30, rng)
    for rho in (0.0, 0.3, 1.0):
        out = blend(a, a, BlendParams(rho=rho, mu=0.0, factor=1), rng)
        assert np.array_equal(out, a)


def test_blend_inheritance_fraction_monte_carlo():
    rng = RngStream(8, 0)
    a = random_vector(10000, rng)
    b = random_vector(10000, rng)
    out = blend(a, b, BlendParams(rho=0.5, mu=0.02, factor=1), rng)
    fraction = np.mean(out == a)
    assert abs(fraction - 0.49) < 0.03


def test_blend_rejects_length_mismatch():
    rng = RngStream(9, 0)
    with pytest.raises(DimensionError):
        blend(np.zeros(3), np.zeros(4), BlendParams(0.5, 0.0, 1), rng)


def test_blend_params_validation():
    with pytest.raises(ValueError):
        BlendParams(rho=1.2, mu=0.0, factor=1)
    with pytest.raises(ValueError):
        BlendParams(rho=0.5, mu=-0.1, factor=1)
    with pytest.raises(ValueError):
        BlendParams(rho=0.5, mu=0.1, factor=0)


def test_operator_closure_randomized():
    # Spot check; the full 1e5-application fuzz lives in the acceptance suite.
    rng = RngStream(10, 0)
    for trial in range(200):
        n = 1 + trial % 17
        keys = random_vector(n, rng)
        shaken = shake(keys, ShakeParams(0.0, 1.0), rng)
        assert np.all(shaken >= 0.0) and np.all(shaken < 1.0)
        other = random_vector(n, rng)
        factor = -1 if trial % 2 else 1
        blended = blend(keys, other, BlendParams(0.5, 0.05, factor), rng)
        assert np.all(blended >= 0.0) and np.all(blended < 1.0)
