import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlem.errors import InvalidParameterError
from nlem.metrics import psnr
from nlem.synth import (NoiseSpec, add_noise, estimate_sigma, make_checker, make_circles,
                        make_edge_1d, splitmix64, standard_normal, uniforms)
from oracles import splitmix64_scalar


def test_splitmix64_reference_vectors():
    # published test vector for state 1234567
    assert splitmix64(1234567, 5).tolist() == [
        6457827717110365317, 3203168211198807973, 9817491932198370423,
        4593380528125082431, 16408922859458223821]


@given(st.integers(0, 2 ** 64 - 1))
def test_splitmix64_matches_scalar(seed):
    assert splitmix64(seed, 7).tolist() == splitmix64_scalar(seed, 7)


def test_uniforms_open_interval():
    u = uniforms(99, 100_000)
    assert u.min() > 0 and u.max() < 1


def test_box_muller_pairing():
    x = splitmix64_scalar(11, 4)
    u = [((v >> 11) + 0.5) * 2.0 ** -53 for v in x]
    r = np.sqrt(-2 * np.log(u[0]))
    z = standard_normal(11, 3)
    assert z[0] == r * np.cos(2 * np.pi * u[1])
    assert z[1] == r * np.sin(2 * np.pi * u[1])
    assert z[2] == np.sqrt(-2 * np.log(u[2])) * np.cos(2 * np.pi * u[3])


def test_checker_examples():
    assert make_checker(2, 1).ravel().tolist() == [0, 255, 255, 0]
    img = make_checker()
    assert img.shape == (256, 256)
    values, counts = np.unique(img, return_counts=True)
    assert values.tolist() == [0, 255] and counts.tolist() == [32768, 32768]
    with pytest.raises(InvalidParameterError):
        make_checker(10, 3)


def test_checker_black_square_count():
    img = make_checker(256, 32)
    blocks = img.reshape(8, 32, 8, 32).mean(axis=(1, 3))
    assert np.sum(blocks == 0) == 32 and img[0, 0] == 0


def test_circles_examples():
    assert np.all(make_circles(4, 100) == 255)
    img = make_circles()
    assert img[128, 128] == 255 and img[127, 127] == 255
    assert set(np.unique(img)) == {0.0, 255.0}
    with pytest.raises(InvalidParameterError):
        make_circles(16, 0)


def test_edge_examples():
    assert make_edge_1d(4, 2).samples.tolist() == [0, 0, 1, 1]
    e = make_edge_1d(100, 50)
    assert e.samples[49] == 0 and e.samples[50] == 1 and e.samples.sum() == 50
    for bad in (0, 4):
        with pytest.raises(InvalidParameterError):
            make_edge_1d(4, bad)


def test_zero_sigma_is_identity():
    img = make_checker(16, 4)
    assert np.array_equal(add_noise(img, NoiseSpec(0, 5)), img)


@given(st.integers(0, 2 ** 63), st.floats(0.1, 200))
def test_noise_is_reproducible(seed, sigma):
    img = make_circles(16, 3)
    a = add_noise(img, NoiseSpec(sigma, seed))
    assert np.array_equal(a, add_noise(img, NoiseSpec(sigma, seed)))


@pytest.mark.parametrize("seed", [0, 1, 12345, 2 ** 63 + 7])
def test_noise_standard_deviation(seed):
    # chi-square bound for 65536 samples at 99.9%: sd within about 1.3%
    z = add_noise(np.zeros((256, 256)), NoiseSpec(100, seed))
    assert 97 <= z.std(ddof=1) <= 103
    assert abs(z.mean()) < 3.3 * 100 / 256


def test_checker_noisy_psnr():
    clean = make_checker()
    noisy = add_noise(clean, NoiseSpec(100, 3))
    assert psnr(clean, noisy) == pytest.approx(20 * np.log10(255 / 100), abs=0.1)
    assert noisy.min() < 0 and noisy.max() > 255  # not clipped


def test_estimate_sigma():
    assert estimate_sigma(np.full((20, 20), 9.0)) == 0
    noise = add_noise(np.zeros((256, 256)), NoiseSpec(20, 1))
    assert estimate_sigma(noise) == pytest.approx(20, rel=0.10)
    checker = add_noise(make_checker(), NoiseSpec(60, 1))
    assert estimate_sigma(checker) == pytest.approx(60, rel=0.15)
    with pytest.raises(InvalidParameterError):
        estimate_sigma(np.zeros((2, 9)))


@given(st.integers(0, 1000), st.floats(-500, 500), st.floats(0.1, 10))
def test_estimate_sigma_shift_and_scale(seed, shift, scale):
    noise = add_noise(np.zeros((64, 64)), NoiseSpec(10, seed))
    base = estimate_sigma(noise)
    assert estimate_sigma(noise + shift) == pytest.approx(base, rel=1e-9)
    assert estimate_sigma(scale * noise) == pytest.approx(scale * base, rel=1e-9)
