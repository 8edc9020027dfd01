import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from skimage.metrics import structural_similarity

from nlem.errors import InvalidInputError
from nlem.metrics import (edge_mask, fraction_near_edges, improvement_map, lag1_autocorrelation,
                          method_noise, psnr, rescale_for_display, ssim)
from nlem.synth import NoiseSpec, add_noise, make_checker, make_circles

images = arrays(np.float64, (16, 16), elements=st.floats(0, 255))


def test_psnr_examples():
    a = make_checker(16, 4)
    assert psnr(a, a) == np.inf
    assert psnr(np.zeros((4, 4)), np.full((4, 4), 255.0)) == pytest.approx(0.0)
    assert psnr(np.zeros((4, 4)), np.full((4, 4), 100.0)) == pytest.approx(8.1308, abs=1e-4)
    with pytest.raises(InvalidInputError):
        psnr(np.zeros((4, 4)), np.zeros((4, 5)))


@given(images, images, st.floats(-100, 100))
def test_psnr_symmetric_and_shift_invariant(a, b, c):
    assert psnr(a, b) == psnr(b, a)
    if psnr(a, b) != np.inf:
        assert psnr(a + c, b + c) == pytest.approx(psnr(a, b), rel=1e-9)


def test_ssim_examples():
    ref = make_circles(32, 4)
    assert ssim(ref, ref) == pytest.approx(1.0)
    shifted = ssim(ref, ref + 50)
    assert 0 < shifted < 1
    with pytest.raises(InvalidInputError):
        ssim(np.zeros((10, 20)), np.zeros((10, 20)))


@pytest.mark.parametrize("seed", range(5))
def test_ssim_matches_scikit_image(seed):
    rng = np.random.default_rng(seed)
    ref = make_checker(64, 8)
    test = ref + rng.normal(0, 40, ref.shape)
    expected = structural_similarity(ref, test, data_range=255, gaussian_weights=True,
                                     sigma=1.5, use_sample_covariance=False)
    assert ssim(ref, test) == pytest.approx(expected, abs=1e-10)


@given(images, images)
def test_ssim_symmetric(a, b):
    assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)
    assert ssim(a, a) == pytest.approx(1.0, abs=1e-12)


def test_method_noise_examples():
    u = make_checker(8, 2)
    assert np.all(method_noise(u, u) == 0)
    assert np.all(method_noise(u, u + 5) == 5)
    disp = rescale_for_display(np.array([[-3.0, 1.0], [5.0, 0.0]]))
    assert disp.min() == 0 and disp.max() == 255


def test_improvement_map_examples():
    f, a, b = np.zeros((1, 1)), np.full((1, 1), 20.0), np.full((1, 1), 5.0)
    assert improvement_map(f, a, b).tolist() == [[True]]
    assert not improvement_map(f, a, a, threshold=0).any()


@given(images, images, images, st.floats(0, 50), st.floats(0, 50))
def test_improvement_map_monotone_in_threshold(f, a, b, t1, t2):
    lo, hi = sorted((t1, t2))
    assert not np.any(improvement_map(f, a, b, hi) & ~improvement_map(f, a, b, lo))


def test_edge_helpers():
    clean = make_checker(16, 8)
    edges = edge_mask(clean)
    assert edges[0, 7] and edges[0, 8] and not edges[0, 3]
    flags = np.zeros_like(edges)
    flags[0, 3] = flags[0, 0] = True
    assert fraction_near_edges(flags, clean, radius=4) == 0.5


def test_lag1_autocorrelation():
    rng = np.random.default_rng(0)
    white = rng.normal(size=(128, 128))
    assert abs(lag1_autocorrelation(white)) < 0.03
    smooth = np.cumsum(white, axis=1)
    assert lag1_autocorrelation(smooth) > 0.4
