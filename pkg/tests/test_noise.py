import math

import numpy as np
import pytest

from blinddenoise.noise import (
    NoiseSpec,
    add_gaussian_noise,
    add_salt_pepper,
    difference_image,
    psnr,
)


class TestGaussianNoise:
    def test_zero_sigma_is_identity(self):
        img = np.random.default_rng(0).random((16, 16))
        out = add_gaussian_noise(img, NoiseSpec("gaussian", sigma=0.0, seed=1))
        assert np.array_equal(out, img)

    def test_statistics(self):
        img = np.zeros((1000, 1000))
        sigma = 25.0
        out = add_gaussian_noise(img, NoiseSpec("gaussian", sigma=sigma, seed=2))
        n = out - img
        std = sigma / 255.0
        assert abs(n.mean()) <= 3.0 * std / 1000.0
        assert abs(n.std() - std) <= 0.01 * std

    def test_seed_determinism(self):
        img = np.full((32, 32), 0.4)
        spec = NoiseSpec("gaussian", sigma=50.0, seed=99)
        assert np.array_equal(add_gaussian_noise(img, spec),
                              add_gaussian_noise(img, spec))

    def test_not_clipped(self):
        img = np.ones((64, 64))
        out = add_gaussian_noise(img, NoiseSpec("gaussian", sigma=100.0, seed=3))
        assert out.max() > 1.0

    def test_wrong_kind_rejected(self):
        with pytest.raises(ValueError):
            add_gaussian_noise(np.zeros((8, 8)),
                               NoiseSpec("salt_pepper", fraction=0.1))


class TestSaltPepper:
    def test_zero_fraction_is_identity(self):
        img = np.random.default_rng(4).random((16, 16))
        out = add_salt_pepper(img, NoiseSpec("salt_pepper", fraction=0.0, seed=1))
        assert np.array_equal(out, img)

    def test_full_fraction_is_binary(self):
        img = np.full((32, 32), 0.5)
        out = add_salt_pepper(img, NoiseSpec("salt_pepper", fraction=1.0, seed=5))
        assert set(np.unique(out)) <= {0.0, 1.0}

    def test_corruption_count_binomial(self):
        img = np.full((256, 256), 0.5)  # interior value so every hit is visible
        out = add_salt_pepper(img, NoiseSpec("salt_pepper", fraction=0.5, seed=6))
        hits = np.count_nonzero(out != img)
        n = img.size
        assert abs(hits - 0.5 * n) <= 3.0 * math.sqrt(n * 0.25)

    def test_uncorrupted_pixels_bit_identical(self):
        img = np.random.default_rng(7).random((64, 64))
        out = add_salt_pepper(img, NoiseSpec("salt_pepper", fraction=0.3, seed=8))
        untouched = (out != 0.0) & (out != 1.0)
        assert np.array_equal(out[untouched], img[untouched])

    def test_seed_determinism(self):
        img = np.random.default_rng(9).random((32, 32))
        spec = NoiseSpec("salt_pepper", fraction=0.5, seed=10)
        assert np.array_equal(add_salt_pepper(img, spec),
                              add_salt_pepper(img, spec))


class TestPsnr:
    def test_identical_is_infinite(self):
        img = np.random.default_rng(11).random((8, 8))
        assert psnr(img, img) == math.inf

    def test_constant_offsets(self):
        img = np.full((10, 10), 0.5)
        assert psnr(img, img + 0.1) == pytest.approx(20.0, abs=1e-9)
        assert psnr(img, img + 0.01) == pytest.approx(40.0, abs=1e-9)

    def test_symmetric_and_shift_invariant(self):
        rng = np.random.default_rng(12)
        a, b = rng.random((12, 12)), rng.random((12, 12))
        assert psnr(a, b) == pytest.approx(psnr(b, a), rel=1e-12)
        c = rng.random((12, 12))
        assert psnr(a + c, b + c) == pytest.approx(psnr(a, b), rel=1e-9)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            psnr(np.zeros((4, 4)), np.zeros((4, 5)))


class TestDifferenceImage:
    def test_identical_is_black(self):
        img = np.random.default_rng(13).random((8, 8))
        assert np.array_equal(difference_image(img, img), np.zeros((8, 8)))

    def test_gain_and_clipping(self):
        ref = np.full((4, 4), 0.5)
        assert np.allclose(difference_image(ref, ref - 0.05), 0.5, atol=1e-12)
        assert np.all(difference_image(ref, ref - 0.2) == 1.0)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            difference_image(np.zeros((4, 4)), np.zeros((5, 4)))


def test_noise_spec_validation():
    with pytest.raises(ValueError):
        NoiseSpec("poisson")
    with pytest.raises(ValueError):
        NoiseSpec("gaussian", sigma=-1.0)
    with pytest.raises(ValueError):
        NoiseSpec("salt_pepper", fraction=1.5)
    spec = NoiseSpec("gaussian", sigma=25.0, seed=3)
    assert spec.describe() == {"kind": "gaussian", "level": 25.0, "seed": 3}
