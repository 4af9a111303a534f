import numpy as np
import pytest

from visage.errors import BoundsError, InvalidInputError, ModelFormatError
from visage.imgcore import (Rect, SobelParams, decode_netpbm, encode_netpbm,
                            integral, rect_sum, sobel, to_grayscale)

SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.int64)
SOBEL_Y = SOBEL_X.T


def sobel_oracle(img, kernel):
    """Direct double-loop correlation with replicate-edge indexing."""
    h, w = img.shape
    out = np.zeros((h, w), dtype=np.int64)
    for y in range(h):
        for x in range(w):
            acc = 0
            for ky in range(3):
                for kx in range(3):
                    yy = min(max(y + ky - 1, 0), h - 1)
                    xx = min(max(x + kx - 1, 0), w - 1)
                    acc += int(kernel[ky, kx]) * int(img[yy, xx])
            out[y, x] = acc
    return out


class TestGrayscale:
    def test_black(self):
        img = np.zeros((4, 5, 3), dtype=np.uint8)
        assert (to_grayscale(img) == 0).all()

    def test_white(self):
        img = np.full((4, 5, 3), 255, dtype=np.uint8)
        assert (to_grayscale(img) == 255).all()

    def test_pure_red(self):
        img = np.zeros((1, 1, 3), dtype=np.uint8)
        img[0, 0] = (255, 0, 0)
        assert to_grayscale(img)[0, 0] == 76  # round(0.299 * 255)

    def test_bounded(self):
        rng = np.random.default_rng(0)
        img = rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)
        gray = to_grayscale(img)
        assert gray.dtype == np.uint8
        assert gray.min() >= 0 and gray.max() <= 255

    def test_rejects_gray_input(self):
        with pytest.raises(InvalidInputError):
            to_grayscale(np.zeros((4, 4), dtype=np.uint8))


class TestIntegral:
    def test_zero_image(self):
        assert (integral(np.zeros((4, 4), dtype=np.uint8)) == 0).all()

    def test_ones_bottom_right(self):
        ii = integral(np.ones((2, 2), dtype=np.uint8))
        assert ii[2, 2] == 4
        assert (ii[0, :] == 0).all() and (ii[:, 0] == 0).all()

    def test_matches_naive_double_loop(self):
        rng = np.random.default_rng(1)
        img = rng.integers(0, 256, (8, 8), dtype=np.uint8)
        ii = integral(img)
        for y in range(9):
            for x in range(9):
                acc = 0
                for yy in range(y):
                    for xx in range(x):
                        acc += int(img[yy, xx])
                assert ii[y, x] == acc

    def test_monotone_rows_cols(self):
        rng = np.random.default_rng(2)
        ii = integral(rng.integers(0, 256, (12, 9), dtype=np.uint8))
        assert (np.diff(ii, axis=0) >= 0).all()
        assert (np.diff(ii, axis=1) >= 0).all()

    def test_rejects_rgb(self):
        with pytest.raises(InvalidInputError):
            integral(np.zeros((4, 4, 3), dtype=np.uint8))


class TestRectSum:
    def test_zero_area(self):
        ii = integral(np.ones((4, 4), dtype=np.uint8))
        assert rect_sum(ii, Rect(2, 2, 0, 0)) == 0
        assert rect_sum(ii, Rect(1, 1, 3, 0)) == 0

    def test_whole_image(self):
        ii = integral(np.ones((2, 2), dtype=np.uint8))
        assert rect_sum(ii, Rect(0, 0, 2, 2)) == 4

    def test_random_rects_match_naive(self):
        rng = np.random.default_rng(3)
        img = rng.integers(0, 256, (32, 32), dtype=np.uint8)
        ii = integral(img)
        for _ in range(200):
            x, y = rng.integers(0, 32, 2)
            w = rng.integers(0, 33 - x)
            h = rng.integers(0, 33 - y)
            r = Rect(int(x), int(y), int(w), int(h))
            naive = sum(int(img[yy, xx])
                        for yy in range(r.y, r.y2) for xx in range(r.x, r.x2))
            assert rect_sum(ii, r) == naive

    def test_exhaustive_rects_small_image(self):
        # every rect of a small image, against the naive sum
        rng = np.random.default_rng(9)
        img = rng.integers(0, 256, (5, 6), dtype=np.uint8)
        ii = integral(img)
        wide = img.astype(np.int64)
        for y in range(6):
            for x in range(7):
                for h in range(6 - y):
                    for w in range(7 - x):
                        assert rect_sum(ii, Rect(x, y, w, h)) == \
                            int(wide[y:y + h, x:x + w].sum())

    def test_additivity(self):
        rng = np.random.default_rng(4)
        img = rng.integers(0, 256, (16, 16), dtype=np.uint8)
        ii = integral(img)
        whole = Rect(2, 3, 10, 8)
        left = Rect(2, 3, 4, 8)
        right = Rect(6, 3, 6, 8)
        assert rect_sum(ii, whole) == rect_sum(ii, left) + rect_sum(ii, right)

    def test_out_of_bounds(self):
        ii = integral(np.zeros((8, 8), dtype=np.uint8))
        with pytest.raises(BoundsError):
            rect_sum(ii, Rect(5, 5, 4, 4))
        with pytest.raises(BoundsError):
            rect_sum(ii, Rect(-1, 0, 2, 2))


class TestSobel:
    def test_constant_zero_interior(self):
        img = np.full((8, 8), 77, dtype=np.uint8)
        for params in (SobelParams(1, 0), SobelParams(0, 1)):
            out = sobel(img, params)
            assert (out[1:-1, 1:-1] == 0).all()

    def test_unit_ramp_x(self):
        img = np.tile(np.arange(12, dtype=np.uint8), (10, 1))
        out = sobel(img, SobelParams(1, 0))
        assert (out[1:-1, 1:-1] == 8).all()

    def test_unit_ramp_y(self):
        img = np.tile(np.arange(12, dtype=np.uint8)[:, None], (1, 10))
        out = sobel(img, SobelParams(0, 1))
        assert (out[1:-1, 1:-1] == 8).all()

    def test_matches_direct_convolution(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            img = rng.integers(0, 256, (16, 16), dtype=np.uint8)
            assert (sobel(img, SobelParams(1, 0)) == sobel_oracle(img, SOBEL_X)).all()
            assert (sobel(img, SobelParams(0, 1)) == sobel_oracle(img, SOBEL_Y)).all()

    def test_linearity_interior(self):
        rng = np.random.default_rng(6)
        a = rng.integers(0, 100, (10, 10)).astype(np.int64)
        b = rng.integers(0, 100, (10, 10)).astype(np.int64)
        combo = sobel(2 * a + 3 * b, SobelParams(1, 0))
        parts = 2 * sobel(a, SobelParams(1, 0)) + 3 * sobel(b, SobelParams(1, 0))
        assert (combo[1:-1, 1:-1] == parts[1:-1, 1:-1]).all()

    def test_too_small(self):
        with pytest.raises(InvalidInputError):
            sobel(np.zeros((2, 5), dtype=np.uint8))

    def test_param_validation(self):
        with pytest.raises(InvalidInputError):
            SobelParams(1, 1)
        with pytest.raises(InvalidInputError):
            SobelParams(0, 1, aperture=5)


class TestNetpbm:
    def test_pgm_roundtrip_bit_exact(self):
        rng = np.random.default_rng(7)
        img = rng.integers(0, 256, (13, 17), dtype=np.uint8)
        data = encode_netpbm(img)
        assert data.startswith(b"P5")
        out = decode_netpbm(data)
        assert (out == img).all()
        assert encode_netpbm(out) == data

    def test_ppm_roundtrip_bit_exact(self):
        rng = np.random.default_rng(8)
        img = rng.integers(0, 256, (5, 9, 3), dtype=np.uint8)
        data = encode_netpbm(img)
        assert data.startswith(b"P6")
        assert (decode_netpbm(data) == img).all()

    def test_header_comments(self):
        img = np.arange(6, dtype=np.uint8).reshape(2, 3)
        data = b"P5\n# a comment\n3 2\n# another\n255\n" + img.tobytes()
        assert (decode_netpbm(data) == img).all()

    def test_bad_magic(self):
        with pytest.raises(ModelFormatError):
            decode_netpbm(b"P3\n1 1\n255\n0")

    def test_bad_maxval(self):
        with pytest.raises(ModelFormatError):
            decode_netpbm(b"P5\n1 1\n65535\n\x00\x00")

    def test_truncated_raster(self):
        with pytest.raises(ModelFormatError):
            decode_netpbm(b"P5\n4 4\n255\n\x00\x00")
