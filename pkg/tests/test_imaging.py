# Imaging Test Suite
# Raster type, PNG/PPM codecs, bilinear sampling and quantization

import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from common.errors import CorruptFile, IoFailure, UnsupportedFormat
from imaging.image_io import ImageFormat, read_image, write_image
from imaging.raster import Raster, quantize, sample_bilinear, sample_bilinear_many


def random_raster(rng, width=64, height=64):
    return Raster.from_array(rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8))


def test_read_ppm_pixels_in_row_major_order(tmp_path):
    path = tmp_path / "tiny.ppm"
    path.write_bytes(b"P6\n2 2\n255\n" + bytes([255, 0, 0, 0, 255, 0, 0, 0, 255, 255, 255, 255]))
    raster = read_image(path)
    assert raster.size == (2, 2)
    assert raster.pixel(0, 0) == (255, 0, 0)
    assert raster.pixel(1, 0) == (0, 255, 0)
    assert raster.pixel(0, 1) == (0, 0, 255)
    assert raster.pixel(1, 1) == (255, 255, 255)


@pytest.mark.parametrize("suffix", [".png", ".ppm"])
def test_write_read_is_lossless(tmp_path, suffix):
    raster = random_raster(np.random.default_rng(1))
    path = write_image(raster, tmp_path / f"random{suffix}")
    assert read_image(path) == raster


def test_png_rewrite_is_byte_identical(tmp_path):
    raster = random_raster(np.random.default_rng(2))
    first = write_image(raster, tmp_path / "a.png")
    second = write_image(read_image(first), tmp_path / "b.png")
    assert first.read_bytes() == second.read_bytes()


def test_truncated_png_is_corrupt(tmp_path):
    full = write_image(random_raster(np.random.default_rng(3)), tmp_path / "full.png")
    broken = tmp_path / "broken.png"
    broken.write_bytes(full.read_bytes()[:60])
    with pytest.raises(CorruptFile):
        read_image(broken)


def test_unknown_format_and_missing_file(tmp_path):
    text = tmp_path / "notes.png"
    text.write_text("not an image")
    with pytest.raises(UnsupportedFormat):
        read_image(text)
    with pytest.raises(IoFailure):
        read_image(tmp_path / "missing.png")
    with pytest.raises(UnsupportedFormat):
        ImageFormat.from_path("face.jpg")


def test_alpha_channel_is_dropped(tmp_path, caplog):
    rgba = np.zeros((4, 4, 4), dtype=np.uint8)
    rgba[..., 0] = 200
    rgba[..., 3] = 17
    path = tmp_path / "alpha.png"
    Image.fromarray(rgba).save(path)
    raster = read_image(path)
    assert raster.pixel(2, 2) == (200, 0, 0)
    assert "alpha" in caplog.text


def test_raster_rejects_bad_shapes():
    with pytest.raises(ValueError):
        Raster(width=2, height=2, pixels=np.zeros((2, 3, 3)))
    with pytest.raises(ValueError):
        Raster.filled(0, 4, (0, 0, 0))


def test_raster_pixels_are_read_only():
    raster = Raster.filled(3, 2, (10, 20, 30))
    with pytest.raises(ValueError):
        raster.pixels[0, 0, 0] = 1
    copy = raster.to_array()
    copy[0, 0, 0] = 1
    assert raster.pixel(0, 0) == (10, 20, 30)


def test_sample_uniform_gray():
    raster = Raster.filled(5, 5, (90, 90, 90))
    for x, y in [(0, 0), (1.3, 2.7), (4, 4), (-3, 9)]:
        assert sample_bilinear(raster, x, y) == pytest.approx((90, 90, 90))


def test_sample_linear_ramp_midpoint():
    pixels = np.zeros((1, 2, 3), dtype=np.uint8)
    pixels[0, 1, 0] = 255
    raster = Raster.from_array(pixels)
    assert sample_bilinear(raster, 0.5, 0.0)[0] == pytest.approx(127.5)


def test_sample_integer_points_are_exact():
    raster = random_raster(np.random.default_rng(4), 9, 7)
    for y in range(7):
        for x in range(9):
            assert sample_bilinear(raster, x, y) == raster.pixel(x, y)


def test_sample_matches_formula_oracle():
    rng = np.random.default_rng(5)
    raster = random_raster(rng, 20, 15)
    data = raster.pixels.astype(float)
    for _ in range(500):
        x, y = rng.uniform(0, 19), rng.uniform(0, 14)
        x0, y0 = int(np.floor(x)), int(np.floor(y))
        x1, y1 = min(x0 + 1, 19), min(y0 + 1, 14)
        fx, fy = x - x0, y - y0
        expected = ((1 - fx) * (1 - fy) * data[y0, x0] + fx * (1 - fy) * data[y0, x1]
                    + (1 - fx) * fy * data[y1, x0] + fx * fy * data[y1, x1])
        assert np.max(np.abs(np.array(sample_bilinear(raster, x, y)) - expected)) < 1e-9


def test_sample_is_continuous():
    """Small steps change the sample by at most the local neighbor spread"""
    rng = np.random.default_rng(6)
    raster = random_raster(rng, 16, 16)
    xs = rng.uniform(0, 15, size=300)
    ys = rng.uniform(0, 15, size=300)
    eps = 1e-4
    base = sample_bilinear_many(raster.pixels, xs, ys)
    moved = sample_bilinear_many(raster.pixels, xs + eps, ys + eps)
    assert np.max(np.abs(moved - base)) <= 255 * 2 * 2 * eps


def test_sample_clamps_outside():
    raster = random_raster(np.random.default_rng(8), 4, 3)
    assert sample_bilinear(raster, -10, -10) == raster.pixel(0, 0)
    assert sample_bilinear(raster, 99, 99) == raster.pixel(3, 2)


def test_quantize_rounds_half_up_and_clamps():
    values = np.array([-4.0, 0.49, 0.5, 1.5, 2.5, 254.5, 300.0])
    assert quantize(values).tolist() == [0, 0, 1, 2, 3, 255, 255]
    assert quantize(values).dtype == np.uint8
