import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sharpmark.image import (
    ImageKind,
    ImageLoadError,
    InputImage,
    load_image,
    normalize_to_u8,
    save_image,
    to_ycbcr,
    write_pgm,
)


def _write_pnm(path, magic, w, h, maxval, payload: bytes):
    path.write_bytes(f"{magic}\n{w} {h}\n{maxval}\n".encode() + payload)


def test_load_8bit_gray_pgm(tmp_path):
    p = tmp_path / "g.pgm"
    _write_pnm(p, "P5", 2, 2, 255, bytes([0, 128, 255, 64]))
    img = load_image(p)
    assert img.kind is ImageKind.GRAY
    np.testing.assert_array_equal(img.planes[0], [[0, 128 / 255], [1, 64 / 255]])


def test_load_rgb_ppm_red_pixel(tmp_path):
    p = tmp_path / "red.ppm"
    _write_pnm(p, "P6", 1, 1, 255, bytes([255, 0, 0]))
    img = load_image(p)
    assert img.kind is ImageKind.RGB
    r, g, b = img.planes
    assert (r[0, 0], g[0, 0], b[0, 0]) == (1.0, 0.0, 0.0)


def test_load_16bit_max_is_one(tmp_path):
    p = tmp_path / "w.pgm"
    _write_pnm(p, "P5", 2, 1, 65535, np.array([65535, 0], dtype=">u2").tobytes())
    img = load_image(p)
    np.testing.assert_array_equal(img.planes[0], [[1.0, 0.0]])


def test_load_16bit_rgb_png(tmp_path):
    rgb = np.zeros((3, 4, 3))
    rgb[..., 0] = 1.0
    rgb[1, 2] = (0.25, 0.5, 0.75)
    p = tmp_path / "c16.png"
    save_image(p, InputImage.from_array(rgb), bit_depth=16)
    img = load_image(p)
    r, g, b = img.planes
    assert r[0, 0] == 1.0 and g[0, 0] == 0.0
    assert (r[1, 2], g[1, 2], b[1, 2]) == (16384 / 65535, 32768 / 65535, 49151 / 65535)


def test_alpha_channel_is_dropped(tmp_path):
    import cv2

    bgra = np.zeros((2, 2, 4), dtype=np.uint8)
    bgra[..., 2] = 255  # red
    bgra[..., 3] = 10   # nearly transparent
    p = tmp_path / "a.png"
    cv2.imwrite(str(p), bgra)
    img = load_image(p)
    assert img.kind is ImageKind.RGB
    assert np.all(img.planes[0] == 1.0) and np.all(img.planes[2] == 0.0)


def test_load_errors(tmp_path):
    with pytest.raises(ImageLoadError):
        load_image(tmp_path / "missing.png")
    bad = tmp_path / "bad.png"
    bad.write_bytes(b"not an image at all")
    with pytest.raises(ImageLoadError):
        load_image(bad)
    empty = tmp_path / "empty.png"
    empty.write_bytes(b"")
    with pytest.raises(ImageLoadError):
        load_image(empty)


@pytest.mark.parametrize("suffix,depth", [(".png", 8), (".png", 16), (".ppm", 8), (".pgm", 16)])
def test_lossless_round_trip(tmp_path, rng, suffix, depth):
    top = 255 if depth == 8 else 65535
    if suffix == ".pgm":
        img = InputImage.gray(rng.integers(0, top + 1, (5, 7)) / top)
    else:
        img = InputImage.from_array(rng.integers(0, top + 1, (5, 7, 3)) / top)
    p = tmp_path / f"rt{suffix}"
    save_image(p, img, bit_depth=depth)
    again = load_image(p)
    assert again.kind is img.kind
    for a, b in zip(img.planes, again.planes):
        np.testing.assert_array_equal(a, b)
    save_image(p, again, bit_depth=depth)
    for a, b in zip(again.planes, load_image(p).planes):
        np.testing.assert_array_equal(a, b)


def test_input_image_invariants():
    with pytest.raises(ValueError):
        InputImage.gray(np.full((2, 2), 1.5))
    with pytest.raises(ValueError):
        InputImage(ImageKind.RGB, (np.zeros((2, 2)),))
    with pytest.raises(ValueError):
        InputImage.rgb(np.zeros((2, 2)), np.zeros((2, 3)), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        InputImage.gray(np.array([[np.nan]]))
    img = InputImage.gray(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        img.planes[0][0, 0] = 1.0


def test_ycbcr_red():
    ycc = to_ycbcr(InputImage.rgb(np.ones((1, 1)), np.zeros((1, 1)), np.zeros((1, 1))))
    assert ycc.y[0, 0] == pytest.approx(0.299, abs=1e-15)
    assert ycc.cb[0, 0] == pytest.approx(0.5 - 0.168736, abs=1e-15)
    assert ycc.cr[0, 0] == pytest.approx(1.0, abs=1e-15)


def test_ycbcr_gray_passthrough(rng):
    p = rng.random((4, 6))
    ycc = to_ycbcr(InputImage.gray(p))
    np.testing.assert_array_equal(ycc.y, p)
    assert np.all(ycc.cb == 0.5) and np.all(ycc.cr == 0.5)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
              elements=st.floats(0, 1)))
def test_achromatic_rgb_has_neutral_chroma(v):
    ycc = to_ycbcr(InputImage.rgb(v, v, v))
    assert ycc.y.shape == v.shape
    np.testing.assert_allclose(ycc.y, v, atol=1e-12)
    np.testing.assert_allclose(ycc.cb, 0.5, atol=1e-12)
    np.testing.assert_allclose(ycc.cr, 0.5, atol=1e-12)


def test_pgm_normalisation_and_bytes(tmp_path):
    plane = np.array([[0.0, 0.5], [1.0, 0.25]])
    np.testing.assert_array_equal(normalize_to_u8(plane), [[0, 128], [255, 64]])
    np.testing.assert_array_equal(normalize_to_u8(np.full((2, 3), 7.0)), np.zeros((2, 3)))
    p = tmp_path / "m.pgm"
    write_pgm(p, plane * 10 - 3)
    assert p.read_bytes() == b"P5\n2 2\n255\n" + bytes([0, 128, 255, 64])
