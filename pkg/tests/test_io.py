"""Image, mask and seed file round trips."""

import numpy as np
import pytest

from growseg.grid import BinaryMask, GrayImage, Label, seed_set
from growseg.imgio import (
    load_gray_image,
    load_mask,
    load_seeds,
    save_gray_image,
    save_mask,
    save_seeds,
)


def _write(path, data: bytes):
    path.write_bytes(data)
    return path


class TestPgm:
    def test_decode_2x2(self, tmp_path):
        p = _write(tmp_path / "a.pgm", b"P5 2 2 255\n" + bytes([0, 128, 255, 64]))
        img = load_gray_image(p)
        assert img.shape == (2, 2)
        assert list(img.pixels.ravel()) == [0, 128, 255, 64]

    def test_decode_1x1(self, tmp_path):
        p = _write(tmp_path / "a.pgm", b"P5\n1 1\n255\n" + bytes([255]))
        assert load_gray_image(p).at(0, 0) == 255

    def test_header_comments_skipped(self, tmp_path):
        p = _write(tmp_path / "a.pgm",
                   b"P5\n# made by hand\n2 1\n# another\n255\n" + bytes([9, 10]))
        assert list(load_gray_image(p).pixels.ravel()) == [9, 10]

    def test_16bit_rescaled_by_integer_division(self, tmp_path):
        vals = [0, 1000, 32768, 65535]
        payload = b"".join(v.to_bytes(2, "big") for v in vals)
        p = _write(tmp_path / "a.pgm", b"P5 4 1 65535\n" + payload)
        img = load_gray_image(p)
        assert list(img.pixels.ravel()) == [v * 255 // 65535 for v in vals]

    def test_truncated_data_rejected(self, tmp_path):
        p = _write(tmp_path / "a.pgm", b"P5 2 2 255\n" + bytes([0, 1]))
        with pytest.raises(ValueError, match="truncated"):
            load_gray_image(p)

    def test_truncated_header_rejected(self, tmp_path):
        p = _write(tmp_path / "a.pgm", b"P5 2")
        with pytest.raises(ValueError, match="truncated"):
            load_gray_image(p)

    def test_ascii_pgm_unsupported(self, tmp_path):
        p = _write(tmp_path / "a.pgm", b"P2\n1 1\n255\n255\n")
        with pytest.raises(ValueError, match="unsupported"):
            load_gray_image(p)

    def test_zero_dimension_rejected(self, tmp_path):
        p = _write(tmp_path / "a.pgm", b"P5 0 2 255\n")
        with pytest.raises(ValueError, match="zero-dimension"):
            load_gray_image(p)

    def test_round_trip(self, tmp_path, rng):
        img = GrayImage(rng.integers(0, 256, (5, 7)).astype(np.uint8))
        save_gray_image(img, tmp_path / "r.pgm")
        back = load_gray_image(tmp_path / "r.pgm")
        assert np.array_equal(back.pixels, img.pixels)


class TestPng:
    def test_round_trip(self, tmp_path, rng):
        img = GrayImage(rng.integers(0, 256, (6, 3)).astype(np.uint8))
        save_gray_image(img, tmp_path / "r.png")
        back = load_gray_image(tmp_path / "r.png")
        assert np.array_equal(back.pixels, img.pixels)

    def test_non_grayscale_png_rejected(self, tmp_path):
        from PIL import Image

        Image.new("RGB", (2, 2), (10, 20, 30)).save(tmp_path / "c.png")
        with pytest.raises(ValueError, match="unsupported"):
            load_gray_image(tmp_path / "c.png")

    def test_unknown_magic_rejected(self, tmp_path):
        p = _write(tmp_path / "a.png", b"GIF89a rest")
        with pytest.raises(ValueError):
            load_gray_image(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises((FileNotFoundError, OSError)):
            load_gray_image(tmp_path / "absent.png")


class TestMaskIo:
    def test_round_trip_both_formats(self, tmp_path, rng):
        m = BinaryMask(rng.random((4, 5)) > 0.5)
        for name in ("m.png", "m.pgm"):
            save_mask(m, tmp_path / name)
            assert np.array_equal(load_mask(tmp_path / name).bits, m.bits)

    def test_threshold_at_127(self, tmp_path):
        img = GrayImage(np.array([[0, 127, 128, 255]], dtype=np.uint8))
        save_gray_image(img, tmp_path / "g.pgm")
        m = load_mask(tmp_path / "g.pgm")
        assert list(m.bits.ravel()) == [False, False, True, True]

    def test_written_values_are_binary(self, tmp_path):
        save_mask(BinaryMask(np.array([[True, False]])), tmp_path / "m.pgm")
        img = load_gray_image(tmp_path / "m.pgm")
        assert set(img.pixels.ravel()) == {0, 255}


class TestSeedIo:
    def test_json_round_trip(self, tmp_path):
        s = seed_set([(1, 2, "fg"), (3, 4, "bg")])
        save_seeds(s, tmp_path / "s.json")
        back = load_seeds(tmp_path / "s.json")
        assert back.seeds == s.seeds

    def test_csv_round_trip(self, tmp_path):
        s = seed_set([(0, 0, "fg"), (9, 1, "bg")])
        save_seeds(s, tmp_path / "s.csv")
        back = load_seeds(tmp_path / "s.csv")
        assert back.seeds == s.seeds

    def test_json_label_values(self, tmp_path):
        save_seeds(seed_set([(1, 1, "fg")]), tmp_path / "s.json")
        text = (tmp_path / "s.json").read_text()
        assert '"label": "fg"' in text

    def test_bad_json_label_rejected(self, tmp_path):
        (tmp_path / "s.json").write_text('[{"x": 0, "y": 0, "label": "object"}]')
        with pytest.raises(ValueError):
            load_seeds(tmp_path / "s.json")

    def test_csv_header_enforced(self, tmp_path):
        (tmp_path / "s.csv").write_text("col,row,label\n0,0,fg\n")
        with pytest.raises(ValueError, match="header"):
            load_seeds(tmp_path / "s.csv")

    def test_conflicting_file_seeds_rejected(self, tmp_path):
        (tmp_path / "s.json").write_text(
            '[{"x":0,"y":0,"label":"fg"},{"x":0,"y":0,"label":"bg"}]')
        with pytest.raises(ValueError, match="conflicting"):
            load_seeds(tmp_path / "s.json")

    def test_loaded_labels_are_enums(self, tmp_path):
        save_seeds(seed_set([(5, 6, "bg")]), tmp_path / "s.json")
        seed = load_seeds(tmp_path / "s.json").seeds[0]
        assert seed.label == Label.BACKGROUND


class TestExtensionDispatch:
    def test_unknown_image_extension(self, tmp_path):
        img = GrayImage(np.zeros((2, 2), dtype=np.uint8))
        with pytest.raises(ValueError):
            save_gray_image(img, tmp_path / "x.tiff")

    def test_unknown_seed_extension(self, tmp_path):
        with pytest.raises(ValueError):
            save_seeds(seed_set([(0, 0, "fg")]), tmp_path / "x.yaml")
