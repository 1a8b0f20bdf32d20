"""Automatic seeding via diffusion, nested thresholds, and region selection."""

import json
import math

import numpy as np
import pytest

from growseg.grid import BinaryMask, GrayImage, Label
from growseg.metrics import overlap_stats
from growseg.mlt import (
    DiffusionParams,
    MltParams,
    diffuse,
    multilevel_threshold,
    run_ssgc,
    select_mass_region,
    synthesize_seeds,
    threshold_ladder,
)
from growseg.phantoms import add_noise, disc_phantom


def _reference_diffuse(img: GrayImage, params: DiffusionParams) -> np.ndarray:
    """Per-pixel loop re-derivation of the same tensor scheme."""
    from scipy import ndimage

    u = img.pixels.astype(np.float64)
    h, w = u.shape
    k2 = params.contrast ** 2

    def central(f, axis):
        g = np.empty_like(f)
        if axis == 0:
            g[1:-1, :] = 0.5 * (f[2:, :] - f[:-2, :])
            g[0, :] = f[1, :] - f[0, :]
            g[-1, :] = f[-1, :] - f[-2, :]
        else:
            g[:, 1:-1] = 0.5 * (f[:, 2:] - f[:, :-2])
            g[:, 0] = f[:, 1] - f[:, 0]
            g[:, -1] = f[:, -1] - f[:, -2]
        return g

    for _ in range(params.iterations):
        v = ndimage.gaussian_filter(u, sigma=1.0, mode="nearest")
        gy = central(v, 0)
        gx = central(v, 1)
        a = np.empty_like(u)
        b = np.empty_like(u)
        c = np.empty_like(u)
        for y in range(h):
            for x in range(w):
                m2 = gx[y, x] ** 2 + gy[y, x] ** 2
                if m2 > 0.0:
                    lam = math.exp(-m2 / k2)
                    a[y, x] = (lam * gx[y, x] ** 2 + gy[y, x] ** 2) / m2
                    b[y, x] = (lam - 1.0) * gx[y, x] * gy[y, x] / m2
                    c[y, x] = (lam * gy[y, x] ** 2 + gx[y, x] ** 2) / m2
                else:
                    a[y, x], b[y, x], c[y, x] = 1.0, 0.0, 1.0
        dyu = central(u, 0)
        dxu = central(u, 1)
        flow = np.zeros_like(u)
        for y in range(h):
            for x in range(w - 1):
                ux = u[y, x + 1] - u[y, x]
                uy = 0.5 * (dyu[y, x + 1] + dyu[y, x])
                j = (0.5 * (a[y, x + 1] + a[y, x]) * ux
                     + 0.5 * (b[y, x + 1] + b[y, x]) * uy)
                flow[y, x] += j
                flow[y, x + 1] -= j
        for y in range(h - 1):
            for x in range(w):
                uy = u[y + 1, x] - u[y, x]
                ux = 0.5 * (dxu[y + 1, x] + dxu[y, x])
                j = (0.5 * (c[y + 1, x] + c[y, x]) * uy
                     + 0.5 * (b[y + 1, x] + b[y, x]) * ux)
                flow[y, x] += j
                flow[y + 1, x] -= j
        u = u + params.time_step * flow
    return np.clip(np.rint(u), 0, 255).astype(np.uint8)


class TestDiffusion:
    def test_constant_image_is_fixed_point(self):
        img = GrayImage(np.full((12, 9), 137, dtype=np.uint8))
        out = diffuse(img, DiffusionParams(iterations=20))
        assert np.array_equal(out.pixels, img.pixels)

    def test_zero_iterations_is_identity(self, rng):
        img = GrayImage(rng.integers(0, 256, (8, 8)).astype(np.uint8))
        out = diffuse(img, DiffusionParams(iterations=0))
        assert np.array_equal(out.pixels, img.pixels)

    def test_mean_nearly_conserved(self, rng):
        img = GrayImage(rng.integers(0, 256, (32, 32)).astype(np.uint8))
        out = diffuse(img, DiffusionParams(iterations=15))
        drift = abs(float(out.pixels.mean()) - float(img.pixels.mean()))
        assert drift < 0.05  # flux form is exact; only the rounding moves it

    def test_output_range_and_dtype(self, rng):
        img = GrayImage(rng.integers(0, 256, (16, 16)).astype(np.uint8))
        out = diffuse(img)
        assert out.pixels.dtype == np.uint8
        assert out.shape == img.shape

    def test_smooths_noise_but_keeps_step_edge(self, rng):
        base = np.full((24, 24), 40.0)
        base[:, 12:] = 200.0
        noisy = np.clip(base + rng.normal(0, 10, base.shape), 0, 255)
        img = GrayImage(np.rint(noisy).astype(np.uint8))
        out = diffuse(img, DiffusionParams(iterations=15))
        # flat halves get much quieter
        assert out.pixels[4:20, 2:10].std() < img.pixels[4:20, 2:10].std() * 0.5
        # the step survives
        left = float(out.pixels[:, 10].mean())
        right = float(out.pixels[:, 13].mean())
        assert right - left > 120.0

    def test_matches_scalar_reference(self, rng):
        img = GrayImage(rng.integers(0, 256, (10, 11)).astype(np.uint8))
        params = DiffusionParams(iterations=4, time_step=0.2, contrast=15.0)
        assert np.array_equal(diffuse(img, params).pixels,
                              _reference_diffuse(img, params))

    def test_parameter_validation(self):
        with pytest.raises(ValueError, match="iterations"):
            DiffusionParams(iterations=-1)
        with pytest.raises(ValueError, match="time_step"):
            DiffusionParams(time_step=0.0)
        with pytest.raises(ValueError, match="time_step"):
            DiffusionParams(time_step=0.3)
        with pytest.raises(ValueError, match="contrast"):
            DiffusionParams(contrast=0.0)


class TestThresholdLadder:
    def test_descends_from_max_by_level(self):
        px = np.array([[10, 40, 100]], dtype=np.uint8)
        assert threshold_ladder(GrayImage(px), 30) == [70, 40]

    def test_stops_strictly_above_min(self):
        px = np.array([[0, 50]], dtype=np.uint8)
        # 50-25=25 ok, 25-25=0 is not > 0
        assert threshold_ladder(GrayImage(px), 25) == [25]

    def test_constant_image_yields_nothing(self):
        px = np.full((3, 3), 80, dtype=np.uint8)
        assert threshold_ladder(GrayImage(px), 5) == []

    def test_unit_level_covers_every_gray(self):
        px = np.array([[0, 5]], dtype=np.uint8)
        assert threshold_ladder(GrayImage(px), 1) == [4, 3, 2, 1]


class TestMultilevelThreshold:
    def test_constant_image_explicit_thresholds(self):
        img = GrayImage(np.full((4, 4), 200, dtype=np.uint8))
        layers = multilevel_threshold(img, thresholds=[150, 100])
        assert len(layers) == 2
        assert layers[0].bits.all() and layers[1].bits.all()

    def test_two_valued_image(self):
        px = np.array([[50, 200], [200, 50]], dtype=np.uint8)
        layers = multilevel_threshold(GrayImage(px), thresholds=[100])
        assert np.array_equal(layers[0].bits, px == 200)

    def test_layers_are_nested(self, rng):
        img = GrayImage(rng.integers(0, 256, (12, 12)).astype(np.uint8))
        layers = multilevel_threshold(img, MltParams(level=40, depth=1))
        for inner, outer in zip(layers, layers[1:]):
            assert not (inner.bits & ~outer.bits).any()

    def test_thresholds_must_descend(self):
        img = GrayImage(np.zeros((2, 2), dtype=np.uint8))
        with pytest.raises(ValueError, match="strictly decreasing"):
            multilevel_threshold(img, thresholds=[100, 100])
        with pytest.raises(ValueError, match="strictly decreasing"):
            multilevel_threshold(img, thresholds=[100, 150])


def _components_raster(order_bits: np.ndarray) -> list[set[tuple[int, int]]]:
    """8-connected components, discovered in raster order (flood fill)."""
    h, w = order_bits.shape
    seen = np.zeros_like(order_bits, dtype=bool)
    comps = []
    for sy in range(h):
        for sx in range(w):
            if not order_bits[sy, sx] or seen[sy, sx]:
                continue
            comp = set()
            stack = [(sx, sy)]
            seen[sy, sx] = True
            while stack:
                x, y = stack.pop()
                comp.add((x, y))
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        nx, ny = x + dx, y + dy
                        if (0 <= nx < w and 0 <= ny < h
                                and order_bits[ny, nx] and not seen[ny, nx]):
                            seen[ny, nx] = True
                            stack.append((nx, ny))
            comps.append(comp)
    return comps


class TestSelectMassRegion:
    def test_largest_component_wins(self, rng):
        for _ in range(20):
            bits = rng.random((10, 10)) < 0.3
            if not bits.any():
                continue
            got = select_mass_region([BinaryMask(bits)])
            comps = _components_raster(bits)
            best_size = max(len(c) for c in comps)
            best = next(c for c in comps if len(c) == best_size)
            assert {(x, y) for x, y in zip(*np.nonzero(got.bits)[::-1])} == best

    def test_tie_falls_to_earliest_component(self):
        bits = np.zeros((5, 5), dtype=bool)
        bits[0, 3:5] = True  # first in raster order
        bits[4, 0:2] = True  # same size, later
        got = select_mass_region([BinaryMask(bits)])
        assert got.bits[0, 3] and got.bits[0, 4]
        assert got.area() == 2

    def test_depth_merges_inner_layers_only(self):
        inner = np.zeros((6, 6), dtype=bool)
        inner[2:4, 2:4] = True
        outer = np.ones((6, 6), dtype=bool)
        layers = [BinaryMask(inner), BinaryMask(outer)]
        assert select_mass_region(layers, depth=1).area() == 4
        assert select_mass_region(layers, depth=2).area() == 36
        assert select_mass_region(layers).area() == 36  # None = all

    def test_depth_beyond_layer_count_is_clamped(self):
        bits = np.zeros((3, 3), dtype=bool)
        bits[1, 1] = True
        assert select_mass_region([BinaryMask(bits)], depth=10).area() == 1

    def test_diagonal_touch_is_one_component(self):
        bits = np.zeros((4, 4), dtype=bool)
        bits[0, 0] = bits[1, 1] = bits[2, 2] = True
        bits[3, 0] = True  # isolated single pixel elsewhere
        assert select_mass_region([BinaryMask(bits)]).area() == 3

    def test_empty_union_returns_empty(self):
        empty = BinaryMask(np.zeros((3, 3), dtype=bool))
        assert select_mass_region([empty]).area() == 0

    def test_validation(self):
        with pytest.raises(ValueError, match="at least one layer"):
            select_mass_region([])
        bits = BinaryMask(np.ones((2, 2), dtype=bool))
        with pytest.raises(ValueError, match="depth"):
            select_mass_region([bits], depth=0)


class TestSynthesizeSeeds:
    def _brute_ring(self, bits: np.ndarray, radius: int) -> set[tuple[int, int]]:
        h, w = bits.shape
        fg = list(zip(*np.nonzero(bits)[::-1]))
        ring = set()
        for y in range(h):
            for x in range(w):
                if bits[y, x]:
                    continue
                d2 = min((x - fx) ** 2 + (y - fy) ** 2 for fx, fy in fg)
                if d2 <= radius * radius:
                    ring.add((x, y))
        return ring

    def test_background_ring_matches_brute_distance(self):
        bits = np.zeros((16, 16), dtype=bool)
        bits[6:10, 5:11] = True
        seeds = synthesize_seeds(BinaryMask(bits), dilation_radius=3)
        bg = {(s.x, s.y) for s in seeds if s.label is Label.BACKGROUND}
        assert bg == self._brute_ring(bits, 3)

    def test_foreground_disc_at_centroid(self):
        bits = np.zeros((12, 12), dtype=bool)
        bits[3:9, 3:9] = True  # centroid (5.5, 5.5) rounds to (6, 6)
        seeds = synthesize_seeds(BinaryMask(bits), fg_radius=2)
        fg = {(s.x, s.y) for s in seeds if s.label is Label.FOREGROUND}
        assert fg == {(x, y) for y in range(12) for x in range(12)
                      if (x - 6) ** 2 + (y - 6) ** 2 <= 4 and bits[y, x]}

    def test_every_seed_label_is_honest(self):
        bits = np.zeros((14, 14), dtype=bool)
        bits[2:8, 4:12] = True
        seeds = synthesize_seeds(BinaryMask(bits))
        for s in seeds:
            if s.label is Label.FOREGROUND:
                assert bits[s.y, s.x]
            else:
                assert not bits[s.y, s.x]

    def test_crescent_centroid_snaps_into_region(self):
        yy, xx = np.mgrid[0:21, 0:21]
        outer = (xx - 10) ** 2 + (yy - 10) ** 2 <= 100
        inner = (xx - 13) ** 2 + (yy - 10) ** 2 <= 64
        bits = outer & ~inner  # thick C opening right; centroid sits in the bite
        ys, xs = np.nonzero(bits)
        px, py = int(np.rint(xs.mean())), int(np.rint(ys.mean()))
        assert not bits[py, px]  # the case this exercises
        seeds = synthesize_seeds(BinaryMask(bits), fg_radius=1)
        fg = [(s.x, s.y) for s in seeds if s.label is Label.FOREGROUND]
        assert fg
        for x, y in fg:
            assert bits[y, x]
        # the snapped anchor is a nearest region pixel to the rounded centroid
        best = min((x - px) ** 2 + (y - py) ** 2 for x, y in zip(xs.tolist(), ys.tolist()))
        anchor_d2 = min((x - px) ** 2 + (y - py) ** 2 for x, y in fg)
        assert anchor_d2 == best

    def test_empty_region_rejected(self):
        with pytest.raises(ValueError, match="no mass candidate"):
            synthesize_seeds(BinaryMask(np.zeros((4, 4), dtype=bool)))

    def test_radius_validation(self):
        bits = BinaryMask(np.ones((4, 4), dtype=bool))
        with pytest.raises(ValueError, match="radii"):
            synthesize_seeds(bits, dilation_radius=0)


class TestRunSsgc:
    def test_all_dark_image_rejected(self):
        img = GrayImage(np.zeros((16, 16), dtype=np.uint8))
        with pytest.raises(ValueError, match="no mass candidate found"):
            run_ssgc(img)

    def test_noisy_disc_recovered(self):
        img, gt = disc_phantom()
        noisy = add_noise(img, 10.0, seed=0)
        res = run_ssgc(noisy, MltParams(level=25, depth=2))
        assert res.converged
        assert overlap_stats(res.mask, gt).dsc > 0.9

    def test_debug_dump_writes_stages(self, tmp_path):
        img, _ = disc_phantom(size=48)
        noisy = add_noise(img, 8.0, seed=1)
        run_ssgc(noisy, MltParams(level=30, depth=2), debug_dir=tmp_path)
        assert (tmp_path / "diffused.png").exists()
        assert (tmp_path / "region.png").exists()
        assert (tmp_path / "seeds.json").exists()
        assert list(tmp_path.glob("layer_*.png"))
        seeds = json.loads((tmp_path / "seeds.json").read_text())
        assert {s["label"] for s in seeds} == {"fg", "bg"}

    def test_deterministic(self):
        img, _ = disc_phantom()
        noisy = add_noise(img, 10.0, seed=2)
        a = run_ssgc(noisy, MltParams(level=25, depth=2))
        b = run_ssgc(noisy, MltParams(level=25, depth=2))
        assert np.array_equal(a.mask.bits, b.mask.bits)
        assert a.iterations_used == b.iterations_used
