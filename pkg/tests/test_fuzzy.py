"""Membership-guarded engine: model fitting, frontier geometry, golden trace."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exhaustive_drivers import fuzzy_seeding_mismatches
from reference_sims import ref_fuzzy_run

from growseg.fuzzy import (
    FuzzyConfig,
    MembershipModel,
    fit_membership_model,
    init_fuzzy,
    model_strength,
    run_fuzzy,
    step_fuzzy,
)
from growseg.grid import GrayImage, Label, seed_set


def _uniform(w, h, value=100):
    return GrayImage(np.full((h, w), value, dtype=np.uint8))


class TestModelFit:
    def test_symmetric_square_of_seeds(self):
        seeds = seed_set([(0, 0, "fg"), (2, 0, "fg"), (0, 2, "fg"), (2, 2, "fg")])
        m = fit_membership_model(seeds)
        assert (m.xm, m.ym) == (1.0, 1.0)
        assert m.sx == 1.0 and m.sy == 1.0

    def test_population_deviation(self):
        # xs {0, 4}: population std is 2, not the sample std sqrt(8)
        m = fit_membership_model(seed_set([(0, 0, "fg"), (4, 0, "fg")]))
        assert m.sx == 2.0
        assert m.sy == 1.0  # zero spread floored

    def test_deviation_floor(self):
        m = fit_membership_model(seed_set([(3, 3, "fg")]))
        assert m.sx == 1.0 and m.sy == 1.0

    def test_alpha_carried_from_config(self):
        m = fit_membership_model(seed_set([(0, 0, "fg")]), FuzzyConfig(alpha=4.0))
        assert m.alpha_x == 4.0 and m.alpha_y == 4.0

    def test_background_seed_rejected(self):
        with pytest.raises(ValueError, match="foreground seeds only"):
            fit_membership_model(seed_set([(0, 0, "fg"), (1, 1, "bg")]))

    def test_no_seed_rejected(self):
        with pytest.raises(ValueError, match="no foreground seed"):
            fit_membership_model(seed_set([]))


class TestMembership:
    def _model(self):
        return MembershipModel(xm=2.0, ym=1.5, sx=1.5, sy=2.5,
                               alpha_x=2.0, alpha_y=2.0)

    def test_peak_at_center(self):
        m = self._model()
        assert m.mu_obj(m.xm, m.ym) == 1.0

    def test_complement_identity(self):
        m = self._model()
        for x in np.linspace(-1, 6, 17):
            for y in np.linspace(-1, 6, 17):
                assert m.mu_bkg(x, y) == 1.0 - m.mu_obj(x, y)

    def test_grid_matches_scalar_formula(self):
        m = self._model()
        grid = m.membership_grid(6, 5)
        for y in range(5):
            for x in range(6):
                assert grid[y, x] == pytest.approx(m.mu_obj(x, y), rel=1e-14, abs=0)

    def test_half_level_set_is_axis_aligned_ellipse(self):
        m = self._model()
        grid = m.membership_grid(9, 9)
        lim = 2.0 * math.log(2.0)
        for y in range(9):
            for x in range(9):
                inside = ((x - m.xm) ** 2 / (m.alpha_x * m.sx ** 2)
                          + (y - m.ym) ** 2 / (m.alpha_y * m.sy ** 2)) <= lim
                assert (grid[y, x] >= 0.5) == inside

    def test_quadrupling_alpha_doubles_semi_axes(self):
        a = MembershipModel(xm=0, ym=0, sx=2.0, sy=3.0, alpha_x=2.0, alpha_y=2.0)
        b = MembershipModel(xm=0, ym=0, sx=2.0, sy=3.0, alpha_x=8.0, alpha_y=8.0)
        semi = lambda m: (m.sx * math.sqrt(2 * m.alpha_x * math.log(2)),
                          m.sy * math.sqrt(2 * m.alpha_y * math.log(2)))
        ax, ay = semi(a)
        bx, by = semi(b)
        assert bx == pytest.approx(2 * ax) and by == pytest.approx(2 * ay)

    def test_center_cell_rounds_ties_down(self):
        m = MembershipModel(xm=1.5, ym=2.5, sx=1, sy=1, alpha_x=2, alpha_y=2)
        assert m.center_cell(5, 5) == (1, 2)
        m = MembershipModel(xm=1.51, ym=0.2, sx=1, sy=1, alpha_x=2, alpha_y=2)
        assert m.center_cell(5, 5) == (2, 0)

    def test_center_cell_clamped_in_bounds(self):
        m = MembershipModel(xm=-3.0, ym=9.0, sx=1, sy=1, alpha_x=2, alpha_y=2)
        assert m.center_cell(4, 4) == (0, 3)

    def test_model_strength_full_in_background_zone(self):
        m = self._model()
        # far corner is deep background: model strength is 1 regardless of theta
        assert model_strength(m, 0.25, 50.0, 50.0) == 1.0
        # at the center the cell keeps its automaton strength
        assert model_strength(m, 0.25, m.xm, m.ym) == 0.25


class TestInit:
    def test_only_centroid_cell_planted(self):
        img = _uniform(5, 5)
        seeds = seed_set([(0, 0, "fg"), (4, 0, "fg"), (0, 4, "fg"), (4, 4, "fg")])
        grid, model = init_fuzzy(img, seeds)
        assert (model.xm, model.ym) == (2.0, 2.0)
        labeled = np.argwhere(grid.labels != Label.UNLABELED)
        assert labeled.tolist() == [[2, 2]]
        assert grid.strengths[2, 2] == 1.0
        assert grid.strengths.sum() == 1.0

    def test_seed_bounds_checked(self):
        with pytest.raises(ValueError):
            init_fuzzy(_uniform(3, 3), seed_set([(3, 0, "fg")]))


class TestGoldenTrace5x5:
    """Bright 3x3 block, three seeds, one stray, alpha=4, hand-derived."""

    def _case(self):
        px = np.full((5, 5), 100, dtype=np.uint8)
        px[0:3, 0:3] = 255
        img = GrayImage(px)
        seeds = seed_set([(0, 0, "fg"), (1, 1, "fg"), (3, 2, "fg")])
        return img, seeds, FuzzyConfig(alpha=4.0)

    def test_fitted_model(self):
        img, seeds, cfg = self._case()
        _, model = init_fuzzy(img, seeds, cfg)
        assert model.xm == pytest.approx(4.0 / 3.0)
        assert model.ym == 1.0
        assert model.sx == pytest.approx(math.sqrt(14.0) / 3.0)
        assert model.sy == 1.0  # sqrt(2/3) floored
        assert model.center_cell(5, 5) == (1, 1)

    def test_single_sweep_labels_everything(self):
        img, seeds, cfg = self._case()
        grid, model = init_fuzzy(img, seeds, cfg)
        grid, changed1 = step_fuzzy(img, grid, model, cfg)
        assert changed1 == 15  # every cell that ever gets a label gets it now
        _, changed2 = step_fuzzy(img, grid, model, cfg)
        assert changed2 == 0

        f, b, u = Label.FOREGROUND, Label.BACKGROUND, Label.UNLABELED
        expected = np.array([
            [f, f, f, b, u],
            [f, f, f, b, b],
            [f, f, f, b, u],
            [b, b, b, u, u],
            [u, u, u, u, u],
        ], dtype=np.int8)
        assert np.array_equal(grid.labels, expected)
        labeled = grid.labels != Label.UNLABELED
        assert (grid.strengths[labeled] == 1.0).all()
        assert (grid.strengths[~labeled] == 0.0).all()

    def test_full_run_result(self):
        img, seeds, cfg = self._case()
        res = run_fuzzy(img, seeds, cfg)
        assert res.converged
        assert res.iterations_used == 2  # labeling sweep + confirming sweep
        want = np.zeros((5, 5), dtype=bool)
        want[0:3, 0:3] = True
        assert np.array_equal(res.mask.bits, want)

    def test_stray_seed_cell_ends_background(self):
        img, seeds, cfg = self._case()
        res = run_fuzzy(img, seeds, cfg)
        assert res.final_grid.labels[2, 3] == Label.BACKGROUND


class TestRunFuzzy:
    def test_fg_only_contract(self):
        with pytest.raises(ValueError, match="foreground seeds only"):
            run_fuzzy(_uniform(3, 3), seed_set([(0, 0, "fg"), (1, 0, "bg")]))
        with pytest.raises(ValueError, match="no foreground seed"):
            run_fuzzy(_uniform(3, 3), seed_set([]))

    def test_uniform_grid_inside_frontier_floods(self):
        img = _uniform(3, 3)
        seeds = seed_set([(0, 0, "fg"), (2, 0, "fg"), (0, 2, "fg"), (2, 2, "fg")])
        res = run_fuzzy(img, seeds)
        assert res.converged
        assert res.iterations_used == 2
        assert res.mask.area() == 9

    def test_strengths_stay_in_unit_interval(self, rng):
        img = GrayImage(rng.integers(0, 256, (7, 7)).astype(np.uint8))
        seeds = seed_set([(2, 2, "fg"), (4, 3, "fg")])
        res = run_fuzzy(img, seeds)
        assert res.final_grid.strengths.min() >= 0.0
        assert res.final_grid.strengths.max() <= 1.0

    def test_deterministic(self, rng):
        img = GrayImage(rng.integers(0, 256, (6, 6)).astype(np.uint8))
        seeds = seed_set([(1, 1, "fg"), (4, 4, "fg")])
        a = run_fuzzy(img, seeds)
        b = run_fuzzy(img, seeds)
        assert np.array_equal(a.final_grid.labels, b.final_grid.labels)
        assert np.array_equal(a.final_grid.strengths, b.final_grid.strengths)


class TestAgainstReference:
    def _compare(self, img, seeds, cfg=FuzzyConfig(), order=None):
        res = run_fuzzy(img, seeds, cfg)
        grid0, model = init_fuzzy(img, seeds, cfg)
        if order is None:
            order = np.arange(img.width * img.height, dtype=np.int64)
        den_x = 2.0 * model.alpha_x * model.sx ** 2
        den_y = 2.0 * model.alpha_y * model.sy ** 2
        lr, sr, ir, cr = ref_fuzzy_run(
            img.pixels.astype(np.float64), grid0.labels, grid0.strengths,
            model.xm, model.ym, den_x, den_y,
            True, cfg.max_intensity_norm, cfg.max_iterations, order)
        assert np.array_equal(res.final_grid.labels, lr)
        assert np.array_equal(res.final_grid.strengths, sr)
        assert res.iterations_used == ir
        assert res.converged == cr

    def test_exhaustive_2x2_wrapper(self):
        vals = [0, 128, 255]
        cells = [(x, y) for y in range(2) for x in range(2)]
        for code in range(3 ** 4):
            c = code
            px = np.empty((2, 2), dtype=np.uint8)
            for i in range(4):
                px[i // 2, i % 2] = vals[c % 3]
                c //= 3
            img = GrayImage(px)
            for a in range(4):
                self._compare(img, seed_set([(*cells[a], "fg")]))
                for b in range(a + 1, 4):
                    self._compare(img, seed_set([(*cells[a], "fg"),
                                                 (*cells[b], "fg")]))

    @given(data=st.data())
    @settings(max_examples=30, deadline=None)
    def test_random_3x3_wrapper(self, data):
        px = np.array(data.draw(st.lists(st.sampled_from([0, 128, 255]),
                                         min_size=9, max_size=9)),
                      dtype=np.uint8).reshape(3, 3)
        img = GrayImage(px)
        cells = [(x, y) for y in range(3) for x in range(3)]
        n_seeds = data.draw(st.integers(1, 2))
        picked = data.draw(st.lists(st.sampled_from(cells), min_size=n_seeds,
                                    max_size=n_seeds, unique=True))
        perm = data.draw(st.permutations(range(9)))
        self._compare(img, seed_set([(*p, "fg") for p in picked]),
                      order=np.array(perm, dtype=np.int64))

    def test_kernel_exhaustive_2x2_sample(self):
        labels0 = np.zeros((2, 2), dtype=np.int8)
        strengths0 = np.zeros((2, 2), dtype=np.float64)
        seeds = seed_set([(0, 0, "fg"), (1, 1, "fg")])
        cfg = FuzzyConfig()
        model = fit_membership_model(seeds, cfg)
        cx, cy = model.center_cell(2, 2)
        labels0[cy, cx] = 1
        strengths0[cy, cx] = 1.0
        bad = fuzzy_seeding_mismatches(
            2, 2, labels0, strengths0, model.xm, model.ym,
            2.0 * model.alpha_x * model.sx ** 2,
            2.0 * model.alpha_y * model.sy ** 2,
            True, 255.0, 10000)
        assert bad == 0


class TestFaultTolerance:
    def test_far_stray_seed_fully_recovered(self):
        from growseg.phantoms import disc_phantom, add_noise
        from growseg.metrics import overlap_stats

        img, gt = disc_phantom()
        noisy = add_noise(img, 10.0, seed=0)
        ring = []
        for i in range(8):
            a = 2 * math.pi * i / 8
            ring.append((int(round(32 + 18 * math.cos(a))),
                         int(round(32 + 18 * math.sin(a))), "fg"))
        clean = overlap_stats(run_fuzzy(noisy, seed_set(ring)).mask, gt).dsc
        corrupt = overlap_stats(
            run_fuzzy(noisy, seed_set(ring + [(5, 5, "fg")])).mask, gt).dsc
        assert clean - corrupt < 0.05
