import math

import numpy as np
import pytest

from tripinball import (
    gaps,
    inaccessible_boundary,
    period3,
    sample_attractor,
    unstable_manifold,
)
from tripinball.angular import in_any_gap
from tripinball.attractor import (
    band_count,
    basin_boundary,
    basin_raster,
    box_count_slope,
    cutting_line,
    escape_time_raster,
    measure_stats,
    transitive_components,
)
from tripinball.raster import GridSpec, dilate, occupancy

PI = math.pi


def tp_point(s, theta):
    from tripinball import PhasePoint

    return PhasePoint(float(s), float(theta))


def cloud_overlap(grid, s_a, t_a, s_b, t_b, radius=2):
    occ_b = dilate(occupancy(grid, s_b, t_b).data > 0, radius)
    rows = np.clip(
        ((grid.theta_max - t_a) / grid.dtheta).astype(int), 0, grid.height - 1
    )
    cols = np.clip(((s_a - grid.s_min) / grid.ds).astype(int), 0, grid.width - 1)
    return float(occ_b[rows, cols].mean())


class TestSampleAttractor:
    def test_band_confinement_and_gap_avoidance(self):
        lam = 0.3
        smp = sample_attractor(lam, 7, 2000, 20_000)
        assert len(smp) == 20_000
        a = np.abs(smp.theta)
        assert np.all(a > lam * PI / 6)
        assert np.all(a < lam * PI / 2)
        level6 = gaps(lam, 6)
        assert not any(in_any_gap(t, level6, shrink=1e-9) for t in smp.theta)

    def test_strip_invariance_various_lambda(self):
        for lam in (0.2, 0.5, 0.8, 0.98):
            smp = sample_attractor(lam, 1, 500, 5_000)
            assert np.all(np.abs(smp.theta) <= lam * PI / 2 + 1e-12)

    def test_reproducible(self):
        a = sample_attractor(0.4, 123, 1000, 5_000)
        b = sample_attractor(0.4, 123, 1000, 5_000)
        assert np.array_equal(a.s, b.s) and np.array_equal(a.theta, b.theta)
        c = sample_attractor(0.4, 124, 1000, 5_000)
        assert not np.array_equal(a.s, c.s)

    def test_multi_seed_pooling(self):
        smp = sample_attractor(0.4, 5, 500, 9_000, n_seeds=3)
        assert len(smp) == 9_000

    def test_rotational_equivariance(self):
        # shifting one sample by a side matches an independent resample
        grid = GridSpec.phase_space(400, 400)
        for lam in (0.3, 0.5):
            a = sample_attractor(lam, 1, 10_000, 50_000)
            b = sample_attractor(lam, 2, 10_000, 50_000)
            shifted = np.mod(a.s + 1.0, 3.0)
            assert cloud_overlap(grid, shifted, a.theta, b.s, b.theta) >= 0.95
            assert cloud_overlap(grid, b.s, b.theta, shifted, a.theta) >= 0.95

    def test_rejects_elastic(self):
        with pytest.raises(ValueError):
            sample_attractor(1.0, 0, 10, 10)


class TestInaccessibleBoundary:
    def test_alpha_values(self):
        assert inaccessible_boundary(2.0 / 3.0).alpha == 0.0
        assert inaccessible_boundary(0.5).alpha == pytest.approx(PI / 24, abs=1e-15)
        assert inaccessible_boundary(0.5).alpha == pytest.approx(0.1308997, abs=1e-7)

    def test_cutting_line_endpoint(self):
        assert cutting_line(PI / 6) == pytest.approx(2.0, abs=1e-12)

    def test_contains_spot_checks(self):
        b = inaccessible_boundary(0.5)
        assert b.contains(0.5, 0.79)  # outer strip (lam*pi/2 ~ 0.785)
        assert b.contains(1.5, 0.05)  # central strip (alpha ~ 0.131)
        assert b.contains(1.95, 0.2)  # notch near the far vertex
        assert b.contains(1.05, -0.2)  # mirrored notch
        assert not b.contains(1.5, 0.2)  # mid-side in the band is reachable
        assert not b.contains(1.5, 0.4)  # fully covered band

    def test_gamma_parametrisation(self):
        b = inaccessible_boundary(0.5)
        s_end, th_end = b.gamma(0.5 * PI / 2)
        assert th_end == pytest.approx(b.alpha, abs=1e-15)
        s_start, th_start = b.gamma(PI / 6)
        assert s_start == pytest.approx(2.0, abs=1e-12)
        assert th_start == pytest.approx(0.5 * PI / 6, abs=1e-15)

    def test_sampled_attractor_avoids_region(self):
        for lam in (0.4, 0.5, 0.6):
            b = inaccessible_boundary(lam)
            smp = sample_attractor(lam, 3, 5_000, 30_000)
            ms, mt = 3.0 / 400, PI / 400
            hits = sum(
                1
                for s, t in zip(smp.s, smp.theta)
                if b.contains(s, t, margin_s=ms, margin_theta=mt)
            )
            assert hits == 0

    @pytest.mark.parametrize("lam", [0.4, 0.5, 0.6, 0.65])
    def test_two_step_images_respect_the_boundary(self, lam):
        # independent oracle: push a uniform grid of starts through exactly
        # two bounces; no image may fall in the claimed region, and the
        # notch band must be populated on its accessible side
        from tripinball import _kernels
        from tripinball.rng import Stream

        b = inaccessible_boundary(lam)
        stream = Stream(42)
        ms, mt = 3.0 / 400, PI / 400
        band_hits = 0
        for _ in range(200_000):
            s, th = stream.next_phase_point()
            if s - int(s) <= 0.0:
                continue
            ok = True
            for _ in range(2):
                s, th, z, fl, eta, st = _kernels.step_kernel(s, th, lam)
                if st != _kernels.STEP_OK:
                    ok = False
                    break
            if not ok:
                continue
            assert not b.contains(s, th, margin_s=ms, margin_theta=mt), (s, th)
            if b.alpha + mt < abs(th) < lam * PI / 6 - mt:
                band_hits += 1
        assert band_hits > 1000


class TestEscapeRaster:
    def test_period3_cell_saturates_and_mirror_dies(self):
        lam = 0.55
        grid = GridSpec.phase_space(400, 400)
        raster = escape_time_raster(lam, grid, n=30)
        plus, minus = period3(lam)
        p, q = plus.phase_point, minus.phase_point
        assert raster.data[grid.row_of(p.theta), grid.col_of(p.s)] == 30
        assert raster.data[grid.row_of(q.theta), grid.col_of(q.s)] == 0

    def test_order_monotonicity(self):
        lam = 0.55
        grid = GridSpec.side0_positive(200, 200)
        r30 = escape_time_raster(lam, grid, n=30)
        r31 = escape_time_raster(lam, grid, n=31)
        assert np.all(r31.data >= r30.data)
        assert np.all((r31.data >= 31) <= (r30.data >= 30))

    def test_validation(self):
        with pytest.raises(ValueError):
            escape_time_raster(0.5, GridSpec.phase_space(10, 10), n=0)
        with pytest.raises(ValueError):
            escape_time_raster(0.5, GridSpec.phase_space(10, 10), target_sign=2)


class TestUnstableManifold:
    def test_generation_zero_is_local_segment(self):
        curve = unstable_manifold(0.5, generations=0)
        assert len(curve) == 1
        theta, s_lo, s_hi = curve.segments[0]
        orbit = period3(0.5)[0]
        assert theta == orbit.theta_star
        assert s_lo < orbit.s3 < s_hi

    def test_segments_are_horizontal_rows(self):
        curve = unstable_manifold(0.5, generations=12)
        assert curve.segments.shape[1] == 3
        # each segment stays within one side
        sides_lo = np.floor(curve.segments[:, 1])
        sides_hi = np.floor(np.nextafter(curve.segments[:, 2], -np.inf))
        assert np.all(sides_lo == sides_hi)

    def test_advancement_agrees_with_pointwise_stepping(self, rng):
        # points inside a segment must land inside one of its children
        from tripinball import step as map_step
        from tripinball.attractor import _advance_segments

        lam = 0.45
        for _ in range(50):
            side = np.array([int(rng.integers(0, 3))])
            th = np.array([rng.uniform(-1.2, 1.2)])
            a, b = np.sort(rng.uniform(1e-6, 1 - 1e-6, size=2))
            c_side, c_th, c_lo, c_hi = _advance_segments(
                side, th, np.array([a]), np.array([b]), lam
            )
            for u in rng.uniform(a + 1e-9, b - 1e-9, size=8):
                try:
                    out = map_step(tp_point(side[0] + u, th[0]), lam)
                except Exception:
                    continue
                landed = False
                for k in range(len(c_side)):
                    if (
                        int(out.next.s) == c_side[k]
                        and abs(out.next.theta - c_th[k]) < 1e-9
                        and c_lo[k] - 1e-9 <= out.next.s - c_side[k] <= c_hi[k] + 1e-9
                    ):
                        landed = True
                        break
                assert landed

    def test_dense_in_attractor(self):
        lam = 0.3
        curve = unstable_manifold(lam, generations=60)
        grid = GridSpec.phase_space(400, 400)
        covered = dilate(curve.rasterize(grid), 2)
        smp = sample_attractor(lam, 99, 10_000, 10_000)
        rows = np.clip(
            ((grid.theta_max - smp.theta) / grid.dtheta).astype(int), 0, 399
        )
        cols = np.clip(((smp.s - grid.s_min) / grid.ds).astype(int), 0, 399)
        assert covered[rows, cols].all()


class TestHomoclinic:
    def test_embedded_orbit_crosses_its_stable_enclosure(self):
        # at lam=0.3 the expansion is strong, so the order-n stable set is
        # thinner than a cell at n=30; a matched order still witnesses the
        # embedded periodic orbit
        from tripinball import homoclinic_test

        res = homoclinic_test(0.3, n=12, grid=GridSpec.side0_positive(400, 400),
                              generations=50)
        assert res.found
        theta_star = period3(0.3)[0].theta_star
        assert abs(res.witness_theta - theta_star) > 2 * (PI / 2) / 400


class TestComponents:
    def test_single_component_small_lambda(self):
        comp = transitive_components(0.3, seed=1, n_seeds=4, n_keep=20_000)
        assert comp.count == 1

    def test_still_single_component_at_09(self):
        # the split into three parts happens close to the elastic limit
        assert transitive_components(0.9, seed=3, n_seeds=6, n_keep=20_000).count == 1

    def test_three_components_disjoint_clouds(self):
        comp = transitive_components(0.98, seed=3)
        assert comp.count == 3
        grid = comp.grid
        reps = [comp.samples[g[0]] for g in comp.groups]
        for a in range(3):
            for b in range(3):
                if a == b:
                    continue
                overlap = cloud_overlap(
                    grid, reps[a].s, reps[a].theta, reps[b].s, reps[b].theta
                )
                assert overlap < 0.1


@pytest.fixture(scope="module")
def analysis98():
    return transitive_components(0.98, seed=3)


class TestBasins:
    def test_fractions_are_thirds(self, analysis98):
        ids, _ = basin_raster(
            0.98,
            GridSpec.phase_space(240, 240),
            horizon=4000,
            analysis=analysis98,
        )
        fracs = [float((ids.data == k).mean()) for k in (1, 2, 3)]
        for f in fracs:
            assert abs(f - 1.0 / 3.0) < 0.02
        assert float((ids.data == 0).mean()) < 0.01

    def test_attractor_cell_belongs_to_own_basin(self, analysis98):
        grid = GridSpec.phase_space(240, 240)
        ids, _ = basin_raster(0.98, grid, horizon=4000, analysis=analysis98)
        for comp_id, members in enumerate(analysis98.groups, start=1):
            smp = analysis98.samples[members[0]]
            r = grid.row_of(float(smp.theta[1000]))
            c = grid.col_of(float(smp.s[1000]))
            assert ids.data[r, c] == comp_id

    def test_boundary_box_dimension_diagnostic(self, analysis98):
        # zoom near the attractor piece centered at (0.5, 0)
        grid = GridSpec(0.25, 0.75, -0.25, 0.25, 512, 512)
        ids, _ = basin_raster(0.98, grid, horizon=2000, analysis=analysis98)
        slope = box_count_slope(basin_boundary(ids.data))
        assert 1.0 < slope < 2.0

    def test_single_component_is_an_error(self):
        with pytest.raises(ValueError, match="single transitive component"):
            basin_raster(
                0.3,
                GridSpec.phase_space(50, 50),
                horizon=100,
                analysis=transitive_components(0.3, seed=1, n_seeds=4, n_keep=10_000),
            )


class TestMeasureStats:
    def test_frequencies_and_band_support(self):
        stats = measure_stats(0.3, n=200_000, seed=5)
        assert abs(stats.sign_freq - 0.5) < 0.02
        assert np.all(np.abs(stats.side_freq - 1 / 3) < 0.02)
        assert len(stats.bands) == 4
        for band in stats.bands:
            assert np.all(band.s_hist > 0)
            assert band.s_hist.max() / band.s_hist.min() < 20

    def test_rejects_large_lambda(self):
        with pytest.raises(ValueError):
            measure_stats(0.5, n=1000)


class TestBandCount:
    def test_runs_counted(self):
        hist = np.array([0, 12, 14, 0, 0, 11, 0, 25, 25, 25])
        assert band_count(hist, floor=10) == 3

    def test_floor_applies(self):
        hist = np.array([9, 9, 9])
        assert band_count(hist, floor=10) == 0

    def test_three_bands_near_elastic(self):
        smp = sample_attractor(0.95, 0, 10_000, 100_000)
        hist, _ = np.histogram(smp.theta, bins=1024, range=(-PI / 2, PI / 2))
        assert band_count(hist) == 3
