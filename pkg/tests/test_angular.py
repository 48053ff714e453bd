import itertools
import math

import pytest

from tripinball import (
    SignSeries,
    decode_angle,
    eval_series,
    gaps,
    iterate,
    period3,
    periodic_angle,
    phi,
)
from tripinball.angular import (
    NotClosed,
    OutOfCantorRange,
    WordTooShort,
    cantor_sup,
    expansion_factor,
    in_any_gap,
)
from tripinball.symbolic import periodic_orbit_from_word

PI_3 = math.pi / 3.0


class TestPhi:
    def test_fixed_point_is_theta_star(self):
        for lam in (0.2, 0.5, 0.9):
            ts = period3(lam)[0].theta_star
            assert phi(1, ts, lam) == pytest.approx(ts, abs=1e-15)
            assert phi(-1, -ts, lam) == pytest.approx(-ts, abs=1e-15)

    def test_at_zero(self):
        assert phi(1, 0.0, 0.3) == pytest.approx(0.3 * PI_3, abs=0)


class TestSignSeries:
    def test_all_plus_limit(self):
        z = SignSeries((1,) * 40, 0.3)
        value, tail = eval_series(z)
        assert value + tail >= cantor_sup(0.3) - 1e-15
        assert value == pytest.approx(0.4487990, abs=1e-6)

    def test_alternating_is_theta_star(self):
        for lam in (0.2, 0.3, 0.45):
            z = SignSeries(tuple((-1) ** n for n in range(30)), lam)
            value, tail = eval_series(z)
            assert abs(value - period3(lam)[0].theta_star) <= tail

    def test_single_sign_example(self):
        z = SignSeries((1,), 0.3)
        value, tail = eval_series(z)
        assert value == pytest.approx(0.3141593, abs=1e-6)
        assert tail == pytest.approx(0.1346397, abs=1e-6)

    def test_value_within_reachable_range(self):
        z = SignSeries((1, -1, 1, 1), 0.3)
        assert abs(z.value) <= cantor_sup(0.3)

    def test_validation(self):
        with pytest.raises(ValueError):
            SignSeries((), 0.3)
        with pytest.raises(ValueError):
            SignSeries((1, 0), 0.3)


class TestDecode:
    def test_theta_star_is_alternating(self):
        code = decode_angle(period3(0.3)[0].theta_star, 0.3, 8)
        assert code.signs == (1, -1, 1, -1, 1, -1, 1, -1)

    def test_supremum_is_all_plus(self):
        assert decode_angle(cantor_sup(0.25), 0.25, 6).signs == (1,) * 6

    def test_zero_is_in_central_gap(self):
        # depth-4 oracle: min over all 2^4 partial sums of |0 - sum| - tail > 0
        lam = 0.3
        tails = [PI_3 * lam ** (d + 1) / (1 - lam) for d in range(1, 5)]
        best = min(
            abs(sum(z * PI_3 * lam ** (n + 1) for n, z in enumerate(word)))
            - tails[len(word) - 1]
            for d in range(1, 5)
            for word in itertools.product((1, -1), repeat=d)
        )
        assert best > 0
        with pytest.raises(OutOfCantorRange):
            decode_angle(0.0, lam, 4)

    def test_roundtrip_random(self, rng):
        for _ in range(200):
            lam = rng.uniform(0.1, 0.45)
            depth = int(rng.integers(1, 14))
            signs = tuple(int(v) for v in rng.choice((-1, 1), size=depth))
            z = SignSeries(signs, lam)
            assert decode_angle(z.value, lam, depth).signs == signs

    @pytest.mark.parametrize("lam", [0.2, 0.3])
    def test_forward_invariance_exhaustive(self, lam):
        # decode(phi(z0, value)) == (z0, negated signs), every word to depth 12
        for depth in range(1, 13):
            for signs in itertools.product((1, -1), repeat=depth):
                value = SignSeries(signs, lam).value
                for z0 in (1, -1):
                    pushed = phi(z0, value, lam)
                    got = decode_angle(pushed, lam, depth + 1)
                    assert got.signs == (z0,) + tuple(-x for x in signs)

    def test_cantor_bound_below_one_third(self):
        # sup |value| + tail < lam*pi/2 for lam < 1/3
        for lam in (0.1, 0.2, 0.3, 0.33):
            z = SignSeries((1,) * 12, lam)
            assert z.value + z.tail < lam * math.pi / 2

    def test_rejects_lambda_above_half(self):
        with pytest.raises(ValueError):
            decode_angle(0.1, 0.5, 4)


class TestGaps:
    def test_level1_quarter(self):
        g = gaps(0.25, 1)
        assert len(g) == 1
        assert g[0].center == 0.0
        assert g[0].half_width == pytest.approx(math.pi / 18, abs=1e-12)

    def test_level1_contains_central_strip(self):
        g = gaps(0.3, 1)[0]
        assert g.half_width == pytest.approx(0.1795196, abs=1e-6)
        assert g.half_width >= 0.3 * math.pi / 6  # holds for lam <= 1/3

    def test_half_lambda_degenerates(self):
        assert all(g.half_width == 0.0 for g in gaps(0.5, 3))

    def test_counts_and_disjointness_per_level(self):
        lam = 0.3
        all_gaps = gaps(lam, 8)
        by_level = {}
        for g in all_gaps:
            by_level.setdefault(g.level, []).append(g)
        for level, items in by_level.items():
            assert len(items) == 2 ** (level - 1)
            items.sort(key=lambda g: g.center)
            for a, b in zip(items, items[1:]):
                assert a.hi < b.lo

    def test_no_series_value_inside_any_gap(self):
        lam = 0.3
        all_gaps = gaps(lam, 6)
        for signs in itertools.product((1, -1), repeat=10):
            assert not in_any_gap(SignSeries(signs, lam).value, all_gaps)


class TestPeriodicAngle:
    def test_all_plus_is_theta_star(self):
        assert periodic_angle((1, 1, 1), 0.3) == pytest.approx(
            period3(0.3)[0].theta_star, abs=1e-15
        )
        assert periodic_angle((1, 1, 1), 0.3) == pytest.approx(0.2416610, abs=1e-6)

    def test_sign_symmetry(self):
        for lam in (0.2, 0.4):
            assert periodic_angle((-1, -1, -1), lam) == pytest.approx(
                -periodic_angle((1, 1, 1), lam), abs=1e-15
            )

    def test_mixed_word_example(self):
        th = periodic_angle((1, 1, -1, -1), 0.3)
        assert th == pytest.approx(-0.2017540, abs=1e-5)

    def test_fixed_point_property(self, rng):
        for _ in range(100):
            lam = rng.uniform(0.05, 0.9)
            m = int(rng.integers(3, 9))
            word = tuple(int(v) for v in rng.choice((-1, 1), size=m))
            th = periodic_angle(word, lam)
            out = th
            for w in word:
                out = phi(w, out, lam)
            assert out == pytest.approx(th, abs=1e-13)

    def test_word_too_short(self):
        with pytest.raises(WordTooShort):
            periodic_angle((1, 1), 0.3)

    def test_decoded_code_is_word_with_alternating_flips(self, rng):
        # the angle's sign series repeats the reversed word, flipping sign
        # every term: code_n = (-1)^(n-1) * w[m - ((n-1) mod m)]
        from tripinball import decode_angle

        lam = 0.3
        for _ in range(30):
            m = int(rng.integers(3, 7))
            word = tuple(int(v) for v in rng.choice((-1, 1), size=m))
            th = periodic_angle(word, lam)
            depth = 2 * m
            expect = tuple(
                (-1) ** n * word[m - 1 - (n % m)] for n in range(depth)
            )
            assert decode_angle(th, lam, depth).signs == expect


class TestPeriod3:
    def test_reference_values(self):
        orbit = period3(0.5)[0]
        assert orbit.theta_star == pytest.approx(math.pi / 9, abs=1e-15)
        assert orbit.s3 == pytest.approx(0.5509012, abs=1e-6)

    def test_limits(self):
        small = period3(1e-9)[0]
        assert small.theta_star == pytest.approx(0.0, abs=1e-8)
        assert small.s3 == pytest.approx(2.0 / 3.0, abs=1e-8)
        elastic = period3(1.0)[0]
        assert elastic.theta_star == pytest.approx(math.pi / 6, abs=1e-15)
        assert elastic.s3 == pytest.approx(0.5, abs=1e-15)

    def test_mirror_orbit_closes(self):
        for lam in (0.2, 0.6, 0.9):
            rec = iterate(period3(lam)[1].phase_point, lam, 3)
            assert list(rec.signs) == [-1, -1, -1]
            assert rec.closure_residual() < 1e-10


class TestExpansionFactor:
    def test_period3_value_and_jacobian_agreement(self):
        from tripinball import jacobian_product

        lam = 0.5
        rec = iterate(period3(lam)[0].phase_point, lam, 3)
        mu = expansion_factor(rec, lam)
        eta = math.pi / 3 / (1 + lam)
        assert rec.incomings[0] == pytest.approx(-eta, abs=1e-12)
        assert mu == pytest.approx(
            (math.cos(period3(lam)[0].theta_star) / math.cos(eta)) ** 3, abs=1e-12
        )
        assert mu == pytest.approx(abs(jacobian_product(rec, lam)[0, 0]), rel=1e-8)

    def test_greater_than_one_for_all_short_cycles(self):
        # the angle sequence is m-periodic even when the side index shifts,
        # so Eq-style expansion over one quotient period decides hyperbolicity
        lam = 0.3
        from tripinball.symbolic import DegenerateWord

        for m in (3, 4, 5, 6):
            for word in itertools.product((1, -1), repeat=m):
                try:
                    p, shift = periodic_orbit_from_word(word, lam)
                except DegenerateWord:
                    continue
                rec = iterate(p, lam, m)
                mu = math.prod(
                    math.cos(lam * e) / math.cos(e) for e in rec.incomings
                )
                assert mu > 1.0
                if shift == 0:
                    assert expansion_factor(rec, lam) == pytest.approx(mu, abs=1e-12)

    def test_elastic_period3_is_neutral(self):
        rec = iterate(period3(1.0)[0].phase_point, 1.0, 3)
        assert expansion_factor(rec, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_not_closed(self):
        rec = iterate(period3(0.5)[0].phase_point, 0.5, 2)
        with pytest.raises(NotClosed):
            expansion_factor(rec, 0.5)
