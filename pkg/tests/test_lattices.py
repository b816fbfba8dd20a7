"""Lattice core: volumes, duals, Construction A, enumeration, decoding,
coset labels.  Expected counts come from direct combinatorial oracles,
not from the enumerator under test."""

from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from latsec import exact
from latsec.lattices import (
    BinaryCode,
    CosetLabeling,
    EnumerationBudgetError,
    Lattice,
    NotASublatticeError,
    UnsupportedQuotientError,
    UnsupportedRankError,
    catalog,
    checkerboard_lattice,
    closest_point,
    construction_a,
    coset_label,
    enumerate_points,
    enumerate_shells,
    gosset_lattice,
    gosset_lattice_standard_basis,
    integer_lattice,
    l8_lattice,
    lattice_from_json,
    lattice_to_json,
    min_norm_and_kissing,
    parity_check_code,
    reed_muller_8_4_4,
    repetition_code,
    tower_code,
    universe_code,
)


def brute_force_ca_shells(code: BinaryCode, radius2: int) -> Counter:
    """Independent count of points of (code + 2Z^n) with norm <= radius2:
    loop codewords and bounded even shifts coordinate by coordinate."""
    n = code.length
    counts = Counter()
    bound = int(np.ceil(np.sqrt(radius2)))
    for cw in code.codewords():
        # per-coordinate possible values and their squares
        per_coord = []
        for c in cw:
            vals = [v for v in range(-bound - 2, bound + 3) if (v - c) % 2 == 0]
            per_coord.append(vals)

        def walk(i, acc):
            if acc > radius2:
                return
            if i == n:
                counts[acc] += 1
                return
            for v in per_coord[i]:
                walk(i + 1, acc + v * v)

        walk(0, 0)
    return counts


class TestBinaryCode:
    def test_params_of_standard_codes(self):
        assert universe_code(2).params() == (2, 2, 1)
        assert parity_check_code(4).params() == (4, 3, 2)
        assert repetition_code(2).params() == (2, 1, 2)
        assert reed_muller_8_4_4().params() == (8, 4, 4)

    def test_rank_validation(self):
        with pytest.raises(ValueError):
            BinaryCode(3, ((1, 0, 1), (1, 0, 1)))

    def test_dual_code(self):
        rm = reed_muller_8_4_4()
        dual = rm.dual()
        assert dual.kappa == 4
        for c in rm.codewords():
            for d in dual.codewords():
                assert sum(a * b for a, b in zip(c, d)) % 2 == 0

    def test_json_round_trip(self):
        c = parity_check_code(4)
        blob = c.to_json()
        back = BinaryCode.from_json(blob)
        assert set(back.codewords()) == set(c.codewords())


class TestVolumesAndDuals:
    def test_volume_examples(self):
        assert integer_lattice(5).volume == 1
        assert checkerboard_lattice(4).volume == 2
        assert gosset_lattice().volume == 1

    def test_construction_a_volume(self):
        for code in (universe_code(2), parity_check_code(4), tower_code(5), reed_muller_8_4_4()):
            lat = construction_a(code)
            assert lat.volume == 2 ** (code.length - code.kappa)

    def test_dual_of_integer_lattice_is_itself(self):
        z3 = integer_lattice(3)
        assert z3.dual().gram == z3.gram

    def test_dual_volume_inverse(self):
        d4 = checkerboard_lattice(4)
        assert d4.dual().volume_squared == 1 / d4.volume_squared

    def test_double_dual_gram_exact(self):
        for lat in (checkerboard_lattice(4), gosset_lattice(), l8_lattice()):
            assert lat.dual().dual().gram == lat.gram

    def test_dual_requires_square(self):
        rect = Lattice(exact.frac_matrix([[1, 0, 0], [0, 1, 0]]))
        with pytest.raises(UnsupportedRankError):
            rect.dual()

    def test_e8_self_dual_theta(self):
        e8 = gosset_lattice()
        assert enumerate_shells(e8, 20) == enumerate_shells(e8.dual(), 20)

    def test_e8_standard_basis_same_theta(self):
        assert enumerate_shells(gosset_lattice_standard_basis(), 16) == enumerate_shells(
            gosset_lattice(), 16
        )


class TestConstructionA:
    def test_universe_code_gives_integer_lattice(self):
        lat = construction_a(universe_code(2))
        assert lat.basis == integer_lattice(2).basis

    def test_repetition_gives_checkerboard(self):
        lat = construction_a(repetition_code(2))
        assert lat.volume == 2
        for p in enumerate_points(lat, 9):
            assert int(round(p.ambient.sum())) % 2 == 0
        shells = enumerate_shells(lat, 4)
        assert shells[Fraction(2)] == 4  # (+-1, +-1)

    def test_reed_muller_shells_match_brute_force(self):
        code = reed_muller_8_4_4()
        lat = construction_a(code)
        oracle = brute_force_ca_shells(code, 8)
        shells = enumerate_shells(lat, 8)
        assert {int(k): v for k, v in shells.items()} == dict(oracle)
        assert shells[Fraction(4)] == 240

    def test_parity_checks_match_brute_force(self):
        code = parity_check_code(4)
        oracle = brute_force_ca_shells(code, 6)
        shells = enumerate_shells(construction_a(code), 6)
        assert {int(k): v for k, v in shells.items()} == dict(oracle)


class TestEnumeration:
    def test_z1_radius_1(self):
        pts = enumerate_points(integer_lattice(1), 1)
        assert [p.coords for p in pts] == [(-1,), (0,), (1,)]

    def test_e8_241_points(self):
        assert len(enumerate_points(gosset_lattice(), 2)) == 241

    def test_d4_25_points(self):
        assert len(enumerate_points(checkerboard_lattice(4), 2)) == 25

    def test_includes_origin_and_negation_symmetric(self):
        for lat in (checkerboard_lattice(2), l8_lattice(), checkerboard_lattice(4).dual()):
            pts = {p.coords for p in enumerate_points(lat, 5)}
            assert tuple([0] * lat.dim) in pts
            assert all(tuple(-x for x in c) in pts for c in pts)

    def test_sorted_output(self):
        pts = [p.coords for p in enumerate_points(checkerboard_lattice(4), 6)]
        assert pts == sorted(pts)

    def test_shells_match_point_histogram(self):
        # the dual is dense (volume 1/8), so its radius is kept small
        cases = [
            (integer_lattice(3), 7),
            (checkerboard_lattice(4), 7),
            (gosset_lattice(), 7),
            (l8_lattice().dual(), 3),
        ]
        for lat, radius in cases:
            hist = Counter(p.norm2 for p in enumerate_points(lat, radius))
            assert dict(hist) == enumerate_shells(lat, radius)

    def test_budget_error(self):
        with pytest.raises(EnumerationBudgetError):
            enumerate_points(integer_lattice(8), 30, cap=1000)

    def test_min_norm_and_kissing(self):
        assert min_norm_and_kissing(gosset_lattice()) == (2, 240)
        assert min_norm_and_kissing(checkerboard_lattice(4)) == (2, 24)
        assert min_norm_and_kissing(integer_lattice(80)) == (1, 160)
        # four weight-2 codewords, each lifting to 4 sign patterns
        assert min_norm_and_kissing(l8_lattice()) == (2, 16)


class TestClosestPoint:
    def test_rounding_examples(self):
        assert closest_point(integer_lattice(2), [0.4, -0.6]).coords == (0, -1)

    def test_d2_example_against_small_brute_force(self):
        d2 = checkerboard_lattice(2)
        target = np.array([0.9, 0.9])
        # oracle: the nine candidates around the target
        best = None
        for a in (-2, 0, 2):
            for b in (-2, 0, 2):
                for c in ((0, 0), (1, 1)):
                    pt = np.array([a + c[0], b + c[1]])
                    d = ((pt - target) ** 2).sum()
                    if best is None or d < best[0]:
                        best = (d, tuple(pt))
        got = closest_point(d2, target)
        assert tuple(got.ambient) == best[1] == (1.0, 1.0)

    def test_unique_decoding_within_packing_radius(self):
        e8 = gosset_lattice()
        rng = np.random.default_rng(0)
        for _ in range(50):
            u = tuple(int(v) for v in rng.integers(-3, 4, size=8))
            x = e8.point(u)
            eps = rng.normal(size=8)
            eps *= rng.uniform(0.05, 0.99) * (1 / np.sqrt(2)) / np.linalg.norm(eps)
            assert closest_point(e8, x.ambient + eps).coords == u

    @pytest.mark.parametrize("lat_name", ["Z2", "D2", "D4", "D4*", "Z4"])
    def test_matches_exhaustive_search_dims_leq_4(self, lat_name):
        base = {
            "Z2": integer_lattice(2),
            "D2": checkerboard_lattice(2),
            "D4": checkerboard_lattice(4),
            "D4*": checkerboard_lattice(4).dual(),
            "Z4": integer_lattice(4),
        }[lat_name]
        rng = np.random.default_rng(42)
        # 1000 random targets against a cached exhaustive point list
        r_max = 3.0
        pts = np.array([p.ambient for p in enumerate_points(base, (r_max + 2.5) ** 2)])
        for _ in range(1000):
            y = rng.uniform(-r_max / 2, r_max / 2, size=base.dim)
            got = closest_point(base, y)
            dists = ((pts - y) ** 2).sum(axis=1)
            assert abs(((got.ambient - y) ** 2).sum() - dists.min()) < 1e-9

    def test_tie_break_is_lexicographic(self):
        z1 = integer_lattice(1)
        assert closest_point(z1, [0.5]).coords == (0,)
        assert closest_point(z1, [-0.5]).coords == (-1,)


class TestCosetLabels:
    def test_z2_mod_2z2(self):
        z2 = integer_lattice(2)
        lab = CosetLabeling(z2, z2.scaled_pow2(2))
        assert lab.size == 4 and lab.k == 2
        assert lab.label_coords((2, 3)) == lab.label_coords((0, 1))
        assert lab.label_coords((0, 0)) == 0
        labels = {lab.label_coords((a, b)) for a in range(2) for b in range(2)}
        assert labels == {0, 1, 2, 3}

    def test_label_constant_on_cosets(self):
        z2 = integer_lattice(2)
        coarse = z2.scaled_pow2(2)
        lab = CosetLabeling(z2, coarse)
        rng = np.random.default_rng(1)
        for _ in range(200):
            u = rng.integers(-6, 7, size=2)
            t = 2 * rng.integers(-4, 5, size=2)
            assert lab.label_coords(tuple(u)) == lab.label_coords(tuple(u + t))

    def test_e8_mod_2e8_size(self):
        e8 = gosset_lattice()
        lab = CosetLabeling(e8, e8.scaled_pow2(2))
        assert lab.size == 256
        # coords_for_label inverts label_coords
        for label in (0, 1, 17, 255):
            assert lab.label_coords(lab.coords_for_label(label)) == label

    def test_non_sublattice_rejected(self):
        z2 = integer_lattice(2)
        shifted = Lattice(exact.frac_matrix([[1, Fraction(1, 2)], [0, 1]]))
        with pytest.raises(NotASublatticeError):
            coset_label(z2, shifted, (0, 0))
        with pytest.raises(NotASublatticeError):
            # odd scale difference can never embed integrally
            CosetLabeling(z2, z2.scaled_pow2(1))

    def test_non_power_of_two_rejected(self):
        z1 = integer_lattice(1)
        three = Lattice(exact.frac_matrix([[3]]))
        with pytest.raises(UnsupportedQuotientError):
            CosetLabeling(z1, three)

    def test_chain_member_containment(self):
        # the sublattice direction must hold, the reverse must fail
        e8 = gosset_lattice()
        with pytest.raises(NotASublatticeError):
            CosetLabeling(e8.scaled_pow2(2), e8)


class TestLatticePoint:
    def test_ambient_reconstruction(self):
        d4 = checkerboard_lattice(4)
        p = d4.point((1, -2, 0, 3))
        expect = np.array([float(sum(Fraction(c) * d4.basis[i][j] for i, c in enumerate(p.coords)))
                           for j in range(4)])
        assert np.allclose(p.ambient, expect, atol=0)
        assert p.norm2 == Fraction(int((expect ** 2).sum()))

    def test_addition_same_lattice_only(self):
        z2 = integer_lattice(2)
        assert (z2.point((1, 0)) + z2.point((0, 2))).coords == (1, 2)
        with pytest.raises(ValueError):
            z2.point((1, 0)) + integer_lattice(3).point((0, 0, 0))


class TestCatalogJson:
    def test_catalog_names(self):
        cat = catalog()
        assert {"Z1", "Z8", "D2", "D4", "D8", "E8", "L8", "D4^2"} <= set(cat)

    def test_lattice_json_round_trip(self):
        e8 = gosset_lattice()
        back = lattice_from_json(lattice_to_json(e8))
        assert back.basis == e8.basis and back.scale2 == e8.scale2

    def test_integral_catalog_lattices_have_integer_gram(self):
        for name in ("Z4", "D4", "D8", "E8", "L8"):
            lat = catalog()[name]
            for row in lat.gram:
                for x in row:
                    assert x.denominator == 1, name


    def test_catalog_file_loader(self, tmp_path):
        import json
        from latsec.lattices import load_catalog_file

        blob = {"lattices": [lattice_to_json(gosset_lattice()),
                             lattice_to_json(checkerboard_lattice(2))]}
        path = tmp_path / "cat.json"
        path.write_text(json.dumps(blob))
        cat = load_catalog_file(path)
        assert cat["E8"].gram == gosset_lattice().gram
        assert enumerate_shells(cat["D2"], 4) == enumerate_shells(checkerboard_lattice(2), 4)
