"""Coset codes, rates, the nested 8-dimensional chain, and the multilevel
encoders and multistage decoder."""

import math
from fractions import Fraction

import numpy as np
import pytest

from latsec.coding import (
    NestedChain8,
    RandomBitRate,
    RatePlan,
    build_coset_code,
    coset_decode,
    coset_labels_per_level,
    encode,
    gsnr,
    label_to_bits,
    load_code_tower_asset,
    multilevel_decode,
    multilevel_decode_batch,
    multilevel_encode,
    multilevel_encode_batch,
    operating_point,
    random_bit_rate,
    _shaping_lattice,
)
from latsec.lattices import (
    CosetLabeling,
    Lattice,
    checkerboard_lattice,
    closest_point,
    construction_a,
    enumerate_shells,
    gosset_lattice,
    integer_lattice,
    nested_code_tower_matrix,
    tower_code,
)


class FixedRng:
    def __init__(self, vals):
        self.vals = np.asarray(vals)

    def integers(self, lo, hi, size):
        return self.vals


def direct_sum(a: Lattice, b: Lattice) -> Lattice:
    """Block-diagonal direct sum (used as an independent product oracle)."""
    assert a.scale2 == b.scale2
    na, nb = a.dim, b.dim
    rows = []
    for r in a.basis:
        rows.append(tuple(r) + tuple(Fraction(0) for _ in range(nb)))
    for r in b.basis:
        rows.append(tuple(Fraction(0) for _ in range(na)) + tuple(r))
    return Lattice(rows, a.scale2)


class TestCodeTower:
    def test_asset_matches_module_matrix(self):
        asset = load_code_tower_asset()
        assert asset["schema_version"] == 1
        assert tuple(tuple(r) for r in asset["G"]) == nested_code_tower_matrix()

    def test_code_parameters(self):
        expected = {8: 1, 7: 2, 6: 2, 5: 2, 4: 4, 3: 4, 2: 4, 1: 8}
        for kappa, d in expected.items():
            assert tower_code(kappa).params() == (8, kappa, d)

    def test_codes_are_nested(self):
        for k in range(1, 8):
            small = set(tower_code(k).codewords())
            big = set(tower_code(k + 1).codewords())
            assert small < big

    def test_duality_relations_of_the_tower(self):
        # (8,3) is the dual of (8,5); (8,1) the dual of (8,7); (8,2) of (8,6)
        for k in (1, 2, 3):
            dual = set(tower_code(8 - k).dual().codewords())
            assert set(tower_code(k).codewords()) == dual

    def test_rm_code_is_self_dual(self):
        rm = tower_code(4)
        assert set(rm.codewords()) == set(rm.dual().codewords())


class TestTableCorrespondence:
    """Mod-2 constructions of the tower codes give the advertised lattices
    (theta coefficients compared up to squared norm 8)."""

    def test_universe_is_integer_lattice(self):
        assert construction_a(tower_code(8)).basis == integer_lattice(8).basis

    def test_d8_from_tower_and_parity_agree(self):
        from latsec.lattices import parity_check_code

        a = construction_a(tower_code(7))
        b = construction_a(parity_check_code(8))
        assert a.basis == b.basis  # canonical form of the same lattice

    def test_d4_squared(self):
        lat = construction_a(tower_code(6))
        d4 = checkerboard_lattice(4)
        oracle = direct_sum(d4, d4)
        assert enumerate_shells(lat, 8) == enumerate_shells(oracle, 8)

    def test_sqrt2_e8(self):
        lat = construction_a(tower_code(4))
        e8 = gosset_lattice().scaled_pow2(1)  # sqrt(2) E8
        assert enumerate_shells(lat, 8) == enumerate_shells(e8, 8)

    def test_doubled_dual_of_l8(self):
        lat = construction_a(tower_code(3))
        oracle = construction_a(tower_code(5)).dual().scaled_pow2(2)  # 2 L8*
        assert enumerate_shells(lat, 8) == enumerate_shells(oracle, 8)

    def test_doubled_dual_of_d8(self):
        lat = construction_a(tower_code(1))
        oracle = construction_a(tower_code(7)).dual().scaled_pow2(2)
        assert enumerate_shells(lat, 8) == enumerate_shells(oracle, 8)

    def test_doubled_dual_of_d4_squared(self):
        lat = construction_a(tower_code(2))
        d4d = checkerboard_lattice(4).dual().scaled_pow2(2)
        oracle = direct_sum(d4d, d4d)
        assert enumerate_shells(lat, 8) == enumerate_shells(oracle, 8)


class TestNestedChain:
    def test_nine_members_all_index_two(self):
        chain = NestedChain8.build()
        assert len(chain.lattices) == 9
        assert chain.indices() == [2] * 8

    def test_total_index_is_256(self):
        chain = NestedChain8.build()
        lab = CosetLabeling(chain.lattices[0], chain.lattices[-1])
        assert lab.size == 256

    def test_endpoints_are_scaled_gosset(self):
        chain = NestedChain8.build()
        e8 = gosset_lattice()
        assert enumerate_shells(chain.lattices[0], 4) == enumerate_shells(
            e8.scaled_pow2(-1), 4
        )
        assert enumerate_shells(chain.lattices[-1], 8) == enumerate_shells(
            e8.scaled_pow2(1), 8
        )

    def test_middle_is_integer_lattice(self):
        chain = NestedChain8.build()
        assert chain.lattices[4].basis == integer_lattice(8).basis


class TestCosetCodes:
    def test_z2_leaders(self):
        z2 = integer_lattice(2)
        code = build_coset_code(z2, z2.scaled_pow2(2))
        assert code.k == 2
        leaders = sorted(tuple(map(abs, map(int, r.ambient))) for r in code.representatives)
        assert leaders == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_leaders_have_minimal_norm_in_coset(self):
        z2 = integer_lattice(2)
        code = build_coset_code(z2, z2.scaled_pow2(2))
        for rep in code.representatives:
            x = rep.ambient
            for da in (-2, 0, 2):
                for db in (-2, 0, 2):
                    other = x + np.array([da, db])
                    assert (x ** 2).sum() <= (other ** 2).sum() + 1e-12

    def test_trivial_pair_single_coset(self):
        d4 = checkerboard_lattice(4)
        code = build_coset_code(d4, d4)
        assert code.k == 0
        assert tuple(code.representatives[0].coords) == (0, 0, 0, 0)

    def test_paper_example_encode(self):
        z2 = integer_lattice(2)
        code = build_coset_code(z2, z2.scaled_pow2(2))
        # the coset of (0,1), dithered by the coarse point (2,2)
        label = code.label_of(closest_point(z2, [0.0, 1.0]))
        bits = label_to_bits(label, 2)
        pt = encode(code, bits, FixedRng([1, 1]))
        assert tuple(pt.ambient) == (2.0, 3.0)

    def test_zero_message_zero_dither(self):
        z2 = integer_lattice(2)
        code = build_coset_code(z2, z2.scaled_pow2(2))
        pt = encode(code, label_to_bits(code.label_of((0, 0)), 2), FixedRng([0, 0]))
        assert tuple(pt.ambient) == (0.0, 0.0)

    def test_encode_label_round_trip_random(self):
        rng = np.random.default_rng(123)
        z2 = integer_lattice(2)
        code = build_coset_code(z2, z2.scaled_pow2(2))
        for _ in range(1000):
            bits = tuple(int(b) for b in rng.integers(0, 2, size=2))
            x = encode(code, bits, rng)
            assert label_to_bits(code.label_of(x), 2) == bits

    def test_e8_all_messages_round_trip(self):
        e8 = gosset_lattice()
        code = build_coset_code(e8, e8.scaled_pow2(2))
        rng = np.random.default_rng(5)
        for label in range(256):
            bits = label_to_bits(label, 8)
            x = encode(code, bits, rng)
            assert code.label_of(x) == label
            assert coset_decode(code, x.ambient) == bits

    def test_decode_within_packing_radius(self):
        z2 = integer_lattice(2)
        code = build_coset_code(z2, z2.scaled_pow2(2))
        rng = np.random.default_rng(17)
        for _ in range(300):
            bits = tuple(int(b) for b in rng.integers(0, 2, size=2))
            x = encode(code, bits, rng)
            eps = rng.uniform(-0.49, 0.49, size=2)
            assert coset_decode(code, x.ambient + eps) == bits

    def test_rounding_oracle_example(self):
        z2 = integer_lattice(2)
        code = build_coset_code(z2, z2.scaled_pow2(2))
        got = coset_decode(code, [1.9, 3.2])
        want = label_to_bits(code.label_of((2, 3)), 2)
        assert got == want

    def test_index_accounting(self):
        e8 = gosset_lattice()
        code = build_coset_code(e8, e8.scaled_pow2(2))
        ratio = code.coarse.volume_squared / code.fine.volume_squared
        assert code.k == math.log2(ratio) / 2 == 8


class TestRates:
    def test_rate_plan_accounting(self):
        plan = RatePlan.from_bits(n=8, k=8, r=16)
        assert plan.data_rate == 2.0 and plan.random_rate == 4.0
        assert plan.total_rate == 6.0
        assert plan.data_bits == 8 and plan.random_bits == 16

    def test_random_bit_rate_values(self):
        assert random_bit_rate(10.0).value == pytest.approx(0.67, abs=0.01)
        assert random_bit_rate(20.0).value == pytest.approx(4.00, abs=0.01)

    def test_random_bit_rate_clamp(self):
        breakeven = 10 * math.log10(2 * math.pi)
        assert random_bit_rate(breakeven).value == pytest.approx(0.0, abs=1e-12)
        low = random_bit_rate(0.0)
        assert low == RandomBitRate(0.0, True)

    def test_operating_point(self):
        e8 = gosset_lattice()
        for m in (0, 1, 2, 3):
            assert operating_point(e8.scaled_pow2(2 * m)) == pytest.approx(2.0 ** (-2 * m))
        assert operating_point(checkerboard_lattice(4)) == pytest.approx(2 ** -0.5)

    def test_gsnr(self):
        e8 = gosset_lattice()
        s = math.sqrt(1 / (2 * math.pi))
        assert gsnr(e8, s) == pytest.approx(1.0)
        assert gsnr(e8.scaled_pow2(2), s) == pytest.approx(4.0)

    def test_gsnr_operating_point_identity(self):
        # gsnr equals (1/(2 pi sigma^2)) / y_op for any lattice and noise
        rng = np.random.default_rng(2)
        for lat in (gosset_lattice(), checkerboard_lattice(4), integer_lattice(3)):
            for _ in range(5):
                sigma = float(rng.uniform(0.1, 2.0))
                lhs = gsnr(lat, sigma)
                rhs = (1 / (2 * math.pi * sigma**2)) / operating_point(lat)
                assert lhs == pytest.approx(rhs, rel=1e-12)


class TestMultilevel:
    def test_all_zero(self):
        assert tuple(multilevel_encode([0] * 8, "z8").ambient) == (0.0,) * 8

    def test_first_row(self):
        x = multilevel_encode([1, 0, 0, 0, 0, 0, 0, 0], "z8")
        assert tuple(int(v) for v in x.ambient) == (0, 0, 0, 0, 0, 0, 0, 1)

    def test_two_rows_with_f2_lift(self):
        # the two leading rows combine over F2 first, then lift
        x = multilevel_encode([1, 1, 0, 0, 0, 0, 0, 0], "z8")
        got = tuple(int(v) for v in x.ambient)
        assert got == (0, 0, 0, 1, 0, 0, 0, 0)
        # membership oracle: x lands in the coset of the first row mod D8
        d8 = construction_a(tower_code(7))
        lab = CosetLabeling(integer_lattice(8), d8)
        assert lab.label_coords(got) == lab.label_coords((0, 0, 0, 0, 0, 0, 0, 1))

    def test_level_chain_membership(self):
        # every encoded point lands in the coset chain its prefix selects
        rng = np.random.default_rng(31)
        z8 = integer_lattice(8)
        partials = [construction_a(tower_code(k)) for k in range(7, 0, -1)]
        g = nested_code_tower_matrix()
        for _ in range(25):
            bits = [int(b) for b in rng.integers(0, 2, size=8)]
            x = tuple(int(v) for v in multilevel_encode(bits, "z8").ambient)
            acc = np.zeros(8, dtype=int)
            for j in range(7):
                # subtracting the already-encoded prefix must leave a point
                # of the level-j sublattice
                acc = acc + bits[j] * np.array(g[j])
                lab = CosetLabeling(z8, partials[j])
                assert lab.label_coords(x) == lab.label_coords(tuple(acc)), (bits, j)

    def test_e8_zero_and_membership(self):
        assert tuple(multilevel_encode([0, 0, 0, 0], "e8").ambient) == (0.0,) * 8
        rm = set(tower_code(4).codewords())
        rng = np.random.default_rng(9)
        for _ in range(20):
            bits = [int(b) for b in rng.integers(0, 2, size=4)]
            pt = multilevel_encode(bits, "e8")
            frame = np.rint(pt.ambient * math.sqrt(2)).astype(int)
            assert tuple(frame % 2) in rm  # first level stays in the (8,4,4) code

    @pytest.mark.parametrize("chain", ["z8", "e8"])
    @pytest.mark.parametrize("l", [1, 2, 7, 8, 9, 16, 20, 24])
    def test_round_trip(self, chain, l):
        rng = np.random.default_rng(l * 7 + (chain == "e8"))
        bits = rng.integers(0, 2, size=(400, l))
        enc = multilevel_encode_batch(bits, chain)
        dec = multilevel_decode_batch(enc.astype(float), l, chain)
        assert (dec == bits).all()

    def test_round_trip_with_small_noise(self):
        rng = np.random.default_rng(77)
        bits = rng.integers(0, 2, size=(200, 8))
        enc = multilevel_encode_batch(bits, "z8").astype(float)
        noise = rng.uniform(-0.45, 0.45, size=enc.shape)
        dec = multilevel_decode_batch(enc + noise, 8, "z8")
        assert (dec == bits).all()

    def test_single_point_apis(self):
        bits = (1, 0, 1, 1, 0, 1)
        for chain in ("z8", "e8"):
            pt = multilevel_encode(bits, chain)
            assert multilevel_decode(pt.ambient, len(bits), chain) == bits

    def test_coset_labels_per_level(self):
        labels = coset_labels_per_level([1, 0, 1, 1], "e8")
        assert labels[0] == [0, 0, 0, 0, 1, 0, 1, 1]

    def test_shaping_after_reduction(self):
        # with mod-shaping reduction, the output is a minimum-norm member
        # of its coset of the shaping lattice (checked against neighbors)
        rng = np.random.default_rng(101)
        for l in (8, 11, 16):
            lam = _shaping_lattice(l)
            basis = lam.basis_true
            shifts = np.array(
                [v for v in np.ndindex((3,) * 8)], dtype=float
            ) - 1.0  # all {-1,0,1}^8 coordinate combinations
            neigh = shifts @ basis
            bits = rng.integers(0, 2, size=(12, l))
            enc = multilevel_encode_batch(bits, "z8", reduce_shaping=True)
            for row in enc:
                norms = ((row[None, :] - neigh) ** 2).sum(axis=1)
                assert (row.astype(float) ** 2).sum() <= norms.min() + 1e-9

    def test_shaping_reduction_preserves_bits(self):
        rng = np.random.default_rng(55)
        for l in (8, 11, 16):
            bits = rng.integers(0, 2, size=(100, l))
            enc = multilevel_encode_batch(bits, "z8", reduce_shaping=True)
            dec = multilevel_decode_batch(enc.astype(float), l, "z8", reduced=True)
            assert (dec == bits).all()

    def test_default_output_is_not_voronoi_reduced(self):
        # recorded behavior: the raw lift encoder leaves the shaping coset
        # unreduced (large coordinates stay), unlike the reduce flag
        bits = [1] * 16
        raw = multilevel_encode_batch(np.array([bits]), "z8")[0]
        red = multilevel_encode_batch(np.array([bits]), "z8", reduce_shaping=True)[0]
        assert (raw ** 2).sum() > (red ** 2).sum()

    def test_bit_error_rates_follow_protection_order(self):
        # noisier bits sit earlier in the block: empirical error rates
        # must not increase with the bit index (up to Monte Carlo slack)
        rng = np.random.default_rng(2024)
        trials = 6000
        sigma = 0.45
        bits = rng.integers(0, 2, size=(trials, 8))
        enc = multilevel_encode_batch(bits, "z8").astype(float)
        noisy = enc + rng.normal(0, sigma, size=enc.shape)
        dec = multilevel_decode_batch(noisy, 8, "z8")
        ber = (dec != bits).mean(axis=0)
        slack = 3 * np.sqrt(ber * (1 - ber) / trials + 1e-12)
        for j in range(7):
            assert ber[j] >= ber[j + 1] - (slack[j] + slack[j + 1]), ber
