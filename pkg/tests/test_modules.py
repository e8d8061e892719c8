import itertools
import math
import random
from fractions import Fraction

import pytest

from latrank import (
    PowerProduct,
    denominator,
    echelon_of_module,
    enumerate_primitive_modules,
    lambda_of,
    matrices_with_rows,
    okn_lattice,
    schmidt_count,
    to_echelon,
)
from latrank.modules import (
    jacobian,
    matrix_module_index,
    rank_factorize,
)
from latrank.zlattice import direct_sum, is_primitive_in


class TestToEchelon:
    def test_identity(self, QQ):
        D = to_echelon(QQ, [[1, 0], [0, 1]])
        assert D.pivot_cols == (0, 1)
        assert D.rows[0][0] == QQ.one()

    def test_row_scaling(self, QQ):
        D = to_echelon(QQ, [[2, 1]])
        assert D.rows[0][1] == QQ.coerce(Fraction(1, 2))

    def test_gaussian_elimination(self, Qi):
        i = Qi.gen()
        D = to_echelon(Qi, [[Qi.one(), Qi.one()], [Qi.zero(), i]])
        assert D.rows[0][1].is_zero()
        assert D.rows[1][1] == Qi.one()

    def test_rank_deficient_rejected(self, QQ):
        with pytest.raises(ValueError):
            to_echelon(QQ, [[1, 2], [2, 4]])

    def test_canonical_under_basis_change(self, QQ, Qi):
        rng = random.Random(4)
        for K in (QQ, Qi):
            base = [[K.coerce(1), K.coerce(2), K.coerce(Fraction(1, 3))],
                    [K.coerce(0), K.coerce(1), K.coerce(5)]]
            D = to_echelon(K, base)
            for _ in range(5):
                # left-multiply by a random invertible 2x2 over K
                while True:
                    g = [[K.coerce(rng.randint(-3, 3)) for _ in range(2)] for _ in range(2)]
                    det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
                    if not det.is_zero():
                        break
                mixed = [
                    [g[r][0] * base[0][c] + g[r][1] * base[1][c] for c in range(3)]
                    for r in range(2)
                ]
                D2 = to_echelon(K, mixed)
                assert D2.key() == D.key()


class TestLambdaAndDenominator:
    def test_half_vector(self, QQ):
        D = to_echelon(QQ, [[1, Fraction(1, 2)]])
        P = lambda_of(D)
        assert P.denominator == 2
        assert P.height_sq == PowerProduct.coerce(5)
        row = [abs(int(x)) for x in P.lattice.basis[0]]
        assert row == [2, 1]

    def test_pivot_only(self, QQ):
        D = to_echelon(QQ, [[1, 0]])
        P = lambda_of(D)
        assert P.denominator == 1
        assert P.height == 1.0

    def test_denominator_k2_m3(self, QQ):
        D = to_echelon(QQ, [[1, 0, Fraction(1, 2)], [0, 1, Fraction(1, 3)]])
        assert denominator(D) == 6

    def test_denominator_brute_force_oracle(self, QQ):
        # count residues v mod q with v D integral (k = 2, m = 3)
        D = to_echelon(QQ, [[1, 0, Fraction(1, 2)], [0, 1, Fraction(1, 3)]])
        q = 6
        good = 0
        for v in itertools.product(range(q), repeat=2):
            img = [v[0], v[1], Fraction(v[0], 2) + Fraction(v[1], 3)]
            if all(Fraction(x).denominator == 1 for x in img):
                good += 1
        assert denominator(D) == q ** 2 // good

    def test_gaussian_denominator(self, Qi):
        i = Qi.gen()
        D = to_echelon(Qi, [[Qi.one(), (Qi.one() + i) / 2]])
        P = lambda_of(D)
        assert P.denominator == 2
        # brute-force oracle: residues of O_K mod 2 with v*D integral
        good = 0
        for a, b in itertools.product(range(2), repeat=2):
            v = Qi.element([a, b])
            if Qi.is_integral(v * D.rows[0][1]):
                good += 1
        assert P.denominator == 4 // good

    def test_lattice_is_primitive_and_stable(self, QQ, Qi):
        for K, entry in ((QQ, Fraction(1, 2)), (Qi, Fraction(1, 2))):
            D = to_echelon(K, [[K.one(), K.coerce(entry)]])
            P = lambda_of(D)
            amb = okn_lattice(K, 2)
            assert is_primitive_in(P.lattice, amb)


class TestTrijection:
    def test_round_trip_simple(self, QQ):
        D = to_echelon(QQ, [[1, Fraction(1, 2)]])
        P = lambda_of(D)
        assert echelon_of_module(P.lattice).key() == D.key()

    def test_round_trip_pivot(self, QQ):
        D = to_echelon(QQ, [[1, 0]])
        P = lambda_of(D)
        assert echelon_of_module(P.lattice).key() == D.key()

    def test_round_trip_all_enumerated(self, QQ, Qi):
        for K, bound in ((QQ, 5), (Qi, 2)):
            for P in enumerate_primitive_modules(K, 1, 2, bound):
                assert echelon_of_module(P.lattice).key() == P.echelon.key()

    def test_round_trip_rank2(self, QQ):
        for P in enumerate_primitive_modules(QQ, 2, 3, 3):
            assert echelon_of_module(P.lattice).key() == P.echelon.key()

    def test_non_primitive_rejected(self, QQ):
        from latrank.zlattice import Ambient, ZLattice

        amb = Ambient.for_field(QQ, 2)
        L = ZLattice([[2, 0]], amb, ok_module=True)
        with pytest.raises(ValueError):
            echelon_of_module(L)


class TestEnumeration:
    def test_bound_two(self, QQ):
        mods = enumerate_primitive_modules(QQ, 1, 2, 2)
        assert len(mods) == 4
        keys = {tuple(float(x.coords[0]) for x in P.echelon.rows[0]) for P in mods}
        assert keys == {(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0)}

    def test_bound_one(self, QQ):
        assert schmidt_count(QQ, 1, 2, 1) == 2

    def test_full_rank_single_module(self, QQ):
        mods = enumerate_primitive_modules(QQ, 2, 2, 7)
        assert len(mods) == 1
        assert mods[0].height == 1.0

    def test_heights_sorted_and_below_bound(self, QQ):
        mods = enumerate_primitive_modules(QQ, 1, 2, 10)
        hs = [P.height for P in mods]
        assert hs == sorted(hs)
        assert all(h <= 10 + 1e-9 for h in hs)

    def test_brute_force_count(self, QQ):
        # primitive pairs (a, b) with a^2 + b^2 <= T^2, up to sign
        for T in (5, 10):
            expect = 0
            for a in range(-T, T + 1):
                for b in range(-T, T + 1):
                    if (a, b) != (0, 0) and a * a + b * b <= T * T \
                            and math.gcd(abs(a), abs(b)) == 1:
                        expect += 1
            assert schmidt_count(QQ, 1, 2, T) == expect // 2

    def test_growth_window(self, QQ):
        counts = {T: schmidt_count(QQ, 1, 2, T) for T in (5, 10, 20, 40)}
        for T in (5, 10, 20):
            ratio = counts[2 * T] / counts[T]
            assert 2 <= ratio <= 8

    def test_rank2_m3_against_direct_check(self, QQ):
        # every enumerated module is primitive, stable, and within the bound;
        # moreover distinct keys give distinct lattices
        mods = enumerate_primitive_modules(QQ, 2, 3, 2)
        amb = okn_lattice(QQ, 3)
        seen = set()
        for P in mods:
            assert P.height <= 2 + 1e-9
            assert is_primitive_in(P.lattice, amb)
            key = P.echelon.key()
            assert key not in seen
            seen.add(key)
        assert len(mods) >= 6   # at least all pivot-pair modules with H = 1


class TestMatricesWithRows:
    def test_n1_matches_short_vectors(self, QQ):
        from latrank.zlattice import short_vectors

        D = to_echelon(QQ, [[1, Fraction(1, 2)]])
        P = lambda_of(D)
        mats = matrices_with_rows(1, P, 3)
        assert len(mats) == len(short_vectors(P.lattice, 3))

    def test_nine_matrices(self, QQ):
        D = to_echelon(QQ, [[1, Fraction(1, 2)]])
        P = lambda_of(D)
        mats = matrices_with_rows(2, P, PowerProduct.coerce(10).sqrt())
        assert len(mats) == 9

    def test_below_min_norm_only_zero(self, QQ):
        D = to_echelon(QQ, [[1, Fraction(1, 2)]])
        P = lambda_of(D)
        mats = matrices_with_rows(2, P, 1)
        assert len(mats) == 1
        assert all(x.is_zero() for rows in mats for row in rows for x in row)


class TestIdentities:
    def test_index_identity(self, QQ, Qi):
        cases = [
            (QQ, [[1, Fraction(1, 2)]]),
            (QQ, [[1, Fraction(2, 3)]]),
            (QQ, [[1, 0, Fraction(1, 2)], [0, 1, Fraction(1, 3)]]),
        ]
        for K, rows in cases:
            D = to_echelon(K, rows)
            dd = denominator(D)
            for n in (1, 2):
                assert matrix_module_index(D, n) == dd ** n
        i = Qi.gen()
        D = to_echelon(Qi, [[Qi.one(), (Qi.one() + i) / 2]])
        for n in (1, 2):
            assert matrix_module_index(D, n) == denominator(D) ** n

    def test_height_power_law(self, QQ, Qi):
        for K, rows in ((QQ, [[1, Fraction(1, 2)]]), (Qi, [[1, Fraction(1, 2)]])):
            D = to_echelon(K, rows)
            P = lambda_of(D)
            for n in (1, 2, 3):
                stacked = direct_sum(P.lattice, n)
                assert abs(stacked.height() - P.height ** n) < 1e-10
                assert stacked.height_sq() == P.height_sq ** n

    def test_jacobian_identity(self, QQ, Qi, Qs5):
        cases = [
            (QQ, [[1, Fraction(1, 2)]]),
            (QQ, [[1, Fraction(3, 4), Fraction(1, 5)]]),
            (QQ, [[1, 0, Fraction(1, 2)], [0, 1, Fraction(1, 3)]]),
            (Qi, [[1, Fraction(1, 2)]]),
            (Qs5, [[1, Fraction(1, 2)]]),
        ]
        for K, rows in cases:
            D = to_echelon(K, rows)
            P = lambda_of(D)
            assert abs(P.denominator * jacobian(D) - P.height) < 1e-10

    def test_invariants_under_basis_choice(self, QQ):
        rows = [[QQ.coerce(2), QQ.coerce(1), QQ.coerce(4)],
                [QQ.coerce(0), QQ.coerce(3), QQ.coerce(1)]]
        D1 = to_echelon(QQ, rows)
        mixed = [[rows[0][c] + rows[1][c] for c in range(3)],
                 [rows[1][c] - QQ.coerce(2) * rows[0][c] for c in range(3)]]
        D2 = to_echelon(QQ, mixed)
        assert D1.key() == D2.key()
        assert denominator(D1) == denominator(D2)
        assert lambda_of(D1).height == lambda_of(D2).height


class TestRankFactorize:
    def test_rank_one(self, QQ):
        C, D = rank_factorize(QQ, [[2, 1], [4, 2], [6, 3]])
        assert [x.coords[0] for row in C for x in row] == [2, 4, 6]
        assert D.rows[0][1] == QQ.coerce(Fraction(1, 2))

    def test_identity(self, QQ):
        C, D = rank_factorize(QQ, [[1, 0], [0, 1]])
        assert D.pivot_cols == (0, 1)

    def test_multiply_back_random(self, QQ, Qi):
        rng = random.Random(8)
        for K in (QQ, Qi):
            for _ in range(20):
                rows = [[K.coerce(rng.randint(-4, 4)) for _ in range(3)] for _ in range(3)]
                from latrank.numfield import kmat_mul, rank_over_K

                if rank_over_K(rows) == 0:
                    continue
                C, D = rank_factorize(K, rows)
                back = kmat_mul(C, [list(r) for r in D.rows])
                assert all(back[i][j] == rows[i][j] for i in range(3) for j in range(3))

    def test_zero_matrix_rejected(self, QQ):
        with pytest.raises(ValueError):
            rank_factorize(QQ, [[0, 0], [0, 0]])

    def test_integral_rows_lie_in_module(self, QQ):
        A = [[2, 1], [4, 2], [6, 3]]
        C, D = rank_factorize(QQ, A)
        P = lambda_of(D)
        for row in A:
            assert P.lattice.contains([Fraction(x) for x in row])
