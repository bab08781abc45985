import random

import numpy as np
import pytest

import lamptwist.finite as finite
from lamptwist import (
    BudgetExceeded,
    DescentError,
    FiniteAutomorphism,
    GroupParams,
    InvalidAutomorphism,
    Torsion,
    WreathAutomorphism,
    build_group,
    descend_automorphism,
    finite_reidemeister_automorphism,
    fixed_conjugacy_classes,
    identity_automorphism,
    inner_twists,
    twisted_classes,
    twisted_classes_unionfind,
    verify_projection,
    verify_restriction_bound,
    verify_shift_invariance,
    verify_tbft_finite,
    zero_cocycle_automorphisms,
    zero_cocycle_catalog,
)
from lamptwist.finite import OracleCheck, projection_index_map


class TestGroupModel:
    def test_order(self):
        g = build_group(3, 2, 1)
        assert g.order == 3**2 * 2 == 18
        assert build_group(5, 2, 2).order == 5**4 * 4

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            build_group(5, 4, 2)  # 5^16 torsion configurations
        with pytest.raises(BudgetExceeded):
            build_group(2, 9, 2)  # 81 box points
        assert build_group(5, 4, 2, budget=10**13).order == 5**16 * 16

    def test_encode_decode_roundtrip(self):
        g = build_group(3, 2, 2)
        for idx in range(g.order):
            coeffs, shift = g.decode(idx)
            assert g.encode(coeffs, shift) == idx

    def test_identity(self):
        g = build_group(3, 2, 1)
        coeffs, shift = g.decode(g.identity)
        assert not any(coeffs) and shift == (0,)

    def test_multiply_matches_infinite_group(self):
        rng = random.Random(61)
        g = build_group(3, 2, 2)
        for _ in range(150):
            i, j = rng.randrange(g.order), rng.randrange(g.order)
            bridged = g.element_to_group(i) * g.element_to_group(j)
            assert g.multiply(i, j) == g.group_to_index(bridged)

    def test_inverse_matches_infinite_group(self):
        rng = random.Random(67)
        g = build_group(5, 3, 1)
        for _ in range(150):
            i = rng.randrange(g.order)
            assert g.inverse(i) == g.group_to_index(g.element_to_group(i).inverse())
            assert g.multiply(i, g.inverse(i)) == g.identity

    def test_tables_agree_with_fallback(self):
        rng = random.Random(71)
        plain = build_group(5, 2, 1)
        tabled = build_group(5, 2, 1)
        tabled.ensure_tables()
        for _ in range(200):
            i, j = rng.randrange(plain.order), rng.randrange(plain.order)
            assert plain.multiply(i, j) == tabled.multiply(i, j)
            assert plain.inverse(i) == tabled.inverse(i)

    def test_table_cap(self):
        g = build_group(7, 2, 2)  # order 9604: buildable, not table-able
        assert g.order == 9604
        with pytest.raises(BudgetExceeded):
            g.ensure_tables()
        # elementwise arithmetic still works
        assert g.multiply(g.identity, 5) == 5

    def test_render(self):
        g = build_group(3, 2, 1)
        idx = g.encode([1, 2], (1,))
        assert g.render(idx) == "(1*D[0] + 2*D[1] ; 1)"


class TestFiniteAutomorphism:
    def test_identity(self):
        g = build_group(3, 2, 1)
        ident = identity_automorphism(g)
        assert ident(7) == 7

    def test_rejects_non_bijection(self):
        g = build_group(3, 2, 1)
        with pytest.raises(InvalidAutomorphism):
            FiniteAutomorphism(g, np.zeros(g.order, dtype=np.int32))

    def test_rejects_non_homomorphism(self):
        g = build_group(3, 2, 1)
        table = np.roll(np.arange(g.order, dtype=np.int32), 1)
        with pytest.raises(InvalidAutomorphism):
            FiniteAutomorphism(g, table)

    def test_twisted_by_is_conjugation(self):
        g = build_group(5, 2, 1)
        f = descend_automorphism(finite_reidemeister_automorphism(5, 1), g)
        rng = random.Random(73)
        for _ in range(40):
            a = rng.randrange(g.order)
            x = rng.randrange(g.order)
            tw = f.twisted_by(a)
            assert tw(x) == g.multiply(g.multiply(a, f(x)), g.inverse(a))

    def test_shift_map(self):
        g = build_group(5, 4, 1)
        f = descend_automorphism(finite_reidemeister_automorphism(5, 1), g)
        assert list(f.shift_map()) == [0, 3, 2, 1]  # negation mod 4


class TestDescend:
    def test_identity_descends_to_identity(self):
        g = build_group(3, 2, 2)
        f = descend_automorphism(WreathAutomorphism.identity(GroupParams(3, 2)), g)
        assert np.array_equal(f.table, np.arange(g.order))

    def test_invalid_automorphism_rejected(self):
        g = build_group(5, 2, 1)
        bad = WreathAutomorphism(GroupParams(5, 1), ((2,),), Torsion.delta(5, 1, (0,), 2))
        with pytest.raises(InvalidAutomorphism):
            descend_automorphism(bad, g)

    def test_parameter_mismatch_rejected(self):
        g = build_group(5, 2, 1)
        with pytest.raises(ValueError):
            descend_automorphism(finite_reidemeister_automorphism(7, 1), g)

    def test_cocycle_obstruction(self):
        g = build_group(3, 2, 1)
        aut = WreathAutomorphism(
            GroupParams(3, 1),
            ((1,),),
            Torsion.delta(3, 1, (0,)),
            [Torsion.delta(3, 1, (0,))],
        )
        assert aut.is_valid
        with pytest.raises(DescentError):
            descend_automorphism(aut, g)

    def test_vanishing_obstruction_descends(self):
        # coboundary cocycles always satisfy the box-period sum condition
        from lamptwist import GroupElement, twist

        g = build_group(3, 2, 1)
        gamma = GroupElement(Torsion(3, 1, [((0,), 1), ((1,), 2)]), (1,))
        aut = twist(WreathAutomorphism.identity(GroupParams(3, 1)), gamma)
        f = descend_automorphism(aut, g)
        # inner automorphisms never change class counts
        assert twisted_classes(g, f).count == g.conjugacy_partition().count

    def test_matches_pointwise_application(self):
        g = build_group(5, 2, 1)
        aut = finite_reidemeister_automorphism(5, 1)
        f = descend_automorphism(aut, g)
        for idx in range(g.order):
            image = aut(g.element_to_group(idx))
            assert f(idx) == g.group_to_index(image)

    def test_python_fallback_matches_vectorized(self, monkeypatch):
        aut = finite_reidemeister_automorphism(5, 1)
        reference = descend_automorphism(aut, build_group(5, 2, 1)).table
        monkeypatch.setattr(finite, "TABLE_CAP", 0)
        monkeypatch.setattr(finite, "EXHAUSTIVE_CAP", 0)
        slow = descend_automorphism(aut, build_group(5, 2, 1))
        assert np.array_equal(slow.table, reference)


class TestTwistedClasses:
    def test_conjugacy_frozen(self):
        # Z_3 wr Z/2: torsion pairs split into 6 classes, the 9 swap-side
        # elements into 3 classes by coefficient sum
        g = build_group(3, 2, 1)
        assert g.conjugacy_partition().count == 9

    def test_matches_unionfind(self):
        g = build_group(3, 2, 1)
        for f in zero_cocycle_catalog(g):
            fast = twisted_classes(g, f)
            slow = twisted_classes_unionfind(g, f)
            assert fast.labels == slow.labels
            assert fast.reps == slow.reps
            assert fast.count == slow.count

    def test_matches_unionfind_rank_two(self):
        g = build_group(2, 2, 2)
        f = zero_cocycle_catalog(g)[-1]
        assert twisted_classes(g, f).labels == twisted_classes_unionfind(g, f).labels

    def test_doubling_has_two_classes(self):
        g = build_group(5, 2, 1)
        f = descend_automorphism(finite_reidemeister_automorphism(5, 1), g)
        assert twisted_classes(g, f).count == 2

    def test_labels_constant_on_orbits(self):
        rng = random.Random(79)
        g = build_group(5, 2, 1)
        f = descend_automorphism(finite_reidemeister_automorphism(5, 1), g)
        part = twisted_classes(g, f)
        for _ in range(100):
            h = rng.randrange(g.order)
            x = rng.randrange(g.order)
            moved = g.multiply(g.multiply(h, x), f(g.inverse(h)))
            assert part.labels[moved] == part.labels[x]

    def test_fixed_conjugacy_identity(self):
        g = build_group(3, 2, 1)
        assert fixed_conjugacy_classes(g, identity_automorphism(g)) == 9


class TestOracleChecks:
    def test_check_line_format(self):
        chk = OracleCheck("tbft", "n=3;m=2;k=1", True, 9, 9)
        assert chk.line() == "CHECK tbft n=3;m=2;k=1 PASS 9 9"
        chk = OracleCheck("tbft", "n=3;m=2;k=1", False, 9, 8)
        assert chk.line() == "CHECK tbft n=3;m=2;k=1 FAIL 9 8"

    def test_tbft_on_catalogs(self):
        for n, m, k in [(3, 2, 1), (5, 2, 1), (3, 3, 1), (2, 2, 2)]:
            g = build_group(n, m, k)
            for f in zero_cocycle_catalog(g):
                chk = verify_tbft_finite(g, f)
                assert chk.passed, chk.line()

    def test_tbft_with_inner_twists(self):
        g = build_group(3, 2, 1)
        f = zero_cocycle_catalog(g)[1]
        twists = inner_twists(g, f)
        assert twists[0] == f
        base = twisted_classes(g, f).count
        for tw in twists:
            assert verify_tbft_finite(g, tw).passed
            assert twisted_classes(g, tw).count == base

    def test_inner_twists_of_identity_frozen_count(self):
        # the center of Z_3 wr Z/2 is the three constant torsion elements
        g = build_group(3, 2, 1)
        twists = inner_twists(g, identity_automorphism(g))
        assert len(twists) == g.order // 3 == 6

    def test_shift_invariance(self):
        g = build_group(5, 2, 1)
        f = descend_automorphism(finite_reidemeister_automorphism(5, 1), g)
        for a in range(g.order):
            for chk in verify_shift_invariance(g, f, a):
                assert chk.passed, chk.line()

    def test_projection(self):
        big = build_group(15, 2, 1)
        for d in (3, 5):
            small = build_group(d, 2, 1)
            for aut in zero_cocycle_automorphisms(15, 1, 2):
                fb = descend_automorphism(aut, big)
                fs = descend_automorphism(aut.induce(d), small)
                checks = verify_projection(big, small, fb, fs)
                assert all(c.passed for c in checks), [c.line() for c in checks]

    def test_projection_index_map_needs_matching_box(self):
        with pytest.raises(ValueError):
            projection_index_map(build_group(15, 2, 1), build_group(5, 3, 1))

    def test_restriction_bound_frozen(self):
        g = build_group(5, 2, 1)
        f = descend_automorphism(finite_reidemeister_automorphism(5, 1), g)
        checks = verify_restriction_bound(g, f)
        assert [c.name for c in checks] == ["restriction-preserved", "restriction-bound"]
        assert all(c.passed for c in checks)
        bound = checks[1]
        assert bound.lhs == 1 and bound.rhs == 4  # R(f') = 1 <= R(f) * fixed = 2 * 2

    def test_restriction_bound_catalogs(self):
        for n, m, k in [(3, 2, 1), (5, 2, 1), (3, 3, 1)]:
            g = build_group(n, m, k)
            for f in zero_cocycle_catalog(g):
                assert all(c.passed for c in verify_restriction_bound(g, f))


class TestCatalogs:
    def test_zero_cocycle_automorphism_count(self):
        auts = zero_cocycle_automorphisms(3, 1, 2)
        assert len(auts) == 2 * 2 * 2  # matrices x box points x units
        assert all(a.is_valid for a in auts)

    def test_catalog_dedupes(self):
        g = build_group(3, 2, 1)
        catalog = zero_cocycle_catalog(g)
        assert len(catalog) == 4  # negation collapses onto identity mod 2
        tables = {f.table.tobytes() for f in catalog}
        assert len(tables) == 4

    def test_catalog_rank_two_includes_order_three_blocks(self):
        g = build_group(2, 2, 2)
        catalog = zero_cocycle_catalog(g)
        assert len(catalog) >= 2
        for f in catalog:
            assert verify_tbft_finite(g, f).passed
