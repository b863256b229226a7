import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affine_sc.errors import DimensionMismatch, ZeroColumnWarning
from affine_sc.metrics import acc, confusion, is_subspace_preserving, spr, truth_mask

from oracles import acc_bruteforce

labels_st = st.lists(st.integers(1, 4), min_size=1, max_size=12)


def block_matrix(labels, rng):
    labels = np.asarray(labels)
    C = rng.uniform(0.1, 1.0, (labels.size, labels.size))
    return np.where(truth_mask(labels), C, 0.0)


class TestSPR:
    def test_block_diagonal(self, rng):
        p = np.array([1, 1, 2, 2, 2])
        assert spr(block_matrix(p, rng), p) == 1.0

    def test_all_ones_two_pairs(self):
        C = np.ones((4, 4)) - np.eye(4)
        assert spr(C, [1, 1, 2, 2]) == pytest.approx(1 / 3)

    def test_identity(self):
        assert spr(np.eye(3), [1, 2, 3]) == 1.0

    def test_zero_column(self):
        C = np.zeros((3, 3))
        C[1, 0] = 1.0
        with pytest.warns(ZeroColumnWarning):
            assert spr(C, [1, 1, 2]) == 1.0

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            spr(np.ones((3, 3)), [1, 2])

    def test_rescaling_invariance(self, rng):
        for _ in range(100):
            N = int(rng.integers(2, 10))
            p = rng.integers(1, 4, N)
            C = rng.standard_normal((N, N))
            s = rng.uniform(0.01, 100, N)
            assert spr(C * s, p) == pytest.approx(spr(C, p), rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(labels_st, st.integers(0, 2**32 - 1))
    def test_range_and_exactness(self, labels, seed):
        g = np.random.default_rng(seed)
        p = np.asarray(labels)
        C = g.standard_normal((p.size, p.size))
        v = spr(C, p)
        assert 0.0 <= v <= 1.0 + 1e-15
        B = np.where(truth_mask(p), C, 0.0)
        if np.all(np.abs(B).sum(axis=0) > 0):
            assert spr(B, p) == 1.0
            assert is_subspace_preserving(B, p, tol=0.0)


class TestSubspacePreserving:
    def test_block(self, rng):
        p = [1, 1, 2, 2]
        assert is_subspace_preserving(block_matrix(p, rng), p)

    def test_off_block_entry(self):
        C = np.array([[0, 1, 0.1], [1, 0, 0], [0, 0, 0.0]])
        C[2, 2] = 1.0
        assert not is_subspace_preserving(C, [1, 1, 2])

    def test_round_off_floor(self):
        p = [1, 1, 2, 2]
        C = np.kron(np.eye(2), np.ones((2, 2))) + 1e-12 * (1 - np.kron(np.eye(2), np.ones((2, 2))))
        assert is_subspace_preserving(C, p)
        assert not is_subspace_preserving(C, p, tol=0.0)


class TestAcc:
    def test_identical(self):
        assert acc([1, 2, 3, 3], [1, 2, 3, 3]) == 1.0

    def test_relabeled(self):
        assert acc([3, 3, 1, 2], [1, 1, 2, 3]) == 1.0

    def test_hand_example(self):
        assert acc([1, 2, 2, 2], [1, 1, 2, 2]) == 0.75
        assert acc_bruteforce([1, 2, 2, 2], [1, 1, 2, 2]) == 0.75

    def test_mismatch(self):
        with pytest.raises(DimensionMismatch):
            acc([1, 2], [1])

    def test_against_exhaustive(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 7))
            N = int(rng.integers(1, 25))
            pred = rng.integers(1, n + 1, N)
            truth = rng.integers(1, n + 1, N)
            assert acc(pred, truth) == pytest.approx(acc_bruteforce(pred, truth))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.integers(1, 5), st.integers(1, 5)), min_size=1, max_size=20),
           st.permutations([1, 2, 3, 4, 5]))
    def test_symmetry_and_relabel_invariance(self, pairs, perm):
        pred = np.array([a for a, _ in pairs])
        truth = np.array([b for _, b in pairs])
        assert acc(pred, truth) == pytest.approx(acc(truth, pred))
        relabel = np.asarray(perm)[pred - 1]
        assert acc(relabel, truth) == pytest.approx(acc(pred, truth))

    def test_confusion(self):
        M, pa, ta = confusion([1, 1, 2], [2, 2, 2])
        np.testing.assert_array_equal(M, [[2], [1]])
        np.testing.assert_array_equal(pa, [1, 2])
