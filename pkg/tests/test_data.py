import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affine_sc.data import (
    DataMatrix,
    RandomModelSpec,
    derive_seed,
    generate_union_dataset,
    load_dataset,
    sample_points_on_subspace,
    sample_random_model,
    save_dataset,
)
from affine_sc.errors import EmptyInput, InvalidMatrix, InvalidSpec, ParseError
from affine_sc.geometry import (
    AffineSubspace,
    direction_subspace,
    is_affinely_independent,
    numerical_rank,
    origin_in_affine_hull,
)


class TestModelSpec:
    @pytest.mark.parametrize("kw", [
        dict(ambient_dim=3, dims=(3,), points_per_subspace=2),
        dict(ambient_dim=3, dims=(-1,), points_per_subspace=2),
        dict(ambient_dim=3, dims=(), points_per_subspace=2),
        dict(ambient_dim=3, dims=(1,), points_per_subspace=0),
        dict(ambient_dim=3, dims=(1,), points_per_subspace=1, seed=-1),
    ])
    def test_invalid(self, kw):
        with pytest.raises(InvalidSpec):
            RandomModelSpec(**kw)


class TestRandomModel:
    def test_deterministic(self):
        a = sample_random_model(RandomModelSpec(10, (2, 3), 5, seed=7))
        b = sample_random_model(RandomModelSpec(10, (2, 3), 5, seed=7))
        for A, B in zip(a, b):
            np.testing.assert_array_equal(A.offset, B.offset)
            np.testing.assert_array_equal(A.basis, B.basis)

    def test_generators_on_unit_sphere(self):
        A = sample_random_model(RandomModelSpec(12, (4,), 1, seed=3))[0]
        norms = np.linalg.norm(np.column_stack([A.offset, A.basis]), axis=0)
        np.testing.assert_allclose(norms, 1.0, atol=1e-14)

    @pytest.mark.parametrize("D, expected", [(23, 0), (24, 100)])
    def test_independence_threshold(self, D, expected):
        hits = sum(bool(is_affinely_independent(sample_random_model(
            RandomModelSpec(D, (4,) * 5, 1, seed)))) for seed in range(100))
        assert hits == expected

    def test_origin_free_at_full_dimension(self):
        for seed in range(100):
            subs = sample_random_model(RandomModelSpec(25, (4,) * 5, 1, seed))
            assert is_affinely_independent(subs) and not origin_in_affine_hull(subs)

    def test_each_subspace_full_dimension_and_affine(self):
        for seed in range(100):
            for A in sample_random_model(RandomModelSpec(8, (1, 3, 5), 1, seed)):
                assert numerical_rank(A.basis) == A.dim
                assert not origin_in_affine_hull([A])


class TestPointSampling:
    def test_membership_and_unit_distance(self):
        A = sample_random_model(RandomModelSpec(15, (4,), 1, seed=1))[0]
        P = sample_points_on_subspace(A, 200, 0)
        assert np.all(A.residual(P) <= 1e-10)
        np.testing.assert_allclose(np.linalg.norm(P - A.offset[:, None], axis=0), 1.0, atol=1e-12)

    def test_one_dimensional_two_points(self):
        A = AffineSubspace(np.array([1.0, 2.0, 3.0]), np.array([[0.0], [2.0], [0.0]]))
        P = sample_points_on_subspace(A, 50, 4)
        q = direction_subspace(A)[:, 0]
        allowed = [A.offset + q, A.offset - q]
        for x in P.T:
            assert min(np.linalg.norm(x - a) for a in allowed) < 1e-12

    def test_orthogonal_component_equals_offset(self, rng):
        A = AffineSubspace(rng.standard_normal(6), rng.standard_normal((6, 2)))
        Q = direction_subspace(A)
        Pperp = np.eye(6) - Q @ Q.T
        P = sample_points_on_subspace(A, 20, 9)
        np.testing.assert_allclose(Pperp @ P, np.repeat((Pperp @ A.offset)[:, None], 20, 1),
                                   atol=1e-12)

    def test_mean_near_offset(self):
        A = sample_random_model(RandomModelSpec(7, (3,), 1, seed=2))[0]
        P = sample_points_on_subspace(A, 100_000, 11)
        assert np.linalg.norm(P.mean(axis=1) - A.offset) < 0.02

    def test_point_subspace(self):
        A = AffineSubspace(np.array([1.0, -1.0]), np.zeros((2, 0)))
        P = sample_points_on_subspace(A, 4, 0)
        np.testing.assert_array_equal(P, np.repeat([[1.0], [-1.0]], 4, axis=1))

    def test_accepts_generator(self):
        A = AffineSubspace(np.zeros(3), np.eye(3)[:, :2] + 0.1)
        a = sample_points_on_subspace(A, 3, np.random.default_rng(5))
        b = sample_points_on_subspace(A, 3, 5)
        np.testing.assert_array_equal(a, b)


class TestUnionDataset:
    def test_protocol_shape(self):
        data, subs = generate_union_dataset(RandomModelSpec(30, (4,) * 5, 20, seed=0))
        assert (data.ambient_dim, data.count) == (30, 100)
        assert np.array_equal(np.bincount(data.labels)[1:], [20] * 5)
        assert len(subs) == 5

    def test_single_subspace(self):
        data, _ = generate_union_dataset(RandomModelSpec(5, (2,), 6, seed=0))
        assert np.all(data.labels == 1)

    def test_deterministic(self):
        spec = RandomModelSpec(9, (2, 2), 4, seed=123)
        a, _ = generate_union_dataset(spec)
        b, _ = generate_union_dataset(spec)
        assert a.values.tobytes() == b.values.tobytes()

    def test_points_on_their_subspace(self):
        data, subs = generate_union_dataset(RandomModelSpec(12, (2, 3, 4), 10, seed=5))
        for ell, A in enumerate(subs, start=1):
            assert np.all(A.residual(data.values[:, data.labels == ell]) <= 1e-10)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**64 - 1), st.integers(0, 50), st.integers(0, 50))
    def test_derive_seed_is_pure(self, master, a, b):
        assert derive_seed(master, a, b) == derive_seed(master, a, b)
        assert 0 <= derive_seed(master, a, b) < 2**64
        if a != b:
            assert derive_seed(master, a, b) != derive_seed(master, b, a)


class TestDataMatrix:
    def test_non_finite(self):
        with pytest.raises(InvalidMatrix):
            DataMatrix(np.array([[np.nan, 1.0]]))

    def test_labels_must_cover_classes(self):
        with pytest.raises(InvalidMatrix):
            DataMatrix(np.zeros((2, 3)), np.array([1, 3, 3]))

    def test_read_only(self):
        data = DataMatrix(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            data.values[0, 0] = 1.0


class TestCSV:
    def test_plain(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("1,2\n3,4\n5,6\n")
        data = load_dataset(f)
        assert (data.ambient_dim, data.count) == (2, 3)
        assert data.labels is None
        np.testing.assert_array_equal(data.values, [[1, 3, 5], [2, 4, 6]])

    def test_labels(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("a,b,label\n1,2,1\n3,4,1\n5,6,2\n")
        data = load_dataset(f)
        np.testing.assert_array_equal(data.labels, [1, 1, 2])
        assert data.ambient_dim == 2

    def test_labels_remapped(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("a,label\n1,7\n3,0\n5,7\n")
        np.testing.assert_array_equal(load_dataset(f).labels, [2, 1, 2])

    def test_ragged(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("1,2,3\n1,2,3,4\n")
        with pytest.raises(ParseError) as info:
            load_dataset(f)
        assert info.value.row == 2

    def test_non_numeric(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("1,2\n3,x\n")
        with pytest.raises(ParseError) as info:
            load_dataset(f)
        assert (info.value.row, info.value.cell) == (2, 2)

    def test_empty(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("")
        with pytest.raises(EmptyInput):
            load_dataset(f)

    def test_center_then_normalize(self, tmp_path):
        f = tmp_path / "a.csv"
        f.write_text("1,0\n3,0\n2,4\n")
        data = load_dataset(f, center=True, normalize=True)
        np.testing.assert_allclose(np.linalg.norm(data.values, axis=0), 1.0)
        raw = np.array([[1, 3, 2], [0, 0, 4.0]])
        c = raw - raw.mean(axis=1, keepdims=True)
        np.testing.assert_allclose(data.values, c / np.linalg.norm(c, axis=0))

    def test_round_trip(self, tmp_path):
        data, _ = generate_union_dataset(RandomModelSpec(6, (1, 2), 5, seed=8))
        f = tmp_path / "d.csv"
        save_dataset(data, f)
        back = load_dataset(f)
        np.testing.assert_array_equal(back.values, data.values)
        np.testing.assert_array_equal(back.labels, data.labels)
