import numpy as np
import pytest

from conftest import C, F2, F5, F7, w_tensor
from symsub import (
    ENTRY_CAP,
    LinearMap,
    Tensor,
    TensorSizeError,
    apply,
    apply_sym,
    apply_sym_power,
    direct_sum,
    flattening_rank,
    identity_map,
    is_symmetric,
    kron,
    map_from_json,
    map_to_json,
    matrix_rank,
    permute_legs,
    support,
    tensor_from_json,
    tensor_id,
    tensor_power,
    tensor_product,
    tensor_to_json,
    tensors_equal,
    unit_tensor,
)


def test_tensor_is_reduced_and_frozen():
    f = Tensor(F5, [[6, -1], [0, 2]])
    assert f.array.tolist() == [[1, 4], [0, 2]]
    with pytest.raises(ValueError):
        f.array[0, 0] = 3
    assert f.order == 2 and f.dims == (2, 2) and f.is_cubical


def test_entry_cap():
    side = 1 << 9
    with pytest.raises(TensorSizeError):
        Tensor(F2, np.zeros((side, side, side), dtype=np.int64))
    assert ENTRY_CAP == 1 << 24


def test_unit_tensor_support():
    u = unit_tensor(3, 3, F5)
    assert support(u) == [(0, 0, 0), (1, 1, 1), (2, 2, 2)]
    assert is_symmetric(u)
    assert unit_tensor(0, 2, F5).dims == (0, 0)


def test_tensor_product_groups_legs():
    """The product pairs up legs, so orders match and dimensions multiply."""
    f = w_tensor(F5)
    g = unit_tensor(3, 3, F5)
    fg = tensor_product(f, g)
    assert fg.order == 3 and fg.dims == (6, 6, 6)
    assert tensors_equal(tensor_power(f, 2), tensor_product(f, f))
    with pytest.raises(ValueError):
        tensor_product(f, unit_tensor(2, 2, F5))
    with pytest.raises(ValueError):
        tensor_product(f, w_tensor(F7))


def test_direct_sum_blocks():
    f = Tensor(F5, [[1, 2], [3, 4]])
    g = Tensor(F5, [[1]])
    s = direct_sum(f, g)
    assert s.dims == (3, 3)
    assert s.array[:2, :2].tolist() == [[1, 2], [3, 4]]
    assert s.array[2, 2] == 1
    assert not s.array[:2, 2:].any() and not s.array[2:, :2].any()


def test_apply_matches_apply_sym_for_equal_maps():
    rng = np.random.default_rng(0)
    f = w_tensor(F7)
    A = LinearMap(F7, rng.integers(0, 7, size=(3, 2)))
    assert tensors_equal(apply((A, A, A), f), apply_sym(A, f))


def test_apply_shape_checks():
    f = w_tensor(F5)
    A = LinearMap(F5, [[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        apply((A, A), f)  # one map per leg
    bad = LinearMap(F5, [[1, 0, 0]])
    with pytest.raises(ValueError):
        apply_sym(bad, f)


def test_apply_sym_power_equals_power_then_apply():
    f = w_tensor(F5)
    A = LinearMap(F5, [[1, 2, 0, 3], [0, 1, 4, 1]])
    got = apply_sym_power(A, f, 2)
    want = apply_sym(A, tensor_power(f, 2))
    assert tensors_equal(got, want)


def test_permute_legs_and_symmetry():
    f = w_tensor(C)
    assert is_symmetric(f)
    g = Tensor(C, np.arange(8, dtype=float).reshape(2, 2, 2))
    assert not is_symmetric(g)
    h = permute_legs(g, [2, 0, 1])
    assert h.array[1, 0, 1] == g.array[0, 1, 1]


def test_flattening_and_matrix_rank():
    f = w_tensor(C)
    assert [flattening_rank(f, [j]) for j in range(3)] == [2, 2, 2]
    m = Tensor(F2, [[1, 1], [1, 1]])
    assert matrix_rank(m) == 1
    assert flattening_rank(m, [0]) == 1
    diag = unit_tensor(3, 3, F5)
    assert flattening_rank(diag, [0, 1]) == 3


def test_kron_of_maps():
    A = LinearMap(F5, [[1, 2], [3, 4]])
    B = LinearMap(F5, [[0, 1]])
    K = kron(A, B)
    assert K.rows == 2 and K.cols == 4
    assert K.array.tolist() == [[0, 1, 0, 2], [0, 3, 0, 4]]


def test_identity_map():
    assert apply_sym(identity_map(2, F5), w_tensor(F5)).array.tolist() == w_tensor(
        F5
    ).array.tolist()


@pytest.mark.parametrize("domain", [F5, C])
def test_tensor_json_roundtrip(domain):
    rng = np.random.default_rng(3)
    if domain is C:
        arr = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    else:
        arr = rng.integers(0, 5, size=(2, 3))
    f = Tensor(domain, arr)
    obj = tensor_to_json(f)
    assert obj["domain"] == domain.name
    # JSON indices are 1-based
    if obj["entries"]:
        assert min(min(e["idx"]) for e in obj["entries"]) >= 1
    g = tensor_from_json(obj)
    assert tensors_equal(f, g)


def test_map_json_roundtrip():
    m = LinearMap(C, [[1 + 2j, 0], [0.5, -1j]])
    again = map_from_json(map_to_json(m))
    assert np.allclose(m.array, again.array)
    m2 = LinearMap(F5, [[1, 2], [3, 4]])
    assert map_from_json(map_to_json(m2)).array.tolist() == [[1, 2], [3, 4]]


def test_tensor_id_is_stable_and_content_sensitive():
    a = tensor_id(w_tensor(F5))
    assert a == tensor_id(w_tensor(F5))
    assert len(a) == 16 and int(a, 16) >= 0
    assert a != tensor_id(w_tensor(F7))
    assert a != tensor_id(unit_tensor(2, 3, F5))
