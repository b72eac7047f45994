import numpy as np
import pytest

from conftest import C, F2, F3, F5, F7, c5_matrix, tight_tensor, w_tensor
from symsub import (
    Certificate,
    DomainError,
    LinearMap,
    SearchInfeasibleError,
    Tensor,
    certificate_from_json,
    certificate_to_json,
    reconstruct_waring,
    restriction_exists,
    subrank_exact,
    symrank_small,
    symrestriction_exists,
    symsubrank_exact,
    tensors_equal,
    unit_tensor,
    verify_certificate,
)
from symsub.symmetrize import fully_symmetric


def test_certificate_kind_validation():
    A = LinearMap(F5, [[1, 0]])
    u = unit_tensor(1, 2, F5)
    with pytest.raises(ValueError):
        Certificate(kind="mystery", maps=(A,), target=u)
    with pytest.raises(ValueError):
        Certificate(kind="symmetric-restriction", maps=(A, A), target=u)


def test_verify_certificate_both_kinds():
    f = Tensor(F5, [[2, 0], [0, 3]])
    # plain: independent maps scale the two axes separately
    A = LinearMap(F5, [[3, 0]])  # 3*2=6=1
    B = LinearMap(F5, [[1, 0]])
    plain = Certificate(kind="restriction", maps=(A, B), target=unit_tensor(1, 2, F5))
    assert verify_certificate(plain, f)
    wrong = Certificate(kind="restriction", maps=(B, B), target=unit_tensor(1, 2, F5))
    assert not verify_certificate(wrong, f)
    # symmetric: the shared map scales by 2*2*2 = 8 = 3 mod 5, not 1
    S = LinearMap(F5, [[2, 0]])
    sym = Certificate(kind="symmetric-restriction", maps=(S,), target=unit_tensor(1, 2, F5))
    assert not verify_certificate(sym, f)


def test_certificate_json_roundtrip():
    cert = Certificate(
        kind="restriction",
        maps=(LinearMap(F5, [[1, 2]]), LinearMap(F5, [[3, 4]])),
        target=unit_tensor(1, 2, F5),
    )
    again = certificate_from_json(certificate_to_json(cert))
    assert again.kind == cert.kind
    assert [m.array.tolist() for m in again.maps] == [[[1, 2]], [[3, 4]]]
    assert tensors_equal(again.target, cert.target)


def test_symrestriction_search_small():
    f = Tensor(F2, np.eye(3, dtype=np.int64))
    cert = symrestriction_exists(unit_tensor(3, 2, F2), f)
    assert cert is not None and verify_certificate(cert, f)
    assert symrestriction_exists(unit_tensor(4, 2, F2), Tensor(F2, np.eye(4, dtype=np.int64))) is not None


def test_symrestriction_needs_prime_field():
    with pytest.raises(DomainError):
        symrestriction_exists(unit_tensor(1, 2, C), Tensor(C, np.eye(2)))


def test_search_budget_raises_with_details():
    f = Tensor(F7, np.eye(5, dtype=np.int64))
    with pytest.raises(SearchInfeasibleError) as info:
        symrestriction_exists(unit_tensor(4, 2, F7), f, budget=100)
    assert info.value.budget == 100
    assert info.value.required > 100


def test_symsubrank_c5():
    value, cert = symsubrank_exact(c5_matrix())
    assert value == 2
    assert cert.kind == "symmetric-restriction"
    assert verify_certificate(cert, c5_matrix())


def test_subrank_tight_tensor():
    value, cert = subrank_exact(tight_tensor())
    assert value == 2
    assert verify_certificate(cert, tight_tensor())


def test_symsubrank_of_unit_is_full():
    u = unit_tensor(2, 3, F3)
    value, cert = symsubrank_exact(u)
    assert value == 2 and verify_certificate(cert, u)


def test_symrank_h3_over_f7():
    res = symrank_small(fully_symmetric(3, F7))
    assert res.value == 4
    assert res.lower_bound <= 4
    assert res.vectors is not None and len(res.vectors) == 4
    assert reconstruct_waring(res.vectors, fully_symmetric(3, F7))


def test_symrank_diagonal_is_dimension():
    u = unit_tensor(2, 3, F5)
    res = symrank_small(u)
    assert res.value == 2
    assert reconstruct_waring(res.vectors, u)


def test_symrank_budget_exhaustion_returns_bounds():
    res = symrank_small(fully_symmetric(3, F7), budget=4)
    assert res.value is None
    assert res.lower_bound >= 1
    assert res.vectors is None


def test_symrank_preconditions():
    with pytest.raises(DomainError):
        symrank_small(w_tensor(C))
    with pytest.raises(ValueError):
        symrank_small(Tensor(F5, np.arange(8).reshape(2, 2, 2)))


def test_restriction_exists_matrix_shortcut():
    """Order-2 restrictions are found constructively over any domain."""
    f = Tensor(C, [[0, 1], [-1, 0]])
    cert = restriction_exists(unit_tensor(2, 2, C), f)
    assert cert is not None and verify_certificate(cert, f)
    assert restriction_exists(unit_tensor(3, 2, C), f) is None
