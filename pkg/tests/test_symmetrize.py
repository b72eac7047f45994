import itertools

import numpy as np
import pytest

from conftest import C, F3, F5, F7, random_symmetric, w_tensor
from symsub import (
    Certificate,
    DomainError,
    LinearMap,
    MissingKthRootError,
    Tensor,
    apply,
    apply_sym,
    apply_sym_power,
    create_t,
    flattening_rank,
    fully_symmetric,
    is_symmetric,
    make_sym,
    remove_powers,
    restriction_exists,
    selection_map,
    symmetrize_certificate,
    symrank_upper,
    tensor_power,
    tensor_product,
    tensors_equal,
    unit_tensor,
    verify_certificate,
    waring_h,
    waring_reconstruct,
)


def test_fully_symmetric_support():
    h = fully_symmetric(3, F5)
    assert h.dims == (3, 3, 3)
    assert is_symmetric(h)
    assert h.array[0, 1, 2] == 1 and h.array[2, 1, 0] == 1
    assert h.array[0, 0, 1] == 0 and h.array[0, 0, 0] == 0


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_waring_h_complex(k):
    dec = waring_h(k, C)
    assert len(dec.coefficients) == 2 ** (k - 1)
    assert tensors_equal(waring_reconstruct(dec), fully_symmetric(k, C))


def test_waring_h_characteristic_guard():
    with pytest.raises(DomainError):
        waring_h(3, F3)
    with pytest.raises(DomainError):
        waring_h(5, F5)
    assert waring_h(4, F5) is not None  # p > k is enough


def test_make_sym_interleaves_to_the_unit_constant():
    """A plain restriction f >= g lifts to f(x)h >=_s g(x)h, scale one."""
    rng = np.random.default_rng(31)
    for i in range(12):
        domain = (F5, F7, C)[i % 3]
        k = 2 + i % 2
        f = random_symmetric(rng, 2, k, domain)
        A = LinearMap(
            domain,
            rng.normal(size=(2, 2)) if domain is C else rng.integers(0, domain.p, (2, 2)),
        )
        maps = tuple(LinearMap(domain, (j + 1) * A.array) for j in range(k))
        g = apply(maps, f)
        if not is_symmetric(g):
            continue
        cert = make_sym(maps, f, g)
        assert cert.kind == "symmetric-restriction"
        fh = tensor_product(f, fully_symmetric(k, domain))
        gh = tensor_product(g, fully_symmetric(k, domain))
        assert tensors_equal(apply_sym(cert.maps[0], fh), gh)
        assert verify_certificate(cert, fh)


def test_make_sym_needs_symmetric_endpoints():
    f = Tensor(F5, np.arange(8).reshape(2, 2, 2) % 5)
    A = LinearMap(F5, np.eye(2, dtype=np.int64))
    with pytest.raises(ValueError):
        make_sym((A, A, A), f, f)


def test_remove_powers_clears_low_diagonal():
    rng = np.random.default_rng(41)
    hits = 0
    while hits < 10:
        f = random_symmetric(rng, 3, 3, C)
        A, g = remove_powers(f)
        assert g.array[(0,) * 3] == pytest.approx(0, abs=1e-9)
        assert g.array[(1,) * 3] == pytest.approx(0, abs=1e-9)
        assert tensors_equal(g, apply_sym(A, f))
        hits += 1


def test_remove_powers_field_obstruction_is_reported():
    rng = np.random.default_rng(43)
    saw_failure = False
    for _ in range(60):
        f = random_symmetric(rng, 3, 3, F5)
        try:
            remove_powers(f)
        except MissingKthRootError as exc:
            assert exc.failed  # which indices could not be cleared
            saw_failure = True
            break
    assert saw_failure


def test_create_t_on_w():
    cert = create_t(w_tensor(C))
    assert cert.y == (2, 1)
    assert cert.c == 3
    assert cert.verified in ("dense", "sparse", "combinatorial")
    S = selection_map(cert)
    assert tensors_equal(apply_sym(S, tensor_power(w_tensor(C), 3)), fully_symmetric(3, C))


def test_create_t_needs_flattening_rank_two():
    rank_one = Tensor(C, np.einsum("i,j,k->ijk", [1.0, 2], [1.0, 2], [1.0, 2]))
    with pytest.raises(ValueError):
        create_t(rank_one)


def test_create_t_random_f5_certificates_materialize():
    rng = np.random.default_rng(47)
    done = 0
    while done < 8:
        f = random_symmetric(rng, 2, 3, F5)
        if max(flattening_rank(f, [j]) for j in range(3)) < 2:
            continue
        try:
            cert = create_t(f)
        except MissingKthRootError:
            continue  # documented finite-field obstruction
        got = apply_sym_power(selection_map(cert), f, cert.c)
        assert tensors_equal(got, fully_symmetric(3, F5))
        done += 1


def test_symmetrize_certificate_chain_over_f5():
    """A plain <2> <= W^2 witness becomes a symmetric one on W^5."""
    W = w_tensor(F5)
    A = LinearMap(F5, [[2, 1, 2, 1], [2, 2, 1, 1]])
    rc = Certificate(kind="restriction", maps=(A, A, A), target=unit_tensor(2, 3, F5))
    assert verify_certificate(rc, tensor_power(W, 2))
    res = symmetrize_certificate(W, rc)
    assert (res.n, res.c) == (2, 3)
    assert res.certificate.kind == "symmetric-restriction"
    assert verify_certificate(res.certificate, tensor_power(W, 5))


def test_symrank_upper_polarizes_a_rank_witness():
    u = unit_tensor(2, 3, C)
    eye = LinearMap(C, np.eye(2))
    witness = Certificate(kind="restriction", maps=(eye, eye, eye), target=u)
    res = symrank_upper(u, witness)
    assert res.bound == 2 * 2 ** 2
    assert len(res.decomposition.coefficients) == 8
    assert tensors_equal(waring_reconstruct(res.decomposition), u)


def test_symrank_upper_shortcut_on_the_gadget():
    """For h itself the direct 2^{k-1}-term decomposition wins."""
    h = fully_symmetric(3, C)
    dec = waring_h(3, C)
    rows = dec.vectors * np.asarray(dec.coefficients)[:, None] ** (1 / 3)
    maps = tuple(LinearMap(C, rows.T) for _ in range(3))
    witness = Certificate(kind="restriction", maps=maps, target=h)
    assert verify_certificate(witness, unit_tensor(4, 3, C))
    res = symrank_upper(h, witness)
    assert res.bound == 4
    assert tensors_equal(waring_reconstruct(res.decomposition), h)
