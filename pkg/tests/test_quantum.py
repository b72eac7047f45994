import numpy as np
import pytest

from conftest import C, F5, random_unit_tensor, w_tensor
from symsub import (
    DensityMatrix,
    DomainError,
    OptimizerOptions,
    QuantumError,
    Tensor,
    density,
    directional_derivative_check,
    jacobi_eigh,
    marginal,
    marginal_equality_check,
    moment_map,
    sandwich_check,
    sym_quantum_functional,
    tensor_product,
    uniform_quantum_functional,
    unit_tensor,
    vn_entropy,
)

W_VALUE = 3 / 2 ** (2 / 3)  # 1.8898815748...


def random_hermitian(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (m + m.conj().T) / 2


@pytest.mark.parametrize("d", [1, 2, 3, 4, 6])
def test_jacobi_matches_numpy(d):
    rng = np.random.default_rng(d)
    for _ in range(25):
        h = random_hermitian(rng, d)
        got = np.asarray(jacobi_eigh(h))
        want = np.sort(np.linalg.eigvalsh(h))[::-1]
        assert np.abs(got - want).max() < 1e-9


def test_jacobi_rejects_non_square():
    with pytest.raises(QuantumError):
        jacobi_eigh(np.zeros((2, 3)))


def test_density_matrix_validation():
    with pytest.raises(QuantumError):
        DensityMatrix(np.array([[1.0, 1.0], [0.0, 0.0]]))  # not Hermitian
    with pytest.raises(QuantumError):
        DensityMatrix(np.eye(2))  # trace 2
    rho = DensityMatrix(np.eye(2) / 2)
    assert rho.spectrum == pytest.approx((0.5, 0.5))


def test_density_matrix_rejects_negative_spectrum():
    rho = DensityMatrix(np.diag([1.5, -0.5]))  # Hermitian, trace 1, not PSD
    with pytest.raises(QuantumError):
        rho.spectrum


def test_density_of_a_tensor_is_pure():
    rho = density(w_tensor(C))
    assert rho.spectrum[0] == pytest.approx(1.0)
    assert sum(rho.spectrum) == pytest.approx(1.0)
    assert rho.dimension == 8


def test_density_rejects_field_tensors():
    with pytest.raises(DomainError):
        density(w_tensor(F5))


def test_marginals_of_w():
    f = w_tensor(C)
    for j in range(3):
        rho = marginal(f, j)
        assert np.allclose(rho.array, rho.array.conj().T)
        assert sum(rho.spectrum) == pytest.approx(1.0)
        assert rho.spectrum == pytest.approx((2 / 3, 1 / 3))
    with pytest.raises(QuantumError):
        marginal(f, 3)


def test_vn_entropy_known_values():
    assert vn_entropy(DensityMatrix(np.eye(4) / 4)) == pytest.approx(2.0)
    assert vn_entropy(DensityMatrix(np.diag([1.0, 0.0]))) == pytest.approx(0.0)


def test_moment_map_sums_marginals():
    f = w_tensor(C)
    mu = moment_map(f)
    assert np.allclose(mu, sum(marginal(f, j).array for j in range(3)))
    assert np.allclose(mu, np.diag([2.0, 1.0]))


def test_directional_derivative_example():
    f = Tensor(C, np.array([[1.0, 0.0], [0.0, 0.0]]))
    H = np.diag([1.0, -1.0])
    analytic, numeric = directional_derivative_check(f, H)
    assert analytic == pytest.approx(2.0, abs=1e-9)
    assert numeric == pytest.approx(analytic, rel=1e-6)


def test_directional_derivative_random_agreement():
    rng = np.random.default_rng(14)
    for _ in range(10):
        d, k = 2 + rng.integers(0, 2), 2 + rng.integers(0, 2)
        f = random_unit_tensor(rng, (d,) * k)
        H = random_hermitian(rng, d)
        H = H / max(np.abs(np.linalg.eigvalsh(H)))
        analytic, numeric = directional_derivative_check(f, H)
        assert numeric == pytest.approx(analytic, rel=1e-5, abs=1e-9)


def test_directional_derivative_rejects_large_directions():
    f = random_unit_tensor(np.random.default_rng(0), (2, 2))
    with pytest.raises(QuantumError):
        directional_derivative_check(f, np.diag([3.0, 0.0]))


@pytest.mark.parametrize("r,k", [(1, 2), (2, 2), (3, 3), (4, 2)])
def test_functional_normalization_on_units(r, k):
    res = sym_quantum_functional(unit_tensor(r, k, C), OptimizerOptions(restarts=2))
    assert res.value == pytest.approx(r, abs=1e-6)
    assert res.label == "lower estimate"


def test_functionals_on_w():
    opts = OptimizerOptions(restarts=2)
    for fn in (sym_quantum_functional, uniform_quantum_functional):
        res = fn(w_tensor(C), opts)
        assert res.value == pytest.approx(W_VALUE, abs=1e-2)
        assert res.point.spectrum == pytest.approx((2 / 3, 1 / 3), abs=1e-6)
        assert res.gradient_norm < 1e-2


def test_functional_determinism():
    opts = OptimizerOptions(restarts=2, seed=5)
    a = sym_quantum_functional(w_tensor(C), opts)
    b = sym_quantum_functional(w_tensor(C), opts)
    assert a.value == b.value
    assert a.point.spectrum == b.point.spectrum


def test_functional_restart_count():
    res = sym_quantum_functional(w_tensor(C), OptimizerOptions(restarts=2))
    assert res.restarts == 3  # identity start plus two random ones


def test_functional_product_seeding_reaches_square():
    """Seeding f*f with the single-copy optimum exhibits multiplicativity."""
    W = w_tensor(C)
    res1 = sym_quantum_functional(W, OptimizerOptions(restarts=2))
    g = res1.point.maps[0]
    res2 = sym_quantum_functional(
        tensor_product(W, W),
        OptimizerOptions(restarts=1, initial=(np.kron(g, g),)),
    )
    assert res2.value >= res1.value**2 - 1e-6


def test_size_gates():
    with pytest.raises(QuantumError, match="size gate"):
        sym_quantum_functional(unit_tensor(7, 2, C))
    with pytest.raises(QuantumError, match="size gate"):
        uniform_quantum_functional(unit_tensor(2, 5, C))
    with pytest.raises(QuantumError):
        sym_quantum_functional(Tensor(C, np.zeros((2, 3))))  # not cubical


def test_sandwich_check_on_random_tensors():
    rng = np.random.default_rng(13)
    for _ in range(25):
        rep = sandwich_check(random_unit_tensor(rng, (3, 3, 3)))
        assert rep.concavity_slack >= -1e-9
        assert rep.upper_slack >= -1e-9
        assert rep.log_k == pytest.approx(np.log2(3))
        assert rep.entropy_of_average == pytest.approx(
            rep.mean_entropy + rep.concavity_slack
        )


def test_sandwich_check_on_w():
    rep = sandwich_check(w_tensor(C))
    assert rep.entropy_of_average == pytest.approx(0.9182958340544896)
    assert rep.mean_entropy == pytest.approx(rep.entropy_of_average)


def test_marginal_equality_on_symmetric_tensors():
    assert marginal_equality_check(w_tensor(C)) <= 1e-12
    lopsided = Tensor(C, np.arange(8.0).reshape(2, 2, 2))
    assert marginal_equality_check(lopsided) > 1e-3
