"""Complex-side spectral functionals: marginals, entropy, and orbit maxima.

The symmetric and uniform quantum functionals are suprema of marginal
entropies over group orbits; no finite procedure certifies the supremum, so
this module reports *lower estimates* from gradient ascent with restarts,
together with the exact pointwise identities the estimates must satisfy
(moment-map derivative, concavity sandwich, equality of marginals on
symmetric tensors).

All entropies are in bits, matching F = 2**E.  The eigensolver is a
self-contained cyclic Jacobi iteration on Hermitian matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .domains import ComplexNumbers, DomainError
from .tensors import Tensor, tensor_id

__all__ = [
    "DIMENSION_GATE",
    "ORDER_GATE",
    "QuantumError",
    "jacobi_eigh",
    "DensityMatrix",
    "density",
    "marginal",
    "vn_entropy",
    "moment_map",
    "directional_derivative_check",
    "OrbitPoint",
    "OptimizerOptions",
    "QuantumFunctionalResult",
    "sym_quantum_functional",
    "uniform_quantum_functional",
    "SandwichReport",
    "sandwich_check",
    "marginal_equality_check",
]

DIMENSION_GATE = 6
ORDER_GATE = 4

_EIG_FLOOR = 1e-14       # spectrum entries below this count as 0 in entropy
_NEG_EIG_TOL = 1e-10     # most negative eigenvalue a density matrix may show
_HERMITIAN_TOL = 1e-12
_TRACE_TOL = 1e-10


class QuantumError(ValueError):
    """Invalid input to a quantum-side operation, or an exceeded gate."""


# ---------------------------------------------------------------------------
# eigensolver
# ---------------------------------------------------------------------------

def _rotation_parameters(apq: complex, app: float, aqq: float):
    """Phase and (c, s) of the Jacobi rotation zeroing the (p, q) entry."""
    r = abs(apq)
    phase = apq / r
    tau = (aqq - app) / (2.0 * r)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.hypot(1.0, tau))
    c = 1.0 / math.hypot(1.0, t)
    return phase, c, t * c


def _jacobi_values(rows: List[List[complex]], tol: float, max_sweeps: int) -> List[float]:
    """Cyclic Jacobi on a Hermitian matrix given as nested lists (d >= 2).

    Scalar complex arithmetic: for the small matrices this module sees,
    Python scalars beat vectorized updates by a wide margin.
    """
    d = len(rows)
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(d):
            row = rows[i]
            for j in range(d):
                if i != j:
                    v = row[j]
                    off += v.real * v.real + v.imag * v.imag
        if math.sqrt(off) <= tol:
            return [rows[i][i].real for i in range(d)]
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = rows[p][q]
                if abs(apq) < 1e-150:
                    # far below any tolerance; dividing by it would overflow
                    rows[p][q] = 0j
                    rows[q][p] = 0j
                    continue
                phase, c, s = _rotation_parameters(
                    apq, rows[p][p].real, rows[q][q].real
                )
                # unitary [[c*phase, s*phase], [-s, c]] embedded at (p, q)
                cp = c * phase
                sp = s * phase
                for i in range(d):
                    row = rows[i]
                    aip = row[p]
                    aiq = row[q]
                    row[p] = cp * aip - s * aiq
                    row[q] = sp * aip + c * aiq
                cpc = cp.conjugate()
                spc = sp.conjugate()
                row_p = rows[p]
                row_q = rows[q]
                for i in range(d):
                    api = row_p[i]
                    aqi = row_q[i]
                    row_p[i] = cpc * api - s * aqi
                    row_q[i] = spc * api + c * aqi
                rows[p][q] = 0j
                rows[q][p] = 0j
    raise RuntimeError("jacobi iteration failed to reach the off-norm target")


def _values_2(a00: float, a01: complex, a11: float) -> List[float]:
    """One exact rotation diagonalizes a Hermitian 2x2; these are its values."""
    mean = (a00 + a11) / 2.0
    gap = math.hypot((a00 - a11) / 2.0, abs(a01))
    return [mean + gap, mean - gap]


def _values_3(m: np.ndarray) -> List[float]:
    """Hermitian 3x3 eigenvalues from the characteristic-polynomial invariants."""
    a00 = m[0, 0].real
    a11 = m[1, 1].real
    a22 = m[2, 2].real
    a01 = m[0, 1]
    a02 = m[0, 2]
    a12 = m[1, 2]
    p1 = abs(a01) ** 2 + abs(a02) ** 2 + abs(a12) ** 2
    q = (a00 + a11 + a22) / 3.0
    if p1 <= 1e-30:
        return [a00, a11, a22]
    p2 = (a00 - q) ** 2 + (a11 - q) ** 2 + (a22 - q) ** 2 + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    b00 = (a00 - q) / p
    b11 = (a11 - q) / p
    b22 = (a22 - q) / p
    b01 = a01 / p
    b02 = a02 / p
    b12 = a12 / p
    det = (
        b00 * (b11 * b22 - abs(b12) ** 2)
        - b01 * (b01.conjugate() * b22 - b12 * b02.conjugate())
        + b02 * (b01.conjugate() * b12.conjugate() - b11 * b02.conjugate())
    ).real
    r = min(1.0, max(-1.0, det / 2.0))
    phi = math.acos(r) / 3.0
    eig1 = q + 2.0 * p * math.cos(phi)
    eig3 = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    eig2 = 3.0 * q - eig1 - eig3
    return [eig1, eig2, eig3]


def _hermitian_values(a: np.ndarray, tol: float, max_sweeps: int) -> List[float]:
    d = a.shape[0]
    if d == 0:
        return []
    if d == 1:
        return [a[0, 0].real]
    if d == 2:
        return _values_2(a[0, 0].real, a[0, 1], a[1, 1].real)
    if d == 3:
        return _values_3(a)
    rows = [[complex(a[i, j]) for j in range(d)] for i in range(d)]
    return _jacobi_values(rows, tol, max_sweeps)


def jacobi_eigh(matrix, tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, non-increasing, by cyclic Jacobi.

    Each rotation folds the off-diagonal entry's phase into a real Givens
    rotation and zeroes the pair; sweeps stop when the off-diagonal
    Frobenius norm drops below ``tol``.  Matrices of size 2 and 3 use the
    rotation's exact closed form directly.
    """
    a = np.array(matrix, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise QuantumError(f"eigensolver needs a square matrix, got {a.shape}")
    a = (a + a.conj().T) / 2.0 if a.size else a
    values = _hermitian_values(a, tol, max_sweeps)
    values.sort(reverse=True)
    return np.array(values, dtype=np.float64)


def _entropy_bits(values: Sequence[float]) -> float:
    total = 0.0
    for v in values:
        if v > _EIG_FLOOR:
            total -= v * math.log2(v)
    return max(total, 0.0)


# ---------------------------------------------------------------------------
# density matrices and marginals
# ---------------------------------------------------------------------------

class DensityMatrix:
    """A Hermitian, trace-1, PSD matrix with a lazily computed spectrum."""

    __slots__ = ("array", "_spectrum")

    def __init__(self, array, spectrum: Optional[Sequence[float]] = None):
        a = np.array(array, dtype=np.complex128)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise QuantumError(f"density matrix must be square, got {a.shape}")
        if float(np.max(np.abs(a - a.conj().T), initial=0.0)) > _HERMITIAN_TOL:
            raise QuantumError("density matrix is not Hermitian within 1e-12")
        if abs(np.trace(a).real - 1.0) > _TRACE_TOL or abs(np.trace(a).imag) > _TRACE_TOL:
            raise QuantumError(f"density matrix trace is {np.trace(a):.12g}, not 1")
        a.setflags(write=False)
        self.array = a
        self._spectrum = None if spectrum is None else tuple(float(v) for v in spectrum)

    @property
    def dimension(self) -> int:
        return self.array.shape[0]

    @property
    def spectrum(self) -> Tuple[float, ...]:
        """Eigenvalues, non-increasing, clipped to 0 below the -1e-10 floor."""
        if self._spectrum is None:
            values = jacobi_eigh(self.array)
            if values.size and values[-1] < -_NEG_EIG_TOL:
                raise QuantumError(
                    f"density matrix has eigenvalue {values[-1]:.3e} < -1e-10"
                )
            self._spectrum = tuple(max(float(v), 0.0) for v in values)
        return self._spectrum

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dimension})"


def _complex_array(f: Tensor, what: str) -> np.ndarray:
    if not isinstance(f.domain, ComplexNumbers):
        raise DomainError(f"{what} runs over the complex numbers, not {f.domain.name}")
    return np.asarray(f.array, dtype=np.complex128)


def density(f: Tensor) -> DensityMatrix:
    """rho(f) = f f* / |f|^2 on the full tensor-product space.

    Pure states have known spectrum (1, 0, ..., 0); it is recorded directly
    so the full-space matrix is never fed to the eigensolver.
    """
    arr = _complex_array(f, "density")
    v = arr.ravel()
    n2 = float(np.vdot(v, v).real)
    if n2 <= 1e-300:
        raise QuantumError("zero tensor has no density matrix")
    rho = np.outer(v, v.conj()) / n2
    return DensityMatrix(rho, spectrum=(1.0,) + (0.0,) * (v.size - 1))


def _marginal_array(arr: np.ndarray, j: int) -> np.ndarray:
    flat = np.moveaxis(arr, j, 0).reshape(arr.shape[j], -1)
    n2 = float(np.vdot(flat, flat).real)
    return flat @ flat.conj().T / n2


def marginal(f: Tensor, j: int) -> DensityMatrix:
    """The j-th marginal density matrix (all other legs traced out)."""
    arr = _complex_array(f, "marginal")
    if not 0 <= j < arr.ndim:
        raise QuantumError(f"leg {j} out of range for an order-{arr.ndim} tensor")
    if float(np.sum(np.abs(arr) ** 2)) <= 1e-300:
        raise QuantumError("zero tensor has no marginals")
    return DensityMatrix(_marginal_array(arr, j))


def vn_entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits: H(spec(rho)), with 0 log 0 = 0."""
    return _entropy_bits(rho.spectrum)


def moment_map(f: Tensor) -> np.ndarray:
    """mu(f): the sum of all k marginal density matrices (Hermitian, trace k)."""
    arr = _complex_array(f, "moment map")
    if float(np.sum(np.abs(arr) ** 2)) <= 1e-300:
        raise QuantumError("zero tensor has no moment map")
    total = np.zeros((arr.shape[0], arr.shape[0]), dtype=np.complex128)
    for j in range(arr.ndim):
        total = total + _marginal_array(arr, j)
    return total


# ---------------------------------------------------------------------------
# the moment-map derivative identity
# ---------------------------------------------------------------------------

def _expm_small(m: np.ndarray) -> np.ndarray:
    """exp(m) by Taylor series; intended for ||m|| well below 1."""
    d = m.shape[0]
    out = np.eye(d, dtype=np.complex128)
    term = np.eye(d, dtype=np.complex128)
    for n in range(1, 40):
        term = term @ m / n
        out = out + term
        if float(np.max(np.abs(term))) < 1e-18:
            break
    return out


def _apply_leg(arr: np.ndarray, g: np.ndarray, j: int) -> np.ndarray:
    moved = np.tensordot(g, np.moveaxis(arr, j, 0), axes=([1], [0]))
    return np.moveaxis(moved, 0, j)


def _apply_all(arr: np.ndarray, maps: Sequence[np.ndarray]) -> np.ndarray:
    out = arr
    for j, g in enumerate(maps):
        out = _apply_leg(out, g, j)
    return out


def directional_derivative_check(f: Tensor, direction) -> Tuple[float, float]:
    """Compare tr[mu(f) H] with the numeric derivative of g -> 0.5 ln|g...f|^2.

    ``direction`` is a Hermitian matrix of spectral norm at most 1 acting on
    every leg; the derivative is taken along e^{tH} at t = 0 by a central
    difference with step 1e-5 (natural logarithm on both sides).  Returns
    ``(analytic, numeric)``.
    """
    arr = _complex_array(f, "derivative check")
    if not f.is_cubical:
        raise QuantumError("derivative check needs a cubical tensor")
    h = np.array(direction, dtype=np.complex128)
    d = arr.shape[0]
    if h.shape != (d, d):
        raise QuantumError(f"direction must be {d}x{d}, got {h.shape}")
    if float(np.max(np.abs(h - h.conj().T), initial=0.0)) > _HERMITIAN_TOL:
        raise QuantumError("direction must be Hermitian within 1e-12")
    eigs = jacobi_eigh(h)
    norm = max(abs(float(eigs[0])), abs(float(eigs[-1]))) if eigs.size else 0.0
    if norm > 1.0 + 1e-9:
        raise QuantumError(f"direction has spectral norm {norm:.6g} > 1")
    n2 = float(np.sum(np.abs(arr) ** 2))
    if n2 <= 1e-300:
        raise QuantumError("zero tensor has no derivative check")

    analytic = float(np.trace(moment_map(f) @ h).real)
    unit = arr / math.sqrt(n2)
    step = 1e-5
    k = arr.ndim

    def log_norm(t: float) -> float:
        g = _expm_small(t * h)
        image = _apply_all(unit, [g] * k)
        return 0.5 * math.log(float(np.sum(np.abs(image) ** 2)))

    numeric = (log_norm(step) - log_norm(-step)) / (2.0 * step)
    return analytic, numeric


# ---------------------------------------------------------------------------
# orbit maximization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitPoint:
    """A point of a GL orbit: the acting map(s) and the normalized tensor.

    ``maps`` has one entry for the symmetric orbit (the same map on every
    leg) and k entries for the product orbit.  ``spectrum`` is the spectrum
    of the averaged marginal of the unit-norm transformed tensor.
    """

    source_id: str
    maps: Tuple[np.ndarray, ...]
    tensor: Tensor
    spectrum: Tuple[float, ...]

    def __post_init__(self):
        n2 = float(np.sum(np.abs(self.tensor.array) ** 2))
        if abs(n2 - 1.0) > 1e-9:
            raise QuantumError(f"orbit point tensor has norm^2 = {n2:.12g}, not 1")


@dataclass(frozen=True)
class OptimizerOptions:
    """Knobs for the entropy ascent; defaults suit dimensions up to 6.

    ``restarts`` counts seeded random starts run in addition to the identity
    start; ``initial`` optionally replaces the identity start with given
    map(s), which is how product points seed product tensors.
    """

    restarts: int = 8
    iterations: int = 60
    seed: int = 0
    step: float = 0.5
    gradient_step: float = 1e-4
    barrier: float = 1e-6
    tolerance: float = 1e-9
    initial: Optional[Tuple[np.ndarray, ...]] = None


@dataclass(frozen=True)
class QuantumFunctionalResult:
    """A lower estimate of a quantum functional with optimizer metadata.

    ``restarts`` counts every start actually run, the identity (or seeded)
    one included; ``gradient_norm`` is the final numeric gradient norm of
    the winning start.
    """

    value: float
    point: OrbitPoint
    restarts: int
    iterations: int
    gradient_norm: float
    label: str = "lower estimate"


def _pack(maps: Sequence[np.ndarray]) -> np.ndarray:
    parts = []
    for g in maps:
        parts.append(np.real(g).ravel())
        parts.append(np.imag(g).ravel())
    return np.concatenate(parts)


def _unpack(x: np.ndarray, count: int, d: int) -> List[np.ndarray]:
    maps = []
    stride = d * d
    for m in range(count):
        base = 2 * m * stride
        re = x[base:base + stride].reshape(d, d)
        im = x[base + stride:base + 2 * stride].reshape(d, d)
        maps.append(re + 1j * im)
    return maps


def _barrier(maps: Sequence[np.ndarray], d: int) -> float:
    total = 0.0
    for g in maps:
        _, logabs = np.linalg.slogdet(g)
        if not math.isfinite(logabs):
            return -math.inf
        fro2 = float(np.sum(np.abs(g) ** 2))
        if fro2 <= 0.0:
            return -math.inf
        total += logabs - 0.5 * d * math.log(fro2 / d)
    return total


def _orbit_optimize(
    f: Tensor, mode: str, options: Optional[OptimizerOptions]
) -> QuantumFunctionalResult:
    arr = _complex_array(f, "quantum functional")
    if not f.is_cubical:
        raise QuantumError("quantum functionals need a cubical tensor")
    k = arr.ndim
    d = arr.shape[0] if k else 0
    if k < 2:
        raise QuantumError(f"quantum functionals need order >= 2, got {k}")
    if d > DIMENSION_GATE:
        raise QuantumError(
            f"size gate: quantum functionals handle dimension <= {DIMENSION_GATE}, "
            f"got {d}"
        )
    if k > ORDER_GATE:
        raise QuantumError(
            f"size gate: quantum functionals handle order <= {ORDER_GATE}, got {k}"
        )
    if float(np.sum(np.abs(arr) ** 2)) <= 1e-300:
        raise QuantumError("zero tensor has no quantum functional")
    opts = options if options is not None else OptimizerOptions()
    n_maps = 1 if mode == "sym" else k

    def transformed_unit(maps: Sequence[np.ndarray]) -> Optional[np.ndarray]:
        legs = list(maps) * k if n_maps == 1 else list(maps)
        image = _apply_all(arr, legs)
        n2 = float(np.sum(np.abs(image) ** 2))
        if not math.isfinite(n2) or n2 <= 1e-300:
            return None
        return image / math.sqrt(n2)

    def entropies(unit: np.ndarray, exact: bool) -> float:
        """Entropy objective in bits; ``exact`` re-derives it via jacobi_eigh."""
        rhos = [_marginal_array(unit, j) for j in range(k)]
        if mode == "sym":
            avg = sum(rhos) / k
            values = jacobi_eigh(avg) if exact else _hermitian_values(avg, 1e-12, 60)
            return _entropy_bits(values)
        total = 0.0
        for rho in rhos:
            values = jacobi_eigh(rho) if exact else _hermitian_values(rho, 1e-12, 60)
            total += _entropy_bits(values)
        return total / k

    def objective(x: np.ndarray) -> Tuple[float, float]:
        """(entropy objective in bits, barrier-augmented value); -inf if bad."""
        maps = _unpack(x, n_maps, d)
        unit = transformed_unit(maps)
        if unit is None:
            return -math.inf, -math.inf
        try:
            pure = entropies(unit, exact=False)
        except RuntimeError:
            return -math.inf, -math.inf
        pen = _barrier(maps, d)
        if not math.isfinite(pen):
            return -math.inf, -math.inf
        return pure, pure + opts.barrier * pen

    def gradient(x: np.ndarray, at_value: float) -> np.ndarray:
        h = opts.gradient_step
        grad = np.zeros_like(x)
        for i in range(x.size):
            saved = x[i]
            x[i] = saved + h
            _, up = objective(x)
            x[i] = saved
            value = (up - at_value) / h
            grad[i] = value if math.isfinite(value) else 0.0
        return grad

    def ascend(x: np.ndarray) -> Optional[Tuple[float, np.ndarray, int, float]]:
        pure, aug = objective(x)
        if not math.isfinite(aug):
            return None
        best_pure, best_x = pure, x.copy()
        iterations = 0
        gnorm = 0.0
        for _ in range(opts.iterations):
            grad = gradient(x, aug)
            gnorm = float(np.linalg.norm(grad))
            iterations += 1
            if gnorm < 1e-12:
                break
            direction = grad / gnorm
            size = opts.step
            delta = -1.0
            while size > 1e-12:
                cand = x + size * direction
                cand_pure, cand_aug = objective(cand)
                if math.isfinite(cand_aug) and cand_aug > aug:
                    delta = cand_aug - aug
                    x, pure, aug = cand, cand_pure, cand_aug
                    break
                size /= 2
            if delta < 0:
                break
            if pure > best_pure:
                best_pure, best_x = pure, x.copy()
            if delta < opts.tolerance:
                break
        return best_pure, best_x, iterations, gnorm

    eye = np.eye(d, dtype=np.complex128)
    starts: List[np.ndarray] = []
    if opts.initial is not None:
        given = tuple(np.array(g, dtype=np.complex128) for g in opts.initial)
        if len(given) != n_maps or any(g.shape != (d, d) for g in given):
            raise QuantumError(
                f"initial point needs {n_maps} map(s) of shape {d}x{d}"
            )
        starts.append(_pack(given))
    else:
        starts.append(_pack([eye] * n_maps))
    for idx in range(1, opts.restarts + 1):
        rng = np.random.default_rng([opts.seed, idx])
        for _ in range(10):
            maps0 = [
                eye + 0.25 * (rng.standard_normal((d, d))
                              + 1j * rng.standard_normal((d, d)))
                for _ in range(n_maps)
            ]
            if math.isfinite(_barrier(maps0, d)):
                starts.append(_pack(maps0))
                break
        else:
            raise RuntimeError(
                "optimizer could not draw a finite starting point after 10 tries"
            )

    best: Optional[Tuple[float, np.ndarray, float]] = None
    total_iterations = 0
    for x0 in starts:
        outcome = ascend(x0)
        if outcome is None:
            continue
        pure, x_best, iterations, gnorm = outcome
        total_iterations += iterations
        if best is None or pure > best[0]:
            best = (pure, x_best, gnorm)
    if best is None:
        raise RuntimeError("optimizer produced no finite value from any start")

    _, x_best, gnorm = best
    maps = _unpack(x_best, n_maps, d)
    unit = transformed_unit(maps)
    assert unit is not None
    entropy = entropies(unit, exact=True)
    avg = sum(_marginal_array(unit, j) for j in range(k)) / k
    spectrum = tuple(max(float(v), 0.0) for v in jacobi_eigh(avg))
    for g in maps:
        g.setflags(write=False)
    point = OrbitPoint(
        source_id=tensor_id(f),
        maps=tuple(maps),
        tensor=Tensor(ComplexNumbers(), unit),
        spectrum=spectrum,
    )
    return QuantumFunctionalResult(
        value=float(2.0 ** entropy),
        point=point,
        restarts=len(starts),
        iterations=total_iterations,
        gradient_norm=gnorm,
    )


def sym_quantum_functional(
    f: Tensor, options: Optional[OptimizerOptions] = None
) -> QuantumFunctionalResult:
    """Lower estimate of F(f) = 2^E(f): entropy of the averaged marginal,
    maximized over one invertible map acting on every leg.

    The supremum runs over an orbit closure, which no finite ascent
    certifies; the result is labeled a lower estimate accordingly.
    """
    return _orbit_optimize(f, "sym", options)


def uniform_quantum_functional(
    f: Tensor, options: Optional[OptimizerOptions] = None
) -> QuantumFunctionalResult:
    """Lower estimate of the uniform quantum functional: the average of the
    k marginal entropies, maximized over k independent invertible maps."""
    return _orbit_optimize(f, "uniform", options)


# ---------------------------------------------------------------------------
# pointwise checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SandwichReport:
    """Concavity sandwich at one point, with nonnegative slacks.

    entropy_of_average  H of the averaged marginal,
    mean_entropy        average of the per-leg marginal entropies,
    and the two slack values of
    mean_entropy <= entropy_of_average <= mean_entropy + log2(k).
    """

    entropy_of_average: float
    mean_entropy: float
    log_k: float
    concavity_slack: float
    upper_slack: float


def sandwich_check(f: Tensor, point: Optional[OrbitPoint] = None) -> SandwichReport:
    """Check the two-sided entropy sandwich at an orbit point of f.

    Without an explicit point the normalized tensor itself is used.  A slack
    below -1e-9 on either side is a numeric violation and raises.
    """
    if point is not None:
        arr = np.asarray(point.tensor.array, dtype=np.complex128)
    else:
        arr = _complex_array(f, "sandwich check")
    n2 = float(np.sum(np.abs(arr) ** 2))
    if n2 <= 1e-300:
        raise QuantumError("zero tensor has no sandwich check")
    unit = arr / math.sqrt(n2)
    k = unit.ndim
    rhos = [_marginal_array(unit, j) for j in range(k)]
    mean_entropy = sum(_entropy_bits(jacobi_eigh(r)) for r in rhos) / k
    entropy_avg = _entropy_bits(jacobi_eigh(sum(rhos) / k))
    log_k = math.log2(k)
    concavity = entropy_avg - mean_entropy
    upper = mean_entropy + log_k - entropy_avg
    if concavity < -1e-9:
        raise ArithmeticError(
            f"sandwich violation: H(avg) - avg H = {concavity:.3e} < -1e-9"
        )
    if upper < -1e-9:
        raise ArithmeticError(
            f"sandwich violation: avg H + log2 k - H(avg) = {upper:.3e} < -1e-9"
        )
    return SandwichReport(
        entropy_of_average=entropy_avg,
        mean_entropy=mean_entropy,
        log_k=log_k,
        concavity_slack=concavity,
        upper_slack=upper,
    )


def marginal_equality_check(f: Tensor) -> float:
    """Max entrywise deviation of any marginal from the first one.

    Symmetric tensors have all marginals equal, so the return value is a
    diagnostic: at most ~1e-12 on symmetric input, possibly large otherwise.
    """
    arr = _complex_array(f, "marginal equality check")
    if float(np.sum(np.abs(arr) ** 2)) <= 1e-300:
        raise QuantumError("zero tensor has no marginals")
    first = _marginal_array(arr, 0)
    worst = 0.0
    for j in range(1, arr.ndim):
        dev = float(np.max(np.abs(_marginal_array(arr, j) - first), initial=0.0))
        worst = max(worst, dev)
    return worst
