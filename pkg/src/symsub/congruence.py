"""Constructive matrix congruence.

Centerpiece is a constructive form of Ballantine's theorem (1968): every
square matrix over a field with at least three elements that is not a
nonzero skew matrix with zero diagonal is congruent (B f B^T) to a lower
triangular matrix with exactly rank(f) nonzero diagonal entries.  The
classical proof is nonconstructive for our purposes, so the reduction here
is its own pivot-projection algorithm whose output contract is verified
after the fact; failures trigger seeded randomized restarts.

On top of it: symmetric diagonalization to I_r (+) 0 (square roots
permitting), exact-or-bounded matrix symmetric subrank, and the
diagonal principal-subtensor certificate for powers of triangular matrices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from . import linalg
from .domains import ComplexNumbers, Domain, PrimeField
from .restrict import (
    DEFAULT_BUDGET,
    Certificate,
    symsubrank_exact,
    verify_certificate,
)
from .tensors import (
    LinearMap,
    Tensor,
    is_symmetric,
    map_to_json,
    matrix_rank,
    unit_tensor,
)

__all__ = [
    "CongruenceError",
    "SkewInputError",
    "DomainTooSmallError",
    "PivotSearchExhaustedError",
    "MissingSquareRootError",
    "CongruenceResult",
    "is_skew_zero_diag",
    "ballantine_reduce",
    "SymDiagResult",
    "sym_diagonalize",
    "MatrixSymsubrankResult",
    "matrix_symsubrank",
    "PowerDiagResult",
    "power_diag_certificate",
    "congruence_result_to_json",
]

MAX_RESTARTS = 64
MAX_STEPS_FACTOR = 8  # iteration cap per attempt: 8*d + 16


class CongruenceError(ValueError):
    pass


class SkewInputError(CongruenceError):
    """Nonzero skew matrix with zero diagonal: excluded by the theorem."""


class DomainTooSmallError(CongruenceError):
    """F_2 has too few elements for the congruence constructions."""


class PivotSearchExhaustedError(RuntimeError):
    """No pivot found after all randomized restarts (internal failure)."""


class MissingSquareRootError(CongruenceError):
    """A diagonal entry has no square root in the field.

    Carries the partial result: ``partial_B`` and ``partial_D`` give the
    diagonal congruence form reached before scaling failed, and
    ``failed_indices`` lists the diagonal positions without a root.
    """

    def __init__(self, msg: str, partial_B: np.ndarray, partial_D: np.ndarray,
                 failed_indices: List[int]):
        super().__init__(msg)
        self.partial_B = partial_B
        self.partial_D = partial_D
        self.failed_indices = failed_indices


@dataclass(frozen=True)
class CongruenceResult:
    """B f B^T = L with B invertible, L lower triangular."""

    B: LinearMap
    L: Tensor
    diag_nonzeros: int


def congruence_result_to_json(res: CongruenceResult) -> dict:
    from .tensors import tensor_to_json

    return {
        "B": map_to_json(res.B),
        "L": tensor_to_json(res.L),
        "diagNonzeros": res.diag_nonzeros,
    }


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------

def _require_square(f: Tensor) -> int:
    if f.order != 2 or f.dims[0] != f.dims[1]:
        raise ValueError(f"need a square matrix, got dims {f.dims}")
    return f.dims[0]


def is_skew_zero_diag(f: Tensor) -> bool:
    """True iff f has zero diagonal and f_ij = -f_ji everywhere."""
    d = _require_square(f)
    arr = f.array
    domain = f.domain
    if isinstance(domain, PrimeField):
        p = domain.p
        if np.any(np.diagonal(arr) % p != 0):
            return False
        return bool(np.all((arr + arr.T) % p == 0))
    if np.any(np.abs(np.diagonal(arr)) > domain.tol):
        return False
    return bool(np.max(np.abs(arr + arr.T)) <= domain.tol) if d else True


def _is_zero_matrix(f: Tensor) -> bool:
    if isinstance(f.domain, PrimeField):
        return bool(np.all(f.array % f.domain.p == 0))
    return f.array.size == 0 or bool(np.max(np.abs(f.array)) <= f.domain.tol)


# ---------------------------------------------------------------------------
# Ballantine reduction
# ---------------------------------------------------------------------------

def ballantine_reduce(f: Tensor, seed: int = 0) -> CongruenceResult:
    """Congruence-triangularize f: find invertible B with B f B^T lower
    triangular and exactly rank(f) nonzero diagonal entries.

    Pivot strategy: repeatedly pick u in the remaining space with quadratic
    value q(u) = u f u^T != 0 (first among the basis vectors carried so
    far, then pairwise sums, then scaled sums); annihilate the pivot's
    bilinear pairing with the rest of the space by the projection
    z <- z - (f(u,z)/q(u)) u; recurse.  A remainder on which q vanishes
    identically is a skew block; it is broken by mixing the last processed
    pivot back in (q(w + c p) = c f(w,p) + c^2 q(p) is nonzero for a good
    scalar c), demoting that pivot into the space.  The output contract is
    re-verified; on failure the input is randomly pre-mixed and the
    reduction restarted (up to 64 seeded restarts).
    """
    d = _require_square(f)
    domain = f.domain
    if isinstance(domain, PrimeField) and domain.p == 2:
        raise DomainTooSmallError("domain too small: congruence needs |F| >= 3")
    if is_skew_zero_diag(f) and not _is_zero_matrix(f):
        raise SkewInputError("skew input: nonzero skew matrix with zero diagonal")
    expected_rank = matrix_rank(f)
    for attempt in range(MAX_RESTARTS + 1):
        if attempt == 0:
            pre = np.eye(d, dtype=domain.dtype)
        else:
            pre = _random_invertible(d, domain, seed, attempt)
        farr = domain.reduce(pre @ f.array @ pre.T)
        rows = _reduce_attempt(farr, domain)
        if rows is None:
            continue
        B = domain.reduce(np.array(rows) @ pre) if d else pre
        L = domain.reduce(B @ f.array @ B.T)
        result = _validated(f, B, L, expected_rank, domain)
        if result is not None:
            return result
    raise PivotSearchExhaustedError(
        f"pivot search exhausted after {MAX_RESTARTS} restarts"
    )


def _validated(
    f: Tensor, B: np.ndarray, L: np.ndarray, expected_rank: int, domain: Domain
) -> Optional[CongruenceResult]:
    d = B.shape[0]
    if linalg.rank(B, domain) != d:
        return None
    if isinstance(domain, PrimeField):
        p = domain.p
        if np.any(np.triu(L, 1) % p != 0):
            return None
        nz = int(np.sum(np.diagonal(L) % p != 0))
    else:
        scale = max(1.0, float(np.max(np.abs(f.array))) if f.array.size else 1.0)
        cut = domain.tol * scale * 100
        if d and np.max(np.abs(np.triu(L, 1))) > cut:
            return None
        L = np.tril(L)  # clean numeric dust strictly above the diagonal
        nz = int(np.sum(np.abs(np.diagonal(L)) > cut))
    if nz != expected_rank:
        return None
    return CongruenceResult(
        B=LinearMap(domain, B), L=Tensor(domain, L), diag_nonzeros=nz
    )


def _random_invertible(d: int, domain: Domain, seed: int, attempt: int) -> np.ndarray:
    rng = np.random.default_rng([seed, attempt])
    for _ in range(64):
        if isinstance(domain, PrimeField):
            M = rng.integers(0, domain.p, (d, d)).astype(np.int64)
        else:
            M = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        if linalg.rank(M, domain) == d:
            return domain.asarray(M)
    return np.eye(d, dtype=domain.dtype)


def _reduce_attempt(farr: np.ndarray, domain: Domain) -> Optional[List[np.ndarray]]:
    """One reduction pass.  Returns the rows of B (pivots then remainder),
    or None when the step cap is hit."""
    d = farr.shape[0]

    def q(u):
        return domain.normalize(u @ farr @ u)

    def fl(u, v):  # bilinear value with u on the row side
        return domain.normalize(u @ farr @ v)

    space = [np.eye(d, dtype=domain.dtype)[i] for i in range(d)]
    pivots: List[np.ndarray] = []
    steps_left = MAX_STEPS_FACTOR * d + 16
    while space:
        steps_left -= 1
        if steps_left < 0:
            return None
        found = _find_pivot(space, q, domain)
        if found is not None:
            u, carrier = found
            space.pop(carrier)
        else:
            if _block_is_zero(space, fl, domain):
                break  # trailing zero block; remaining rows go in as-is
            if not pivots:
                return None  # cannot happen for non-skew input
            u = _mix_with_last_pivot(space, pivots, q, fl, domain)
            if u is None:
                return None
        _annihilate(space, u, q(u), fl, domain)
        pivots.append(u)
    return pivots + space


def _candidate_scalars(domain: Domain) -> List:
    if isinstance(domain, PrimeField):
        return list(range(2, domain.p))
    return [-1.0, 2.0, 1j]


def _find_pivot(space, q, domain) -> Optional[Tuple[np.ndarray, int]]:
    """First (prime fields) or largest-|q| (complex) vector with q != 0,
    scanning basis vectors, pairwise sums, then scaled sums.

    Returns the pivot together with the index of a space vector carried
    with coefficient one, which the caller removes to keep pivots plus
    space a basis.
    """
    candidates: List[Tuple[np.ndarray, int]] = []
    n = len(space)
    for i, z in enumerate(space):
        candidates.append((z, i))
    for i in range(n):
        for j in range(i + 1, n):
            candidates.append((domain.reduce(space[i] + space[j]), i))
    for c in _candidate_scalars(domain):
        for i in range(n):
            for j in range(n):
                if i != j:
                    candidates.append((domain.reduce(space[i] + c * space[j]), i))
    if isinstance(domain, PrimeField):
        for u, i in candidates:
            if q(u) != 0:
                return u, i
        return None
    scale = max(1.0, max(float(np.max(np.abs(u))) for u, _ in candidates))
    best, best_q = None, domain.tol * scale
    for u, i in candidates:
        qu = abs(q(u))
        if qu > best_q:
            best, best_q = (u, i), qu
    return best


def _block_is_zero(space, fl, domain) -> bool:
    for zi in space:
        for zj in space:
            if not domain.is_zero(fl(zi, zj)):
                return False
    return True


def _mix_with_last_pivot(space, pivots, q, fl, domain) -> Optional[np.ndarray]:
    """Break a nonzero skew remainder: u = w + c * p_last has
    q(u) = c f(w, p_last) + c^2 q(p_last), nonzero for a good c.

    Adjusts the bookkeeping itself: w leaves the space (it is carried by u
    with coefficient one) and the demoted pivot rejoins it.
    """
    p_last = pivots[-1]
    # pick w involved in a nonzero skew pairing when possible, else first
    w_idx = 0
    for i, zi in enumerate(space):
        if any(not domain.is_zero(fl(zi, zj)) for zj in space):
            w_idx = i
            break
    w = space[w_idx]
    for c in ([1] + _candidate_scalars(domain)):
        u = domain.reduce(w + c * p_last)
        if not domain.is_zero(q(u)):
            pivots.pop()
            space.pop(w_idx)
            space.append(p_last)
            return u
    return None


def _annihilate(space, u, qu, fl, domain) -> None:
    """Left-annihilate the space against the new pivot:
    z <- z - (f(u,z)/q(u)) u."""
    qu_inv = domain.inverse(qu)
    for i, z in enumerate(space):
        coeff = domain.normalize(fl(u, z) * qu_inv)
        if not domain.is_zero(coeff):
            space[i] = domain.reduce(z - coeff * u)


# ---------------------------------------------------------------------------
# symmetric diagonalization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymDiagResult:
    """B f B^T = I_r (+) 0 for a symmetric matrix f of rank r."""

    B: LinearMap
    D: Tensor
    rank: int


def sym_diagonalize(f: Tensor, seed: int = 0) -> SymDiagResult:
    """Congruence-diagonalize a symmetric matrix to I_r (+) 0.

    Triangularizing a symmetric matrix already yields a diagonal L (the
    congruence image is again symmetric); what remains is scaling each
    nonzero diagonal entry by an inverse square root and moving the
    nonzero entries to the front.  Over prime fields a needed root may not
    exist, in which case MissingSquareRootError carries the diagonal form
    reached so far.
    """
    d = _require_square(f)
    if not is_symmetric(f):
        raise CongruenceError("not symmetric")
    domain = f.domain
    res = ballantine_reduce(f, seed=seed)
    Larr = res.L.array
    diag = np.diagonal(Larr).copy()
    scales = np.ones(d, dtype=domain.dtype)
    nonzero: List[int] = []
    failed: List[int] = []
    for i in range(d):
        if domain.is_zero(diag[i]):
            continue
        nonzero.append(i)
        root = domain.sqrt(domain.inverse(diag[i]))
        if root is None:
            failed.append(i)
        else:
            scales[i] = root
    if failed:
        raise MissingSquareRootError(
            "missing square root: cannot normalize diagonal entries "
            f"{[domain.normalize(diag[i]) for i in failed]}",
            partial_B=res.B.array,
            partial_D=domain.reduce(np.diag(diag)),
            failed_indices=failed,
        )
    order = nonzero + [i for i in range(d) if i not in nonzero]
    B2 = domain.reduce((scales[:, None] * res.B.array)[order])
    D = domain.reduce(B2 @ f.array @ B2.T)
    r = len(nonzero)
    target = np.zeros((d, d), dtype=domain.dtype)
    target[:r, :r] = np.eye(r, dtype=domain.dtype)
    if isinstance(domain, PrimeField):
        ok = np.array_equal(D, target)
    else:
        ok = d == 0 or float(np.max(np.abs(D - target))) <= 1e-8
    if not ok:
        raise PivotSearchExhaustedError("internal error: diagonal form not reached")
    if isinstance(domain, ComplexNumbers):
        D = target  # exact I_r (+) 0; the comparison bounded the error
    return SymDiagResult(B=LinearMap(domain, B2), D=Tensor(domain, D), rank=r)


# ---------------------------------------------------------------------------
# matrix symmetric subrank
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MatrixSymsubrankResult:
    """Exact value or bounds for the symmetric subrank of a matrix.

    ``mode`` is "exact" (value set, lower == upper) or "bounds".  The
    certificate, when present, witnesses <lower> <=_s f.
    """

    mode: str
    lower: int
    upper: int
    value: Optional[int]
    certificate: Optional[Certificate]
    method: str


def matrix_symsubrank(
    f: Tensor, budget: int = DEFAULT_BUDGET, seed: int = 0
) -> MatrixSymsubrankResult:
    """Symmetric subrank of a square matrix, exact where a decision
    procedure applies and two-sided bounds otherwise.

    Exact cases: nonzero-skew/zero matrices (value 0); complex symmetric
    matrices (value rank, via diagonalization); prime fields with
    |F|^(d*d) within budget (exhaustive search).  Otherwise the lower
    bound comes from a greedy identity block inside the triangular
    congruence form and the upper bound is d, or d - 1 when f is not
    symmetric.
    """
    d = _require_square(f)
    domain = f.domain
    if is_skew_zero_diag(f):
        cert = Certificate(
            kind="symmetric-restriction",
            maps=(LinearMap(domain, np.zeros((0, d), dtype=domain.dtype)),),
            target=unit_tensor(0, 2, domain),
        )
        return MatrixSymsubrankResult(
            mode="exact", lower=0, upper=0, value=0,
            certificate=cert, method="skew-zero-diagonal",
        )
    symmetric = is_symmetric(f)
    if isinstance(domain, ComplexNumbers) and symmetric:
        res = sym_diagonalize(f, seed=seed)
        r = res.rank
        cert = Certificate(
            kind="symmetric-restriction",
            maps=(LinearMap(domain, res.B.array[:r]),),
            target=unit_tensor(r, 2, domain),
        )
        if not verify_certificate(cert, f):
            raise PivotSearchExhaustedError("internal error: certificate check failed")
        return MatrixSymsubrankResult(
            mode="exact", lower=r, upper=r, value=r,
            certificate=cert, method="symmetric-diagonalization",
        )
    if isinstance(domain, PrimeField) and domain.p ** (d * d) <= budget:
        value, cert = symsubrank_exact(f, budget)
        return MatrixSymsubrankResult(
            mode="exact", lower=value, upper=value, value=value,
            certificate=cert, method="exhaustive-search",
        )
    lower, cert = _greedy_identity_block(f, seed)
    upper = d if symmetric else d - 1
    return MatrixSymsubrankResult(
        mode="bounds", lower=lower, upper=upper, value=None,
        certificate=cert, method="triangular-block",
    )


def _greedy_identity_block(f: Tensor, seed: int) -> Tuple[int, Certificate]:
    """Lower bound: a subset S of triangular-form pivots that pair to zero
    with each other and admit inverse square roots gives <|S|> <=_s f."""
    domain = f.domain
    d = f.dims[0]
    if isinstance(domain, PrimeField) and domain.p == 2:
        # not skew over F_2: either some diagonal entry is nonzero, or the
        # matrix is asymmetric and e_i + e_j works where f_ij != f_ji
        rows = np.zeros((1, d), dtype=np.int64)
        diag = f.array.diagonal() % 2
        if np.any(diag != 0):
            rows[0, int(np.argmax(diag))] = 1
        else:
            asym = (f.array + f.array.T) % 2
            i, j = np.argwhere(asym != 0)[0]
            rows[0, int(i)] = rows[0, int(j)] = 1
        cert = Certificate(
            kind="symmetric-restriction",
            maps=(LinearMap(domain, rows),),
            target=unit_tensor(1, 2, domain),
        )
        assert verify_certificate(cert, f)
        return 1, cert
    res = ballantine_reduce(f, seed=seed)
    Larr = res.L.array
    chosen: List[int] = []
    scales: List = []
    for i in range(d):
        if domain.is_zero(Larr[i, i]):
            continue
        if any(not domain.is_zero(Larr[i, j]) for j in chosen):
            continue
        root = domain.sqrt(domain.inverse(Larr[i, i]))
        if root is None:
            continue
        chosen.append(i)
        scales.append(root)
    rows = domain.reduce(
        np.array(scales, dtype=domain.dtype)[:, None] * res.B.array[chosen]
    ) if chosen else np.zeros((0, d), dtype=domain.dtype)
    cert = Certificate(
        kind="symmetric-restriction",
        maps=(LinearMap(domain, rows),),
        target=unit_tensor(len(chosen), 2, domain),
    )
    if not verify_certificate(cert, f):
        raise PivotSearchExhaustedError("internal error: certificate check failed")
    return len(chosen), cert


# ---------------------------------------------------------------------------
# diagonal principal subtensors of powers of triangular matrices
# ---------------------------------------------------------------------------

MAX_POWER_ARRANGEMENTS = 8


@dataclass(frozen=True)
class PowerDiagResult:
    """A diagonal principal subtensor of L^(tensor n) of multinomial size.

    ``tuples`` lists the index tuples (0-based) of the balanced
    arrangements of the r triangular pivots, each used n/r times;
    ``merged_indices`` are their row-major positions in the n-th power.
    """

    pivots: List[int]
    tuples: List[Tuple[int, ...]]
    merged_indices: List[int]
    size: int
    diag_values: List


def power_diag_certificate(L: Tensor, n: int) -> PowerDiagResult:
    """Certify <size> <= L^(tensor n) by locating a diagonal principal
    subtensor: entries of the power at balanced pivot arrangements.

    For lower triangular L, the entry of the power at (T1, T2) is
    prod_t L[T1_t, T2_t], which vanishes unless T1_t >= T2_t for every t;
    two distinct arrangements of the same multiset always violate this in
    one coordinate, so the extracted block is diagonal with nonzero
    diagonal.  Every pair is checked by the product formula directly,
    without materializing the power.
    """
    d = _require_square(L)
    domain = L.domain
    arr = L.array
    if d and not (
        np.all(np.triu(arr, 1) % domain.p == 0)
        if isinstance(domain, PrimeField)
        else np.max(np.abs(np.triu(arr, 1))) <= domain.tol
    ):
        raise CongruenceError("matrix is not lower triangular")
    if n < 1:
        raise ValueError(f"need a positive power, got n={n}")
    if n > MAX_POWER_ARRANGEMENTS:
        raise ValueError(
            f"arrangement enumeration gated at n <= {MAX_POWER_ARRANGEMENTS}"
        )
    pivots = [i for i in range(d) if not domain.is_zero(arr[i, i])]
    r = len(pivots)
    if r == 0:
        raise CongruenceError("no nonzero diagonal entries")
    if n % r != 0:
        raise CongruenceError(f"diagonal count {r} does not divide the power {n}")
    base = tuple(p for p in pivots for _ in range(n // r))
    tuples = sorted(set(itertools.permutations(base)))
    size = math.factorial(n) // math.factorial(n // r) ** r
    assert len(tuples) == size
    diag_values = []
    for T1 in tuples:
        for T2 in tuples:
            val = domain.normalize(
                math.prod(int(arr[a, b]) for a, b in zip(T1, T2))
                if isinstance(domain, PrimeField)
                else np.prod([arr[a, b] for a, b in zip(T1, T2)])
            )
            if T1 == T2:
                if domain.is_zero(val):
                    raise PivotSearchExhaustedError(
                        "internal error: zero on the extracted diagonal"
                    )
                diag_values.append(val)
            elif not domain.is_zero(val):
                raise PivotSearchExhaustedError(
                    "internal error: extracted subtensor is not diagonal"
                )
    merged = [
        sum(t * d ** (n - 1 - pos) for pos, t in enumerate(T)) for T in tuples
    ]
    return PowerDiagResult(
        pivots=pivots,
        tuples=tuples,
        merged_indices=merged,
        size=size,
        diag_values=diag_values,
    )
