"""Decision procedures for restriction and symmetric restriction.

Everything here answers questions of the form "is g reachable from f by
linear maps on the legs?" and returns a re-verifiable :class:`Certificate`
(or a refutation by exhaustion).  Exhaustive searches run over prime fields
only and respect a hard candidate budget: exceeding it raises
:class:`SearchInfeasibleError`, never a silent "no".

Determinism: candidate maps are enumerated row-major lexicographically over
their entries, and the first certificate found is returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .domains import Domain, DomainError, PrimeField, pack_bits, parity
from .tensors import (
    LinearMap,
    Tensor,
    apply,
    apply_sym,
    flattening_rank,
    is_symmetric,
    map_from_json,
    map_to_json,
    matrix_rank,
    support,
    tensor_from_json,
    tensor_to_json,
    tensors_equal,
    unit_tensor,
)

__all__ = [
    "DEFAULT_BUDGET",
    "SearchInfeasibleError",
    "Certificate",
    "verify_certificate",
    "certificate_to_json",
    "certificate_from_json",
    "symrestriction_exists",
    "restriction_exists",
    "symsubrank_exact",
    "subrank_exact",
    "SymrankResult",
    "symrank_small",
    "reconstruct_waring",
]

DEFAULT_BUDGET = 1 << 26


class SearchInfeasibleError(RuntimeError):
    """The exhaustive search would exceed the candidate budget."""

    def __init__(self, required: int, budget: int, what: str):
        super().__init__(
            f"search-infeasible: {what} needs {required} candidates, "
            f"budget is {budget}"
        )
        self.required = required
        self.budget = budget


@dataclass(frozen=True)
class Certificate:
    """A verified witness of g <= f (restriction) or g <=_s f (symmetric).

    For ``kind == "symmetric-restriction"`` there is exactly one map, applied
    to every leg; for ``kind == "restriction"`` there is one map per leg.
    """

    kind: str
    maps: Tuple[LinearMap, ...]
    target: Tensor

    def __post_init__(self):
        if self.kind not in ("restriction", "symmetric-restriction"):
            raise ValueError(f"unknown certificate kind: {self.kind!r}")
        if self.kind == "symmetric-restriction" and len(self.maps) != 1:
            raise ValueError("symmetric-restriction certificates carry one map")


def verify_certificate(cert: Certificate, f: Tensor) -> bool:
    """Re-apply the certificate's maps to f and compare with its target."""
    if cert.kind == "symmetric-restriction":
        result = apply_sym(cert.maps[0], f)
    else:
        result = apply(list(cert.maps), f)
    return tensors_equal(result, cert.target)


def certificate_to_json(cert: Certificate) -> dict:
    return {
        "kind": cert.kind,
        "target": tensor_to_json(cert.target),
        "maps": [map_to_json(m) for m in cert.maps],
    }


def certificate_from_json(obj: dict) -> Certificate:
    try:
        kind = obj["kind"]
        target = tensor_from_json(obj["target"])
        maps = tuple(map_from_json(m) for m in obj["maps"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed certificate JSON: {exc}") from exc
    return Certificate(kind=kind, maps=maps, target=target)


# ---------------------------------------------------------------------------
# symmetric restriction: one map, exhaustive DFS over its rows
# ---------------------------------------------------------------------------

def symrestriction_exists(
    g: Tensor, f: Tensor, budget: int = DEFAULT_BUDGET
) -> Optional[Certificate]:
    """Search for A with A^{(x)k} f = g; None after exhaustive refutation.

    Prime fields only.  Rows of A are extended one at a time in lexicographic
    order; a partial map survives only while every already-determined entry
    of the image matches g.
    """
    _check_search_pair(g, f)
    domain = f.domain
    k = f.order
    e, d = g.dims[0], f.dims[0]
    p = domain.p
    required = p ** (e * d)
    if required > budget:
        raise SearchInfeasibleError(required, budget, f"map search over F_{p}^({e}x{d})")
    if e == 0:
        return _certified_sym(np.zeros((0, d), dtype=np.int64), g, f)
    # Flattening ranks never increase under restriction.
    for leg in range(k):
        if flattening_rank(g, [leg]) > flattening_rank(f, [leg]):
            return None
    if p == 2 and k == 2:
        rows = _sym_dfs_f2_matrix(g.array, f.array, e, d)
    else:
        rows = _sym_dfs(g.array, f.array, e, d, domain)
    if rows is None:
        return None
    return _certified_sym(np.array(rows, dtype=np.int64), g, f)


def _check_search_pair(g: Tensor, f: Tensor) -> None:
    if g.order != f.order:
        raise ValueError(f"order mismatch: {g.order} vs {f.order}")
    if g.order < 2:
        raise ValueError("symmetric restriction search needs order >= 2")
    if g.domain != f.domain:
        raise DomainError(f"domain mismatch: {g.domain.name} vs {f.domain.name}")
    if not (f.is_cubical and g.is_cubical):
        raise ValueError("symmetric restriction needs cubical tensors")
    if not isinstance(f.domain, PrimeField):
        raise DomainError("exhaustive search runs over prime fields only")


def _certified_sym(rows: np.ndarray, g: Tensor, f: Tensor) -> Certificate:
    cert = Certificate(
        kind="symmetric-restriction",
        maps=(LinearMap(f.domain, rows),),
        target=g,
    )
    if not verify_certificate(cert, f):
        raise RuntimeError("internal error: search produced an invalid certificate")
    return cert


def _sym_dfs(
    G: np.ndarray, F: np.ndarray, e: int, d: int, domain: PrimeField
) -> Optional[List[Tuple[int, ...]]]:
    """Generic row-by-row DFS.  Accepted row i must satisfy every image
    entry whose index tuple has maximum coordinate i."""
    p = domain.p
    k = F.ndim
    cand_tuples = list(itertools.product(range(p), repeat=d))
    cand_arrs = [np.array(c, dtype=np.int64) for c in cand_tuples]
    chosen: List[int] = []
    arrs: List[np.ndarray] = []
    slices: List[np.ndarray] = []  # F contracted with each row on the last leg

    def value(jvec: Tuple[int, ...]) -> int:
        t = slices[jvec[k - 1]]
        for pos in range(k - 2, 0, -1):
            t = (t @ arrs[jvec[pos]]) % p
        return int((arrs[jvec[0]] @ t) % p)

    def extend(i: int) -> bool:
        for ci, cand in enumerate(cand_arrs):
            arrs.append(cand)
            slices.append(np.tensordot(F, cand, axes=([k - 1], [0])) % p)
            ok = all(
                value(jvec) == int(G[jvec]) % p
                for jvec in itertools.product(range(i + 1), repeat=k)
                if max(jvec) == i
            )
            if ok:
                chosen.append(ci)
                if i + 1 == e or extend(i + 1):
                    return True
                chosen.pop()
            arrs.pop()
            slices.pop()
        return False

    return [cand_tuples[ci] for ci in chosen] if extend(0) else None


def _sym_dfs_f2_matrix(
    G: np.ndarray, F: np.ndarray, e: int, d: int
) -> Optional[List[Tuple[int, ...]]]:
    """Bit-packed DFS for the F_2 matrix case (rows as ints, parity tests)."""
    frow = [pack_bits(F[i] % 2) for i in range(d)]
    # Candidate vectors in the same tuple-lex order as the generic path.
    cand_tuples = list(itertools.product((0, 1), repeat=d))
    masks = [pack_bits(t) for t in cand_tuples]
    # fv[ci] = bit-vector over row index r of parity(F[r] & mask)  (= F @ v)
    fv = []
    for m in masks:
        w = 0
        for r in range(d):
            if parity(frow[r] & m):
                w |= 1 << r
        fv.append(w)
    chosen: List[int] = []

    def extend(i: int) -> bool:
        for ci, m in enumerate(masks):
            fm = fv[ci]
            if parity(m & fm) != int(G[i, i]) & 1:
                continue
            ok = True
            for j, cj in enumerate(chosen):
                if parity(masks[cj] & fm) != int(G[j, i]) & 1:
                    ok = False
                    break
                if parity(m & fv[cj]) != int(G[i, j]) & 1:
                    ok = False
                    break
            if not ok:
                continue
            chosen.append(ci)
            if i + 1 == e or extend(i + 1):
                return True
            chosen.pop()
        return False

    if not extend(0):
        return None
    return [cand_tuples[ci] for ci in chosen]


# ---------------------------------------------------------------------------
# restriction: independent maps, leg-by-leg DFS with a linear last leg
# ---------------------------------------------------------------------------

def restriction_exists(
    g: Tensor, f: Tensor, budget: int = DEFAULT_BUDGET
) -> Optional[Certificate]:
    """Search for per-leg maps with (A1 (x) ... (x) Ak) f = g.

    Order 2 is constructive over any domain (rank normal forms).  Higher
    orders enumerate maps for legs 1..k-1 lexicographically, prune by a
    column-space test on the partially applied tensor, and solve the last
    leg linearly.
    """
    if g.order != f.order:
        raise ValueError(f"order mismatch: {g.order} vs {f.order}")
    if g.domain != f.domain:
        raise DomainError(f"domain mismatch: {g.domain.name} vs {f.domain.name}")
    k = f.order
    if k < 2:
        raise ValueError("restriction search needs order >= 2")
    if k == 2:
        return _matrix_restriction(g, f)
    if not isinstance(f.domain, PrimeField):
        raise DomainError(
            "exhaustive restriction search (order >= 3) runs over prime fields only"
        )
    for leg in range(k):
        if flattening_rank(g, [leg]) > flattening_rank(f, [leg]):
            return None
    p = f.domain.p
    required = 1
    for leg in range(k - 1):
        required *= p ** (g.dims[leg] * f.dims[leg])
    if required > budget:
        raise SearchInfeasibleError(required, budget, "leg-by-leg map search")
    maps = _restriction_dfs(g, f)
    if maps is None:
        return None
    cert = Certificate(kind="restriction", maps=tuple(maps), target=g)
    if not verify_certificate(cert, f):
        raise RuntimeError("internal error: search produced an invalid certificate")
    return cert


def _matrix_restriction(g: Tensor, f: Tensor) -> Optional[Certificate]:
    """Constructive matrix case via rank normal forms P M Q = I_r (+) 0."""
    domain = f.domain
    rg = matrix_rank(g)
    rf = matrix_rank(f)
    if rg > rf:
        return None
    Pf, Qf, _ = linalg.equivalence_diagonalize(f.array, domain)
    Pg, Qg, _ = linalg.equivalence_diagonalize(g.array, domain)
    Pg_inv = linalg.invert(Pg, domain)
    Qg_inv = linalg.invert(Qg, domain)
    assert Pg_inv is not None and Qg_inv is not None
    E1 = domain.zeros((g.dims[0], f.dims[0]))
    E2 = domain.zeros((f.dims[1], g.dims[1]))
    for i in range(rg):
        E1[i, i] = 1
        E2[i, i] = 1
    A1 = domain.reduce(Pg_inv @ E1 @ Pf)
    A2 = domain.reduce(Qf @ E2 @ Qg_inv).T
    cert = Certificate(
        kind="restriction",
        maps=(LinearMap(domain, A1), LinearMap(domain, A2)),
        target=g,
    )
    if not verify_certificate(cert, f):
        raise RuntimeError("internal error: rank-normal-form certificate failed")
    return cert


def _enumerate_maps(e: int, d: int, p: int):
    """All e x d maps over F_p in row-major lexicographic entry order."""
    for entries in itertools.product(range(p), repeat=e * d):
        yield np.array(entries, dtype=np.int64).reshape(e, d)


def _restriction_dfs(g: Tensor, f: Tensor) -> Optional[List[LinearMap]]:
    domain = f.domain
    k = f.order
    garr = g.array

    def descend(leg: int, partial: np.ndarray) -> Optional[List[np.ndarray]]:
        if leg == k - 1:
            X = _solve_last_leg(garr, partial, domain)
            return None if X is None else [X]
        e, d = garr.shape[leg], f.dims[leg]
        for A in _enumerate_maps(e, d, domain.p):
            nxt = np.tensordot(A, partial, axes=([1], [leg]))
            nxt = domain.reduce(np.moveaxis(nxt, 0, leg))
            # prune: flatten fixed legs 0..leg as rows; g's columns must lie
            # in the span of the partial tensor's columns
            rows = int(np.prod(garr.shape[: leg + 1]))
            Tf = nxt.reshape(rows, -1)
            Gf = garr.reshape(rows, -1)
            if not linalg.columns_contained(Tf, Gf, domain):
                continue
            rest = descend(leg + 1, nxt)
            if rest is not None:
                return [A] + rest
        return None

    arrays = descend(0, f.array)
    if arrays is None:
        return None
    return [LinearMap(domain, a) for a in arrays]


def _solve_last_leg(
    garr: np.ndarray, partial: np.ndarray, domain: Domain
) -> Optional[np.ndarray]:
    """Solve for the final map X in (I (x) ... (x) X) t = g linearly."""
    k = garr.ndim
    e, d = garr.shape[k - 1], partial.shape[k - 1]
    T2 = partial.reshape(-1, d)
    G2 = garr.reshape(-1, e)
    Xt = linalg.solve(T2, G2, domain)
    if Xt is None:
        return None
    return domain.reduce(Xt.T)


# ---------------------------------------------------------------------------
# subrank / symmetric subrank
# ---------------------------------------------------------------------------

def symsubrank_exact(
    f: Tensor, budget: int = DEFAULT_BUDGET
) -> Tuple[int, Certificate]:
    """Largest r with a verified <r> <=_s f certificate (search from d down)."""
    if not f.is_cubical:
        raise ValueError("symmetric subrank needs a cubical tensor")
    if not isinstance(f.domain, PrimeField):
        raise DomainError("symsubrank_exact runs over prime fields only")
    d = f.dims[0]
    k = f.order
    for r in range(d, 0, -1):
        cert = symrestriction_exists(unit_tensor(r, k, f.domain), f, budget)
        if cert is not None:
            return r, cert
    return 0, _certified_sym(
        np.zeros((0, d), dtype=np.int64), unit_tensor(0, k, f.domain), f
    )


def subrank_exact(f: Tensor, budget: int = DEFAULT_BUDGET) -> Tuple[int, Certificate]:
    """Largest r with a verified <r> <= f certificate."""
    k = f.order
    if k == 2:
        r = matrix_rank(f)
        cert = _matrix_restriction(unit_tensor(r, 2, f.domain), f)
        assert cert is not None
        return r, cert
    if not isinstance(f.domain, PrimeField):
        raise DomainError("subrank_exact (order >= 3) runs over prime fields only")
    for r in range(min(f.dims), 0, -1):
        cert = restriction_exists(unit_tensor(r, k, f.domain), f, budget)
        if cert is not None:
            return r, cert
    maps = tuple(
        LinearMap(f.domain, np.zeros((0, dl), dtype=np.int64)) for dl in f.dims
    )
    cert = Certificate(kind="restriction", maps=maps, target=unit_tensor(0, k, f.domain))
    assert verify_certificate(cert, f)
    return 0, cert


# ---------------------------------------------------------------------------
# small symmetric (Waring) rank by meet-in-the-middle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymrankResult:
    """Outcome of the small symmetric-rank search.

    ``value`` is None when the budget ran out before a witness was found
    ("unknown" is a value, not an error); ``lower_bound`` always holds.
    """

    value: Optional[int]
    lower_bound: int
    vectors: Optional[np.ndarray]


def symrank_small(f: Tensor, budget: int = DEFAULT_BUDGET) -> SymrankResult:
    """Least r with f = sum of r k-th powers of vectors, by exhaustion.

    Searches r upward from the flattening-rank lower bound, enumerating
    multisets of vectors meet-in-the-middle (half-sums are hashed).  The
    half enumeration size p^(d * ceil(r/2)) must stay within budget.
    """
    if not f.is_cubical:
        raise ValueError("symmetric rank needs a cubical tensor")
    if not is_symmetric(f):
        raise ValueError("symrank_small needs a symmetric tensor")
    if not isinstance(f.domain, PrimeField):
        raise DomainError("symrank_small runs over prime fields only")
    domain = f.domain
    p, d, k = domain.p, f.dims[0], f.order
    if not support(f):
        return SymrankResult(value=0, lower_bound=0, vectors=np.zeros((0, d), np.int64))
    lower = flattening_rank(f, [0])
    vectors = [
        np.array(v, dtype=np.int64)
        for v in itertools.product(range(p), repeat=d)
    ][1:]  # drop the zero vector
    powers = []
    for v in vectors:
        pw = v
        for _ in range(k - 1):
            pw = np.multiply.outer(pw, v) % p
        powers.append(pw.reshape(-1))
    target = f.array.reshape(-1) % p
    r = max(lower, 1)
    while True:
        half = (r + 1) // 2
        if p ** (d * half) > budget:
            return SymrankResult(value=None, lower_bound=lower, vectors=None)
        if r > len(vectors):
            return SymrankResult(value=None, lower_bound=lower, vectors=None)
        found = _mitm_decompose(target, powers, r, half, p)
        if found is not None:
            vecs = np.array([vectors[i] for i in found], dtype=np.int64)
            return SymrankResult(value=r, lower_bound=lower, vectors=vecs)
        r += 1


def reconstruct_waring(vectors: np.ndarray, f: Tensor) -> bool:
    """Check that the k-th powers of the given vectors sum to f exactly."""
    domain = f.domain
    k = f.order
    total = np.zeros_like(f.array)
    for v in vectors:
        pw = domain.asarray(v)
        for _ in range(k - 1):
            pw = domain.reduce(np.multiply.outer(pw, domain.asarray(v)))
        total = domain.reduce(total + pw)
    return domain.arrays_equal(total, f.array)


def _mitm_decompose(
    target: np.ndarray, powers: List[np.ndarray], r: int, a: int, p: int
) -> Optional[Tuple[int, ...]]:
    """Find r power indices (multiset) summing to target, split a + (r-a)."""
    b = r - a
    sums_b: Dict[bytes, Tuple[int, ...]] = {}
    if b == 0:
        sums_b[np.zeros_like(target).tobytes()] = ()
    else:
        for combo in itertools.combinations_with_replacement(range(len(powers)), b):
            s = np.zeros_like(target)
            for i in combo:
                s = (s + powers[i]) % p
            key = s.tobytes()
            if key not in sums_b:
                sums_b[key] = combo
    for combo in itertools.combinations_with_replacement(range(len(powers)), a):
        s = np.zeros_like(target)
        for i in combo:
            s = (s + powers[i]) % p
        need = (target - s) % p
        match = sums_b.get(need.tobytes())
        if match is not None:
            return combo + match
    return None
