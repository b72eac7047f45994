"""Dense order-k tensors over a scalar domain, and their basic algebra.

A :class:`Tensor` is an immutable dense array tagged with a domain; a
:class:`LinearMap` is a rectangular matrix over the same kind of domain.
Module functions implement the operations every higher layer builds on:
unit tensors, products, direct sums, per-leg map application, leg
permutation, symmetry tests, supports, flattening ranks and matrix rank.

Conventions
-----------
* Indices are 0-based in code and 1-based in the JSON formats.
* ``tensor_product`` merges leg indices lexicographically:
  on leg ``j`` the pair ``(a, b)`` (0-based) maps to ``a * e_j + b`` where
  ``e_j`` is the second factor's dimension.  Certificates depend on this
  fixed merge order.
* Dense storage only; the total entry count is capped at 2**24.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from . import linalg
from .domains import ComplexNumbers, Domain, DomainError, PrimeField, domain_from_name

__all__ = [
    "ENTRY_CAP",
    "TensorSizeError",
    "Tensor",
    "LinearMap",
    "unit_tensor",
    "tensor_product",
    "tensor_power",
    "direct_sum",
    "apply",
    "apply_sym",
    "apply_sym_power",
    "permute_legs",
    "is_symmetric",
    "support",
    "flattening_rank",
    "matrix_rank",
    "tensors_equal",
    "kron",
    "identity_map",
    "tensor_to_json",
    "tensor_from_json",
    "tensor_id",
    "map_to_json",
    "map_from_json",
]

ENTRY_CAP = 1 << 24


class TensorSizeError(ValueError):
    """Dense materialization would exceed the 2**24 entry cap."""


def _check_cap(shape: Sequence[int]) -> None:
    total = 1
    for d in shape:
        total *= int(d)
    if total > ENTRY_CAP:
        raise TensorSizeError(
            f"tensor too large: {'x'.join(str(d) for d in shape)} = {total} "
            f"entries exceeds the dense cap of 2**24"
        )


class Tensor:
    """A dense order-k tensor over a prime field or the complex numbers."""

    __slots__ = ("domain", "array")

    def __init__(self, domain: Domain, array):
        arr = domain.asarray(array)
        _check_cap(arr.shape)
        arr.setflags(write=False)
        self.domain = domain
        self.array = arr

    @property
    def order(self) -> int:
        return self.array.ndim

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.array.shape

    @property
    def is_cubical(self) -> bool:
        return len(set(self.array.shape)) <= 1

    def __repr__(self) -> str:
        dims = "x".join(str(d) for d in self.dims)
        return f"Tensor({self.domain.name}, {dims})"


class LinearMap:
    """A rows x cols matrix over a scalar domain (a restriction morphism)."""

    __slots__ = ("domain", "array")

    def __init__(self, domain: Domain, array):
        arr = domain.asarray(array)
        if arr.ndim != 2:
            raise ValueError(f"linear map must be 2-dimensional, got {arr.ndim}")
        arr.setflags(write=False)
        self.domain = domain
        self.array = arr

    @property
    def rows(self) -> int:
        return self.array.shape[0]

    @property
    def cols(self) -> int:
        return self.array.shape[1]

    def __repr__(self) -> str:
        return f"LinearMap({self.domain.name}, {self.rows}x{self.cols})"


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def unit_tensor(r: int, k: int, domain: Domain) -> Tensor:
    """The diagonal unit tensor with r ones, order k (r = 0: all dims 0)."""
    if r < 0:
        raise ValueError(f"r must be nonnegative, got {r}")
    arr = domain.zeros((r,) * k)
    for i in range(r):
        arr[(i,) * k] = 1
    return Tensor(domain, arr)


def identity_map(d: int, domain: Domain) -> LinearMap:
    return LinearMap(domain, np.eye(d, dtype=domain.dtype))


# ---------------------------------------------------------------------------
# algebra
# ---------------------------------------------------------------------------

def _require_same(f: Tensor, g: Tensor) -> None:
    if f.order != g.order:
        raise ValueError(f"order mismatch: {f.order} vs {g.order}")
    if f.domain != g.domain:
        raise DomainError(f"domain mismatch: {f.domain.name} vs {g.domain.name}")


def tensor_product(f: Tensor, g: Tensor) -> Tensor:
    """f (x) g with the fixed lexicographic index merge on every leg."""
    _require_same(f, g)
    k = f.order
    shape = tuple(df * dg for df, dg in zip(f.dims, g.dims))
    _check_cap(shape)
    out = np.multiply.outer(f.array, g.array)
    # outer gives legs (f1..fk, g1..gk); interleave to (f1,g1,f2,g2,...)
    perm = [axis for j in range(k) for axis in (j, k + j)]
    out = out.transpose(perm).reshape(shape)
    return Tensor(f.domain, f.domain.reduce(out))


def tensor_power(f: Tensor, n: int) -> Tensor:
    if n < 1:
        raise ValueError(f"power must be >= 1, got {n}")
    out = f
    for _ in range(n - 1):
        out = tensor_product(out, f)
    return out


def direct_sum(f: Tensor, g: Tensor) -> Tensor:
    """Block tensor: f on the low index block, g on the high, zero elsewhere."""
    _require_same(f, g)
    shape = tuple(df + dg for df, dg in zip(f.dims, g.dims))
    _check_cap(shape)
    out = f.domain.zeros(shape)
    out[tuple(slice(0, d) for d in f.dims)] = f.array
    out[tuple(slice(d, None) for d in f.dims)] = g.array
    return Tensor(f.domain, out)


def apply(maps: Sequence[LinearMap], f: Tensor) -> Tensor:
    """g = (A1 (x) ... (x) Ak) f, one map per leg."""
    if len(maps) != f.order:
        raise ValueError(f"need {f.order} maps, got {len(maps)}")
    arr = f.array
    domain = f.domain
    for leg, m in enumerate(maps):
        if m.domain != domain:
            raise DomainError(f"domain mismatch on leg {leg + 1}")
        if m.cols != arr.shape[leg]:
            raise ValueError(
                f"leg {leg + 1}: map has {m.cols} columns, tensor dim is "
                f"{arr.shape[leg]}"
            )
        arr = np.tensordot(m.array, arr, axes=([1], [leg]))
        arr = np.moveaxis(arr, 0, leg)
        arr = domain.reduce(arr)
    return Tensor(domain, arr)


def apply_sym(A: LinearMap, f: Tensor) -> Tensor:
    """g = A^{(x)k} f: one shared map on every leg (f must be cubical)."""
    if not f.is_cubical:
        raise ValueError(f"symmetric application needs a cubical tensor, dims {f.dims}")
    return apply([A] * f.order, f)


def apply_sym_power(A: LinearMap, f: Tensor, power: int, budget: int = 1 << 21) -> Tensor:
    """apply_sym(A, f^{(x)power}) computed from the support of f alone.

    Enumerates the |supp(f)|^power support combinations of the power
    instead of materializing it, so the power itself may exceed the dense
    entry cap.  A's columns are indexed by merged leg tuples of the power
    (row-major, as tensor_power produces them).
    """
    if not f.is_cubical:
        raise ValueError(f"symmetric application needs a cubical tensor, dims {f.dims}")
    if A.domain != f.domain:
        raise DomainError("domain mismatch between map and tensor")
    d, k = f.dims[0], f.order
    if power < 1:
        raise ValueError(f"need power >= 1, got {power}")
    if A.cols != d ** power:
        raise ValueError(f"map has {A.cols} columns, expected {d}^{power}")
    supp = support(f)
    n_combos = len(supp) ** power
    r = A.rows
    work = n_combos * max(r, 1) ** k
    if work > budget << 3:
        raise TensorSizeError(
            f"support enumeration needs {work} work units, over budget {budget << 3}"
        )
    out = np.zeros((r,) * k, dtype=f.domain.dtype)
    if not supp or r == 0:
        return Tensor(f.domain, out)
    supp_arr = np.array(supp, dtype=np.int64)  # (S, k)
    vals = f.array[tuple(supp_arr.T)]  # (S,)
    combos = np.array(
        list(itertools.product(range(len(supp)), repeat=power)), dtype=np.int64
    )  # (N, power)
    weights = d ** np.arange(power - 1, -1, -1, dtype=np.int64)
    cvals = vals[combos[:, 0]]
    for t in range(1, power):
        cvals = f.domain.reduce(cvals * vals[combos[:, t]])
    tables = []  # per leg: (r, N) map values at the merged support columns
    for leg in range(k):
        merged = supp_arr[combos, leg] @ weights  # (N,)
        tables.append(A.array[:, merged])
    for out_idx in itertools.product(range(r), repeat=k):
        term = cvals
        for leg in range(k):
            term = term * tables[leg][out_idx[leg]]
        out[out_idx] = f.domain.normalize(np.sum(f.domain.reduce(term)))
    return Tensor(f.domain, f.domain.reduce(out))


def permute_legs(f: Tensor, perm: Sequence[int]) -> Tensor:
    """g with g[i_{perm(1)},...,i_{perm(k)}] = f[i_1,...,i_k] (0-based perm)."""
    k = f.order
    if sorted(perm) != list(range(k)):
        raise ValueError(f"not a permutation of 0..{k - 1}: {perm}")
    # numpy transpose(axes) satisfies g[idx o axes] = f[idx], which is
    # exactly the stated convention with axes = perm.
    return Tensor(f.domain, f.array.transpose(list(perm)))


def is_symmetric(f: Tensor) -> bool:
    """True iff every leg permutation fixes f (checked on adjacent swaps)."""
    if not f.is_cubical:
        raise ValueError(f"symmetry needs a cubical tensor, dims {f.dims}")
    k = f.order
    for j in range(k - 1):
        axes = list(range(k))
        axes[j], axes[j + 1] = axes[j + 1], axes[j]
        if not f.domain.arrays_equal(f.array, f.array.transpose(axes)):
            return False
    return True


def support(f: Tensor) -> List[Tuple[int, ...]]:
    """Sorted list of 0-based index tuples with a nonzero entry."""
    if isinstance(f.domain, PrimeField):
        mask = f.array % f.domain.p != 0
    else:
        mask = np.abs(f.array) > f.domain.tol
    return [tuple(int(i) for i in idx) for idx in np.argwhere(mask)]


def flattening_rank(f: Tensor, legs: Iterable[int]) -> int:
    """Rank of the matrix flattening with row legs ``legs`` (0-based)."""
    k = f.order
    row_legs = sorted(set(int(l) for l in legs))
    if not row_legs or len(row_legs) == k:
        raise ValueError(f"row legs must be a proper nonempty subset, got {row_legs}")
    if any(l < 0 or l >= k for l in row_legs):
        raise ValueError(f"leg out of range in {row_legs}")
    col_legs = [l for l in range(k) if l not in row_legs]
    arr = f.array.transpose(row_legs + col_legs)
    rows = math.prod(f.dims[l] for l in row_legs)
    return linalg.rank(arr.reshape(rows, -1), f.domain)


def matrix_rank(f: Tensor) -> int:
    """Rank of an order-2 tensor over its domain (equals matrix subrank)."""
    if f.order != 2:
        raise ValueError(f"matrix_rank needs order 2, got order {f.order}")
    return linalg.rank(f.array, f.domain)


def tensors_equal(f: Tensor, g: Tensor) -> bool:
    if f.domain != g.domain:
        return False
    if f.dims != g.dims:
        return False
    return f.domain.arrays_equal(f.array, g.array)


def kron(a: LinearMap, b: LinearMap) -> LinearMap:
    """Kronecker product, consistent with the tensor_product index merge."""
    if a.domain != b.domain:
        raise DomainError("domain mismatch in kron")
    return LinearMap(a.domain, a.domain.reduce(np.kron(a.array, b.array)))


# ---------------------------------------------------------------------------
# JSON (1-based indices; complex scalars as [re, im])
# ---------------------------------------------------------------------------

def _scalar_to_json(domain: Domain, v):
    if isinstance(domain, PrimeField):
        return int(v) % domain.p
    v = complex(v)
    return [v.real, v.imag]


def _scalar_from_json(domain: Domain, v):
    if isinstance(domain, PrimeField):
        if not isinstance(v, int):
            raise ValueError(f"prime-field entry must be an integer, got {v!r}")
        return v % domain.p
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ValueError(f"bad complex entry: {v!r}")


def tensor_to_json(f: Tensor) -> dict:
    entries = [
        {"idx": [i + 1 for i in idx], "val": _scalar_to_json(f.domain, f.array[idx])}
        for idx in support(f)
    ]
    return {
        "order": f.order,
        "dims": list(f.dims),
        "domain": f.domain.name,
        "entries": entries,
    }


def tensor_id(f: Tensor) -> str:
    """A 16-hex-digit content hash of a tensor's canonical JSON form."""
    payload = json.dumps(tensor_to_json(f), sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


def tensor_from_json(obj: dict) -> Tensor:
    try:
        k = int(obj["order"])
        dims = [int(d) for d in obj["dims"]]
        domain = domain_from_name(obj["domain"])
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed tensor JSON: {exc}") from exc
    if len(dims) != k:
        raise ValueError(f"order {k} but {len(dims)} dims")
    if any(d < 0 for d in dims):
        raise ValueError(f"negative dimension in {dims}")
    _check_cap(dims)
    arr = domain.zeros(tuple(dims))
    for ent in entries:
        idx = tuple(int(i) - 1 for i in ent["idx"])
        if len(idx) != k or any(i < 0 or i >= d for i, d in zip(idx, dims)):
            raise ValueError(f"index out of range: {ent['idx']}")
        arr[idx] = _scalar_from_json(domain, ent["val"])
    return Tensor(domain, arr)


def map_to_json(m: LinearMap) -> dict:
    data = [[_scalar_to_json(m.domain, v) for v in row] for row in m.array]
    return {"rows": m.rows, "cols": m.cols, "domain": m.domain.name, "data": data}


def map_from_json(obj: dict) -> LinearMap:
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        domain = domain_from_name(obj["domain"])
        data = obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if len(data) != rows or any(len(r) != cols for r in data):
        raise ValueError(f"matrix data is not {rows}x{cols}")
    arr = domain.zeros((rows, cols))
    for i, row in enumerate(data):
        for j, v in enumerate(row):
            arr[i, j] = _scalar_from_json(domain, v)
    return LinearMap(domain, arr)
