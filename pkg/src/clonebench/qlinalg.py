"""Dense complex linear algebra for few-qubit Hilbert spaces (dimension <= 2**8)."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

STATE_ATOL = 1e-12


class DegenerateColumnsError(ValueError):
    """Columns are numerically linearly dependent; caller should resample."""


def tensor(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Kronecker product of two kets, first factor varying slowest."""
    return np.kron(np.asarray(u, dtype=complex), np.asarray(v, dtype=complex))


def outer(s: np.ndarray) -> np.ndarray:
    """Rank-1 density matrix |s><s| of a unit state."""
    s = np.asarray(s, dtype=complex)
    norm = np.linalg.norm(s)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"outer() expects a unit state, got norm {norm!r}")
    return np.outer(s, s.conj())


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out all tensor factors not listed in `keep`.

    `dims` are the factor dimensions in order; the result lives on the kept
    factors in their original order and has the same trace as `rho`.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = [int(d) for d in dims]
    total = math.prod(dims)
    if rho.shape != (total, total):
        raise ValueError(f"matrix shape {rho.shape} does not match dims {dims}")
    k = len(dims)
    keep = sorted({int(i) for i in keep})
    if not keep or keep[0] < 0 or keep[-1] >= k:
        raise ValueError(f"keep={keep} is not a nonempty subset of factor indices 0..{k - 1}")
    t = rho.reshape(dims + dims)
    # einsum with integer subscripts: traced factors share ket/bra index
    sub_in = [i for i in range(k)] + [i if i not in keep else k + i for i in range(k)]
    sub_out = keep + [k + i for i in keep]
    reduced = np.einsum(t, sub_in, sub_out)
    d_keep = math.prod(dims[i] for i in keep)
    return reduced.reshape(d_keep, d_keep)


def sym_basis(n: int) -> list[np.ndarray]:
    """Orthonormal basis of the n-qubit symmetric subspace.

    Vector i has equal amplitude 1/sqrt(C(n, i)) on every computational basis
    ket with exactly i ones. Binomials are exact integers until the final
    division.
    """
    if not 1 <= n <= 10:
        raise ValueError(f"n={n} out of range 1..10")
    basis = []
    for i in range(n + 1):
        v = np.zeros(2**n, dtype=complex)
        amp = 1.0 / math.sqrt(math.comb(n, i))
        for idx in range(2**n):
            if idx.bit_count() == i:
                v[idx] = amp
        basis.append(v)
    return basis


def orthonormalize(m: np.ndarray) -> np.ndarray:
    """Gram-Schmidt orthonormalization of the columns, with one
    re-orthogonalization pass per column.

    Preserves the column span and is a fixed point on already-orthonormal
    input (no sign or phase flips).
    """
    q = np.array(m, dtype=complex)
    if q.ndim != 2 or q.shape[0] < q.shape[1]:
        raise ValueError(f"expected a tall matrix, got shape {q.shape}")
    for j in range(q.shape[1]):
        for _ in range(2):
            for i in range(j):
                q[:, j] -= np.vdot(q[:, i], q[:, j]) * q[:, i]
        nrm = np.linalg.norm(q[:, j])
        if nrm <= 1e-10:
            raise DegenerateColumnsError(f"column {j} is in the span of earlier columns")
        q[:, j] /= nrm
    return q


def is_unit_state(s: np.ndarray, atol: float = STATE_ATOL) -> bool:
    return abs(np.linalg.norm(np.asarray(s)) - 1.0) <= atol


def is_density_matrix(rho: np.ndarray, atol: float = STATE_ATOL) -> bool:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if np.abs(rho - rho.conj().T).max() > atol:
        return False
    if abs(np.trace(rho).real - 1.0) > atol:
        return False
    return np.linalg.eigvalsh(rho).min() >= -1e-10
