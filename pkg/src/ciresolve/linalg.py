"""Dense linear algebra over a prime field GF(p).

Matrices are ``numpy`` int64 arrays whose entries are residues in ``[0, p)``.
Every function is pure: inputs are never modified.

Large eliminations are delegated to ``python-flint`` (``nmod_mat``) when it is
importable; small ones run through a vectorised numpy elimination.  Reduced
row echelon form is unique, so both backends return identical results.
"""
from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import flint
except ImportError:  # pragma: no cover
    flint = None

__all__ = [
    "NoSolution",
    "as_matrix",
    "matmul",
    "rref",
    "rank",
    "kernel_basis",
    "solve",
]

# rows * cols above which flint is used
FLINT_THRESHOLD = 4096


class NoSolution(ValueError):
    """The right-hand side does not lie in the column space."""


def as_matrix(entries, p: int, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Coerce ``entries`` to a reduced int64 matrix over GF(p)."""
    a = np.array(entries, dtype=np.int64)
    if shape is not None:
        a = a.reshape(shape)
    elif a.ndim == 1:
        a = a.reshape(1, -1) if a.size else np.zeros((0, 0), dtype=np.int64)
    if a.ndim != 2:
        raise ValueError("expected a 2-dimensional matrix")
    return a % p


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Product ``a @ b`` mod p without int64 overflow."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[1]
    if inner == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    chunk = max(1, (2**63 - 1) // max(1, (p - 1) ** 2) - 1)
    if chunk >= inner:
        return (a @ b) % p
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for start in range(0, inner, chunk):
        stop = start + chunk
        out = (out + (a[:, start:stop] @ b[start:stop]) % p) % p
    return out


def _inverse(x: int, p: int) -> int:
    return pow(int(x), -1, p)


def _rref_numpy(a: np.ndarray, p: int) -> tuple[np.ndarray, int, list[int]]:
    a = a.copy()
    m, n = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r, c:] = a[r, c:] * _inverse(a[r, c], p) % p
        rows = np.flatnonzero(a[:, c])
        rows = rows[rows != r]
        if rows.size:
            a[rows, c:] = (a[rows, c:] - np.outer(a[rows, c], a[r, c:]) % p) % p
        pivots.append(c)
        r += 1
    return a, r, pivots


def _to_flint(a: np.ndarray, p: int):
    m, n = a.shape
    rows, cols = np.nonzero(a)
    if rows.size > a.size // 4:
        return flint.nmod_mat(m, n, a.ravel().tolist(), p)
    out = flint.nmod_mat(m, n, p)
    for i, j, v in zip(rows.tolist(), cols.tolist(), a[rows, cols].tolist()):
        out[i, j] = v
    return out


def _from_flint(mat, m: int, n: int) -> np.ndarray:
    entries = mat.entries()
    return np.fromiter((int(x) for x in entries), dtype=np.int64, count=m * n).reshape(m, n)


def _rref_flint(a: np.ndarray, p: int) -> tuple[np.ndarray, int, list[int]]:
    m, n = a.shape
    reduced, r = _to_flint(a, p).rref()
    out = _from_flint(reduced, m, n)
    pivots = [int(np.flatnonzero(out[i])[0]) for i in range(r)]
    return out, r, pivots


def _use_flint(a: np.ndarray) -> bool:
    return flint is not None and a.shape[0] > 1 and a.shape[1] > 0 and a.size >= FLINT_THRESHOLD


def rref(m: np.ndarray, p: int, backend: str | None = None) -> tuple[np.ndarray, int, list[int]]:
    """Reduced row echelon form of ``m`` over GF(p).

    Returns ``(reduced, rank, pivot_columns)``.  ``backend`` may force
    ``"numpy"`` or ``"flint"``; by default the choice depends on size.
    """
    a = np.asarray(m, dtype=np.int64) % p
    if a.ndim != 2:
        raise ValueError("expected a 2-dimensional matrix")
    if a.size == 0:
        return a.copy(), 0, []
    if backend == "flint" or (backend is None and _use_flint(a)):
        if flint is None:
            raise RuntimeError("python-flint is not installed")
        return _rref_flint(a, p)
    return _rref_numpy(a, p)


def rank(m: np.ndarray, p: int) -> int:
    a = np.asarray(m, dtype=np.int64) % p
    if a.size == 0:
        return 0
    a = a[np.any(a, axis=1)][:, np.any(a, axis=0)]
    if a.size == 0:
        return 0
    if _use_flint(a):
        return int(_to_flint(a % p, p).rank())
    return rref(a, p, backend="numpy")[1]


def kernel_basis(m: np.ndarray, p: int) -> np.ndarray:
    """Basis of the right kernel, one basis vector per column.

    The basis is the canonical one read off the reduced row echelon form:
    one vector per free column, with a 1 in that column.
    """
    a = np.asarray(m, dtype=np.int64) % p
    rows, cols = a.shape
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    reduced, r, pivots = rref(a, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, c in enumerate(pivots):
            basis[c, k] = (-reduced[i, f]) % p
    return basis


def solve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Solve ``a @ x = b`` exactly over GF(p).

    ``b`` may be a vector or a matrix of right-hand sides.  Among all
    solutions the lexicographically least coordinate vector is returned
    (earlier coordinates most significant, residues ordered ``0 < 1 < ...``);
    in particular a zero right-hand side yields the zero solution.

    Raises :class:`NoSolution` if some right-hand side is inconsistent.
    """
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    vector = b.ndim == 1
    if vector:
        b = b.reshape(-1, 1)
    m, n = a.shape
    if b.shape[0] != m:
        raise ValueError(f"shape mismatch: a has {m} rows, b has {b.shape[0]}")
    k = b.shape[1]
    x = np.zeros((n, k), dtype=np.int64)
    if m == 0:
        return x[:, 0] if vector else x
    # Pivoting from the last column leaves the earliest coordinates free;
    # setting free coordinates to zero is then the lexicographic minimum.
    aug = np.concatenate([a[:, ::-1], b], axis=1)
    reduced, r, pivots = rref(aug, p)
    for i in range(r):
        c = pivots[i]
        if c >= n:
            raise NoSolution("right-hand side is not in the column space")
        x[n - 1 - c] = reduced[i, n:]
    return x[:, 0] if vector else x
