"""Dense/sparse building blocks and deterministic randomness.

Everything downstream (moments, distances, the trainer) works on plain
float64 numpy arrays: a vector is a 1-D array, a dense matrix is a 2-D
array holding one example per row.  Sparse inputs use the small CSR-style
container below.  Randomness comes exclusively from :class:`SeededRng`, a
counter-based SplitMix64 generator, so that identical seeds give bitwise
identical streams on every platform.
"""

from __future__ import annotations

import numpy as np

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV53 = float(2.0 ** -53)


def _mix64(z):
    """SplitMix64 finalizer. Operates on uint64 scalars or arrays; all
    arithmetic wraps modulo 2^64 (numpy unsigned semantics)."""
    z = np.uint64(z) if np.isscalar(z) else z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


class SeededRng:
    """Counter-based SplitMix64 stream.

    The i-th raw 64-bit word of the stream is mix64(seed + (i+1)*gamma)
    with gamma = 0x9E3779B97F4A7C15 and mix64 the SplitMix64 finalizer.
    Because words are indexed rather than iterated, any block can be
    produced vectorized and the stream is identical across platforms.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._count = 0

    def _raw(self, n: int) -> np.ndarray:
        idx = np.arange(self._count + 1, self._count + n + 1, dtype=np.uint64)
        self._count += n
        with np.errstate(over="ignore"):
            return _mix64(np.uint64(self.seed) + _GAMMA * idx)

    def uniforms(self, n: int) -> np.ndarray:
        """n doubles in [0, 1), using the top 53 bits of each word."""
        return (self._raw(n) >> np.uint64(11)).astype(np.float64) * _INV53

    def uniform_matrix(self, rows: int, cols: int) -> np.ndarray:
        return self.uniforms(rows * cols).reshape(rows, cols)

    def normals(self, n: int) -> np.ndarray:
        """Standard normal draws via Box-Muller on consecutive pairs."""
        half = (n + 1) // 2
        u1 = (self._raw(half) >> np.uint64(11)).astype(np.float64)
        u1 = (u1 + 1.0) * _INV53  # in (0, 1], keeps log finite
        u2 = self.uniforms(half)
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        out = np.empty(2 * half)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:n]

    def normal_matrix(self, rows: int, cols: int) -> np.ndarray:
        return self.normals(rows * cols).reshape(rows, cols)

    def permutation(self, n: int) -> np.ndarray:
        """Deterministic permutation of range(n) by sorting one uniform
        per index (stable sort, so the result is reproducible even in the
        astronomically unlikely event of a tie)."""
        return np.argsort(self.uniforms(n), kind="stable")

    def split(self, salt: int) -> "SeededRng":
        """Derive an independent child stream. Children with different
        salts never share words with each other or with the parent."""
        with np.errstate(over="ignore"):
            child = _mix64(
                (np.uint64(self.seed) ^ _MIX2) + _GAMMA * np.uint64(int(salt) + 1)
            )
        return SeededRng(int(child))


class SparseRowMatrix:
    """CSR-style row-sparse matrix: per row, strictly increasing column
    indices with float64 values. Only the handful of products the trainer
    needs are implemented."""

    def __init__(self, rows: int, cols: int, indptr, indices, data):
        self.rows = int(rows)
        self.cols = int(cols)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.data = np.asarray(data, dtype=np.float64)
        if self.indptr.shape != (self.rows + 1,):
            raise ValueError("indptr length must be rows+1")
        if self.indptr[0] != 0 or self.indptr[-1] != len(self.indices):
            raise ValueError("indptr endpoints inconsistent with indices")
        if len(self.indices) != len(self.data):
            raise ValueError("indices and data lengths differ")
        for r in range(self.rows):
            seg = self.indices[self.indptr[r]:self.indptr[r + 1]]
            if len(seg) and (np.any(np.diff(seg) <= 0) or seg[0] < 0 or seg[-1] >= self.cols):
                raise ValueError(f"row {r}: indices must be strictly increasing and < cols")

    @classmethod
    def from_rows(cls, rows_of_pairs, cols: int) -> "SparseRowMatrix":
        """Build from an iterable of [(index, value), ...] per row."""
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for pairs in rows_of_pairs:
            for i, v in pairs:
                indices.append(int(i))
                data.append(float(v))
            indptr.append(len(indices))
        return cls(len(indptr) - 1, cols, indptr, indices, data)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def toarray(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols))
        row_ids = np.repeat(np.arange(self.rows), np.diff(self.indptr))
        out[row_ids, self.indices] = self.data
        return out

    def dot_dense(self, D: np.ndarray) -> np.ndarray:
        """self @ D for dense D of shape (cols, k)."""
        D = np.asarray(D, dtype=np.float64)
        if D.shape[0] != self.cols:
            raise ValueError("dimension mismatch in sparse dot")
        out = np.zeros((self.rows,) + D.shape[1:])
        row_ids = np.repeat(np.arange(self.rows), np.diff(self.indptr))
        contrib = self.data[:, None] * D[self.indices] if D.ndim == 2 else self.data * D[self.indices]
        np.add.at(out, row_ids, contrib)
        return out

    def t_dot_dense(self, D: np.ndarray) -> np.ndarray:
        """self.T @ D for dense D of shape (rows, k)."""
        D = np.asarray(D, dtype=np.float64)
        if D.shape[0] != self.rows:
            raise ValueError("dimension mismatch in sparse t_dot")
        row_ids = np.repeat(np.arange(self.rows), np.diff(self.indptr))
        out = np.zeros((self.cols,) + D.shape[1:])
        contrib = self.data[:, None] * D[row_ids] if D.ndim == 2 else self.data * D[row_ids]
        np.add.at(out, self.indices, contrib)
        return out

    def column_sums(self) -> np.ndarray:
        out = np.zeros(self.cols)
        np.add.at(out, self.indices, self.data)
        return out

    def take_rows(self, idx) -> "SparseRowMatrix":
        idx = np.asarray(idx, dtype=np.int64)
        indptr = [0]
        chunks_i = []
        chunks_d = []
        for r in idx:
            lo, hi = self.indptr[r], self.indptr[r + 1]
            chunks_i.append(self.indices[lo:hi])
            chunks_d.append(self.data[lo:hi])
            indptr.append(indptr[-1] + (hi - lo))
        cat = np.concatenate if chunks_i else lambda xs: np.empty(0)
        return SparseRowMatrix(
            len(idx), self.cols, indptr,
            cat(chunks_i) if chunks_i else [], cat(chunks_d) if chunks_d else [],
        )


def matvec(m, v):
    """Matrix-vector product for a dense 2-D array or SparseRowMatrix."""
    v = np.asarray(v, dtype=np.float64)
    if isinstance(m, SparseRowMatrix):
        if m.cols != v.shape[0]:
            raise ValueError("dimension mismatch in matvec")
        return m.dot_dense(v)
    m = np.asarray(m, dtype=np.float64)
    if m.shape[1] != v.shape[0]:
        raise ValueError("dimension mismatch in matvec")
    return m @ v


def sample_mean(features) -> np.ndarray:
    """Coordinatewise mean over rows; errors on an empty sample."""
    if isinstance(features, SparseRowMatrix):
        if features.rows == 0:
            raise ValueError("empty sample")
        return features.column_sums() / features.rows
    X = np.asarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] == 0:
        raise ValueError("empty sample")
    return X.mean(axis=0)


_ELEMENTWISE = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
    "pow": np.power,
}


def elementwise(op: str, a, b):
    """Coordinatewise add/sub/mul/pow of a vector with a vector or scalar."""
    if op not in _ELEMENTWISE:
        raise ValueError(f"unknown elementwise op {op!r}")
    a = np.asarray(a, dtype=np.float64)
    if not np.isscalar(b):
        b = np.asarray(b, dtype=np.float64)
        if b.shape not in ((), a.shape):
            raise ValueError("dimension mismatch in elementwise op")
    return _ELEMENTWISE[op](a, b)


def take_rows(features, idx):
    """Row subset of a dense array or SparseRowMatrix, in the given order."""
    if isinstance(features, SparseRowMatrix):
        return features.take_rows(idx)
    return np.asarray(features, dtype=np.float64)[np.asarray(idx, dtype=np.int64)]


def ensure_finite(arr, context: str):
    """Raise if arr contains NaN or Inf; used at module boundaries so
    non-finite values never propagate silently."""
    a = np.asarray(arr, dtype=np.float64)
    if not np.all(np.isfinite(a)):
        raise FloatingPointError(f"non-finite values in {context}")
    return arr
