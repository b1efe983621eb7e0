"""Dense symmetric-matrix kernel.

Packed upper-triangular storage, trace inner products, a cyclic-Jacobi
eigensolver, PSD membership tests and rank-one builders.  Everything here is
a pure function of its inputs; SymMat values are immutable and hashable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT2 = math.sqrt(2.0)

# Jacobi sweep cap and relative off-diagonal convergence threshold.
_JACOBI_SWEEPS = 50
_JACOBI_OFF_TOL = 1e-14

DEFAULT_PSD_TOL = 1e-9


def packed_len(n: int) -> int:
    return n * (n + 1) // 2


def _packed_indices(n: int):
    """(i, j) pairs, i <= j, in row-major packed order."""
    return [(i, j) for i in range(n) for j in range(i, n)]


@dataclass(frozen=True)
class SymMat:
    """Element of S^n stored as the upper triangle, row-major.

    Only one triangle is stored, so symmetry is structural and the
    packed <-> dense round trip is bitwise exact.
    """

    n: int
    data: tuple

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("dimension must be positive")
        if len(self.data) != packed_len(self.n):
            raise ValueError("packed length %d does not match n=%d" % (len(self.data), self.n))

    @staticmethod
    def from_dense(a) -> "SymMat":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix")
        n = a.shape[0]
        return SymMat(n, tuple(a[i, j] for i, j in _packed_indices(n)))

    @staticmethod
    def from_upper(n: int, entries) -> "SymMat":
        return SymMat(n, tuple(float(v) for v in entries))

    @staticmethod
    def zeros(n: int) -> "SymMat":
        return SymMat(n, (0.0,) * packed_len(n))

    @staticmethod
    def identity(n: int) -> "SymMat":
        return SymMat.diag([1.0] * n)

    @staticmethod
    def diag(values) -> "SymMat":
        values = list(values)
        n = len(values)
        data = [0.0] * packed_len(n)
        k = 0
        for i in range(n):
            data[k] = float(values[i])
            k += n - i
        return SymMat(n, tuple(data))

    def to_dense(self) -> np.ndarray:
        a = np.empty((self.n, self.n))
        k = 0
        for i in range(self.n):
            for j in range(i, self.n):
                a[i, j] = self.data[k]
                a[j, i] = self.data[k]
                k += 1
        return a

    def entry(self, i: int, j: int) -> float:
        if i > j:
            i, j = j, i
        k = i * self.n - i * (i - 1) // 2 + (j - i)
        return self.data[k]

    def norm(self) -> float:
        """Frobenius norm (off-diagonal entries count twice)."""
        s = 0.0
        k = 0
        for i in range(self.n):
            for j in range(i, self.n):
                v = self.data[k]
                s += v * v if i == j else 2.0 * v * v
                k += 1
        return math.sqrt(s)

    def scale(self, c: float) -> "SymMat":
        return SymMat(self.n, tuple(c * v for v in self.data))

    def add(self, other: "SymMat", c: float = 1.0) -> "SymMat":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return SymMat(self.n, tuple(a + c * b for a, b in zip(self.data, other.data)))

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.data)


@dataclass(frozen=True)
class EigDecomp:
    """Eigenvalues sorted descending with an orthonormal column basis."""

    values: np.ndarray
    vectors: np.ndarray


def inner(a: SymMat, b: SymMat) -> float:
    """Trace inner product <A,B> = trace AB; symmetric in its arguments."""
    if a.n != b.n:
        raise ValueError("dimension mismatch: %d vs %d" % (a.n, b.n))
    s = 0.0
    k = 0
    n = a.n
    for i in range(n):
        for j in range(i, n):
            v = a.data[k] * b.data[k]
            s += v if i == j else 2.0 * v
            k += 1
    return s


def svec(x: SymMat) -> np.ndarray:
    """Packed upper triangle as a vector (unscaled; exact inverse is smat)."""
    return np.array(x.data, dtype=float)


def smat(v, n: int) -> SymMat:
    """Exact inverse of svec."""
    v = np.asarray(v, dtype=float)
    if v.shape != (packed_len(n),):
        raise ValueError("packed length does not match n")
    return SymMat(n, tuple(v))


def svec_scaled(x: SymMat) -> np.ndarray:
    """Isometric vectorization: off-diagonal entries carry sqrt(2).

    Preserves inner products (svec_scaled(A) . svec_scaled(B) == inner(A, B)
    up to roundoff); used by the SDP solver, not for exact round trips.
    """
    out = np.array(x.data, dtype=float)
    k = 0
    for i in range(x.n):
        for j in range(i, x.n):
            if i != j:
                out[k] *= SQRT2
            k += 1
    return out


def _jacobi(a: np.ndarray, want_vectors: bool, sweeps: int = _JACOBI_SWEEPS):
    """Cyclic Jacobi sweeps on a dense symmetric matrix.

    Converges when the off-diagonal Frobenius mass drops below
    1e-14 * ||A||_F.  Robust and deterministic at the small sizes used here.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n) if want_vectors else None
    scale = math.sqrt(float((a * a).sum()))
    if n == 1 or scale == 0.0:
        return np.diag(a).copy(), v
    tol = _JACOBI_OFF_TOL * scale
    skip = 1e-30 * scale
    for _ in range(sweeps):
        off = a - np.diag(np.diag(a))
        if math.sqrt(float((off * off).sum())) <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                if want_vectors:
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp - s * vq
                    v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v


def eig_sym(x: SymMat) -> EigDecomp:
    """Full eigendecomposition of a SymMat via cyclic Jacobi rotations.

    Eigenvalues come back sorted descending; eigenvector columns are sign
    canonicalized (largest-magnitude component positive) so the result is a
    deterministic function of the input.
    """
    if not x.is_finite():
        raise ValueError("non-finite entries")
    values, vectors = _jacobi(x.to_dense(), want_vectors=True)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    for j in range(vectors.shape[1]):
        k = int(np.argmax(np.abs(vectors[:, j])))
        if vectors[k, j] < 0.0:
            vectors[:, j] = -vectors[:, j]
    return EigDecomp(values=values, vectors=vectors)


def eigvals_sym(x: SymMat) -> np.ndarray:
    """Eigenvalues only (descending); skips the basis accumulation."""
    if not x.is_finite():
        raise ValueError("non-finite entries")
    values, _ = _jacobi(x.to_dense(), want_vectors=False)
    return np.sort(values)[::-1]


def lambda_min(x: SymMat) -> float:
    return float(eigvals_sym(x)[-1])


def is_psd(x: SymMat, tol: float = DEFAULT_PSD_TOL) -> bool:
    """Membership in S^n_+ up to a relative slack of tol * max(1, ||x||_F)."""
    if tol < 0.0:
        raise ValueError("tol must be nonnegative")
    return lambda_min(x) >= -tol * max(1.0, x.norm())


def gram(x) -> SymMat:
    """Rank-one PSD matrix x x^T."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("expected a non-empty vector")
    n = x.size
    data = []
    for i in range(n):
        for j in range(i, n):
            data.append(x[i] * x[j])
    return SymMat(n, tuple(data))


def combine(alpha: float, a: SymMat, beta: float, b: SymMat) -> SymMat:
    """alpha*A + beta*B."""
    if a.n != b.n:
        raise ValueError("dimension mismatch")
    return SymMat(a.n, tuple(alpha * u + beta * v for u, v in zip(a.data, b.data)))
