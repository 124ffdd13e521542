"""Dense complex linear algebra for small operators.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Everything a
game computation needs lives here: products, Kronecker products, traces,
partial traces, a cyclic Jacobi eigensolver for Hermitian matrices, and a
seeded Ginibre sampler for random density matrices.

Composite spaces are indexed with the first factor as the major index, so
for two players with basis ``{B, S}`` the joint basis is ``BB, BS, SB, SS``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NumericError, ValidationError

__all__ = [
    "DEFAULT_TOL",
    "EigenDecomposition",
    "as_matrix",
    "dagger",
    "eig_hermitian",
    "expm_hermitian",
    "frobenius_distance",
    "hermiticity_defect",
    "identity",
    "kron",
    "kron_all",
    "matmul",
    "partial_trace",
    "random_density",
    "trace",
]

DEFAULT_TOL = 1e-10

JACOBI_MAX_SWEEPS = 100
JACOBI_OFF_TOL = 1e-14
PHASE_TOL = 1e-8


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce ``m`` to a finite square complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        bad = tuple(int(k) for k in np.argwhere(~np.isfinite(a))[0])
        raise ValidationError(f"{name} has a non-finite entry at {bad}")
    return a


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def dagger(m) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(m).conj().T


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    return a @ b


def trace(m) -> complex:
    return complex(np.trace(as_matrix(m)))


def _kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    (m, _), (n, _) = a.shape, b.shape
    return np.multiply.outer(a, b).transpose(0, 2, 1, 3).reshape(m * n, m * n)


def kron(a, b) -> np.ndarray:
    """Kronecker product; joint index ``(i, j)`` maps to ``i * b.dim + j``."""
    return _kron(as_matrix(a), as_matrix(b))


def kron_all(factors: Iterable) -> np.ndarray:
    out = None
    for f in factors:
        out = as_matrix(f) if out is None else _kron(out, as_matrix(f))
    if out is None:
        raise ValidationError("kron_all needs at least one factor")
    return out


def _check_dims(m: np.ndarray, dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise ValidationError(f"dims must be positive integers, got {dims}")
    if math.prod(dims) != m.shape[0]:
        raise ValidationError(
            f"dims {dims} (product {math.prod(dims)}) inconsistent with matrix dim {m.shape[0]}"
        )
    return dims


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every tensor factor whose index is not in ``keep``.

    Factor indices are 0-based. Kept factors stay in their original order.
    """
    m = as_matrix(m)
    dims = _check_dims(m, dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise ValidationError(f"keep must be a non-empty subset of 0..{n - 1}, got {keep}")
    t = m.reshape(dims + dims)
    # trace highest factor first so lower axis numbers stay valid
    for k in reversed(range(n)):
        if k not in keep:
            live = t.ndim // 2
            t = np.trace(t, axis1=k, axis2=k + live)
    d = math.prod(dims[k] for k in keep)
    return t.reshape(d, d)


def hermiticity_defect(m) -> tuple[float, tuple[int, int]]:
    """Largest ``|M_jk - conj(M_kj)|`` and the (row, col) where it occurs."""
    m = as_matrix(m)
    diff = np.abs(m - m.conj().T)
    j, k = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return float(diff[j, k]), (int(j), int(k))


def frobenius_distance(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    return float(np.sqrt(np.sum(np.abs(a - b) ** 2)))


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenpairs of a Hermitian matrix.

    ``eigenvalues`` is sorted descending and ``eigenvectors[:, k]`` is the
    unit eigenvector for ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def top_value(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def top_vector(self) -> np.ndarray:
        return self.eigenvectors[:, 0]

    def multiplicity(self, k: int = 0, tol: float = DEFAULT_TOL) -> int:
        return int(np.sum(np.abs(self.eigenvalues - self.eigenvalues[k]) <= tol))

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its first component with magnitude > PHASE_TOL is real positive."""
    for c in v:
        if abs(c) > PHASE_TOL:
            return v * (abs(c) / c)
    return v


def _lex_key(v: np.ndarray) -> tuple:
    # rounding keeps round-off from reordering equal vectors
    return tuple(x for c in np.round(v, 9) for x in (c.real, c.imag))


def _jacobi_sweeps(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    v = identity(n)
    scale = max(float(np.linalg.norm(a)), 1.0)
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    offdiag = ~np.eye(n, dtype=bool)
    for sweep in range(JACOBI_MAX_SWEEPS + 1):
        off = float(np.linalg.norm(a[offdiag]))
        if off <= JACOBI_OFF_TOL * scale:
            return np.real(np.diag(a)).copy(), v
        if sweep == JACOBI_MAX_SWEEPS:
            break
        for p, q in pairs:
            apq = a[p, q]
            r = abs(apq)
            if r == 0.0:
                continue
            cph = (apq / r).conjugate()
            tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
            t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            # unitary rotation acting on columns p, q
            j = np.array([[c, s], [-s * cph, c * cph]])
            idx = [p, q]
            a[:, idx] = a[:, idx] @ j
            a[idx, :] = j.conj().T @ a[idx, :]
            v[:, idx] = v[:, idx] @ j
            a[p, q] = a[q, p] = 0.0
            a[p, p] = a[p, p].real
            a[q, q] = a[q, q].real
    raise NumericError(f"Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps")


def eig_hermitian(m, tol: float = DEFAULT_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues come back sorted descending. Each eigenvector is phase-fixed
    so that its first component of magnitude above 1e-8 is real and positive;
    eigenvalues equal within ``tol`` are ordered by their phase-fixed vectors,
    lexicographically descending (real part, then imaginary part).

    Raises ValidationError for non-Hermitian input and NumericError when the
    sweep cap is exhausted.
    """
    a = as_matrix(m).copy()
    defect, (j, k) = hermiticity_defect(a)
    if defect > tol:
        raise ValidationError(f"matrix is not Hermitian: |M[{j},{k}] - conj(M[{k},{j}])| = {defect:.3g}")
    a = 0.5 * (a + a.conj().T)
    values, vectors = _jacobi_sweeps(a)
    cols = [_fix_phase(vectors[:, k]) for k in range(len(values))]

    order = sorted(range(len(values)), key=lambda k: -values[k])
    groups: list[list[int]] = []
    for k in order:
        if groups and abs(values[groups[-1][0]] - values[k]) <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    order = [k for g in groups for k in sorted(g, key=lambda k: _lex_key(cols[k]), reverse=True)]

    return EigenDecomposition(
        eigenvalues=np.array([values[k] for k in order]),
        eigenvectors=np.column_stack([cols[k] for k in order]),
    )


def expm_hermitian(m, scale: float = 1.0) -> np.ndarray:
    """``exp(scale * M)`` for Hermitian ``M`` via its eigendecomposition."""
    eig = eig_hermitian(m)
    v = eig.eigenvectors
    return (v * np.exp(scale * eig.eigenvalues)) @ v.conj().T


def random_density(dim: int, seed: int) -> np.ndarray:
    """Seeded Ginibre density matrix ``G G^dagger / Tr(G G^dagger)``.

    Uniform draws come from numpy's PCG64 bit generator seeded with ``seed``;
    they are turned into complex Gaussians by the Box-Muller transform, one
    uniform pair per entry (cosine branch real part, sine branch imaginary).
    """
    if int(dim) < 1:
        raise ValidationError(f"dim must be >= 1, got {dim}")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    u1, u2 = rng.random((2, dim, dim))
    radius = np.sqrt(-2.0 * np.log1p(-u1))  # 1 - u1 is in (0, 1]
    g = radius * np.exp(2j * np.pi * u2)
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real
