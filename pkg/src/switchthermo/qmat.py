"""Dense complex-matrix kernel for qubit (2x2) and qubit-pair (4x4) operators.

Matrices are plain ``numpy`` complex arrays; only elementwise arithmetic,
``@`` and ``kron`` are delegated to numpy. Spectra are computed here: a
closed-form quadratic for 2x2 and cyclic Jacobi rotations for 4x4.

Every 4x4 object uses the subsystem order ``(system, controller)``.
"""

from __future__ import annotations

import math
from typing import Union

import numpy as np

from .errors import DimensionError, InvalidStateError, NotHermitianError

ALLOWED_DIMS = (2, 4)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100

SYSTEM = "system"
CONTROLLER = "controller"


def as_cmat(a) -> np.ndarray:
    """Return ``a`` as a complex (dim, dim) array with dim in {2, 4}."""
    if isinstance(a, DensityMatrix):
        return a.mat
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in ALLOWED_DIMS:
        raise DimensionError(f"expected a 2x2 or 4x4 matrix, got shape {m.shape}")
    return m


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def identity(dim: int = 2) -> np.ndarray:
    if dim not in ALLOWED_DIMS:
        raise DimensionError(f"dimension must be 2 or 4, got {dim}")
    return np.eye(dim, dtype=complex)


def ket(*amplitudes) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.shape[0] != 2:
        raise DimensionError("controller and system kets have 2 amplitudes")
    return v


def projector(v) -> np.ndarray:
    """|v><v| for a (not necessarily normalized) 2-vector."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


KET_0 = ket(1, 0)
KET_1 = ket(0, 1)
KET_PLUS = ket(1, 1) / math.sqrt(2)
KET_MINUS = ket(1, -1) / math.sqrt(2)


def matmul(a, b) -> np.ndarray:
    a, b = as_cmat(a), as_cmat(b)
    _same_dim(a, b)
    return a @ b


def dagger(a) -> np.ndarray:
    return as_cmat(a).conj().T


def add(a, b) -> np.ndarray:
    a, b = as_cmat(a), as_cmat(b)
    _same_dim(a, b)
    return a + b


def scale(a, c: complex) -> np.ndarray:
    return complex(c) * as_cmat(a)


def trace(a) -> complex:
    return complex(np.trace(as_cmat(a)))


def max_abs(a) -> float:
    """Largest entry modulus; the norm used by every tolerance check."""
    return float(np.max(np.abs(np.asarray(a))))


def hermiticity_defect(a) -> float:
    m = as_cmat(a)
    return max_abs(m - m.conj().T)


def tensor(a, b) -> np.ndarray:
    """Kronecker product ``a (x) b``; ``a`` is the system factor."""
    a, b = as_cmat(a), as_cmat(b)
    if a.shape[0] != 2 or b.shape[0] != 2:
        raise DimensionError("tensor product would exceed dimension 4")
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(4, 4)


def partial_trace(joint, keep: str = SYSTEM) -> np.ndarray:
    """Reduce a 4x4 (system, controller) operator to one 2x2 factor.

    Parameters
    ----------
    joint : array_like or DensityMatrix
        Operator on the two-qubit space.
    keep : {"system", "controller"}
        The subsystem that survives.
    """
    m = as_cmat(joint)
    if m.shape[0] != 4:
        raise DimensionError(f"partial trace needs a 4x4 operator, got {m.shape}")
    # t[s, c, s', c'] = <s c| m |s' c'>
    t = m.reshape(2, 2, 2, 2)
    out = np.zeros((2, 2), dtype=complex)
    if keep == SYSTEM:
        for c in range(2):
            out += t[:, c, :, c]
    elif keep == CONTROLLER:
        for s in range(2):
            out += t[s, :, s, :]
    else:
        raise ValueError(f"keep must be {SYSTEM!r} or {CONTROLLER!r}, got {keep!r}")
    return out


def _eigvals_2x2(m: np.ndarray) -> list[float]:
    a = m[0, 0].real
    d = m[1, 1].real
    mean = 0.5 * (a + d)
    radius = math.hypot(0.5 * (a - d), abs(m[0, 1]))
    return [mean - radius, mean + radius]


def _off_norm(m: np.ndarray) -> float:
    off = m - np.diag(np.diag(m))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def jacobi_eigh(a, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies a real plane rotation, so the pivot is annihilated by a unitary
    similarity. Pivots are visited in the fixed order (0,1), (0,2), ...,
    (n-2, n-1). Sweeps stop once the off-diagonal Frobenius mass is at most
    ``tol * max(1, ||a||_F)``.

    Returns
    -------
    eigenvalues : ndarray
        Real eigenvalues, ascending.
    vectors : ndarray
        Unitary whose columns are the matching eigenvectors, so that
        ``vectors @ diag(eigenvalues) @ vectors^H == a``.
    sweeps : int
        Number of sweeps performed.
    """
    m = as_cmat(a).copy()
    if hermiticity_defect(m) > HERMITIAN_TOL:
        raise NotHermitianError("Jacobi eigensolver requires a Hermitian matrix")
    m = 0.5 * (m + m.conj().T)
    n = m.shape[0]
    v = np.eye(n, dtype=complex)
    threshold = tol * max(1.0, float(np.sqrt(np.sum(np.abs(m) ** 2))))

    sweeps = 0
    while _off_norm(m) > threshold and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                b = abs(apq)
                if b == 0.0:
                    continue
                phase = apq / b
                theta = 0.5 * math.atan2(2.0 * b, m[p, p].real - m[q, q].real)
                c, s = math.cos(theta), math.sin(theta)
                g = np.eye(n, dtype=complex)
                g[p, p] = c
                g[p, q] = -s
                g[q, p] = phase.conjugate() * s
                g[q, q] = phase.conjugate() * c
                m = g.conj().T @ m @ g
                m[p, q] = m[q, p] = 0.0
                v = v @ g
        sweeps += 1

    w = np.diag(m).real
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order], sweeps


def herm_eigvals(a) -> list[float]:
    """Ascending real eigenvalues of a Hermitian 2x2 or 4x4 matrix."""
    m = as_cmat(a)
    if hermiticity_defect(m) > HERMITIAN_TOL:
        raise NotHermitianError(
            f"matrix is not Hermitian (defect {hermiticity_defect(m):.3e})"
        )
    if m.shape[0] == 2:
        return _eigvals_2x2(m)
    w, _, _ = jacobi_eigh(m)
    return [float(x) for x in w]


class DensityMatrix:
    """Validated, immutable qubit or two-qubit state.

    Construction checks Hermiticity, unit trace and positivity; the spectrum
    computed for the positivity check is kept for later entropy evaluation.
    """

    __slots__ = ("_mat", "_eigvals")

    def __init__(self, mat):
        m = np.array(as_cmat(mat), dtype=complex, copy=True)
        if not np.all(np.isfinite(m)):
            raise InvalidStateError("density matrix has non-finite entries")
        defect = hermiticity_defect(m)
        if defect > HERMITIAN_TOL:
            raise InvalidStateError(f"not Hermitian (defect {defect:.3e})")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace {tr.real:.15g} differs from 1")
        w = herm_eigvals(m)
        if w[0] < -PSD_TOL:
            raise InvalidStateError(f"negative eigenvalue {w[0]:.3e}")
        m.setflags(write=False)
        self._mat = m
        self._eigvals = tuple(w)

    @property
    def mat(self) -> np.ndarray:
        return self._mat

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    @property
    def eigvals(self) -> tuple[float, ...]:
        return self._eigvals

    def __array__(self, dtype=None, copy=None):
        return self._mat if dtype is None else self._mat.astype(dtype)

    def __repr__(self) -> str:
        return f"DensityMatrix({np.array2string(self._mat, precision=6)})"

    @classmethod
    def pure(cls, vec) -> "DensityMatrix":
        m = projector(vec)
        # dividing by the trace keeps |+><+| entries at exactly 1/2
        return cls(m / np.trace(m).real)

    @classmethod
    def diag(cls, *populations: float) -> "DensityMatrix":
        return cls(np.diag(np.asarray(populations, dtype=complex)))

    @classmethod
    def from_bloch(cls, x: float, y: float, z: float) -> "DensityMatrix":
        return cls(0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]]))


StateLike = Union[DensityMatrix, np.ndarray]


def trace_distance(a: StateLike, b: StateLike) -> float:
    """Half the trace norm of ``a - b``."""
    ma, mb = as_cmat(a), as_cmat(b)
    _same_dim(ma, mb)
    diff = ma - mb
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * sum(abs(x) for x in herm_eigvals(diff))
