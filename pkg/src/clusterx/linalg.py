"""Dense local operators and small tensor kernels shared by the weights and oracles."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

ADMISSION_TOL = 1e-12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class OperatorError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LocalOperator:
    """Dense complex matrix acting on the ordered vertex ``support``.

    Tensor factors follow the support order, first vertex most significant.
    """

    support: tuple
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise OperatorError(f"operator on {self.support} is not a square matrix")
        m.setflags(write=False)
        object.__setattr__(self, "support", tuple(self.support))
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def check_dims(self, dims: dict) -> None:
        want = int(np.prod([dims[v] for v in self.support]))
        if want != self.dim:
            raise OperatorError(f"operator on {self.support} has dimension {self.dim}, "
                                f"local dimensions require {want}")

    def is_unitary(self, tol: float = ADMISSION_TOL) -> bool:
        m = self.matrix
        return bool(np.abs(m.conj().T @ m - np.eye(self.dim)).max() <= tol)

    def is_self_adjoint(self, tol: float = ADMISSION_TOL) -> bool:
        m = self.matrix
        return bool(np.abs(m - m.conj().T).max() <= tol)

    def is_psd(self, tol: float = ADMISSION_TOL) -> bool:
        if not self.is_self_adjoint():
            return False
        return bool(np.linalg.eigvalsh(self.matrix).min() >= -tol)

    def normalized_trace(self) -> complex:
        return complex(np.trace(self.matrix) / self.dim)

    def minus_identity(self) -> "LocalOperator":
        return LocalOperator(self.support, self.matrix - np.eye(self.dim))


def spectral_norm(op) -> float:
    """Largest singular value."""
    m = op.matrix if isinstance(op, LocalOperator) else np.asarray(op, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise OperatorError("spectral norm needs a square matrix")
    return float(np.linalg.norm(m, 2))


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, mats, np.eye(1, dtype=complex))


def pauli_string(s: str) -> np.ndarray:
    try:
        return kron_all([PAULI[c] for c in s.upper()])
    except KeyError as exc:
        raise OperatorError(f"unknown Pauli letter {exc.args[0]!r}") from None


def hermitian_eig(h: np.ndarray, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix with a residual check."""
    h = np.asarray(h, dtype=complex)
    h = (h + h.conj().T) / 2
    vals, vecs = np.linalg.eigh(h)
    if check:
        resid = np.abs(h @ vecs - vecs * vals).max() if len(vals) else 0.0
        if resid > 1e-10 * max(1.0, np.abs(vals).max(initial=0.0)):
            raise np.linalg.LinAlgError(f"eigendecomposition residual {resid:.2e}")
    return vals, vecs


def expm_hermitian(h: np.ndarray, scale: complex) -> np.ndarray:
    """exp(scale * H) for Hermitian H and complex ``scale``, via real eigenvalues."""
    vals, vecs = hermitian_eig(h)
    return (vecs * np.exp(scale * vals)) @ vecs.conj().T


def pauli_rotation(angle: float, pauli: str) -> np.ndarray:
    """exp(-i angle P) for a Pauli string P (P^2 = I)."""
    p = pauli_string(pauli)
    return np.cos(angle) * np.eye(p.shape[0]) - 1j * np.sin(angle) * p


def identity_plus(coefficient: complex, pauli: str) -> np.ndarray:
    p = pauli_string(pauli)
    return np.eye(p.shape[0]) + coefficient * p


def apply_gate(state: np.ndarray, order: Sequence, dims: dict, op: LocalOperator) -> np.ndarray:
    """Apply ``op`` to the tensor factors of ``state`` named by its support.

    ``state`` is a vector (or a matrix whose columns are vectors) over the
    vertex ``order``; other factors are untouched.
    """
    order = list(order)
    try:
        axes = [order.index(v) for v in op.support]
    except ValueError:
        raise OperatorError(f"support {op.support} not contained in {tuple(order)}") from None
    shape = [dims[v] for v in order]
    op.check_dims(dims)
    vec = np.asarray(state, dtype=complex)
    batch = vec.shape[1:] if vec.ndim > 1 else ()
    t = vec.reshape(shape + list(batch))
    k = len(axes)
    m = op.matrix.reshape([dims[v] for v in op.support] * 2)
    t = np.tensordot(m, t, axes=(list(range(k, 2 * k)), axes))
    # tensordot puts the op's output axes first; move them back into place
    t = np.moveaxis(t, list(range(k)), axes)
    return t.reshape(vec.shape)


def embed(op: LocalOperator, order: Sequence, dims: dict) -> np.ndarray:
    """Dense matrix of ``op`` tensored with identity on the rest of ``order``."""
    d = int(np.prod([dims[v] for v in order]))
    out = np.zeros((d, d), dtype=complex)
    embed_add(out, op, order, dims)
    return out


def embed_add(out: np.ndarray, op: LocalOperator, order: Sequence, dims: dict) -> None:
    """out += op tensored with identity, by scattering the op's entries."""
    order = list(order)
    op.check_dims(dims)
    try:
        pos = [order.index(v) for v in op.support]
    except ValueError:
        raise OperatorError(f"support {op.support} not contained in {tuple(order)}") from None
    shape = [dims[v] for v in order]
    d = out.shape[0]
    digits = np.array(np.unravel_index(np.arange(d), shape))      # (n, d)
    sub_shape = [shape[p] for p in pos]
    k = op.dim
    row_sub = np.ravel_multi_index(digits[pos], sub_shape)         # op index of each row
    sub_digits = np.array(np.unravel_index(np.arange(k), sub_shape))
    cols = np.empty((d, k), dtype=np.int64)
    for j in range(k):
        dj = digits.copy()
        dj[pos] = sub_digits[:, j][:, None]
        cols[:, j] = np.ravel_multi_index(dj, shape)
    out[np.arange(d)[:, None], cols] += op.matrix[row_sub[:, None], np.arange(k)[None, :]]


def zero_state(order: Sequence, dims: dict) -> np.ndarray:
    d = int(np.prod([dims[v] for v in order]))
    psi = np.zeros(d, dtype=complex)
    psi[0] = 1
    return psi
