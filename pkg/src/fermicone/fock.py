"""Occupation-number representation of fermionic operators on a mode order.

The basis convention for an order ``O = (O_1, ..., O_k)`` is

    |i_1, ..., i_k> = (f_{O_1}^dag)^{i_1} ... (f_{O_k}^dag)^{i_k} |vac>,

with basis index ``sum_j i_j 2^(k-j)`` (position 1 most significant) and
``sigma^z = diag(+1, -1)``, empty state in the +1 eigenspace.  Under this
convention the image of an annihilator at position k is the literal string
matrix ``sigma^z x ... x sigma^z x sigma^+ x 1 x ... x 1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import sparse as _sparse

from .polynomial import FermionPolynomial, Monomial

SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)  # |0><1|
IDENTITY_2 = np.eye(2, dtype=np.complex128)


class Grading(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    MIXED = "mixed"


@dataclass(frozen=True)
class ModeOrder:
    """An ordered tuple of distinct non-negative global mode labels."""

    modes: tuple[int, ...]

    def __init__(self, modes=()):
        modes = tuple(int(m) for m in modes)
        if any(m < 0 for m in modes):
            raise ValueError("mode labels must be non-negative")
        if len(set(modes)) != len(modes):
            raise ValueError(f"mode labels must be distinct, got {modes}")
        object.__setattr__(self, "modes", modes)

    def __len__(self) -> int:
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __contains__(self, mode: int) -> bool:
        return mode in self.modes

    def __getitem__(self, i: int) -> int:
        return self.modes[i]

    @property
    def dimension(self) -> int:
        return 1 << len(self.modes)

    def position(self, mode: int) -> int:
        """0-based position of a mode in the order."""
        try:
            return self.modes.index(mode)
        except ValueError:
            raise ValueError(f"mode {mode} not in order {self.modes}") from None


@dataclass(frozen=True)
class OccupationState:
    """Occupation bits relative to an associated mode order."""

    bits: tuple[int, ...]

    @property
    def parity(self) -> int:
        return sum(self.bits) % 2

    @property
    def index(self) -> int:
        i = 0
        for b in self.bits:
            i = (i << 1) | b
        return i


def enumerate_basis(order: ModeOrder) -> list[OccupationState]:
    """All occupation states of an order in lexicographic (index) order."""
    k = len(order)
    states = []
    for i in range(1 << k):
        bits = tuple((i >> (k - 1 - j)) & 1 for j in range(k))
        states.append(OccupationState(bits))
    return states


@lru_cache(maxsize=64)
def parity_vector(k: int) -> np.ndarray:
    """Occupation parity of each basis index for k modes (values 0/1)."""
    v = np.zeros(1, dtype=np.int8)
    for _ in range(k):
        v = np.concatenate([v, v ^ 1])
    return v


@lru_cache(maxsize=64)
def sector_indices(k: int) -> tuple[np.ndarray, np.ndarray]:
    """(even-parity indices, odd-parity indices), each in ascending order."""
    p = parity_vector(k)
    return np.nonzero(p == 0)[0], np.nonzero(p == 1)[0]


def classify_grading(matrix: np.ndarray) -> Grading:
    """Classify the parity-block pattern of a matrix (exact zero test)."""
    dim = matrix.shape[0]
    k = dim.bit_length() - 1
    p = parity_vector(k)
    mismatch = p[:, None] != p[None, :]
    off = matrix[mismatch]
    diag = matrix[~mismatch]
    has_off = bool(np.any(off != 0.0))
    has_diag = bool(np.any(diag != 0.0))
    if has_off and has_diag:
        return Grading.MIXED
    if has_off:
        return Grading.ODD
    return Grading.EVEN


@dataclass(frozen=True, eq=False)
class OrderedOperator:
    """A dense operator together with the mode order it is expressed in."""

    order: ModeOrder
    matrix: np.ndarray
    grading: Grading = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        raw = self.matrix
        m = np.ascontiguousarray(raw, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"matrix must be square, got shape {m.shape}")
        if m.shape[0] != self.order.dimension:
            raise ValueError(
                f"matrix dimension {m.shape[0]} does not match 2^{len(self.order)}"
            )
        if m is raw and m.flags.writeable:
            m = m.copy()  # never freeze a caller-owned buffer
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        if self.grading is None:
            object.__setattr__(self, "grading", classify_grading(m))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "OrderedOperator":
        return OrderedOperator(self.order, self.matrix.conj().T, self.grading)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def is_unitary(self, tol: float = 1e-10) -> bool:
        d = self.matrix.conj().T @ self.matrix - np.eye(self.dimension)
        return float(np.max(np.abs(d))) <= tol

    def __matmul__(self, other: "OrderedOperator") -> "OrderedOperator":
        if self.order != other.order:
            raise ValueError("operands must share the same mode order")
        return OrderedOperator(self.order, self.matrix @ other.matrix)


def jw_annihilator(order: ModeOrder, mode: int) -> OrderedOperator:
    """String-matrix image of the annihilator of ``mode`` in ``order``.

    Returns sigma^z tensored over all preceding positions, sigma^+ at the
    mode's position, identity after; grading is odd.
    """
    k = order.position(mode)
    m = np.ones((1, 1), dtype=np.complex128)
    for j in range(len(order)):
        if j < k:
            m = np.kron(m, SIGMA_Z)
        elif j == k:
            m = np.kron(m, SIGMA_PLUS)
        else:
            m = np.kron(m, IDENTITY_2)
    return OrderedOperator(order, m, Grading.ODD)


def _sparse_factor(order: ModeOrder, mode: int, dagger: bool) -> _sparse.csr_matrix:
    """Sparse JW image of a single creation/annihilation factor."""
    k = order.position(mode)
    m = _sparse.identity(1, dtype=np.complex128, format="csr")
    sz = _sparse.csr_matrix(SIGMA_Z)
    on = _sparse.csr_matrix(SIGMA_PLUS.conj().T if dagger else SIGMA_PLUS)
    i2 = _sparse.identity(2, dtype=np.complex128, format="csr")
    for j in range(len(order)):
        m = _sparse.kron(m, sz if j < k else (on if j == k else i2), format="csr")
    return m


def _monomial_sparse(order: ModeOrder, mono: Monomial) -> _sparse.csr_matrix:
    dim = order.dimension
    m = _sparse.identity(dim, dtype=np.complex128, format="csr")
    for mode, dag in mono:
        m = m @ _sparse_factor(order, mode, dag)
    return m


def represent_sparse(p: FermionPolynomial, order: ModeOrder) -> _sparse.csr_matrix:
    """Sparse occupation-number representation; used by hot paths."""
    for mode in p.support:
        if mode not in order:
            raise ValueError(f"polynomial mode {mode} not in order {order.modes}")
    dim = order.dimension
    acc = _sparse.csr_matrix((dim, dim), dtype=np.complex128)
    for coeff, mono in p.terms:
        acc = acc + coeff * _monomial_sparse(order, mono)
    return acc


def represent_polynomial(p: FermionPolynomial, order: ModeOrder) -> OrderedOperator:
    """Occupation-number representation of a polynomial in a given order.

    Sum over terms of coefficient times the left-to-right product of the
    factor images.  Grading is derived from the monomial degree parity.
    """
    mat = represent_sparse(p, order).toarray()
    grading = Grading(p.degree_parity()) if p.degree_parity() != "mixed" else Grading.MIXED
    return OrderedOperator(order, mat, grading)


def parity_blocks(a: OrderedOperator) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal blocks of an even operator in the parity-sorted basis.

    Each sector keeps the lexicographic sub-order of its states.
    """
    if a.grading is not Grading.EVEN:
        raise ValueError(f"parity_blocks requires an even operator, got {a.grading.value}")
    ev, od = sector_indices(len(a.order))
    return a.matrix[np.ix_(ev, ev)], a.matrix[np.ix_(od, od)]


def expm_i_even(h: np.ndarray) -> np.ndarray:
    """exp(i h) of an even hermitian matrix, exponentiated per parity block.

    Diagonalizing the two sectors separately keeps the off-pattern entries
    exactly zero and the result unitary to rounding.
    """
    dim = h.shape[0]
    k = dim.bit_length() - 1
    u = np.zeros((dim, dim), dtype=np.complex128)
    for idx in sector_indices(k):
        if idx.size == 0:
            continue
        block = h[np.ix_(idx, idx)]
        w, v = np.linalg.eigh(block)
        u[np.ix_(idx, idx)] = (v * np.exp(1j * w)) @ v.conj().T
    return u


def unitary_from_generator(h: OrderedOperator, *, check_tol: float = 1e-12) -> OrderedOperator:
    """exp(i h) for an even hermitian generator given as an OrderedOperator."""
    if h.grading is not Grading.EVEN:
        raise ValueError("generator must have even grading")
    if float(np.max(np.abs(h.matrix - h.matrix.conj().T))) > check_tol:
        raise ValueError("generator must be hermitian")
    u = expm_i_even(h.matrix)
    u.flags.writeable = False
    return OrderedOperator(h.order, u, Grading.EVEN)
