"""Dense global reference implementation with explicit string operators.

Everything here works on the full 2^n space in the trivial order (1, ..., n)
and is deliberately independent of the local contraction machinery: operators
are built by applying creation/annihilation factors to basis states with
explicit occupation-count signs, states are full vectors, and gates are
exponentiated globally.  Serves as the oracle for the local engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse as _sparse
from scipy.sparse.linalg import eigsh

from .errors import ResourceLimitError
from .polynomial import FermionPolynomial

MODE_CAP = 14
_DENSE_EIG_MAX = 10


def _check_cap(n: int) -> None:
    if n > MODE_CAP:
        raise ResourceLimitError(f"{n} modes exceed the dense-oracle cap of {MODE_CAP}")
    if n < 0:
        raise ValueError("mode count must be non-negative")


@lru_cache(maxsize=32)
def _popcount_table(n_bits: int) -> np.ndarray:
    idx = np.arange(1 << n_bits, dtype=np.int64)
    counts = np.zeros(1 << n_bits, dtype=np.int64)
    for b in range(n_bits):
        counts += (idx >> b) & 1
    return counts


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """A full-lattice operator in the trivial order (1, ..., n)."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        _check_cap(self.n)
        m = np.asarray(self.matrix)
        if m.shape != (1 << self.n, 1 << self.n):
            raise ValueError(f"matrix shape {m.shape} does not match 2^{self.n}")


def _monomial_action(mono, n: int):
    """Columns, image rows, and signs of a monomial acting on all basis states.

    Factors apply right to left; a state is dropped once any factor kills it.
    """
    pop = _popcount_table(n)
    cols = np.arange(1 << n, dtype=np.int64)
    states = cols.copy()
    signs = np.ones(1 << n, dtype=np.int64)
    alive = np.ones(1 << n, dtype=bool)
    for mode, dagger in reversed(mono):
        pos = mode - 1  # trivial order: mode m sits at position m
        shift = n - 1 - pos
        bit = (states >> shift) & 1
        alive &= bit == (0 if dagger else 1)
        preceding = states >> (shift + 1)
        signs = np.where((pop[preceding] & 1) == 1, -signs, signs)
        states = states ^ (alive.astype(np.int64) << shift)
    return cols[alive], states[alive], signs[alive]


def global_jwt(p: FermionPolynomial, n: int) -> DenseOperator:
    """Full occupation-number representation of a polynomial, strings included."""
    _check_cap(n)
    if any(not 1 <= m <= n for m in p.support):
        raise ValueError(f"polynomial support {p.support} outside 1..{n}")
    dim = 1 << n
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for coeff, mono in p.terms:
        mat = np.zeros((dim, dim), dtype=np.complex128)
        cols, rows, signs = _monomial_action(mono, n)
        mat[rows, cols] = signs
        acc += coeff * mat
    return DenseOperator(n, acc)


def _sparse_global(p: FermionPolynomial, n: int) -> _sparse.csr_matrix:
    dim = 1 << n
    rows_all, cols_all, vals_all = [], [], []
    for coeff, mono in p.terms:
        cols, rows, signs = _monomial_action(mono, n)
        rows_all.append(rows)
        cols_all.append(cols)
        vals_all.append(coeff * signs.astype(np.complex128))
    if not rows_all:
        return _sparse.csr_matrix((dim, dim), dtype=np.complex128)
    return _sparse.csr_matrix(
        (np.concatenate(vals_all), (np.concatenate(rows_all), np.concatenate(cols_all))),
        shape=(dim, dim),
    )


def exact_ground_energy_terms(terms, n: int) -> float:
    """Smallest eigenvalue of a sum of polynomial terms on n modes.

    Dense symmetric decomposition up to 10 modes; iterative smallest
    eigenvalue on a sparse assembly for 11..14.
    """
    _check_cap(n)
    if n <= _DENSE_EIG_MAX:
        dim = 1 << n
        h = np.zeros((dim, dim), dtype=np.complex128)
        for p in terms:
            if not p.is_zero:
                h += global_jwt(p, n).matrix
        h = 0.5 * (h + h.conj().T)
        return float(np.linalg.eigvalsh(h)[0])
    dim = 1 << n
    h = _sparse.csr_matrix((dim, dim), dtype=np.complex128)
    for p in terms:
        if not p.is_zero:
            h = h + _sparse_global(p, n)
    h = 0.5 * (h + h.conj().T)
    vals = eigsh(h, k=1, which="SA", return_eigenvectors=False, maxiter=5000 * n)
    return float(vals[0].real)


def exact_ground_energy(model) -> float:
    """Ground-state energy of a lattice model by exact diagonalization."""
    from .lattice import build_hamiltonian

    n = model.n_modes
    _check_cap(n)
    return exact_ground_energy_terms([p for p, _ in build_hamiltonian(model)], n)


def _dense_unitary(generator: FermionPolynomial, n: int) -> np.ndarray:
    h = global_jwt(generator, n).matrix
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return (v * np.exp(1j * w)) @ v.conj().T


def global_expectation(circuit, observable: FermionPolynomial) -> float:
    """Eq.-style dense evaluation: build the full state, then <psi|A|psi>."""
    n = circuit.n_modes
    _check_cap(n)
    index = 0
    for bit in circuit.reference:
        index = (index << 1) | bit
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[index] = 1.0
    for gate in circuit.gates:  # ascending time = application order
        psi = _dense_unitary(gate.generator, n) @ psi
    a = global_jwt(observable, n).matrix
    return float(np.real(np.vdot(psi, a @ psi)))
