"""2D lattice model: H = t sum_<jk> (f_j^dag f_k + h.c.) + sum_j n_j + u sum_<jk> n_j n_k.

Open boundaries, row-major mode labels starting at 1.  Besides the
Hamiltonian terms this module provides the two closed-form/decomposition
oracles used for benchmarking: the free-fermion ground energy at u = 0 and
the block-decomposition (Anderson) lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError
from .fock import ModeOrder, represent_polynomial
from .polynomial import FermionPolynomial

ANDERSON_BLOCK_CAP = 14


@dataclass(frozen=True)
class LatticeModel:
    """Open-boundary width x height grid with hopping t and interaction u."""

    width: int
    height: int
    t: float
    u: float

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("lattice dimensions must be positive")

    @property
    def n_modes(self) -> int:
        return self.width * self.height

    def mode(self, row: int, col: int) -> int:
        """1-based mode label of grid site (row, col), both 0-based."""
        if not (0 <= row < self.height and 0 <= col < self.width):
            raise ValueError(f"site ({row}, {col}) outside the lattice")
        return row * self.width + col + 1

    def bonds(self) -> list[tuple[int, int]]:
        """Nearest-neighbor edges (horizontal first, then vertical)."""
        out = []
        for r in range(self.height):
            for c in range(self.width - 1):
                out.append((self.mode(r, c), self.mode(r, c + 1)))
        for r in range(self.height - 1):
            for c in range(self.width):
                out.append((self.mode(r, c), self.mode(r + 1, c)))
        return out


def bond_term(model: LatticeModel, j: int, k: int) -> FermionPolynomial:
    """Combined hopping + interaction term of one bond."""
    term = model.t * FermionPolynomial.hopping(j, k)
    if model.u != 0.0:
        term = term + model.u * (FermionPolynomial.number(j) * FermionPolynomial.number(k))
    return term


def build_hamiltonian(model: LatticeModel) -> list[tuple[FermionPolynomial, tuple[int, ...]]]:
    """One even hermitian term per bond plus one number term per mode."""
    terms: list[tuple[FermionPolynomial, tuple[int, ...]]] = []
    for j, k in model.bonds():
        terms.append((bond_term(model, j, k), (j, k)))
    for m in range(1, model.n_modes + 1):
        terms.append((FermionPolynomial.number(m), (m,)))
    return terms


def adjacency_matrix(model: LatticeModel) -> np.ndarray:
    n = model.n_modes
    a = np.zeros((n, n))
    for j, k in model.bonds():
        a[j - 1, k - 1] = a[k - 1, j - 1] = 1.0
    return a


def free_fermion_energy(model: LatticeModel) -> float:
    """Ground energy at u = 0: filled negative levels of t*adjacency + 1."""
    if model.u != 0.0:
        raise ValueError("free-fermion energy requires u = 0")
    levels = np.linalg.eigvalsh(model.t * adjacency_matrix(model) + np.eye(model.n_modes))
    return float(levels[levels < 0.0].sum())


def _tile_blocks(model: LatticeModel, block_shape: tuple[int, int]) -> list[list[int]]:
    bw, bh = block_shape
    if bw < 1 or bh < 1:
        raise ValueError("block dimensions must be positive")
    if model.width % bw != 0 or model.height % bh != 0:
        raise ValueError(
            f"{bw}x{bh} blocks do not tile a {model.width}x{model.height} lattice"
        )
    blocks = []
    for br in range(model.height // bh):
        for bc in range(model.width // bw):
            blocks.append(
                [
                    model.mode(br * bh + r, bc * bw + c)
                    for r in range(bh)
                    for c in range(bw)
                ]
            )
    return blocks


def _ground_energy_local(p: FermionPolynomial, modes: list[int]) -> float:
    h = represent_polynomial(p, ModeOrder(sorted(modes))).matrix
    return float(np.linalg.eigvalsh(0.5 * (h + h.conj().T))[0])


def anderson_bound(model: LatticeModel, block_shape: tuple[int, int]) -> float:
    """Rigorous lower bound on the ground energy from a block decomposition.

    The Hamiltonian splits as sum of block Hamiltonians (interior bonds plus
    on-site terms) and one 2-mode problem per cut bond; min-eigenvalue
    superadditivity makes the sum of the parts' ground energies a lower
    bound on the total.
    """
    blocks = _tile_blocks(model, block_shape)
    if any(len(b) > ANDERSON_BLOCK_CAP for b in blocks):
        raise ResourceLimitError(
            f"block exceeds the {ANDERSON_BLOCK_CAP}-mode exact-diagonalization cap"
        )
    owner = {}
    for i, modes in enumerate(blocks):
        for m in modes:
            owner[m] = i
    total = 0.0
    for i, modes in enumerate(blocks):
        hb = FermionPolynomial.zero()
        for j, k in model.bonds():
            if owner[j] == i and owner[k] == i:
                hb = hb + bond_term(model, j, k)
        for m in modes:
            hb = hb + FermionPolynomial.number(m)
        total += _ground_energy_local(hb, modes)
    for j, k in model.bonds():
        if owner[j] != owner[k]:
            total += _ground_energy_local(bond_term(model, j, k), [j, k])
    return total
