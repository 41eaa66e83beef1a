"""Layered coarse-graining circuits for lattice models.

Each layer tiles the current grid with blocks; a block unitary maps the
block's modes onto one representative that survives into the next, coarser
grid, while the remaining modes become inert and are projected out by the
contraction.  One two-mode disentangler sits across each pair of adjacent
blocks.  Gate generators are hermitian parity-even polynomials expanded in a
fixed monomial basis, so the ansatz is a flat real parameter vector.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from .circuit import Circuit, FermionGate, contract_expectation
from .polynomial import FermionPolynomial


def _canonical_monomials(support: tuple[int, ...], degree: int):
    for d in range(len(support) + 1):
        for a in range(len(support) + 1):
            deg = d + a
            if deg < 2 or deg > degree or deg % 2:
                continue
            for dag in combinations(support, d):
                for ann in combinations(support, a):
                    yield tuple((m, True) for m in dag) + tuple((m, False) for m in ann)


def _single(mono) -> FermionPolynomial:
    return FermionPolynomial([(1.0, mono)])


def _imag_hopping(j: int, k: int) -> FermionPolynomial:
    return FermionPolynomial([(1j, ((j, True), (k, False))), (-1j, ((k, True), (j, False)))])


def _pair_re(j: int, k: int) -> FermionPolynomial:
    p = _single(((j, True), (k, True)))
    return p + p.dagger()


def _pair_im(j: int, k: int) -> FermionPolynomial:
    p = _single(((j, True), (k, True)))
    return (1j) * p - (1j) * p.dagger()


def _bond_local_basis(support, degree: int, bonds) -> tuple[FermionPolynomial, ...]:
    basis: list[FermionPolynomial] = []
    for m in support:
        basis.append(FermionPolynomial.number(m))
    for j, k in bonds:
        basis.append(FermionPolynomial.hopping(j, k))
        basis.append(_imag_hopping(j, k))
        basis.append(_pair_re(j, k))
        basis.append(_pair_im(j, k))
    if degree >= 4:
        for j, k in bonds:
            basis.append(FermionPolynomial.number(j) * FermionPolynomial.number(k))
    return tuple(basis)


def generator_basis(support, degree: int = 4, bonds=None) -> tuple[FermionPolynomial, ...]:
    """Hermitian parity-even generator basis on a gate support.

    Supports of up to 4 modes get every even hermitian monomial pair up to
    the requested degree.  Larger supports use a bond-local basis (hopping,
    pairing, densities on the support's lattice bonds) to keep parameter
    counts proportional to the block size.
    """
    support = tuple(sorted(set(int(m) for m in support)))
    if len(support) > 4:
        if bonds is None:
            raise ValueError("supports larger than 4 modes need their lattice bonds")
        return _bond_local_basis(support, degree, bonds)
    basis: list[FermionPolynomial] = []
    seen: set = set()
    for mono in _canonical_monomials(support, degree):
        if mono in seen:
            continue
        seen.add(mono)
        p = _single(mono)
        ((qc, qm),) = p.dagger().terms
        if qm == mono:
            basis.append(p if qc.real > 0 else (1j) * p)
        else:
            seen.add(qm)
            q = p.dagger()
            basis.append(p + q)
            basis.append((1j) * p - (1j) * q)
    return tuple(basis)


@dataclass(frozen=True)
class LayerSpec:
    """One coarse-graining step: grid in, blocks + disentanglers, reps out."""

    grid: tuple[tuple[int, ...], ...]
    block_shape: tuple[int, int]
    blocks: tuple[tuple[int, ...], ...]
    representatives: tuple[int, ...]
    disentanglers: tuple[tuple[int, int], ...]
    block_bonds: tuple[tuple[tuple[int, int], ...], ...]


@dataclass(frozen=True)
class GateSpec:
    """One parameterized gate: support, generator basis, parameter slice."""

    support: tuple[int, ...]
    basis: tuple[FermionPolynomial, ...]
    start: int
    stop: int
    role: str
    time: int

    @property
    def n_params(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True)
class MeraAnsatz:
    """A parameterized coarse-graining circuit over a lattice."""

    lattice_shape: tuple[int, int]
    block_shape: tuple[int, int]
    degree: int
    layers: tuple[LayerSpec, ...]
    gate_specs: tuple[GateSpec, ...]
    params: np.ndarray
    top_mode: int
    seed: int

    @property
    def n_modes(self) -> int:
        return self.lattice_shape[0] * self.lattice_shape[1]

    @property
    def n_params(self) -> int:
        return int(self.params.size)

    def reference_bits(self, parity: str = "even") -> tuple[int, ...]:
        if parity not in ("even", "odd"):
            raise ValueError("parity must be 'even' or 'odd'")
        bits = [0] * self.n_modes
        if parity == "odd":
            bits[self.top_mode - 1] = 1
        return tuple(bits)

    def with_params(self, params) -> "MeraAnsatz":
        theta = np.asarray(params, dtype=float).copy()
        if theta.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got {theta.shape}")
        return replace(self, params=theta)

    def gate_generator(self, spec: GateSpec, params=None) -> FermionPolynomial:
        theta = self.params if params is None else np.asarray(params, dtype=float)
        gen = FermionPolynomial.zero()
        for i, b in enumerate(spec.basis):
            c = float(theta[spec.start + i])
            if c != 0.0:
                gen = gen + c * b
        return gen

    def circuit(self, params=None, parity: str = "even") -> Circuit:
        gates = [
            FermionGate(spec.support, self.gate_generator(spec, params), spec.time)
            for spec in self.gate_specs
        ]
        return Circuit(self.n_modes, tuple(gates), self.reference_bits(parity))


def _grid_bonds(positions: dict[int, tuple[int, int]], modes) -> tuple[tuple[int, int], ...]:
    """Adjacent pairs among modes, by their (row, col) grid positions."""
    bonds = []
    for j, k in combinations(sorted(modes), 2):
        (r1, c1), (r2, c2) = positions[j], positions[k]
        if abs(r1 - r2) + abs(c1 - c2) == 1:
            bonds.append((j, k))
    return tuple(bonds)


def build_mera(model, block_shape: tuple[int, int], seed: int, degree: int = 4):
    """Deterministic layered ansatz plus its initial circuit.

    Blocks clamp to the current grid when it becomes smaller than the
    requested shape; a residual grid not tiled by the clamped block is an
    error (no padding).  Gate coefficients initialize as N(0, 0.01) draws
    from the seed.
    """
    bw0, bh0 = int(block_shape[0]), int(block_shape[1])
    if bw0 < 1 or bh0 < 1:
        raise ValueError("block dimensions must be positive")
    grid = [[model.mode(r, c) for c in range(model.width)] for r in range(model.height)]
    layers: list[LayerSpec] = []
    while len(grid) * len(grid[0]) > 1:
        gh, gw = len(grid), len(grid[0])
        bw, bh = min(bw0, gw), min(bh0, gh)
        if bw == 1 and bh == 1:
            bw, bh = gw, gh  # consolidate the residual grid in one block
        if gw % bw or gh % bh:
            raise ValueError(
                f"{bw}x{bh} blocks do not tile the {gw}x{gh} layer grid (padding disabled)"
            )
        positions = {grid[r][c]: (r, c) for r in range(gh) for c in range(gw)}
        nbr, nbc = gh // bh, gw // bw
        blocks, reps, bonds_per_block = [], [], []
        for br in range(nbr):
            for bc in range(nbc):
                modes = tuple(
                    grid[br * bh + r][bc * bw + c] for r in range(bh) for c in range(bw)
                )
                blocks.append(modes)
                reps.append(grid[br * bh][bc * bw])
                bonds_per_block.append(_grid_bonds(positions, modes))
        disentanglers = []
        rmid, cmid = (bh - 1) // 2, bw // 2 if bw > 1 else 0
        for br in range(nbr):
            for bc in range(nbc - 1):
                left = grid[br * bh + rmid][bc * bw + bw - 1]
                right = grid[br * bh + rmid][(bc + 1) * bw]
                disentanglers.append((left, right))
        for br in range(nbr - 1):
            for bc in range(nbc):
                upper = grid[br * bh + bh - 1][bc * bw + cmid]
                lower = grid[(br + 1) * bh][bc * bw + cmid]
                disentanglers.append((upper, lower))
        layers.append(
            LayerSpec(
                tuple(tuple(row) for row in grid),
                (bw, bh),
                tuple(blocks),
                tuple(reps),
                tuple(disentanglers),
                tuple(bonds_per_block),
            )
        )
        grid = [[reps[br * nbc + bc] for bc in range(nbc)] for br in range(nbr)]

    specs: list[GateSpec] = []
    offset, t = 0, 1
    for layer in reversed(layers):
        for modes, bonds in zip(layer.blocks, layer.block_bonds):
            basis = generator_basis(modes, degree, bonds=bonds)
            specs.append(GateSpec(tuple(sorted(modes)), basis, offset, offset + len(basis), "block", t))
            offset += len(basis)
            t += 1
        for pair in layer.disentanglers:
            basis = generator_basis(pair, degree)
            specs.append(GateSpec(tuple(sorted(pair)), basis, offset, offset + len(basis), "disentangler", t))
            offset += len(basis)
            t += 1

    top_mode = layers[-1].representatives[0] if layers else grid[0][0]
    rng = np.random.default_rng(seed)
    params = rng.normal(0.0, 0.01, offset)
    ansatz = MeraAnsatz(
        (model.width, model.height),
        (bw0, bh0),
        degree,
        tuple(layers),
        tuple(specs),
        params,
        top_mode,
        int(seed),
    )
    return ansatz, ansatz.circuit()


def energy(circuit: Circuit, terms, *, width_cap: int = 14, plans=None) -> float:
    """Sum of contracted expectation values over Hamiltonian terms."""
    total = 0.0
    for i, item in enumerate(terms):
        p = item[0] if isinstance(item, tuple) else item
        if p.is_zero:
            continue
        plan = None if plans is None else plans[i]
        total += contract_expectation(circuit, p, width_cap=width_cap, plan=plan)
    return total
