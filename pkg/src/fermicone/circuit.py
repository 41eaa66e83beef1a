"""Fermionic unitary circuits, causal cones, and local contraction.

An expectation value is evaluated as

    E = <ref| U_1^dag ... U_T^dag  A  U_T ... U_1 |ref>,

where gate times t = 1..T give the order in which gates are applied to the
product reference state.  The contraction walks gates from time T down to 1,
dressing the observable with each cone gate, and projects modes onto their
reference occupation as soon as no remaining gate touches them.  Everything
order-dependent (alignment permutations, signs, projection index maps) is
precomputed into a :class:`ContractionPlan`, so repeated contractions of the
same topology reduce to gathers and matrix products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceLimitError
from .fock import (
    Grading,
    ModeOrder,
    OrderedOperator,
    parity_vector,
    represent_polynomial,
    unitary_from_generator,
)
from .polynomial import FermionPolynomial
from .reorder import ReorderPlan, signed_permutation

DEFAULT_WIDTH_CAP = 14


@dataclass(frozen=True, eq=False)
class FermionGate:
    """A parity-even unitary on a set of modes, applied at an integer time."""

    support: tuple[int, ...]
    generator: FermionPolynomial
    time: int
    unitary: OrderedOperator = field(init=False, repr=False)

    def __post_init__(self):
        support = tuple(sorted(set(int(m) for m in self.support)))
        if not support:
            raise ValueError("gate support must be non-empty")
        object.__setattr__(self, "support", support)
        if not set(self.generator.support) <= set(support):
            raise ValueError("generator acts outside the declared support")
        if not self.generator.is_even:
            raise ValueError("gate generator must be parity-even")
        if not self.generator.is_hermitian():
            raise ValueError("gate generator must be hermitian")
        h = represent_polynomial(self.generator, ModeOrder(support))
        u = unitary_from_generator(h)
        if not u.is_unitary(1e-10):
            raise ValueError("gate unitary failed the 1e-10 unitarity check")
        object.__setattr__(self, "unitary", u)


@dataclass(frozen=True, eq=False)
class Circuit:
    """A time-ordered list of fermionic gates plus a reference occupation."""

    n_modes: int
    gates: tuple[FermionGate, ...]
    reference: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "reference", tuple(int(b) for b in self.reference))
        if len(self.reference) != self.n_modes:
            raise ValueError("reference length must equal n_modes")
        if any(b not in (0, 1) for b in self.reference):
            raise ValueError("reference bits must be 0 or 1")
        times = [g.time for g in self.gates]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ValueError("gate times must be strictly increasing")
        all_modes = set(range(1, self.n_modes + 1))
        for g in self.gates:
            if not set(g.support) <= all_modes:
                raise ValueError(f"gate support {g.support} outside 1..{self.n_modes}")

    @classmethod
    def vacuum(cls, n_modes: int, gates=()) -> "Circuit":
        return cls(n_modes, tuple(gates), (0,) * n_modes)

    def reference_bit(self, mode: int) -> int:
        return self.reference[mode - 1]


@dataclass(frozen=True)
class CausalStep:
    gate_index: int
    active_before: frozenset[int]
    active_after: frozenset[int]


@dataclass(frozen=True)
class CausalCone:
    """Cone gates in contraction (reverse-time) order with active mode sets."""

    steps: tuple[CausalStep, ...]
    final_active: frozenset[int]

    @property
    def gate_indices(self) -> tuple[int, ...]:
        return tuple(s.gate_index for s in self.steps)

    @property
    def width(self) -> int:
        widths = [len(s.active_after) for s in self.steps]
        return max(widths, default=len(self.final_active))


def causal_cone(circuit: Circuit, observable_support) -> CausalCone:
    """Gates that survive cancellation for an observable on the given modes.

    Walking from the last-applied gate down to the first, a gate enters the
    cone iff its support intersects the current active set; disjoint gates
    cancel against their conjugates.
    """
    active = frozenset(int(m) for m in observable_support)
    if not active:
        raise ValueError("observable support must be non-empty")
    if not active <= set(range(1, circuit.n_modes + 1)):
        raise ValueError(f"observable support {sorted(active)} outside 1..{circuit.n_modes}")
    steps = []
    for idx in range(len(circuit.gates) - 1, -1, -1):
        gate = circuit.gates[idx]
        if active & set(gate.support):
            after = active | set(gate.support)
            steps.append(CausalStep(idx, active, after))
            active = after
    return CausalCone(tuple(steps), active)


@dataclass
class ContractionStats:
    """Instrumentation hook recording contraction resource usage."""

    max_width: int = 0
    peak_matrix_entries: int = 0

    def record(self, width: int) -> None:
        self.max_width = max(self.max_width, width)
        self.peak_matrix_entries = max(self.peak_matrix_entries, (1 << width) ** 2)


@dataclass(frozen=True, eq=False)
class _Embed:
    """Widen a matrix from a sub-order to an enclosing order.

    out[u, v] = sign[u] sign[v] A[src[u], src[v]] * (extra[u] == extra[v])
    """

    src: np.ndarray
    extra: np.ndarray
    sign: np.ndarray
    out_order: tuple[int, ...]
    identity: bool

    def apply(self, a: np.ndarray) -> np.ndarray:
        if self.identity:
            return a
        out = a[np.ix_(self.src, self.src)]
        out *= self.extra[:, None] == self.extra[None, :]
        out *= self.sign[:, None]
        out *= self.sign[None, :]
        return out


@dataclass(frozen=True, eq=False)
class _Project:
    """Drop modes at fixed occupations: a fused composition of rule-(f) steps."""

    idx: np.ndarray
    sign: np.ndarray
    out_order: tuple[int, ...]

    def apply(self, a: np.ndarray) -> np.ndarray:
        out = a[np.ix_(self.idx, self.idx)]
        out *= self.sign[:, None]
        out *= self.sign[None, :]
        return out


@dataclass(frozen=True, eq=False)
class _GateStep:
    gate_index: int
    obs_embed: _Embed
    gate_embed: _Embed
    union_order: tuple[int, ...]
    project: "_Project | None"


def _embed_spec(src_order: tuple[int, ...], dst_order: tuple[int, ...]) -> _Embed:
    if src_order == dst_order:
        return _Embed(np.empty(0), np.empty(0), np.empty(0), dst_order, True)
    extra_modes = tuple(m for m in dst_order if m not in src_order)
    wide = src_order + extra_modes
    plan = ReorderPlan.build(ModeOrder(wide), ModeOrder(dst_order))
    gather, sign = signed_permutation(plan)
    # index over the (src..., extra...) order splits into src / extra bits
    r = len(extra_modes)
    src = gather >> r
    extra = gather & ((1 << r) - 1)
    return _Embed(src.astype(np.intp), extra.astype(np.int64), sign.astype(np.int8), dst_order, False)


def _project_spec(order: tuple[int, ...], drops: list[tuple[int, int]]) -> _Project:
    dim = 1 << len(order)
    idx = np.arange(dim)
    sgn = np.ones(dim, dtype=np.int8)
    cur = list(order)
    for mode, bit in drops:
        fronted = [mode] + [m for m in cur if m != mode]
        plan = ReorderPlan.build(ModeOrder(cur), ModeOrder(fronted))
        gather, sign = signed_permutation(plan)
        half = 1 << (len(cur) - 1)
        sel = gather[bit * half : (bit + 1) * half]
        ssel = sign[bit * half : (bit + 1) * half]
        idx = idx[sel]
        sgn = ssel * sgn[sel]
        cur = fronted[1:]
    return _Project(idx.astype(np.intp), sgn, tuple(cur))


@dataclass(frozen=True, eq=False)
class ContractionPlan:
    """Static schedule contracting one observable support against a circuit."""

    circuit: Circuit
    initial_order: tuple[int, ...]
    initial_project: "_Project | None"
    steps: tuple[_GateStep, ...]
    cone: CausalCone
    max_width: int

    @classmethod
    def build(cls, circuit: Circuit, observable_support, *, width_cap: int = DEFAULT_WIDTH_CAP) -> "ContractionPlan":
        cone = causal_cone(circuit, observable_support)
        support = tuple(sorted(set(int(m) for m in observable_support)))
        remaining = [set(circuit.gates[s.gate_index].support) for s in cone.steps]
        # touched[j] = modes appearing in cone gates from walk position j on
        touched: list[set[int]] = [set() for _ in range(len(cone.steps) + 1)]
        for j in range(len(cone.steps) - 1, -1, -1):
            touched[j] = touched[j + 1] | remaining[j]

        max_width = len(support)
        order = support
        exits0 = [m for m in order if m not in touched[0]]
        initial_project = None
        if exits0:
            initial_project = _project_spec(order, [(m, circuit.reference_bit(m)) for m in exits0])
            order = initial_project.out_order

        steps = []
        for j, cstep in enumerate(cone.steps):
            gate = circuit.gates[cstep.gate_index]
            union = tuple(sorted(set(order) | set(gate.support)))
            max_width = max(max_width, len(union))
            if len(union) > width_cap:
                raise ResourceLimitError(
                    f"causal cone width {len(union)} exceeds the cap of {width_cap}"
                )
            obs_embed = _embed_spec(order, union)
            gate_embed = _embed_spec(gate.support, union)
            exits = [m for m in union if m not in touched[j + 1]]
            project = None
            order = union
            if exits:
                project = _project_spec(union, [(m, circuit.reference_bit(m)) for m in exits])
                order = project.out_order
            steps.append(_GateStep(cstep.gate_index, obs_embed, gate_embed, union, project))
        if order:
            raise AssertionError("plan must close onto a scalar")
        return cls(circuit, support, initial_project, tuple(steps), cone, max_width)

    def execute(
        self,
        observable_matrix: np.ndarray,
        gate_matrices=None,
        stats: ContractionStats | None = None,
        from_step: int = 0,
        checkpoints: list | None = None,
    ) -> complex:
        """Run the plan; gate_matrices may override the circuit's cached ones.

        With ``checkpoints`` a list, the dressed observable entering each gate
        step is recorded, enabling cheap restarts from any step.
        """
        a = observable_matrix
        if from_step == 0 and self.initial_project is not None:
            a = self.initial_project.apply(a)
        for step in self.steps[from_step:]:
            if checkpoints is not None:
                checkpoints.append(a)
            a = step.obs_embed.apply(a)
            if gate_matrices is None:
                g = self.circuit.gates[step.gate_index].unitary.matrix
            else:
                g = gate_matrices[step.gate_index]
            u = step.gate_embed.apply(g)
            if stats is not None:
                stats.record(len(step.union_order))
            a = u.conj().T @ a @ u
            if step.project is not None:
                a = step.project.apply(a)
        if stats is not None:
            stats.record(self.max_width)
        return complex(a[0, 0])


def _contract_complex(
    circuit: Circuit,
    observable: FermionPolynomial,
    *,
    width_cap: int = DEFAULT_WIDTH_CAP,
    stats: ContractionStats | None = None,
    plan: ContractionPlan | None = None,
) -> complex:
    if plan is None:
        plan = ContractionPlan.build(circuit, observable.support, width_cap=width_cap)
    rep = represent_polynomial(observable, ModeOrder(plan.initial_order))
    return plan.execute(rep.matrix, stats=stats)


def contract_expectation(
    circuit: Circuit,
    observable: FermionPolynomial,
    *,
    width_cap: int = DEFAULT_WIDTH_CAP,
    stats: ContractionStats | None = None,
    plan: ContractionPlan | None = None,
) -> float:
    """Expectation value of a local observable, contracted inside its cone.

    The observable must be a physical (parity-even) hermitian polynomial.
    Never materializes a matrix wider than the causal cone; raises
    :class:`ResourceLimitError` if the cone exceeds ``width_cap`` modes.
    """
    if not observable.is_even:
        raise ValueError("observable must be parity-even (physical)")
    if not observable.is_hermitian():
        raise ValueError("observable must be hermitian")
    return _contract_complex(
        circuit, observable, width_cap=width_cap, stats=stats, plan=plan
    ).real


def reduced_density(
    circuit: Circuit,
    modes,
    *,
    width_cap: int = DEFAULT_WIDTH_CAP,
) -> OrderedOperator:
    """Reduced density matrix on a set of modes.

    Contracts the conjugated even matrix-unit basis on the modes; odd-pattern
    entries vanish by parity superselection and are not contracted.
    """
    support = tuple(sorted(set(int(m) for m in modes)))
    if len(support) > width_cap:
        raise ResourceLimitError(f"{len(support)} modes exceed the width cap {width_cap}")
    plan = ContractionPlan.build(circuit, support, width_cap=width_cap)
    order = ModeOrder(support)
    dim = order.dimension
    par = parity_vector(len(support))
    rho = np.zeros((dim, dim), dtype=np.complex128)
    unit = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(dim):
        for j in range(dim):
            if par[i] != par[j]:
                continue
            unit[i, j] = 1.0
            rho[j, i] = plan.execute(unit.copy())
            unit[i, j] = 0.0
    rho.flags.writeable = False
    return OrderedOperator(order, rho, Grading.EVEN)
