"""Mode-order transformations of operators without global string operators.

All primitives act on :class:`~fermicone.fock.OrderedOperator` values and
change only the mode order bookkeeping plus local signs:

* adjacent swap / general reorder (conjugation by fermionic swap gates),
* prepending a fresh mode,
* conjugation by an even unitary on the same support,
* support alignment of two operators,
* partial trace and partial projection over one mode.

Reordering is realized as a plan of adjacent transpositions.  Conjugating by
the 4x4 fermionic swap is a signed relabeling of basis indices, so a whole
plan composes into one gather (index permutation) plus one sign vector; the
result is entrywise identical to multiplying the swap matrices out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import Grading, ModeOrder, OrderedOperator, classify_grading

# |00><00| + |01><10| + |10><01| - |11><11|
FERMIONIC_SWAP = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
    ],
    dtype=np.complex128,
)


@dataclass(frozen=True)
class ReorderPlan:
    """Adjacent transpositions turning ``source`` into ``target``.

    Each entry is a 0-based position ``i`` exchanging positions ``i`` and
    ``i+1``; transpositions apply left to right.
    """

    source: ModeOrder
    target: ModeOrder
    transpositions: tuple[int, ...]

    def __post_init__(self):
        modes = list(self.source.modes)
        for i in self.transpositions:
            if not 0 <= i < len(modes) - 1:
                raise ValueError(f"transposition position {i} out of range")
            modes[i], modes[i + 1] = modes[i + 1], modes[i]
        if tuple(modes) != self.target.modes:
            raise ValueError("transpositions do not realize the target order")

    @classmethod
    def build(cls, source: ModeOrder, target: ModeOrder) -> "ReorderPlan":
        """Bubble-sort decomposition of the permutation source -> target."""
        if sorted(source.modes) != sorted(target.modes):
            raise ValueError(
                f"target {target.modes} is not a permutation of source {source.modes}"
            )
        rank = {m: i for i, m in enumerate(target.modes)}
        work = [rank[m] for m in source.modes]
        swaps = []
        changed = True
        while changed:
            changed = False
            for i in range(len(work) - 1):
                if work[i] > work[i + 1]:
                    work[i], work[i + 1] = work[i + 1], work[i]
                    swaps.append(i)
                    changed = True
        return cls(source, target, tuple(swaps))


def signed_permutation(plan: ReorderPlan) -> tuple[np.ndarray, np.ndarray]:
    """Composed basis action of a plan's swap conjugations.

    Returns ``(gather, sign)`` such that the reordered matrix is
    ``m'[u, v] = sign[u] sign[v] m[gather[u], gather[v]]``.
    """
    k = len(plan.source)
    dim = 1 << k
    gather = np.arange(dim)
    sign = np.ones(dim, dtype=np.int8)
    idx = np.arange(dim)
    for i in plan.transpositions:
        hi = k - 1 - i  # bit of position i
        lo = hi - 1  # bit of position i + 1
        b_hi = (idx >> hi) & 1
        b_lo = (idx >> lo) & 1
        tau = idx ^ ((b_hi ^ b_lo) * ((1 << hi) | (1 << lo)))
        step_sign = np.where((b_hi & b_lo) == 1, -1, 1).astype(np.int8)
        gather = gather[tau]
        sign = step_sign * sign[tau]
    return gather, sign


def _apply_signed(matrix: np.ndarray, gather: np.ndarray, sign: np.ndarray) -> np.ndarray:
    out = matrix[np.ix_(gather, gather)]
    out *= sign[:, None]
    out *= sign[None, :]
    return out


def adjacent_swap(a: OrderedOperator, position: int) -> OrderedOperator:
    """Exchange the modes at ``position`` and ``position + 1`` of the order.

    Equals conjugation by ``1 x s x 1`` with the fermionic swap ``s`` at the
    given position pair.
    """
    k = len(a.order)
    if not 0 <= position < k - 1:
        raise ValueError(f"position {position} out of range for order of length {k}")
    modes = list(a.order.modes)
    modes[position], modes[position + 1] = modes[position + 1], modes[position]
    target = ModeOrder(modes)
    plan = ReorderPlan(a.order, target, (position,))
    gather, sign = signed_permutation(plan)
    m = _apply_signed(a.matrix, gather, sign)
    m.flags.writeable = False
    return OrderedOperator(target, m, a.grading)


def reorder(a: OrderedOperator, target: ModeOrder, plan: ReorderPlan | None = None) -> OrderedOperator:
    """Re-express an operator in a permuted order via adjacent swaps."""
    if plan is None:
        plan = ReorderPlan.build(a.order, target)
    elif plan.source != a.order or plan.target != target:
        raise ValueError("plan endpoints do not match the requested reorder")
    if not plan.transpositions:
        return OrderedOperator(target, a.matrix, a.grading)
    gather, sign = signed_permutation(plan)
    m = _apply_signed(a.matrix, gather, sign)
    m.flags.writeable = False
    return OrderedOperator(target, m, a.grading)


def prepend_mode(a: OrderedOperator, new_mode: int) -> OrderedOperator:
    """Add a fresh mode at the front of the order.

    Even operators extend as ``1 x a``; odd ones pick up the string factor
    ``sigma^z x a``.
    """
    if new_mode in a.order:
        raise ValueError(f"mode {new_mode} already present in order {a.order.modes}")
    if a.grading is Grading.MIXED:
        raise ValueError("cannot prepend a mode to a mixed-grading operator")
    front = np.eye(2) if a.grading is Grading.EVEN else np.diag([1.0, -1.0])
    m = np.kron(front.astype(np.complex128), a.matrix)
    m.flags.writeable = False
    return OrderedOperator(ModeOrder((new_mode, *a.order.modes)), m, a.grading)


def append_modes(a: OrderedOperator, new_modes: tuple[int, ...]) -> OrderedOperator:
    """Add fresh modes after the existing order (no string factors arise)."""
    if not new_modes:
        return a
    for m in new_modes:
        if m in a.order:
            raise ValueError(f"mode {m} already present in order {a.order.modes}")
    mat = np.kron(a.matrix, np.eye(1 << len(new_modes), dtype=np.complex128))
    mat.flags.writeable = False
    return OrderedOperator(ModeOrder((*a.order.modes, *new_modes)), mat, a.grading)


def embed(a: OrderedOperator, target: ModeOrder) -> OrderedOperator:
    """Express an operator in an enclosing order (identity on new modes)."""
    missing = tuple(m for m in target.modes if m not in a.order)
    widened = append_modes(a, missing)
    return reorder(widened, target)


def align_supports(a: OrderedOperator, b: OrderedOperator) -> tuple[OrderedOperator, OrderedOperator]:
    """Bring two operators to the common order over the union of their modes.

    The union order lists ``a``'s modes first, then ``b``'s new modes in
    ``b``'s relative order.
    """
    for op in (a, b):
        if op.grading is Grading.MIXED:
            raise ValueError("align_supports requires even or odd grading")
    union = ModeOrder(a.order.modes + tuple(m for m in b.order.modes if m not in a.order))
    return embed(a, union), embed(b, union)


def conjugate(a: OrderedOperator, u: OrderedOperator, *, unitary_tol: float = 1e-10) -> OrderedOperator:
    """u a u^dag for an even unitary u sharing a's mode set."""
    if u.grading is not Grading.EVEN:
        raise ValueError(f"conjugation requires an even unitary, got {u.grading.value}")
    if set(u.order.modes) != set(a.order.modes):
        raise ValueError("operator and unitary must share the same mode set")
    if u.order != a.order:
        u = reorder(u, a.order)
    if not u.is_unitary(unitary_tol):
        raise ValueError(f"conjugation input is not unitary to {unitary_tol:g}")
    m = u.matrix @ a.matrix @ u.matrix.conj().T
    m.flags.writeable = False
    return OrderedOperator(a.order, m, a.grading)


def _to_front(a: OrderedOperator, mode: int) -> OrderedOperator:
    """Move one mode to the front, preserving the others' relative order."""
    if mode not in a.order:
        raise ValueError(f"mode {mode} not in order {a.order.modes}")
    rest = tuple(m for m in a.order.modes if m != mode)
    return reorder(a, ModeOrder((mode, *rest)))


def partial_trace(a: OrderedOperator, mode: int) -> OrderedOperator:
    """Fermion-consistent partial trace over one mode.

    The mode is first moved to the front (the swap signs arise there), then
    the two occupation blocks are summed.
    """
    if a.grading is Grading.MIXED:
        raise ValueError("partial_trace requires even or odd grading")
    fronted = _to_front(a, mode)
    k = len(a.order)
    half = 1 << (k - 1)
    t = fronted.matrix.reshape(2, half, 2, half)
    m = t[0, :, 0, :] + t[1, :, 1, :]
    m.flags.writeable = False
    return OrderedOperator(ModeOrder(fronted.order.modes[1:]), m, a.grading)


def partial_project(a: OrderedOperator, mode: int, occupation: int) -> OrderedOperator:
    """Project one mode onto a fixed occupation and drop it from the order."""
    if occupation not in (0, 1):
        raise ValueError("occupation must be 0 or 1")
    fronted = _to_front(a, mode)
    k = len(a.order)
    half = 1 << (k - 1)
    t = fronted.matrix.reshape(2, half, 2, half)
    m = t[occupation, :, occupation, :].copy()
    m.flags.writeable = False
    grading = a.grading if a.grading is not Grading.MIXED else classify_grading(m)
    return OrderedOperator(ModeOrder(fronted.order.modes[1:]), m, grading)
