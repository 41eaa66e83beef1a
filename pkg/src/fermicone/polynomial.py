"""Polynomials in fermionic creation/annihilation operators.

A polynomial is stored as a mapping from canonical monomials to complex
coefficients.  A monomial is a product of factors ``(mode, dagger)`` applied
left to right; the canonical form puts creation operators first, modes
ascending within each group, with all anticommutation signs folded into the
coefficients during normalization.  This makes the representation unique, so
two polynomials are equal as operators iff their term maps are equal.
"""

from __future__ import annotations

from collections.abc import Iterable

Factor = tuple[int, bool]  # (mode label, True = creation)
Monomial = tuple[Factor, ...]


def _sort_key(factor: Factor) -> tuple[int, int]:
    mode, dagger = factor
    return (0 if dagger else 1, mode)


def _normal_order(coeff: complex, factors: list[Factor], out: dict[Monomial, complex]) -> None:
    """Rewrite coeff * factors into canonical terms, accumulating into out."""
    stack: list[tuple[complex, list[Factor]]] = [(coeff, factors)]
    while stack:
        c, fs = stack.pop()
        pos = -1
        for i in range(len(fs) - 1):
            if fs[i] == fs[i + 1]:
                pos = -2  # repeated operator: term vanishes
                break
            if _sort_key(fs[i]) > _sort_key(fs[i + 1]):
                pos = i
                break
        if pos == -2:
            continue
        if pos == -1:
            mono = tuple(fs)
            out[mono] = out.get(mono, 0.0) + c
            continue
        a, b = fs[pos], fs[pos + 1]
        swapped = fs[:pos] + [b, a] + fs[pos + 2 :]
        if a[0] == b[0]:
            # f_m f_m^dag = 1 - f_m^dag f_m
            stack.append((c, fs[:pos] + fs[pos + 2 :]))
            stack.append((-c, swapped))
        else:
            stack.append((-c, swapped))


class FermionPolynomial:
    """Immutable normal-ordered polynomial in fermionic mode operators."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[tuple[complex, Iterable[Factor]]] = ()):
        acc: dict[Monomial, complex] = {}
        for coeff, factors in terms:
            _normal_order(complex(coeff), [(int(m), bool(d)) for m, d in factors], acc)
        self._terms = {m: c for m, c in acc.items() if c != 0.0}

    @classmethod
    def _from_canonical(cls, terms: dict[Monomial, complex]) -> "FermionPolynomial":
        p = cls.__new__(cls)
        p._terms = {m: c for m, c in terms.items() if c != 0.0}
        return p

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "FermionPolynomial":
        return cls._from_canonical({})

    @classmethod
    def one(cls) -> "FermionPolynomial":
        return cls._from_canonical({(): 1.0})

    @classmethod
    def creation(cls, mode: int) -> "FermionPolynomial":
        return cls._from_canonical({((mode, True),): 1.0})

    @classmethod
    def annihilation(cls, mode: int) -> "FermionPolynomial":
        return cls._from_canonical({((mode, False),): 1.0})

    @classmethod
    def number(cls, mode: int) -> "FermionPolynomial":
        return cls._from_canonical({((mode, True), (mode, False)): 1.0})

    @classmethod
    def hopping(cls, j: int, k: int) -> "FermionPolynomial":
        """f_j^dag f_k + f_k^dag f_j."""
        return cls([(1.0, ((j, True), (k, False))), (1.0, ((k, True), (j, False)))])

    # -- views -------------------------------------------------------------

    @property
    def terms(self) -> tuple[tuple[complex, Monomial], ...]:
        return tuple((c, m) for m, c in sorted(self._terms.items()))

    @property
    def support(self) -> tuple[int, ...]:
        modes = {mode for mono in self._terms for mode, _ in mono}
        return tuple(sorted(modes))

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def degree_parity(self) -> str:
        """'even', 'odd', or 'mixed' by monomial degree; zero counts as even."""
        if not self._terms:
            return "even"
        parities = {len(m) % 2 for m in self._terms}
        if parities == {0}:
            return "even"
        if parities == {1}:
            return "odd"
        return "mixed"

    @property
    def is_even(self) -> bool:
        return self.degree_parity() == "even"

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.isclose(self.dagger(), tol)

    def isclose(self, other: "FermionPolynomial", tol: float = 1e-12) -> bool:
        monos = set(self._terms) | set(other._terms)
        return all(abs(self._terms.get(m, 0.0) - other._terms.get(m, 0.0)) <= tol for m in monos)

    # -- algebra -----------------------------------------------------------

    def dagger(self) -> "FermionPolynomial":
        acc: dict[Monomial, complex] = {}
        for mono, c in self._terms.items():
            flipped = [(mode, not dag) for mode, dag in reversed(mono)]
            _normal_order(c.conjugate(), flipped, acc)
        return FermionPolynomial._from_canonical(acc)

    def __add__(self, other: "FermionPolynomial") -> "FermionPolynomial":
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, 0.0) + c
        return FermionPolynomial._from_canonical(acc)

    def __sub__(self, other: "FermionPolynomial") -> "FermionPolynomial":
        return self + (-1.0) * other

    def __neg__(self) -> "FermionPolynomial":
        return (-1.0) * self

    def __rmul__(self, scalar: complex) -> "FermionPolynomial":
        s = complex(scalar)
        return FermionPolynomial._from_canonical({m: s * c for m, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, FermionPolynomial):
            acc: dict[Monomial, complex] = {}
            for m1, c1 in self._terms.items():
                for m2, c2 in other._terms.items():
                    _normal_order(c1 * c2, list(m1 + m2), acc)
            return FermionPolynomial._from_canonical(acc)
        return complex(other) * self

    def __eq__(self, other) -> bool:
        if not isinstance(other, FermionPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "FermionPolynomial(0)"
        bits = []
        for c, mono in self.terms:
            ops = " ".join(f"f{'+' if d else '-'}{m}" for m, d in mono) or "1"
            bits.append(f"({c:g})*{ops}")
        return "FermionPolynomial(" + " + ".join(bits) + ")"
