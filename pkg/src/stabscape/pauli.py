"""Phase-free multi-qubit Pauli operators in symplectic (X|Z) bit form.

Operators live in the Pauli group modulo overall phases: an operator is a
pair of packed bit-vectors over the qubit set, qubit ``j`` carrying X iff
``xbits[j]``, Z iff ``zbits[j]``, Y iff both.  Products are bitwise XOR, so
every operator is its own inverse and the group is elementary abelian here.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from . import gf2
from .lattice import LatticeGeometry, QubitIndex

PAULI_CHARS = "IXYZ"

_X_PART = {"I": 0, "X": 1, "Y": 1, "Z": 0}
_Z_PART = {"I": 0, "X": 0, "Y": 1, "Z": 1}


def pauli_char(xbit: int, zbit: int) -> str:
    return "IXZY"[xbit + 2 * zbit] if not (xbit and zbit) else "Y"


def single_paulis_anticommute(a: str, b: str) -> bool:
    """Whether two single-qubit Paulis anticommute (I commutes with all)."""
    return a != "I" and b != "I" and a != b


class PauliOperator:
    """Immutable phase-free Pauli over one lattice's qubit set."""

    __slots__ = ("geometry", "xwords", "zwords")

    def __init__(self, geometry: LatticeGeometry, xwords: np.ndarray, zwords: np.ndarray):
        self.geometry = geometry
        xwords = np.ascontiguousarray(xwords, dtype=np.uint64)
        zwords = np.ascontiguousarray(zwords, dtype=np.uint64)
        xwords.flags.writeable = False
        zwords.flags.writeable = False
        self.xwords = xwords
        self.zwords = zwords

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, geometry: LatticeGeometry) -> "PauliOperator":
        nb = geometry.n_qubits
        return cls(geometry, gf2.zeros(nb), gf2.zeros(nb))

    @classmethod
    def from_terms(
        cls, geometry: LatticeGeometry, terms: Iterable[tuple[QubitIndex, str]]
    ) -> "PauliOperator":
        """Product of single-qubit factors; repeated factors cancel in pairs."""
        x = gf2.zeros(geometry.n_qubits)
        z = gf2.zeros(geometry.n_qubits)
        for qubit, p in terms:
            if p not in "IXYZ":
                raise ValueError(f"bad Pauli label {p!r}")
            j = geometry.qubit_index(qubit)
            if _X_PART[p]:
                gf2.set_bit(x, j, gf2.get_bit(x, j) ^ 1)
            if _Z_PART[p]:
                gf2.set_bit(z, j, gf2.get_bit(z, j) ^ 1)
        return cls(geometry, x, z)

    @classmethod
    def single(cls, geometry: LatticeGeometry, qubit: QubitIndex, p: str) -> "PauliOperator":
        return cls.from_terms(geometry, [(qubit, p)])

    @classmethod
    def from_symplectic(cls, geometry: LatticeGeometry, vec: np.ndarray) -> "PauliOperator":
        n = geometry.n_qubits
        bits = gf2.to_bool(vec, 2 * n)
        return cls(geometry, gf2.from_bool(bits[:n]), gf2.from_bool(bits[n:]))

    # -- group structure ---------------------------------------------------

    def _check_same(self, other: "PauliOperator") -> None:
        if self.geometry != other.geometry:
            raise ValueError("operators live on different qubit sets")

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        self._check_same(other)
        return PauliOperator(self.geometry, self.xwords ^ other.xwords, self.zwords ^ other.zwords)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliOperator)
            and self.geometry == other.geometry
            and bool(np.array_equal(self.xwords, other.xwords))
            and bool(np.array_equal(self.zwords, other.zwords))
        )

    def __hash__(self) -> int:
        return hash((self.geometry, self.xwords.tobytes(), self.zwords.tobytes()))

    def commutes_with(self, other: "PauliOperator") -> bool:
        """Symplectic form: parity of X/Z overlaps between the two operators."""
        self._check_same(other)
        parity = (gf2.popcount(self.xwords & other.zwords) + gf2.popcount(self.zwords & other.xwords)) & 1
        return parity == 0

    def is_identity(self) -> bool:
        return gf2.is_zero(self.xwords) and gf2.is_zero(self.zwords)

    # -- support ----------------------------------------------------------

    @property
    def weight(self) -> int:
        return gf2.popcount(self.xwords | self.zwords)

    def support_indices(self) -> np.ndarray:
        return gf2.nonzero_indices(self.xwords | self.zwords, self.geometry.n_qubits)

    def support(self) -> tuple[QubitIndex, ...]:
        g = self.geometry
        return tuple(g.qubit_at(int(i)) for i in self.support_indices())

    def support_sites(self) -> set[tuple[int, ...]]:
        g = self.geometry
        return {g.site_at(int(i) // g.q) for i in self.support_indices()}

    def pauli_at(self, qubit: QubitIndex) -> str:
        j = self.geometry.qubit_index(qubit)
        return pauli_char(gf2.get_bit(self.xwords, j), gf2.get_bit(self.zwords, j))

    def terms(self) -> list[tuple[QubitIndex, str]]:
        out = []
        for i in self.support_indices():
            q = self.geometry.qubit_at(int(i))
            out.append((q, pauli_char(gf2.get_bit(self.xwords, int(i)), gf2.get_bit(self.zwords, int(i)))))
        return out

    # -- conversions --------------------------------------------------------

    def symplectic(self) -> np.ndarray:
        """Packed (X-part || Z-part) vector over ``2n`` bits."""
        n = self.geometry.n_qubits
        bits = np.concatenate([gf2.to_bool(self.xwords, n), gf2.to_bool(self.zwords, n)])
        return gf2.from_bool(bits)

    def translate(self, delta: Iterable[int]) -> "PauliOperator":
        """Shift the support by ``delta`` (mod L on every axis)."""
        g = self.geometry
        delta = tuple(delta)
        shape = (g.L,) * g.D + (g.q,)
        xb = gf2.to_bool(self.xwords, g.n_qubits).reshape(shape)
        zb = gf2.to_bool(self.zwords, g.n_qubits).reshape(shape)
        for axis, d in enumerate(delta):
            if d % g.L:
                xb = np.roll(xb, d % g.L, axis=axis)
                zb = np.roll(zb, d % g.L, axis=axis)
        return PauliOperator(g, gf2.from_bool(xb.reshape(-1)), gf2.from_bool(zb.reshape(-1)))

    def restricted_to(self, qubit_indices: Iterable[int]) -> "PauliOperator":
        """The factor of this operator supported on the given qubits."""
        g = self.geometry
        mask = gf2.from_indices(list(qubit_indices), g.n_qubits)
        return PauliOperator(g, self.xwords & mask, self.zwords & mask)

    def __repr__(self) -> str:
        w = self.weight
        if w == 0:
            return "PauliOperator(I)"
        terms = self.terms()
        shown = " ".join(f"{p}@{q.site}:{q.sub}" for q, p in terms[:4])
        more = "" if w <= 4 else f" ...({w} qubits)"
        return f"PauliOperator({shown}{more})"


# Spec-level operation aliases -------------------------------------------------


def pauli_mul(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    return a * b


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    return a.commutes_with(b)


def weight_and_support(a: PauliOperator) -> tuple[int, tuple[QubitIndex, ...]]:
    return a.weight, a.support()
