"""Code specifications, lattice instantiation, and the linear syndrome map.

A code is defined by per-species generator templates acting on the corners of
one elementary cube; a :class:`CodeInstance` carries every translate on a
given torus.  Generators and packed matrices are materialized lazily so that
large lattices (where only template-local syndrome updates are needed) stay
cheap, while desk-scale instances expose dense GF(2) views for solving.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import product
from typing import Iterable

import numpy as np

from . import gf2
from .gf2 import BitMatrix
from .lattice import LatticeGeometry, QubitIndex, Site
from .pauli import PauliOperator, single_paulis_anticommute

# Dense matrices are only built for instances up to this many qubits; larger
# lattices must go through the template-local paths.
MAX_DENSE_QUBITS = 4096

Defect = tuple[Site, int]  # (cube coordinate, species index)
Syndrome = frozenset[Defect]


class CodeConstructionError(Exception):
    """Raised when a code spec fails validation at build time."""


@dataclass(frozen=True)
class SpeciesTemplate:
    """One generator species: non-identity labels on cube-corner offsets."""

    name: str
    entries: tuple[tuple[Site, str], ...]

    def offsets(self) -> tuple[Site, ...]:
        return tuple(o for o, _ in self.entries)


@dataclass(frozen=True)
class CodeSpec:
    """Data-driven code family: templates instantiate on any torus size."""

    name: str
    D: int
    q: int
    species: tuple[SpeciesTemplate, ...]

    def __post_init__(self):
        for sp in self.species:
            for offset, label in sp.entries:
                if len(offset) != self.D:
                    raise CodeConstructionError(f"{self.name}/{sp.name}: offset {offset} has wrong dimension")
                if any(c not in (0, 1) for c in offset):
                    raise CodeConstructionError(f"{self.name}/{sp.name}: offset {offset} leaves the elementary cube")
                if len(label) != self.q or any(c not in "IXYZ" for c in label):
                    raise CodeConstructionError(f"{self.name}/{sp.name}: bad label {label!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "CodeSpec":
        species = []
        for i, sp in enumerate(data["species"]):
            entries = tuple(
                (tuple(off), lab)
                for off, lab in zip(sp["offsets"], sp["labels"])
                if set(lab) != {"I"}
            )
            species.append(SpeciesTemplate(sp.get("name", f"s{i}"), entries))
        return cls(data["name"], int(data["D"]), int(data["q"]), tuple(species))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "D": self.D,
            "q": self.q,
            "species": [
                {"name": sp.name, "offsets": [list(o) for o in sp.offsets()], "labels": [l for _, l in sp.entries]}
                for sp in self.species
            ],
        }

    @classmethod
    def from_json(cls, text: str) -> "CodeSpec":
        return cls.from_dict(json.loads(text))


@lru_cache(maxsize=None)
def registered_spec(name: str) -> CodeSpec:
    """Load one of the shipped code specs by name."""
    try:
        text = resources.files("stabscape.specs").joinpath(f"{name}.json").read_text()
    except FileNotFoundError:
        raise KeyError(f"unknown code {name!r}; shipped codes: {', '.join(registry_names())}") from None
    return CodeSpec.from_json(text)


def registry_names() -> list[str]:
    files = resources.files("stabscape.specs")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


class CodeInstance:
    """A code spec instantiated on ``Z_L^D``: generators plus syndrome map.

    Generator indexing is cube-major, species-minor: generator ``(c, s)`` has
    flat index ``site_index(c) * n_species + s``.  Every elementary cube is
    named by its minimal corner, so cubes and sites share coordinates.
    """

    def __init__(self, spec: CodeSpec, L: int):
        self.spec = spec
        self.geometry = LatticeGeometry(spec.D, L, spec.q)
        self.n_species = len(spec.species)
        self.n_generators = self.n_species * self.geometry.n_sites
        self._flip_table = self._build_flip_table()
        self._stabilizer_matrix: BitMatrix | None = None
        self._syndrome_matrix: BitMatrix | None = None
        self._stab_rref: tuple[BitMatrix, list[int]] | None = None

    # -- indexing -----------------------------------------------------------

    @property
    def n_qubits(self) -> int:
        return self.geometry.n_qubits

    def species_index(self, name: str) -> int:
        for i, sp in enumerate(self.spec.species):
            if sp.name == name:
                return i
        raise KeyError(f"no species {name!r} in code {self.spec.name}")

    def species_name(self, index: int) -> str:
        return self.spec.species[index].name

    def generator_index(self, cube: Site, species: int) -> int:
        return self.geometry.site_index(cube) * self.n_species + species

    def generator_at(self, index: int) -> Defect:
        return self.geometry.site_at(index // self.n_species), index % self.n_species

    def generator(self, cube: Site, species: int) -> PauliOperator:
        g = self.geometry
        cube = g.wrap(cube)
        terms = []
        for offset, label in self.spec.species[species].entries:
            site = g.shift(cube, offset)
            for sub, p in enumerate(label):
                if p != "I":
                    terms.append((QubitIndex(site, sub), p))
        return PauliOperator.from_terms(g, terms)

    def generators(self) -> Iterable[tuple[Defect, PauliOperator]]:
        for idx in range(self.n_generators):
            cube, s = self.generator_at(idx)
            yield (cube, s), self.generator(cube, s)

    # -- syndromes ------------------------------------------------------------

    def _build_flip_table(self) -> dict[tuple[int, str], tuple[tuple[int, Site], ...]]:
        table: dict[tuple[int, str], tuple[tuple[int, Site], ...]] = {}
        for sub in range(self.spec.q):
            for p in "XYZ":
                flips = []
                for s, sp in enumerate(self.spec.species):
                    for offset, label in sp.entries:
                        if single_paulis_anticommute(p, label[sub]):
                            flips.append((s, offset))
                table[(sub, p)] = tuple(flips)
        return table

    def flips(self, qubit: QubitIndex, p: str) -> list[Defect]:
        """Generators anticommuting with the single-qubit Pauli ``p`` at ``qubit``."""
        g = self.geometry
        site = qubit.site
        return [
            (tuple((c - o) % g.L for c, o in zip(site, offset)), s)
            for s, offset in self._flip_table[(qubit.sub, p)]
        ]

    def syndrome_of(self, op: PauliOperator) -> Syndrome:
        """Defects of an operator: template-local, works at any lattice size."""
        out: set[Defect] = set()
        for qubit, p in op.terms():
            for d in self.flips(qubit, p):
                out.symmetric_difference_update({d})
        return frozenset(out)

    def syndrome_to_words(self, syndrome: Iterable[Defect]) -> np.ndarray:
        return gf2.from_indices([self.generator_index(c, s) for c, s in syndrome], self.n_generators)

    def words_to_syndrome(self, words: np.ndarray) -> Syndrome:
        return frozenset(self.generator_at(int(i)) for i in gf2.nonzero_indices(words, self.n_generators))

    def defect_cubes(self, syndrome: Iterable[Defect]) -> frozenset[Site]:
        return frozenset(cube for cube, _ in syndrome)

    def touching_generators(self, sites: Iterable[Site]) -> list[int]:
        """Generators whose support meets the given sites (the only ones an
        operator on those sites can flip)."""
        g = self.geometry
        cubes: set[Site] = set()
        for site in sites:
            for delta in product((0, -1), repeat=g.D):
                cubes.add(g.shift(site, delta))
        return sorted(
            self.generator_index(c, s) for c in cubes for s in range(self.n_species)
        )

    def restricted_syndrome_matrix(
        self, sites: Iterable[Site]
    ) -> tuple[BitMatrix, list[int], list[int]]:
        """Syndrome map restricted to a support region, built template-locally.

        Returns (matrix, qubit columns, generator rows).  Column layout is all
        X-parts of the region's qubits followed by all Z-parts; rows cover
        exactly the generators touching the region, so the construction never
        materializes the dense map and works at any lattice size.
        """
        g = self.geometry
        site_list = sorted(set(sites))
        qubits = sorted(g.site_index(s) * g.q + sub for s in site_list for sub in range(g.q))
        col_of = {q: i for i, q in enumerate(qubits)}
        nq = len(qubits)
        site_set = set(site_list)
        gen_rows = self.touching_generators(site_list)
        dense = np.zeros((len(gen_rows), 2 * nq), dtype=np.uint8)
        for r, gi in enumerate(gen_rows):
            cube, s = self.generator_at(gi)
            for offset, label in self.spec.species[s].entries:
                site = g.shift(cube, offset)
                if site not in site_set:
                    continue
                base = g.site_index(site) * g.q
                for sub, p in enumerate(label):
                    if p == "I":
                        continue
                    j = col_of[base + sub]
                    # syndrome bit = gen.x . err.z + gen.z . err.x
                    if p in "ZY":
                        dense[r, j] ^= 1
                    if p in "XY":
                        dense[r, j + nq] ^= 1
        return BitMatrix.from_bool_array(dense), qubits, gen_rows

    # -- dense views ---------------------------------------------------------

    def _require_dense(self) -> None:
        if self.n_qubits > MAX_DENSE_QUBITS:
            raise ValueError(
                f"{self.spec.name} L={self.geometry.L} has {self.n_qubits} qubits; "
                f"dense GF(2) views are limited to {MAX_DENSE_QUBITS}"
            )

    def stabilizer_matrix(self) -> BitMatrix:
        """Generators as packed (X-part || Z-part) rows."""
        if self._stabilizer_matrix is None:
            self._require_dense()
            mat = BitMatrix.zeros(self.n_generators, 2 * self.n_qubits)
            for idx in range(self.n_generators):
                cube, s = self.generator_at(idx)
                mat.words[idx] = self.generator(cube, s).symplectic()
            self._stabilizer_matrix = mat
        return self._stabilizer_matrix

    def syndrome_matrix(self) -> BitMatrix:
        """Linear syndrome map: row ``a`` dotted with an (X||Z) error vector
        gives the flip indicator of generator ``a`` (symplectic pairing)."""
        if self._syndrome_matrix is None:
            stab = self.stabilizer_matrix()
            n = self.n_qubits
            mat = BitMatrix.zeros(self.n_generators, 2 * n)
            for idx in range(self.n_generators):
                bits = gf2.to_bool(stab.words[idx], 2 * n)
                mat.words[idx] = gf2.from_bool(np.concatenate([bits[n:], bits[:n]]))
            self._syndrome_matrix = mat
        return self._syndrome_matrix

    def stabilizer_rref(self) -> tuple[BitMatrix, list[int]]:
        if self._stab_rref is None:
            self._stab_rref = self.stabilizer_matrix().rref()
        return self._stab_rref

    def stabilizer_rank(self) -> int:
        return len(self.stabilizer_rref()[1])

    @property
    def k(self) -> int:
        """Number of encoded qubits, measured as n minus the stabilizer rank."""
        return self.n_qubits - self.stabilizer_rank()

    def in_stabilizer_group(self, op: PauliOperator) -> bool:
        rref, pivots = self.stabilizer_rref()
        return gf2.in_rowspan(rref, pivots, op.symplectic())

    def is_classical_z(self) -> bool:
        """True when every generator is diagonal (pure Z labels)."""
        return all(set(lab) <= {"I", "Z"} for sp in self.spec.species for _, lab in sp.entries)

    def is_classical_x(self) -> bool:
        return all(set(lab) <= {"I", "X"} for sp in self.spec.species for _, lab in sp.entries)


@dataclass
class FrustrationReport:
    """Outcome of the pairwise-commutation and rank audit."""

    commuting: bool
    witness: tuple[Defect, Defect] | None
    n_qubits: int
    n_generators: int
    rank: int | None
    k: int | None
    mode: str  # "exhaustive" or "template"

    def __bool__(self) -> bool:
        return self.commuting


def _template_commutation_witness(code: CodeInstance) -> tuple[Defect, Defect] | None:
    """Check all overlapping generator pairs via template translates.

    For translation-invariant templates every generator pair is a translate of
    (species s at the origin cube, species t at a cube within the +-1 box), and
    pairs further apart have disjoint supports, so this check is exact.
    """
    g = code.geometry
    origin = (0,) * g.D
    near_cubes = {g.wrap(v) for v in product((-1, 0, 1), repeat=g.D)}
    for s in range(code.n_species):
        gen_s = code.generator(origin, s)
        for t in range(code.n_species):
            for cube in sorted(near_cubes):
                if not gen_s.commutes_with(code.generator(cube, t)):
                    return (origin, s), (cube, t)
    return None


def build_code(spec: CodeSpec, L: int) -> CodeInstance:
    """Instantiate all translated generators on ``Z_L^D`` and validate them.

    Construction aborts if any pair of translates fails to commute, which
    catches template mistranscriptions immediately.
    """
    if L < 2:
        raise CodeConstructionError("L must be at least 2")
    code = CodeInstance(spec, L)
    witness = _template_commutation_witness(code)
    if witness is not None:
        (c1, s1), (c2, s2) = witness
        raise CodeConstructionError(
            f"{spec.name} L={L}: generators {spec.species[s1].name}@{c1} and "
            f"{spec.species[s2].name}@{c2} anticommute"
        )
    return code


def get_code(name: str, L: int) -> CodeInstance:
    return build_code(registered_spec(name), L)


def check_frustration_free(code: CodeInstance, exhaustive: bool | None = None) -> FrustrationReport:
    """Confirm pairwise commutation and report the measured stabilizer rank.

    Exhaustive mode checks every generator pair directly; otherwise only the
    template-overlap classes are checked (exact for the shipped
    translation-invariant codes, and feasible at any lattice size).
    """
    if exhaustive is None:
        exhaustive = code.n_qubits <= MAX_DENSE_QUBITS
    witness = None
    if exhaustive:
        stab = code.stabilizer_matrix()
        n = code.n_qubits
        bits = stab.to_bool_array()
        gx = bits[:, :n].astype(np.float32)
        gz = bits[:, n:].astype(np.float32)
        overlap = (gx @ gz.T + gz @ gx.T) % 2
        bad = np.argwhere(overlap != 0)
        if bad.size:
            i, j = int(bad[0][0]), int(bad[0][1])
            witness = (code.generator_at(i), code.generator_at(j))
        mode = "exhaustive"
    else:
        witness = _template_commutation_witness(code)
        mode = "template"
    rank = k = None
    if code.n_qubits <= MAX_DENSE_QUBITS:
        rank = code.stabilizer_rank()
        k = code.n_qubits - rank
    return FrustrationReport(witness is None, witness, code.n_qubits, code.n_generators, rank, k, mode)


def translate_operator(code: CodeInstance, op: PauliOperator, delta: Iterable[int]) -> PauliOperator:
    """Shift an operator's support by ``delta`` (periodic)."""
    return op.translate(delta)
