"""Periodic cubic lattice geometry with the l-infinity torus metric."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator

Site = tuple[int, ...]


@dataclass(frozen=True, order=True)
class QubitIndex:
    """One qubit: a lattice site plus the sub-qubit slot at that site."""

    site: Site
    sub: int = 0

    def __str__(self) -> str:
        return " ".join(str(c) for c in self.site) + f" {self.sub}"


@dataclass(frozen=True)
class LatticeGeometry:
    """D-dimensional torus ``Z_L^D`` carrying ``q`` qubits per site."""

    D: int
    L: int
    q: int

    def __post_init__(self):
        if self.L < 2:
            raise ValueError("lattice size L must be at least 2")
        if self.D < 1 or self.q < 1:
            raise ValueError("need D >= 1 and q >= 1")

    @property
    def n_sites(self) -> int:
        return self.L**self.D

    @property
    def n_qubits(self) -> int:
        return self.q * self.n_sites

    # -- coordinates ---------------------------------------------------

    def wrap(self, site: Iterable[int]) -> Site:
        return tuple(c % self.L for c in site)

    def shift(self, site: Iterable[int], delta: Iterable[int]) -> Site:
        return tuple((c + d) % self.L for c, d in zip(site, delta))

    def site_index(self, site: Iterable[int]) -> int:
        idx = 0
        for c in site:
            idx = idx * self.L + (c % self.L)
        return idx

    def site_at(self, index: int) -> Site:
        coords = []
        for _ in range(self.D):
            coords.append(index % self.L)
            index //= self.L
        return tuple(reversed(coords))

    def qubit_index(self, qubit: QubitIndex) -> int:
        return self.site_index(qubit.site) * self.q + qubit.sub

    def qubit_at(self, index: int) -> QubitIndex:
        return QubitIndex(self.site_at(index // self.q), index % self.q)

    def all_sites(self) -> Iterator[Site]:
        return product(range(self.L), repeat=self.D)

    # -- metric ----------------------------------------------------------

    def axis_dist(self, a: int, b: int) -> int:
        d = abs(a - b) % self.L
        return min(d, self.L - d)

    def dist(self, a: Iterable[int], b: Iterable[int]) -> int:
        """Torus l-infinity distance between two sites."""
        return max(self.axis_dist(x, y) for x, y in zip(a, b))

    def set_dist(self, A: Iterable[Site], B: Iterable[Site]) -> int:
        """Minimum distance between two nonempty coordinate sets."""
        A, B = list(A), list(B)
        return min(self.dist(a, b) for a in A for b in B)

    def spread(self, sites: Iterable[Site]) -> int:
        """Maximum pairwise distance within a coordinate set (0 for a point)."""
        pts = list(sites)
        best = 0
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                d = self.dist(pts[i], pts[j])
                if d > best:
                    best = d
        return best

    # -- regions -----------------------------------------------------------

    def box_sites(self, corner: Iterable[int], size) -> list[Site]:
        """Sites of an axis-aligned box; ``size`` is an int or per-axis tuple."""
        corner = tuple(corner)
        if isinstance(size, int):
            size = (size,) * self.D
        ranges = [range(c, c + s) for c, s in zip(corner, size)]
        return [self.wrap(s) for s in product(*ranges)]

    def neighborhood(self, sites: Iterable[Site], r: int) -> set[Site]:
        """All sites within torus distance ``r`` of the given set."""
        out: set[Site] = set()
        width = min(2 * r + 1, self.L)
        for s in sites:
            out.update(self.box_sites(tuple(c - r for c in s), width))
        return out

    def min_cover_interval(self, coords: Iterable[int]) -> tuple[int, int]:
        """Shortest circular interval ``[start, start+length)`` covering coords.

        Ties broken by smallest start, so the result is deterministic.
        """
        vals = sorted({c % self.L for c in coords})
        if not vals:
            raise ValueError("empty coordinate set")
        if len(vals) == 1:
            return vals[0], 1
        best_gap, best_i = -1, 0
        for i, v in enumerate(vals):
            nxt = vals[(i + 1) % len(vals)]
            gap = (nxt - v) % self.L
            if gap > best_gap:
                best_gap, best_i = gap, i
        start = vals[(best_i + 1) % len(vals)]
        return start, self.L - best_gap + 1

    def bounding_box(self, sites: Iterable[Site]) -> tuple[Site, tuple[int, ...]]:
        """Minimal covering box of a site set: (corner, per-axis extents)."""
        pts = list(sites)
        if not pts:
            raise ValueError("empty site set")
        corner, extents = [], []
        for axis in range(self.D):
            start, length = self.min_cover_interval(p[axis] for p in pts)
            corner.append(start)
            extents.append(length)
        return tuple(corner), tuple(extents)

    def cube_corner_sites(self, cube: Site) -> list[Site]:
        """The 2^D corner sites of the elementary cube named by its min corner."""
        return [self.shift(cube, delta) for delta in product((0, 1), repeat=self.D)]
