"""Root systems of the simple Lie algebras, built exactly.

Roots are realized in a Euclidean ambient space with Fraction coordinates and a
rational overall metric scale, normalized so that long roots have squared
length 2.  The float view projects everything onto an orthonormal basis of the
root span (the "e-basis" the dynamics modules work in); the exact view is what
the structure-constant machinery consumes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

Vec = tuple[Fraction, ...]

FAMILIES = ("A", "B", "C", "D", "E", "F", "G")

_RANK_RANGE = {
    "A": (1, None),
    "B": (2, None),
    "C": (2, None),
    "D": (3, None),
    "E": (6, 8),
    "F": (4, 4),
    "G": (2, 2),
}


class RootSystemError(ValueError):
    pass


def _frac_vec(entries: Sequence) -> Vec:
    return tuple(Fraction(x) for x in entries)


def _dot(a: Vec, b: Vec) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _ambient_roots(family: str, rank: int) -> tuple[list[Vec], Fraction]:
    """Return (roots in ambient coordinates, metric scale).

    The inner product is (a, b) = scale * sum_i a_i b_i, arranged so the long
    roots come out with (alpha, alpha) = 2.
    """
    l = rank
    roots: list[Vec] = []
    if family == "A":
        dim = l + 1
        for i in range(dim):
            for j in range(dim):
                if i != j:
                    v = [0] * dim
                    v[i], v[j] = 1, -1
                    roots.append(_frac_vec(v))
        return roots, Fraction(1)
    if family in ("B", "C", "D"):
        for i in range(l):
            for j in range(i + 1, l):
                for si, sj in itertools.product((1, -1), repeat=2):
                    v = [0] * l
                    v[i], v[j] = si, sj
                    roots.append(_frac_vec(v))
        if family == "B":
            for i in range(l):
                for s in (1, -1):
                    v = [0] * l
                    v[i] = s
                    roots.append(_frac_vec(v))
            return roots, Fraction(1)
        if family == "C":
            for i in range(l):
                for s in (2, -2):
                    v = [0] * l
                    v[i] = s
                    roots.append(_frac_vec(v))
            # (±e_i±e_j) -> length^2 1 (short), (±2e_i) -> length^2 2 (long)
            return roots, Fraction(1, 2)
        return roots, Fraction(1)
    if family == "G":
        # Sum-zero realization in R^3, scaled so the long roots have length^2 2.
        for i, j in itertools.permutations(range(3), 2):
            v = [0] * 3
            v[i], v[j] = 1, -1
            roots.append(_frac_vec(v))
        for i in range(3):
            j, k = [x for x in range(3) if x != i]
            for s in (1, -1):
                v = [0] * 3
                v[i], v[j], v[k] = 2 * s, -s, -s
                roots.append(_frac_vec(v))
        return roots, Fraction(1, 3)
    if family == "F":
        for i in range(4):
            for j in range(i + 1, 4):
                for si, sj in itertools.product((1, -1), repeat=2):
                    v = [0] * 4
                    v[i], v[j] = si, sj
                    roots.append(_frac_vec(v))
        for i in range(4):
            for s in (1, -1):
                v = [0] * 4
                v[i] = s
                roots.append(_frac_vec(v))
        half = Fraction(1, 2)
        for signs in itertools.product((half, -half), repeat=4):
            roots.append(tuple(signs))
        return roots, Fraction(1)
    if family == "E":
        e8: list[Vec] = []
        for i in range(8):
            for j in range(i + 1, 8):
                for si, sj in itertools.product((1, -1), repeat=2):
                    v = [0] * 8
                    v[i], v[j] = si, sj
                    e8.append(_frac_vec(v))
        half = Fraction(1, 2)
        for signs in itertools.product((half, -half), repeat=8):
            if sum(1 for s in signs if s < 0) % 2 == 0:
                e8.append(tuple(signs))
        if rank == 8:
            return e8, Fraction(1)
        def orth(v: Vec, w: Vec) -> bool:
            return _dot(v, w) == 0
        e7_axis = _frac_vec([0, 0, 0, 0, 0, 0, 1, 1])
        e7 = [r for r in e8 if orth(r, e7_axis)]
        if rank == 7:
            return e7, Fraction(1)
        e6_axis = _frac_vec([0, 0, 0, 0, 0, 1, 0, 1])
        return [r for r in e7 if orth(r, e6_axis)], Fraction(1)
    raise RootSystemError(f"unknown family {family!r}")


_DEGREES = {
    "A": lambda l: tuple(range(2, l + 2)),
    "B": lambda l: tuple(range(2, 2 * l + 1, 2)),
    "C": lambda l: tuple(range(2, 2 * l + 1, 2)),
    "D": lambda l: tuple(sorted(tuple(range(2, 2 * l - 1, 2)) + (l,))),
    "G": lambda l: (2, 6),
    "F": lambda l: (2, 6, 8, 12),
    "E": lambda l: {6: (2, 5, 6, 8, 9, 12),
                    7: (2, 6, 8, 10, 12, 14, 18),
                    8: (2, 8, 12, 14, 18, 20, 24, 30)}[l],
}

# Rank of the maximal compact subgroup U of the normal real form.
_RANK_U = {
    "A": lambda l: (l + 1) // 2,
    "B": lambda l: l,
    "C": lambda l: l,
    "D": lambda l: 2 * (l // 2),
    "G": lambda l: 2,
    "F": lambda l: 4,
    "E": lambda l: {6: 4, 7: 7, 8: 8}[l],
}


@dataclass(frozen=True)
class RootSystem:
    """A realized root system with both exact and float views.

    Roots are stored positives-first, ordered by height and then
    lexicographically by simple-root coefficients; root number i + n_pos is
    the negative of root i.
    """

    family: str
    rank: int
    gram: Fraction
    ambient: tuple[Vec, ...]            # all roots, canonical order
    coeffs: tuple[tuple[int, ...], ...]  # simple-root coefficients per root
    simple: tuple[int, ...]              # indices of the simple roots
    degrees: tuple[int, ...]
    rank_u: int
    roots: np.ndarray = field(repr=False)       # (n, rank) float, e-basis coords
    cartan_embed: np.ndarray = field(repr=False)  # (rank, dim_ambient) float
    _index: dict[tuple[int, ...], int] = field(repr=False)

    @property
    def n_roots(self) -> int:
        return len(self.ambient)

    @property
    def n_pos(self) -> int:
        return len(self.ambient) // 2

    def pair(self, i: int, j: int) -> Fraction:
        """Exact inner product of roots i and j."""
        return self.gram * _dot(self.ambient[i], self.ambient[j])

    def sq(self, i: int) -> Fraction:
        return self.pair(i, i)

    def neg(self, i: int) -> int:
        n = self.n_pos
        return i + n if i < n else i - n

    def find(self, coeff: Sequence[int]) -> int | None:
        """Index of the root with the given simple-root coefficients, if any."""
        return self._index.get(tuple(coeff))

    def sum_index(self, i: int, j: int) -> int | None:
        """Index of root_i + root_j if that is a root, else None."""
        c = tuple(a + b for a, b in zip(self.coeffs[i], self.coeffs[j]))
        return self._index.get(c)

    def height(self, i: int) -> int:
        return sum(self.coeffs[i])

    def label(self, i: int) -> str:
        """Column label for root i, from its simple-root coefficients."""
        return "a" + "_".join(str(c) for c in self.coeffs[i])

    @property
    def cartan_matrix(self) -> np.ndarray:
        a = np.zeros((self.rank, self.rank), dtype=int)
        for k, ik in enumerate(self.simple):
            for j, ij in enumerate(self.simple):
                val = 2 * self.pair(ik, ij) / self.sq(ij)
                assert val.denominator == 1
                a[k, j] = int(val)
        return a

    @property
    def sq_float(self) -> np.ndarray:
        return np.array([float(self.sq(i)) for i in range(self.n_roots)])


def _solve_fractions(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Solve a small exact linear system by Gaussian elimination."""
    n = len(rhs)
    a = [row[:] + [rhs[k]] for k, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def build_root_system(family: str, rank: int) -> RootSystem:
    """Construct the root system of the given simple type.

    Raises RootSystemError for families/ranks outside the classification.
    """
    family = family.upper()
    if family not in _RANK_RANGE:
        raise RootSystemError(f"unknown family {family!r}")
    lo, hi = _RANK_RANGE[family]
    if rank < lo or (hi is not None and rank > hi):
        raise RootSystemError(f"{family}{rank} is not a simple type")

    ambient, gram = _ambient_roots(family, rank)
    dim = len(ambient[0])

    # Positivity via a generic functional with strictly dominating powers.
    w = _frac_vec([3 ** (dim - 1 - k) for k in range(dim)])
    pos = [r for r in ambient if _dot(r, w) > 0]
    if 2 * len(pos) != len(ambient):
        raise RootSystemError("positivity functional is not generic")

    pos_set = set(pos)
    simple_vecs = [
        r for r in pos
        if not any((tuple(a - b for a, b in zip(r, s)) in pos_set) and s != r
                   for s in pos)
    ]
    simple_vecs.sort(reverse=True)
    if len(simple_vecs) != rank:
        raise RootSystemError(
            f"found {len(simple_vecs)} simple roots for {family}{rank}")

    # Exact expansion of every positive root over the simple roots.
    gmat = [[_dot(a, b) for b in simple_vecs] for a in simple_vecs]
    coeff_of: dict[Vec, tuple[int, ...]] = {}
    for r in pos:
        rhs = [_dot(r, s) for s in simple_vecs]
        m = _solve_fractions([row[:] for row in gmat], rhs)
        assert all(x.denominator == 1 for x in m), "non-integral root coefficient"
        coeff_of[r] = tuple(int(x) for x in m)

    pos.sort(key=lambda r: (sum(coeff_of[r]), coeff_of[r]))
    ordered = pos + [tuple(-x for x in r) for r in pos]
    coeffs = tuple(
        coeff_of[r] if k < len(pos) else tuple(-c for c in coeff_of[ordered[k - len(pos)]])
        for k, r in enumerate(ordered)
    )
    index = {c: k for k, c in enumerate(coeffs)}
    simple_idx = tuple(index[tuple(int(i == k) for i in range(rank))]
                       for k in range(rank))

    # Float view: orthonormal basis of the root span.
    scale = float(gram) ** 0.5
    amb = np.array([[float(x) for x in r] for r in ordered]) * scale
    if dim == rank:
        basis = np.eye(rank)
    else:
        span = amb[[index[coeff_of[s]] for s in simple_vecs]]
        # Gram-Schmidt; the simple roots are a basis of the span.
        basis = np.zeros((rank, dim))
        for k, v in enumerate(span):
            u = v - basis[:k].T @ (basis[:k] @ v)
            basis[k] = u / np.linalg.norm(u)
    roots = amb @ basis.T

    degrees = _DEGREES[family](rank)
    n_pos = len(pos)
    if sum(d - 1 for d in degrees) != n_pos:
        raise RootSystemError("degree table inconsistent with root count")

    return RootSystem(
        family=family,
        rank=rank,
        gram=gram,
        ambient=tuple(ordered),
        coeffs=coeffs,
        simple=simple_idx,
        degrees=degrees,
        rank_u=_RANK_U[family](rank),
        roots=roots,
        cartan_embed=basis / scale,
        _index=index,
    )
