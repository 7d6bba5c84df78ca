"""Chevalley bases and integer structure constants.

The signs of the constants C_{alpha,beta} are fixed by Carter's extraspecial
pair algorithm: order the positive roots by height then lexicographically,
give every extraspecial pair the positive sign +(p+1), and propagate to all
other pairs through the exact Jacobi relations.  Everything on this layer is
rational (mostly integer); floats only appear in the views consumed by the
dynamics code.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .roots import RootSystem, RootSystemError, build_root_system


def _chain_p(rs: RootSystem, i: int, j: int) -> int:
    """Largest p with root_j - p*root_i still a root."""
    p = 0
    cj, ci = rs.coeffs[j], rs.coeffs[i]
    while True:
        cand = tuple(a - (p + 1) * b for a, b in zip(cj, ci))
        if rs.find(cand) is None:
            return p
        p += 1


class _CarterTable:
    """Structure constants for positive special pairs, built by induction."""

    def __init__(self, rs: RootSystem):
        self.rs = rs
        self.table: dict[tuple[int, int], int] = {}
        self._build()

    def _build(self) -> None:
        rs = self.rs
        n_pos = rs.n_pos
        # Extraspecial pair of each composite positive root: the decomposition
        # with the smallest first member in the master (height-lex) order.
        extraspecial: dict[int, tuple[int, int]] = {}
        for g in range(n_pos):
            if g in rs.simple:
                continue
            for a in range(n_pos):
                b = rs.find(tuple(x - y for x, y in zip(rs.coeffs[g], rs.coeffs[a])))
                if b is not None and b < n_pos:
                    extraspecial[g] = (a, b)
                    break
        # Process targets in master order (non-decreasing height).
        for g in range(n_pos):
            if g in rs.simple:
                continue
            a, b = extraspecial[g]
            self.table[(a, b)] = _chain_p(rs, a, b) + 1
            for xi in range(a + 1, n_pos):
                eta = rs.find(tuple(x - y for x, y in zip(rs.coeffs[g], rs.coeffs[xi])))
                if eta is None or eta >= n_pos or eta <= xi:
                    continue
                self.table[(xi, eta)] = self._special(a, b, xi, eta, g)

    def _special(self, a: int, b: int, xi: int, eta: int, g: int) -> int:
        """Carter's four-root relation, solved for N(xi, eta)."""
        rs = self.rs
        neg = rs.neg
        total = Fraction(0)
        d1 = rs.sum_index(b, neg(xi))
        if d1 is not None:
            total += Fraction(self.n(b, neg(xi)) * self.n(a, neg(eta)), 1) / rs.sq(d1)
        d2 = rs.sum_index(a, neg(xi))
        if d2 is not None:
            total += Fraction(self.n(neg(xi), a) * self.n(b, neg(eta)), 1) / rs.sq(d2)
        val = rs.sq(g) * total / self.n(a, b)
        assert val.denominator == 1, "non-integral structure constant"
        return int(val)

    def n(self, i: int, j: int):
        """N(root_i, root_j) for an arbitrary pair whose sum is a root."""
        rs = self.rs
        n_pos = rs.n_pos
        if rs.sum_index(i, j) is None:
            return 0
        ip, jp = i < n_pos, j < n_pos
        if ip and jp:
            return self.table[(i, j)] if i < j else -self.table[(j, i)]
        if not ip and not jp:
            return -self.n(rs.neg(i), rs.neg(j))
        if not ip:  # normalize to (positive, negative)
            return -self.n(j, i)
        z = rs.neg(rs.sum_index(i, j))
        if z < n_pos:
            return Fraction(rs.sq(z), rs.sq(j)) * self.n(z, i)
        return -Fraction(rs.sq(z), rs.sq(i)) * self.n(rs.neg(j), rs.neg(z))


@dataclass
class ChevalleyAlgebra:
    """A simple Lie algebra in a Chevalley basis {H_k} u {E_alpha}.

    Exact integer data lives in the coroot basis; the float views (structure
    constants, coroot vectors in the orthonormal Cartan basis) are what the
    phase-space and Lax machinery consume.
    """

    rs: RootSystem
    C: np.ndarray            # (n, n) int, [E_i, E_j] = C[i,j] E_{i+j}
    sumidx: np.ndarray       # (n, n) int, index of root_i + root_j, -1 if none
    coroot: np.ndarray       # (n, l) int, H_{beta_i} over the simple H_k
    cartan_action: np.ndarray  # (l, n) int, beta_i(H_k)

    @property
    def dim(self) -> int:
        return self.rs.rank + self.rs.n_roots

    @cached_property
    def n_matrix(self) -> np.ndarray:
        """Constants of the compact-basis brackets: N = -C (a^2 b^2) / (4 g^2)."""
        rs = self.rs
        n = rs.n_roots
        out = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                g = self.sumidx[i, j]
                if g >= 0 and self.C[i, j]:
                    out[i, j] = float(
                        -Fraction(int(self.C[i, j]))
                        * rs.sq(i) * rs.sq(j) / (4 * rs.sq(g)))
        return out

    def n_exact(self, i: int, j: int) -> Fraction:
        g = self.sumidx[i, j]
        if g < 0:
            return Fraction(0)
        return -Fraction(int(self.C[i, j])) * self.rs.sq(i) * self.rs.sq(j) \
            / (4 * self.rs.sq(g))

    @cached_property
    def halpha(self) -> np.ndarray:
        """(n, l) float: e-basis coordinates of H_{beta_i} = 2 beta_i/(beta_i,beta_i)."""
        rs = self.rs
        return 2.0 * rs.roots / rs.sq_float[:, None]

    @cached_property
    def ad(self) -> np.ndarray:
        """Integer adjoint matrices, stacked (dim, dim, dim), coroot basis first."""
        rs = self.rs
        l, n = rs.rank, rs.n_roots
        dim = l + n
        out = np.zeros((dim, dim, dim), dtype=np.int64)
        for k in range(l):
            for i in range(n):
                out[k, l + i, l + i] = self.cartan_action[k, i]
        for i in range(n):
            m = out[l + i]
            for k in range(l):  # [E_i, H_k] = -beta_i(H_k) E_i
                m[l + i, k] = -self.cartan_action[k, i]
            for j in range(n):
                if j == rs.neg(i):
                    m[:l, l + j] = self.coroot[i]
                else:
                    g = self.sumidx[i, j]
                    if g >= 0:
                        m[l + g, l + j] = self.C[i, j]
        return out

    def killing_coroot(self) -> list[list[Fraction]]:
        """Exact invariant form on the coroot-basis Cartan: (H_k, H_m)."""
        rs = self.rs
        out = []
        for k in rs.simple:
            row = []
            for m in rs.simple:
                row.append(4 * rs.pair(k, m) / (rs.sq(k) * rs.sq(m)))
            out.append(row)
        return out


def build_chevalley(system: RootSystem | None = None, *,
                    family: str | None = None, rank: int | None = None
                    ) -> ChevalleyAlgebra:
    """Build the Chevalley algebra for a root system (or family/rank pair)."""
    if system is None:
        if family is None or rank is None:
            raise RootSystemError("need a root system or family and rank")
        system = build_root_system(family, rank)
    rs = system
    n = rs.n_roots
    carter = _CarterTable(rs)

    C = np.zeros((n, n), dtype=np.int64)
    sumidx = np.full((n, n), -1, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            s = rs.sum_index(i, j)
            if s is not None:
                sumidx[i, j] = s
                C[i, j] = int(carter.n(i, j))

    # H_beta over the simple coroots: rescale the root-lattice coefficients.
    l = rs.rank
    coroot = np.zeros((n, l), dtype=np.int64)
    for i in range(n):
        for k in range(l):
            c = rs.coeffs[i][k]
            if c:
                val = c * rs.sq(rs.simple[k]) / rs.sq(i)
                assert val.denominator == 1, "coroot not integral"
                coroot[i, k] = int(val)

    cartan_action = np.zeros((l, n), dtype=np.int64)
    for k in range(l):
        for i in range(n):
            val = 2 * rs.pair(i, rs.simple[k]) / rs.sq(rs.simple[k])
            assert val.denominator == 1
            cartan_action[k, i] = int(val)

    return ChevalleyAlgebra(rs=rs, C=C, sumidx=sumidx, coroot=coroot,
                            cartan_action=cartan_action)


def algebra_json(alg: ChevalleyAlgebra) -> dict:
    """Root data and structure constants as a plain JSON-ready dict.

    Layout: {family, rank, roots:[[..]], positive:[idx], C:[[i, j, value]],
    degrees:[..]}.  Root vectors are the working-basis coordinates (floats);
    C lists every ordered pair (i, j) with root i + root j again a root.
    """
    rs = alg.rs
    ii, jj = np.nonzero(alg.C)
    triples = sorted(
        [int(i), int(j), int(alg.C[i, j])] for i, j in zip(ii, jj)
    )
    return {
        "family": rs.family,
        "rank": rs.rank,
        "roots": [[float(x) for x in row] for row in rs.roots],
        "positive": list(range(rs.n_pos)),
        "C": triples,
        "degrees": list(rs.degrees),
    }
