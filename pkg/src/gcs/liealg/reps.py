"""Matrix representations: defining (classical families) and adjoint.

The defining representations are assembled from hand-written matrices for the
simple-root generators, auto-scaled so that [X_a, Y_a] reproduces the coroot
exactly, then extended to all roots by bracketing with simple generators and
dividing by the known structure constants.  This keeps the matrices in the
same Chevalley gauge as the abstract algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .element import LieFrame
from .roots import RootSystemError


class UnsupportedRepresentationError(RootSystemError):
    """Raised when the requested representation does not exist for the type."""


@dataclass
class Representation:
    """Matrices for every working-basis element of the algebra."""

    kind: str
    rank: int
    size: int
    cartan: np.ndarray    # (l, m, m)
    rootvec: np.ndarray   # (n, m, m)
    c_rho: float          # tr(rho(e_i) rho(e_j)) = c_rho delta_ij

    def matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix of a working-basis element vector."""
        return (np.tensordot(x[:self.rank], self.cartan, axes=1)
                + np.tensordot(x[self.rank:], self.rootvec, axes=1))


def _weight_rows(family: str, l: int) -> np.ndarray:
    if family == "A":
        return np.eye(l + 1)
    if family in ("C", "D"):
        return np.vstack([np.eye(l), -np.eye(l)])
    if family == "B":
        return np.vstack([np.eye(l), -np.eye(l), np.zeros((1, l))])
    raise UnsupportedRepresentationError(
        f"no defining representation for family {family}")


def _simple_pattern(family: str, amb: tuple, l: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Unscaled raising/lowering matrices for one simple root."""
    support = [(k, x) for k, x in enumerate(amb) if x != 0]
    X = np.zeros((m, m))
    Y = np.zeros((m, m))
    if family == "A":
        (i, _), (j, _) = support  # e_i - e_j with i < j
        X[i, j] = 1.0
        Y[j, i] = 1.0
        return X, Y
    if len(support) == 1:
        (i, _), = support
        if family == "B":  # short root e_i
            X[i, 2 * l] = 1.0
            X[2 * l, l + i] = -1.0
            Y[2 * l, i] = 1.0
            Y[l + i, 2 * l] = -1.0
        else:  # family C, long root 2 e_i
            X[i, l + i] = 1.0
            Y[l + i, i] = 1.0
        return X, Y
    (i, vi), (j, vj) = support
    if vj < 0:  # e_i - e_j
        X[i, j] = 1.0
        X[l + j, l + i] = -1.0
        Y[j, i] = 1.0
        Y[l + i, l + j] = -1.0
    else:  # e_i + e_j (family D fork end)
        X[i, l + j] = 1.0
        X[j, l + i] = -1.0
        Y[l + j, i] = 1.0
        Y[l + i, j] = -1.0
    return X, Y


def defining_rep(frame: LieFrame) -> Representation:
    """Defining representation for the classical families A, B, C, D."""
    alg = frame.alg
    rs = alg.rs
    family, l = rs.family, rs.rank
    if family not in ("A", "B", "C", "D"):
        raise UnsupportedRepresentationError(
            f"no defining representation for family {family}")
    W = _weight_rows(family, l)
    m = W.shape[0]
    gram = float(rs.gram)

    def cartan_realize(ambient_vec: np.ndarray) -> np.ndarray:
        return np.diag(gram * (W @ ambient_vec))

    n = rs.n_roots
    rho = [None] * n

    for s in rs.simple:
        amb = rs.ambient[s]
        X, Y = _simple_pattern(family, amb, l, m)
        coroot_amb = np.array([2 * float(x) / float(rs.sq(s)) for x in amb])
        target = cartan_realize(coroot_amb)
        got = X @ Y - Y @ X
        mask = np.abs(got) > 1e-12
        ratios = target[mask] / got[mask]
        ratio = ratios[0]
        assert np.allclose(ratios, ratio) and ratio > 0, "generator scale mismatch"
        s_scale = np.sqrt(ratio)
        rho[s] = s_scale * X
        rho[rs.neg(s)] = s_scale * Y

    # Extend to composite roots in height order; positives pull negatives along.
    for g in range(rs.n_pos):
        if rho[g] is not None:
            continue
        for s in rs.simple:
            b = rs.find(tuple(x - y for x, y in zip(rs.coeffs[g], rs.coeffs[s])))
            if b is not None and b < rs.n_pos:
                rho[g] = (rho[s] @ rho[b] - rho[b] @ rho[s]) / alg.C[s, b]
                sn, bn, gn = rs.neg(s), rs.neg(b), rs.neg(g)
                rho[gn] = (rho[sn] @ rho[bn] - rho[bn] @ rho[sn]) / alg.C[sn, bn]
                break
        else:
            raise RootSystemError("positive root with no simple decomposition")

    embed = rs.cartan_embed  # (l, dim_ambient)
    cartan = np.stack([cartan_realize(embed[k]) for k in range(l)])
    rootvec = np.stack(rho)
    c_rho = float(np.trace(cartan[0] @ cartan[0]))
    return Representation(kind="defining", rank=l, size=m,
                          cartan=cartan, rootvec=rootvec, c_rho=c_rho)


def adjoint_rep(frame: LieFrame) -> Representation:
    """Adjoint representation, available for every family."""
    basis = np.eye(frame.dim)
    mats = np.stack([frame.ad(basis[k]) for k in range(frame.dim)])
    cartan = mats[:frame.rank]
    rootvec = mats[frame.rank:]
    c_rho = float(np.trace(cartan[0] @ cartan[0]))
    return Representation(kind="adjoint", rank=frame.rank, size=frame.dim,
                          cartan=cartan, rootvec=rootvec, c_rho=c_rho)


def build_rep(frame: LieFrame, kind: str = "auto") -> Representation:
    """Pick a representation: defining when the family has one, else adjoint."""
    if kind == "auto":
        kind = "defining" if frame.alg.rs.family in "ABCD" else "adjoint"
    if kind == "defining":
        return defining_rep(frame)
    if kind == "adjoint":
        return adjoint_rep(frame)
    raise UnsupportedRepresentationError(f"unknown representation kind {kind!r}")


def representation(alg, name: str = "auto") -> Representation:
    """Build a named representation of an algebra.

    Accepts a ChevalleyAlgebra (or a prebuilt LieFrame) and a name in
    {"adjoint", "defining", "auto"}.
    """
    frame = alg if isinstance(alg, LieFrame) else LieFrame(alg)
    return build_rep(frame, name)
