"""Classical r-matrix structure of the spectral Lax family.

The linear bracket relation

    {L_1(x), L_2(y)} = [L_1(x), r_12(x,y)] - [L_2(y), r_21(y,x)]

is certified by assembling the left side entrywise from the fundamental
Poisson brackets and the analytic partials of L, and the right side from
the explicit r-matrix.  Everything is done in a fixed representation;
tensor factors use the standard Kronecker layout, so L_1 = kron(L, I) and
L_2 = kron(I, L).

The r-matrix sum ranges over the whole root system.  Restricting it to
positive roots, which is how the defining expression is printed, breaks
both the bracket relation and the M-operator trace formula by O(1); the
`positive_only` flag keeps that variant available so the verification
suite can report the discrepancy instead of papering over it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .liealg import ChevalleyAlgebra, Representation
from .phase import GcsState, SingularConfigurationError, poisson_structure
from .lax import POLE_FLOOR, coth, spectral_lax_intro, m_operator


@dataclass
class RMatrix:
    rep: Representation
    value: np.ndarray   # n^2 x n^2
    x: float
    y: float


def _coth_guarded(z: float) -> float:
    if abs(np.sinh(z)) < POLE_FLOOR:
        raise SingularConfigurationError(f"coth pole at {z}")
    return coth(z)


def swap_operator(n: int) -> np.ndarray:
    """Permutation matrix exchanging the two tensor factors."""
    P = np.zeros((n * n, n * n))
    for a in range(n):
        for c in range(n):
            P[a * n + c, c * n + a] = 1.0
    return P


def build_r(state: GcsState, alg: ChevalleyAlgebra, rep: Representation,
            x: float, y: float, positive_only: bool = False) -> RMatrix:
    """Assemble r_12(x,y) at the given state (it depends on u only).

    Three blocks: Cartan x Cartan with coefficient
    (coth(x-y)+coth(x+y))/2, and for each root a, (a,a)/4 times
    E_a (x) E_{-a} (coth(x-y)+coth u_a) plus E_a (x) E_a
    (coth(x+y)+coth u_a).
    """
    ps = poisson_structure(alg)
    rs = alg.rs
    n = rep.size
    cm = _coth_guarded(x - y)
    cp = _coth_guarded(x + y)

    u_all = rs.roots @ state.u
    m = rs.n_pos
    if np.min(np.abs(np.sinh(u_all[:m]))) < POLE_FLOOR:
        raise SingularConfigurationError("coth pole at a root value of u")

    val = np.zeros((n * n, n * n))
    half = 0.5 * (cm + cp)
    for j in range(rs.rank):
        val += half * np.kron(rep.cartan[j], rep.cartan[j])

    count = m if positive_only else 2 * m
    for i in range(count):
        sq = float(rs.sq_float[i])
        cu = np.cosh(u_all[i]) / np.sinh(u_all[i])
        Ei = rep.rootvec[i]
        Eneg = rep.rootvec[rs.neg(i)]
        val += 0.5 * (sq / 2.0) * (cm + cu) * np.kron(Ei, Eneg)
        val += 0.5 * (sq / 2.0) * (cp + cu) * np.kron(Ei, Ei)
    return RMatrix(rep, val, x, y)


def bracket_tensor(state: GcsState, alg: ChevalleyAlgebra, rep: Representation,
                   x: float, y: float) -> np.ndarray:
    """Entrywise Poisson brackets {L(x)_ab, L(y)_cd} as an n^2 x n^2 matrix.

    Row index a*n+c, column b*n+d, matching the Kronecker layout of the
    commutator side.  Built from the canonical pair brackets {v_j,u_k} =
    delta_jk and the two independent spin brackets (opposite signs).
    """
    ps = poisson_structure(alg)
    rs = alg.rs
    l, m, n = rs.rank, rs.n_pos, rep.size
    Lx = spectral_lax_intro(state, alg, rep, x)
    Ly = spectral_lax_intro(state, alg, rep, y)

    def stack(L, kind, count):
        return np.array([L.partials[(kind, i)] for i in range(count)])

    Pu_x, Pv_x = stack(Lx, "u", l), stack(Lx, "v", l)
    Pu_y, Pv_y = stack(Ly, "u", l), stack(Ly, "v", l)
    PT_x, PS_x = stack(Lx, "T", m), stack(Lx, "S", m)
    PT_y, PS_y = stack(Ly, "T", m), stack(Ly, "S", m)

    # {v_j, u_j} = +1: dF/dv dG/du - dF/du dG/dv
    out = np.einsum("jab,jcd->acbd", Pv_x, Pu_y)
    out -= np.einsum("jab,jcd->acbd", Pu_x, Pv_y)

    # spin sectors: {T_i, T_j} = sum_k B[i,j,k] T_k, {S_i,S_j} = -..., {T,S} = 0
    WT = np.einsum("ijk,k->ij", ps.spin_tensor, state.T)
    WS = -np.einsum("ijk,k->ij", ps.spin_tensor, state.S)
    out += np.einsum("ij,iab,jcd->acbd", WT, PT_x, PT_y)
    out += np.einsum("ij,iab,jcd->acbd", WS, PS_x, PS_y)
    return out.reshape(n * n, n * n)


def verify_rmatrix_identity(state: GcsState, alg: ChevalleyAlgebra,
                            rep: Representation, x: float, y: float,
                            positive_only: bool = False) -> float:
    """Normalized residual of the linear r-matrix bracket relation."""
    n = rep.size
    I = np.eye(n)
    B = bracket_tensor(state, alg, rep, x, y)
    L1 = np.kron(spectral_lax_intro(state, alg, rep, x).value, I)
    L2 = np.kron(I, spectral_lax_intro(state, alg, rep, y).value)
    r12 = build_r(state, alg, rep, x, y, positive_only=positive_only).value
    P = swap_operator(n)
    r21 = P @ build_r(state, alg, rep, y, x, positive_only=positive_only).value @ P
    rhs = (L1 @ r12 - r12 @ L1) - (L2 @ r21 - r21 @ L2)
    return float(np.linalg.norm(B - rhs) / max(1.0, np.linalg.norm(B)))


def partial_trace_second(K: np.ndarray, n: int) -> np.ndarray:
    """tr_2 of an n^2 x n^2 operator: out_ab = sum_c K[a n + c, b n + c]."""
    return np.einsum("acbc->ab", K.reshape(n, n, n, n))


def verify_m_trace(state: GcsState, alg: ChevalleyAlgebra, rep: Representation,
                   x: float, y: float, positive_only: bool = False) -> float:
    """Residual of the M-operator trace formula.

    tr_2(r_12(x,y) L_2(y))/c_rho should equal
    (coth(x-y)+coth(x+y))/2 * L(x) - M.  The c_rho division removes the
    trace-form normalization of the representation.
    """
    n = rep.size
    I = np.eye(n)
    r12 = build_r(state, alg, rep, x, y, positive_only=positive_only).value
    L2 = np.kron(I, spectral_lax_intro(state, alg, rep, y).value)
    lhs = partial_trace_second(r12 @ L2, n) / rep.c_rho
    cxy = 0.5 * (_coth_guarded(x - y) + _coth_guarded(x + y))
    rhs = cxy * spectral_lax_intro(state, alg, rep, x).value \
        - m_operator(state, alg, rep).value
    return float(np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(rhs)))
