"""Lax operators, spectral invariants, and the maps between the models.

Everything here lives in a matrix representation.  The building block is
eta, the spectral-parameter-free operator

    eta = sum_j v_j e_j + sum_{a in R} X_a E_a,
    X_a = (T_a e^{-u_a} - S_a) / sinh(u_a),

with spins extended oddly to negative roots.  Useful facts baked into the
implementation: X_{-a} = X_a + 2 T_a, and dX_a/du_a = Y_a where Y_a is the
M-operator coefficient (S_a cosh u_a - T_a)/sinh^2 u_a, the same for both
root signs.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.linalg import expm

from .liealg import ChevalleyAlgebra, LieFrame, Representation
from .phase import (
    GcsState,
    Gradient,
    SingularConfigurationError,
    poisson_structure,
    spin_element,
)
from .dynamics import StateDerivative, eom_gcs

POLE_FLOOR = 1e-9


def coth(x: float) -> float:
    if abs(np.sinh(x)) < 1e-300:
        raise SingularConfigurationError("coth pole")
    return float(np.cosh(x) / np.sinh(x))


@dataclass
class LaxMatrix:
    """Representation image of a Lax operator, with analytic partials."""

    rep: Representation
    value: np.ndarray
    partials: dict | None = None
    x: float | None = None


@dataclass
class ModelIIIData:
    """Difference-coordinate side of the model isomorphism."""

    ut: np.ndarray   # (l,)
    vt: np.ndarray   # (l,)
    P: np.ndarray    # (n,) coefficients over all roots


@dataclass
class Model2Data:
    """Unreduced-side data: eta, the compact gauge generator, and u."""

    eta_vec: np.ndarray    # working-basis vector of eta
    zeta: np.ndarray       # working-basis compact generator of h = exp(zeta)
    u: np.ndarray          # (l,)


# ---------------------------------------------------------------------------
# Coefficient helpers


def _x_coeffs(ps, state: GcsState) -> np.ndarray:
    """X over all roots: positives first, then X_{-a} = X_a + 2 T_a."""
    ua = ps.require_regular(state.u)
    X_pos = (state.T * np.exp(-ua) - state.S) / np.sinh(ua)
    return np.concatenate([X_pos, X_pos + 2.0 * state.T])


def _y_coeffs(ps, state: GcsState) -> np.ndarray:
    """Y over positive roots."""
    ua = ps.require_regular(state.u)
    return (state.S * np.cosh(ua) - state.T) / np.sinh(ua) ** 2


def eta_vector(state: GcsState, alg: ChevalleyAlgebra) -> np.ndarray:
    """Working-basis vector of eta."""
    ps = poisson_structure(alg)
    return np.concatenate([state.v, _x_coeffs(ps, state)])


def ad_exp_u(vec: np.ndarray, u: np.ndarray, rs) -> np.ndarray:
    """Ad of the torus element exp(u): E_a picks up e^{u_a}, Cartan fixed."""
    out = vec.copy()
    out[rs.rank:] = out[rs.rank:] * np.exp(rs.roots @ u)
    return out


def ad_compact(vec: np.ndarray, zeta: np.ndarray, frame: LieFrame,
               inverse: bool = False) -> np.ndarray:
    """Ad_{exp(zeta)} acting on a working-basis vector, by exp(ad_zeta)."""
    A = frame.ad(-zeta if inverse else zeta)
    return expm(A) @ vec


def compact_part(vec: np.ndarray, rs) -> np.ndarray:
    """Project a working-basis vector onto span{E_a - E_{-a}}.

    The result is again a working-basis vector: Cartan part zeroed, root
    part replaced by its odd component under a -> -a.
    """
    l, m = rs.rank, rs.n_pos
    out = np.zeros_like(vec)
    pos = vec[l:l + m]
    neg_order = [rs.neg(i) - m for i in range(m)]
    neg = vec[l + m:][neg_order]
    odd = 0.5 * (pos - neg)
    out[l:l + m] = odd
    out[l + m:][neg_order] = -odd
    return out


def compact_coefficients(vec: np.ndarray, rs, tol: float = 1e-10) -> np.ndarray:
    """Spin coefficients c with vec = sum c_a (E_a - E_{-a}).

    Raises if vec is not actually compact to within tol.
    """
    proj = compact_part(vec, rs)
    if np.max(np.abs(vec - proj)) > tol * max(1.0, np.max(np.abs(vec))):
        raise ValueError("element is not in the compact subalgebra")
    return proj[rs.rank:rs.rank + rs.n_pos].copy()


# ---------------------------------------------------------------------------
# eta and M


def eta(state: GcsState, alg: ChevalleyAlgebra, rep: Representation) -> LaxMatrix:
    """The spectral-free Lax operator with analytic partial derivatives."""
    ps = poisson_structure(alg)
    rs = ps.rs
    m = rs.n_pos
    ua = ps.require_regular(state.u)
    sh = np.sinh(ua)
    X = _x_coeffs(ps, state)
    Y = _y_coeffs(ps, state)

    vec = np.concatenate([state.v, X])
    value = rep.matrix(vec)

    E_pos = rep.rootvec[:m]
    E_neg = rep.rootvec[m:]
    # negative-root block is ordered so that E_neg[i] represents -alpha_i
    neg_order = [rs.neg(i) - m for i in range(m)]
    E_negm = E_neg[neg_order]

    partials = {}
    for j in range(rs.rank):
        partials[("v", j)] = rep.cartan[j]
        # dX_{+-a}/du_j = a(j) Y_a for both signs
        coeff = ps.pos_roots[:, j] * Y
        partials[("u", j)] = np.tensordot(coeff, E_pos + E_negm, axes=1)
    em, ep = np.exp(-ua) / sh, np.exp(ua) / sh
    for i in range(m):
        partials[("T", i)] = em[i] * E_pos[i] + ep[i] * E_negm[i]
        partials[("S", i)] = -(E_pos[i] + E_negm[i]) / sh[i]
    return LaxMatrix(rep, value, partials)


def m_operator(state: GcsState, alg: ChevalleyAlgebra, rep: Representation) -> LaxMatrix:
    """M = sum_{a>0} Y_a (E_a - E_{-a})."""
    ps = poisson_structure(alg)
    Y = _y_coeffs(ps, state)
    return LaxMatrix(rep, rep.matrix(spin_element(ps.frame, Y)))


def eta_dot(state: GcsState, alg: ChevalleyAlgebra, rep: Representation,
            deriv: StateDerivative | None = None) -> np.ndarray:
    """d(eta)/dt assembled by the chain rule from the equations of motion."""
    d = deriv if deriv is not None else eom_gcs(state, alg)
    L = eta(state, alg, rep)
    out = np.zeros_like(L.value)
    for j in range(state.u.size):
        out += L.partials[("u", j)] * d.du[j]
        out += L.partials[("v", j)] * d.dv[j]
    for i in range(state.T.size):
        out += L.partials[("T", i)] * d.dT[i]
        out += L.partials[("S", i)] * d.dS[i]
    return out


def lax_residual(state: GcsState, alg: ChevalleyAlgebra, rep: Representation) -> float:
    """Normalized residual of d(eta)/dt = [eta, M]."""
    L = eta(state, alg, rep).value
    M = m_operator(state, alg, rep).value
    dL = eta_dot(state, alg, rep)
    R = dL - (L @ M - M @ L)
    return float(np.linalg.norm(R) / max(1.0, np.linalg.norm(L)))


def spin_residual(state: GcsState, alg: ChevalleyAlgebra, rep: Representation) -> float:
    """Normalized residual of d(T)/dt = [T, M] for the compact component."""
    ps = poisson_structure(alg)
    d = eom_gcs(state, alg)
    Tm = rep.matrix(spin_element(ps.frame, state.T))
    dTm = rep.matrix(spin_element(ps.frame, d.dT))
    M = m_operator(state, alg, rep).value
    R = dTm - (Tm @ M - M @ Tm)
    return float(np.linalg.norm(R) / max(1.0, np.linalg.norm(Tm)))


# ---------------------------------------------------------------------------
# Spectral-parameter families


def _check_away_from(x: float, poles: tuple, floor: float = POLE_FLOOR) -> None:
    for p in poles:
        if abs(x - p) < floor:
            raise SingularConfigurationError(f"spectral point {x} too close to pole {p}")


def spectral_lax_intro(state: GcsState, alg: ChevalleyAlgebra,
                       rep: Representation, x: float) -> LaxMatrix:
    """L(x) = eta + (1 + coth x) T, with analytic partials.

    The root-vector coefficient of E_a is X_a + (1 + coth x) T_a for roots
    of either sign (odd T).
    """
    if abs(np.sinh(x)) < POLE_FLOOR:
        raise SingularConfigurationError("sinh(x) = 0 spectral pole")
    ps = poisson_structure(alg)
    rs = ps.rs
    m = rs.n_pos
    c = 1.0 + coth(x)
    base = eta(state, alg, rep)
    Tm = rep.matrix(spin_element(ps.frame, state.T))
    partials = dict(base.partials)
    E_pos = rep.rootvec[:m]
    E_negm = rep.rootvec[m:][[rs.neg(i) - m for i in range(m)]]
    for i in range(m):
        partials[("T", i)] = base.partials[("T", i)] + c * (E_pos[i] - E_negm[i])
    return LaxMatrix(rep, base.value + c * Tm, partials, x=x)


def spectral_lax_model1(state: GcsState, alg: ChevalleyAlgebra,
                        rep: Representation, x1: float
                        ) -> tuple[LaxMatrix, LaxMatrix]:
    """The two reduced Lax operators at the same spectral value.

    L1(x) = T/x + (T + eta)/(1 - x)
    L2(x) = S/x + (S + Ad_{exp u} eta)/(1 - x)
    """
    _check_away_from(x1, (0.0, 1.0))
    ps = poisson_structure(alg)
    rs = ps.rs
    fr = ps.frame
    ev = eta_vector(state, alg)
    T = spin_element(fr, state.T)
    S = spin_element(fr, state.S)
    A = ad_exp_u(ev, state.u, rs)
    L1 = T / x1 + (T + ev) / (1.0 - x1)
    L2 = S / x1 + (S + A) / (1.0 - x1)
    return (LaxMatrix(rep, rep.matrix(L1), x=x1),
            LaxMatrix(rep, rep.matrix(L2), x=x1))


def spectral_lax_model2(data: Model2Data, alg: ChevalleyAlgebra,
                        rep: Representation, x: float) -> LaxMatrix:
    """Unreduced-side operator L(x) = eta/x - (eta - Ad_{h^{-1} exp u} eta)/(x-1)."""
    _check_away_from(x, (0.0, 1.0))
    ps = poisson_structure(alg)
    fr = ps.frame
    if np.max(np.abs(data.zeta - compact_part(data.zeta, ps.rs))) > 1e-12:
        raise ValueError("gauge generator must lie in the compact subalgebra")
    moved = ad_compact(ad_exp_u(data.eta_vec, data.u, ps.rs), data.zeta, fr,
                       inverse=True)
    vec = data.eta_vec / x - (data.eta_vec - moved) / (x - 1.0)
    return LaxMatrix(rep, rep.matrix(vec), x=x)


def model2_moment_residual(data: Model2Data, alg: ChevalleyAlgebra) -> float:
    """Compact part of (eta - Ad_{h^{-1} exp u} eta); zero on consistent data."""
    ps = poisson_structure(alg)
    moved = ad_compact(ad_exp_u(data.eta_vec, data.u, ps.rs), data.zeta,
                       ps.frame, inverse=True)
    diff = data.eta_vec - moved
    return float(np.max(np.abs(compact_part(diff, ps.rs))))


def make_model2_data(state_u: np.ndarray, v: np.ndarray, T: np.ndarray,
                     zeta_spins: np.ndarray, alg: ChevalleyAlgebra
                     ) -> tuple[Model2Data, GcsState]:
    """Build consistent unreduced data and its reduced two-spin state.

    The gauge h = exp(zeta) with zeta = sum zeta_a (E_a - E_{-a}) fixes the
    second spin set as S = Ad_h T, which keeps the compact moment of the
    pair (eta, h) at zero.
    """
    ps = poisson_structure(alg)
    fr = ps.frame
    zeta = spin_element(fr, zeta_spins)
    Tvec = spin_element(fr, T)
    Svec = ad_compact(Tvec, zeta, fr)
    S = compact_coefficients(Svec, ps.rs)
    state = GcsState(state_u.copy(), v.copy(), T.copy(), S)
    return Model2Data(eta_vector(state, alg), zeta, state_u.copy()), state


def model3_map(state: GcsState, alg: ChevalleyAlgebra) -> ModelIIIData:
    """Forward map to difference coordinates: P_a = (1 - e^{u_a}) X_a, all roots."""
    ps = poisson_structure(alg)
    rs = ps.rs
    u_all = rs.roots @ state.u
    den = 1.0 - np.exp(u_all)
    if np.min(np.abs(den)) < 1e-12:
        raise SingularConfigurationError("model map wall: 1 - e^{u_a} = 0")
    X = _x_coeffs(ps, state)
    return ModelIIIData(state.u.copy(), state.v.copy(), (den * X).copy())


def model3_inverse(data: ModelIIIData, alg: ChevalleyAlgebra) -> GcsState:
    """Recover (u, v, T, S) from (ut, vt, P): invert the 2x2 pair system.

    X_a = P_a/(1-e^{u_a}) per root; then T_a = (X_{-a} - X_a)/2 and
    S_a = T_a e^{-u_a} - X_a sinh(u_a).
    """
    ps = poisson_structure(alg)
    rs = ps.rs
    m = rs.n_pos
    u_all = rs.roots @ data.ut
    den = 1.0 - np.exp(u_all)
    if np.min(np.abs(den)) < 1e-12:
        raise SingularConfigurationError("model map wall: 1 - e^{u_a} = 0")
    X = data.P / den
    X_pos = X[:m]
    X_neg = X[m:][[rs.neg(i) - m for i in range(m)]]
    T = 0.5 * (X_neg - X_pos)
    ua = u_all[:m]
    S = T * np.exp(-ua) - X_pos * np.sinh(ua)
    return GcsState(data.ut.copy(), data.vt.copy(), T, S)


def sigma_vector(data: ModelIIIData, alg: ChevalleyAlgebra) -> np.ndarray:
    """Difference-side residue: vt + sum_a P_a/(1 - e^{u_a}) E_a."""
    ps = poisson_structure(alg)
    rs = ps.rs
    u_all = rs.roots @ data.ut
    den = 1.0 - np.exp(u_all)
    if np.min(np.abs(den)) < 1e-12:
        raise SingularConfigurationError("model map wall: 1 - e^{u_a} = 0")
    return np.concatenate([data.vt, data.P / den])


def spectral_lax_model3(data: ModelIIIData, alg: ChevalleyAlgebra,
                        rep: Representation, x: float) -> LaxMatrix:
    """Difference-side operator L(x) = sigma/x - P/(x - 1)."""
    _check_away_from(x, (0.0, 1.0))
    sig = sigma_vector(data, alg)
    fr = poisson_structure(alg).frame
    P_vec = np.concatenate([np.zeros(fr.rank), data.P])
    vec = sig / x - P_vec / (x - 1.0)
    return LaxMatrix(rep, rep.matrix(vec), x=x)


def spectral_lax_cs(u: np.ndarray, v: np.ndarray, Scs, alg: ChevalleyAlgebra,
                    rep: Representation, z: float) -> LaxMatrix:
    """One-spin operator L(z) = eta_cs/z - Scs/(z - 1)."""
    from .phase import eta_cs as _eta_cs

    _check_away_from(z, (0.0, 1.0))
    e = _eta_cs(u, v, Scs)
    svec = np.concatenate([np.zeros(len(u)), Scs.root_coeffs])
    vec = e.vec / z - svec / (z - 1.0)
    return LaxMatrix(rep, rep.matrix(vec), x=z)


# ---------------------------------------------------------------------------
# Involution and gauge maps


def upsilon(state: GcsState) -> GcsState:
    """The involution (u, v, T, S) -> (-u, -v, -S, -T)."""
    return GcsState(-state.u, -state.v, -state.S.copy(), -state.T.copy())


def gauge_transform(state: GcsState, signs: np.ndarray, alg: ChevalleyAlgebra) -> GcsState:
    """Act by a sign character of the root lattice on both spin sets.

    signs gives one value in {+1, -1} per simple root; a root with
    coefficients c picks up prod signs_i^{c_i}.
    """
    rs = alg.rs
    eps = np.array([np.prod(signs.astype(float) ** np.array(c))
                    for c in rs.coeffs[:rs.n_pos]])
    return GcsState(state.u.copy(), state.v.copy(), eps * state.T, eps * state.S)


# ---------------------------------------------------------------------------
# Integral hierarchy


def _polarized_coeffs(A: np.ndarray, B: np.ndarray, d: int) -> np.ndarray:
    """Coefficients c_k of s^{d-k} t^k in tr((sA + tB)^d).

    The trace is homogeneous of degree d in (s, t), so sampling along t=1
    at d+1 Chebyshev nodes and solving the Vandermonde system is exact up
    to conditioning.
    """
    nodes = np.cos(np.pi * (np.arange(d + 1) + 0.5) / (d + 1)) * 2.0
    vals = np.empty(d + 1)
    for i, s in enumerate(nodes):
        vals[i] = np.trace(np.linalg.matrix_power(s * A + B, d)).real
    # tr = sum_k c_k s^{d-k}; columns ordered highest power first
    V = np.vander(nodes, d + 1, increasing=False)
    return np.linalg.solve(V, vals)


def integrals(state: GcsState, alg: ChevalleyAlgebra, rep: Representation
              ) -> dict[tuple[int, int], float]:
    """The table I_{jk} = (T^{d_j-k} eta^k), k = 0..d_j, per invariant degree.

    Values are symmetrized trace monomials extracted from the binomial
    expansion of tr rho(sT + t eta)^{d_j}; the k-th coefficient carries
    binom(d_j, k) copies of the monomial.
    """
    ps = poisson_structure(alg)
    Tm = rep.matrix(spin_element(ps.frame, state.T))
    Em = rep.matrix(eta_vector(state, alg))
    out: dict[tuple[int, int], float] = {}
    for j, d in enumerate(alg.rs.degrees, start=1):
        coeffs = _polarized_coeffs(Tm, Em, d)
        for k in range(d + 1):
            out[(j, k)] = float(coeffs[k] / comb(d, k))
    return out


def integral_counts(alg: ChevalleyAlgebra) -> dict[str, int]:
    """Counting data of the hierarchy.

    n_total = sum of invariant degrees (independent non-Casimir integrals);
    deficiency_complex = n_total - 2l (excess over half the complex reduced
    dimension); deficiency_real = -rank U (the real form lacks exactly the
    even-degree Casimirs).
    """
    rs = alg.rs
    total = sum(rs.degrees)
    return {
        "N_G": total,
        "deficiency_complex": total - 2 * rs.rank,
        "deficiency_real": -rs.rank_u,
    }


def trace_invariants(L: np.ndarray, degrees) -> list[float]:
    """tr(L^k) for k in degrees."""
    return [float(np.trace(np.linalg.matrix_power(L, int(k))).real) for k in degrees]


def trace_gradient(L: LaxMatrix, power: int, rank: int, n_spin: int) -> Gradient:
    """Analytic phase-space gradient of tr(L^power) from stored partials.

    d tr(L^p)/dc = p tr(L^{p-1} dL/dc).
    """
    if L.partials is None:
        raise ValueError("LaxMatrix carries no partials")
    Lp = np.linalg.matrix_power(L.value, power - 1)
    g = Gradient(np.zeros(rank), np.zeros(rank), np.zeros(n_spin), np.zeros(n_spin))
    for (kind, idx), P in L.partials.items():
        val = power * float(np.trace(Lp @ P).real)
        getattr(g, {"u": "du", "v": "dv", "T": "dT", "S": "dS"}[kind])[idx] = val
    return g


def spectral_trace_bracket(state: GcsState, alg: ChevalleyAlgebra,
                           rep: Representation, x: float, p: int,
                           y: float, q: int) -> float:
    """Poisson bracket {tr rho(L(x))^p, tr rho(L(y))^q} with analytic gradients."""
    ps = poisson_structure(alg)
    l, m = alg.rs.rank, alg.rs.n_pos
    gF = trace_gradient(spectral_lax_intro(state, alg, rep, x), p, l, m)
    gG = trace_gradient(spectral_lax_intro(state, alg, rep, y), q, l, m)
    return ps.bracket(gF, gG, state)


def integral_gradient(state: GcsState, alg: ChevalleyAlgebra, rep: Representation,
                      j: int, k: int) -> Gradient:
    """Analytic gradient of I_{jk}, extracted the same way as the value.

    For each coordinate c, d tr(sT + t eta)^d/dc = d tr((sT + t eta)^{d-1}
    (s dT/dc + t d(eta)/dc)) is again homogeneous of degree d in (s, t), so
    the same Chebyshev/Vandermonde extraction applies.
    """
    ps = poisson_structure(alg)
    rs = alg.rs
    l, m = rs.rank, rs.n_pos
    d = rs.degrees[j - 1]
    L = eta(state, alg, rep)
    Tm = rep.matrix(spin_element(ps.frame, state.T))
    neg_order = [rs.neg(i) - m for i in range(m)]
    E_pos, E_negm = rep.rootvec[:m], rep.rootvec[m:][neg_order]

    nodes = np.cos(np.pi * (np.arange(d + 1) + 0.5) / (d + 1)) * 2.0
    V = np.vander(nodes, d + 1, increasing=False)

    coords =([("u", i) for i in range(l)] + [("v", i) for i in range(l)]
              + [("T", i) for i in range(m)] + [("S", i) for i in range(m)])
    vals = np.zeros((d + 1, len(coords)))
    for irow, s in enumerate(nodes):
        A = s * Tm + L.value
        Ap = np.linalg.matrix_power(A, d - 1)
        for ic, (kind, idx) in enumerate(coords):
            dM = L.partials[(kind, idx)].copy()
            if kind == "T":
                dM = dM + s * (E_pos[idx] - E_negm[idx])
            vals[irow, ic] = d * float(np.trace(Ap @ dM).real)
    coeffs = np.linalg.solve(V, vals)
    row = coeffs[k] / comb(d, k)
    g = Gradient(row[:l].copy(), row[l:2 * l].copy(),
                 row[2 * l:2 * l + m].copy(), row[2 * l + m:].copy())
    return g


def integral_bracket(state: GcsState, alg: ChevalleyAlgebra, rep: Representation,
                     jk: tuple[int, int], mn: tuple[int, int]) -> float:
    """Poisson bracket {I_jk, I_mn} via analytic gradients."""
    ps = poisson_structure(alg)
    gF = integral_gradient(state, alg, rep, *jk)
    gG = integral_gradient(state, alg, rep, *mn)
    return ps.bracket(gF, gG, state)


# ---------------------------------------------------------------------------
# Hyperbolic addition identities used by the Lax-equation proof


def trig_identity_residuals(x: float, y: float) -> tuple[float, float, float]:
    """Residuals of the three sinh-addition identities behind the root-pair
    cancellations of the Lax equation; all are zero identically.
    """
    sx, sy, sxy = np.sinh(x), np.sinh(y), np.sinh(x + y)
    cx, cy = np.cosh(x), np.cosh(y)
    r1 = (1.0 / sxy * (1.0 / sy ** 2 - 1.0 / sx ** 2)
          - (cy / (sx * sy ** 2) - cx / (sy * sx ** 2)))
    r2 = (np.exp(-x - y) / sxy * (1.0 / sy ** 2 - 1.0 / sx ** 2)
          - (-np.exp(-y) / (sx ** 2 * sy) + np.exp(-x) / (sy ** 2 * sx)))
    r3 = (1.0 / sxy * (np.exp(-x - y) * cy / sy ** 2 - cx / sx ** 2)
          - (np.exp(-x) * cy / (sx * sy ** 2) - 1.0 / (sy * sx ** 2)))
    return float(r1), float(r2), float(r3)
