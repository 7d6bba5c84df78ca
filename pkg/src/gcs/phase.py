"""Phase space, Lie-Poisson bracket engine, and the model Hamiltonians.

The state of the two-spin system is (u, v, T, S): coordinates and momenta
along the Cartan directions, and one real spin coefficient per positive root
for each of the two spin sets.  Spin coefficients extend to negative roots
oddly, T_{-a} = -T_a, which is what makes the bracket

    {T_a, T_b} = N_{a,b} T_{a+b} - N_{a,-b} T_{a-b}

well-formed for every pair of positive roots.  The S-spins carry the same
bracket with a global minus sign, and {T, S} = 0.  On the (u, v) sector the
bracket is Darboux, {v_j, u_k} = delta_jk, and dynamics are generated as
dF/dt = {H, F} (so that du/dt = +v for the quadratic kinetic term).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .liealg import AlgebraElement, ChevalleyAlgebra, LieFrame, build_chevalley

SINGULAR_FLOOR = 1e-12

# Closed-form potential prefactor for the one-spin Calogero-Sutherland
# Hamiltonian, fixed once against the Killing-form evaluation (see
# cs_closed_form and the model-maps diagnostics).
KAPPA_CS = -0.5


class SingularConfigurationError(RuntimeError):
    """A coordinate hit a wall: some |sinh(u_a)| fell below the floor."""


@dataclass
class GcsState:
    """Point of the reduced phase space: (u, v) in the Cartan, spins T, S."""

    u: np.ndarray
    v: np.ndarray
    T: np.ndarray
    S: np.ndarray

    def copy(self) -> "GcsState":
        return GcsState(self.u.copy(), self.v.copy(), self.T.copy(), self.S.copy())

    def pack(self) -> np.ndarray:
        return np.concatenate([self.u, self.v, self.T, self.S])

    @staticmethod
    def unpack(y: np.ndarray, rank: int, n_pos: int) -> "GcsState":
        l, m = rank, n_pos
        return GcsState(y[:l].copy(), y[l:2 * l].copy(),
                        y[2 * l:2 * l + m].copy(), y[2 * l + m:].copy())


@dataclass
class Gradient:
    """Partial derivatives of a scalar with respect to (u, v, T, S)."""

    du: np.ndarray
    dv: np.ndarray
    dT: np.ndarray
    dS: np.ndarray


def zero_gradient(rank: int, n_pos: int) -> Gradient:
    return Gradient(np.zeros(rank), np.zeros(rank),
                    np.zeros(n_pos), np.zeros(n_pos))


class PoissonStructure:
    """Bracket tables and cached root data for one algebra.

    The spin sector is encoded in a cubic tensor B with
    {T_i, T_j} = sum_k B[i,j,k] T_k over positive-root indices; the S sector
    uses -B.  B is assembled from N_{a,b} = -C_{a,b}(a,a)(b,b)/(4(a+b,a+b)).
    """

    def __init__(self, alg: ChevalleyAlgebra):
        self.alg = alg
        self.frame = LieFrame(alg)
        rs = alg.rs
        self.rs = rs
        self.rank = rs.rank
        self.n_pos = rs.n_pos
        self.pos_roots = rs.roots[:rs.n_pos]          # (m, l) float
        self.sq = rs.sq_float                          # (n,) float
        self.sq_pos = self.sq[:rs.n_pos]

        n = rs.n_roots
        N = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                g = alg.sumidx[i, j]
                if g >= 0:
                    N[i, j] = -alg.C[i, j] * self.sq[i] * self.sq[j] / (4.0 * self.sq[g])
        self.N = N

        m = rs.n_pos
        B = np.zeros((m, m, m))
        for i in range(m):
            for j in range(m):
                s = alg.sumidx[i, j]
                if s >= 0:           # sum of two positives is positive
                    B[i, j, s] += N[i, j]
                jn = rs.neg(j)
                d = alg.sumidx[i, jn]
                if d >= 0:
                    if d < m:
                        B[i, j, d] -= N[i, jn]
                    else:
                        B[i, j, rs.neg(d)] += N[i, jn]
        self.spin_tensor = B

    def u_alpha(self, u: np.ndarray) -> np.ndarray:
        """Pairings u_a = a(u) for every positive root."""
        return self.pos_roots @ u

    def require_regular(self, u: np.ndarray, floor: float = SINGULAR_FLOOR) -> np.ndarray:
        ua = self.u_alpha(u)
        s = np.sinh(ua)
        bad = np.abs(s) < floor
        if np.any(bad):
            i = int(np.argmax(bad))
            raise SingularConfigurationError(
                f"wall hit: |sinh(u_a)| = {abs(s[i]):.3e} at positive root "
                f"{self.rs.label(i)}")
        return ua

    def spin_bracket_TT(self, i: int, j: int, T: np.ndarray) -> float:
        """{T_i, T_j} evaluated on spin values T."""
        return float(self.spin_tensor[i, j] @ T)

    def bracket(self, gF: Gradient, gG: Gradient, state: GcsState) -> float:
        """Full Poisson bracket of two scalars given their gradients."""
        val = float(gF.dv @ gG.du - gF.du @ gG.dv)
        B = self.spin_tensor
        val += float(np.einsum("i,j,ijk,k->", gF.dT, gG.dT, B, state.T))
        val -= float(np.einsum("i,j,ijk,k->", gF.dS, gG.dS, B, state.S))
        return val


@lru_cache(maxsize=32)
def _structure_cache(family: str, rank: int) -> PoissonStructure:
    return PoissonStructure(build_chevalley(family=family, rank=rank))


def poisson_structure(alg: ChevalleyAlgebra) -> PoissonStructure:
    return _structure_cache(alg.rs.family, alg.rs.rank)


def fd_gradient(F, state: GcsState) -> Gradient:
    """Central finite differences, step cbrt(eps) * max(1, |x|)."""
    h0 = float(np.cbrt(np.finfo(float).eps))
    out = []
    for arr in (state.u, state.v, state.T, state.S):
        g = np.zeros_like(arr)
        for k in range(arr.size):
            h = h0 * max(1.0, abs(arr[k]))
            saved = arr[k]
            arr[k] = saved + h
            fp = F(state)
            arr[k] = saved - h
            fm = F(state)
            arr[k] = saved
            g[k] = (fp - fm) / (2 * h)
        out.append(g)
    return Gradient(*out)


def poisson_bracket(F, G, state: GcsState, alg: ChevalleyAlgebra,
                    grad_F: Gradient | None = None,
                    grad_G: Gradient | None = None) -> float:
    """{F, G} at a state.  Gradients are finite-differenced when not given."""
    ps = poisson_structure(alg)
    gF = grad_F if grad_F is not None else fd_gradient(F, state)
    gG = grad_G if grad_G is not None else fd_gradient(G, state)
    return ps.bracket(gF, gG, state)


# ---------------------------------------------------------------------------
# Hamiltonians


def hamiltonian_gcs(state: GcsState, alg: ChevalleyAlgebra) -> float:
    """Two-spin hyperbolic Hamiltonian.

    H = 1/2 (v,v) + 2 sum_{a>0} [S_a^2 + T_a^2 - 2 S_a T_a cosh(u_a)]
        / ((a,a) sinh^2(u_a)).
    """
    ps = poisson_structure(alg)
    ua = ps.require_regular(state.u)
    sh2 = np.sinh(ua) ** 2
    num = state.S ** 2 + state.T ** 2 - 2.0 * state.S * state.T * np.cosh(ua)
    pot = float(np.sum(2.0 * num / (ps.sq_pos * sh2)))
    return 0.5 * float(state.v @ state.v) + pot


def gradient_gcs(state: GcsState, alg: ChevalleyAlgebra) -> Gradient:
    """Analytic gradient of hamiltonian_gcs."""
    ps = poisson_structure(alg)
    ua = ps.require_regular(state.u)
    sh = np.sinh(ua)
    ch = np.cosh(ua)
    S, T = state.S, state.T
    num = S ** 2 + T ** 2 - 2.0 * S * T * ch
    # d/du_a of num/sinh^2 = -2ST/sinh - 2 num cosh/sinh^3
    dpot_dua = (2.0 / ps.sq_pos) * (-2.0 * S * T / sh - 2.0 * num * ch / sh ** 3)
    du = ps.pos_roots.T @ dpot_dua
    dT = (4.0 / ps.sq_pos) * (T - S * ch) / sh ** 2
    dS = (4.0 / ps.sq_pos) * (S - T * ch) / sh ** 2
    return Gradient(du, state.v.copy(), dT, dS)


def hamiltonian_gyrostat(T: np.ndarray, f: np.ndarray, g: np.ndarray,
                         alg: ChevalleyAlgebra) -> float:
    """Gyrostat energy sum_{a>0} (1/2 T_a^2 f(a) + T_a g(a)).

    f and g are arrays over the positive roots; their negative-root values
    are implied by the parities f(-a) = f(a), g(-a) = -g(a).
    """
    return float(np.sum(0.5 * T ** 2 * f + T * g))


def hamiltonian_bc1(w: float, p: float, m1: float, m2: float) -> float:
    """Rank-one two-constant Hamiltonian p^2 + W(w) on the half-line.

    W(w) = (m1^2 + m2^2 - 2 m1 m2 cosh(2w)) / sinh^2(2w).  The conjugate
    pair carries {p, w} = 1/2, so the flow is dw/dt = p, dp/dt = -W'(w)/2.
    """
    return p * p + bc1_potential(w, m1, m2)


def bc1_potential(w: float, m1: float, m2: float) -> float:
    s = np.sinh(2.0 * w)
    if abs(s) < SINGULAR_FLOOR:
        raise SingularConfigurationError("bc1 wall: sinh(2w) ~ 0")
    return float((m1 * m1 + m2 * m2 - 2.0 * m1 * m2 * np.cosh(2.0 * w)) / (s * s))


def bc1_rhs(w: float, p: float, m1: float, m2: float) -> tuple[float, float]:
    """Reduced flow (dw/dt, dp/dt) of hamiltonian_bc1."""
    s = np.sinh(2.0 * w)
    if abs(s) < SINGULAR_FLOOR:
        raise SingularConfigurationError("bc1 wall: sinh(2w) ~ 0")
    c = np.cosh(2.0 * w)
    num = m1 * m1 + m2 * m2 - 2.0 * m1 * m2 * c
    # W'(w) = -4 m1 m2 / sinh(2w) - 4 num cosh(2w)/sinh^3(2w)
    dW = -4.0 * m1 * m2 / s - 4.0 * num * c / s ** 3
    return p, -0.5 * float(dW)


def _cs_coeffs(u_all: np.ndarray, floor: float = SINGULAR_FLOOR) -> np.ndarray:
    den = 1.0 - np.exp(u_all)
    bad = np.abs(den) < floor
    if np.any(bad):
        raise SingularConfigurationError("cs wall: 1 - exp(u_a) ~ 0")
    return den


def eta_cs(u: np.ndarray, v: np.ndarray, Scs: AlgebraElement) -> AlgebraElement:
    """One-spin Lax residue v + sum_{a in R} Stilde_a/(1 - e^{u_a}) E_a."""
    frame = Scs.frame
    rs = frame.alg.rs
    u_all = rs.roots @ u
    den = _cs_coeffs(u_all)
    vec = np.zeros(frame.dim)
    vec[:rs.rank] = v
    vec[rs.rank:] = Scs.root_coeffs / den
    return AlgebraElement(frame, vec)


def hamiltonian_cs(u: np.ndarray, v: np.ndarray, Scs: AlgebraElement) -> float:
    """Spin Calogero-Sutherland energy, 1/2 (eta_cs, eta_cs) by the form.

    The Killing-form evaluation is the defining one.  cs_closed_form gives
    the equivalent explicit sum; the two are cross-checked in the verify
    suites and the sign constant KAPPA_CS is recorded in diagnostics.
    """
    e = eta_cs(u, v, Scs)
    return 0.5 * float(e.killing(e))


def cs_closed_form(u: np.ndarray, v: np.ndarray, Scs: AlgebraElement,
                   kappa: float = KAPPA_CS) -> float:
    """Closed form 1/2 (v,v) + kappa sum_{a>0} S_a S_{-a} / ((a,a) sinh^2(u_a/2))."""
    frame = Scs.frame
    rs = frame.alg.rs
    m = rs.n_pos
    ua = rs.roots[:m] @ u
    s2 = np.sinh(0.5 * ua) ** 2
    if np.any(np.abs(s2) < SINGULAR_FLOOR):
        raise SingularConfigurationError("cs wall: sinh(u_a/2) ~ 0")
    c = Scs.root_coeffs
    # negative-root coefficient of positive root i sits at index neg(i)
    prod = np.array([c[i] * c[rs.neg(i)] for i in range(m)])
    pot = kappa * float(np.sum(prod / (rs.sq_float[:m] * s2)))
    return 0.5 * float(v @ v) + pot


# ---------------------------------------------------------------------------
# Spin elements and Casimirs


def spin_element(frame: LieFrame, spins: np.ndarray) -> np.ndarray:
    """Working-basis vector of sum_{a>0} c_a (E_a - E_{-a})."""
    x = np.zeros(frame.dim)
    m = frame.alg.rs.n_pos
    x[frame.rank:frame.rank + m] = spins
    x[frame.rank + m:] = -spins
    return x


def casimirs(state: GcsState, alg: ChevalleyAlgebra, rep) -> list[float]:
    """Trace invariants tr(rho(T)^{d_j})/c_rho over the even degrees.

    Their number equals the rank of the maximal compact subgroup.
    """
    ps = poisson_structure(alg)
    M = rep.matrix(spin_element(ps.frame, state.T))
    out = []
    for d in alg.rs.degrees:
        if d % 2 == 0:
            out.append(float(np.trace(np.linalg.matrix_power(M, d))) / rep.c_rho)
    return out


def random_regular_state(alg: ChevalleyAlgebra, rng: np.random.Generator,
                         spin_norm: float = 1.0,
                         u_box: tuple[float, float] = (0.35, 1.4),
                         margin: float = 0.3,
                         v_scale: float = 1.0) -> GcsState:
    """Draw a state with every |u_a| bounded away from the walls."""
    ps = poisson_structure(alg)
    lo, hi = u_box
    for _ in range(500):
        u = rng.uniform(lo, hi, size=ps.rank) * rng.choice([-1.0, 1.0], size=ps.rank)
        if np.min(np.abs(ps.u_alpha(u))) > margin:
            break
    else:
        raise SingularConfigurationError("could not draw a regular u")
    v = v_scale * rng.standard_normal(ps.rank)

    def draw_spin():
        x = rng.standard_normal(ps.n_pos)
        return spin_norm * x / np.linalg.norm(x)

    return GcsState(u, v, draw_spin(), draw_spin())
