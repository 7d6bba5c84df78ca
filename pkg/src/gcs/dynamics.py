"""Equations of motion, the Poisson-flow oracle, and time integration.

Two printed forms of the equations of motion coexist and are implemented
separately so they can be cross-checked: eom_gcs carries the working form
(ordered decomposition sums with a 1/2 prefactor), eom_intro_form the
survey form.  They agree identically; the momentum equation of the working
form is implemented through its governing definition dv/dt = -dU/du, and
eom_printed_momentum keeps the raw printed right-hand side (which carries
an overall sign slip) so the cross-check suite can report the discrepancy
instead of hiding it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .liealg import ChevalleyAlgebra
from .phase import (
    GcsState,
    Gradient,
    PoissonStructure,
    SingularConfigurationError,
    bc1_rhs,
    gradient_gcs,
    poisson_structure,
)


@dataclass
class StateDerivative:
    """Time derivative of a phase-space point."""

    du: np.ndarray
    dv: np.ndarray
    dT: np.ndarray
    dS: np.ndarray

    def pack(self) -> np.ndarray:
        return np.concatenate([self.du, self.dv, self.dT, self.dS])


@dataclass
class GyrostatSpec:
    """Inverse inertia f (even in the root) and rotator moment g (odd).

    Both are stored as arrays over the positive roots; parity supplies the
    rest: f(-a) = f(a), g(-a) = -g(a).
    """

    f: np.ndarray
    g: np.ndarray


@dataclass
class Trajectory:
    times: np.ndarray
    states: list[GcsState]
    monitors: dict[str, np.ndarray] = field(default_factory=dict)
    event: str | None = None


@lru_cache(maxsize=32)
def _pair_table(family: str, rank: int) -> list[np.ndarray]:
    """Ordered decompositions: for each positive target g, the (k,2) array of
    root-index pairs (a, b) with alpha_a + alpha_b = alpha_g, a, b in R."""
    from .liealg import build_chevalley

    alg = build_chevalley(family=family, rank=rank)
    rs = alg.rs
    n, m = rs.n_roots, rs.n_pos
    table = [[] for _ in range(m)]
    for a in range(n):
        for b in range(n):
            g = alg.sumidx[a, b]
            if 0 <= g < m:
                table[g].append((a, b))
    return [np.array(t, dtype=np.int64).reshape(-1, 2) for t in table]


def _all_root_data(ps: PoissonStructure, state: GcsState):
    """Odd-extended spins and hyperbolic factors over all roots."""
    rs = ps.rs
    u_all = rs.roots @ state.u
    sh = np.sinh(u_all)
    if np.min(np.abs(sh)) < 1e-12:
        raise SingularConfigurationError("wall hit in equations of motion")
    T_all = np.concatenate([state.T, -state.T])
    S_all = np.concatenate([state.S, -state.S])
    return T_all, S_all, u_all, sh, np.cosh(u_all)


def eom_gcs(state: GcsState, alg: ChevalleyAlgebra) -> StateDerivative:
    """Direct equations of motion of the two-spin Hamiltonian.

    du_j = v_j
    dv_j = -dU/du_j
         = 4 sum_{a>0} a(j)/(a,a) [S_a T_a/sinh u_a
             + (S_a^2+T_a^2-2 S_a T_a cosh u_a) cosh u_a/sinh^3 u_a]
    dS_g = 1/2 sum_{a+b=g} C_{ab} [S_a S_b (1/sh_b^2 - 1/sh_a^2)
             + S_b T_a ch_a/sh_a^2 - S_a T_b ch_b/sh_b^2]
    dT_g = 1/2 sum_{a+b=g} C_{ab} [T_a T_b (1/sh_a^2 - 1/sh_b^2)
             - T_b S_a ch_a/sh_a^2 + T_a S_b ch_b/sh_b^2]
    with the decomposition sums over ordered pairs of roots of either sign.
    """
    ps = poisson_structure(alg)
    rs = ps.rs
    T_all, S_all, u_all, sh, ch = _all_root_data(ps, state)
    sh2 = sh * sh

    du = state.v.copy()

    ua = u_all[:rs.n_pos]
    sp, cp = sh[:rs.n_pos], ch[:rs.n_pos]
    num = state.S ** 2 + state.T ** 2 - 2.0 * state.S * state.T * cp
    coeff = 4.0 / ps.sq_pos * (state.S * state.T / sp + num * cp / sp ** 3)
    dv = ps.pos_roots.T @ coeff

    pairs = _pair_table(rs.family, rs.rank)
    C = alg.C
    dT = np.zeros(rs.n_pos)
    dS = np.zeros(rs.n_pos)
    for g in range(rs.n_pos):
        pt = pairs[g]
        if pt.size == 0:
            continue
        a, b = pt[:, 0], pt[:, 1]
        c = C[a, b].astype(float)
        inv_a, inv_b = 1.0 / sh2[a], 1.0 / sh2[b]
        ca_sa = ch[a] * inv_a
        cb_sb = ch[b] * inv_b
        dS[g] = 0.5 * np.sum(c * (S_all[a] * S_all[b] * (inv_b - inv_a)
                                  + S_all[b] * T_all[a] * ca_sa
                                  - S_all[a] * T_all[b] * cb_sb))
        dT[g] = 0.5 * np.sum(c * (T_all[a] * T_all[b] * (inv_a - inv_b)
                                  - T_all[b] * S_all[a] * ca_sa
                                  + T_all[a] * S_all[b] * cb_sb))
    return StateDerivative(du, dv, dT, dS)


def eom_intro_form(state: GcsState, alg: ChevalleyAlgebra) -> StateDerivative:
    """Survey form of the equations of motion.

    dS_a = sum_{b+g=a} C_{bg} S_b (S_g - T_g cosh u_g)/sinh^2 u_g
    dT_a = sum_{b+g=a} C_{bg} T_b (S_g cosh u_g - T_g)/sinh^2 u_g
    dv_j = sum_{g>0} 4 g(j)/(g,g) [(S^2+T^2) cosh/sinh^3
                                    - S T (1+cosh^2)/sinh^3]
    """
    ps = poisson_structure(alg)
    rs = ps.rs
    T_all, S_all, u_all, sh, ch = _all_root_data(ps, state)
    sh2 = sh * sh

    du = state.v.copy()

    sp, cp = sh[:rs.n_pos], ch[:rs.n_pos]
    S, T = state.S, state.T
    coeff = 4.0 / ps.sq_pos * ((S ** 2 + T ** 2) * cp - S * T * (1.0 + cp ** 2)) / sp ** 3
    dv = ps.pos_roots.T @ coeff

    pairs = _pair_table(rs.family, rs.rank)
    C = alg.C
    dT = np.zeros(rs.n_pos)
    dS = np.zeros(rs.n_pos)
    for tgt in range(rs.n_pos):
        pt = pairs[tgt]
        if pt.size == 0:
            continue
        b, g = pt[:, 0], pt[:, 1]
        c = C[b, g].astype(float)
        inv_g = 1.0 / sh2[g]
        dS[tgt] = np.sum(c * S_all[b] * (S_all[g] - T_all[g] * ch[g]) * inv_g)
        dT[tgt] = np.sum(c * T_all[b] * (S_all[g] * ch[g] - T_all[g]) * inv_g)
    return StateDerivative(du, dv, dT, dS)


def eom_printed_momentum(state: GcsState, alg: ChevalleyAlgebra) -> np.ndarray:
    """The momentum right-hand side with an overall -4 prefactor, one
    common way of writing these equations.

    Kept verbatim so the cross-check suite can exhibit the systematic
    sign mismatch against the bracket-derived flow instead of silently
    repairing it.
    """
    return -eom_gcs(state, alg).dv


# ---------------------------------------------------------------------------
# Gyrostat equations


def gyrostat_rhs(T: np.ndarray, spec: GyrostatSpec, alg: ChevalleyAlgebra) -> np.ndarray:
    """Euler-type gyrostat flow on the compact coalgebra.

    dT_g = 1/4 sum_{{a,b}: a+b=g} C_{ab} [T_a T_b ((a,a)f(a) - (b,b)f(b))
             - (T_a (b,b)g(b) - T_b (a,a)g(a))]
    over unordered decompositions (the summand is symmetric in a, b; the
    ordered table is filtered to one representative per pair).
    """
    ps = poisson_structure(alg)
    rs = ps.rs
    m = rs.n_pos
    T_all = np.concatenate([T, -T])
    f_all = np.concatenate([spec.f, spec.f])
    g_all = np.concatenate([spec.g, -spec.g])
    sqf = ps.sq * f_all
    sqg = ps.sq * g_all
    pairs = _pair_table(rs.family, rs.rank)
    C = alg.C
    out = np.zeros(m)
    for tgt in range(m):
        pt = pairs[tgt]
        if pt.size == 0:
            continue
        keep = pt[:, 0] < pt[:, 1]
        a, b = pt[keep, 0], pt[keep, 1]
        c = C[a, b].astype(float)
        out[tgt] = 0.25 * np.sum(
            c * (T_all[a] * T_all[b] * (sqf[a] - sqf[b])
                 - (T_all[a] * sqg[b] - T_all[b] * sqg[a])))
    return out


def gyrostat_rhs_S(S: np.ndarray, spec: GyrostatSpec, alg: ChevalleyAlgebra) -> np.ndarray:
    """Companion flow for the second spin set: same sum, global minus sign."""
    return -gyrostat_rhs(S, spec, alg)


def gyrostat_spec_from_state(state: GcsState, alg: ChevalleyAlgebra
                             ) -> tuple[GyrostatSpec, GyrostatSpec]:
    """Inertia and rotator data reproducing the coupled spin equations.

    Returns (spec_T, spec_S): both share f(a) = 4/((a,a) sinh^2 u_a); the
    rotator moments are g_T(a) = -4 S_a cosh u_a/((a,a) sinh^2 u_a) for the
    T-flow and g_S with S and T swapped for the S-flow.
    """
    ps = poisson_structure(alg)
    ua = ps.require_regular(state.u)
    sh2 = np.sinh(ua) ** 2
    ch = np.cosh(ua)
    f = 4.0 / (ps.sq_pos * sh2)
    g_T = -4.0 * state.S * ch / (ps.sq_pos * sh2)
    g_S = -4.0 * state.T * ch / (ps.sq_pos * sh2)
    return GyrostatSpec(f, g_T), GyrostatSpec(f, g_S)


# ---------------------------------------------------------------------------
# Poisson-flow oracle


def hamiltonian_flow_oracle(state: GcsState, alg: ChevalleyAlgebra,
                            grad: Gradient | None = None,
                            H=None) -> StateDerivative:
    """Flow of every coordinate function through the bracket engine.

    dx_i/dt = {H, x_i} with the coordinate gradients taken literally;
    independent of the closed-form equations of motion.  Supply grad for
    analytic gradients, or H for a finite-difference evaluation.
    """
    from .phase import fd_gradient

    ps = poisson_structure(alg)
    if grad is None:
        if H is None:
            raise ValueError("need an analytic gradient or a Hamiltonian")
        grad = fd_gradient(H, state)
    l, m = ps.rank, ps.n_pos

    def unit_grad(kind, k):
        g = Gradient(np.zeros(l), np.zeros(l), np.zeros(m), np.zeros(m))
        getattr(g, kind)[k] = 1.0
        return g

    du = np.array([ps.bracket(grad, unit_grad("du", j), state) for j in range(l)])
    dv = np.array([ps.bracket(grad, unit_grad("dv", j), state) for j in range(l)])
    dT = np.array([ps.bracket(grad, unit_grad("dT", i), state) for i in range(m)])
    dS = np.array([ps.bracket(grad, unit_grad("dS", i), state) for i in range(m)])
    return StateDerivative(du, dv, dT, dS)


def gcs_flow(state: GcsState, alg: ChevalleyAlgebra) -> StateDerivative:
    """Analytic Poisson flow of hamiltonian_gcs (bracket engine route)."""
    return hamiltonian_flow_oracle(state, alg, grad=gradient_gcs(state, alg))


# ---------------------------------------------------------------------------
# Integrators


def _rk4_step(f, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# Fehlberg 4(5) coefficients.
_RKF_A = [
    [],
    [1 / 4],
    [3 / 32, 9 / 32],
    [1932 / 2197, -7200 / 2197, 7296 / 2197],
    [439 / 216, -8, 3680 / 513, -845 / 4104],
    [-8 / 27, 2, -3544 / 2565, 1859 / 4104, -11 / 40],
]
_RKF_B5 = [16 / 135, 0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55]
_RKF_B4 = [25 / 216, 0, 1408 / 2565, 2197 / 4104, -1 / 5, 0]


def _rkf45_step(f, y: np.ndarray, dt: float) -> tuple[np.ndarray, float]:
    ks = []
    for row in _RKF_A:
        yi = y + dt * sum(a * k for a, k in zip(row, ks)) if row else y
        ks.append(f(yi))
    y5 = y + dt * sum(b * k for b, k in zip(_RKF_B5, ks))
    y4 = y + dt * sum(b * k for b, k in zip(_RKF_B4, ks))
    return y5, float(np.max(np.abs(y5 - y4)))


def integrate(state0: GcsState, alg: ChevalleyAlgebra, dt: float, steps: int,
              method: str = "rk4", rhs=eom_gcs, monitors: dict | None = None,
              monitor_stride: int = 1, rtol: float = 1e-10) -> Trajectory:
    """Integrate the flow, recording states and monitor channels.

    method is "rk4" (fixed step) or "rk45-adaptive" (Fehlberg embedded
    pair, accepted steps matched to the dt grid by sub-stepping with
    per-step error <= rtol).  A wall hit aborts cleanly: the trajectory
    up to the event is returned with the event recorded.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if method not in ("rk4", "rk45-adaptive"):
        raise ValueError(f"unknown method {method!r}")
    rank = state0.u.size
    n_pos = state0.T.size
    monitors = monitors or {}

    def f(y: np.ndarray) -> np.ndarray:
        return rhs(GcsState.unpack(y, rank, n_pos), alg).pack()

    times = [0.0]
    states = [state0.copy()]
    mon: dict[str, list] = {name: [fn(state0)] for name, fn in monitors.items()}
    y = state0.pack()
    event = None
    pos_roots = alg.rs.roots[:n_pos]
    chamber = np.sign(pos_roots @ state0.u)

    for k in range(1, steps + 1):
        try:
            if method == "rk4":
                y = _rk4_step(f, y, dt)
            else:
                remaining = dt
                h = dt
                while remaining > 1e-15 * dt:
                    h = min(h, remaining)
                    ynew, err = _rkf45_step(f, y, h)
                    if err <= rtol or h < 1e-12:
                        y = ynew
                        remaining -= h
                        if err > 0:
                            h *= min(2.0, max(0.2, 0.9 * (rtol / err) ** 0.2))
                    else:
                        h *= max(0.2, 0.9 * (rtol / err) ** 0.2)
        except SingularConfigurationError as exc:
            event = f"singular configuration at t={k * dt:.6g}: {exc}"
            break
        # a sign flip of a root value means the step crossed a wall.  With
        # matched spin coefficients on that root the potential there is
        # regular and the crossing is legitimate; otherwise the step
        # jumped over a divergent barrier and the run must stop even
        # though no evaluation landed inside the guard floor.
        signs = np.sign(pos_roots @ y[:rank])
        flipped = np.flatnonzero(signs * chamber < 0)
        if flipped.size:
            Tc = y[2 * rank:2 * rank + n_pos][flipped]
            Sc = y[2 * rank + n_pos:][flipped]
            scale = max(1.0, float(np.max(np.abs(y[2 * rank:]))))
            if np.max(np.abs(Tc - Sc)) > 1e-8 * scale:
                event = (f"singular configuration at t={k * dt:.6g}: "
                         "trajectory crossed a wall between steps")
                break
            chamber = signs
        if k % monitor_stride == 0 or k == steps:
            st = GcsState.unpack(y, rank, n_pos)
            times.append(k * dt)
            states.append(st)
            for name, fn in monitors.items():
                mon[name].append(fn(st))

    return Trajectory(np.array(times), states,
                      {k2: np.array(v) for k2, v in mon.items()}, event)


def integrate_bc1(w0: float, p0: float, m1: float, m2: float,
                  dt: float, steps: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Independent fixed-step RK4 for the rank-one two-constant system.

    Returns (times, w(t), p(t)).  This is the one-degree-of-freedom oracle
    the reduction test compares against; it never touches the Lie-algebra
    machinery.
    """
    def f(y):
        return np.array(bc1_rhs(y[0], y[1], m1, m2))

    y = np.array([w0, p0], dtype=float)
    ws, ps_ = [w0], [p0]
    for _ in range(steps):
        y = _rk4_step(f, y, dt)
        ws.append(y[0])
        ps_.append(y[1])
    t = dt * np.arange(steps + 1)
    return t, np.array(ws), np.array(ps_)
