"""Bracket engine and Hamiltonians."""

import numpy as np
import pytest

from gcs.liealg import AlgebraElement, LieFrame, build_chevalley
from gcs import phase
from gcs.phase import (
    GcsState,
    Gradient,
    SingularConfigurationError,
    casimirs,
    cs_closed_form,
    eta_cs,
    fd_gradient,
    gradient_gcs,
    hamiltonian_bc1,
    hamiltonian_cs,
    hamiltonian_gcs,
    hamiltonian_gyrostat,
    poisson_bracket,
    poisson_structure,
    random_regular_state,
    spin_element,
)


def alg_of(family, rank):
    return build_chevalley(family=family, rank=rank)


def unit_grad(ps, kind, k):
    g = phase.zero_gradient(ps.rank, ps.n_pos)
    getattr(g, kind)[k] = 1.0
    return g


def test_darboux_sector():
    alg = alg_of("A", 2)
    ps = poisson_structure(alg)
    st = random_regular_state(alg, np.random.default_rng(0))
    assert ps.bracket(unit_grad(ps, "dv", 0), unit_grad(ps, "du", 0), st) == 1.0
    assert ps.bracket(unit_grad(ps, "du", 0), unit_grad(ps, "dv", 0), st) == -1.0
    assert ps.bracket(unit_grad(ps, "dv", 0), unit_grad(ps, "du", 1), st) == 0.0
    # T and S sectors commute
    assert ps.bracket(unit_grad(ps, "dT", 0), unit_grad(ps, "dS", 1), st) == 0.0


def test_spin_bracket_matches_n_constant():
    # {T_a1, T_a2} = N_{a1,a2} T_{a1+a2} on A2, and the S bracket is its negative
    alg = alg_of("A", 2)
    ps = poisson_structure(alg)
    st = random_regular_state(alg, np.random.default_rng(1))
    g = alg.sumidx[0, 1]
    tt = ps.bracket(unit_grad(ps, "dT", 0), unit_grad(ps, "dT", 1), st)
    assert abs(tt - ps.N[0, 1] * st.T[g]) < 1e-14
    ss = ps.bracket(unit_grad(ps, "dS", 0), unit_grad(ps, "dS", 1), st)
    assert abs(ss + ps.N[0, 1] * st.S[g]) < 1e-14


@pytest.mark.parametrize("family,rank", [("A", 2), ("B", 2), ("G", 2), ("C", 3)])
def test_spin_sector_jacobi(family, rank):
    # {T_i,{T_j,T_k}} + cyclic = 0 holds for the structure tensor itself:
    # contractions of B with B must cancel cyclically for any spin values.
    alg = alg_of(family, rank)
    B = poisson_structure(alg).spin_tensor
    lhs = (np.einsum("jkm,imn->ijkn", B, B)
           + np.einsum("kim,jmn->ijkn", B, B)
           + np.einsum("ijm,kmn->ijkn", B, B))
    assert np.max(np.abs(lhs)) < 1e-12


def test_bracket_antisymmetry_random_gradients():
    alg = alg_of("B", 2)
    ps = poisson_structure(alg)
    rng = np.random.default_rng(3)
    st = random_regular_state(alg, rng)
    for _ in range(5):
        gF = Gradient(*(rng.standard_normal(n) for n in (2, 2, 4, 4)))
        gG = Gradient(*(rng.standard_normal(n) for n in (2, 2, 4, 4)))
        assert abs(ps.bracket(gF, gG, st) + ps.bracket(gG, gF, st)) < 1e-14


def test_poisson_bracket_fd_leibniz():
    # {FG, H} = F{G,H} + G{F,H} with finite-difference gradients
    alg = alg_of("A", 2)
    rng = np.random.default_rng(4)
    st = random_regular_state(alg, rng)

    def F(s):
        return float(s.v[0] * s.T[1])

    def G(s):
        return float(np.sin(s.u[1]) + s.S[0] ** 2)

    def H(s):
        return float(s.T[2] * s.u[0] + s.S[1])

    def FG(s):
        return F(s) * G(s)

    lhs = poisson_bracket(FG, H, st, alg)
    rhs = F(st) * poisson_bracket(G, H, st, alg) + G(st) * poisson_bracket(F, H, st, alg)
    assert abs(lhs - rhs) < 1e-7


def test_hamiltonian_free_motion():
    alg = alg_of("A", 2)
    st = GcsState(np.array([0.7, -0.4]), np.array([1.0, 2.0]),
                  np.zeros(3), np.zeros(3))
    assert hamiltonian_gcs(st, alg) == pytest.approx(0.5 * (1 + 4), abs=1e-15)


@pytest.mark.parametrize("family,rank", [("A", 2), ("B", 2), ("G", 2)])
def test_hamiltonian_equals_half_killing_of_eta(family, rank):
    alg = alg_of(family, rank)
    fr = LieFrame(alg)
    ps = poisson_structure(alg)
    rng = np.random.default_rng(5)
    for _ in range(10):
        st = random_regular_state(alg, rng)
        ua = ps.u_alpha(st.u)
        X_pos = (st.T * np.exp(-ua) - st.S) / np.sinh(ua)
        X_neg = (st.T * np.exp(ua) - st.S) / np.sinh(ua)
        eta = np.concatenate([st.v, X_pos, X_neg])
        H = hamiltonian_gcs(st, alg)
        assert abs(H - 0.5 * fr.killing(eta, eta)) < 1e-12 * max(1.0, abs(H))


def test_singular_floor_raises():
    alg = alg_of("A", 1)
    st = GcsState(np.array([1e-13]), np.zeros(1), np.ones(1), np.ones(1))
    with pytest.raises(SingularConfigurationError):
        hamiltonian_gcs(st, alg)


def test_gradient_gcs_matches_fd():
    alg = alg_of("B", 2)
    rng = np.random.default_rng(6)
    for _ in range(5):
        st = random_regular_state(alg, rng)
        ga = gradient_gcs(st, alg)
        gf = fd_gradient(lambda s: hamiltonian_gcs(s, alg), st)
        for name in ("du", "dv", "dT", "dS"):
            assert np.allclose(getattr(ga, name), getattr(gf, name), atol=5e-7)


def test_gyrostat_energy():
    alg = alg_of("A", 2)
    T = np.array([1.0, 2.0, -1.0])
    f = np.array([0.5, 0.5, 0.5])
    g = np.array([0.0, 1.0, 0.0])
    assert hamiltonian_gyrostat(T, f, g, alg) == pytest.approx(
        0.5 * (1 + 4 + 1) * 0.5 + 2.0)


def test_bc1_hamiltonian_values():
    # frozen-spin A1 energy equals the closed two-constant form under the
    # reduction u_a = 2w, v = sqrt(2) p, m1 = T_a, m2 = S_a
    alg = alg_of("A", 1)
    rng = np.random.default_rng(7)
    for _ in range(10):
        w = rng.uniform(0.3, 1.0)
        p = rng.standard_normal()
        m1, m2 = rng.standard_normal(2)
        st = GcsState(np.array([np.sqrt(2.0) * w]), np.array([np.sqrt(2.0) * p]),
                      np.array([m1]), np.array([m2]))
        assert hamiltonian_gcs(st, alg) == pytest.approx(
            hamiltonian_bc1(w, p, m1, m2), rel=1e-13)


def test_cs_killing_vs_closed_form():
    for fam, rank in [("A", 1), ("A", 2), ("B", 2)]:
        alg = alg_of(fam, rank)
        fr = LieFrame(alg)
        rs = alg.rs
        rng = np.random.default_rng(8)
        for _ in range(10):
            u = rng.uniform(0.4, 1.2, rs.rank)
            v = rng.standard_normal(rs.rank)
            Scs = AlgebraElement.from_parts(fr, roots=rng.standard_normal(rs.n_roots))
            hk = hamiltonian_cs(u, v, Scs)
            hc = cs_closed_form(u, v, Scs)
            assert abs(hk - hc) < 1e-12 * max(1.0, abs(hk))


def test_cs_zero_spin_is_free():
    alg = alg_of("A", 2)
    fr = LieFrame(alg)
    v = np.array([1.0, -2.0])
    Scs = AlgebraElement.from_parts(fr, roots=np.zeros(6))
    assert hamiltonian_cs(np.array([0.5, 0.8]), v, Scs) == pytest.approx(2.5)


def test_cs_vanishing_moment():
    # eta_cs - Ad_{exp u} eta_cs = Scs coefficientwise
    alg = alg_of("A", 2)
    fr = LieFrame(alg)
    rs = alg.rs
    rng = np.random.default_rng(9)
    u = rng.uniform(0.4, 1.2, rs.rank)
    v = rng.standard_normal(rs.rank)
    Scs = AlgebraElement.from_parts(fr, roots=rng.standard_normal(rs.n_roots))
    e = eta_cs(u, v, Scs)
    u_all = rs.roots @ u
    ad_vec = e.vec.copy()
    ad_vec[rs.rank:] = ad_vec[rs.rank:] * np.exp(u_all)
    moment = e.vec - ad_vec
    want = np.concatenate([np.zeros(rs.rank), Scs.root_coeffs])
    assert np.allclose(moment, want, atol=1e-12)


def test_casimir_count_and_commutation():
    from gcs.liealg import build_rep

    # number of even degrees = rank of the compact subgroup
    for fam, rank, rank_u in [("A", 1, 1), ("A", 2, 1), ("A", 3, 2),
                              ("B", 2, 2), ("G", 2, 2), ("D", 4, 4)]:
        alg = alg_of(fam, rank)
        assert sum(1 for d in alg.rs.degrees if d % 2 == 0) == rank_u

    # degree-2 Casimir of the T sector commutes with every T coordinate
    alg = alg_of("A", 2)
    fr = LieFrame(alg)
    rep = build_rep(fr, "defining")
    ps = poisson_structure(alg)
    rng = np.random.default_rng(10)
    st = random_regular_state(alg, rng)

    def c2(s):
        return casimirs(s, alg, rep)[0]

    for i in range(ps.n_pos):
        val = poisson_bracket(c2, lambda s, i=i: float(s.T[i]), st, alg)
        assert abs(val) < 1e-8


def test_casimirs_zero_spin():
    from gcs.liealg import build_rep

    alg = alg_of("A", 3)
    fr = LieFrame(alg)
    rep = build_rep(fr, "defining")
    st = GcsState(np.array([0.5, 0.7, 0.9]), np.zeros(3),
                  np.zeros(6), np.zeros(6))
    assert all(c == 0.0 for c in casimirs(st, alg, rep))


def test_spin_element_layout():
    alg = alg_of("A", 2)
    fr = LieFrame(alg)
    T = np.array([1.0, 2.0, 3.0])
    x = spin_element(fr, T)
    assert np.allclose(x[:2], 0)
    assert np.allclose(x[2:5], T)
    assert np.allclose(x[5:], -T)
