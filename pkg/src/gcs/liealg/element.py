"""Float arithmetic in the working basis {e_1..e_l} u {E_alpha}.

Elements are plain numpy vectors of length l + |R|: orthonormal Cartan
coordinates first, then one coordinate per root in the master order of the
underlying root system.  The invariant form is (e_i, e_j) = delta_ij,
(E_alpha, E_beta) = 2 delta_{alpha,-beta} / (alpha, alpha).
"""

from __future__ import annotations

import numpy as np

from .chevalley import ChevalleyAlgebra


class LieFrame:
    """Cached bracket/form tables for fast float computations."""

    def __init__(self, alg: ChevalleyAlgebra):
        self.alg = alg
        rs = alg.rs
        self.rank = rs.rank
        self.n_roots = rs.n_roots
        self.n_pos = rs.n_pos
        self.dim = self.rank + self.n_roots
        self.roots = rs.roots                       # (n, l)
        self.sq = rs.sq_float                       # (n,)
        self.negperm = np.array([rs.neg(i) for i in range(self.n_roots)])
        self.halpha = alg.halpha                    # (n, l)
        self.killw = 2.0 / self.sq                  # (E_a, E_{-a}) weights
        # Sparse [E_i, E_j] = V E_K table over pairs with a root sum.
        ii, jj = np.nonzero(alg.C)
        self._bi = ii
        self._bj = jj
        self._bk = alg.sumidx[ii, jj]
        self._bv = alg.C[ii, jj].astype(float)

    # -- constructors -------------------------------------------------------

    def zero(self) -> np.ndarray:
        return np.zeros(self.dim)

    def element(self, cartan=None, roots=None) -> np.ndarray:
        x = self.zero()
        if cartan is not None:
            x[:self.rank] = cartan
        if roots is not None:
            x[self.rank:] = roots
        return x

    def cartan_part(self, x: np.ndarray) -> np.ndarray:
        return x[:self.rank]

    def root_part(self, x: np.ndarray) -> np.ndarray:
        return x[self.rank:]

    # -- algebra operations -------------------------------------------------

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        l = self.rank
        xc, xr = x[:l], x[l:]
        yc, yr = y[:l], y[l:]
        out = np.zeros(self.dim, dtype=np.result_type(x, y))
        # [E_a, E_{-a}] = H_a contributions
        out[:l] = (xr * yr[self.negperm]) @ self.halpha
        # Cartan acting on root vectors
        rr = (self.roots @ xc) * yr - (self.roots @ yc) * xr
        # root-root into roots
        np.add.at(rr, self._bk, self._bv * xr[self._bi] * yr[self._bj])
        out[l:] = rr
        return out

    def killing(self, x: np.ndarray, y: np.ndarray):
        l = self.rank
        s = x[:l] @ y[:l] + x[l:] @ (self.killw * y[l:][self.negperm])
        return s.item()

    def gram_diag(self) -> np.ndarray:
        """Diagonal of the form in this basis (it is anti-diagonal on roots).

        Returns the weight w(i) with (b_i, b_j) = w(i) delta_{j, pair(i)},
        where pair is the identity on the Cartan block and the negation on
        the root block.
        """
        return np.concatenate([np.ones(self.rank), self.killw])

    def ad(self, x: np.ndarray) -> np.ndarray:
        """Dense matrix of ad(x) = [x, .] in the working basis."""
        l, n = self.rank, self.n_roots
        m = np.zeros((self.dim, self.dim))
        xc, xr = x[:l], x[l:]
        m[l:, :l] = -xr[:, None] * self.roots      # [x, e_j]
        diag = self.roots @ xc
        m[l + np.arange(n), l + np.arange(n)] = diag
        # [x, E_b] Cartan output: x_{-b} H_{-b}
        m[:l, l:] = (xr[self.negperm] * self.halpha[self.negperm].T)
        np.add.at(m, (l + self._bk, l + self._bj), self._bv * xr[self._bi])
        return m

    # -- torus action -------------------------------------------------------

    def root_values(self, u: np.ndarray) -> np.ndarray:
        """alpha(u) for every root, u given in Cartan coordinates."""
        return self.roots @ u

    def torus_conjugate(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Ad(exp u) x for Cartan u: E_alpha picks up exp(alpha(u))."""
        out = x.copy()
        out[self.rank:] = x[self.rank:] * np.exp(self.roots @ u)
        return out


class AlgebraMismatchError(ValueError):
    """Raised when a binary operation mixes elements of different algebras."""


class AlgebraElement:
    """An element h + sum x_alpha E_alpha of a fixed Chevalley frame.

    Thin value wrapper over a coefficient vector.  Real and complex
    coefficients are both accepted; binary operations check that the two
    operands belong to the same (family, rank) frame.
    """

    __slots__ = ("frame", "vec")

    def __init__(self, frame: LieFrame, vec):
        vec = np.asarray(vec)
        if vec.shape != (frame.dim,):
            raise ValueError(
                f"coefficient vector must have length {frame.dim}, got {vec.shape}"
            )
        self.frame = frame
        self.vec = vec

    @classmethod
    def from_parts(cls, frame: LieFrame, cartan=None, roots=None) -> "AlgebraElement":
        dt = np.result_type(
            np.asarray(cartan if cartan is not None else 0.0),
            np.asarray(roots if roots is not None else 0.0),
            np.float64,
        )
        x = np.zeros(frame.dim, dtype=dt)
        if cartan is not None:
            x[: frame.rank] = cartan
        if roots is not None:
            x[frame.rank:] = roots
        return cls(frame, x)

    @property
    def cartan(self) -> np.ndarray:
        return self.vec[: self.frame.rank]

    @property
    def root_coeffs(self) -> np.ndarray:
        return self.vec[self.frame.rank:]

    def _check(self, other: "AlgebraElement") -> None:
        if not isinstance(other, AlgebraElement):
            raise TypeError("expected an AlgebraElement")
        a, b = self.frame.alg.rs, other.frame.alg.rs
        if (a.family, a.rank) != (b.family, b.rank):
            raise AlgebraMismatchError(
                f"elements live in different algebras: "
                f"{a.family}{a.rank} vs {b.family}{b.rank}"
            )

    def bracket(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.frame, self.frame.bracket(self.vec, other.vec))

    def killing(self, other: "AlgebraElement"):
        self._check(other)
        return self.frame.killing(self.vec, other.vec)

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.frame, self.vec + other.vec)

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.frame, self.vec - other.vec)

    def __neg__(self):
        return AlgebraElement(self.frame, -self.vec)

    def __mul__(self, scalar):
        return AlgebraElement(self.frame, self.vec * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        rs = self.frame.alg.rs
        return f"AlgebraElement({rs.family}{rs.rank}, {self.vec!r})"


def bracket(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Lie bracket [a, b] of two elements of the same algebra."""
    return a.bracket(b)


def killing(a: AlgebraElement, b: AlgebraElement):
    """Invariant form (a, b): delta_ij on the Cartan block, 2/(a,a) across
    opposite root spaces."""
    return a.killing(b)
