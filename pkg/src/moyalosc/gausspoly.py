"""Exact calculus for polynomial-times-Gaussian functions on R^n.

Functions are finite sums of terms

    coeff * x^alpha * exp(-<x, A x> + <b, x>)

with complex symmetric A and complex b.  The class is closed under pointwise
products, affine substitutions, derivatives, partial Gaussian integration and
the Moyal star product, so every identity downstream of this module can be
checked without sampling or quadrature.  <.,.> is the bilinear (unconjugated)
pairing throughout.

Plane waves are terms with A = 0 and purely imaginary b; star products are
supported between two Gaussian-decaying factors and between a plane-wave
polynomial and anything, via a shift/derivative expansion.  Complex Gaussian
integrals use the principal determinant branch, which is the unique branch
continuous on {Re A > 0}.
"""

import math
from itertools import product as _iterproduct

import numpy as np

from .errors import (
    DomainError,
    NumericalInstabilityError,
    ParameterError,
    UnsupportedProductError,
)

# terms whose monomial degree exceeds this raise, as a guard against
# runaway symbolic growth in iterated products
DEGREE_CAP = 16

# quantum for merging floating-point term keys
MERGE_TOL = 1e-12

# classification thresholds
_ZERO_TOL = 1e-13
_COND_LIMIT = 1e12


def _as_cvec(b, n):
    b = np.asarray(b, dtype=complex).reshape(n)
    return b


def _as_cmat(A, n):
    A = np.asarray(A, dtype=complex).reshape(n, n)
    return 0.5 * (A + A.T)


def _qkey(z):
    # quantized key for merging; absolute 1e-12 grid
    return (int(round(z.real / MERGE_TOL)), int(round(z.imag / MERGE_TOL)))


def _term_key(alpha, A, b):
    return (
        alpha,
        tuple(_qkey(z) for z in A.ravel()),
        tuple(_qkey(z) for z in b.ravel()),
    )


class GaussPoly:
    """A finite sum of polynomial-times-Gaussian terms on R^dim.

    Terms are kept canonicalized: A symmetrized, terms with matching
    (alpha, A, b) merged, zero coefficients dropped.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim, terms):
        self.dim = int(dim)
        merged = {}
        order = []
        for coeff, alpha, A, b in terms:
            if coeff == 0:
                continue
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.dim:
                raise ParameterError("monomial exponent length != dim")
            if any(a < 0 for a in alpha):
                raise ParameterError("negative monomial exponent")
            if sum(alpha) > DEGREE_CAP:
                raise DomainError(
                    "polynomial degree %d exceeds cap %d" % (sum(alpha), DEGREE_CAP)
                )
            A = _as_cmat(A, self.dim)
            b = _as_cvec(b, self.dim)
            key = _term_key(alpha, A, b)
            if key in merged:
                c0, alpha0, A0, b0 = merged[key]
                merged[key] = (c0 + complex(coeff), alpha0, A0, b0)
            else:
                merged[key] = (complex(coeff), alpha, A, b)
                order.append(key)
        out = []
        for key in order:
            c, alpha, A, b = merged[key]
            if abs(c) != 0.0:
                A.flags.writeable = False
                b.flags.writeable = False
                out.append((c, alpha, A, b))
        self.terms = tuple(out)

    # ------------------------------------------------------------------
    # constructors

    @staticmethod
    def zero(dim):
        return GaussPoly(dim, [])

    @staticmethod
    def constant(dim, c):
        return GaussPoly(dim, [(c, (0,) * dim, np.zeros((dim, dim)), np.zeros(dim))])

    @staticmethod
    def gaussian(dim, A, b=None, coeff=1.0):
        """coeff * exp(-<x,Ax> + <b,x>)."""
        if b is None:
            b = np.zeros(dim)
        return GaussPoly(dim, [(coeff, (0,) * dim, A, b)])

    @staticmethod
    def monomial(dim, alpha, coeff=1.0):
        return GaussPoly(dim, [(coeff, alpha, np.zeros((dim, dim)), np.zeros(dim))])

    @staticmethod
    def plane_wave(dim, k, coeff=1.0):
        """coeff * exp(i<k,x>) for real k."""
        k = np.asarray(k, dtype=float).reshape(dim)
        return GaussPoly(
            dim, [(coeff, (0,) * dim, np.zeros((dim, dim)), 1j * k)]
        )

    # ------------------------------------------------------------------
    # ring structure

    def __add__(self, other):
        if isinstance(other, GaussPoly):
            if other.dim != self.dim:
                raise ParameterError("dimension mismatch in add")
            return GaussPoly(self.dim, self.terms + other.terms)
        return self + GaussPoly.constant(self.dim, other)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other if isinstance(other, GaussPoly) else -complex(other))

    def scale(self, c):
        c = complex(c)
        return GaussPoly(self.dim, [(c * t[0], t[1], t[2], t[3]) for t in self.terms])

    def __mul__(self, other):
        if isinstance(other, GaussPoly):
            if other.dim != self.dim:
                raise ParameterError("dimension mismatch in product")
            out = []
            for c1, a1, A1, b1 in self.terms:
                for c2, a2, A2, b2 in other.terms:
                    out.append(
                        (
                            c1 * c2,
                            tuple(i + j for i, j in zip(a1, a2)),
                            A1 + A2,
                            b1 + b2,
                        )
                    )
            return GaussPoly(self.dim, out)
        return self.scale(other)

    __rmul__ = __mul__

    def conj(self):
        return GaussPoly(
            self.dim,
            [(np.conj(c), a, np.conj(A), np.conj(b)) for c, a, A, b in self.terms],
        )

    # ------------------------------------------------------------------
    # calculus

    def deriv(self, i):
        """Partial derivative along coordinate i."""
        out = []
        for c, alpha, A, b in self.terms:
            if alpha[i] > 0:
                down = list(alpha)
                down[i] -= 1
                out.append((c * alpha[i], tuple(down), A, b))
            # derivative of the exponent: (-2(Ax)_i + b_i)
            if abs(b[i]) != 0.0:
                out.append((c * b[i], alpha, A, b))
            for j in range(self.dim):
                if abs(A[i, j]) != 0.0:
                    up = list(alpha)
                    up[j] += 1
                    out.append((-2.0 * c * A[i, j], tuple(up), A, b))
        return GaussPoly(self.dim, out)

    def mul_linear(self, coef_vec, const=0.0):
        """Multiply by the affine polynomial const + <coef_vec, x>."""
        out = []
        for c, alpha, A, b in self.terms:
            if const != 0.0:
                out.append((c * const, alpha, A, b))
            for j, w in enumerate(coef_vec):
                if w != 0.0:
                    up = list(alpha)
                    up[j] += 1
                    out.append((c * w, tuple(up), A, b))
        return GaussPoly(self.dim, out)

    def subst_affine(self, L, c=None, in_dim=None):
        """Compose with the affine map x = L v + c.

        L has shape (dim, in_dim); the result lives on R^in_dim.
        """
        L = np.asarray(L, dtype=complex)
        if in_dim is None:
            in_dim = L.shape[1]
        if L.shape != (self.dim, in_dim):
            raise ParameterError("substitution matrix has wrong shape")
        if c is None:
            c = np.zeros(self.dim)
        c = _as_cvec(c, self.dim)
        out = []
        for coeff, alpha, A, b in self.terms:
            A2 = L.T @ A @ L
            b2 = L.T @ (b - 2.0 * (A @ c))
            s = coeff * np.exp(-(c @ (A @ c)) + b @ c)
            for beta, w in _affine_power(c, L, alpha, in_dim).items():
                out.append((s * w, beta, A2, b2))
        return GaussPoly(in_dim, out)

    def shift(self, c):
        """f(. + c): substitute x = v + c."""
        return self.subst_affine(np.eye(self.dim), c, self.dim)

    def embed(self, new_dim, where):
        """Place this function on a larger space, x_i = v_where[i]."""
        L = np.zeros((self.dim, new_dim))
        for i, w in enumerate(where):
            L[i, w] = 1.0
        return self.subst_affine(L, None, new_dim)

    # ------------------------------------------------------------------
    # structure queries

    def max_abs_coeff(self):
        return max((abs(t[0]) for t in self.terms), default=0.0)

    def _scales(self):
        sA = max((np.max(np.abs(t[2])) for t in self.terms), default=0.0)
        sb = max((np.max(np.abs(t[3]), initial=0.0) for t in self.terms), default=0.0)
        return max(sA, 1.0), max(sb, 1.0)

    def is_schwartz(self, sub=None):
        """True when every term decays like a Gaussian (Re A positive
        definite), optionally restricted to the coordinate subset sub."""
        idx = list(range(self.dim)) if sub is None else list(sub)
        if not idx:
            return True
        for _, _, A, _ in self.terms:
            R = A.real[np.ix_(idx, idx)]
            if len(idx) == 1:
                lo = R[0, 0]
            else:
                lo = np.linalg.eigvalsh(R)[0]
            if lo <= _ZERO_TOL * max(1.0, np.max(np.abs(A))):
                return False
        return True

    def split_wave_poly(self, sub=None):
        """Split into (wavepoly, rest): terms that are polynomial plane
        waves on the coordinates sub (A-block zero, real b zero there)."""
        idx = list(range(self.dim)) if sub is None else list(sub)
        waves, rest = [], []
        for t in self.terms:
            _, _, A, b = t
            scale = max(1.0, np.max(np.abs(A)), np.max(np.abs(b), initial=0.0))
            blk = np.abs(A[idx, :]).max() if idx else 0.0
            reb = np.abs(b.real[idx]).max() if idx else 0.0
            if blk <= _ZERO_TOL * scale and reb <= _ZERO_TOL * scale:
                waves.append(t)
            else:
                rest.append(t)
        return GaussPoly(self.dim, waves), GaussPoly(self.dim, rest)

    def poly_part(self):
        """Terms with no exponential at all (A = 0 and b = 0)."""
        keep, rest = [], []
        for t in self.terms:
            _, _, A, b = t
            if np.max(np.abs(A), initial=0.0) <= _ZERO_TOL and np.max(
                np.abs(b), initial=0.0
            ) <= _ZERO_TOL:
                keep.append(t)
            else:
                rest.append(t)
        return GaussPoly(self.dim, keep), GaussPoly(self.dim, rest)

    # ------------------------------------------------------------------
    # evaluation

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x).astype(complex)
        val = np.zeros(pts.shape[0], dtype=complex)
        for c, alpha, A, b in self.terms:
            mono = np.ones(pts.shape[0], dtype=complex)
            for i, a in enumerate(alpha):
                if a:
                    mono = mono * pts[:, i] ** a
            expo = -np.einsum("pi,ij,pj->p", pts, A, pts) + pts @ b
            val = val + c * mono * np.exp(expo)
        return val[0] if single else val

    def __repr__(self):
        return "GaussPoly(dim=%d, nterms=%d)" % (self.dim, len(self.terms))


# ----------------------------------------------------------------------
# polynomial-dict helpers (multi-index tuple -> complex coefficient)


def _poly_mul(p, q):
    out = {}
    for a, ca in p.items():
        for b, cb in q.items():
            key = tuple(i + j for i, j in zip(a, b))
            out[key] = out.get(key, 0.0) + ca * cb
    return out


def _affine_power(w0, W1, gamma, n_in):
    """Expand prod_j (w0_j + (W1 v)_j)^gamma_j as a dict over v-exponents."""
    acc = {(0,) * n_in: 1.0 + 0.0j}
    for j, gj in enumerate(gamma):
        if gj == 0:
            continue
        lin = {}
        if w0[j] != 0.0:
            lin[(0,) * n_in] = complex(w0[j])
        for i in range(n_in):
            if W1[j, i] != 0.0:
                e = [0] * n_in
                e[i] = 1
                lin[tuple(e)] = complex(W1[j, i])
        powj = {(0,) * n_in: 1.0 + 0.0j}
        for _ in range(gj):
            powj = _poly_mul(powj, lin)
        acc = _poly_mul(acc, powj)
    return acc


def _central_moments(Sigma, kappa_list):
    """Central Gaussian moments E[v^kappa] for covariance Sigma, by the
    pairing recursion; memoized across the requested multi-indices."""
    memo = {}

    def rec(kappa):
        if sum(kappa) == 0:
            return 1.0 + 0.0j
        if sum(kappa) % 2 == 1:
            return 0.0 + 0.0j
        if kappa in memo:
            return memo[kappa]
        i = next(k for k, v in enumerate(kappa) if v > 0)
        rem = list(kappa)
        rem[i] -= 1
        tot = 0.0 + 0.0j
        for j in range(len(kappa)):
            if rem[j] > 0:
                rem2 = list(rem)
                rem2[j] -= 1
                tot += Sigma[i, j] * rem[j] * rec(tuple(rem2))
        memo[kappa] = tot
        return tot

    return {k: rec(k) for k in kappa_list}


def _sqrt_det_principal(A):
    """Principal branch of sqrt(det A) for complex symmetric A with
    Re A positive definite."""
    R = A.real
    w, V = np.linalg.eigh(R)
    scale = max(1.0, np.max(np.abs(A)))
    if w[0] <= 1e-14 * scale:
        raise DomainError("quadratic form is not Gaussian-decaying")
    if w[0] * _COND_LIMIT < w[-1]:
        raise NumericalInstabilityError(
            "quadratic form condition number beyond %.1e" % _COND_LIMIT
        )
    rh_inv = V @ np.diag(1.0 / np.sqrt(w)) @ V.T
    S = rh_inv @ A.imag @ rh_inv
    s = np.linalg.eigvalsh(0.5 * (S + S.T))
    val = np.exp(0.5 * np.sum(np.log(w)))
    return val * np.prod(np.sqrt(1.0 + 1j * s))


def integrate_out(f, dims):
    """Integrate over the coordinates in dims, returning a GaussPoly on
    the remaining coordinates (original order preserved).

    Every term must decay on the integrated block.
    """
    dims = sorted(set(int(d) for d in dims))
    if any(d < 0 or d >= f.dim for d in dims):
        raise ParameterError("integration coordinate out of range")
    keep = [i for i in range(f.dim) if i not in dims]
    m, n_keep = len(dims), len(keep)
    if m == 0:
        return f
    out = []
    for coeff, alpha, A, b in f.terms:
        Aww = A[np.ix_(dims, dims)]
        Aws = A[np.ix_(dims, keep)] if n_keep else np.zeros((m, 0), dtype=complex)
        Ass = A[np.ix_(keep, keep)] if n_keep else np.zeros((0, 0), dtype=complex)
        bw = b[dims]
        bs = b[keep] if n_keep else np.zeros(0, dtype=complex)

        detfac = _sqrt_det_principal(Aww)
        C = np.linalg.solve(Aww, np.eye(m, dtype=complex))
        C = 0.5 * (C + C.T)

        w0 = 0.5 * (C @ bw)
        W1 = -(C @ Aws)
        A_new = Ass - Aws.T @ C @ Aws
        b_new = bs - Aws.T @ (C @ bw)
        scalar = (
            coeff
            * np.pi ** (0.5 * m)
            / detfac
            * np.exp(0.25 * (bw @ (C @ bw)))
        )

        alpha_w = tuple(alpha[d] for d in dims)
        alpha_s = tuple(alpha[k] for k in keep)
        if sum(alpha_w) == 0:
            out.append((scalar, alpha_s, A_new, b_new))
            continue

        Sigma = 0.5 * C
        kappas = list(_iterproduct(*[range(a + 1) for a in alpha_w]))
        moments = _central_moments(
            Sigma, [k for k in kappas if sum(k) % 2 == 0]
        )
        for kappa in kappas:
            if sum(kappa) % 2 == 1:
                continue
            binc = 1.0
            for aj, kj in zip(alpha_w, kappa):
                binc *= math.comb(aj, kj)
            mom = moments[kappa]
            if mom == 0.0:
                continue
            gamma = tuple(a - k for a, k in zip(alpha_w, kappa))
            for beta, wgt in _affine_power(w0, W1, gamma, n_keep).items():
                tot_alpha = tuple(x + y for x, y in zip(alpha_s, beta))
                out.append((scalar * binc * mom * wgt, tot_alpha, A_new, b_new))
    return GaussPoly(n_keep, out)


def integrate(f):
    """Full integral over R^dim; requires Gaussian decay in every term."""
    if not f.is_schwartz():
        raise DomainError("integrand does not decay; integral undefined")
    if f.dim == 0:
        return sum((t[0] for t in f.terms), 0.0 + 0.0j)
    red = integrate_out(f, range(f.dim))
    return sum((t[0] for t in red.terms), 0.0 + 0.0j)


def weighted_moment(f, poly_coeffs, A0):
    """Integral of f * P * exp(-<x, A0 x>) where P is given as a dict
    mapping multi-index tuples to coefficients."""
    dim = f.dim
    P = GaussPoly(
        dim,
        [(c, alpha, np.zeros((dim, dim)), np.zeros(dim)) for alpha, c in poly_coeffs.items()],
    )
    W = GaussPoly.gaussian(dim, A0)
    return integrate(f * P * W)


# ----------------------------------------------------------------------
# star product


def _term_gp(dim, term):
    return GaussPoly(dim, [term])


def _star_wave_left(fterm, g, act, theta, dim):
    """fterm is a polynomial plane wave on the active coordinates."""
    coeff, alpha, A, b = fterm
    m = len(act)
    p = np.array([b[a].imag for a in act], dtype=float)
    alpha_act = tuple(alpha[a] for a in act)

    # leftover factor of fterm with the active monomial and wave removed
    alpha_rest = list(alpha)
    b_rest = b.copy()
    for a in act:
        alpha_rest[a] = 0
        b_rest[a] = 0.0
    rest = _term_gp(dim, (coeff, tuple(alpha_rest), A, b_rest))

    shift_vec = np.zeros(dim)
    half_tp = 0.5 * (theta @ p)
    for j, a in enumerate(act):
        shift_vec[a] = half_tp[j]
    g_shift = g.shift(shift_vec)

    wave = GaussPoly.plane_wave(dim, _embed_vec(p, act, dim))

    total = GaussPoly.zero(dim)
    W = 0.5 * theta
    for kappa in _iterproduct(*[range(a + 1) for a in alpha_act]):
        binc = 1.0
        for aj, kj in zip(alpha_act, kappa):
            binc *= math.comb(aj, kj)
        # monomial x_act^(alpha-kappa)
        mono_alpha = [0] * dim
        for j, a in enumerate(act):
            mono_alpha[a] = alpha_act[j] - kappa[j]
        mono = GaussPoly.monomial(dim, tuple(mono_alpha), binc)
        # expansion of (theta k / 2)^kappa over derivative directions
        block = GaussPoly.zero(dim)
        for delta, w in _affine_power(np.zeros(m), W, kappa, m).items():
            gd = g_shift
            for j, dcount in enumerate(delta):
                for _ in range(dcount):
                    gd = gd.deriv(act[j])
            block = block + gd.scale(w * (1j) ** sum(delta))
        total = total + mono * block
    return rest * wave * total


def _star_wave_right(f, gterm, act, theta, dim):
    """gterm is a polynomial plane wave on the active coordinates."""
    coeff, beta, A, b = gterm
    m = len(act)
    q = np.array([b[a].imag for a in act], dtype=float)
    beta_act = tuple(beta[a] for a in act)

    beta_rest = list(beta)
    b_rest = b.copy()
    for a in act:
        beta_rest[a] = 0
        b_rest[a] = 0.0
    rest = _term_gp(dim, (coeff, tuple(beta_rest), A, b_rest))

    shift_vec = np.zeros(dim)
    half_tq = 0.5 * (theta @ q)
    for j, a in enumerate(act):
        shift_vec[a] = -half_tq[j]
    f_shift = f.shift(shift_vec)

    wave = GaussPoly.plane_wave(dim, _embed_vec(q, act, dim))

    total = GaussPoly.zero(dim)
    W = -0.5 * theta  # row j: coefficients of (1/2) theta_{rho j} d_rho
    for kappa in _iterproduct(*[range(a + 1) for a in beta_act]):
        binc = 1.0
        for aj, kj in zip(beta_act, kappa):
            binc *= math.comb(aj, kj)
        mono_alpha = [0] * dim
        for j, a in enumerate(act):
            mono_alpha[a] = beta_act[j] - kappa[j]
        mono = GaussPoly.monomial(dim, tuple(mono_alpha), binc)
        block = GaussPoly.zero(dim)
        for delta, w in _affine_power(np.zeros(m), W, kappa, m).items():
            fd = f_shift
            for j, dcount in enumerate(delta):
                for _ in range(dcount):
                    fd = fd.deriv(act[j])
            block = block + fd.scale(w * (1j) ** sum(delta))
        total = total + mono * block
    return rest * wave * total


def _embed_vec(v, act, dim):
    out = np.zeros(dim)
    for j, a in enumerate(act):
        out[a] = v[j]
    return out


def _star_gauss_pair(fterm, gterm, act, theta, dim):
    """Oscillatory-integral star product of two Gaussian-decaying terms."""
    m = len(act)
    big = dim + 2 * m
    # v = (x_0..x_{dim-1}, y_0..y_{m-1}, k_0..k_{m-1})
    Lf = np.zeros((dim, big), dtype=complex)
    Lg = np.zeros((dim, big), dtype=complex)
    for i in range(dim):
        Lf[i, i] = 1.0
        Lg[i, i] = 1.0
    for j, a in enumerate(act):
        for jp in range(m):
            Lf[a, dim + m + jp] += 0.5 * theta[j, jp]
        Lg[a, dim + j] += 1.0

    F = _term_gp(dim, fterm).subst_affine(Lf, None, big)
    G = _term_gp(dim, gterm).subst_affine(Lg, None, big)
    # -<v, A v> must contribute +i<k, y>, so each symmetric off-diagonal
    # entry is -i/2
    phase = np.zeros((big, big), dtype=complex)
    for j in range(m):
        phase[dim + j, dim + m + j] = -0.5j
        phase[dim + m + j, dim + j] = -0.5j
    # exp(+i <k, y>)
    P = GaussPoly.gaussian(big, phase)
    integrand = F * G * P
    res = integrate_out(integrand, range(dim, big))
    return res.scale((2.0 * np.pi) ** (-m))


def star(f, g, theta, active=None):
    """Moyal star product of f and g with antisymmetric matrix theta.

    theta acts on the coordinates listed in active (default: all of
    them); other coordinates are spectators.  Each pair of terms must
    have at least one factor that is either Gaussian-decaying or a
    polynomial plane wave on the active block.
    """
    if f.dim != g.dim:
        raise ParameterError("dimension mismatch in star product")
    dim = f.dim
    act = list(range(dim)) if active is None else [int(a) for a in active]
    m = len(act)
    theta = np.asarray(theta, dtype=float).reshape(m, m)
    if np.max(np.abs(theta + theta.T)) > 1e-12 * max(1.0, np.max(np.abs(theta))):
        raise ParameterError("theta must be antisymmetric")

    out = GaussPoly.zero(dim)
    f_w, f_g = f.split_wave_poly(act)
    g_w, g_g = g.split_wave_poly(act)

    for ft in f_w.terms:
        out = out + _star_wave_left(ft, g, act, theta, dim)
    for gt in g_w.terms:
        if f_g.terms:
            out = out + _star_wave_right(f_g, gt, act, theta, dim)
    for ft in f_g.terms:
        for gt in g_g.terms:
            if not _term_gp(dim, ft).is_schwartz(act) or not _term_gp(
                dim, gt
            ).is_schwartz(act):
                raise UnsupportedProductError(
                    "star product needs Gaussian decay or a plane-wave "
                    "polynomial factor on the active block"
                )
            out = out + _star_gauss_pair(ft, gt, act, theta, dim)
    return out


def from_config_terms(dim, entries):
    """Build a GaussPoly from a list of term tables as read from TOML.

    Each entry is a dict with keys coeff = [re, im], alpha = [..],
    A = [[..]] (entries real or [re, im] pairs) and b = [[re, im], ..].
    Missing keys default to zero.
    """

    def _c(val):
        if isinstance(val, (list, tuple)):
            return complex(val[0], val[1])
        return complex(val)

    terms = []
    for e in entries:
        unknown = set(e) - {"coeff", "alpha", "A", "b"}
        if unknown:
            raise ParameterError("unknown term keys: %s" % sorted(unknown))
        coeff = _c(e.get("coeff", 1.0))
        alpha = tuple(e.get("alpha", (0,) * dim))
        A = np.zeros((dim, dim), dtype=complex)
        for i, row in enumerate(e.get("A", [])):
            for j, v in enumerate(row):
                A[i, j] = _c(v)
        b = np.zeros(dim, dtype=complex)
        for i, v in enumerate(e.get("b", [])):
            b[i] = _c(v)
        terms.append((coeff, alpha, A, b))
    return GaussPoly(dim, terms)
