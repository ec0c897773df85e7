"""Oscillator eigenbasis oracles: ladder matrices, star-multiplication
matrices, heat kernels.

Everything here is an independent cross-check for the closed forms in the
rest of the package.  Matrix elements of left/right star multiplication
are exact: they come from a coherent-state generating function

    M(s, u) = integral of A(x; s) (f * A(.; u))(x) dx
            = sum_{m,n} s^m u^n / sqrt(m! n!) <h_m, f * h_n>

evaluated inside the Gaussian-polynomial engine and Taylor-expanded, so
the only truncation anywhere is the basis cutoff itself.
"""

import math
from dataclasses import dataclass, field
from itertools import product as _iterproduct

import numpy as np

from . import gausspoly as gp
from .errors import DomainError, ParameterError

_MIN_NMAX = 4


def hermite_gausspoly(omega, n):
    """1D oscillator eigenfunction h_n as a GaussPoly (unit L2 norm)."""
    coef = np.zeros(n + 1)
    coef[n] = 1.0
    poly = np.polynomial.hermite.herm2poly(coef)  # H_n power coefficients
    norm = (omega / np.pi) ** 0.25 / math.sqrt(2.0**n * math.factorial(n))
    terms = []
    for k, c in enumerate(poly):
        if c != 0.0:
            terms.append(
                (norm * c * omega ** (0.5 * k), (k,), [[0.5 * omega]], [0.0])
            )
    return gp.GaussPoly(1, terms)


def hermite_product(params, multi_n):
    """Product eigenfunction h_{n_1} x ... x h_{n_d} on R^d."""
    d = params.d
    out = gp.GaussPoly.constant(d, 1.0)
    for mu, n in enumerate(multi_n):
        h1 = hermite_gausspoly(params.omega, n).embed(d, [mu])
        out = out * h1
    return out


@dataclass
class FockRep:
    """Dense truncated oscillator representation (d = 2), or a pair of
    2-dimensional blocks (d = 4)."""

    params: object
    n_max: int
    blocks: tuple = None  # for d = 4
    a: list = field(default=None, repr=False)
    adag: list = field(default=None, repr=False)
    h_diag: np.ndarray = field(default=None, repr=False)
    h_matrix: np.ndarray = field(default=None, repr=False)
    nabla: list = field(default=None, repr=False)
    nabla_tilde: list = field(default=None, repr=False)
    occupations: np.ndarray = field(default=None, repr=False)

    @property
    def dim(self):
        return (self.n_max + 1) ** 2

    def interior_mask(self, margin):
        """Boolean mask for states with every mode at most n_max - margin."""
        return np.all(self.occupations <= self.n_max - margin, axis=1)


def _ladder_1d(omega, n_max):
    # a h_n = sqrt(2 omega n) h_{n-1}
    N = n_max + 1
    a = np.zeros((N, N))
    for n in range(1, N):
        a[n - 1, n] = math.sqrt(2.0 * omega * n)
    return a


def build_fock(params, n_max):
    """Assemble the truncated oscillator representation."""
    n_max = int(n_max)
    if n_max < _MIN_NMAX:
        raise ParameterError("n_max must be at least %d" % _MIN_NMAX)
    if params.d == 4:
        from .model import build_params

        b1 = build_fock(build_params(2, params.omega, [params.theta_blocks[0]]), n_max)
        b2 = build_fock(build_params(2, params.omega, [params.theta_blocks[1]]), n_max)
        return FockRep(params=params, n_max=n_max, blocks=(b1, b2))
    if params.d != 2:
        raise ParameterError("dense oscillator representation supports d in {2, 4}")

    omega = params.omega
    theta = params.theta
    N = n_max + 1
    a1 = _ladder_1d(omega, n_max)
    eye = np.eye(N)
    a = [np.kron(a1, eye), np.kron(eye, a1)]
    adag = [m.T.copy() for m in a]

    occ = np.array(list(_iterproduct(range(N), repeat=2)))
    h_diag = omega * (2.0 + 2.0 * occ.sum(axis=1))
    h_matrix = sum(
        0.5 * (a[mu] @ adag[mu] + adag[mu] @ a[mu]) for mu in range(2)
    )

    theta_inv = params.theta_inv
    nabla, nabla_tilde = [], []
    for mu in range(2):
        X = [a[nu] + adag[nu] for nu in range(2)]
        nab = 0.5 * (a[mu] - adag[mu]).astype(complex)
        for nu in range(2):
            if theta[mu, nu] != 0.0:
                nab = nab + 0.25j * omega * theta[mu, nu] * X[nu]
        nabla.append(nab)
        nt = 0.25 * (a[mu] - adag[mu]).astype(complex)
        for nu in range(2):
            if theta_inv[mu, nu] != 0.0:
                nt = nt - 0.5j / omega * theta_inv[mu, nu] * X[nu]
        nabla_tilde.append(nt)

    return FockRep(
        params=params,
        n_max=n_max,
        a=a,
        adag=adag,
        h_diag=h_diag,
        h_matrix=h_matrix,
        nabla=nabla,
        nabla_tilde=nabla_tilde,
        occupations=occ,
    )


def heat_matrix(fock, t):
    """Diagonal of exp(-t H) in the eigenbasis (exact eigenvalues)."""
    if not t > 0:
        raise DomainError("heat matrix needs t > 0")
    if fock.blocks is not None:
        raise DomainError("use block heat matrices for d = 4")
    return np.diag(np.exp(-t * fock.h_diag))


def truncated_heat_trace(params, t, n_max):
    """Trace of the truncated heat semigroup, product of 1D mode sums."""
    if not t > 0:
        raise DomainError("heat trace needs t > 0")
    levels = np.arange(n_max + 1)
    s1 = np.sum(np.exp(-t * params.omega * (1.0 + 2.0 * levels)))
    return float(s1**params.d)


def heat_trace_cutoff(params, t, tol):
    """Per-mode cutoff guaranteeing a relative truncation error below tol.

    The truncated trace is (sum_{k<=N} x^k)^d times the exact prefactor,
    x = exp(-2 omega t), so the relative error is 1 - (1 - x^{N+1})^d,
    bounded by d x^{N+1}.  Solve d x^{N+1} <= tol / 2 for N.
    """
    if not t > 0:
        raise DomainError("heat trace needs t > 0")
    if not 0 < tol < 1:
        raise DomainError("tolerance must sit in (0, 1)")
    x = math.exp(-2.0 * params.omega * t)
    n = int(math.ceil(math.log(tol / (2.0 * params.d)) / math.log(x))) - 1
    return max(n, _MIN_NMAX)


# ----------------------------------------------------------------------
# star-multiplication matrices via the coherent generating function


def _coherent_pair_gaussian(omega, big, x_idx, s_idx):
    """Gaussian term for prod_mu A(x_mu; s_mu) embedded in a big space."""
    dim = big
    A = np.zeros((dim, dim), dtype=complex)
    c = math.sqrt(2.0 * omega)
    coeff = (omega / np.pi) ** (0.25 * len(x_idx))
    for x_i, s_i in zip(x_idx, s_idx):
        A[x_i, x_i] += 0.5 * omega
        A[s_i, s_i] += 0.5
        A[x_i, s_i] += -0.5 * c
        A[s_i, x_i] += -0.5 * c
    return gp.GaussPoly.gaussian(dim, A, None, coeff)


def _taylor_exp_quadratic(A, b, n_axes, N):
    """Taylor coefficients of exp(-<v,Av> + <b,v>) on a hypercube grid
    of per-axis order N (inclusive)."""
    shape = (N + 1,) * n_axes
    T = np.zeros(shape, dtype=complex)
    T[(0,) * n_axes] = 1.0

    def apply_1d(T, i, coeffs, step):
        out = np.zeros_like(T)
        for k, ck in enumerate(coeffs):
            if ck == 0.0:
                continue
            sh = k * step
            if sh > N:
                break
            src = [slice(None)] * n_axes
            dst = [slice(None)] * n_axes
            if sh:
                src[i] = slice(0, N + 1 - sh)
                dst[i] = slice(sh, N + 1)
            out[tuple(dst)] += ck * T[tuple(src)]
        return out

    def apply_2d(T, i, j, coeffs):
        out = np.zeros_like(T)
        for k, ck in enumerate(coeffs):
            if ck == 0.0:
                continue
            if k > N:
                break
            src = [slice(None)] * n_axes
            dst = [slice(None)] * n_axes
            if k:
                src[i] = slice(0, N + 1 - k)
                dst[i] = slice(k, N + 1)
                src[j] = slice(0, N + 1 - k)
                dst[j] = slice(k, N + 1)
            out[tuple(dst)] += ck * T[tuple(src)]
        return out

    for i in range(n_axes):
        if b[i] != 0.0:
            kmax = N
            cs = [b[i] ** k / math.factorial(k) for k in range(kmax + 1)]
            T = apply_1d(T, i, cs, 1)
    for i in range(n_axes):
        q = -A[i, i]
        if q != 0.0:
            kmax = N // 2
            cs = [q**k / math.factorial(k) for k in range(kmax + 1)]
            T = apply_1d(T, i, cs, 2)
    for i in range(n_axes):
        for j in range(i + 1, n_axes):
            q = -2.0 * A[i, j]
            if q != 0.0:
                cs = [q**k / math.factorial(k) for k in range(N + 1)]
                T = apply_2d(T, i, j, cs)
    return T


def _matrix_from_generating(G, N):
    """Taylor coefficients of a 4-variable generating GaussPoly, scaled
    to matrix elements."""
    T = np.zeros((N + 1,) * 4, dtype=complex)
    for coeff, alpha, A, b in G.terms:
        E = _taylor_exp_quadratic(A, b, 4, N)
        if any(alpha):
            pad = np.zeros_like(E)
            src = tuple(slice(0, N + 1 - a) for a in alpha)
            dst = tuple(slice(a, N + 1) for a in alpha)
            pad[dst] = E[src]
            E = pad
        T += coeff * E
    sqf = np.array([math.sqrt(math.factorial(n)) for n in range(N + 1)])
    T *= sqf[:, None, None, None]
    T *= sqf[None, :, None, None]
    T *= sqf[None, None, :, None]
    T *= sqf[None, None, None, :]
    return T.reshape((N + 1) ** 2, (N + 1) ** 2)


def _star_matrix(fock, f, side):
    params = fock.params
    if params.d != 2:
        raise ParameterError("dense star matrices are computed per 2D block")
    if f.dim != 2:
        raise ParameterError("function dimension mismatch")
    omega = params.omega
    N = fock.n_max
    big = 6  # (x0, x1, s0, s1, u0, u1)
    As = _coherent_pair_gaussian(omega, big, (0, 1), (2, 3))
    Au = _coherent_pair_gaussian(omega, big, (0, 1), (4, 5))
    F = f.embed(big, [0, 1])
    if side == "left":
        prod = gp.star(F, Au, params.theta, active=(0, 1))
    else:
        prod = gp.star(Au, F, params.theta, active=(0, 1))
    G = gp.integrate_out(As * prod, (0, 1))
    return _matrix_from_generating(G, N)


def lstar_matrix(fock, f):
    """Matrix of psi -> f * psi in the truncated eigenbasis.

    For d = 4, f must be a list of (block1, block2) GaussPoly pairs and
    the result is the matching list of matrix pairs.
    """
    if fock.blocks is not None:
        return [
            (lstar_matrix(fock.blocks[0], f1), lstar_matrix(fock.blocks[1], f2))
            for f1, f2 in f
        ]
    return _star_matrix(fock, f, "left")


def rstar_matrix(fock, f):
    """Matrix of psi -> psi * f in the truncated eigenbasis."""
    if fock.blocks is not None:
        return [
            (rstar_matrix(fock.blocks[0], f1), rstar_matrix(fock.blocks[1], f2))
            for f1, f2 in f
        ]
    return _star_matrix(fock, f, "right")


# ----------------------------------------------------------------------
# heat kernel


def mehler_gausspoly(params, t):
    """Kernel of exp(-t H) as a GaussPoly on (y, x) in R^{2d}."""
    if not t > 0:
        raise DomainError("heat kernel needs t > 0")
    d, omega = params.d, params.omega
    ct = 1.0 / math.tanh(omega * t)
    tt = math.tanh(omega * t)
    pref = (omega / (2.0 * np.pi * math.sinh(2.0 * omega * t))) ** (0.5 * d)
    A = np.zeros((2 * d, 2 * d))
    for mu in range(d):
        y, x = mu, d + mu
        A[y, y] += 0.25 * omega * (ct + tt)
        A[x, x] += 0.25 * omega * (ct + tt)
        A[y, x] += -0.25 * omega * (ct - tt)
        A[x, y] += -0.25 * omega * (ct - tt)
    return gp.GaussPoly.gaussian(2 * d, A, None, pref)


def mehler_kernel(params, x, y, t):
    """Closed-form heat kernel value K_t(x, y)."""
    if not t > 0:
        raise DomainError("heat kernel needs t > 0")
    x = np.asarray(x, dtype=float).reshape(params.d)
    y = np.asarray(y, dtype=float).reshape(params.d)
    omega = params.omega
    pref = (omega / (2.0 * np.pi * math.sinh(2.0 * omega * t))) ** (0.5 * params.d)
    expo = -0.25 * omega / math.tanh(omega * t) * np.sum((x - y) ** 2)
    expo += -0.25 * omega * math.tanh(omega * t) * np.sum((x + y) ** 2)
    return pref * math.exp(expo)


# ----------------------------------------------------------------------
# real structure on the oscillator factor


def real_structure_check(params, f, n_max):
    """Residuals of the antiunitary intertwining: conjugation in the
    (real) eigenbasis sends left star multiplication by f to right star
    multiplication by conj(f), and the two have equal operator norms."""
    fock = build_fock(params, n_max)
    L = lstar_matrix(fock, f)
    R = rstar_matrix(fock, f.conj())
    intertwine = float(np.max(np.abs(np.conj(L) - R)))
    norm_gap = abs(
        float(np.linalg.norm(L, 2)) - float(np.linalg.norm(rstar_matrix(fock, f), 2))
    )
    adjoint_gap = float(
        np.max(np.abs(L.conj().T - lstar_matrix(fock, f.conj())))
    )
    return {
        "intertwine": intertwine,
        "norm_gap": norm_gap,
        "adjoint_gap": adjoint_gap,
    }
