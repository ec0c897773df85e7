"""Finite-dimensional Clifford factor built on d fermionic modes.

The 2^d-dimensional Fock space of d fermion modes carries annihilators
b_mu (Jordan-Wigner matrices), the 2d generators

    Gamma^mu     = i(b_mu - b*_mu) - (omega/2) Theta_{mu nu} (b_nu + b*_nu)
    Gamma^{mu+d} = (b_mu + b*_mu) - (omega/2) Theta_{mu nu} (i b_nu - i b*_nu)

with {Gamma^a, Gamma^b} = 2 (g^{-1})^{ab} in each d-block and zero across
blocks, the number-parity operator Sigma = sum_mu (2 N_mu - 1), two volume
elements gamma1, gamma2 (antisymmetrized products over each block) and an
antiunitary conjugation built from particle-hole exchange.
"""

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .errors import DomainError, ParameterError

_B_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]])  # annihilator on (|0>, |1>)
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]])


def _jw_chain(d, mu, local):
    mats = [_SZ] * mu + [local] + [np.eye(2)] * (d - mu - 1)
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


@dataclass
class CliffordRep:
    params: object
    dim: int
    b: list = field(repr=False)
    bdag: list = field(repr=False)
    gamma: list = field(repr=False)  # 2d generators
    sigma: np.ndarray = field(repr=False)
    gamma1: np.ndarray = field(repr=False)
    gamma2: np.ndarray = field(repr=False)
    grading: np.ndarray = field(repr=False)
    grading_parity_sign: int = 0  # grading == sign * (-1)^{N_f}
    conj_matrix: np.ndarray = field(default=None, repr=False)
    j_squared_sign: int = 0


def _volume_element(gammas, metric_det_sqrt, d):
    """(sqrt(det g)/d!) i^{d(d-1)/2} sum_sigma eps(sigma) Gamma^{s1}...Gamma^{sd}."""
    n = gammas[0].shape[0]
    acc = np.zeros((n, n), dtype=complex)
    for perm in permutations(range(d)):
        sign = _perm_sign(perm)
        M = np.eye(n, dtype=complex)
        for p in perm:
            M = M @ gammas[p]
        acc += sign * M
    pref = metric_det_sqrt / math.factorial(d) * (1j) ** ((d * (d - 1)) // 2)
    return pref * acc


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, clen = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def build_clifford(params):
    """Assemble the Clifford factor for the given model parameters."""
    d = params.d
    omega = params.omega
    theta = params.theta
    n = 2**d

    b = [_jw_chain(d, mu, _B_LOWER) for mu in range(d)]
    bdag = [m.conj().T for m in b]

    gamma = []
    for mu in range(d):
        G = 1j * (b[mu] - bdag[mu])
        for nu in range(d):
            if theta[mu, nu] != 0.0:
                G = G - 0.5 * omega * theta[mu, nu] * (b[nu] + bdag[nu])
        gamma.append(G)
    for mu in range(d):
        G = (b[mu] + bdag[mu]).astype(complex)
        for nu in range(d):
            if theta[mu, nu] != 0.0:
                G = G - 0.5 * omega * theta[mu, nu] * 1j * (b[nu] - bdag[nu])
        gamma.append(G)

    sigma = np.zeros((n, n), dtype=complex)
    for mu in range(d):
        sigma += 2.0 * (bdag[mu] @ b[mu]) - np.eye(n)

    sdg = params.sqrt_det_metric
    gamma1 = _volume_element(gamma[:d], sdg, d)
    gamma2 = _volume_element(gamma[d:], sdg, d)
    grading = (-1j) ** d * (gamma1 @ gamma2)

    # compare the grading against +-(parity of the fermion number)
    parity = np.diag([(-1.0) ** bin(s).count("1") for s in range(n)])
    sign = 0
    if np.allclose(grading, parity, atol=1e-10):
        sign = 1
    elif np.allclose(grading, -parity, atol=1e-10):
        sign = -1

    rep = CliffordRep(
        params=params,
        dim=n,
        b=b,
        bdag=bdag,
        gamma=gamma,
        sigma=sigma,
        gamma1=gamma1,
        gamma2=gamma2,
        grading=grading,
        grading_parity_sign=sign,
    )
    U, jsq = _conjugation_matrix(rep)
    rep.conj_matrix = U
    rep.j_squared_sign = jsq
    return rep


def _conjugation_matrix(rep):
    """Matrix U of the antiunitary v -> U conj(v) exchanging particles
    and holes: occupied sets map to their complements with the sign that
    comes from normal ordering."""
    d = rep.params.d
    n = rep.dim
    vac = np.zeros(n)
    vac[0] = 1.0

    # image of the filled state b*_1 ... b*_d |0>
    filled = vac.copy()
    for mu in reversed(range(d)):
        filled = rep.bdag[mu] @ filled

    U = np.zeros((n, n), dtype=complex)
    for s in range(n):
        occ = [mu for mu in range(d) if (s >> (d - 1 - mu)) & 1]
        # e_S = b*_{mu1} ... b*_{muk} |0>, increasing mu applied from the right
        e_s = vac.copy()
        for mu in reversed(occ):
            e_s = rep.bdag[mu] @ e_s
        eta = e_s[s]
        target = filled.copy()
        for mu in reversed(occ):
            target = rep.b[mu] @ target
        U[:, s] = eta * target

    UUc = U @ np.conj(U)
    if np.allclose(UUc, np.eye(n), atol=1e-10):
        jsq = 1
    elif np.allclose(UUc, -np.eye(n), atol=1e-10):
        jsq = -1
    else:
        raise DomainError("conjugation does not square to a sign")
    return U, jsq


def hodge_real_structure(rep):
    """Return (U, sign) with J v = U conj(v) and J^2 = sign."""
    return rep.conj_matrix, rep.j_squared_sign


def trace_exp_sigma(params, t, sign=-1):
    """tr exp(sign * t * omega * Sigma) = 2^d cosh(omega t)^d."""
    if sign not in (-1, 1):
        raise ParameterError("sign must be +1 or -1")
    t = float(t)
    return float(2.0**params.d * math.cosh(params.omega * t) ** params.d)


def clifford_moment(mats, params, t, rep=None, sign=-1):
    """tr(M_1 ... M_k exp(sign t omega Sigma)) for matrices on the
    Clifford factor."""
    if rep is None:
        rep = build_clifford(params)
    weight = _exp_sigma(rep, params.omega * t * sign)
    M = weight
    for m in reversed(mats):
        M = m @ M
    return complex(np.trace(M))


def _exp_sigma(rep, x):
    # Sigma is diagonal in the occupation basis
    diag = np.real(np.diag(rep.sigma))
    return np.diag(np.exp(x * diag)).astype(complex)
