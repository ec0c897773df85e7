"""Star-product engine: Gaussian calculus, integration, the product
identities the rest of the package leans on."""

import math

import numpy as np
import pytest

from moyalosc import gausspoly as gp
from moyalosc import model
from moyalosc.errors import ParameterError
from conftest import random_schwartz


def test_gaussian_integral_closed_form(rng):
    # int e^{-<x,Ax>} = pi^{d/2} / sqrt(det A), complex symmetric A with
    # positive definite real part
    for dim in (2, 4):
        for _ in range(6):
            m = rng.standard_normal((dim, dim))
            A = np.eye(dim) + 0.15 * (m + m.T) + 0.1j * np.eye(dim)
            f = gp.GaussPoly.gaussian(dim, A)
            got = gp.integrate(f)
            ref = math.pi ** (dim / 2.0) / np.sqrt(np.linalg.det(A))
            assert abs(got - ref) <= 1e-12 * abs(ref)


def test_shifted_gaussian_integral(rng):
    # the linear term <b,x> completes the square:
    # int e^{-<x,Ax> + <b,x>} = pi^{d/2}/sqrt(det A) e^{<b, A^{-1} b>/4}
    dim = 2
    for _ in range(5):
        f = random_schwartz(dim, rng)
        coeff, alpha, A, b = f.terms[0]
        got = gp.integrate(f)
        ref = (
            coeff
            * math.pi ** (dim / 2.0)
            / np.sqrt(np.linalg.det(A))
            * np.exp(0.25 * (b @ np.linalg.solve(A, b)))
        )
        assert abs(got - ref) <= 1e-12 * max(abs(ref), 1.0)


def test_monomial_moments(rng):
    # <x_i x_j> of a centered Gaussian is (1/2) (A^{-1})_{ij}
    dim = 2
    m = rng.standard_normal((dim, dim))
    A = np.eye(dim) + 0.2 * (m + m.T)
    base = gp.GaussPoly.gaussian(dim, A)
    norm = gp.integrate(base)
    Ainv = np.linalg.inv(A)
    for i in range(dim):
        for j in range(dim):
            alpha = [0] * dim
            alpha[i] += 1
            alpha[j] += 1
            mono = gp.GaussPoly.monomial(dim, tuple(alpha))
            got = gp.integrate(base * mono) / norm
            assert abs(got - 0.5 * Ainv[i, j]) < 1e-12


def test_deriv_matches_finite_difference(rng, sample_points):
    f = random_schwartz(2, rng)
    h = 1e-6
    for i in range(2):
        df = f.deriv(i)
        for x in sample_points:
            e = np.zeros(2)
            e[i] = h
            fd = (f(x + e) - f(x - e)) / (2 * h)
            assert abs(df(x) - fd) < 1e-6


def test_star_pointwise_against_quadrature(params_d2, sample_points):
    # oscillatory-integral product vs the twisted-convolution series on
    # plane waves, where the product is exact
    th = params_d2.theta
    k = np.array([0.3, -0.7])
    l = np.array([0.5, 0.2])
    u = gp.GaussPoly.plane_wave(2, k)
    v = gp.GaussPoly.plane_wave(2, l)
    w = gp.star(u, v, th)
    for x in sample_points:
        ref = np.exp(-0.5j * (k @ th @ l)) * np.exp(1j * (k + l) @ x)
        assert abs(w(x) - ref) < 1e-12


def test_star_traciality_and_cyclicity(params_d2, rng):
    th = params_d2.theta
    for _ in range(10):
        f = random_schwartz(2, rng)
        g = random_schwartz(2, rng)
        ifg = gp.integrate(gp.star(f, g, th))
        igf = gp.integrate(gp.star(g, f, th))
        iplain = gp.integrate(f * g)
        scale = max(abs(ifg), 1.0)
        assert abs(ifg - igf) < 1e-10 * scale
        assert abs(ifg - iplain) < 1e-10 * scale


def test_star_associativity(params_d2, rng, sample_points):
    th = params_d2.theta
    for _ in range(10):
        f = random_schwartz(2, rng)
        g = random_schwartz(2, rng)
        h = random_schwartz(2, rng)
        lhs = gp.star(gp.star(f, g, th), h, th)
        rhs = gp.star(f, gp.star(g, h, th), th)
        for x in sample_points:
            assert abs(lhs(x) - rhs(x)) < 1e-9


def test_star_leibniz(params_d2, rng, sample_points):
    th = params_d2.theta
    f = random_schwartz(2, rng)
    g = random_schwartz(2, rng)
    for i in range(2):
        lhs = gp.star(f, g, th).deriv(i)
        rhs = gp.star(f.deriv(i), g, th) + gp.star(f, g.deriv(i), th)
        for x in sample_points:
            assert abs(lhs(x) - rhs(x)) < 1e-10


def test_gaussian_star_gaussian_closed_form(rng, sample_points):
    # for positive definite A commuting with Theta:
    # g_A * g_A = det(1 + Th^t A^2 Th)^{-1/2} g_B, B = 2A/(1 + Th^t A^2 Th)
    for d, blocks in ((2, 1), (4, 2)):
        p = model.build_params(d, 1.0, tuple([2.0] * blocks))
        th = p.theta
        for _ in range(5):
            avals = 0.3 + rng.random(blocks)
            A = np.diag(np.repeat(avals, 2))
            gA = gp.GaussPoly.gaussian(d, A)
            got = gp.star(gA, gA, th)
            m = np.eye(d) + th.T @ (A @ A) @ th
            ref = gp.GaussPoly.gaussian(
                d,
                2.0 * A @ np.linalg.inv(m),
                coeff=1.0 / np.sqrt(np.linalg.det(m)),
            )
            for x2 in sample_points:
                x = np.concatenate([x2] * (d // 2))
                assert abs(got(x) - ref(x)) < 1e-10


def test_star_conjugate_is_antihomomorphism(params_d2, rng, sample_points):
    # conj(f * g) = conj(g) * conj(f)
    th = params_d2.theta
    f = random_schwartz(2, rng)
    g = random_schwartz(2, rng)
    lhs = gp.star(f, g, th).conj()
    rhs = gp.star(g.conj(), f.conj(), th)
    for x in sample_points:
        assert abs(lhs(x) - rhs(x)) < 1e-12


def test_integrate_out_marginal(rng):
    # integrating out one variable of a 2d Gaussian leaves the Schur
    # complement Gaussian in the other
    m = rng.standard_normal((2, 2))
    A = np.eye(2) + 0.2 * (m + m.T)
    f = gp.GaussPoly.gaussian(2, A)
    marg = gp.integrate_out(f, [1])
    a_eff = A[0, 0] - A[0, 1] * A[1, 0] / A[1, 1]
    ref = math.sqrt(math.pi / A[1, 1])
    for x0 in (0.0, 0.7, -1.3):
        want = ref * math.exp(-a_eff * x0 * x0)
        assert abs(marg(np.array([x0])) - want) < 1e-12


def test_split_wave_poly():
    f = (
        gp.GaussPoly.gaussian(2, np.eye(2))
        + gp.GaussPoly.plane_wave(2, [1.0, 0.0])
        + gp.GaussPoly.monomial(2, (1, 0), 2.0)
    )
    waves, rest = f.split_wave_poly()
    assert len(rest.terms) == 1
    assert len(waves.terms) == 2
    assert not f.is_schwartz()
    assert rest.is_schwartz()


def test_from_config_terms_roundtrip():
    entries = [
        {
            "coeff": [0.5, -0.25],
            "alpha": [1, 0],
            "A": [[1.0, 0.0], [0.0, [2.0, 0.5]]],
            "b": [[0.1, 0.0], [0.0, 0.2]],
        }
    ]
    f = gp.from_config_terms(2, entries)
    coeff, alpha, A, b = f.terms[0]
    assert coeff == 0.5 - 0.25j
    assert alpha == (1, 0)
    assert A[1, 1] == 2.0 + 0.5j
    assert b[1] == 0.2j


def test_from_config_terms_rejects_unknown_keys():
    with pytest.raises(ParameterError):
        gp.from_config_terms(2, [{"coeff": 1.0, "spooky": 3}])


def test_subst_affine_matches_pointwise(rng, sample_points):
    f = random_schwartz(2, rng)
    L = rng.standard_normal((2, 2))
    c = rng.standard_normal(2)
    g = f.subst_affine(L, c)
    for x in sample_points:
        assert abs(g(x) - f(L @ x + c)) < 1e-12
