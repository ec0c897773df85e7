"""Truncated Laurent series with pluggable coefficient rings.

A LaurentSeries stores finitely many coefficients indexed by integer
powers together with an exclusive truncation bound `upto`: coefficients
for all powers below `upto` are exact, everything above is unknown.
Coefficients may be ordinary complex numbers or ExactCoeff, an exact
rational ring over two symbols (a squared mass and a frequency scale),
used when series identities have to hold with zero tolerance.
"""

import math
from fractions import Fraction

import numpy as np

from .errors import DomainError, ParameterError


class ExactCoeff:
    """Exact coefficient sum_k q_k * m2^i_k * w^j_k with rational q_k.

    Keys are (i, j) integer pairs; j may be negative (the frequency
    symbol is invertible).
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for key, q in terms.items():
                q = Fraction(q)
                if q != 0:
                    self.terms[(int(key[0]), int(key[1]))] = q

    @staticmethod
    def const(q):
        return ExactCoeff({(0, 0): Fraction(q)})

    @staticmethod
    def m2():
        return ExactCoeff({(1, 0): 1})

    @staticmethod
    def w(power=1):
        return ExactCoeff({(0, power): 1})

    def __add__(self, other):
        other = _coerce_exact(other)
        out = dict(self.terms)
        for k, q in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + q
        return ExactCoeff(out)

    __radd__ = __add__

    def __neg__(self):
        return ExactCoeff({k: -q for k, q in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce_exact(other))

    def __rsub__(self, other):
        return _coerce_exact(other) + (-self)

    def __mul__(self, other):
        other = _coerce_exact(other)
        out = {}
        for (i1, j1), q1 in self.terms.items():
            for (i2, j2), q2 in other.terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, Fraction(0)) + q1 * q2
        return ExactCoeff(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * ExactCoeff.const(Fraction(1, 1) / Fraction(other))
        return self * _coerce_exact(other).inverse()

    def inverse(self):
        if len(self.terms) != 1:
            raise DomainError("only monomial exact coefficients invert")
        ((i, j), q), = self.terms.items()
        return ExactCoeff({(-i, -j): Fraction(1) / q})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self.is_zero()
        if not isinstance(other, ExactCoeff):
            other = _coerce_exact(other)
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def to_number(self, m2, w):
        return sum(float(q) * m2**i * w**j for (i, j), q in self.terms.items())

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for (i, j), q in sorted(self.terms.items()):
            s = str(q)
            if i:
                s += "*m2^%d" % i
            if j:
                s += "*w^%d" % j
            bits.append(s)
        return " + ".join(bits)


def _coerce_exact(v):
    if isinstance(v, ExactCoeff):
        return v
    if isinstance(v, (int, Fraction)):
        return ExactCoeff.const(v)
    raise ParameterError("cannot coerce %r into an exact coefficient" % (v,))


def _is_zero_coeff(c):
    if isinstance(c, ExactCoeff):
        return c.is_zero()
    return c == 0


def _invert_coeff(c):
    if isinstance(c, ExactCoeff):
        return c.inverse()
    return 1.0 / c


class LaurentSeries:
    """Finitely many Laurent coefficients, truncated below `upto`."""

    __slots__ = ("coeffs", "upto", "var")

    def __init__(self, coeffs, upto, var="t"):
        self.upto = int(upto)
        self.var = var
        self.coeffs = {
            int(p): c
            for p, c in coeffs.items()
            if int(p) < self.upto and not _is_zero_coeff(c)
        }

    def coefficient(self, p):
        p = int(p)
        if p >= self.upto:
            raise DomainError("coefficient %d beyond truncation %d" % (p, self.upto))
        if p in self.coeffs:
            return self.coeffs[p]
        return ExactCoeff() if self._exact() else 0.0j

    def _exact(self):
        return any(isinstance(c, ExactCoeff) for c in self.coeffs.values())

    def min_power(self):
        return min(self.coeffs) if self.coeffs else self.upto

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries({0: other}, self.upto, self.var)
        upto = min(self.upto, other.upto)
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, _zero_like(c)) + c
        return LaurentSeries(out, upto, self.var)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries({p: -c for p, c in self.coeffs.items()}, self.upto, self.var)

    def __sub__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries({0: other}, self.upto, self.var)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            return LaurentSeries(
                {p: c * other for p, c in self.coeffs.items()}, self.upto, self.var
            )
        upto = min(self.upto + other.min_power(), other.upto + self.min_power())
        out = {}
        for p1, c1 in self.coeffs.items():
            for p2, c2 in other.coeffs.items():
                p = p1 + p2
                if p < upto:
                    out[p] = out.get(p, _zero_like(c1)) + c1 * c2
        return LaurentSeries(out, upto, self.var)

    __rmul__ = __mul__

    def inverse(self):
        m = self.min_power()
        if m not in self.coeffs:
            raise DomainError("cannot invert a series with no known terms")
        lead = self.coeffs[m]
        inv_lead = _invert_coeff(lead)
        # g = series/lead/t^m = 1 + h, invert by geometric expansion
        depth = self.upto - m
        h = {p - m: c * inv_lead for p, c in self.coeffs.items() if p != m}
        acc = {0: _one_like(lead)}
        powh = {0: _one_like(lead)}
        for _ in range(depth - 1):
            powh = _trunc_mul(powh, {p: -c for p, c in h.items()}, depth)
            if not powh:
                break
            for p, c in powh.items():
                acc[p] = acc.get(p, _zero_like(lead)) + c
        out = {p - m: c * inv_lead for p, c in acc.items()}
        return LaurentSeries(out, depth - m, self.var)

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            return self.inverse() ** (-k)
        result = LaurentSeries({0: _one_like_any(self)}, self.upto - 0, self.var)
        base = self
        # keep truncation honest under repeated multiplication
        for _ in range(k):
            result = result * base
        return result

    def truncate(self, upto):
        return LaurentSeries(self.coeffs, min(self.upto, upto), self.var)

    def evaluate(self, x, m2=None, w=None):
        total = 0.0
        for p, c in sorted(self.coeffs.items()):
            if isinstance(c, ExactCoeff):
                c = c.to_number(m2, w)
            total = total + c * x**p
        return total

    def __repr__(self):
        bits = [
            "(%r) %s^%d" % (c, self.var, p) for p, c in sorted(self.coeffs.items())
        ]
        return " + ".join(bits) + " + O(%s^%d)" % (self.var, self.upto)


def _zero_like(c):
    return ExactCoeff() if isinstance(c, ExactCoeff) else 0.0j


def _one_like(c):
    return ExactCoeff.const(1) if isinstance(c, ExactCoeff) else 1.0 + 0.0j


def _one_like_any(s):
    return ExactCoeff.const(1) if s._exact() else 1.0 + 0.0j


def _trunc_mul(p, q, depth):
    out = {}
    for a, ca in p.items():
        for b, cb in q.items():
            if a + b < depth:
                out[a + b] = out.get(a + b, _zero_like(ca)) + ca * cb
    return {k: v for k, v in out.items() if not _is_zero_coeff(v)}


# ----------------------------------------------------------------------
# elementary series in t


def exp_series(c, upto, var="t"):
    """exp(c t) up to (but excluding) power `upto`."""
    one = _one_like(c) if isinstance(c, ExactCoeff) else 1.0 + 0.0j
    out = {0: one}
    term = one
    for k in range(1, upto):
        term = term * c / k if isinstance(c, ExactCoeff) else term * c / k
        out[k] = term
    return LaurentSeries(out, upto, var)


def sinh_series(c, upto, var="t"):
    out = {}
    for k in range(1, upto, 2):
        fact = math.factorial(k)
        if isinstance(c, ExactCoeff):
            out[k] = _pow_coeff(c, k) / fact
        else:
            out[k] = c**k / fact
    return LaurentSeries(out, upto, var)


def cosh_series(c, upto, var="t"):
    out = {}
    for k in range(0, upto, 2):
        fact = math.factorial(k)
        if isinstance(c, ExactCoeff):
            out[k] = _pow_coeff(c, k) / fact
        else:
            out[k] = c**k / fact
    return LaurentSeries(out, upto, var)


def coth_series(c, upto, var="t"):
    """coth(c t); Laurent expansion starting at t^{-1}."""
    s = sinh_series(c, upto + 2, var)
    return cosh_series(c, upto + 2, var) * s.inverse()


def _pow_coeff(c, k):
    out = ExactCoeff.const(1)
    for _ in range(k):
        out = out * c
    return out


# ----------------------------------------------------------------------
# numeric extraction of Laurent coefficients from a sampled generator


def fit_laurent(fn, powers, t_lo=0.05, t_hi=0.6, n=40):
    """Least-squares fit of fn(t) = sum_p c_p t^p on a log grid.

    Serves as the independent oracle for symbolic expansions; accuracy
    is limited by the first omitted power, so keep the window small.
    """
    powers = sorted(int(p) for p in powers)
    ts = np.geomspace(t_lo, t_hi, n)
    V = np.stack([ts**p for p in powers], axis=1)
    y = np.array([fn(t) for t in ts], dtype=complex)
    # weight against the dominant divergent power so every coefficient
    # gets comparable leverage
    wts = ts ** (-powers[0])
    sol, *_ = np.linalg.lstsq(V * wts[:, None], y * wts, rcond=None)
    return dict(zip(powers, sol))
