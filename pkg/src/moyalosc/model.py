"""Model data: deformation matrix, effective metric, oscillator spectrum.

The configuration space is R^d with even d.  The deformation matrix Theta
is block diagonal with 2x2 antisymmetric blocks theta_j * [[0,1],[-1,0]],
all theta_j nonzero, so Theta is invertible.  The frequency omega > 0 sets
the confining potential; the effective metric is

    g = (Id - omega^2 Theta^2 / 4)^{-1},

which commutes with Theta and is diagonal here, constant 1/(1 + omega^2
theta_j^2 / 4) on the j-th block.
"""

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import DomainError, ParameterError


@dataclass(frozen=True)
class ModelParams:
    d: int
    omega: float
    theta_blocks: tuple
    theta: np.ndarray = field(repr=False)
    theta_inv: np.ndarray = field(repr=False)
    metric: np.ndarray = field(repr=False)
    metric_inv: np.ndarray = field(repr=False)
    sqrt_det_metric: float


def build_params(d, omega, theta_blocks):
    """Validate and assemble model parameters.

    theta_blocks lists the d/2 block coefficients; a single number is
    broadcast to all blocks.
    """
    d = int(d)
    if d <= 0 or d % 2 != 0:
        raise ParameterError("dimension must be a positive even integer")
    omega = float(omega)
    if not omega > 0:
        raise ParameterError("omega must be positive")
    if isinstance(theta_blocks, (int, float)):
        theta_blocks = [theta_blocks] * (d // 2)
    theta_blocks = tuple(float(t) for t in theta_blocks)
    if len(theta_blocks) != d // 2:
        raise ParameterError("need exactly d/2 deformation blocks")
    if any(t == 0.0 for t in theta_blocks):
        raise ParameterError("deformation blocks must be nonzero")

    theta = np.zeros((d, d))
    for j, tj in enumerate(theta_blocks):
        theta[2 * j, 2 * j + 1] = tj
        theta[2 * j + 1, 2 * j] = -tj
    metric_inv = np.eye(d) - 0.25 * omega**2 * (theta @ theta)
    metric = np.linalg.inv(metric_inv)
    return ModelParams(
        d=d,
        omega=omega,
        theta_blocks=theta_blocks,
        theta=theta,
        theta_inv=np.linalg.inv(theta),
        metric=metric,
        metric_inv=metric_inv,
        sqrt_det_metric=float(np.sqrt(np.linalg.det(metric))),
    )


def from_config(section):
    """Build parameters from a parsed [model] config table."""
    unknown = set(section) - {"d", "omega", "theta"}
    if unknown:
        raise ParameterError("unknown [model] keys: %s" % sorted(unknown))
    try:
        d = section["d"]
        omega = section["omega"]
        theta = section["theta"]
    except KeyError as k:
        raise ParameterError("missing [model] key %s" % k)
    return build_params(d, omega, theta)


@dataclass(frozen=True)
class SpectrumEntry:
    n: int
    lam: float
    mult: int


def oscillator_spectrum(params, n_max):
    """Eigenvalues of H = -Delta + omega^2 |x|^2 up to level n_max.

    Level n carries eigenvalue omega*(d + 2n) with multiplicity
    binom(n+d-1, d-1).
    """
    n_max = int(n_max)
    if n_max < 0:
        raise ParameterError("n_max must be nonnegative")
    d, omega = params.d, params.omega
    return [
        SpectrumEntry(n=n, lam=omega * (d + 2 * n), mult=math.comb(n + d - 1, d - 1))
        for n in range(n_max + 1)
    ]


def heat_trace_vacuum(params, t, precision="double"):
    """Tr exp(-t H) = (2 sinh(omega t))^{-d}, exactly summable over the
    oscillator levels."""
    t = float(t)
    if not t > 0:
        raise DomainError("heat trace needs t > 0")
    if precision == "extended":
        with mpmath.workdps(50):
            return float((2 * mpmath.sinh(params.omega * t)) ** (-params.d))
    if precision != "double":
        raise ParameterError("precision must be 'double' or 'extended'")
    return float((2.0 * math.sinh(params.omega * t)) ** (-params.d))
