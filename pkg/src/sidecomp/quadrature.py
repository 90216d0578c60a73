"""Gauss-Legendre rules for integrals against Dirichlet(1/2) weights.

The Jeffreys weight on a probability simplex has inverse square-root
singularities on every face. Writing each stick-breaking coordinate as
``u = sin(phi)**2`` absorbs them exactly, since
``u**-0.5 * (1 - u)**-0.5 du = 2 dphi``, so a plain Gauss-Legendre rule in
``phi`` converges quickly.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def _leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def arcsine_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``p`` in (0, 1) and weights for ``int f(p) Beta(p; 1/2, 1/2) dp``.

    The weights sum to one.
    """
    x, w = _leggauss(order)
    phi = (x + 1.0) * (math.pi / 4.0)
    p = np.sin(phi) ** 2
    # Beta(1/2,1/2) dp = (2/pi) dphi and dphi = (pi/4) dx
    return p, w * 0.5


def integrate_jeffreys_binary(func, tol: float = 1e-8, start_order: int = 32,
                              max_order: int = 4096) -> tuple[float, float]:
    """Integrate ``func(p)`` against the arcsine density on (0, 1).

    The order doubles until consecutive estimates agree within ``tol``.
    ``func`` receives a 1-D array of nodes and must return an array of the
    same shape. Returns ``(value, error_estimate)``.
    """
    order = start_order
    p, w = arcsine_rule(order)
    prev = float(np.dot(w, func(p)))
    while True:
        order *= 2
        p, w = arcsine_rule(order)
        cur = float(np.dot(w, func(p)))
        err = abs(cur - prev)
        if err < tol or order >= max_order:
            return cur, err
        prev = cur


def simplex_inverse_sqrt_integral(k: int, order: int = 48) -> float:
    """Numerically integrate ``prod_i theta_i**-0.5`` over the (k-1)-simplex.

    Uses stick breaking ``theta_i = u_i * prod_{j<i} (1 - u_j)`` with each
    ``u_i = sin(phi_i)**2`` and a tensor Gauss-Legendre rule in ``phi``.
    Cost grows as ``order**(k-1)``; intended for k <= 5.
    """
    if k < 2:
        raise ValueError("alphabet size must be at least 2")
    x, w = _leggauss(order)
    phi = (x + 1.0) * (math.pi / 4.0)
    u = np.sin(phi) ** 2
    # (pi/4) from dphi/dx, 2 sin cos from du/dphi
    wu = w * (math.pi / 4.0) * 2.0 * np.sin(phi) * np.cos(phi)
    dims = k - 1
    grids = np.meshgrid(*([u] * dims), indexing="ij")
    wgrids = np.meshgrid(*([wu] * dims), indexing="ij")
    rest = np.ones_like(grids[0])
    log_integrand = np.zeros_like(grids[0])
    log_jac = np.zeros_like(grids[0])
    weight = np.ones_like(grids[0])
    for i in range(dims):
        log_integrand -= 0.5 * np.log(grids[i] * rest)
        log_jac += np.log(rest)
        rest = rest * (1.0 - grids[i])
        weight = weight * wgrids[i]
    log_integrand -= 0.5 * np.log(rest)
    return float(np.sum(weight * np.exp(log_integrand + log_jac)))
