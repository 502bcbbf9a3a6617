"""Brute-force references that share no code with the engines under test.

The twirl oracle averages ``(U^dagger)^{x2} X U^{x2}`` over Haar ``U`` on one
edge with the second-moment Weingarten formula, acting on explicit
``d^(2n)``-dimensional matrices. Feasible for ``d^(2n) <~ 1000``.
"""

import itertools

import numpy as np
from scipy import integrate


def swap_operator(n, d, sites):
    """Matrix of the operator exchanging the two copies on ``sites``."""
    dim = d**n
    T = np.zeros((dim * dim, dim * dim))
    for i1, i2 in itertools.product(range(dim), repeat=2):
        a = list(np.unravel_index(i1, (d,) * n))
        b = list(np.unravel_index(i2, (d,) * n))
        for s in sites:
            a[s], b[s] = b[s], a[s]
        j1 = np.ravel_multi_index(a, (d,) * n)
        j2 = np.ravel_multi_index(b, (d,) * n)
        T[j1 * dim + j2, i1 * dim + i2] = 1.0
    return T


def _factor_perm(n, edge):
    """Order of the 2n tensor factors putting both copies of the edge first."""
    a, b = edge
    first = [a, b, n + a, n + b]
    return first + [f for f in range(2 * n) if f not in first]


def twirl_edge(X, n, d, edge):
    D = d * d
    perm = _factor_perm(n, edge)
    shape = (d,) * (2 * n)
    Xt = X.reshape(shape + shape).transpose(perm + [2 * n + p for p in perm])
    R = d ** (2 * n - 4)
    Xt = Xt.reshape(D * D, R, D * D, R)
    eye = np.eye(D * D)
    swap = np.zeros((D * D, D * D))
    for i, j in itertools.product(range(D), repeat=2):
        swap[j * D + i, i * D + j] = 1.0
    perms = [eye, swap]
    wg = np.array([[1.0, -1.0 / D], [-1.0 / D, 1.0]]) / (D * D - 1)
    partial = [np.einsum("ij,jrik->rk", P, Xt) for P in perms]
    out = np.zeros_like(Xt)
    for p, P in enumerate(perms):
        for s in range(2):
            out += wg[p, s] * np.einsum("ik,rl->irkl", P, partial[s])
    inv = np.argsort(perm)
    out = out.reshape(shape + shape).transpose(list(inv) + [2 * n + p for p in inv])
    return out.reshape(d ** (2 * n), d ** (2 * n))


def product_expectation(X):
    """``<0...0|^{x2} X |0...0>^{x2}``."""
    return float(np.real(X[0, 0]))


def oracle_chain_purity(n, d, A_sites, time_ordering, k):
    X = swap_operator(n, d, A_sites)
    for _ in range(k):
        for e in reversed(time_ordering):
            X = twirl_edge(X, n, d, e)
    return product_expectation(X)


def oracle_mixture_purity(n, d, A_sites, edges, k):
    X = swap_operator(n, d, A_sites)
    for _ in range(k):
        X = sum(twirl_edge(X, n, d, e) for e in edges) / len(edges)
    return product_expectation(X)


def haar_qubit_pair_moments():
    """Mean and variance of one-qubit purity for a Haar state on two qubits.

    The Schmidt coefficient gap ``x`` has density ``3 x^2 / 2`` on [-1, 1]
    and the purity is ``(1 + x^2) / 2``.
    """
    dens = lambda x: 1.5 * x * x
    m1 = integrate.quad(lambda x: dens(x) * (1 + x * x) / 2, -1, 1)[0]
    m2 = integrate.quad(lambda x: dens(x) * ((1 + x * x) / 2) ** 2, -1, 1)[0]
    return m1, m2 - m1 * m1
