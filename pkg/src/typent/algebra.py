"""Exact ensemble averages on the algebra of subset swap operators.

A ``PermPolynomial`` is a real combination ``sum_S c_S T_S`` of swap
operators, keyed by subset bit mask. Haar-averaging a two-qudit gate on edge
``e`` (Heisenberg picture) sends ``T_S`` to ``N_d (T_{S\\e} + T_{S|e})`` when
``e`` straddles ``S`` and leaves it alone otherwise. Every ``T_S`` pairs to 1
against a product state, so the mean purity is the coefficient sum.

Orderings passed to the chain superoperators are *time* orderings: the
first edge is the first gate to hit the state. Because the purity is read
off in the Heisenberg picture, the projectors are applied to the polynomial
in the reverse sequence.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .closed_forms import nd_constant
from .graph import (
    Edge,
    EdgeDistribution,
    QuditGraph,
    interval_mask,
    straddles,
)

DEFAULT_PRUNE_EPS = 1e-15
MAX_AVERAGED_EDGES = 6


class BasisNotClosedError(ValueError):
    def __init__(self, escaping: int, source: int):
        super().__init__(
            f"subset {escaping:#x} produced from basis element {source:#x} is not in the basis"
        )
        self.escaping = escaping
        self.source = source


class SpectralError(RuntimeError):
    pass


@dataclass(frozen=True)
class PermPolynomial:
    n: int
    terms: Mapping[int, float]
    discarded: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "terms", MappingProxyType(dict(self.terms)))

    @classmethod
    def single(cls, mask: int, n: int, coeff: float = 1.0) -> "PermPolynomial":
        return cls(n, {mask: coeff})

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: "PermPolynomial") -> "PermPolynomial":
        if other.n != self.n:
            raise ValueError("vertex counts differ")
        out = dict(self.terms)
        for s, c in other.terms.items():
            out[s] = out.get(s, 0.0) + c
        return PermPolynomial(self.n, out, self.discarded + other.discarded)

    def scale(self, a: float) -> "PermPolynomial":
        return PermPolynomial(self.n, {s: a * c for s, c in self.terms.items()}, a * self.discarded)

    def dumps(self) -> str:
        """One ``mask-hex coefficient`` line per term, sorted by mask."""
        return "".join(f"{s:x} {c!r}\n" for s, c in sorted(self.terms.items()))

    @classmethod
    def loads(cls, text: str, n: int) -> "PermPolynomial":
        terms: dict[int, float] = {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            mask, coeff = line.split()
            s = int(mask, 16)
            terms[s] = terms.get(s, 0.0) + float(coeff)
        return cls(n, terms)


def purity_of(p: PermPolynomial) -> float:
    return math.fsum(p.terms.values())


def apply_edge_projector(p: PermPolynomial, e: Edge, d: int) -> PermPolynomial:
    nd = nd_constant(d)
    em = (1 << e[0]) | (1 << e[1])
    out: dict[int, float] = {}
    for s, c in p.terms.items():
        if straddles(em, s):
            w = c * nd
            lo, hi = s & ~em, s | em
            out[lo] = out.get(lo, 0.0) + w
            out[hi] = out.get(hi, 0.0) + w
        else:
            out[s] = out.get(s, 0.0) + c
    return PermPolynomial(p.n, out, p.discarded)


def apply_mixture(p: PermPolynomial, dist: EdgeDistribution, d: int) -> PermPolynomial:
    nd = nd_constant(d)
    out: dict[int, float] = {}
    for e, pe in zip(dist.edges, dist.probs):
        if pe == 0.0:
            continue
        em = (1 << e[0]) | (1 << e[1])
        for s, c in p.terms.items():
            if straddles(em, s):
                w = pe * c * nd
                lo, hi = s & ~em, s | em
                out[lo] = out.get(lo, 0.0) + w
                out[hi] = out.get(hi, 0.0) + w
            else:
                out[s] = out.get(s, 0.0) + pe * c
    return PermPolynomial(p.n, out, p.discarded)


def check_ordering(g: QuditGraph, ordering: Sequence[Edge]) -> tuple[Edge, ...]:
    canon = tuple((min(a, b), max(a, b)) for a, b in ordering)
    if len(canon) != len(g.edges) or set(canon) != set(g.edges):
        raise ValueError("ordering is not a permutation of the graph's edges")
    return canon


def apply_ordered_chain(p: PermPolynomial, ordering: Sequence[Edge], g: QuditGraph) -> PermPolynomial:
    """Average over one sweep of Haar gates applied to the state in ``ordering``."""
    ordering = check_ordering(g, ordering)
    for e in reversed(ordering):
        p = apply_edge_projector(p, e, g.d)
    return p


def _prefix_length(g: QuditGraph, A: int) -> int:
    L_A = A.bit_length()
    if A != interval_mask(0, L_A) or not 1 <= L_A < g.n:
        raise ValueError(f"subset {A:#x} is not a proper prefix interval of the chain")
    return L_A


def least_entangling_ordering(g: QuditGraph, A: int) -> tuple[Edge, ...]:
    """Boundary gate first, then the bulk gates of each half moving outward."""
    if not g.is_chain():
        raise ValueError("least-entangling ordering is defined for chain graphs only")
    L_A = _prefix_length(g, A)
    boundary = (L_A - 1, L_A)
    left = [(i - 1, i) for i in range(L_A - 1, 0, -1)]
    right = [(i, i + 1) for i in range(L_A, g.n - 1)]
    return (boundary, *left, *right)


def most_entangling_ordering(g: QuditGraph, A: int) -> tuple[Edge, ...]:
    return tuple(reversed(least_entangling_ordering(g, A)))


# superoperator specifications


@dataclass(frozen=True)
class SingleEdge:
    graph: QuditGraph
    edge: Edge

    def __post_init__(self):
        if not self.graph.has_edge(self.edge):
            raise ValueError(f"{self.edge} is not an edge of the graph")

    def apply(self, p, step=0):
        return apply_edge_projector(p, self.edge, self.graph.d)


@dataclass(frozen=True)
class Mixture:
    graph: QuditGraph
    dist: EdgeDistribution

    def __post_init__(self):
        self.dist.check_support(self.graph)

    def apply(self, p, step=0):
        return apply_mixture(p, self.dist, self.graph.d)


@dataclass(frozen=True)
class OrderedChain:
    graph: QuditGraph
    ordering: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "ordering", check_ordering(self.graph, self.ordering))

    def apply(self, p, step=0):
        for e in reversed(self.ordering):
            p = apply_edge_projector(p, e, self.graph.d)
        return p


@dataclass(frozen=True)
class RandomOrderChain:
    """One realization of a fresh uniformly random ordering per sweep."""

    graph: QuditGraph
    seed: int

    def ordering_for_step(self, step: int) -> tuple[Edge, ...]:
        rng = np.random.default_rng([self.seed, step])
        return tuple(self.graph.edges[i] for i in rng.permutation(len(self.graph.edges)))

    def apply(self, p, step=0):
        return apply_ordered_chain(p, self.ordering_for_step(step), self.graph)


@dataclass(frozen=True)
class AveragedOrderChain:
    """Exact average over all edge orderings of one sweep.

    Cost grows as ``|E|!``, so graphs are limited to ``MAX_AVERAGED_EDGES`` edges.
    """

    graph: QuditGraph
    orderings: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = len(self.graph.edges)
        if m > MAX_AVERAGED_EDGES:
            raise ValueError(
                f"ordering average over {m}! permutations exceeds the {MAX_AVERAGED_EDGES}-edge limit"
            )
        object.__setattr__(self, "orderings", tuple(itertools.permutations(self.graph.edges)))

    def apply(self, p, step=0):
        w = 1.0 / len(self.orderings)
        out: dict[int, float] = {}
        for order in self.orderings:
            r = p
            for e in reversed(order):
                r = apply_edge_projector(r, e, self.graph.d)
            for s, c in r.terms.items():
                out[s] = out.get(s, 0.0) + w * c
        return PermPolynomial(p.n, out, p.discarded)


SuperopSpec = SingleEdge | Mixture | OrderedChain | RandomOrderChain | AveragedOrderChain


def _prune(p: PermPolynomial, eps: float) -> PermPolynomial:
    if eps <= 0:
        return p
    keep = {}
    lost = []
    for s, c in p.terms.items():
        if abs(c) < eps:
            lost.append(c)
        else:
            keep[s] = c
    if not lost:
        return p
    return PermPolynomial(p.n, keep, p.discarded + math.fsum(lost))


def iterate(p: PermPolynomial, superop: SuperopSpec, k: int, prune_eps: float = DEFAULT_PRUNE_EPS) -> PermPolynomial:
    """Apply ``superop`` ``k`` times; mass of pruned terms accumulates in ``discarded``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if p.n != superop.graph.n:
        raise ValueError("polynomial and graph disagree on the vertex count")
    for step in range(k):
        p = _prune(superop.apply(p, step), prune_eps)
    return p


def average_purity(superop: SuperopSpec, A: int, k: int, prune_eps: float = DEFAULT_PRUNE_EPS) -> float:
    return purity_of(iterate(PermPolynomial.single(A, superop.graph.n), superop, k, prune_eps))


# transfer matrices and spectra


def chain_interval_basis(L: int) -> list[int]:
    """The empty set followed by every contiguous block of an ``L``-chain."""
    basis = [0]
    for start in range(L):
        for stop in range(start + 1, L + 1):
            basis.append(interval_mask(start, stop))
    return basis


def closure_basis(superop: SuperopSpec, seed: int, cap: int = 4096) -> list[int]:
    """Subsets reachable from ``seed`` under ``superop``, breadth first."""
    if isinstance(superop, RandomOrderChain):
        raise ValueError("a random-order realization has no fixed closure")
    n = superop.graph.n
    found = [seed]
    index = {seed}
    frontier = [seed]
    while frontier:
        nxt = []
        for s in frontier:
            for t in superop.apply(PermPolynomial.single(s, n)).terms:
                if t not in index:
                    if len(found) >= cap:
                        raise ValueError(f"closure exceeds the cap of {cap} subsets")
                    index.add(t)
                    found.append(t)
                    nxt.append(t)
        frontier = nxt
    return sorted(found)


def transfer_matrix(superop: SuperopSpec, basis: Sequence[int]) -> np.ndarray:
    """``M[j, i]`` is the coefficient of ``basis[j]`` in ``superop(T_{basis[i]})``."""
    if isinstance(superop, RandomOrderChain):
        raise ValueError("a random-order realization is not a fixed linear map")
    n = superop.graph.n
    pos = {s: j for j, s in enumerate(basis)}
    if len(pos) != len(basis):
        raise ValueError("basis contains repeated subsets")
    M = np.zeros((len(basis), len(basis)))
    for i, s in enumerate(basis):
        for t, c in superop.apply(PermPolynomial.single(s, n)).terms.items():
            j = pos.get(t)
            if j is None:
                raise BasisNotClosedError(t, s)
            M[j, i] += c
    return M


UNIT_TOL = 1e-10


@dataclass(frozen=True)
class SpectralResult:
    """Eigenvalues sorted by descending modulus.

    ``T_empty`` and ``T_V`` are fixed by every superoperator, so the unit
    eigenvalue is always degenerate. ``gap`` is therefore measured against the
    largest modulus strictly below one (1 when there is none).
    """

    eigenvalues: np.ndarray
    moduli: np.ndarray
    dimension: int
    leading: float
    leading_multiplicity: int
    gap: float


def spectral_analysis(M: np.ndarray) -> SpectralResult:
    try:
        ev = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(ev)):
        raise SpectralError("eigensolver returned non-finite values")
    order = np.argsort(-np.abs(ev), kind="stable")
    ev = ev[order]
    mod = np.abs(ev)
    leading = float(mod[0]) if len(mod) else 0.0
    unit = np.abs(mod - leading) <= UNIT_TOL
    rest = mod[~unit]
    gap = leading - float(rest.max()) if len(rest) else leading
    return SpectralResult(ev, mod, len(mod), leading, int(unit.sum()), gap)


def forecast_purity(M: np.ndarray, basis: Sequence[int], A: int, ks: Iterable[int]) -> np.ndarray:
    """Mean purities ``<1, M^k e_A>`` from an eigendecomposition of ``M``.

    Only sound when ``M`` is diagonalizable, which holds for mixtures (they
    are self-adjoint in a suitable inner product).
    """
    ev, V = np.linalg.eig(M)
    e = np.zeros(len(basis))
    e[list(basis).index(A)] = 1.0
    coeffs = np.linalg.solve(V, e)  # expansion of T_A in eigenvectors
    weights = np.ones(len(basis)) @ V * coeffs
    ks = np.asarray(list(ks))
    return np.real(np.power.outer(ev, ks).T @ weights)
