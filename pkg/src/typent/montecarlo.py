"""Monte Carlo sampling of Haar-random local circuits on product states.

Sample ``i`` of a run draws every random number it needs from its own
generator, seeded with ``(seed, i)``. Samples are simulated in blocks with
a batch axis in front of the amplitude tensor, but the block size only
affects speed, never the values: a run is reproducible for any block size
and worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ensemble import EnsembleSpec
from .graph import Edge, mask_vertices

DEFAULT_MEM_CAP_GIB = 1.0
BLOCK_BUDGET_BYTES = 64 * 2**20


class ResourceLimitError(RuntimeError):
    pass


def sample_haar_unitary(dim: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a Ginibre matrix.

    The columns of ``Q`` are rephased by ``diag(R)/|diag(R)|`` so that the
    factorization is unique and the result exactly Haar-invariant.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    shape = (dim, dim) if size is None else (size, dim, dim)
    z = rng.standard_normal(shape + (2,)).view(np.complex128)[..., 0] / math.sqrt(2.0)
    return haar_from_ginibre(z)


def haar_from_ginibre(z: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[..., None, :]


def is_unitary(U: np.ndarray, atol: float = 1e-12) -> bool:
    eye = np.eye(U.shape[-1])
    return bool(np.all(np.abs(np.conj(np.swapaxes(U, -1, -2)) @ U - eye) <= atol))


@dataclass(frozen=True)
class GateSample:
    edge: Edge
    matrix: np.ndarray


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray  # flat, length d**n
    n: int
    d: int

    def __post_init__(self):
        if self.amplitudes.shape != (self.d**self.n,):
            raise ValueError(f"expected {self.d**self.n} amplitudes, got shape {self.amplitudes.shape}")

    @classmethod
    def zero(cls, n: int, d: int) -> "StateVector":
        amp = np.zeros(d**n, dtype=np.complex128)
        amp[0] = 1.0
        return cls(amp, n, d)

    @classmethod
    def product(cls, local_states) -> "StateVector":
        local_states = [np.asarray(v, dtype=np.complex128) for v in local_states]
        d = len(local_states[0])
        amp = local_states[0]
        for v in local_states[1:]:
            amp = np.kron(amp, v)
        return cls(amp / np.linalg.norm(amp), len(local_states), d)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


# batched kernels: psi has shape (B, d, ..., d) with n site axes


def _apply_gate(psi: np.ndarray, i: int, j: int, U: np.ndarray) -> np.ndarray:
    """Contract a (B, d^2, d^2) or (d^2, d^2) gate into sites ``i``, ``j``."""
    d = psi.shape[1]
    moved = np.moveaxis(psi, (1 + i, 1 + j), (1, 2))
    shape = moved.shape
    out = np.matmul(U, moved.reshape(shape[0], d * d, -1))
    return np.moveaxis(out.reshape(shape), (1, 2), (1 + i, 1 + j))


def _purity_batch(psi: np.ndarray, A: list[int]) -> np.ndarray:
    B, n = psi.shape[0], psi.ndim - 1
    d = psi.shape[1]
    rest = [v for v in range(n) if v not in A]
    small, large = (A, rest) if len(A) <= len(rest) else (rest, A)
    M = np.transpose(psi, [0] + [1 + v for v in small] + [1 + v for v in large])
    M = M.reshape(B, d ** len(small), d ** len(large))
    rho = M @ np.conj(np.swapaxes(M, 1, 2))
    return np.einsum("bij,bij->b", rho, np.conj(rho)).real


def apply_two_site_gate(s: StateVector, e: Edge, U: GateSample | np.ndarray) -> StateVector:
    mat = U.matrix if isinstance(U, GateSample) else np.asarray(U)
    D = s.d * s.d
    if mat.shape != (D, D):
        raise ValueError(f"gate must be {D}x{D}, got {mat.shape}")
    i, j = e
    if i == j or not (0 <= i < s.n and 0 <= j < s.n):
        raise ValueError(f"invalid edge {e} for {s.n} sites")
    psi = s.amplitudes.reshape((1,) + (s.d,) * s.n)
    out = _apply_gate(psi, i, j, mat)
    return StateVector(out.reshape(-1).copy(), s.n, s.d)


def reduced_purity(s: StateVector, A: int) -> float:
    """Tr(rho_A^2) of the pure state ``s`` for the vertex subset mask ``A``."""
    full = (1 << s.n) - 1
    if A == 0 or A == full or A < 0 or A > full:
        raise ValueError("subset must be a nonempty proper subset of the sites")
    psi = s.amplitudes.reshape((1,) + (s.d,) * s.n)
    return float(_purity_batch(psi, mask_vertices(A))[0])


def renyi2(P: float, base: float | None = None) -> float:
    if not P > 0:
        raise ValueError("purity must be positive")
    s = -math.log(P)
    return s if base is None else s / math.log(base)


@dataclass(frozen=True)
class PurityStats:
    mean: float
    var: float
    stderr: float
    count: int
    var_stderr: float
    mean_s2: float  # mean of -log P
    s2_of_mean: float  # -log of mean P

    @classmethod
    def from_samples(cls, purities: np.ndarray) -> "PurityStats":
        p = np.asarray(purities, dtype=np.float64)
        n = len(p)
        if n < 1:
            raise ValueError("need at least one sample")
        mean = float(np.mean(p))
        if n > 1:
            var = float(np.var(p, ddof=1))
            c = p - mean
            m4 = float(np.mean(c**4))
            m2 = float(np.mean(c**2))
            var_se = math.sqrt(max(m4 - (n - 3) / (n - 1) * m2 * m2, 0.0) / n)
        else:
            var, var_se = 0.0, float("nan")
        return cls(
            mean=mean,
            var=var,
            stderr=math.sqrt(var / n),
            count=n,
            var_stderr=var_se,
            mean_s2=0.0 - float(np.mean(np.log(p))),
            s2_of_mean=0.0 - math.log(mean),  # avoids -0.0
        )


def check_memory(n: int, d: int, mem_cap_gib: float = DEFAULT_MEM_CAP_GIB) -> None:
    need = 16 * d**n
    if need > mem_cap_gib * 2**30:
        raise ResourceLimitError(
            f"state of {n} sites with d={d} needs {need / 2**30:.3g} GiB, "
            f"above the memory cap of {mem_cap_gib} GiB (raise it with --mem-cap-gib)"
        )


def _gates_per_tick(spec: EnsembleSpec) -> int:
    return len(spec.graph.edges) if spec.model == "chain" else 1


def _draw_sample(spec: EnsembleSpec, seed: int, index: int):
    """Edges (flattened gate schedule) and raw Ginibre matrices of one sample."""
    rng = np.random.default_rng([seed, index])
    m = len(spec.graph.edges)
    k = spec.k
    if spec.model == "single-edge":
        sched = np.zeros(k, dtype=np.intp)
    elif spec.model == "random-edge":
        sched = rng.integers(m, size=k)
    elif spec.ordering == "random-per-step":
        sched = np.argsort(rng.random((k, m)), axis=1).reshape(-1)
    else:
        pos = {e: i for i, e in enumerate(spec.graph.edges)}
        order = np.array([pos[e] for e in spec.fixed_ordering()], dtype=np.intp)
        sched = np.tile(order, k)
    D = spec.graph.d**2
    z = rng.standard_normal((len(sched), D, D, 2)).view(np.complex128)[..., 0]
    return sched, z


def _run_block(spec: EnsembleSpec, seed: int, start: int, stop: int) -> np.ndarray:
    g = spec.graph
    B = stop - start
    draws = [_draw_sample(spec, seed, i) for i in range(start, stop)]
    sched = np.stack([s for s, _ in draws]) if spec.k else np.zeros((B, 0), dtype=np.intp)
    G = sched.shape[1]
    psi = np.zeros((B, g.d**g.n), dtype=np.complex128)
    psi[:, 0] = 1.0
    psi = psi.reshape((B,) + (g.d,) * g.n)
    if G:
        D = g.d**2
        gates = haar_from_ginibre(np.stack([z for _, z in draws]).reshape(B * G, D, D) / math.sqrt(2.0))
        gates = gates.reshape(B, G, D, D)
        for t in range(G):
            col = sched[:, t]
            first = col[0]
            if np.all(col == first):
                i, j = g.edges[first]
                psi = _apply_gate(psi, i, j, gates[:, t])
            else:
                psi = np.ascontiguousarray(psi)
                for eidx in np.unique(col):
                    rows = np.nonzero(col == eidx)[0]
                    i, j = g.edges[eidx]
                    psi[rows] = _apply_gate(psi[rows], i, j, gates[rows, t])
    return _purity_batch(psi, mask_vertices(spec.subset))


def block_size_for(spec: EnsembleSpec) -> int:
    per_sample = 16 * spec.graph.d**spec.graph.n * 4 + 16 * spec.graph.d**4 * 2 * max(
        spec.k * _gates_per_tick(spec), 1
    )
    return int(min(4096, max(1, BLOCK_BUDGET_BYTES // per_sample)))


def sample_purities(
    spec: EnsembleSpec,
    samples: int,
    seed: int,
    *,
    workers: int = 1,
    mem_cap_gib: float = DEFAULT_MEM_CAP_GIB,
    block_size: int | None = None,
) -> np.ndarray:
    """Reduced purity of each sampled state, in sample-index order."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    full = spec.graph.full_mask
    if spec.subset in (0, full):
        raise ValueError("subset must be a nonempty proper subset of the sites")
    check_memory(spec.graph.n, spec.graph.d, mem_cap_gib)
    bs = block_size or block_size_for(spec)
    bounds = [(a, min(a + bs, samples)) for a in range(0, samples, bs)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: _run_block(spec, seed, *ab), bounds))
    else:
        parts = [_run_block(spec, seed, a, b) for a, b in bounds]
    return np.concatenate(parts)


def run_ensemble(spec: EnsembleSpec, samples: int, seed: int, **kwargs) -> PurityStats:
    return PurityStats.from_samples(sample_purities(spec, samples, seed, **kwargs))


def write_sample_csv(path, purities) -> None:
    with open(path, "w") as fh:
        fh.write("sample_index,purity\n")
        for i, p in enumerate(purities):
            fh.write(f"{i},{float(p):.17g}\n")
