"""Config-driven experiments comparing the exact, closed-form and sampling engines."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import algebra, closed_forms as cf
from .ensemble import MODELS, ORDERINGS, EnsembleSpec
from .graph import (
    QuditGraph,
    boundary_edges,
    build_chain,
    build_cycle,
    interval_mask,
    mask_vertices,
    subset_mask,
)
from .montecarlo import DEFAULT_MEM_CAP_GIB, PurityStats, sample_purities, write_sample_csv

CSV_HEADER = (
    "model,d,L,L_A,k,q,engine,purity_mean,purity_stderr,purity_var,"
    "s2_of_mean,mean_s2,bound,samples,seed"
)
ENGINES = ("algebra", "montecarlo", "closed-form")
SCANS = ("none", "area-law", "volume-law")
SEED_ENV = "TYPENT_SEED"


class ConfigError(ValueError):
    pass


@dataclass
class GraphConfig:
    generator: str = "chain"  # chain | cycle | edges
    L: int = 6
    d: int = 2
    edges: list[list[int]] | None = None

    def build(self) -> QuditGraph:
        if self.generator == "chain":
            return build_chain(self.L, self.d)
        if self.generator == "cycle":
            return build_cycle(self.L, self.d)
        if self.generator == "edges":
            if not self.edges:
                raise ConfigError("generator 'edges' needs an edge list")
            return QuditGraph(self.L, tuple(tuple(e) for e in self.edges), self.d)
        raise ConfigError(f"unknown graph generator {self.generator!r}")


@dataclass
class Partition:
    """Either the half-open interval ``[start, stop)`` or explicit vertices."""

    start: int | None = None
    stop: int | None = None
    vertices: list[int] | None = None

    def mask(self, n: int) -> int:
        if self.vertices is not None:
            return subset_mask(self.vertices, n)
        if self.start is None or self.stop is None:
            raise ConfigError("partition needs start/stop or vertices")
        if not 0 <= self.start < self.stop <= n:
            raise ConfigError(f"interval [{self.start}, {self.stop}) not within {n} vertices")
        return interval_mask(self.start, self.stop)

    def to_dict(self):
        if self.vertices is not None:
            return {"vertices": list(self.vertices)}
        return {"start": self.start, "stop": self.stop}


@dataclass
class Tolerances:
    stderr_multiplier: float = 4.0
    exact_atol: float = 1e-9
    exact_rtol: float = 0.0
    approx_rtol: float = 0.05
    plateau_atol: float = 0.01
    plateau_min_k: int = 50  # sweeps reaching this depth are checked against the mixed limit


@dataclass
class Expectation:
    """An extra pinned value: ``field`` of ``engine``'s row at ``k`` within ``atol``."""

    field: str
    value: float
    atol: float
    engine: str = "montecarlo"
    k: int | None = None


@dataclass
class ExperimentConfig:
    model: str = "chain"
    graph: GraphConfig = field(default_factory=GraphConfig)
    partitions: list[Partition] = field(default_factory=lambda: [Partition(0, 3)])
    k: list[int] = field(default_factory=lambda: [1, 2, 3])
    ordering: str = "least-entangling"
    samples: int = 10000
    seed: int | None = None
    engines: list[str] = field(default_factory=lambda: list(ENGINES))
    scan: str = "none"
    prune_eps: float = algebra.DEFAULT_PRUNE_EPS
    mem_cap_gib: float = DEFAULT_MEM_CAP_GIB
    workers: int = 1
    out: str | None = None
    dump_poly: bool = False
    sample_csv: bool = False
    tolerances: Tolerances = field(default_factory=Tolerances)
    expect: list[Expectation] = field(default_factory=list)

    # serialization

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "ExperimentConfig":
        raw = dict(raw or {})
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            if "graph" in raw:
                raw["graph"] = GraphConfig(**raw["graph"])
            if "partitions" in raw:
                parts = raw["partitions"]
                if isinstance(parts, dict):
                    parts = [parts]
                raw["partitions"] = [Partition(**p) for p in parts]
            if "k" in raw:
                raw["k"] = parse_k(raw["k"])
            if "tolerances" in raw:
                raw["tolerances"] = Tolerances(**raw["tolerances"])
            if "expect" in raw:
                raw["expect"] = [Expectation(**e) for e in raw["expect"]]
            if "engines" in raw and isinstance(raw["engines"], str):
                raw["engines"] = [raw["engines"]]
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
        cfg = cls(**raw)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["partitions"] = [p.to_dict() for p in self.partitions]
        return out

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "ExperimentConfig":
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        if raw is not None and not isinstance(raw, dict):
            raise ConfigError("config must be a mapping")
        return cls.from_dict(raw or {})

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.loads(text)

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}")
        if self.ordering not in ORDERINGS:
            raise ConfigError(f"ordering must be one of {ORDERINGS}")
        if self.model != "chain" and self.ordering != "least-entangling":
            raise ConfigError("orderings are only valid for the chain model")
        if self.scan not in SCANS:
            raise ConfigError(f"scan must be one of {SCANS}")
        if self.scan == "area-law" and self.model != "random-edge":
            raise ConfigError("area-law scans need the random-edge model")
        if self.scan == "volume-law" and self.model != "chain":
            raise ConfigError("volume-law scans need the chain model")
        bad = set(self.engines) - set(ENGINES)
        if bad or not self.engines:
            raise ConfigError(f"engines must be a nonempty subset of {ENGINES}")
        if "montecarlo" in self.engines and self.samples < 1:
            raise ConfigError("samples must be >= 1 when montecarlo is selected")
        if not self.k or any(k < 0 for k in self.k):
            raise ConfigError("k values must be >= 0")
        if not self.partitions:
            raise ConfigError("at least one partition is required")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        try:
            g = self.graph.build()
            for p in self.partitions:
                A = p.mask(g.n)
                if A in (0, g.full_mask):
                    raise ConfigError("partition must be a nonempty proper subset")
                EnsembleSpec(self.model, g, A, 0, self.ordering).fixed_ordering()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def parse_k(value) -> list[int]:
    """Accept ``3``, ``[1, 2, 3]``, ``"1..5"`` or ``{start: 1, stop: 5}`` (inclusive)."""
    if isinstance(value, bool):
        raise ConfigError("k must be an integer, list or range")
    if isinstance(value, int):
        return [value]
    if isinstance(value, str):
        if ".." in value:
            a, b = value.split("..")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in value.split(",")]
    if isinstance(value, dict):
        return list(range(int(value["start"]), int(value["stop"]) + 1))
    if isinstance(value, (list, tuple)):
        return [int(x) for x in value]
    raise ConfigError(f"cannot parse k from {value!r}")


def resolve_seed(cfg: ExperimentConfig) -> int:
    if cfg.seed is not None:
        return int(cfg.seed)
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} must be an integer") from exc
    return 0


# report


@dataclass
class Row:
    model: str
    d: int
    L: int
    L_A: int
    k: int
    q: float
    engine: str
    purity_mean: float
    purity_stderr: float | None
    purity_var: float | None
    s2_of_mean: float
    mean_s2: float | None
    bound: float
    samples: int
    seed: int
    subset: list[int] = field(default_factory=list)
    boundary: int = 0
    kind: str = "exact"  # for closed-form rows: exact | at-validity-edge | approximate | asymptotic
    discarded_mass: float = 0.0
    wall_clock: float = 0.0
    config_hash: str = ""

    def csv_fields(self) -> list[str]:
        vals = [
            self.model, self.d, self.L, self.L_A, self.k, self.q, self.engine,
            self.purity_mean, self.purity_stderr, self.purity_var,
            self.s2_of_mean, self.mean_s2, self.bound, self.samples, self.seed,
        ]
        return [_fmt(v) for v in vals]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


@dataclass
class ComparisonReport:
    config: dict
    config_hash: str
    seed: int
    rows: list[Row]
    checks: list[Check]
    extras: dict = field(default_factory=dict)
    wall_clock: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        w = csv.writer(buf, lineterminator="\n")
        for r in self.rows:
            w.writerow(r.csv_fields())
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "config": self.config,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
            "rows": [asdict(r) for r in self.rows],
            "extras": self.extras,
            "wall_clock": self.wall_clock,
        }
        return json.dumps(doc, indent=2, default=_json_default)

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.csv").write_text(self.to_csv())
        (out / "report.json").write_text(self.to_json())


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o))


# engines


def _entropy_bound(spec: EnsembleSpec) -> float:
    k, d = spec.k, spec.graph.d
    if k == 0:
        return 0.0
    if spec.model == "random-edge":
        return cf.random_edge_entropy_bound(spec.q, d, k)
    if spec.model == "chain":
        return cf.chain_entropy_bound(k, d)
    return -math.log(cf.single_edge_purity(d))


def _chain_halves(spec: EnsembleSpec) -> tuple[int, int] | None:
    g = spec.graph
    if not g.is_chain():
        return None
    L_A = spec.subset.bit_length()
    if spec.subset != interval_mask(0, L_A):
        return None
    return L_A, g.n - L_A


def closed_form(spec: EnsembleSpec) -> tuple[float, str] | None:
    """Closed-form mean purity for ``spec`` and how far it can be trusted."""
    d, k = spec.graph.d, spec.k
    if k == 0:
        return 1.0, "exact"
    if spec.model == "single-edge":
        return cf.single_edge_purity(d), "exact"
    if spec.model == "random-edge":
        return cf.random_edge_purity(spec.q, d, k), ("exact" if k == 1 else "approximate")
    halves = _chain_halves(spec)
    if halves is None:
        return None
    L_A, L_B = halves
    edge = min(L_A, L_B)
    if spec.ordering == "least-entangling" and k <= edge:
        return cf.chain_purity_exact(k, d), ("exact" if k < edge else "at-validity-edge")
    return cf.chain_asymptotic_purity(d, spec.graph.n, L_A), "asymptotic"


def chain_bound_applies(spec: EnsembleSpec) -> bool:
    """The chain entropy bound is derived for light cones inside both halves."""
    halves = _chain_halves(spec)
    if halves is None:
        return False
    return 1 <= spec.k <= min(halves)


def _base_row(spec, cfg_hash, seed, engine, **kw) -> Row:
    g = spec.graph
    return Row(
        model=spec.model,
        d=g.d,
        L=g.n,
        L_A=bin(spec.subset).count("1"),
        k=spec.k,
        q=spec.q,
        engine=engine,
        bound=_entropy_bound(spec),
        seed=seed,
        subset=mask_vertices(spec.subset),
        boundary=len(boundary_edges(g, spec.subset)),
        config_hash=cfg_hash,
        **kw,
    )


def _run_point(cfg: ExperimentConfig, spec: EnsembleSpec, seed: int, cfg_hash: str, out: Path | None):
    rows = []
    if "algebra" in cfg.engines:
        t0 = time.perf_counter()
        sup = spec.superop(seed)
        poly = algebra.iterate(algebra.PermPolynomial.single(spec.subset, spec.graph.n), sup, spec.k, cfg.prune_eps)
        P = algebra.purity_of(poly)
        kind = "realization" if isinstance(sup, algebra.RandomOrderChain) else "exact"
        rows.append(
            _base_row(
                spec, cfg_hash, seed, "algebra",
                purity_mean=P, purity_stderr=0.0, purity_var=None,
                s2_of_mean=0.0 - math.log(P), mean_s2=None, samples=0, kind=kind,
                discarded_mass=poly.discarded, wall_clock=time.perf_counter() - t0,
            )
        )
        if cfg.dump_poly and out is not None:
            out.mkdir(parents=True, exist_ok=True)
            (out / f"poly_A{spec.subset:x}_k{spec.k}.txt").write_text(poly.dumps())
    if "closed-form" in cfg.engines:
        res = closed_form(spec)
        if res is not None:
            P, kind = res
            rows.append(
                _base_row(
                    spec, cfg_hash, seed, "closed-form",
                    purity_mean=P, purity_stderr=0.0, purity_var=None,
                    s2_of_mean=0.0 - math.log(P), mean_s2=None, samples=0, kind=kind,
                )
            )
    if "montecarlo" in cfg.engines:
        t0 = time.perf_counter()
        purities = sample_purities(spec, cfg.samples, seed, mem_cap_gib=cfg.mem_cap_gib)
        st = PurityStats.from_samples(purities)
        rows.append(
            _base_row(
                spec, cfg_hash, seed, "montecarlo",
                purity_mean=st.mean, purity_stderr=st.stderr, purity_var=st.var,
                s2_of_mean=st.s2_of_mean, mean_s2=st.mean_s2, samples=st.count,
                kind="sampled", wall_clock=time.perf_counter() - t0,
            )
        )
        if cfg.sample_csv and out is not None:
            out.mkdir(parents=True, exist_ok=True)
            write_sample_csv(out / f"samples_A{spec.subset:x}_k{spec.k}.csv", purities)
    return rows


def _point_checks(cfg: ExperimentConfig, spec: EnsembleSpec, rows: list[Row]) -> list[Check]:
    tol = cfg.tolerances
    by = {r.engine: r for r in rows}
    tag = f"A={mask_vertices(spec.subset)} k={spec.k}"
    checks = []
    alg, cfr, mc = by.get("algebra"), by.get("closed-form"), by.get("montecarlo")
    if alg is not None and cfr is not None:
        diff = abs(alg.purity_mean - cfr.purity_mean)
        if cfr.kind == "exact":
            lim = tol.exact_atol + tol.exact_rtol * abs(cfr.purity_mean)
            checks.append(Check(f"algebra=closed-form {tag}", diff <= lim, f"|diff|={diff:.3g} <= {lim:.3g}"))
        elif cfr.kind == "approximate":
            rel = diff / cfr.purity_mean
            checks.append(
                Check(f"algebra~approximation {tag}", rel <= tol.approx_rtol, f"rel={rel:.3g} <= {tol.approx_rtol}")
            )
    if mc is not None:
        ref = None
        if alg is not None and alg.kind == "exact":
            ref = ("algebra", alg.purity_mean)
        elif cfr is not None and cfr.kind == "exact":
            ref = ("closed-form", cfr.purity_mean)
        if ref is not None:
            diff = abs(mc.purity_mean - ref[1])
            lim = tol.stderr_multiplier * mc.purity_stderr if mc.purity_stderr > 0 else 1e-12
            checks.append(Check(f"montecarlo={ref[0]} {tag}", diff <= lim, f"|diff|={diff:.3g} <= {lim:.3g}"))
        jensen = mc.mean_s2 >= mc.s2_of_mean - 1e-12
        checks.append(Check(f"jensen {tag}", jensen, f"{mc.mean_s2:.6g} >= {mc.s2_of_mean:.6g}"))
    s2_rows = [r for r in (mc, alg) if r is not None and (r is mc or r.kind == "exact")]
    bound_ok = spec.model == "random-edge" or (spec.model == "chain" and chain_bound_applies(spec))
    if bound_ok and spec.k > 0:
        for r in s2_rows:
            s2 = r.mean_s2 if r.mean_s2 is not None else r.s2_of_mean
            bound = r.bound
            if bound > 0:
                checks.append(
                    Check(f"entropy-bound {r.engine} {tag}", s2 >= bound - 1e-12, f"S2={s2:.6g} >= {bound:.6g}")
                )
    return checks


def _expectation_checks(cfg: ExperimentConfig, rows: list[Row]) -> list[Check]:
    out = []
    for ex in cfg.expect:
        hits = [r for r in rows if r.engine == ex.engine and (ex.k is None or r.k == ex.k)]
        if not hits:
            out.append(Check(f"expect {ex.field}", False, f"no {ex.engine} row at k={ex.k}"))
            continue
        for r in hits:
            val = getattr(r, ex.field)
            ok = val is not None and abs(val - ex.value) <= ex.atol
            out.append(Check(f"expect {ex.field} {ex.engine} k={r.k}", ok, f"{val!r} vs {ex.value} +- {ex.atol}"))
    return out


def run_experiment(cfg: ExperimentConfig) -> ComparisonReport:
    """Run every selected engine on every (partition, k) sweep point."""
    cfg.validate()
    seed = resolve_seed(cfg)
    g = cfg.graph.build()
    cfg_hash = cfg.config_hash()
    out = Path(cfg.out) if cfg.out else None
    specs = [
        EnsembleSpec(cfg.model, g, p.mask(g.n), k, cfg.ordering)
        for p in cfg.partitions
        for k in cfg.k
    ]
    if cfg.workers > 1 and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(lambda s: _run_point(cfg, s, seed, cfg_hash, out), specs))
    else:
        results = [_run_point(cfg, s, seed, cfg_hash, out) for s in specs]
    rows, checks = [], []
    for spec, rs in zip(specs, results):
        rows.extend(rs)
        checks.extend(_point_checks(cfg, spec, rs))
    checks.extend(_expectation_checks(cfg, rows))
    wall = {}
    for r in rows:
        wall[r.engine] = wall.get(r.engine, 0.0) + r.wall_clock
    report = ComparisonReport(cfg.to_dict() | {"seed": seed}, cfg_hash, seed, rows, checks, wall_clock=wall)
    if cfg.scan == "area-law":
        _area_law(report)
    elif cfg.scan == "volume-law":
        _volume_law(cfg, report)
    if out is not None:
        report.write(out)
    return report


def _s2_rows(report: ComparisonReport):
    """Best available entropy per row: sampled mean of -log P, else -log of the exact mean."""
    mc = [r for r in report.rows if r.engine == "montecarlo"]
    if mc:
        return mc, "mean_s2"
    return [r for r in report.rows if r.engine == "algebra"], "s2_of_mean"


def _area_law(report: ComparisonReport) -> None:
    rows, attr = _s2_rows(report)
    ks = sorted({r.k for r in rows})
    fits = {}
    for k in ks:
        pts = [(r.boundary, getattr(r, attr)) for r in rows if r.k == k]
        xs = np.array([p[0] for p in pts], dtype=float)
        ys = np.array([p[1] for p in pts], dtype=float)
        if len(set(xs)) >= 2:
            slope, icpt = np.polyfit(xs, ys, 1)
            fits[str(k)] = {"slope": float(slope), "intercept": float(icpt), "points": len(pts)}
        else:
            fits[str(k)] = {"slope": None, "intercept": None, "points": len(pts)}
    report.extras["area_law_fit"] = fits
    report.extras["entropy_source"] = attr


def area_law_scan(cfg: ExperimentConfig) -> ComparisonReport:
    if cfg.model != "random-edge":
        raise ConfigError("area-law scans need the random-edge model")
    cfg.scan = "area-law"
    return run_experiment(cfg)


def _volume_law(cfg: ExperimentConfig, report: ComparisonReport) -> None:
    tol = cfg.tolerances
    g = cfg.graph.build()
    regimes = {}
    for p in cfg.partitions:
        A = p.mask(g.n)
        L_A = bin(A).count("1")
        L_B = g.n - L_A
        tag = f"A={mask_vertices(A)}"
        mine = [r for r in report.rows if r.subset == mask_vertices(A)]
        for r in mine:
            regimes.setdefault(tag, {})[r.k] = "linear" if r.k < min(L_A, L_B) else "saturation"
        # entropy must grow inside the light-cone regime
        exact = sorted(
            (r for r in mine if r.engine == "algebra" and r.kind == "exact" and 1 <= r.k < min(L_A, L_B)),
            key=lambda r: r.k,
        )
        if len(exact) >= 2:
            s2 = [r.s2_of_mean for r in exact]
            ok = all(b > a for a, b in zip(s2, s2[1:]))
            report.checks.append(Check(f"volume-law growth {tag}", ok, f"S2 over k: {s2}"))
        kmax = max(cfg.k)
        if kmax >= max(tol.plateau_min_k, min(L_A, L_B), 1):
            target = cf.chain_asymptotic_purity(g.d, g.n, L_A)
            for r in mine:
                if r.k != kmax:
                    continue
                if r.engine == "montecarlo":
                    lim = tol.stderr_multiplier * r.purity_stderr + tol.plateau_atol
                elif r.engine == "algebra" and r.kind == "exact":
                    lim = tol.plateau_atol
                else:
                    continue
                diff = abs(r.purity_mean - target)
                report.checks.append(
                    Check(f"plateau {r.engine} {tag} k={kmax}", diff <= lim, f"|{r.purity_mean:.6g}-{target:.6g}|={diff:.3g} <= {lim:.3g}")
                )
    report.extras["regimes"] = regimes


def volume_law_scan(cfg: ExperimentConfig) -> ComparisonReport:
    if cfg.model != "chain":
        raise ConfigError("volume-law scans need the chain model")
    cfg.scan = "volume-law"
    return run_experiment(cfg)
