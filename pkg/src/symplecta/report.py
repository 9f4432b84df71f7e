"""Suite configuration, check orchestration and deterministic report output.

A configuration is a JSON object (schema version 1).  Every key is optional:

==============  =====================================================
key             meaning
==============  =====================================================
schema_version  must be 1
suite           core | continuity | gallery | kg | probe | all
seed            base seed for every random instance
instances       random instances per property check
max_dim         largest matrix dimension for random instances
N               lattice size, or list of sizes (kg and probe suites)
L               half-width of the gallery interval
ring_length     circumference of the kg / probe ring
s_grid          exponents in [0, 2]
tau_grid        interpolation parameters in [0, 1]
tolerances      overrides for the tolerance table, all > 0
output          report path
format          json | csv
threads         worker threads (further capped by SYMPLECTA_THREADS)
==============  =====================================================
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from .continuity import (
    DEFAULT_S_GRID,
    DEFAULT_TAU_GRID,
    adjoint_of,
    check_interpolation,
    gram_norm,
    make_pair,
    random_interpolation_triple,
    truncation_ladder,
    verify_relative_continuity,
)
from .core import (
    DEFAULT_TOL,
    DominatingProduct,
    Tolerances,
    abs_power_geig,
    check_domination,
    classify,
    engineered_instance,
    purify,
    random_instance,
    relative_frobenius,
    saturation_defect,
    scaled_product,
)
from .errors import ConfigError, InvalidValue, ParseError, UnknownKey, UnsupportedFormat
from .gallery import (
    build_chirp_scenario,
    build_swap_scenario,
    loglog_slope,
    mode_eigenvalues,
    translate_norms,
    swap_witness,
)
from .lattice import (
    CauchyData,
    build_lattice,
    energy_gram,
    evolution_matrix,
    light_cone_leakage,
    cutoff_continuity_report,
    ultrastatic_vacuum_gram,
)
from .quasifree import (
    QuasifreeState,
    arcs,
    local_probe,
    one_particle,
    recover_mu,
    same_subspace,
    symplectic_complement,
)

SCHEMA_VERSION = 1
SUITES = ("core", "continuity", "gallery", "kg", "probe")
FORMATS = ("json", "csv")
CSV_HEADER = ("check", "anchor", "measured", "bound", "pass")
THREADS_ENV = "SYMPLECTA_THREADS"

# chirp growth experiment: bump width, translates, and a grid with 2Lm = N + 1
CHIRP_WIDTH = 2.0
CHIRP_TRANSLATES = tuple(range(4, 25))


@dataclass(frozen=True)
class SuiteConfig:
    suite: str = "all"
    seed: int = 0
    instances: int = 100
    max_dim: int = 40
    N: tuple = (64, 128)
    L: float = 8.0
    ring_length: float = 10.0
    s_grid: tuple = DEFAULT_S_GRID
    tau_grid: tuple = DEFAULT_TAU_GRID
    tolerances: Tolerances = DEFAULT_TOL
    output: Optional[str] = None
    format: str = "json"
    threads: Optional[int] = None

    def echo(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["N"] = list(self.N)
        out["s_grid"] = list(self.s_grid)
        out["tau_grid"] = list(self.tau_grid)
        out["tolerances"] = self.tolerances.as_dict()
        return out


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v) -> bool:
    return (_is_int(v) or isinstance(v, float)) and math.isfinite(v)


def _grid(key: str, v, lo: float, hi: float) -> tuple:
    if not isinstance(v, list) or not v or not all(_is_num(x) for x in v):
        raise InvalidValue(f"{key} must be a non-empty list of numbers")
    if any(x < lo or x > hi for x in v):
        raise InvalidValue(f"{key} entries must lie in [{lo}, {hi}]")
    return tuple(float(x) for x in v)


def config_from_dict(raw: dict) -> SuiteConfig:
    """Validate a decoded config object and fill in defaults."""
    if not isinstance(raw, dict):
        raise ParseError("config must be a JSON object")
    allowed = {f.name for f in fields(SuiteConfig)} | {"schema_version"}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise UnknownKey(f"unknown config keys: {', '.join(unknown)}")
    kw = {}
    if "schema_version" in raw and raw["schema_version"] != SCHEMA_VERSION:
        raise InvalidValue(f"schema_version must be {SCHEMA_VERSION}")
    if "suite" in raw:
        if raw["suite"] not in SUITES + ("all",):
            raise InvalidValue(f"suite must be one of {', '.join(SUITES + ('all',))}")
        kw["suite"] = raw["suite"]
    for key, lo in (("seed", 0), ("instances", 1), ("max_dim", 2), ("threads", 1)):
        if key in raw:
            if not _is_int(raw[key]) or raw[key] < lo:
                raise InvalidValue(f"{key} must be an integer >= {lo}")
            kw[key] = raw[key]
    if "N" in raw:
        sizes = raw["N"] if isinstance(raw["N"], list) else [raw["N"]]
        if not sizes or not all(_is_int(n) and 8 <= n <= 2048 for n in sizes):
            raise InvalidValue("N must be an integer in [8, 2048] or a list of them")
        kw["N"] = tuple(sizes)
    for key, lo in (("L", 8.0), ("ring_length", 0.0)):
        if key in raw:
            if not _is_num(raw[key]) or raw[key] < lo or raw[key] <= 0:
                raise InvalidValue(f"{key} must be a positive number >= {lo}")
            kw[key] = float(raw[key])
    if "s_grid" in raw:
        kw["s_grid"] = _grid("s_grid", raw["s_grid"], 0.0, 2.0)
    if "tau_grid" in raw:
        kw["tau_grid"] = _grid("tau_grid", raw["tau_grid"], 0.0, 1.0)
    if "tolerances" in raw:
        tol = raw["tolerances"]
        if not isinstance(tol, dict):
            raise InvalidValue("tolerances must be an object")
        names = set(DEFAULT_TOL.as_dict())
        bad = sorted(set(tol) - names)
        if bad:
            raise UnknownKey(f"unknown tolerance names: {', '.join(bad)}")
        for k, v in tol.items():
            if not _is_num(v) or v <= 0:
                raise InvalidValue(f"tolerance {k} must be a positive number")
        kw["tolerances"] = DEFAULT_TOL.replace(**{k: float(v) for k, v in tol.items()})
    if "output" in raw:
        if not isinstance(raw["output"], str) or not raw["output"]:
            raise InvalidValue("output must be a non-empty path string")
        kw["output"] = raw["output"]
    if "format" in raw:
        if raw["format"] not in FORMATS:
            raise InvalidValue(f"format must be one of {', '.join(FORMATS)}")
        kw["format"] = raw["format"]
    return SuiteConfig(**kw)


def load_config(path) -> SuiteConfig:
    try:
        text = Path(path).read_bytes().decode("utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise ParseError(f"config {path} is not UTF-8") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"config {path}: {exc}") from exc
    return config_from_dict(raw)


@dataclass
class Record:
    check: str
    anchor: str
    measured: Optional[float]
    bound: Optional[float]
    passed: bool
    soft: bool = False
    relation: str = "<="
    detail: str = ""


@dataclass
class Report:
    header: dict
    records: list
    summary: dict
    tables: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return 0 if self.summary["failed"] == 0 else 1


def _finite(x) -> Optional[float]:
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def upper(check, anchor, measured, bound) -> Record:
    return Record(check, anchor, _finite(measured), float(bound), bool(measured <= bound))


def lower(check, anchor, measured, bound) -> Record:
    return Record(check, anchor, _finite(measured), float(bound), bool(measured >= bound), relation=">=")


def soft(check, anchor, measured) -> Record:
    return Record(check, anchor, _finite(measured), None, True, soft=True, relation="info")


@dataclass(frozen=True)
class Task:
    name: str
    anchor: str
    run: Callable[[], list]


def _instance_seed(base: int, i: int) -> int:
    return base * 1_000_003 + i


def _random_dims(cfg: SuiteConfig, i: int, salt: int):
    rng = np.random.default_rng([cfg.seed, salt, i])
    n = int(rng.integers(1, max(1, cfg.max_dim // 2) + 1))
    return rng, n


# ---- core ---------------------------------------------------------------

POLAR = "polarizator of a dominating product and its polar factors"
FAMILY = "scaled family mu_s built from powers of |R|"
RIGID = "rigidity of the scaled family when |R| is a multiple of the identity"


def _core_tasks(cfg: SuiteConfig) -> list:
    tol = cfg.tolerances
    s_half = [s for s in cfg.s_grid if s <= 1.0] or [0.0, 1.0]

    def instances():
        for i in range(cfg.instances):
            rng, n = _random_dims(cfg, i, 1)
            yield random_instance(_instance_seed(cfg.seed, i), n, squeeze=3.0, mix=float(rng.uniform(0.1, 2.0)))

    def polar():
        skew, routes, pure = 0.0, 0.0, 0.0
        for G in instances():
            R = G.polarizator.R
            skew = max(skew, np.linalg.norm(G.G @ R + R.T @ G.G) / np.linalg.norm(G.G))
            for s in (0.5, 1.0, 2.0):
                routes = max(routes, relative_frobenius(G.polarizator.power(s), abs_power_geig(G.G, G.form.J, s)))
            P = purify(G)
            pure = max(pure, classify(P).involution_defect)
        return [
            upper("core.polarizator_mu_antisymmetry", POLAR, skew, tol.verification),
            upper("core.abs_power_routes_agree", POLAR, routes, tol.verification),
            upper("core.purification_is_pure", POLAR, pure, tol.classification),
        ]

    def family():
        worst_norm, puri, sat = 0.0, 0.0, 0.0
        for G in instances():
            G1 = scaled_product(G, 1.0)
            for s in s_half:
                ok, margin = check_domination(scaled_product(G, s), G.form, tol)
                worst_norm = max(worst_norm, 1.0 - margin)
            for s in s_half:
                Gs = DominatingProduct(scaled_product(G, s), G.form, tol)
                puri = max(puri, relative_frobenius(purify(Gs).G, G1))
            P = purify(G)
            sat = max(sat, abs(saturation_defect(P, 2 * P.dim)) / np.linalg.norm(P.G, 2))
        return [
            upper("core.scaled_family_dominates", FAMILY, worst_norm, 1.0 + tol.domination),
            upper("core.scaled_family_purifies_to_one", FAMILY, puri, tol.verification),
            upper("core.purification_saturates", FAMILY, sat, tol.verification),
        ]

    def rigidity():
        wrong_pure = wrong_dom = 0
        for i, c in enumerate((0.2, 0.5, 0.8, 0.95, 1.0) * max(1, cfg.instances // 20)):
            rng, n = _random_dims(cfg, i, 2)
            G = engineered_instance(_instance_seed(cfg.seed, i), n, c)
            pure = classify(DominatingProduct(scaled_product(G, 0.5), G.form, tol)).is_pure
            dom, _ = check_domination(scaled_product(G, 1.5), G.form, tol)
            wrong_pure += pure != (c == 1.0)
            wrong_dom += dom != (c == 1.0)
        return [
            upper("core.rigidity_purity_below_one", RIGID, wrong_pure, 0),
            upper("core.rigidity_domination_above_one", RIGID, wrong_dom, 0),
        ]

    return [Task("core.polar", POLAR, polar), Task("core.family", FAMILY, family),
            Task("core.rigidity", RIGID, rigidity)]


# ---- continuity ---------------------------------------------------------

ADJ = "relative mu - mu_s continuity of symplectically adjoint pairs"
INTERP = "interpolation inequality for products of positive operator powers"


def _continuity_tasks(cfg: SuiteConfig) -> list:
    tol = cfg.tolerances

    def bounds():
        worst, closure = -np.inf, 0.0
        for i in range(cfg.instances):
            rng, n = _random_dims(cfg, i, 3)
            G = random_instance(_instance_seed(cfg.seed, i), n, squeeze=3.0, mix=float(rng.uniform(0.1, 2.0)))
            V = rng.standard_normal((2 * n, 2 * n))
            W = adjoint_of(V, G.form)
            closure = max(closure, relative_frobenius(adjoint_of(W, G.form), V))
            rep = verify_relative_continuity(make_pair(V, W, G.form, tol=1e-10), G, cfg.s_grid, tol.verification)
            worst = max(worst, rep.max_violation)
        return [
            upper("continuity.adjoint_pair_bounds", ADJ, worst, tol.verification),
            upper("continuity.adjoint_closure", ADJ, closure, 1e-12),
        ]

    def interpolation():
        worst = -np.inf
        for i in range(cfg.instances):
            X, Y, Q = random_interpolation_triple(_instance_seed(cfg.seed, i), max_dim=min(cfg.max_dim, 60))
            worst = max(worst, check_interpolation(X, Y, Q, cfg.tau_grid, tol.verification).max_violation)
        ladder = truncation_ladder(tau_grid=cfg.tau_grid)
        return [
            upper("continuity.interpolation_inequality", INTERP, worst, tol.verification),
            upper("continuity.truncation_ladder", INTERP, max(ladder.worst_ratio), 1.0 + tol.verification),
        ]

    return [Task("continuity.bounds", ADJ, bounds), Task("continuity.interpolation", INTERP, interpolation)]


# ---- gallery ------------------------------------------------------------

CHIRP = "chirp multiplier: unitary, yet unbounded in the unpurified product"
SWAP = "component swap: isometry whose distortion of a dominated pure product is unbounded"


def chirp_grid(width: float = CHIRP_WIDTH, translates=CHIRP_TRANSLATES) -> tuple[int, float]:
    """Grid ``(N, L)`` that keeps every translate inside the interval and resolves the phase."""
    top = max(abs(n) for n in translates)
    L = math.ceil(top + 4 * width)
    m = math.ceil(8 * (top + width) / math.pi)
    return 2 * L * m - 1, float(L)


def _gallery_tasks(cfg: SuiteConfig, tables: dict) -> list:
    tol = cfg.tolerances

    def chirp_small():
        sc = build_chirp_scenario(128, cfg.L)
        P = purify(sc.product("mu"))
        return [
            upper("gallery.chirp.symplectic", CHIRP, sc.symplectic_residual(), 1e-10),
            upper("gallery.chirp.purifies_to_l2", CHIRP, relative_frobenius(P.G, sc.G_other.toarray()), tol.verification),
            Record("gallery.chirp.primary_not_pure", CHIRP, None, None,
                   classify(sc.product("mu")).tag == "primary-not-pure", relation="=="),
        ]

    def chirp_growth():
        N, L = chirp_grid()
        sc = build_chirp_scenario(N, L)
        rows = [translate_norms(sc, CHIRP_WIDTH, n) for n in CHIRP_TRANSLATES]
        curve = [(int(r.n), r.ratio) for r in rows]
        tables["growth"] = [("n", "ratio")] + curve
        slope = loglog_slope(curve)
        mu0 = rows[0].mu
        drift = max(abs(r.mu - mu0) for r in rows) / mu0
        inv = max(abs(r.purified_T - r.purified) / r.purified for r in rows)
        return [
            upper("gallery.chirp.growth_slope_error", CHIRP, abs(slope - 2.0), 0.2),
            upper("gallery.chirp.translation_invariance", CHIRP, drift, 1e-10),
            upper("gallery.chirp.purified_invariance", CHIRP, inv, 1e-12),
        ]

    def swap():
        rng = np.random.default_rng([cfg.seed, 5])
        sc = build_swap_scenario(128, cfg.L)
        T = sc.T
        sq = np.abs(T @ T + np.eye(2 * sc.N)).max()
        iso = 0.0
        for _ in range(100):
            phi = rng.standard_normal(2 * sc.N)
            iso = max(iso, abs(sc.mu(T @ phi) - sc.mu(phi)) / sc.mu(phi))
        wit = swap_witness(sc)
        lam = mode_eigenvalues(sc)
        err = max(abs(r / lam[k] - 1.0) for k, r in wit)
        tables["witness"] = [("k", "ratio", "eigenvalue")] + [(k, r, float(lam[k])) for k, r in wit]
        big = swap_witness(build_swap_scenario(256, cfg.L))
        growth = max(r for _, r in big) / max(r for _, r in wit)
        dom, _ = check_domination(sc.G_other.toarray(), sc.form, tol)
        return [
            upper("gallery.swap.symplectic", SWAP, sc.symplectic_residual(), 1e-10),
            upper("gallery.swap.square_is_minus_one", SWAP, sq, 1e-10),
            upper("gallery.swap.mu_isometry", SWAP, iso, 1e-10),
            upper("gallery.swap.witness_matches_eigenvalue", SWAP, err, 1e-8),
            lower("gallery.swap.witness_growth_on_refinement", SWAP, growth, 3.0),
            Record("gallery.swap.pure_product_dominates", SWAP, None, None, bool(dom), relation="=="),
        ]

    return [Task("gallery.chirp", CHIRP, chirp_small), Task("gallery.chirp_growth", CHIRP, chirp_growth),
            Task("gallery.swap", SWAP, swap)]


# ---- kg -----------------------------------------------------------------

VAC = "purified energy product equals the ultrastatic vacuum"
EVOL = "cutoff Klein-Gordon evolution in the Sobolev scale"


def _kg_tasks(cfg: SuiteConfig) -> list:
    tol = cfg.tolerances

    def per_size(N):
        def run():
            h = cfg.ring_length / N
            model = build_lattice(N, h, 1.0)
            E = energy_gram(model, tol)
            vac = ultrastatic_vacuum_gram(model, tol)
            T = evolution_matrix(model, 0.0, 1.5)
            recs = [
                upper(f"kg.N{N:04d}.purify_matches_vacuum", VAC, relative_frobenius(purify(E).G, vac.G), tol.verification),
                upper(f"kg.N{N:04d}.energy_conserved", EVOL, gram_norm(T, E.G), 1.0 + tol.verification),
                upper(f"kg.N{N:04d}.evolution_symplectic", EVOL,
                      np.abs(T.T @ E.form.J @ T - E.form.J).max() / np.abs(E.form.J).max(), 1e-10),
            ]
            region = range(N // 4)
            const = cutoff_continuity_report(model, 0.0, 1.0, region=region)
            recs.append(upper(f"kg.N{N:04d}.constant.norms_at_most_one", EVOL,
                              max(const.region_norms + const.full_norms), 1.0 + tol.verification))
            pieces = [(0.0, 1.0), (0.5, 4.0), (1.0, 16.0), (1.5, 1.0)]
            piecewise = cutoff_continuity_report(build_lattice(N, h, pieces), 0.0, 2.0, region=region)
            recs.append(upper(f"kg.N{N:04d}.piecewise.cutoff_bounds", EVOL, piecewise.max_violation, 1e-8))
            recs.append(upper(f"kg.N{N:04d}.piecewise.closed_form_scale", EVOL,
                              max(piecewise.identity_residuals), 1e-9))
            x = model.x
            bump = np.exp(-(((x - x[N // 2]) / (4 * h)) ** 2))
            leak = light_cone_leakage(model, CauchyData(bump, np.zeros(N)), [N // 2], 0.25 * cfg.ring_length)
            recs.append(soft(f"kg.N{N:04d}.light_cone_leakage", EVOL, leak.outside_fraction))
            return recs

        return run

    return [Task(f"kg.N{N:04d}", VAC, per_size(N)) for N in cfg.N]


# ---- probe --------------------------------------------------------------

ROUND = "quasifree state determined by its Weyl two-point values"
LOCAL = "local symplectic complements of the vacuum one-particle structure"


def _probe_tasks(cfg: SuiteConfig) -> list:
    def round_trip():
        err, ident, invol = 0.0, 0.0, 0
        for i in range(cfg.instances):
            rng, n = _random_dims(cfg, i, 7)
            n = min(n, 10)
            G = random_instance(_instance_seed(cfg.seed, i), n, squeeze=2.0, mix=float(rng.uniform(0.0, 1.0)))
            st = QuasifreeState(G)
            phi, psi = rng.standard_normal((2, 2 * n))
            phi /= np.linalg.norm(phi)
            psi /= np.linalg.norm(psi)
            err = max(err, abs(recover_mu(st, phi, psi, 1e-3) - G(phi, psi)))
            pure = QuasifreeState(purify(G))
            op = one_particle(pure)
            Jc = op.Jc
            ident = max(ident, np.abs(Jc @ Jc + np.eye(2 * n)).max(),
                        np.abs(op.metric @ Jc + Jc.T @ op.metric).max() / np.abs(op.metric).max())
            k = int(rng.integers(1, 2 * n))
            B = rng.standard_normal((2 * n, k))
            back = symplectic_complement(op, symplectic_complement(op, B))
            invol += not same_subspace(back, B, op.metric)
        return [
            upper("probe.weyl_round_trip", ROUND, err, 1e-6),
            upper("probe.one_particle_identity", ROUND, ident, 1e-10),
            upper("probe.complement_involution_failures", ROUND, invol, 0),
        ]

    def per_size(N):
        def run():
            model = build_lattice(N, cfg.ring_length / N, 1.0)
            st = QuasifreeState(ultrastatic_vacuum_gram(model, cfg.tolerances))
            op = one_particle(st)
            reps = [local_probe(model, st, a, op) for a in arcs(N)]
            return [
                upper(f"probe.N{N:04d}.intersection_rank", LOCAL, max(r.intersection_rank for r in reps), 0),
                soft(f"probe.N{N:04d}.duality_gap", LOCAL, max(r.duality_gap for r in reps)),
                soft(f"probe.N{N:04d}.min_principal_angle", LOCAL, min(r.min_principal_angle for r in reps)),
            ]

        return run

    sizes = [n for n in cfg.N if n <= 64] or [16, 32]
    return [Task("probe.round_trip", ROUND, round_trip)] + [
        Task(f"probe.N{N:04d}", LOCAL, per_size(N)) for N in sizes
    ]


# ---- orchestration ------------------------------------------------------


def thread_count(cfg: SuiteConfig) -> int:
    n = cfg.threads or os.cpu_count() or 1
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise InvalidValue(f"{THREADS_ENV} must be an integer, got {env!r}") from None
        n = min(n, max(1, cap))
    return n


def _execute(task: Task) -> list:
    try:
        return list(task.run())
    except Exception as exc:  # a module error becomes a failed record
        return [Record(task.name, task.anchor, None, None, False, relation="error",
                       detail=f"{type(exc).__name__}: {exc}")]


def build_tasks(cfg: SuiteConfig, tables: dict) -> list:
    suites = SUITES if cfg.suite == "all" else (cfg.suite,)
    tasks = []
    for name in suites:
        if name == "core":
            tasks += _core_tasks(cfg)
        elif name == "continuity":
            tasks += _continuity_tasks(cfg)
        elif name == "gallery":
            tasks += _gallery_tasks(cfg, tables)
        elif name == "kg":
            tasks += _kg_tasks(cfg)
        elif name == "probe":
            tasks += _probe_tasks(cfg)
    return tasks


def summarize(records: list) -> dict:
    hard = [r for r in records if not r.soft]
    violations = [
        (r.measured - r.bound) / max(abs(r.bound), 1.0)
        for r in hard
        if r.relation == "<=" and r.measured is not None and r.bound is not None
    ]
    return {
        "total": len(records),
        "passed": sum(r.passed for r in hard),
        "failed": sum(not r.passed for r in hard),
        "soft": len(records) - len(hard),
        "max_violation": max(violations) if violations else None,
    }


def run_suite(cfg: SuiteConfig, timestamp: Optional[str] = None) -> Report:
    tables: dict = {}
    tasks = build_tasks(cfg, tables)
    with ThreadPoolExecutor(max_workers=thread_count(cfg)) as pool:
        chunks = list(pool.map(_execute, tasks))
    records = sorted((r for chunk in chunks for r in chunk), key=lambda r: r.check)
    header = {
        "artifact": "symplecta",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "config": cfg.echo(),
        "tolerances": cfg.tolerances.as_dict(),
        "timestamp": timestamp or time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    return Report(header, records, summarize(records), dict(sorted(tables.items())))


def report_to_dict(report: Report) -> dict:
    return {
        "header": report.header,
        "records": [asdict(r) for r in report.records],
        "summary": report.summary,
    }


def report_from_dict(data: dict) -> Report:
    return Report(data["header"], [Record(**r) for r in data["records"]], data["summary"])


def _csv_number(x) -> str:
    return "" if x is None else repr(float(x))


def emit_report(report: Report, fmt: str = "json") -> bytes:
    if fmt == "json":
        text = json.dumps(report_to_dict(report), sort_keys=True, indent=2, allow_nan=False)
        return (text + "\n").encode("utf-8")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in report.records:
            w.writerow([r.check, r.anchor, _csv_number(r.measured), _csv_number(r.bound),
                        "true" if r.passed else "false"])
        return buf.getvalue().encode("utf-8")
    raise UnsupportedFormat(f"unsupported report format {fmt!r}; use json or csv")


def emit_table(rows: list) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue().encode("utf-8")


def summary_block(report: Report, path: Optional[Path] = None) -> str:
    s = report.summary
    cfg = report.header["config"]
    mv = s["max_violation"]
    lines = [
        f"suite      {cfg['suite']}  seed {cfg['seed']}",
        f"checks     {s['total']}  passed {s['passed']}  failed {s['failed']}  soft {s['soft']}",
        f"max viol.  {'n/a' if mv is None else f'{mv:.3e}'}",
    ]
    for r in report.records:
        if not r.soft and not r.passed:
            lines.append(f"FAIL       {r.check} {r.detail}".rstrip())
    if path is not None:
        lines.append(f"report     {path}")
    return "\n".join(lines)


__all__ = [
    "SuiteConfig",
    "Record",
    "Report",
    "ConfigError",
    "config_from_dict",
    "load_config",
    "run_suite",
    "emit_report",
    "emit_table",
    "report_to_dict",
    "report_from_dict",
    "summary_block",
    "chirp_grid",
]
