"""Reproducible experiments, one per limit theorem, with verdicts and reports.

A scenario is a JSON-configurable experiment.  ``run`` writes ``summary.json``
(verdicts, estimates, tolerances, seeds) and one CSV per sampled point into the
output directory; its return value is the process exit code (0 when every
verdict passes, 1 otherwise, 2 for an invalid configuration).
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import special

from . import constants
from . import rng as rngmod
from .ensemble import annealed_sweep, quenched_sweep
from .limits import CompositionSpec, compose_marginal_sample
from .medium import GapLaw, Pareto, ShiftedExponential, gap_law_from_dict
from .stable import StableLaw, sample_stable
from .stats import (empirical_abs_moment, fit_exponent, ks_two_sample, stretched_exp_rate,
                    studentize, tail_probability)
from .walks import (DriftedZeta, IncrementLaw, SymmetricZeta, increment_law_from_dict)

P_THRESHOLD = 0.01
OUT_ENV = "LEVYLAB_OUT"

_SIMPLE = {"kind": "simple"}
_PARETO_15 = {"kind": "pareto", "alpha": 1.5, "x_min": 1.0}
_PARETO_05 = {"kind": "pareto", "alpha": 0.5, "x_min": 1.0}
_T_GRID = [10**2, 10**2.5, 10**3, 10**3.5, 10**4]

DEFAULTS: dict[str, dict] = {
    "thm1": dict(gap=_PARETO_15, increments=_SIMPLE, n_grid=[10_000], replicas=10_000,
                 reference_replicas=10_000, repetitions=3),
    "thm2": dict(gap=_PARETO_15, increments=_SIMPLE, n_grid=[10_000], q_grid=[1, 2, 3],
                 replicas=10_000, repetitions=3, tolerance=0.10),
    "thm3a": dict(gap=_PARETO_15, increments={"kind": "symmetric_zeta", "beta": 1.5},
                  n_grid=[10_000], replicas=10_000, reference_replicas=10_000, repetitions=3),
    "thm3b": dict(gap=_PARETO_15, increments={"kind": "drifted_zeta", "beta": 1.8, "nu": 0.4},
                  n_grid=[100_000], replicas=1000, repetitions=3, tolerance=0.03),
    "thm4a": dict(gap={"kind": "shifted_exponential", "rate": 1.0, "offset": 1.0},
                  increments={"kind": "drifted_zeta", "beta": 1.5, "nu": 0.4},
                  n_grid=[100_000], replicas=10_000, reference_replicas=10_000, repetitions=3),
    "thm4b": dict(gap=_PARETO_15, increments={"kind": "drifted_zeta", "beta": 3.0, "nu": 0.4},
                  n_grid=[100_000], replicas=10_000, reference_replicas=10_000, repetitions=3),
    "thm4c": dict(gap=_PARETO_15, increments={"kind": "drifted_zeta", "beta": 1.5, "nu": 0.4},
                  n_grid=[100_000], replicas=10_000, reference_replicas=10_000, repetitions=3),
    "thm5a": dict(gap=_PARETO_05, increments=_SIMPLE, n_grid=[100_000], replicas=10_000,
                  reference_replicas=10_000, repetitions=3),
    "thm5b": dict(gap=_PARETO_05, increments={"kind": "drifted_zeta", "beta": 3.0, "nu": 0.4},
                  n_grid=[100_000], replicas=10_000, reference_replicas=10_000, repetitions=3),
    "thm6": dict(gap=_PARETO_15, increments=_SIMPLE, t_grid=[10_000], replicas=10_000,
                 reference_replicas=10_000, repetitions=3),
    "thm7": dict(gap=_PARETO_15, increments=_SIMPLE, t_grid=[10_000], q_grid=[1, 2],
                 replicas=10_000, repetitions=3, tolerance=0.10),
    "thm8": dict(gap=_PARETO_15, increments=_SIMPLE, t_grid=[100, 400, 1600], a_grid=[0.5],
                 replicas=100_000, repetitions=3, method="tilted"),
    "thm9": dict(gap=_PARETO_15, increments=_SIMPLE, t_grid=_T_GRID, q_grid=[1, 4],
                 replicas=100_000, repetitions=1, tolerance=0.15),
    "thm10": dict(gap=_PARETO_15, increments=_SIMPLE, t_grid=_T_GRID, a_grid=[0.5],
                  replicas=100_000, repetitions=1, tolerance=0.2),
    "thm11": dict(gap=_PARETO_05, increments=_SIMPLE,
                  t_grid=[10**3, 10**3.5, 10**4, 10**4.5], replicas=10_000, repetitions=3,
                  tolerance=0.05),
    "custom": dict(gap=_PARETO_15, increments=_SIMPLE, protocol="annealed", observable="X_at",
                   t_grid=[100.0], q_grid=[1, 2], replicas=1000, repetitions=1),
}
SCENARIOS = tuple(DEFAULTS)
_DISTRIBUTIONAL = set(SCENARIOS) - {"custom"}


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    """One experiment.  Fields left as None take the scenario's default."""

    scenario: str = "custom"
    gap: dict | None = None
    increments: dict | None = None
    n_grid: list | None = None
    t_grid: list | None = None
    q_grid: list | None = None
    a_grid: list | None = None
    replicas: int | None = None
    reference_replicas: int | None = None
    repetitions: int | None = None
    tolerance: float | None = None
    method: str | None = None
    protocol: str | None = None
    observable: str | None = None
    seed: int = 0
    workers: int = 1
    out: str | None = None

    @classmethod
    def from_dict(cls, d: dict) -> ScenarioConfig:
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> ScenarioConfig:
        with open(path) as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return cls.from_dict(d)

    def resolved(self) -> ScenarioConfig:
        if self.scenario not in DEFAULTS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; "
                              f"expected one of {list(SCENARIOS)}")
        filled = dataclasses.replace(self)
        for key, value in DEFAULTS[self.scenario].items():
            if getattr(filled, key) is None:
                setattr(filled, key, value)
        if filled.out is None:
            filled.out = os.environ.get(OUT_ENV, os.path.join("levylab-out", self.scenario))
        return filled

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @property
    def gap_law(self) -> GapLaw:
        return gap_law_from_dict(self.gap)

    @property
    def inc_law(self) -> IncrementLaw:
        return increment_law_from_dict(self.increments)


# --------------------------------------------------------------------------
# validation


def validate(config: ScenarioConfig) -> list[str]:
    """Every violated hypothesis of the scenario's theorem, as readable strings."""
    try:
        cfg = config.resolved()
    except ConfigError as exc:
        return [str(exc)]
    out: list[str] = []
    try:
        gap = cfg.gap_law
    except (TypeError, ValueError, KeyError) as exc:
        return [f"invalid gap law {cfg.gap}: {exc}"]
    try:
        inc = cfg.inc_law
    except (TypeError, ValueError, KeyError) as exc:
        return [f"invalid increment law {cfg.increments}: {exc}"]
    sid = cfg.scenario
    label = "Thm " + sid[3:] if sid.startswith("thm") else sid
    theorem = "Thm " + sid[3:].rstrip("abc") if sid.startswith("thm") else sid

    for name in ("n_grid", "t_grid", "q_grid", "a_grid"):
        grid = getattr(cfg, name)
        if grid is not None and len(grid) == 0:
            out.append(f"{name} must be nonempty")
    if not isinstance(cfg.replicas, int) or cfg.replicas < 1:
        out.append(f"replicas must be a positive integer, got {cfg.replicas}")
    elif sid in _DISTRIBUTIONAL and cfg.replicas < 100:
        out.append(f"distributional tests need replicas >= 100, got {cfg.replicas}")
    if not isinstance(cfg.repetitions, int) or cfg.repetitions < 1:
        out.append(f"repetitions must be a positive integer, got {cfg.repetitions}")
    if not isinstance(cfg.workers, int) or cfg.workers < 1:
        out.append(f"workers must be a positive integer, got {cfg.workers}")
    if not isinstance(cfg.seed, int) or not 0 <= cfg.seed < 2**64:
        out.append(f"seed must be a 64-bit non-negative integer, got {cfg.seed}")

    mu = gap.mean
    a_gap = gap.stability_index
    beta = inc.stability_index
    nu = inc.drift
    finite_mean = math.isfinite(mu)
    drifted = nu is not None and nu != 0

    def need(cond, message):
        if not cond:
            out.append(message)

    if sid in ("thm1", "thm2", "thm6"):
        need(finite_mean, f"{label} assumes a finite mean gap (mu < inf)")
        need(inc.symmetric, f"{label} assumes symmetric increments")
        need(inc.unimodal, f"{label} assumes unimodal increments")
        need(math.isfinite(inc.second_moment), f"{label} assumes finite-variance increments")
    if sid == "thm2":
        for q in cfg.q_grid or []:
            need(0 < q < inc.moment_ceiling,
                 f"Thm 2 needs 0 < q < {inc.moment_ceiling} (the increments' moment ceiling), "
                 f"got q = {q}")
    if sid in ("thm7", "thm8", "thm9", "thm10"):
        need(finite_mean, f"{label} assumes a finite mean gap (mu < inf)")
        need(inc.simple_symmetric, f"{label} assumes S is a simple symmetric RW")
    if sid in ("thm9", "thm10"):
        need(gap.regularly_varying and isinstance(gap, Pareto) and gap.alpha >= 1,
             f"{label} assumes a regularly varying gap tail with index -alpha <= -1")
        for q in cfg.q_grid or []:
            need(q > 0, f"{label} needs q > 0, got {q}")
    if sid in ("thm8", "thm10"):
        for a in cfg.a_grid or []:
            need(0 < a <= 1, f"{label} needs a in (0, 1], got a = {a}")
    if sid in ("thm3a", "thm3b", "thm4a", "thm4b", "thm4c"):
        need(a_gap is not None and 1 < a_gap <= 2,
             f"{theorem} requires in particular α ∈ (1,2] (gaps in a normal stable domain)")
    if sid in ("thm5a", "thm5b", "thm11"):
        need(a_gap is not None and 0 < a_gap < 1,
             f"{theorem} requires in particular α ∈ (0,1)")
    if sid in ("thm3a", "thm5a"):
        need(beta is not None and beta != 1, f"{theorem} assumes β ∈ (0,1) ∪ (1,2]")
        need(beta is None or beta < 1 or nu == 0, f"{label} assumes β < 1 or zero drift ν")
    if sid in ("thm3b", "thm4a", "thm4b", "thm4c", "thm5b"):
        need(beta is not None and 1 < beta <= 2, f"{label} assumes β ∈ (1,2]")
        need(drifted, f"{label} assumes a nonzero drift ν")
    if sid in ("thm4a", "thm4b", "thm4c") and a_gap is not None and beta is not None:
        rel = {"thm4a": (beta < a_gap, "beta < alpha"), "thm4b": (beta > a_gap, "beta > alpha"),
               "thm4c": (beta == a_gap, "beta = alpha")}[sid]
        need(rel[0], f"{label} assumes {rel[1]}, got alpha = {a_gap}, beta = {beta}")
    if sid == "thm11":
        need(nu == 0, "Thm 11 assumes centered increments (nu = 0)")
        if a_gap is not None and a_gap > 0:
            need(inc.moment_ceiling > 2 / a_gap,
                 f"Thm 11 assumes a finite absolute moment of order q > 2/alpha = {2 / a_gap}")
        need(len(cfg.t_grid or []) >= 4, "Thm 11 exponent fit needs at least 4 times")
    if sid in ("thm9", "thm10"):
        need(len(cfg.t_grid or []) >= 4, f"{label} exponent fit needs at least 4 times")
    if sid == "custom":
        need(cfg.protocol in ("quenched", "annealed"),
             f"custom protocol must be quenched or annealed, got {cfg.protocol!r}")
        need(cfg.observable in ("Y_at", "X_at"),
             f"custom observable must be Y_at or X_at, got {cfg.observable!r}")
    return out


# --------------------------------------------------------------------------
# reference limit laws


def _tail_index_scale(tail_constant: float, index: float) -> float:
    # P(|X| > x) ~ c x**-a  <=>  stable scale s with s**a = c / C_a
    c_a = (1.0 - index) / (special.gamma(2.0 - index) * math.cos(math.pi * index / 2.0))
    return (tail_constant / c_a) ** (1.0 / index)


def gap_sum_law(gap: GapLaw) -> StableLaw:
    """Limit of the (centered when ``mu < inf``) gap sums divided by ``n**(1/a)``."""
    if isinstance(gap, ShiftedExponential):
        return StableLaw(2.0, 0.0, (1.0 / gap.rate) / math.sqrt(2.0))
    if isinstance(gap, Pareto) and gap.alpha < 2 and gap.alpha != 1:
        return StableLaw(gap.alpha, 1.0, _tail_index_scale(gap.x_min**gap.alpha, gap.alpha))
    raise ValueError(f"{gap} has no normal-domain stable limit here")


def increment_sum_law(inc: IncrementLaw) -> StableLaw:
    """Limit of the (centered) increment sums divided by ``n**(1/beta)``."""
    beta = inc.stability_index
    if beta == 2.0:
        nu = inc.drift or 0.0
        return StableLaw(2.0, 0.0, math.sqrt((inc.second_moment - nu * nu) / 2.0))
    if isinstance(inc, (SymmetricZeta, DriftedZeta)):
        b = inc.beta
        c = 1.0 / (b * special.zeta(b + 1.0))  # P(|xi| > x) ~ c x**-b
        return StableLaw(b, 0.0, _tail_index_scale(c, b))
    raise ValueError(f"{inc} has no stable limit here")


# --------------------------------------------------------------------------
# reporting


def _fmt(x) -> str:
    return format(float(x), ".6g")


class Report:
    """Accumulates verdicts and files; ``flush`` rewrites ``summary.json``."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.dir = Path(cfg.out)
        self.verdicts: list[dict] = []
        self.estimates: list[dict] = []
        self.files: list[str] = []
        self.status = "running"

    def verdict(self, name: str, passed: bool, estimate, target, tolerance, **extra):
        self.verdicts.append(dict(name=name, passed=bool(passed), estimate=_jsonable(estimate),
                                  target=_jsonable(target), tolerance=_jsonable(tolerance),
                                  **{k: _jsonable(v) for k, v in extra.items()}))
        self.flush()

    def estimate(self, **fields):
        self.estimates.append({k: _jsonable(v) for k, v in fields.items()})

    def sample_csv(self, result, tag: str):
        name = f"{result.observable}_{_fmt(result.point)}_{tag}.csv"
        result.to_csv(self.dir / name)
        self.files.append(name)

    def table_csv(self, name: str, header, rows):
        path = self.dir / name
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_cell(v) for v in row) + "\n")
        self.files.append(name)

    @property
    def passed(self) -> bool:
        return all(v["passed"] for v in self.verdicts)

    def flush(self):
        self.dir.mkdir(parents=True, exist_ok=True)
        summary = {
            "scenario": self.cfg.scenario,
            "status": self.status,
            "passed": self.passed,
            "p_threshold": P_THRESHOLD,
            "config": self.cfg.to_dict(),
            "verdicts": self.verdicts,
            "estimates": self.estimates,
            "files": sorted(self.files),
        }
        tmp = self.dir / "summary.json.tmp"
        with open(tmp, "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, self.dir / "summary.json")


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


# --------------------------------------------------------------------------
# scenario bodies


def _medium_seed(cfg, rep):
    return (cfg.seed, rngmod.MEDIUM, rep)


def _reference_rng(cfg, rep):
    return rngmod.substream(cfg.seed, rngmod.REFERENCE, rep)


def _quenched(cfg, observable, points, rep, report):
    results = quenched_sweep(cfg.gap_law, cfg.inc_law, observable, points, cfg.replicas,
                             _medium_seed(cfg, rep), cfg.seed, workers=cfg.workers,
                             repetition=rep)
    for res in results:
        report.sample_csv(res, f"medium{rep}")
    return results


def _annealed(cfg, observable, points, rep, report):
    results = annealed_sweep(cfg.gap_law, cfg.inc_law, observable, points, cfg.replicas,
                             cfg.seed, workers=cfg.workers, repetition=rep)
    for res in results:
        report.sample_csv(res, f"rep{rep}")
    return results


def _ks_verdict(report, name, sample, reference, rep, point, studentized):
    if studentized:
        sample, reference = studentize(sample), studentize(reference)
    ks = ks_two_sample(sample, reference)
    report.verdict(name, ks.pvalue >= P_THRESHOLD, ks.pvalue, P_THRESHOLD, None,
                   statistic=ks.statistic, repetition=rep, point=point,
                   studentized=studentized, kind="ks_p")


def _gaussian_ks(cfg, report, observable, variance, normalize):
    points = cfg.n_grid if observable == "Y_at" else cfg.t_grid
    for rep in range(cfg.repetitions):
        results = _quenched(cfg, observable, points, rep, report)
        ref_rng = _reference_rng(cfg, rep)
        for res in results:
            ref = math.sqrt(variance) * ref_rng.standard_normal(cfg.reference_replicas)
            _ks_verdict(report, "ks_gaussian", res.samples / normalize(res.point), ref,
                        rep, res.point, False)


def _thm1(cfg, report):
    inc = cfg.inc_law
    _gaussian_ks(cfg, report, "Y_at", cfg.gap_law.mean**2 * inc.second_moment, math.sqrt)


def _quenched_moments(cfg, report, observable, target):
    points = cfg.n_grid if observable == "Y_at" else cfg.t_grid
    for rep in range(cfg.repetitions):
        for res in _quenched(cfg, observable, points, rep, report):
            for q in cfg.q_grid:
                value = empirical_abs_moment(res.samples, q) / res.point ** (q / 2)
                goal = target(q)
                rel = value / goal - 1.0
                report.verdict(f"moment_q{_fmt(q)}", abs(rel) <= cfg.tolerance, value, goal,
                               cfg.tolerance, relative_error=rel, repetition=rep,
                               point=res.point, q=q, kind="relative_moment")


def _thm2(cfg, report):
    mu, v = cfg.gap_law.mean, cfg.inc_law.second_moment
    _quenched_moments(cfg, report, "Y_at",
                      lambda q: mu**q * v ** (q / 2) * constants.gaussian_abs_moment(q))


def _studentized_vs_reference(cfg, report, centre, scale_exp, reference):
    """Annealed ``(Y_n - centre(n)) / n**scale_exp`` vs reference draws, studentized."""
    for rep in range(cfg.repetitions):
        ref_rng = _reference_rng(cfg, rep)
        for res in _annealed(cfg, "Y_at", cfg.n_grid, rep, report):
            n = res.point
            x = (res.samples - centre(n)) / n**scale_exp
            _ks_verdict(report, "ks_studentized", x, reference(ref_rng, cfg.reference_replicas),
                        rep, n, True)


def _thm3a(cfg, report):
    inc_law = increment_sum_law(cfg.inc_law)
    _studentized_vs_reference(cfg, report, lambda n: 0.0, 1.0 / inc_law.stability_index,
                              lambda g, k: sample_stable(inc_law, g, k))


def _thm3b(cfg, report):
    mu, nu = cfg.gap_law.mean, cfg.inc_law.drift
    target = mu * nu
    for rep in range(cfg.repetitions):
        for res in _annealed(cfg, "Y_at", cfg.n_grid, rep, report):
            value = float(np.mean(res.samples)) / res.point
            rel = value / target - 1.0
            report.verdict("fluid_limit", abs(rel) <= cfg.tolerance, value, target,
                           cfg.tolerance, relative_error=rel, repetition=rep, point=res.point,
                           kind="relative_mean")


def _drift_centre(cfg):
    mu, nu = cfg.gap_law.mean, cfg.inc_law.drift
    return lambda n: n * mu * nu


def _thm4a(cfg, report):
    w = increment_sum_law(cfg.inc_law)
    _studentized_vs_reference(cfg, report, _drift_centre(cfg), 1.0 / w.stability_index,
                              lambda g, k: sample_stable(w, g, k))


def _thm4b(cfg, report):
    z = gap_sum_law(cfg.gap_law)
    sign = math.copysign(1.0, cfg.inc_law.drift)
    _studentized_vs_reference(cfg, report, _drift_centre(cfg), 1.0 / z.stability_index,
                              lambda g, k: sign * sample_stable(z, g, k))


def _thm4c(cfg, report):
    z = gap_sum_law(cfg.gap_law)
    w = increment_sum_law(cfg.inc_law)
    mu, nu = cfg.gap_law.mean, cfg.inc_law.drift
    zf = math.copysign(abs(nu) ** (1.0 / z.stability_index), nu)

    def reference(g, k):
        return mu * sample_stable(w, g, k) + zf * sample_stable(z, g, k)

    _studentized_vs_reference(cfg, report, _drift_centre(cfg), 1.0 / w.stability_index,
                              reference)


def _thm5a(cfg, report):
    z = gap_sum_law(cfg.gap_law)
    w = increment_sum_law(cfg.inc_law)
    spec = CompositionSpec(z, w)
    _studentized_vs_reference(cfg, report, lambda n: 0.0,
                              1.0 / (z.stability_index * w.stability_index),
                              lambda g, k: compose_marginal_sample(spec, 1.0, g, k))


def _thm5b(cfg, report):
    z = gap_sum_law(cfg.gap_law)
    nu = cfg.inc_law.drift
    factor = math.copysign(abs(nu) ** (1.0 / z.stability_index), nu)
    _studentized_vs_reference(cfg, report, lambda n: 0.0, 1.0 / z.stability_index,
                              lambda g, k: factor * sample_stable(z, g, k))


def _thm6(cfg, report):
    inc = cfg.inc_law
    variance = cfg.gap_law.mean * inc.second_moment / inc.abs_moment
    _gaussian_ks(cfg, report, "X_at", variance, math.sqrt)


def _thm7(cfg, report):
    mu = cfg.gap_law.mean
    _quenched_moments(cfg, report, "X_at",
                      lambda q: mu ** (q / 2) * constants.gaussian_abs_moment(q))


def _thm8(cfg, report):
    for a in cfg.a_grid:
        for rep in range(cfg.repetitions):
            rates = stretched_exp_rate(cfg.gap_law, cfg.inc_law, a, cfg.t_grid, cfg.replicas,
                                       _medium_seed(cfg, rep), cfg.seed, method=cfg.method,
                                       workers=cfg.workers, repetition=rep)
            report.table_csv(f"rates_a{_fmt(a)}_medium{rep}.csv", ["t", "rate", "p_hat", "hits"],
                             [tuple(r) for r in rates])
            values = [r.rate for r in rates]
            negative = all(v < 0 for v in values)
            monotone = all(b <= a_ for a_, b in zip(values, values[1:]))
            report.verdict("rate_negative_nonincreasing", negative and monotone, values, None,
                           None, a=a, t=[r.t for r in rates], p_hat=[r.p_hat for r in rates],
                           repetition=rep, kind="rate_shape")


def _thm9_10_samples(cfg, report, rep):
    return _annealed(cfg, "X_at", cfg.t_grid, rep, report)


def _thm9(cfg, report):
    gap = cfg.gap_law
    alpha = gap.alpha
    for rep in range(cfg.repetitions):
        results = _thm9_10_samples(cfg, report, rep)
        ts = [r.point for r in results]
        rows = []
        for q in cfg.q_grid:
            moments = [empirical_abs_moment(r.samples, q) for r in results]
            fit = fit_exponent(list(zip(ts, moments)))
            target = constants.gamma_exponent(alpha, q)
            try:
                asym = [constants.moment_asymptote(gap.mean, alpha, q, t, gap) for t in ts]
                asym_slope = fit_exponent(list(zip(ts, asym))).slope
            except ValueError:
                asym, asym_slope = [math.nan] * len(ts), math.nan
            rows += [(q, t, m, s) for t, m, s in zip(ts, moments, asym)]
            report.verdict(f"gamma_q{_fmt(q)}", abs(fit.slope - target) <= cfg.tolerance,
                           fit.slope, target, cfg.tolerance, slope_stderr=fit.slope_stderr,
                           asymptote_slope=asym_slope, repetition=rep, q=q, kind="exponent")
        report.table_csv(f"moments_rep{rep}.csv", ["q", "t", "moment", "asymptote"], rows)


def _thm10(cfg, report):
    gap = cfg.gap_law
    alpha = gap.alpha
    target = 0.5 - alpha
    for rep in range(cfg.repetitions):
        results = _thm9_10_samples(cfg, report, rep)
        for a in cfg.a_grid:
            rows, upper, symmetric = [], [], True
            for r in results:
                t = r.point
                up = tail_probability(r.samples, a * t)
                down = tail_probability(-r.samples, a * t)
                band = (up.high - up.low) + (down.high - down.low)
                ok = abs(up.p - down.p) <= band
                symmetric &= ok
                predicted = constants.F_const(gap.mean, alpha, a) * math.sqrt(t) * gap.tail(t)
                rows.append((t, up.p, up.low, up.high, down.p, down.low, down.high, predicted))
                upper.append((t, up.p))
            report.table_csv(f"tails_a{_fmt(a)}_rep{rep}.csv",
                             ["t", "p_up", "up_low", "up_high", "p_down", "down_low",
                              "down_high", "asymptote"], rows)
            if any(p <= 0 for _, p in upper):
                report.verdict("tail_exponent", False, None, target, cfg.tolerance, a=a,
                               repetition=rep, reason="no exceedances at some t", kind="exponent")
            else:
                fit = fit_exponent(upper)
                report.verdict("tail_exponent", abs(fit.slope - target) <= cfg.tolerance,
                               fit.slope, target, cfg.tolerance, slope_stderr=fit.slope_stderr,
                               a=a, repetition=rep, kind="exponent")
            report.verdict("tail_symmetry", symmetric, None, None, "sum of Wilson widths", a=a,
                           repetition=rep, kind="symmetry")


def _thm11(cfg, report):
    alpha = cfg.gap_law.stability_index
    target = 1.0 / (alpha + 1.0)
    t0 = cfg.t_grid[0]
    for rep in range(cfg.repetitions):
        results = _annealed(cfg, "X_at", cfg.t_grid, rep, report)
        medians = [(r.point, float(np.median(np.abs(r.samples)))) for r in results]
        # the stated grid covers one and a half decades
        fit = fit_exponent(medians, min_decades=1.5)
        report.table_csv(f"medians_rep{rep}.csv", ["t", "median_abs"], medians)
        report.verdict("median_exponent", abs(fit.slope - target) <= cfg.tolerance, fit.slope,
                       target, cfg.tolerance, slope_stderr=fit.slope_stderr, repetition=rep,
                       kind="exponent")
        # an independent ensemble at 4 t0 for the self-similarity comparison
        later = annealed_sweep(cfg.gap_law, cfg.inc_law, "X_at", (4 * t0,), cfg.replicas,
                               cfg.seed, workers=cfg.workers,
                               repetition=cfg.repetitions + rep)[0]
        report.sample_csv(later, f"selfsim{rep}")
        _ks_verdict(report, "ks_self_similarity", results[0].samples,
                    later.samples / 4.0**target, rep, t0, False)


def _custom(cfg, report):
    points = cfg.n_grid if cfg.observable == "Y_at" and cfg.n_grid else cfg.t_grid
    for rep in range(cfg.repetitions):
        if cfg.protocol == "quenched":
            results = _quenched(cfg, cfg.observable, points, rep, report)
        else:
            results = _annealed(cfg, cfg.observable, points, rep, report)
        for res in results:
            report.estimate(**res.summary(),
                            moments={_fmt(q): empirical_abs_moment(res.samples, q)
                                     for q in cfg.q_grid or []})


BODIES = {
    "thm1": _thm1, "thm2": _thm2, "thm3a": _thm3a, "thm3b": _thm3b, "thm4a": _thm4a,
    "thm4b": _thm4b, "thm4c": _thm4c, "thm5a": _thm5a, "thm5b": _thm5b, "thm6": _thm6,
    "thm7": _thm7, "thm8": _thm8, "thm9": _thm9, "thm10": _thm10, "thm11": _thm11,
    "custom": _custom,
}


def run(config: ScenarioConfig) -> int:
    """Run one scenario; returns the exit code (0 pass, 1 verdict failure, 2 config error)."""
    violations = validate(config)
    if violations:
        raise ConfigError("; ".join(violations))
    cfg = config.resolved()
    report = Report(cfg)
    report.flush()
    try:
        BODIES[cfg.scenario](cfg, report)
    except KeyboardInterrupt:
        report.status = "interrupted"
        report.flush()
        raise
    report.status = "complete"
    report.flush()
    return 0 if report.passed else 1


def run_report(config: ScenarioConfig) -> dict:
    """Run and return the parsed ``summary.json``."""
    run(config)
    with open(Path(config.resolved().out) / "summary.json") as fh:
        return json.load(fh)
