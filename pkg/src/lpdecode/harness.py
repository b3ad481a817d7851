"""Seeded Monte Carlo experiments: phase sweeps, threshold fits, concentration.

Every trial owns a named random stream derived from the plan's master seed
and the (p index, rho index, trial index) coordinates, so results do not
depend on execution order or on the number of worker processes.
"""

from __future__ import annotations

import dataclasses
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .certify import attack_arbitrary
from .decoder import DecoderConfig, decode, lp_objective
from .ensemble import (
    ErrorSpec,
    Instance,
    SeedSpec,
    apply_decoder_success,
    floor_count,
    make_instance,
)
from .errors import DomainError, LpdecodeError
from .halfnormal import mu
from .seeding import mix64

log = logging.getLogger(__name__)

_REGIMES = ("arbitrary", "fixed_sign", "adversarial")


@dataclass(frozen=True)
class SweepPlan:
    """Grid of (p, rho) cells to run at fixed problem size."""

    m: int
    n: int
    p_values: tuple[float, ...]
    rho_values: tuple[float, ...]
    trials: int
    error_regime: str = "arbitrary"
    decoder_cfg: DecoderConfig | None = None
    master_seed: int = 0
    success_tol: float = 1e-4

    def __post_init__(self):
        object.__setattr__(self, "p_values", tuple(float(p) for p in self.p_values))
        object.__setattr__(self, "rho_values", tuple(float(r) for r in self.rho_values))
        if self.n < 1 or self.m < self.n:
            raise DomainError(f"need m >= n >= 1, got m={self.m}, n={self.n}")
        if not self.p_values or not self.rho_values:
            raise DomainError("p and rho grids must be non-empty")
        if any(not 0 < p <= 1 for p in self.p_values):
            raise DomainError("all p values must lie in (0, 1]")
        if any(not 0 <= r < 1 for r in self.rho_values):
            raise DomainError("all rho values must lie in [0, 1)")
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        if self.error_regime not in _REGIMES:
            raise DomainError(f"unknown error_regime {self.error_regime!r}")
        if self.success_tol <= 0:
            raise DomainError("success_tol must be positive")


@dataclass(eq=False)
class PhaseCell:
    """Aggregate decode outcomes for one (p, rho) grid point."""

    p: float
    rho: float
    m: int
    n: int
    trials: int
    successes: int
    mean_objective_gap: float
    wallclock_ms: int

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials


@dataclass(frozen=True)
class ThresholdEstimate:
    """rho where the success rate crosses one half; ``crossed`` is False when
    the grid never crosses and ``rho`` is then the nearer grid edge."""

    rho: float
    crossed: bool


@dataclass(eq=False)
class ConcentrationReport:
    """Empirical split of sum |x_i|^p mass for half-normal samples.

    ``ratio_Tminus`` is the mass on the sign-opposing half of the error
    support and ``ratio_Tc`` the off-support mass, both relative to the
    full-vector expectation m * E|X|^p.  Their difference changes sign at
    rho = 2/3.
    """

    rho: float
    p: float
    m: int
    trials: int
    ratio_Tminus: float
    ratio_Tc: float
    margin_sign: str
    positive_trials: int
    negative_trials: int


def trial_seeds(plan: SweepPlan, p_index: int, rho_index: int, trial: int):
    """(instance, auxiliary, decoder) streams for one trial; frozen layout."""
    return (
        SeedSpec(plan.master_seed, mix64(p_index, rho_index, trial)),
        SeedSpec(plan.master_seed, mix64(p_index, rho_index, trial, 1)),
        SeedSpec(plan.master_seed, mix64(p_index, rho_index, trial, 2)),
    )


def _build_instance(plan: SweepPlan, p: float, rho: float, inst_seed, aux_seed) -> Instance:
    m, n = plan.m, plan.n
    k = floor_count(rho, m)
    if plan.error_regime == "fixed_sign" and k > 0:
        g = aux_seed.generator()
        idx = np.sort(g.choice(m, size=k, replace=False))
        signs = {int(i): int(s) for i, s in zip(idx, 2 * g.integers(0, 2, size=k) - 1)}
        spec = ErrorSpec(rho=rho, sign_policy="fixed", fixed_signs=signs)
        return make_instance(m, n, spec, inst_seed)
    if plan.error_regime == "adversarial" and k > 0:
        base = make_instance(m, n, ErrorSpec(rho=0.0), inst_seed)
        z = aux_seed.generator().standard_normal(n)
        e, _ = attack_arbitrary(base.a, base.f, p, rho, z)
        support = np.sort(np.flatnonzero(e)).astype(np.int64)
        signs = {int(i): int(np.sign(e[i])) for i in support}
        return Instance(
            a=base.a,
            f=base.f,
            e=e,
            y=base.a @ base.f + e,
            support=support,
            signs=signs,
            seed=inst_seed,
        )
    return make_instance(m, n, ErrorSpec(rho=rho), inst_seed)


def _run_cell(plan: SweepPlan, p_index: int, rho_index: int) -> PhaseCell:
    p = plan.p_values[p_index]
    rho = plan.rho_values[rho_index]
    base_cfg = plan.decoder_cfg or DecoderConfig(p=p)
    cfg = dataclasses.replace(base_cfg, p=p)

    t0 = time.perf_counter()
    successes = 0
    gaps = []
    for trial in range(plan.trials):
        inst_seed, aux_seed, dec_seed = trial_seeds(plan, p_index, rho_index, trial)
        try:
            inst = _build_instance(plan, p, rho, inst_seed, aux_seed)
            result = decode(inst.a, inst.y, cfg, seed=dec_seed)
        except LpdecodeError as exc:
            log.warning(
                "solver error at p=%g rho=%g trial=%d: %s", p, rho, trial, exc
            )
            continue
        if apply_decoder_success(result.x_hat, inst.f, plan.success_tol):
            successes += 1
        gaps.append(result.objective - lp_objective(inst.e, p))
    wallclock_ms = int(round((time.perf_counter() - t0) * 1000))
    return PhaseCell(
        p=p,
        rho=rho,
        m=plan.m,
        n=plan.n,
        trials=plan.trials,
        successes=successes,
        mean_objective_gap=float(np.mean(gaps)) if gaps else float("nan"),
        wallclock_ms=wallclock_ms,
    )


def _cell_worker(args) -> PhaseCell:
    return _run_cell(*args)


def run_sweep(plan: SweepPlan, jobs: int = 1) -> list[PhaseCell]:
    """Run every (p, rho) cell; results are identical for any ``jobs`` >= 1."""
    if jobs < 1:
        raise DomainError("jobs must be at least 1")
    coords = [
        (plan, pi, ri)
        for pi in range(len(plan.p_values))
        for ri in range(len(plan.rho_values))
    ]
    if jobs == 1 or len(coords) == 1:
        return [_run_cell(*c) for c in coords]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_cell_worker, coords))


def estimate_threshold(cells: list[PhaseCell], level: float = 0.5) -> ThresholdEstimate:
    """Interpolate the rho where success crosses ``level`` along one p slice."""
    if len({c.p for c in cells}) != 1:
        raise DomainError("threshold estimation needs cells at a single p")
    rhos = [c.rho for c in cells]
    if len(set(rhos)) != len(rhos):
        raise DomainError("duplicate rho values in threshold estimation")
    if len(rhos) < 4:
        raise DomainError("threshold estimation needs at least 4 distinct rho values")
    ordered = sorted(cells, key=lambda c: c.rho)
    rates = [c.success_rate for c in ordered]
    if rates[0] < level:
        return ThresholdEstimate(rho=ordered[0].rho, crossed=False)
    for i in range(len(ordered) - 1):
        if rates[i] >= level and rates[i + 1] < level:
            r0, r1 = ordered[i].rho, ordered[i + 1].rho
            s0, s1 = rates[i], rates[i + 1]
            return ThresholdEstimate(
                rho=r0 + (s0 - level) * (r1 - r0) / (s0 - s1), crossed=True
            )
    return ThresholdEstimate(rho=ordered[-1].rho, crossed=False)


def concentration_study(
    rho: float, p: float, m: int, trials: int, seed: int
) -> ConcentrationReport:
    """Sample the mass split behind the fixed-sign 2/3 threshold.

    Each trial draws x ~ N(0, I_m) standing in for A z on a random direction,
    fixes the error support as the first floor(rho m) coordinates, draws its
    signs, and accumulates sum |x_i|^p over the sign-opposing head T- and
    over the tail T^c, normalized by m * E|X|^p.  As m grows these settle at
    rho / 2 and 1 - rho.
    """
    if m < 10_000:
        raise DomainError(f"concentration study needs m >= 10000, got {m}")
    if trials < 1:
        raise DomainError("trials must be at least 1")
    if not (0 <= rho < 1):
        raise DomainError(f"rho must lie in [0, 1), got {rho}")
    if not (0 < p <= 1):
        raise DomainError(f"p must lie in (0, 1], got {p}")

    gen = SeedSpec(seed, 0).generator()
    k = floor_count(rho, m)
    mass_scale = m * mu(p)
    minus_ratios = []
    tc_ratios = []
    diffs = []
    for _ in range(trials):
        x = gen.standard_normal(m)
        signs = 2.0 * gen.integers(0, 2, size=k) - 1.0
        head = x[:k]
        head_pw = np.abs(head) ** p
        s_minus = float(np.sum(head_pw[head * signs < 0]))
        s_tc = float(np.sum(np.abs(x[k:]) ** p))
        minus_ratios.append(s_minus / mass_scale)
        tc_ratios.append(s_tc / mass_scale)
        diffs.append(s_tc - s_minus)

    diffs = np.array(diffs)
    mean_diff = float(np.mean(diffs))
    if trials >= 2:
        stderr = float(np.std(diffs, ddof=1)) / math.sqrt(trials)
        indeterminate = abs(mean_diff) <= 2 * stderr
    else:
        indeterminate = mean_diff == 0.0
    if indeterminate:
        sign = "indeterminate"
    else:
        sign = "positive" if mean_diff > 0 else "negative"
    return ConcentrationReport(
        rho=rho,
        p=p,
        m=m,
        trials=trials,
        ratio_Tminus=float(np.mean(minus_ratios)),
        ratio_Tc=float(np.mean(tc_ratios)),
        margin_sign=sign,
        positive_trials=int(np.sum(diffs > 0)),
        negative_trials=int(np.sum(diffs < 0)),
    )


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def phase_csv(cells: list[PhaseCell], timing: bool = False) -> str:
    """Render sweep cells as CSV.

    wallclock_ms is written as 0 unless ``timing`` is set, so reruns of the
    same plan produce byte-identical output; the measured value stays on the
    cell object either way.
    """
    lines = ["p,rho,m,n,trials,successes,success_rate,mean_objective_gap,wallclock_ms"]
    for c in cells:
        lines.append(
            ",".join(
                [
                    _fmt(c.p),
                    _fmt(c.rho),
                    str(c.m),
                    str(c.n),
                    str(c.trials),
                    str(c.successes),
                    _fmt(c.success_rate),
                    _fmt(c.mean_objective_gap),
                    str(c.wallclock_ms if timing else 0),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def concentration_csv(reports: list[ConcentrationReport]) -> str:
    """Render concentration reports as CSV (stable across reruns)."""
    lines = ["rho,p,m,trials,ratio_Tminus,ratio_Tc,margin_sign"]
    for r in reports:
        lines.append(
            ",".join(
                [
                    _fmt(r.rho),
                    _fmt(r.p),
                    str(r.m),
                    str(r.trials),
                    _fmt(r.ratio_Tminus),
                    _fmt(r.ratio_Tc),
                    r.margin_sign,
                ]
            )
        )
    return "\n".join(lines) + "\n"
