"""Hypothesis testing and transductive label classification.

likelihood_ratio_test compares two nested edge-factorized models. The
likelihood ratio exp(L_null - L_alt) has no usable asymptotic reference
distribution here, so the p-value is the worst case over null parameters
of the probability of a ratio at most as large as observed, estimated by
parametric bootstrap: simulate sequences from candidate null parameters
(first network fixed to the observed one), refit both models on each, and
take the empirical frequency. A genetic algorithm searches candidate null
parameters for the supremum; the returned p-value is a running max over
every candidate ever evaluated, so a larger search budget can only raise
it.

mcgem_classify imputes unknown node labels by Monte Carlo generalized EM:
the E-step Gibbs-samples unknown labels from their posterior under the
current parameters, the M-step performs a single Newton update on the
sampled average of the complete-data gradient and Hessian. Prediction is
the per-node sample mode under the final parameters.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, fields

import numpy as np

from .estimation import (
    DEFAULT_EXACT_CONFIG,
    FitResult,
    _solve_ascent,
    fit_exact,
)
from .graphs import NetworkSeries, NodeAttributeTable
from .model import TransitionModel, TransitionTables, _softplus
from .sampling import SamplerConfig, simulate_chain
from .statistics import StatisticSet
from .util import DataError, NumericalError, parallel_map, substream

__all__ = [
    "HypothesisSpec",
    "GAConfig",
    "TestResult",
    "likelihood_ratio_test",
    "MCGEMConfig",
    "ClassificationResult",
    "mcgem_classify",
    "majority_label",
    "majority_baseline",
]


# ---------------------------------------------------------------------------
# likelihood-ratio test


@dataclass(frozen=True)
class HypothesisSpec:
    """Model pair under test. The models need not be nested: a null with
    plain reciprocity against an alternative that splits it by label is a
    legitimate comparison, and the ratio is then free to exceed 1."""

    null_stats: StatisticSet
    alt_stats: StatisticSet

    def __post_init__(self):
        for attr in ("null_stats", "alt_stats"):
            v = getattr(self, attr)
            if not isinstance(v, StatisticSet):
                object.__setattr__(self, attr, StatisticSet.from_names(v))
        if not self.null_stats.is_factorized or not self.alt_stats.is_factorized:
            raise DataError("both hypothesis models must be edge-factorized")

    @property
    def nested(self):
        """True when every null statistic appears in the alternative."""
        return set(self.null_stats.names) <= set(self.alt_stats.names)


@dataclass(frozen=True)
class GAConfig:
    """Genetic-algorithm budget and operators for the p-value search."""

    population: int = 20
    generations: int = 30
    mutation_sigma_initial: float = 10.0
    sigma_decay: float = 0.9
    tournament_size: int = 3
    sequences_per_candidate: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.population < 2:
            raise DataError("population must be >= 2")
        if self.generations < 1 or self.sequences_per_candidate < 1:
            raise DataError("generations and sequences_per_candidate must be positive")
        if not (0.0 < self.sigma_decay < 1.0):
            raise DataError("sigma_decay must lie in (0, 1)")
        if self.mutation_sigma_initial < 0.0:
            raise DataError("mutation_sigma_initial must be >= 0")
        if self.tournament_size < 1:
            raise DataError("tournament_size must be >= 1")

    @classmethod
    def from_dict(cls, d, **defaults):
        known = {f.name for f in fields(cls)}
        bad = set(d) - known
        if bad:
            raise DataError(f"unknown GA config keys: {sorted(bad)}")
        merged = dict(defaults)
        merged.update(d)
        return cls(**merged)


@dataclass
class TestResult:
    lr_statistic: float
    log_lr: float
    p_value: float
    null_fit: FitResult
    alt_fit: FitResult
    best_theta_null: np.ndarray
    ga_trace: list = field(default_factory=list)
    sequences_total: int = 0
    sequences_dropped: int = 0
    diagnostics: list = field(default_factory=list)

    def to_dict(self):
        return {
            "lr_statistic": self.lr_statistic,
            "log_lr": self.log_lr,
            "p_value": self.p_value,
            "null_fit": self.null_fit.to_dict(),
            "alt_fit": self.alt_fit.to_dict(),
            "best_theta_null": [float(x) for x in self.best_theta_null],
            "ga_trace": self.ga_trace,
            "sequences_total": self.sequences_total,
            "sequences_dropped": self.sequences_dropped,
            "diagnostics": list(self.diagnostics),
        }


def _embed(null_stats, alt_stats, theta_null):
    """Lift null parameters into the alternative's coordinates.

    Shared statistics carry their weight over; everything else starts at
    zero. Null statistics absent from the alternative are dropped, which
    is the best warm start available for a non-nested pair.
    """
    pos = {name: j for j, name in enumerate(alt_stats.names)}
    out = np.zeros(alt_stats.k)
    for i, name in enumerate(null_stats.names):
        if name in pos:
            out[pos[name]] = theta_null[i]
    return out


def _ratio(ll_null, ll_alt, clamp):
    d = ll_null - ll_alt
    if clamp:
        d = min(d, 0.0)
    return float(np.exp(d))


def likelihood_ratio_test(spec, series, ga=None, fit_config=None, threads=1):
    """Likelihood-ratio test with a simulated worst-case p-value.

    For nested pairs the ratio is clamped at 1, where the maximized null
    likelihood provably cannot exceed the alternative's; non-nested pairs
    report the raw ratio.

    Parameters
    ----------
    spec : HypothesisSpec, or a (null, alt) pair of statistic name lists
    series : NetworkSeries with T >= 2
    ga : GAConfig search budget
    fit_config : FitConfig used for every exact fit (observed and simulated)
    threads : candidate evaluations run in a pool of this size
    """
    if not isinstance(spec, HypothesisSpec):
        spec = HypothesisSpec(*spec)
    ga = ga or GAConfig()
    fit_config = fit_config or DEFAULT_EXACT_CONFIG
    if not isinstance(series, NetworkSeries):
        series = NetworkSeries(series)

    null_fit = fit_exact(spec.null_stats, series, config=fit_config)
    alt_fit = fit_exact(
        spec.alt_stats,
        series,
        config=fit_config,
        theta_init=_embed(spec.null_stats, spec.alt_stats, null_fit.theta_hat),
    )
    diagnostics = []
    for label, fit in (("null", null_fit), ("alternative", alt_fit)):
        if fit.fatal:
            raise NumericalError(
                f"{label} fit failed on the observed series: {fit.diagnostics}"
            )
        if not fit.converged:
            diagnostics.append(f"{label} fit did not converge on the observed series")

    nested = spec.nested
    log_lr = null_fit.log_likelihood - alt_fit.log_likelihood
    if nested and log_lr > 1e-6 * (1.0 + abs(alt_fit.log_likelihood)):
        diagnostics.append(
            "null likelihood exceeded the alternative's beyond tolerance; ratio clamped to 1"
        )
    lr_obs = _ratio(null_fit.log_likelihood, alt_fit.log_likelihood, nested)

    labels = series.attributes
    needs_labels = spec.null_stats.requires_labels or spec.alt_stats.requires_labels
    if needs_labels and labels is None:
        raise DataError("label-dependent statistics need a series with node labels")
    null_labels = labels if spec.null_stats.requires_labels else None
    first = series[0]
    T = series.T
    k0 = spec.null_stats.k

    def evaluate_candidate(args):
        gen, idx, theta_c = args
        model = TransitionModel(spec.null_stats, theta_c, labels=null_labels)
        hits = kept = dropped = 0
        for s in range(ga.sequences_per_candidate):
            sim_seed = int(substream(ga.seed, "sim", gen, idx, s).integers(0, 2**63))
            sim = simulate_chain(model, first, T, SamplerConfig(seed=sim_seed))
            if labels is not None:
                sim = sim.replace(attributes=labels)
            try:
                f0 = fit_exact(spec.null_stats, sim, config=fit_config, theta_init=theta_c)
                f1 = fit_exact(
                    spec.alt_stats,
                    sim,
                    config=fit_config,
                    theta_init=_embed(spec.null_stats, spec.alt_stats, f0.theta_hat),
                )
            except NumericalError:
                dropped += 1
                continue
            if f0.fatal or f1.fatal:
                dropped += 1
                continue
            kept += 1
            if _ratio(f0.log_likelihood, f1.log_likelihood, nested) <= lr_obs + 1e-12:
                hits += 1
        freq = hits / kept if kept else 0.0
        return freq, kept, dropped

    population = np.empty((ga.population, k0))
    population[0] = null_fit.theta_hat
    for idx in range(1, ga.population):
        rng = substream(ga.seed, "ga", 0, idx)
        population[idx] = null_fit.theta_hat + rng.normal(0.0, ga.mutation_sigma_initial, k0)

    p_value = 0.0
    best_theta = population[0].copy()
    total = dropped_total = 0
    fitness = np.zeros(ga.population)
    ga_trace = []

    for gen in range(ga.generations):
        if gen == 0:
            todo = list(range(ga.population))
        else:
            sigma = ga.mutation_sigma_initial * ga.sigma_decay**gen
            elite = int(np.argmax(fitness))
            new_pop = np.empty_like(population)
            new_fit = np.zeros(ga.population)
            new_pop[0] = population[elite]
            new_fit[0] = fitness[elite]
            for idx in range(1, ga.population):
                rng = substream(ga.seed, "ga", gen, idx)
                contenders = rng.integers(0, ga.population, ga.tournament_size)
                a = population[contenders[np.argmax(fitness[contenders])]]
                contenders = rng.integers(0, ga.population, ga.tournament_size)
                b = population[contenders[np.argmax(fitness[contenders])]]
                child = np.where(rng.random(k0) < 0.5, a, b)
                new_pop[idx] = child + rng.normal(0.0, sigma, k0)
            population, fitness = new_pop, new_fit
            todo = list(range(1, ga.population))

        results = parallel_map(
            evaluate_candidate,
            [(gen, idx, population[idx].copy()) for idx in todo],
            threads=threads,
        )
        for idx, (freq, kept, drop) in zip(todo, results):
            fitness[idx] = freq
            total += kept + drop
            dropped_total += drop
            if freq > p_value:
                p_value = freq
                best_theta = population[idx].copy()
        ga_trace.append(
            {
                "generation": gen,
                "sigma": float(ga.mutation_sigma_initial * ga.sigma_decay**gen),
                "best_frequency": float(fitness.max()),
                "mean_frequency": float(fitness.mean()),
                "p_value": float(p_value),
                "dropped": int(dropped_total),
            }
        )

    if total and dropped_total / total > 0.05:
        msg = (
            f"{dropped_total} of {total} simulated sequences dropped "
            f"({dropped_total / total:.1%}); p-value may be unreliable"
        )
        diagnostics.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)

    return TestResult(
        lr_statistic=lr_obs,
        log_lr=float(log_lr),
        p_value=float(p_value),
        null_fit=null_fit,
        alt_fit=alt_fit,
        best_theta_null=best_theta,
        ga_trace=ga_trace,
        sequences_total=total,
        sequences_dropped=dropped_total,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# MCGEM label classification


@dataclass(frozen=True)
class MCGEMConfig:
    """EM schedule and Gibbs settings for label imputation."""

    max_iterations: int = 40
    convergence_epsilon: float = 0.1
    gibbs_sweeps: int = 20
    label_samples: int = 50
    final_sweeps: int = 20
    final_samples: int = 100
    seed: int = 0

    def __post_init__(self):
        counts = (
            self.max_iterations,
            self.gibbs_sweeps,
            self.label_samples,
            self.final_sweeps,
            self.final_samples,
        )
        if any(c < 1 for c in counts):
            raise DataError("all MCGEM counts must be >= 1")
        if self.convergence_epsilon <= 0.0:
            raise DataError("convergence_epsilon must be positive")

    @classmethod
    def from_dict(cls, d, **defaults):
        known = {f.name for f in fields(cls)}
        bad = set(d) - known
        if bad:
            raise DataError(f"unknown MCGEM config keys: {sorted(bad)}")
        merged = dict(defaults)
        merged.update(d)
        return cls(**merged)


@dataclass
class ClassificationResult:
    predicted: NodeAttributeTable
    predicted_labels: dict
    mode_frequencies: dict
    theta_hat: np.ndarray
    stat_names: tuple
    objective: float | None
    iterations: int
    converged: bool
    reason: str | None
    accuracy: float | None = None
    trace: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def to_dict(self):
        return {
            "predicted": self.predicted.to_dict(),
            "predicted_labels": {str(k): v for k, v in self.predicted_labels.items()},
            "mode_frequencies": {str(k): v for k, v in self.mode_frequencies.items()},
            "theta_hat": [float(x) for x in self.theta_hat],
            "statistics": list(self.stat_names),
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "reason": self.reason,
            "accuracy": self.accuracy,
            "trace": self.trace,
            "diagnostics": list(self.diagnostics),
        }


class _LabelLikelihood:
    """Complete-data log-likelihood as a function of the label codes.

    Contributions from label-free statistics are cached per theta; only the
    label-dependent change scores are rebuilt when codes change, so one
    node's full conditional costs two likelihood sweeps for a two-letter
    alphabet.
    """

    def __init__(self, stats, series):
        self.stats = stats
        self.n = series.n
        self.plain = [(j, s) for j, s in enumerate(stats) if not s.requires_labels]
        self.labeled = [(j, s) for j, s in enumerate(stats) if s.requires_labels]
        self.prev_nets = [series[t] for t in range(series.T - 1)]
        self.currents = [series[t + 1].matrix for t in range(series.T - 1)]
        self.mask = ~np.eye(series.n, dtype=bool)
        self.plain_deltas = []
        for prev in self.prev_nets:
            rows = [s.change_scores(prev, None)[1] for _, s in self.plain]
            self.plain_deltas.append(np.stack(rows) if rows else None)
        self.theta = None
        self._eta_plain = None

    def set_theta(self, theta):
        self.theta = np.asarray(theta, dtype=float)
        th_plain = np.array([self.theta[j] for j, _ in self.plain])
        self._eta_plain = []
        for deltas in self.plain_deltas:
            if deltas is None:
                self._eta_plain.append(np.zeros((self.n, self.n)))
            else:
                self._eta_plain.append(np.tensordot(th_plain, deltas, axes=(0, 0)))

    def log_likelihood(self, codes):
        total = 0.0
        for row, prev in enumerate(self.prev_nets):
            eta = self._eta_plain[row].copy()
            for j, s in self.labeled:
                _, d = s.change_scores(prev, codes)
                eta += self.theta[j] * d
            cur = self.currents[row]
            ll = -np.where(cur > 0.5, _softplus(-eta), _softplus(eta))
            total += float(ll[self.mask].sum())
        return total

    def sweep(self, codes, unknown, log_prior, rng):
        K = log_prior.shape[0]
        u = rng.random(len(unknown))
        for pos, v in enumerate(unknown):
            logw = np.empty(K)
            saved = codes[v]
            for c in range(K):
                codes[v] = c
                logw[c] = self.log_likelihood(codes) + log_prior[c]
            codes[v] = saved
            logw -= logw.max()
            w = np.exp(logw)
            cum = np.cumsum(w / w.sum())
            codes[v] = min(int(np.searchsorted(cum, u[pos], side="right")), K - 1)


def _resolve_prior(prior, K):
    if prior is None:
        return np.full(K, 1.0 / K)
    p = np.asarray(prior, dtype=float).reshape(-1)
    if p.shape != (K,) or (p <= 0.0).any():
        raise DataError(f"prior must be {K} positive weights")
    return p / p.sum()


def _truth_codes(truth, known, unknown):
    """Codes of the true labels when available, else None."""
    if truth is None:
        codes = known.codes
        return codes if (codes[unknown] >= 0).all() else None
    if isinstance(truth, NodeAttributeTable):
        if truth.alphabet != known.alphabet:
            raise DataError("truth table uses a different alphabet")
        codes = truth.codes
    else:
        lookup = {v: c for c, v in enumerate(known.alphabet)}
        try:
            codes = np.array([lookup[v] for v in truth], dtype=np.int64)
        except KeyError as e:
            raise DataError(f"true label {e.args[0]!r} not in the alphabet") from None
    if codes.shape[0] != known.n or (codes[unknown] < 0).any():
        raise DataError("truth must supply a label for every unknown node")
    return codes


def mcgem_classify(stats, series, known=None, prior=None, config=None, truth=None):
    """Impute unknown node labels and estimate parameters jointly.

    Parameters
    ----------
    stats : statistic set; must include label-dependent statistics
    series : NetworkSeries
    known : NodeAttributeTable with observed flags; defaults to the series'
        attributes. Values stored at unobserved positions are treated as
        hidden truth and scored, never used for fitting.
    prior : label prior over the alphabet (uniform by default)
    config : MCGEMConfig
    truth : optional true labels (table or per-node values) for accuracy
    """
    stats = stats if isinstance(stats, StatisticSet) else StatisticSet.from_names(stats)
    if not stats.requires_labels:
        raise DataError("classification needs at least one label-dependent statistic")
    if not stats.is_factorized:
        raise DataError("classification needs an edge-factorized statistic set")
    if not isinstance(series, NetworkSeries):
        series = NetworkSeries(series)
    known = known if known is not None else series.attributes
    if known is None:
        raise DataError("classification needs a node attribute table")
    config = config or MCGEMConfig()

    unknown = np.flatnonzero(~known.observed)
    K = len(known.alphabet)
    truth_codes = _truth_codes(truth, known, unknown)

    if unknown.size == 0:
        fit = fit_exact(stats, series, labels=known)
        return ClassificationResult(
            predicted=known,
            predicted_labels={},
            mode_frequencies={},
            theta_hat=fit.theta_hat,
            stat_names=stats.names,
            objective=fit.log_likelihood,
            iterations=fit.iterations,
            converged=fit.converged,
            reason=fit.reason,
            accuracy=None,
            trace=fit.trace,
            diagnostics=list(fit.diagnostics),
        )

    log_prior = np.log(_resolve_prior(prior, K))
    like = _LabelLikelihood(stats, series)

    codes = known.codes.copy()
    init_rng = substream(config.seed, "init")
    codes[unknown] = init_rng.choice(K, size=unknown.size, p=np.exp(log_prior))

    theta = np.zeros(stats.k)
    trace = []
    diagnostics = []
    converged = False
    reason = None
    iterations = 0
    objective = None
    stuck_logged = False

    for it in range(1, config.max_iterations + 1):
        iterations = it
        like.set_theta(theta)
        rng = substream(config.seed, "estep", it)
        for _ in range(config.gibbs_sweeps):
            like.sweep(codes, unknown, log_prior, rng)
        samples = {}
        for _ in range(config.label_samples):
            like.sweep(codes, unknown, log_prior, rng)
            key = codes.tobytes()
            if key in samples:
                samples[key][1] += 1
            else:
                samples[key] = [codes.copy(), 1]
        if len(samples) == 1 and unknown.size > 0 and not stuck_logged:
            diagnostics.append(
                f"label sampler produced a single label vector at iteration {it}"
            )
            stuck_logged = True

        tables = []
        weights = []
        for z, count in samples.values():
            tables.append(TransitionTables(stats, series, labels=z))
            weights.append(count)
        weights = np.array(weights, dtype=float)
        S = weights.sum()

        g = np.zeros(stats.k)
        h = np.zeros((stats.k, stats.k))
        q_old = np.array([tb.log_likelihood(theta) for tb in tables])
        for w, tb in zip(weights, tables):
            g += w * tb.gradient(theta)
            h += w * tb.hessian(theta)
        g /= S
        h /= S

        direction, regularized = _solve_ascent(h, g)
        theta_new = theta + direction
        if not np.isfinite(theta_new).all():
            diagnostics.append("non-finite Newton update")
            break
        q_new = np.array([tb.log_likelihood(theta_new) for tb in tables])
        diffs = q_new - q_old
        mean_diff = float((weights * diffs).sum() / S)
        var_diff = float((weights * (diffs - mean_diff) ** 2).sum() / S)
        se = (var_diff / S) ** 0.5
        if mean_diff < -2.0 * se:
            diagnostics.append(
                f"objective decreased by {-mean_diff:.3g} (> 2 MC standard errors) "
                f"at iteration {it}"
            )
        objective = float((weights * q_new).sum() / S)
        move = float(np.linalg.norm(theta_new - theta))
        trace.append(
            {
                "iteration": it,
                "theta": [float(x) for x in theta_new],
                "objective": objective,
                "objective_change": mean_diff,
                "step_norm": move,
                "regularized": bool(regularized),
                "unique_label_samples": len(samples),
            }
        )
        theta = theta_new
        if move < config.convergence_epsilon:
            converged, reason = True, "step"
            break

    like.set_theta(theta)
    rng = substream(config.seed, "final")
    for _ in range(config.final_sweeps):
        like.sweep(codes, unknown, log_prior, rng)
    counts = np.zeros((unknown.size, K))
    for _ in range(config.final_samples):
        like.sweep(codes, unknown, log_prior, rng)
        counts[np.arange(unknown.size), codes[unknown]] += 1.0

    modal = counts.argmax(axis=1)
    final_codes = known.codes.copy()
    final_codes[unknown] = modal
    predicted = known.with_codes(final_codes)
    predicted_labels = {int(v): known.alphabet[modal[i]] for i, v in enumerate(unknown)}
    mode_frequencies = {
        int(v): float(counts[i, modal[i]] / config.final_samples)
        for i, v in enumerate(unknown)
    }
    accuracy = None
    if truth_codes is not None:
        accuracy = float((modal == truth_codes[unknown]).mean())

    return ClassificationResult(
        predicted=predicted,
        predicted_labels=predicted_labels,
        mode_frequencies=mode_frequencies,
        theta_hat=theta,
        stat_names=stats.names,
        objective=objective,
        iterations=iterations,
        converged=converged,
        reason=reason,
        accuracy=accuracy,
        trace=trace,
        diagnostics=diagnostics,
    )


def majority_label(known):
    """Most frequent label among observed nodes; ties go to alphabet order."""
    observed_codes = known.codes[known.observed]
    counts = np.bincount(observed_codes[observed_codes >= 0], minlength=len(known.alphabet))
    return known.alphabet[int(np.argmax(counts))]


def majority_baseline(known, unknown_truth=None):
    """Accuracy of always predicting the observed majority label."""
    unknown = np.flatnonzero(~known.observed)
    if unknown.size == 0:
        raise DataError("majority baseline needs at least one unknown node")
    truth_codes = _truth_codes(unknown_truth, known, unknown)
    if truth_codes is None:
        raise DataError("majority baseline needs true labels for the unknown nodes")
    majority = known.alphabet.index(majority_label(known))
    return float((truth_codes[unknown] == majority).mean())
