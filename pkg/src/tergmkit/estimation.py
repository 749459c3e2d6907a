"""Maximum-likelihood fitting of transition models.

fit_exact runs damped Newton on the exact concave log-likelihood with a
halving line search; it stops when the gradient norm falls below
gradient_tolerance * (1 + |loglik|) or successive iterates move less than
convergence_epsilon (tight by default on this path).

fit_sampled implements the simulation-based Newton scheme: per iteration
and per transition it draws B networks from the current model, estimates
the statistic mean and second moment, assembles the Hessian estimate
sum_t (mu mu' - C) and the gradient estimate sum_t (Psi_obs - mu), and
takes a Newton step. B escalates from B_initial to B_boost once successive
iterates come within B_boost_trigger, and the iteration stops when they
come within convergence_epsilon (0.1 by default, matching the published
recipe).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import NetworkSeries
from .model import TransitionTables, TransitionModel, as_theta
from .statistics import StatisticSet, change_scores, evaluate_all
from .util import DataError, NumericalError, substream

__all__ = [
    "FitConfig",
    "FitResult",
    "fit_exact",
    "fit_sampled",
    "random_init",
    "DEFAULT_EXACT_CONFIG",
    "DEFAULT_SAMPLED_CONFIG",
]


@dataclass(frozen=True)
class FitConfig:
    max_iterations: int = 100
    convergence_epsilon: float = 0.1
    gradient_tolerance: float = 1e-6
    B_initial: int = 100
    B_boost: int = 1000
    B_boost_trigger: float = 1.0
    step_damping: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise DataError("max_iterations must be >= 1")
        if not (0.0 < self.step_damping <= 1.0):
            raise DataError("step_damping must lie in (0, 1]")
        if self.convergence_epsilon <= 0 or self.gradient_tolerance <= 0:
            raise DataError("tolerances must be positive")
        if self.B_initial < 1 or self.B_boost < 1:
            raise DataError("sample sizes must be >= 1")

    @classmethod
    def from_dict(cls, d, **defaults):
        merged = dict(defaults)
        merged.update(d or {})
        known = {f for f in cls.__dataclass_fields__}
        bad = set(merged) - known
        if bad:
            raise DataError(f"unknown fit config keys: {sorted(bad)}")
        return cls(**merged)


DEFAULT_EXACT_CONFIG = FitConfig(convergence_epsilon=1e-8)
DEFAULT_SAMPLED_CONFIG = FitConfig()

_MAX_SAMPLED_MOVE = 25.0


@dataclass
class FitResult:
    theta_hat: np.ndarray
    log_likelihood: float | None
    gradient_norm: float | None
    iterations: int
    converged: bool
    reason: str | None
    method: str
    stat_names: tuple
    trace: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    @property
    def fatal(self):
        """True when a diagnostic marks the result as numerically invalid."""
        return any(d.startswith(("separation", "non-finite", "diverging")) for d in self.diagnostics)

    def to_dict(self):
        return {
            "theta_hat": [float(x) for x in self.theta_hat],
            "log_likelihood": self.log_likelihood,
            "gradient_norm": self.gradient_norm,
            "iterations": self.iterations,
            "converged": self.converged,
            "reason": self.reason,
            "method": self.method,
            "statistics": list(self.stat_names),
            "trace": self.trace,
            "diagnostics": list(self.diagnostics),
        }


def _solve_ascent(h, g):
    """Newton ascent direction -H^{-1} g with ridge fallback.

    Returns (direction, regularized_flag). h is the (negative semidefinite)
    Hessian; the ridge h - lam*I restores invertibility when needed.
    """
    try:
        d = np.linalg.solve(h, g)
        if np.isfinite(d).all():
            return -d, False
    except np.linalg.LinAlgError:
        pass
    lam = 1e-8 * max(1.0, float(np.abs(np.diag(h)).max()))
    for _ in range(16):
        try:
            d = np.linalg.solve(h - lam * np.eye(h.shape[0]), g)
            if np.isfinite(d).all():
                return -d, True
        except np.linalg.LinAlgError:
            pass
        lam *= 10.0
    raise NumericalError("Hessian solve failed even with ridge regularization")


def _separation_diagnostics(tables):
    lo, hi = tables.statistic_extremes()
    obs = tables.observed
    out = []
    for k, name in enumerate(tables.stats.names):
        tol_hi = 1e-9 * (1.0 + np.abs(hi[:, k]))
        tol_lo = 1e-9 * (1.0 + np.abs(lo[:, k]))
        span = hi[:, k] - lo[:, k]
        if (span <= tol_hi).all():
            continue
        if (obs[:, k] >= hi[:, k] - tol_hi).all():
            out.append(f"separation: statistic {name} at its maximum in every transition")
        elif (obs[:, k] <= lo[:, k] + tol_lo).all():
            out.append(f"separation: statistic {name} at its minimum in every transition")
    return out


def fit_exact(stats, series, labels=None, config=None, theta_init=None, transitions=None):
    """Exact MLE by damped Newton.

    Parameters
    ----------
    stats : StatisticSet or iterable of names
    series : NetworkSeries (T >= 2)
    labels : node labels; defaults to the series' attribute table
    config : FitConfig; the exact-path default uses convergence_epsilon=1e-8
    theta_init : starting point, zeros by default
    transitions : optional subset of transition indices (2-based)
    """
    config = config or DEFAULT_EXACT_CONFIG
    stats = stats if isinstance(stats, StatisticSet) else StatisticSet.from_names(stats)
    tables = TransitionTables(stats, series, labels, transitions)
    k = tables.k
    theta = np.zeros(k) if theta_init is None else as_theta(theta_init, k)

    ll = tables.log_likelihood(theta)
    grad = tables.gradient(theta)
    trace = []
    # a statistic observed at an achievable extreme in every transition has
    # no finite maximizer, whatever the stopping rule later reports
    diagnostics = _separation_diagnostics(tables)
    converged = False
    reason = None
    iterations = 0

    for it in range(1, config.max_iterations + 1):
        iterations = it
        h = tables.hessian(theta)
        try:
            direction, regularized = _solve_ascent(h, grad)
        except NumericalError as e:
            diagnostics.append(f"non-finite Newton direction: {e}")
            break
        step = config.step_damping
        theta_new = theta + step * direction
        ll_new = tables.log_likelihood(theta_new)
        halvings = 0
        while (not np.isfinite(ll_new)) or ll_new < ll - 1e-12 * (1.0 + abs(ll)):
            halvings += 1
            if halvings > 40:
                break
            step *= 0.5
            theta_new = theta + step * direction
            ll_new = tables.log_likelihood(theta_new)
        if halvings > 40 or not np.isfinite(ll_new):
            diagnostics.append("non-finite or decreasing likelihood at any step size")
            break
        grad_new = tables.gradient(theta_new)
        move = float(np.linalg.norm(theta_new - theta))
        trace.append(
            {
                "iteration": it,
                "theta": [float(x) for x in theta_new],
                "log_likelihood": float(ll_new),
                "gradient_norm": float(np.linalg.norm(grad_new)),
                "step": float(step),
                "regularized": bool(regularized),
            }
        )
        theta, ll, grad = theta_new, ll_new, grad_new
        if np.linalg.norm(grad) <= config.gradient_tolerance * (1.0 + abs(ll)):
            converged, reason = True, "gradient"
            break
        if move < config.convergence_epsilon:
            converged, reason = True, "step"
            break
        if np.linalg.norm(theta) > 1e8:
            diagnostics.append("diverging parameter vector (|theta| > 1e8)")
            break

    return FitResult(
        theta_hat=theta,
        log_likelihood=float(ll),
        gradient_norm=float(np.linalg.norm(grad)),
        iterations=iterations,
        converged=converged,
        reason=reason,
        method="exact",
        stat_names=stats.names,
        trace=trace,
        diagnostics=diagnostics,
    )


def _sampled_moments(model, previous, rng, B):
    """Monte Carlo statistic mean and raw second moment for one transition."""
    if model.is_factorized:
        table = change_scores(model.stats, previous, model.labels)
        eta = table.linear_predictor(model.theta)
        p = 0.5 * (1.0 + np.tanh(0.5 * eta))
        np.fill_diagonal(p, 0.0)
        draws = (rng.random((B,) + p.shape) < p[None, :, :]).astype(float)
        psi = table.base[None, :] + np.einsum("bij,kij->bk", draws, table.delta)
    else:
        from .sampling import SamplerConfig, sample_transition_gibbs

        nets = sample_transition_gibbs(model, previous, SamplerConfig(B=B), rng=rng)
        psi = np.array(
            [evaluate_all(model.stats, net, previous, model.labels) for net in nets]
        )
    mu = psi.mean(axis=0)
    c = psi.T @ psi / B
    return mu, c


def fit_sampled(stats, series, labels=None, config=None, theta_init=None, transitions=None,
                moment_estimator=None):
    """Simulation-based Newton MLE (see module docstring for the scheme)."""
    config = config or DEFAULT_SAMPLED_CONFIG
    stats = stats if isinstance(stats, StatisticSet) else StatisticSet.from_names(stats)
    if not isinstance(series, NetworkSeries):
        series = NetworkSeries(series)
    if labels is None:
        labels = series.attributes
    if transitions is None:
        transitions = range(2, series.T + 1)
    transitions = sorted(set(int(t) for t in transitions))
    if series.T < 2 or not transitions:
        raise DataError("a series needs T >= 2 networks to define transitions")
    prevs = [series[t - 2] for t in transitions]
    psi_obs = np.array(
        [
            evaluate_all(stats, series[t - 1], series[t - 2], labels)
            for t in transitions
        ]
    )
    k = stats.k
    theta = np.zeros(k) if theta_init is None else as_theta(theta_init, k)
    estimate = moment_estimator or _sampled_moments

    B = config.B_initial
    boosted = False
    trace = []
    diagnostics = []
    converged = False
    iterations = 0

    for it in range(1, config.max_iterations + 1):
        iterations = it
        model = TransitionModel(stats, theta, labels)
        grad_hat = np.zeros(k)
        hess_hat = np.zeros((k, k))
        for row, prev in enumerate(prevs):
            rng = substream(config.seed, "fit-sampled", it, row)
            mu, c = estimate(model, prev, rng, B)
            grad_hat += psi_obs[row] - mu
            hess_hat += np.outer(mu, mu) - c
        try:
            direction, regularized = _solve_ascent(hess_hat, grad_hat)
        except NumericalError as e:
            diagnostics.append(f"non-finite Newton direction: {e}")
            break
        # Near-degenerate chains give simulated moments with vanishing
        # covariance, and the raw Newton step is then unbounded. Capping the
        # move keeps iterates finite without changing healthy fits, whose
        # steps sit far below the cap.
        norm = float(np.linalg.norm(direction))
        if norm > _MAX_SAMPLED_MOVE:
            direction = direction * (_MAX_SAMPLED_MOVE / norm)
            regularized = True
        step = config.step_damping
        theta_new = theta + step * direction
        retries = 0
        while not np.isfinite(theta_new).all():
            retries += 1
            if retries > 10:
                break
            step *= 0.5
            theta_new = theta + step * direction
        if not np.isfinite(theta_new).all():
            diagnostics.append("non-finite update in sampled Newton step")
            break
        move = float(np.linalg.norm(theta_new - theta))
        trace.append(
            {
                "iteration": it,
                "theta": [float(x) for x in theta_new],
                "B": int(B),
                "step": float(step),
                "gradient_norm": float(np.linalg.norm(grad_hat)),
                "regularized": bool(regularized),
            }
        )
        theta = theta_new
        if move < config.convergence_epsilon:
            converged = True
            break
        if not boosted and move < config.B_boost_trigger:
            B = config.B_boost
            boosted = True
        if np.linalg.norm(theta) > 1e8:
            diagnostics.append("diverging parameter vector (|theta| > 1e8)")
            break

    ll = None
    grad_norm = None
    if stats.is_factorized:
        tables = TransitionTables(stats, series, labels, transitions)
        ll = float(tables.log_likelihood(theta))
        grad_norm = float(np.linalg.norm(tables.gradient(theta)))
    return FitResult(
        theta_hat=theta,
        log_likelihood=ll,
        gradient_norm=grad_norm,
        iterations=iterations,
        converged=converged,
        reason="step" if converged else None,
        method="sampled",
        stat_names=stats.names,
        trace=trace,
        diagnostics=diagnostics,
    )


def random_init(stats, scheme="density-offset", low=0.0, high=10.0, seed=0, rng=None):
    """Random starting parameters.

    ``uniform`` draws every component from U[low, high). ``density-offset``
    needs exactly the {D, S, R, T} set: the S, R, T weights are drawn from
    U[low, high) and the D weight is set to -5 times their sum, which keeps
    simulated networks away from empty/complete extremes.
    """
    stats = stats if isinstance(stats, StatisticSet) else StatisticSet.from_names(stats)
    rng = rng if rng is not None else substream(seed, "init")
    if scheme == "uniform":
        return rng.uniform(low, high, size=stats.k)
    if scheme == "density-offset":
        if set(stats.names) != {"D", "S", "R", "T"}:
            raise DataError("density-offset initialization needs exactly the {D,S,R,T} set")
        draw = {name: float(rng.uniform(low, high)) for name in ("S", "R", "T")}
        draw["D"] = -5.0 * (draw["S"] + draw["R"] + draw["T"])
        return np.array([draw[name] for name in stats.names])
    raise DataError(f"unknown initialization scheme {scheme!r}")
