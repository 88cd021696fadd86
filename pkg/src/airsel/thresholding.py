"""Two-component 1-D Gaussian mixture fit and the adaptive similarity threshold."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


@dataclass(frozen=True)
class ThresholdParams:
    gamma: float = 0.7
    max_iterations: int = 200
    ll_tolerance: float = 1e-6
    variance_floor: float = 1e-6

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.variance_floor <= 0:
            raise ValueError("variance_floor must be > 0")


@dataclass(frozen=True)
class GaussianComponent:
    mean: float
    std: float
    weight: float


@dataclass(frozen=True)
class Gmm2Fit:
    components: tuple[GaussianComponent, GaussianComponent]
    log_likelihood: float
    converged: bool
    iterations: int
    # total log-likelihood after initialisation and after every EM step
    ll_history: tuple[float, ...] = field(default=(), repr=False)


class DegenerateFit(ValueError):
    """Too few samples or too little spread for a two-cluster fit."""

    def __init__(self, mean: float, reason: str) -> None:
        super().__init__(f"degenerate mixture fit ({reason}); sample mean={mean:.6g}")
        self.mean = mean
        self.reason = reason


def _log_likelihood(x: np.ndarray, mu: np.ndarray, var: np.ndarray, w: np.ndarray) -> tuple[float, np.ndarray]:
    # log of w_k * N(x | mu_k, var_k), shape (2, n)
    log_p = (
        np.log(w)[:, None]
        - _LOG_SQRT_2PI
        - 0.5 * np.log(var)[:, None]
        - 0.5 * (x[None, :] - mu[:, None]) ** 2 / var[:, None]
    )
    log_norm = np.logaddexp(log_p[0], log_p[1])
    return float(log_norm.sum()), log_p - log_norm


def fit_gmm2(samples: Sequence[float], params: ThresholdParams = ThresholdParams()) -> Gmm2Fit:
    """Fit a two-component Gaussian mixture by EM with deterministic initialisation.

    Means start at the 25th/75th percentiles, both variances at the pooled
    sample variance, weights at 0.5. Components come back sorted by mean.

    Raises:
        DegenerateFit: fewer than 4 samples, or sample variance below the floor.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("fit_gmm2 needs at least one sample")
    sample_mean = float(x.mean())
    if x.size < 4:
        raise DegenerateFit(sample_mean, f"{x.size} samples < 4")
    total_var = float(x.var())
    if total_var < params.variance_floor:
        raise DegenerateFit(sample_mean, "variance below floor")

    mu = np.percentile(x, [25.0, 75.0]).astype(float)
    var = np.full(2, max(total_var, params.variance_floor))
    w = np.array([0.5, 0.5])

    ll, log_resp = _log_likelihood(x, mu, var, w)
    history = [ll]
    converged = False
    iterations = 0
    for iterations in range(1, params.max_iterations + 1):
        resp = np.exp(log_resp)
        nk = resp.sum(axis=1)
        # an empty component keeps its previous parameters
        nk_safe = np.where(nk > 0, nk, 1.0)
        new_mu = (resp @ x) / nk_safe
        new_var = (resp * (x[None, :] - new_mu[:, None]) ** 2).sum(axis=1) / nk_safe
        mu = np.where(nk > 0, new_mu, mu)
        var = np.maximum(np.where(nk > 0, new_var, var), params.variance_floor)
        w = np.clip(nk / x.size, 1e-300, None)
        w = w / w.sum()

        new_ll, log_resp = _log_likelihood(x, mu, var, w)
        history.append(new_ll)
        delta = abs(new_ll - ll)
        ll = new_ll
        if delta < params.ll_tolerance:
            converged = True
            break

    order = np.argsort(mu, kind="stable")
    comps = tuple(
        GaussianComponent(float(mu[k]), float(np.sqrt(var[k])), float(w[k])) for k in order
    )
    return Gmm2Fit(comps, ll, converged, iterations, tuple(history))  # type: ignore[arg-type]


def adaptive_threshold(fit: Gmm2Fit | DegenerateFit, params: ThresholdParams = ThresholdParams()) -> float:
    """``max(mu1, mu2) - gamma * max(sigma1, sigma2)``; the sample mean for a degenerate fit."""
    if isinstance(fit, DegenerateFit):
        return fit.mean
    a, b = fit.components
    return max(a.mean, b.mean) - params.gamma * max(a.std, b.std)


def threshold_for_scores(samples: Sequence[float], params: ThresholdParams = ThresholdParams()) -> float:
    try:
        fit: Gmm2Fit | DegenerateFit = fit_gmm2(samples, params)
    except DegenerateFit as exc:
        fit = exc
    return adaptive_threshold(fit, params)
