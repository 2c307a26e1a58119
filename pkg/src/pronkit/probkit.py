"""Closed-form Bayesian toolbox: discrete posteriors, the conjugate
Gaussian update, and Gaussian-process regression with RBF/linear kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import PronkitError


class ZeroEvidenceError(PronkitError):
    """Observed evidence has zero probability under every outcome."""


class SingularGramError(PronkitError):
    """The noisy Gram matrix is not positive definite even with jitter."""


class DimMismatchError(PronkitError):
    """Kernel inputs have different dimensionality."""


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite distribution over hashable outcomes."""

    outcomes: tuple[Hashable, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.outcomes) != len(self.probs):
            raise ValueError("outcomes and probs must have equal length")
        if len(set(self.outcomes)) != len(self.outcomes):
            raise ValueError("outcomes must be unique")
        if any(p < 0 for p in self.probs):
            raise ValueError("probabilities must be non-negative")
        if abs(sum(self.probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {sum(self.probs)}, not 1")

    def prob_of(self, outcome: Hashable) -> float:
        return self.probs[self.outcomes.index(outcome)]

    @classmethod
    def from_dict(cls, table: Mapping[Hashable, float]) -> "DiscreteDistribution":
        return cls(tuple(table.keys()), tuple(float(v) for v in table.values()))


def discrete_posterior(
    prior: DiscreteDistribution,
    cpt: Mapping[Hashable, DiscreteDistribution],
    evidence: Hashable,
) -> DiscreteDistribution:
    """Bayes-rule update of a discrete prior given one observed evidence value.

    ``cpt[x]`` is the distribution of the evidence variable conditioned on
    outcome ``x``; the posterior is prior times likelihood, renormalized.
    """
    weights = []
    for outcome, p in zip(prior.outcomes, prior.probs):
        if outcome not in cpt:
            raise ValueError(f"cpt missing outcome {outcome!r}")
        weights.append(p * cpt[outcome].prob_of(evidence))
    total = sum(weights)
    if total == 0:
        raise ZeroEvidenceError(f"evidence {evidence!r} has zero total probability")
    return DiscreteDistribution(prior.outcomes, tuple(w / total for w in weights))


@dataclass(frozen=True)
class GaussianBelief:
    mean: float
    variance: float

    def __post_init__(self):
        if self.variance <= 0:
            raise ValueError("variance must be > 0")


def gaussian_posterior(
    prior: GaussianBelief, obs_noise_var: float, observations: Sequence[float]
) -> GaussianBelief:
    """Conjugate update of a Gaussian belief from iid noisy observations.

    The posterior mean weighs the prior mean against the sample mean by
    the noise and prior variances; no observations return the prior
    unchanged.
    """
    if obs_noise_var <= 0:
        raise ValueError("observation noise variance must be > 0")
    n = len(observations)
    if n == 0:
        return prior
    sample_mean = sum(observations) / n
    denom = n * prior.variance + obs_noise_var
    post_mean = (obs_noise_var * prior.mean + n * prior.variance * sample_mean) / denom
    post_var = 1.0 / (1.0 / prior.variance + n / obs_noise_var)
    return GaussianBelief(post_mean, post_var)


@dataclass(frozen=True)
class RbfKernel:
    """Squared-exponential covariance: smooth functions, local similarity."""

    variance: float = 1.0
    lengthscale: float = 1.0

    def __post_init__(self):
        if self.variance <= 0 or self.lengthscale <= 0:
            raise ValueError("variance and lengthscale must be > 0")

    def evaluate(self, xi: np.ndarray, xj: np.ndarray) -> float:
        sq = float(np.sum((xi - xj) ** 2))
        return self.variance * float(np.exp(-sq / (2.0 * self.lengthscale**2)))


@dataclass(frozen=True)
class LinearKernel:
    """Dot-product covariance around an offset; Bayesian linear regression."""

    bias_variance: float = 0.0
    weight_variance: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if self.bias_variance < 0:
            raise ValueError("bias variance must be >= 0")
        if self.weight_variance <= 0:
            raise ValueError("weight variance must be > 0")

    def evaluate(self, xi: np.ndarray, xj: np.ndarray) -> float:
        return self.bias_variance + self.weight_variance * float(
            np.dot(xi - self.offset, xj - self.offset)
        )


Kernel = RbfKernel | LinearKernel


def _as_vector(x) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise DimMismatchError(f"expected a feature vector, got shape {v.shape}")
    return v


def kernel_eval(kernel: Kernel, xi, xj) -> float:
    """Covariance between two (equal-dimension) feature vectors."""
    vi, vj = _as_vector(xi), _as_vector(xj)
    if vi.shape != vj.shape:
        raise DimMismatchError(f"{vi.shape} vs {vj.shape}")
    return kernel.evaluate(vi, vj)


def gram_matrix(kernel: Kernel, xs: Sequence) -> np.ndarray:
    vectors = [_as_vector(x) for x in xs]
    n = len(vectors)
    gram = np.empty((n, n), dtype=float)
    for i in range(n):
        for j in range(i, n):
            gram[i, j] = gram[j, i] = kernel_eval(kernel, vectors[i], vectors[j])
    return gram


_JITTERS = (0.0, 1e-10, 1e-8, 1e-6)


def _chol_with_jitter(matrix: np.ndarray) -> np.ndarray:
    for jitter in _JITTERS:
        try:
            return np.linalg.cholesky(matrix + jitter * np.eye(len(matrix)))
        except np.linalg.LinAlgError:
            continue
    raise SingularGramError("Gram matrix not positive definite up to jitter 1e-6")


def gp_posterior(
    train_x: Sequence,
    train_y: Sequence[float],
    kernel: Kernel,
    obs_noise_var: float,
    query_x,
) -> tuple[float, float]:
    """Exact Gaussian-process posterior (mean, variance) at one query point.

    Solves with a Cholesky factorization of the noisy Gram matrix,
    escalating a diagonal jitter before giving up; the returned variance is
    clamped at zero after a -1e-9 tolerance.
    """
    if len(train_x) == 0:
        raise ValueError("need at least one training point")
    if len(train_x) != len(train_y):
        raise ValueError("train_x and train_y must have equal length")
    if obs_noise_var < 0:
        raise ValueError("observation noise variance must be >= 0")
    q = _as_vector(query_x)
    gram = gram_matrix(kernel, train_x) + obs_noise_var * np.eye(len(train_x))
    chol = _chol_with_jitter(gram)
    y = np.asarray(train_y, dtype=float)
    k_star = np.array([kernel_eval(kernel, q, x) for x in train_x])

    alpha = np.linalg.solve(chol.T, np.linalg.solve(chol, y))
    mean = float(k_star @ alpha)
    v = np.linalg.solve(chol, k_star)
    var = kernel_eval(kernel, q, q) - float(v @ v)
    if var < -1e-9:
        raise SingularGramError(f"posterior variance {var} below tolerance")
    return mean, max(var, 0.0)
