"""Synthetic one-dimensional classification tasks with known ground truth.

The data-generating distribution is a set of class priors plus per-class
Gaussian mixtures. Label acquisition is modelled by an explicit sampling
distribution q(x): either the data marginal itself (unbiased acquisition)
or a symmetric two-component Gaussian mixture placed at a distance ``d``
on both sides of the optimal decision boundary, which stands in for an
informed selection strategy. Labels come from a stochastic oracle that
draws from the true class posterior, so label noise near the boundary is
preserved.

Closed-form quantities (posterior, marginal density, Bayes accuracy) are
exposed so they can serve as reference values elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import ValidationError

# Quadrature support; tail mass beyond this interval is < 1e-15 for all
# configured tasks.
SUPPORT = (-10.0, 10.0)

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_PROB_TOL = 1e-12
_QUAD_RESIDUAL_TOL = 1e-8

DATA_MARGINAL = "data-marginal"
SYMMETRIC_MIXTURE = "symmetric-mixture"


@dataclass(frozen=True)
class GaussianComponent:
    """One mixture component: N(mean, std^2) with a mixture weight."""

    weight: float
    mean: float
    std: float

    def __post_init__(self):
        if not (0.0 <= self.weight <= 1.0):
            raise ValidationError(f"component weight must be in [0,1], got {self.weight}")
        if not (self.std > 0.0 and math.isfinite(self.std)):
            raise ValidationError(f"component std must be > 0, got {self.std}")
        if not math.isfinite(self.mean):
            raise ValidationError(f"component mean must be finite, got {self.mean}")


@dataclass(frozen=True)
class TaskModel:
    """Data-generating distribution: class priors plus per-class Gaussian mixtures.

    Classes are indexed 1..C. The feature space is one-dimensional; ``dim``
    is carried for forward compatibility but only 1 is supported.
    """

    class_priors: tuple[float, ...]
    class_components: tuple[tuple[GaussianComponent, ...], ...]
    dim: int = 1

    def __post_init__(self):
        if self.dim != 1:
            raise ValidationError(f"only dim=1 is supported, got {self.dim}")
        if len(self.class_priors) < 2:
            raise ValidationError("a task needs at least 2 classes")
        if len(self.class_components) != len(self.class_priors):
            raise ValidationError(
                "class_components and class_priors must have the same length"
            )
        if any(p < 0.0 for p in self.class_priors):
            raise ValidationError("class priors must be nonnegative")
        if abs(sum(self.class_priors) - 1.0) > _PROB_TOL:
            raise ValidationError(
                f"class priors must sum to 1 within {_PROB_TOL}, got {sum(self.class_priors)!r}"
            )
        for c, comps in enumerate(self.class_components):
            if not comps:
                raise ValidationError(f"class {c + 1} has no mixture components")
            total = sum(comp.weight for comp in comps)
            if abs(total - 1.0) > _PROB_TOL:
                raise ValidationError(
                    f"component weights of class {c + 1} must sum to 1 within {_PROB_TOL}, got {total!r}"
                )

    @property
    def class_count(self) -> int:
        return len(self.class_priors)


def default_task() -> TaskModel:
    """Two equiprobable unit-variance classes centered at -1.5 and +1.5."""
    return TaskModel(
        class_priors=(0.5, 0.5),
        class_components=(
            (GaussianComponent(1.0, -1.5, 1.0),),
            (GaussianComponent(1.0, 1.5, 1.0),),
        ),
    )


@dataclass(frozen=True)
class SamplingDistribution:
    """Acquisition distribution q(x) standing in for a selection strategy.

    ``data-marginal`` reproduces unbiased sampling from the task marginal.
    ``symmetric-mixture`` places two Gaussians at -d and +d (default width
    1/4) around the optimal decision boundary; small d concentrates labels
    in the ambiguous region, large d keeps them far from it.
    """

    kind: str
    d: float = 0.0
    component_std: float = 0.25
    component_priors: tuple[float, float] = (0.5, 0.5)

    def __post_init__(self):
        if self.kind not in (DATA_MARGINAL, SYMMETRIC_MIXTURE):
            raise ValidationError(f"unknown sampling distribution kind {self.kind!r}")
        if self.kind == SYMMETRIC_MIXTURE:
            if not (self.component_std > 0.0 and math.isfinite(self.component_std)):
                raise ValidationError(
                    f"component_std must be > 0, got {self.component_std}"
                )
            if self.d < 0.0 or not math.isfinite(self.d):
                raise ValidationError(f"d must be a finite distance >= 0, got {self.d}")
            if len(self.component_priors) != 2 or any(
                p < 0.0 for p in self.component_priors
            ):
                raise ValidationError("component_priors must be a nonnegative pair")
            if abs(sum(self.component_priors) - 1.0) > _PROB_TOL:
                raise ValidationError(
                    f"component_priors must sum to 1, got {sum(self.component_priors)!r}"
                )

    def label(self) -> str:
        """Stable identifier used in run records and file outputs."""
        if self.kind == DATA_MARGINAL:
            return "unbiased"
        return f"biased-d{self.d:g}"


def unbiased_sampler() -> SamplingDistribution:
    return SamplingDistribution(kind=DATA_MARGINAL)


@dataclass(frozen=True)
class UnlabeledSample:
    """A feature value without a label."""

    x: float

    def __post_init__(self):
        if not math.isfinite(self.x):
            raise ValidationError(f"sample x must be finite, got {self.x}")


@dataclass(frozen=True)
class LabeledSample:
    """A feature value, its oracle label, and the acquisition density q(x).

    The sampling density is recorded at acquisition time so estimators that
    correct for sampling bias never need the SamplingDistribution object.
    """

    x: float
    y: int
    sampling_density: float

    def __post_init__(self):
        if not math.isfinite(self.x):
            raise ValidationError(f"sample x must be finite, got {self.x}")
        if not (isinstance(self.y, (int, np.integer)) and self.y >= 1):
            raise ValidationError(f"label must be a class index >= 1, got {self.y!r}")
        if not (self.sampling_density > 0.0 and math.isfinite(self.sampling_density)):
            raise ValidationError(
                f"sampling_density must be positive and finite, got {self.sampling_density}"
            )


# ---------------------------------------------------------------------------
# Densities and Bayes quantities
# ---------------------------------------------------------------------------


def _normal_pdf(xs: np.ndarray, mean: float, std: float) -> np.ndarray:
    z = (xs - mean) / std
    return np.exp(-0.5 * z * z) / (std * _SQRT_2PI)


def class_conditional_density(model: TaskModel, xs: np.ndarray) -> np.ndarray:
    """p(x|y) for every class; returns an array of shape (len(xs), C)."""
    xs = np.asarray(xs, dtype=np.float64)
    out = np.empty((xs.shape[0], model.class_count))
    for c, comps in enumerate(model.class_components):
        acc = np.zeros_like(xs)
        for comp in comps:
            acc += comp.weight * _normal_pdf(xs, comp.mean, comp.std)
        out[:, c] = acc
    return out


def _joint_density(model: TaskModel, xs: np.ndarray) -> np.ndarray:
    """prior(y) * p(x|y), shape (len(xs), C)."""
    return class_conditional_density(model, xs) * np.asarray(model.class_priors)


def marginal_density(model: TaskModel, xs: np.ndarray) -> np.ndarray:
    """The data marginal sum_y prior(y) p(x|y)."""
    return _joint_density(model, np.asarray(xs, dtype=np.float64)).sum(axis=1)


def bayes_posterior_batch(model: TaskModel, xs: np.ndarray) -> np.ndarray:
    """True posterior p(y|x) for each query; shape (len(xs), C).

    Where every class-conditional density underflows to zero the prior
    vector is returned for that row (documented fallback).
    """
    joint = _joint_density(model, np.asarray(xs, dtype=np.float64))
    total = joint.sum(axis=1)
    out = np.empty_like(joint)
    ok = total > 0.0
    out[ok] = joint[ok] / total[ok, None]
    out[~ok] = np.asarray(model.class_priors)
    return out


def bayes_posterior(model: TaskModel, x: float) -> np.ndarray:
    """True posterior p(y|x) at a single point, as a length-C vector."""
    return bayes_posterior_batch(model, np.array([x], dtype=np.float64))[0]


def sampling_density_batch(
    s: SamplingDistribution, model: TaskModel | None, xs: np.ndarray
) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    if s.kind == DATA_MARGINAL:
        if model is None:
            raise ValidationError("data-marginal sampling density needs a task model")
        return marginal_density(model, xs)
    w_lo, w_hi = s.component_priors
    return w_lo * _normal_pdf(xs, -s.d, s.component_std) + w_hi * _normal_pdf(
        xs, s.d, s.component_std
    )


def sampling_density(
    s: SamplingDistribution, model: TaskModel | None, x: float
) -> float:
    """q(x) for the given acquisition distribution."""
    return float(sampling_density_batch(s, model, np.array([x], dtype=np.float64))[0])


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def _sample_gaussian_mixture(
    means: np.ndarray,
    stds: np.ndarray,
    weights: np.ndarray,
    n: int,
    rng: np.random.Generator,
) -> np.ndarray:
    idx = rng.choice(len(means), size=n, p=weights)
    out = np.empty(n, dtype=np.float64)
    for k in range(len(means)):
        sel = idx == k
        cnt = int(sel.sum())
        if cnt:
            out[sel] = rng.normal(means[k], stds[k], size=cnt)
    return out


def _marginal_mixture(model: TaskModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flatten the class mixtures into one mixture over all components."""
    means, stds, weights = [], [], []
    for prior, comps in zip(model.class_priors, model.class_components):
        for comp in comps:
            means.append(comp.mean)
            stds.append(comp.std)
            weights.append(prior * comp.weight)
    return np.array(means), np.array(stds), np.array(weights)


def draw_x(
    s: SamplingDistribution, model: TaskModel, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw n feature values from the acquisition distribution q."""
    if n < 0:
        raise ValidationError(f"sample count must be >= 0, got {n}")
    if s.kind == DATA_MARGINAL:
        means, stds, weights = _marginal_mixture(model)
    else:
        means = np.array([-s.d, s.d])
        stds = np.array([s.component_std, s.component_std])
        weights = np.asarray(s.component_priors, dtype=np.float64)
    return _sample_gaussian_mixture(means, stds, weights, n, rng)


def oracle_labels(
    model: TaskModel, xs: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Draw labels from the true posterior at each x (stochastic oracle)."""
    post = bayes_posterior_batch(model, xs)
    cum = np.cumsum(post, axis=1)
    u = rng.random(len(xs))
    idx = (u[:, None] >= cum).sum(axis=1)
    idx = np.minimum(idx, model.class_count - 1)
    return (idx + 1).astype(np.int64)


def draw_oracle_arrays(
    model: TaskModel, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Unbiased draws with oracle labels, as raw (x, y) arrays."""
    xs = draw_x(unbiased_sampler(), model, n, rng)
    ys = oracle_labels(model, xs, rng)
    return xs, ys


def draw_labeled_arrays(
    model: TaskModel, s: SamplingDistribution, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Acquisition draws as raw arrays (x, label, sampling density)."""
    xs = draw_x(s, model, n, rng)
    ys = oracle_labels(model, xs, rng)
    qs = sampling_density_batch(s, model, xs)
    return xs, ys, qs


def draw_labeled(
    model: TaskModel, s: SamplingDistribution, n: int, rng: np.random.Generator
) -> list[LabeledSample]:
    """Draw n labeled samples: x from q, y from the true posterior at x."""
    xs, ys, qs = draw_labeled_arrays(model, s, n, rng)
    return [
        LabeledSample(float(x), int(y), float(q)) for x, y, q in zip(xs, ys, qs)
    ]


def draw_unlabeled(
    model: TaskModel, n: int, rng: np.random.Generator
) -> list[UnlabeledSample]:
    """Draw n unlabeled samples from the data marginal."""
    if n < 0:
        raise ValidationError(f"sample count must be >= 0, got {n}")
    xs = draw_x(unbiased_sampler(), model, n, rng)
    return [UnlabeledSample(float(x)) for x in xs]


# ---------------------------------------------------------------------------
# Bayes accuracy
# ---------------------------------------------------------------------------


def _argmax_crossings(model: TaskModel, lo: float, hi: float) -> list[float]:
    """Locate points where the maximizing class of prior*p(x|y) changes."""
    xs = np.linspace(lo, hi, 4001)
    winner = np.argmax(_joint_density(model, xs), axis=1)
    crossings: list[float] = []
    for i in np.nonzero(np.diff(winner))[0]:
        a, b = int(winner[i]), int(winner[i + 1])

        def gap(x: float, a: int = a, b: int = b) -> float:
            row = _joint_density(model, np.array([x]))[0]
            return float(row[a] - row[b])

        ga, gb = gap(float(xs[i])), gap(float(xs[i + 1]))
        if ga == 0.0:
            crossings.append(float(xs[i]))
        elif gb == 0.0:
            crossings.append(float(xs[i + 1]))
        elif ga * gb < 0.0:
            crossings.append(float(optimize.brentq(gap, xs[i], xs[i + 1])))
        else:
            crossings.append(float(0.5 * (xs[i] + xs[i + 1])))
    return sorted(set(crossings))


def bayes_accuracy(model: TaskModel) -> float:
    """Accuracy of the optimal decision rule, via adaptive quadrature.

    Integrates max_y prior(y) p(x|y) over the truncated support, splitting
    at decision-boundary crossings so each panel is smooth.

    Raises RuntimeError when the quadrature residual exceeds the tolerance.
    """
    lo, hi = SUPPORT
    crossings = _argmax_crossings(model, lo, hi)
    priors = np.asarray(model.class_priors)

    def best_mass(x: float) -> float:
        return float(
            np.max(class_conditional_density(model, np.array([x]))[0] * priors)
        )

    value, residual = integrate.quad(
        best_mass, lo, hi, points=crossings or None, limit=200
    )
    if residual > _QUAD_RESIDUAL_TOL:
        raise RuntimeError(
            f"Bayes-accuracy quadrature did not converge (residual {residual:.3e})"
        )
    return value
