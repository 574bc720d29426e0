"""
Supervised training of the learner on aggregated labels: Adam on the
precision-weighted Euclidean loss, plus the closed-form covariance fit.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import linalg

from ..errors import ConfigError, ContractViolation, NumericalError, TrainingDiverged
from .network import ObservationNormalizer, weighted_loss_and_gradient

logger = logging.getLogger("PlatoNav.policy")


@dataclass(frozen=True)
class TrainingConfig:
    """
    Args:
        step_size: Adam learning rate
        batch_size: Minibatch size
        epochs: Passes over the dataset per training call
        beta1: First-moment decay
        beta2: Second-moment decay
        adam_epsilon: Denominator guard
        learning_rate_decay: Per-epoch multiplicative decay of the step size
        refit_normalizer: Recompute the observation normalizer from the dataset before training
        input_min_scale: Floor on the fitted per-channel scale
        input_clip: Bound on the normalized inputs; 0 disables clipping
    """
    step_size: float = 1e-3
    batch_size: int = 64
    epochs: int = 200
    beta1: float = 0.9
    beta2: float = 0.999
    adam_epsilon: float = 1e-8
    learning_rate_decay: float = 1.0
    refit_normalizer: bool = True
    input_min_scale: float = 0.25
    input_clip: float = 5.0

    def __post_init__(self):
        if self.step_size <= 0.0:
            raise ConfigError("step_size must be positive", field="training.step_size")
        if self.batch_size < 1 or self.epochs < 0:
            raise ConfigError("batch_size must be >= 1 and epochs >= 0", field="training.batch_size")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ConfigError("Adam betas must be in [0, 1)", field="training.beta1")
        if not 0.0 < self.learning_rate_decay <= 1.0:
            raise ConfigError("learning_rate_decay must be in (0, 1]", field="training.learning_rate_decay")
        if self.input_min_scale < 0.0 or self.input_clip < 0.0:
            raise ConfigError("input_min_scale and input_clip must be nonnegative", field="training.input_clip")


class Adam:
    """Adaptive-moment optimizer over a list of parameter arrays"""

    def __init__(self, parameters, step_size, beta1=0.9, beta2=0.999, epsilon=1e-8):
        self.step_size = step_size
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.first = [np.zeros_like(p) for p in parameters]
        self.second = [np.zeros_like(p) for p in parameters]
        self.steps = 0

    def update(self, parameters, gradients):
        """Return updated copies of parameters"""
        self.steps += 1
        correction1 = 1.0 - self.beta1 ** self.steps
        correction2 = 1.0 - self.beta2 ** self.steps
        updated = []
        for i, (p, g) in enumerate(zip(parameters, gradients)):
            self.first[i] = self.beta1 * self.first[i] + (1.0 - self.beta1) * g
            self.second[i] = self.beta2 * self.second[i] + (1.0 - self.beta2) * g * g
            m_hat = self.first[i] / correction1
            v_hat = self.second[i] / correction2
            updated.append(p - self.step_size * m_hat / (np.sqrt(v_hat) + self.epsilon))
        return updated


@dataclass(frozen=True)
class TrainingResult:
    loss: float
    epoch_losses: Tuple[float, ...]


def train_policy(policy, dataset, config=None, rng=None):
    """
    Fit the policy mean to the dataset labels, warm-starting from its current
    parameters. The policy is updated in place.

    Args:
        policy: GaussianMlpPolicy
        dataset: Nonempty DemoDataset
        config: TrainingConfig
        rng: numpy Generator for minibatch shuffling

    Returns:
        TrainingResult with the final mean per-sample loss over the dataset
    """
    config = config or TrainingConfig()
    rng = rng if rng is not None else np.random.default_rng(0)
    if len(dataset) == 0:
        raise ContractViolation("cannot train on an empty dataset")
    observations, means, precisions = dataset.arrays()
    if config.refit_normalizer:
        policy.normalizer = ObservationNormalizer.fit(observations, config.input_min_scale, config.input_clip)

    optimizer = Adam(policy.parameters, config.step_size, config.beta1, config.beta2, config.adam_epsilon)
    count = len(dataset)
    epoch_losses = []
    for epoch in range(config.epochs):
        order = rng.permutation(count)
        total = 0.0
        for start in range(0, count, config.batch_size):
            batch = order[start:start + config.batch_size]
            loss, gradients = weighted_loss_and_gradient(
                policy, observations[batch], means[batch], precisions[batch]
            )
            if not np.isfinite(loss):
                logger.error(f"Non-finite training loss in epoch {epoch}")
                raise TrainingDiverged(
                    f"training loss became {loss} in epoch {epoch}; try a lower step_size "
                    f"(currently {optimizer.step_size:.3g})"
                )
            policy.set_parameters(optimizer.update(policy.parameters, gradients))
            total += loss * len(batch)
        epoch_losses.append(total / count)
        optimizer.step_size *= config.learning_rate_decay

    final_loss, _ = weighted_loss_and_gradient(policy, observations, means, precisions)
    if not np.isfinite(final_loss):
        raise TrainingDiverged("final training loss is not finite; try a lower step_size")
    logger.debug(f"Trained on {count} records for {config.epochs} epochs, loss {final_loss:.6g}")
    return TrainingResult(loss=final_loss, epoch_losses=tuple(epoch_losses))


def fit_policy_covariance(dataset):
    """Σ_πθ = (mean of the label precisions)⁻¹"""
    if len(dataset) == 0:
        raise ContractViolation("cannot fit a covariance to an empty dataset")
    _, _, precisions = dataset.arrays()
    average = np.mean(precisions, axis=0)
    average = 0.5 * (average + average.T)
    try:
        factor = linalg.cho_factor(average, lower=True)
    except linalg.LinAlgError as e:
        raise NumericalError("average label precision is singular", np.linalg.cond(average)) from e
    covariance = linalg.cho_solve(factor, np.eye(average.shape[0]))
    return 0.5 * (covariance + covariance.T)
