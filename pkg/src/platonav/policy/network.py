"""
Conditionally Gaussian learner policy: a ReLU feedforward network for the
action mean and a constant action covariance.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import ConfigError, ContractViolation
from ..gaussian import Gaussian

logger = logging.getLogger("PlatoNav.policy")

SCALE_FLOOR = 1e-8


@dataclass(frozen=True)
class PolicyConfig:
    """
    Args:
        hidden_sizes: Widths of the hidden ReLU layers; empty for a linear map
        initial_variance: Diagonal of the action covariance before the first fit
        fixed_covariance: Keep the initial covariance instead of fitting it each iteration
    """
    hidden_sizes: Tuple[int, ...] = (40, 40)
    initial_variance: float = 1.0
    fixed_covariance: bool = False

    def __post_init__(self):
        if any(width < 1 for width in self.hidden_sizes):
            raise ConfigError("hidden layer widths must be positive", field="policy.hidden_sizes")
        if self.initial_variance <= 0.0:
            raise ConfigError("initial_variance must be positive", field="policy.initial_variance")


def observation_vector(observation):
    """Flat float vector of an Observation or array-like"""
    if hasattr(observation, "as_vector"):
        return observation.as_vector()
    return np.asarray(observation, dtype=float)


class ObservationNormalizer:
    """
    Affine standardization (o - mean) / scale, optionally clipped to
    [-clip, clip] so that readings far outside the fitted range stay bounded.
    """

    def __init__(self, mean, scale, clip=0.0):
        self.mean = np.array(mean, dtype=float)
        self.scale = np.array(scale, dtype=float)
        self.clip = float(clip)
        if self.mean.shape != self.scale.shape:
            raise ContractViolation("normalizer mean and scale must have equal shape")
        if self.clip < 0.0:
            raise ContractViolation("normalizer clip must be nonnegative")

    @classmethod
    def identity(cls, dimension):
        return cls(np.zeros(dimension), np.ones(dimension))

    @classmethod
    def fit(cls, observations, min_scale=0.0, clip=0.0):
        """
        Per-channel mean and standard deviation, the deviation floored at
        min_scale. Constant channels keep scale 1. A clip of 0 disables clipping.
        """
        observations = np.atleast_2d(observations)
        std = observations.std(axis=0)
        scale = np.where(std < SCALE_FLOOR, 1.0, np.maximum(std, min_scale))
        return cls(observations.mean(axis=0), scale, clip)

    def apply(self, observations):
        normalized = (observations - self.mean) / self.scale
        if self.clip > 0.0:
            return np.clip(normalized, -self.clip, self.clip)
        return normalized

    def copy(self):
        return ObservationNormalizer(self.mean.copy(), self.scale.copy(), self.clip)


def relu(z):
    return np.maximum(z, 0.0)


class GaussianMlpPolicy:
    """
    π_θ(u|o) = N(μ_θ(o), Σ_πθ).

    Layers are stored as weight matrices of shape (out, in) and bias vectors;
    every layer but the last is followed by a ReLU.

    Args:
        weights: List of weight matrices
        biases: List of bias vectors
        covariance: Action covariance Σ_πθ
        normalizer: ObservationNormalizer applied before the first layer
    """

    def __init__(self, weights, biases, covariance, normalizer=None):
        self.weights = [np.array(w, dtype=float) for w in weights]
        self.biases = [np.array(b, dtype=float) for b in biases]
        if not self.weights or len(self.weights) != len(self.biases):
            raise ContractViolation("need one bias per weight matrix and at least one layer")
        for previous, current in zip(self.weights[:-1], self.weights[1:]):
            if current.shape[1] != previous.shape[0]:
                raise ContractViolation(f"layer shapes {previous.shape} and {current.shape} do not chain")
        for w, b in zip(self.weights, self.biases):
            if b.shape != (w.shape[0],):
                raise ContractViolation(f"bias shape {b.shape} does not match weight shape {w.shape}")
        self.covariance = Gaussian(np.zeros(self.weights[-1].shape[0]), covariance).covariance
        self.normalizer = normalizer or ObservationNormalizer.identity(self.input_dim)

    @classmethod
    def initialize(cls, input_dim, action_dim=2, hidden_sizes=(40, 40), rng=None, initial_variance=1.0):
        """Uniform fan-in initialization W ~ U(-1/√fan_in, 1/√fan_in), zero biases"""
        rng = rng if rng is not None else np.random.default_rng(0)
        sizes = [input_dim] + list(hidden_sizes) + [action_dim]
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            biases.append(np.zeros(fan_out))
        return cls(weights, biases, initial_variance * np.eye(action_dim))

    @property
    def input_dim(self):
        return self.weights[0].shape[1]

    @property
    def action_dim(self):
        return self.weights[-1].shape[0]

    @property
    def parameters(self):
        """Parameter arrays in layer order: W1, b1, W2, b2, ..."""
        params = []
        for w, b in zip(self.weights, self.biases):
            params.extend([w, b])
        return params

    def set_parameters(self, params):
        self.weights = [np.array(p, dtype=float) for p in params[0::2]]
        self.biases = [np.array(p, dtype=float) for p in params[1::2]]

    def _check_input(self, observations):
        if observations.shape[-1] != self.input_dim:
            raise ContractViolation(
                f"observation dimension {observations.shape[-1]} does not match policy input {self.input_dim}"
            )

    def forward_batch(self, observations, keep_activations=False):
        """
        Mean actions for a batch of observation vectors.

        Returns:
            (k, m) means, plus the list of (pre-activation, activation) pairs
            when keep_activations is set
        """
        observations = np.atleast_2d(np.asarray(observations, dtype=float))
        self._check_input(observations)
        a = self.normalizer.apply(observations)
        memory = [(None, a)]
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w.T + b
            a = z if i == last else relu(z)
            memory.append((z, a))
        return (a, memory) if keep_activations else a

    def mean(self, observation):
        return self.forward_batch(observation_vector(observation)[None])[0]

    def forward(self, observation):
        """Action distribution N(μ_θ(o), Σ_πθ)"""
        return Gaussian(self.mean(observation), self.covariance)

    def set_covariance(self, covariance):
        self.covariance = Gaussian(np.zeros(self.action_dim), covariance).covariance

    def copy(self):
        return GaussianMlpPolicy(
            [w.copy() for w in self.weights], [b.copy() for b in self.biases], self.covariance.copy(),
            self.normalizer.copy(),
        )


def policy_forward(policy, observation):
    return policy.forward(observation)


def weighted_loss_and_gradient(policy, observations, means, precisions):
    """
    Weighted Euclidean loss (1/k) Σ_i (μ_θ(o_i) - μ*_i)ᵀ P_i (μ_θ(o_i) - μ*_i)
    and its gradient with respect to every parameter array.

    With identity precisions the loss is the mean squared error summed over
    action dimensions.

    Args:
        policy: GaussianMlpPolicy
        observations: (k, d) observation vectors
        means: (k, m) label means
        precisions: (k, m, m) label precisions

    Returns:
        (loss, gradients) with gradients aligned with policy.parameters
    """
    outputs, memory = policy.forward_batch(observations, keep_activations=True)
    count = outputs.shape[0]
    error = outputs - means
    weighted = np.einsum("kij,kj->ki", precisions, error)
    loss = float(np.sum(error * weighted) / count)

    delta = 2.0 * weighted / count
    gradients = []
    for i in range(len(policy.weights) - 1, -1, -1):
        inputs = memory[i][1]
        gradients.append(delta.sum(axis=0))
        gradients.append(delta.T @ inputs)
        if i > 0:
            delta = (delta @ policy.weights[i]) * (memory[i][0] > 0.0)
    gradients.reverse()
    return loss, gradients
