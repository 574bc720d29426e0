import numpy as np

from ..errors import ContractViolation
from .network import observation_vector


class DemoDataset:
    """
    Aggregated supervision: observations paired with label distributions.

    Records are only ever appended. Each stores the observation vector, the
    label mean and precision, the sampled label action (kept for ablations)
    and the iteration that produced it.
    """

    def __init__(self):
        self._observations = []
        self._means = []
        self._precisions = []
        self._sampled_actions = []
        self._iterations = []
        self._cache = None

    def append(self, observation, label, sampled_action=None, iteration=0):
        """
        Add one record.

        Args:
            observation: Observation or vector seen by the learner
            label: Gaussian label distribution
            sampled_action: Optional action drawn from the label
            iteration: Iteration index that recorded it
        """
        vector = np.array(observation_vector(observation), dtype=float)
        if self._observations and vector.shape != self._observations[0].shape:
            raise ContractViolation(
                f"observation dimension {vector.shape[0]} differs from dataset dimension "
                f"{self._observations[0].shape[0]}"
            )
        self._observations.append(vector)
        self._means.append(np.array(label.mean))
        self._precisions.append(label.precision())
        self._sampled_actions.append(
            np.full(label.dimension, np.nan) if sampled_action is None else np.array(sampled_action, dtype=float)
        )
        self._iterations.append(int(iteration))
        self._cache = None

    def __len__(self):
        return len(self._observations)

    @property
    def observation_dim(self):
        return self._observations[0].shape[0] if self._observations else None

    def arrays(self):
        """(observations (k, d), means (k, m), precisions (k, m, m))"""
        if not self._observations:
            raise ContractViolation("dataset is empty")
        if self._cache is None:
            self._cache = (np.stack(self._observations), np.stack(self._means), np.stack(self._precisions))
        return self._cache

    @property
    def sampled_actions(self):
        return np.stack(self._sampled_actions) if self._sampled_actions else np.zeros((0, 0))

    @property
    def iterations(self):
        return np.array(self._iterations, dtype=int)
