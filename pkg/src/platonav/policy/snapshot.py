"""Policy snapshots as protobuf text documents."""

from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np

from ..errors import ContractViolation
from ..output.text_format import DataclassDocument
from .network import GaussianMlpPolicy, ObservationNormalizer


@dataclass(frozen=True)
class LayerRecord:
    rows: int = 0
    cols: int = 0
    weights: Tuple[float, ...] = ()
    biases: Tuple[float, ...] = ()


@dataclass(frozen=True)
class PolicySnapshot:
    """Layer shapes, row-major weights, covariance and normalizer of a policy"""
    input_dim: int = 0
    action_dim: int = 0
    layers: Tuple[LayerRecord, ...] = ()
    covariance: Tuple[float, ...] = ()
    normalizer_mean: Tuple[float, ...] = ()
    normalizer_scale: Tuple[float, ...] = ()
    normalizer_clip: float = 0.0


_DOCUMENT = DataclassDocument(PolicySnapshot)


def policy_to_text(policy):
    snapshot = PolicySnapshot(
        input_dim=policy.input_dim,
        action_dim=policy.action_dim,
        layers=tuple(
            LayerRecord(rows=w.shape[0], cols=w.shape[1],
                        weights=tuple(w.ravel().tolist()), biases=tuple(b.tolist()))
            for w, b in zip(policy.weights, policy.biases)
        ),
        covariance=tuple(policy.covariance.ravel().tolist()),
        normalizer_mean=tuple(policy.normalizer.mean.tolist()),
        normalizer_scale=tuple(policy.normalizer.scale.tolist()),
        normalizer_clip=policy.normalizer.clip,
    )
    return _DOCUMENT.dumps(snapshot)


def policy_from_text(text):
    snapshot = _DOCUMENT.loads(text)
    if not snapshot.layers:
        raise ContractViolation("policy snapshot has no layers")
    weights, biases = [], []
    for i, layer in enumerate(snapshot.layers):
        if len(layer.weights) != layer.rows * layer.cols or len(layer.biases) != layer.rows:
            raise ContractViolation(f"layer {i} of the snapshot does not match its declared shape")
        weights.append(np.array(layer.weights, dtype=float).reshape(layer.rows, layer.cols))
        biases.append(np.array(layer.biases, dtype=float))
    action_dim = snapshot.action_dim
    covariance = np.array(snapshot.covariance, dtype=float).reshape(action_dim, action_dim)
    normalizer = ObservationNormalizer(snapshot.normalizer_mean, snapshot.normalizer_scale, snapshot.normalizer_clip)
    policy = GaussianMlpPolicy(weights, biases, covariance, normalizer)
    if policy.input_dim != snapshot.input_dim or policy.action_dim != action_dim:
        raise ContractViolation("snapshot dimensions disagree with its layers")
    return policy


def save_policy(policy, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(policy_to_text(policy))
    return path


def load_policy(path):
    return policy_from_text(Path(path).read_text())
