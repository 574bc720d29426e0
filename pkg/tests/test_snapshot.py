import numpy as np
import pytest

from platonav.errors import ConfigError, ContractViolation
from platonav.policy.network import GaussianMlpPolicy, ObservationNormalizer
from platonav.policy.snapshot import load_policy, policy_from_text, policy_to_text, save_policy


def trained_looking_policy(rng):
    policy = GaussianMlpPolicy.initialize(5, 2, (7, 3), rng)
    policy.set_parameters([p + rng.normal(scale=1e-3, size=p.shape) for p in policy.parameters])
    policy.set_covariance([[0.7, 0.1], [0.1, 0.3]])
    policy.normalizer = ObservationNormalizer(rng.normal(size=5), rng.uniform(0.1, 3.0, 5), clip=5.0)
    return policy


def test_round_trip_is_bit_identical(tmp_path, rng):
    policy = trained_looking_policy(rng)
    loaded = load_policy(save_policy(policy, tmp_path / "snapshots" / "policy_iter_001.pbtxt"))
    for a, b in zip(policy.parameters, loaded.parameters):
        assert np.array_equal(a, b)
    assert np.array_equal(policy.covariance, loaded.covariance)
    assert np.array_equal(policy.normalizer.mean, loaded.normalizer.mean)
    assert np.array_equal(policy.normalizer.scale, loaded.normalizer.scale)
    assert loaded.normalizer.clip == 5.0
    for _ in range(10):
        o = rng.normal(size=5)
        assert np.array_equal(policy.mean(o), loaded.mean(o))


def test_text_lists_layer_shapes(rng):
    text = policy_to_text(trained_looking_policy(rng))
    assert "input_dim: 5" in text
    assert "rows: 7" in text
    assert "cols: 5" in text


def test_shape_mismatch_is_rejected(rng):
    text = policy_to_text(trained_looking_policy(rng)).replace("rows: 7", "rows: 8", 1)
    with pytest.raises(ContractViolation):
        policy_from_text(text)


def test_unknown_field_is_a_config_error():
    with pytest.raises(ConfigError):
        policy_from_text("input_dim: 2\nmystery: 1\n")


def test_awkward_doubles_survive_the_text_form(tmp_path):
    values = np.array([1.0 / 3.0, 0.1 + 0.2, np.nextafter(1.0, 2.0), 1e-300, -2.5e17, 6.02214076e23])
    policy = GaussianMlpPolicy([values.reshape(2, 3)], [values[:2]], np.eye(2))
    text = save_policy(policy, tmp_path / "policy.pbtxt").read_text()
    assert "0.30000000000000004" in text
    loaded = load_policy(tmp_path / "policy.pbtxt")
    assert np.array_equal(loaded.weights[0].ravel(), values)
    assert np.array_equal(loaded.biases[0], values[:2])
