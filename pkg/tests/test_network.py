import numpy as np
import pytest

from reluscope import (
    Configuration,
    Layer,
    NetworkSpec,
    ShapeError,
    ValidationError,
    config_of,
    forward_pass,
)
from reluscope.network import check_configuration, config_from_trace

from corpus import naive_forward, random_net, random_widths


def test_forward_matches_naive_oracle():
    rng = np.random.default_rng(101)
    for _ in range(30):
        depth = int(rng.integers(2, 7))
        net = random_net(rng, random_widths(rng, depth, 4, 6, 3))
        for _ in range(10):
            x = rng.uniform(-5.0, 5.0, size=net.input_dim)
            trace = forward_pass(net, x)
            np.testing.assert_allclose(trace.output, naive_forward(net, x), rtol=1e-12, atol=1e-12)


def test_trace_records_every_hidden_preactivation():
    rng = np.random.default_rng(7)
    net = random_net(rng, (3, 4, 2, 3))
    x = rng.uniform(-1.0, 1.0, size=3)
    trace = forward_pass(net, x)
    assert len(trace.pre_activations) == 2
    y1 = net.layers[0].weights @ x + net.layers[0].bias
    np.testing.assert_allclose(trace.pre_activations[0], y1)
    y2 = net.layers[1].weights @ np.maximum(y1, 0.0) + net.layers[1].bias
    np.testing.assert_allclose(trace.pre_activations[1], y2)


def test_config_bits_are_strict_positivity():
    net = NetworkSpec.from_arrays(
        [(np.array([[1.0], [-1.0], [0.0]]), np.zeros(3)), (np.ones((1, 3)), np.zeros(1))]
    )
    theta = config_of(net, [2.0])
    assert theta.blocks[0].tolist() == [1, 0, 0]
    # exactly-zero pre-activations count as inactive
    theta0 = config_of(net, [0.0])
    assert theta0.blocks[0].tolist() == [0, 0, 0]


def test_config_of_matches_trace_bits():
    rng = np.random.default_rng(55)
    net = random_net(rng, (2, 5, 4, 2))
    x = rng.uniform(-3.0, 3.0, size=2)
    trace = forward_pass(net, x)
    theta = config_of(net, x)
    assert theta == config_from_trace(trace)
    for block, y in zip(theta.blocks, trace.pre_activations):
        np.testing.assert_array_equal(block, (y > 0).astype(np.int8))


def test_zero_bias_configs_are_scale_invariant():
    rng = np.random.default_rng(99)
    for _ in range(5):
        net = random_net(rng, random_widths(rng, 4, 3, 5, 2), zero_bias=True)
        for _ in range(20):
            x = rng.uniform(-5.0, 5.0, size=net.input_dim)
            theta = config_of(net, x)
            for lam in (0.5, 2.0, 10.0):
                assert config_of(net, lam * x) == theta


def test_network_shape_validation():
    with pytest.raises(ShapeError):
        NetworkSpec.from_arrays([(np.eye(2), np.zeros(2))])  # single layer
    with pytest.raises(ShapeError):
        NetworkSpec.from_arrays(
            [(np.eye(2), np.zeros(2)), (np.ones((1, 3)), np.zeros(1))]  # 2 outputs -> 3 inputs
        )
    with pytest.raises(ShapeError):
        Layer(np.ones((2, 2)), np.zeros(3))
    with pytest.raises(ValidationError):
        Layer(np.array([[np.nan, 0.0]]), np.zeros(1))
    with pytest.raises(ValidationError):
        Layer(np.ones((1, 2)), np.array([np.inf]))


def test_input_validation():
    net = NetworkSpec.from_arrays([(np.eye(2), np.zeros(2)), (np.ones((1, 2)), np.zeros(1))])
    with pytest.raises(ShapeError):
        forward_pass(net, [1.0, 2.0, 3.0])
    with pytest.raises(ValidationError):
        forward_pass(net, [np.nan, 0.0])


def test_widths_and_dims():
    rng = np.random.default_rng(3)
    net = random_net(rng, (3, 5, 2, 4))
    assert net.depth == 3
    assert net.widths == (3, 5, 2, 4)
    assert net.hidden_widths == (5, 2)
    assert net.input_dim == 3 and net.output_dim == 4


def test_arrays_are_readonly():
    rng = np.random.default_rng(11)
    net = random_net(rng, (2, 3, 1))
    with pytest.raises(ValueError):
        net.layers[0].weights[0, 0] = 7.0
    trace = forward_pass(net, [1.0, -1.0])
    with pytest.raises(ValueError):
        trace.output[0] = 0.0
    theta = config_of(net, [1.0, -1.0])
    with pytest.raises(ValueError):
        theta.blocks[0][0] = 1


def test_configuration_validation_and_identity():
    with pytest.raises(ValidationError):
        Configuration((np.array([0, 2]),))
    with pytest.raises(ShapeError):
        Configuration(())
    a = Configuration((np.array([1, 0]), np.array([1])))
    b = Configuration((np.array([1, 0]), np.array([1])))
    c = Configuration((np.array([1, 1]), np.array([1])))
    assert a == b and hash(a) == hash(b)
    assert a != c
    assert a.support(1).tolist() == [0]
    assert a.support_sizes() == (1, 1)
    assert a.prefix(1).num_layers == 1
    assert a.extend([0, 1, 1]).num_layers == 3


def test_check_configuration_prefixes():
    rng = np.random.default_rng(19)
    net = random_net(rng, (2, 3, 4, 1))
    full = Configuration((np.zeros(3, dtype=int), np.zeros(4, dtype=int)))
    prefix = Configuration((np.zeros(3, dtype=int),))
    check_configuration(net, full)
    check_configuration(net, prefix, allow_prefix=True)
    with pytest.raises(ShapeError):
        check_configuration(net, prefix)  # prefix not allowed here
    with pytest.raises(ShapeError):
        check_configuration(net, Configuration((np.zeros(2, dtype=int),)), allow_prefix=True)
