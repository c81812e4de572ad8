"""Feedforward ReLU networks and their activation configurations.

A network with L affine layers computes

    x -> W_L sigma(W_{L-1} sigma(... sigma(W_1 x + b_1) ...) + b_{L-1}) + b_L

with sigma the elementwise ReLU.  The activation configuration of an input
records, for every hidden neuron, whether its pre-activation was strictly
positive.  Inputs sharing a configuration are mapped by one common affine
function, which is what the rest of the package exploits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, ValidationError


def readonly_array(values, dtype=float, ndim=None) -> np.ndarray:
    """Copy ``values`` into a C-contiguous read-only ndarray."""
    arr = np.array(values, dtype=dtype, order="C")
    if ndim is not None and arr.ndim != ndim:
        raise ShapeError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Layer:
    """One affine stage: ``weights`` is N_out x N_in, ``bias`` has N_out entries."""

    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        w = readonly_array(self.weights, ndim=2)
        b = readonly_array(self.bias, ndim=1)
        if w.shape[0] == 0 or w.shape[1] == 0:
            raise ShapeError(f"layer weights must be non-empty, got shape {w.shape}")
        if b.shape[0] != w.shape[0]:
            raise ShapeError(
                f"bias length {b.shape[0]} does not match weight rows {w.shape[0]}"
            )
        if not np.all(np.isfinite(w)):
            raise ValidationError("layer weights contain non-finite entries")
        if not np.all(np.isfinite(b)):
            raise ValidationError("layer bias contains non-finite entries")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class NetworkSpec:
    """An immutable stack of affine layers with ReLU between them.

    The final layer has no activation.  ``depth`` is the number of affine
    layers L, so there are L-1 hidden (ReLU) layers.
    """

    layers: tuple[Layer, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if len(layers) < 2:
            raise ShapeError(f"a network needs at least 2 layers, got {len(layers)}")
        for k in range(1, len(layers)):
            if layers[k].in_dim != layers[k - 1].out_dim:
                raise ShapeError(
                    f"layer {k + 1} expects {layers[k].in_dim} inputs but layer "
                    f"{k} produces {layers[k - 1].out_dim} outputs"
                )
        object.__setattr__(self, "layers", layers)

    @classmethod
    def from_arrays(cls, pairs) -> "NetworkSpec":
        """Build from an iterable of (weights, bias) array-likes."""
        return cls(tuple(Layer(w, b) for w, b in pairs))

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def widths(self) -> tuple[int, ...]:
        """(N_0, N_1, ..., N_L) including input and output widths."""
        return (self.input_dim,) + tuple(layer.out_dim for layer in self.layers)

    @property
    def hidden_widths(self) -> tuple[int, ...]:
        return self.widths[1:-1]

    def check_input(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.input_dim,):
            raise ShapeError(
                f"input has shape {x.shape}, expected ({self.input_dim},)"
            )
        if not np.all(np.isfinite(x)):
            raise ValidationError("input contains non-finite entries")
        return x


@dataclass(frozen=True)
class ActivationTrace:
    """Pre-activations of every hidden layer plus the final output.

    ``pre_activations[k]`` holds y_{k+1}, the value entering the ReLU of
    hidden layer k+1; it has N_{k+1} entries.
    """

    pre_activations: tuple[np.ndarray, ...]
    output: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self,
            "pre_activations",
            tuple(readonly_array(y, ndim=1) for y in self.pre_activations),
        )
        object.__setattr__(self, "output", readonly_array(self.output, ndim=1))


@dataclass(frozen=True)
class Configuration:
    """Activation pattern: one 0/1 block per hidden layer.

    ``blocks[k][i]`` is 1 exactly when neuron i+1 of hidden layer k+1 has a
    strictly positive pre-activation; a pre-activation of exactly zero gets
    bit 0.  A configuration may cover only the first few hidden layers (a
    prefix), which is how the region enumeration refines layer by layer.
    """

    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        cleaned = []
        for k, block in enumerate(self.blocks):
            arr = np.array(block, dtype=np.int8)
            if arr.ndim != 1 or arr.shape[0] == 0:
                raise ShapeError(f"configuration block {k + 1} must be a non-empty vector")
            if not np.all((arr == 0) | (arr == 1)):
                raise ValidationError(f"configuration block {k + 1} has entries outside {{0, 1}}")
            arr.setflags(write=False)
            cleaned.append(arr)
        if not cleaned:
            raise ShapeError("a configuration needs at least one block")
        object.__setattr__(self, "blocks", tuple(cleaned))

    @property
    def num_layers(self) -> int:
        return len(self.blocks)

    def support(self, k: int) -> np.ndarray:
        """Indices of active neurons in hidden layer k (1-based k)."""
        return np.flatnonzero(self.blocks[k - 1])

    def support_sizes(self) -> tuple[int, ...]:
        return tuple(int(block.sum()) for block in self.blocks)

    def extend(self, block) -> "Configuration":
        return Configuration(self.blocks + (np.asarray(block),))

    def prefix(self, num_layers: int) -> "Configuration":
        if not 1 <= num_layers <= self.num_layers:
            raise ValidationError(f"cannot take a {num_layers}-layer prefix of {self.num_layers} blocks")
        return Configuration(self.blocks[:num_layers])

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return len(self.blocks) == len(other.blocks) and all(
            np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks)
        )

    def __hash__(self):
        return hash(tuple(block.tobytes() for block in self.blocks))


def check_configuration(net: NetworkSpec, config: Configuration, *, allow_prefix: bool = False):
    """Validate that ``config``'s blocks match ``net``'s hidden widths."""
    hidden = net.hidden_widths
    if allow_prefix:
        if config.num_layers > len(hidden):
            raise ShapeError(
                f"configuration has {config.num_layers} blocks but the network "
                f"has only {len(hidden)} hidden layers"
            )
    elif config.num_layers != len(hidden):
        raise ShapeError(
            f"configuration has {config.num_layers} blocks, expected {len(hidden)}"
        )
    for k, block in enumerate(config.blocks):
        if block.shape[0] != hidden[k]:
            raise ShapeError(
                f"configuration block {k + 1} has {block.shape[0]} bits, "
                f"expected {hidden[k]}"
            )


def forward_pass(net: NetworkSpec, x) -> ActivationTrace:
    """Evaluate the network, recording every hidden pre-activation."""
    h = net.check_input(x)
    pre = []
    for layer in net.layers[:-1]:
        y = layer.weights @ h + layer.bias
        pre.append(y)
        h = np.maximum(y, 0.0)
    out = net.layers[-1].weights @ h + net.layers[-1].bias
    return ActivationTrace(pre_activations=tuple(pre), output=out)


def config_from_trace(trace: ActivationTrace) -> Configuration:
    """Read the activation bits off a trace (strictly positive -> 1)."""
    return Configuration(tuple((y > 0.0).astype(np.int8) for y in trace.pre_activations))


def config_of(net: NetworkSpec, x) -> Configuration:
    """Activation configuration of input ``x``."""
    return config_from_trace(forward_pass(net, x))
