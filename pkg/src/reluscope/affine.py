"""Per-configuration affine maps and their rank-one decomposition.

On the set of inputs sharing an activation configuration theta the network
is one affine map x -> A x + c with

    A = W_L D_{L-1} W_{L-1} ... D_1 W_1,
    c = sum_j W_L D_{L-1} ... W_{j+1} D_j b_j  +  b_L,

where D_k = diag(theta_k).  A always splits into a sum of rank-one atoms

    A = sum_{i in spt theta_{L-1}} sum_{j in spt theta_1}
            c_{ij} * outer(W_L[:, i], W_1[j, :])

whose coefficients c_{ij} are entries of the middle product
W_{L-1} D_{L-2} ... D_2 W_2 (for L = 2 the atoms are the diagonal pairs with
coefficient 1, for L = 3 the coefficients are single entries of W_2).  The
same input evaluated through the active neurons also yields synthesis
coefficients alpha with  sum_i alpha_i(x) W_L[:, i] + c = A x + c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .network import Configuration, NetworkSpec, check_configuration, readonly_array


@dataclass(frozen=True)
class AffinePiece:
    """The affine map x -> linear @ x + bias attached to one configuration."""

    linear: np.ndarray
    bias: np.ndarray
    source: Configuration

    def __post_init__(self):
        lin = readonly_array(self.linear, ndim=2)
        b = readonly_array(self.bias, ndim=1)
        if lin.shape[0] != b.shape[0]:
            raise ShapeError(
                f"linear part has {lin.shape[0]} rows but bias has {b.shape[0]} entries"
            )
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "bias", b)

    @property
    def input_dim(self) -> int:
        return self.linear.shape[1]

    @property
    def output_dim(self) -> int:
        return self.linear.shape[0]


@dataclass(frozen=True)
class Atom:
    """One rank-one term: coefficient * outer(column, row).

    ``out_index``/``in_index`` are the 0-based last-layer column and
    first-layer row the atom is built from.  Atoms with coefficient exactly
    zero are kept (the index structure is part of the decomposition) but
    flagged so reports can skip them.
    """

    out_index: int
    in_index: int
    coefficient: float
    column: np.ndarray
    row: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "column", readonly_array(self.column, ndim=1))
        object.__setattr__(self, "row", readonly_array(self.row, ndim=1))
        object.__setattr__(self, "coefficient", float(self.coefficient))

    @property
    def is_zero(self) -> bool:
        return self.coefficient == 0.0

    def matrix(self) -> np.ndarray:
        return self.coefficient * np.outer(self.column, self.row)


@dataclass(frozen=True)
class AtomicDecomposition:
    """All rank-one atoms of one configuration's linear part.

    ``path_count_per_atom`` counts the activation paths each atom stands
    for: the product of the interior support sizes |spt theta_2| ...
    |spt theta_{L-2}| (1 when the network has no interior hidden layers).
    """

    atoms: tuple[Atom, ...]
    source: Configuration
    path_count_per_atom: int

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "path_count_per_atom", int(self.path_count_per_atom))

    @property
    def atom_count(self) -> int:
        return len(self.atoms)

    @property
    def nonzero_atom_count(self) -> int:
        return sum(1 for atom in self.atoms if not atom.is_zero)

    def linear_sum(self, shape: tuple[int, int] | None = None) -> np.ndarray:
        """Materialize sum_i c_i * outer(col_i, row_i) (mainly for checks)."""
        if shape is None:
            if not self.atoms:
                raise ShapeError("cannot infer the shape of an empty decomposition")
            shape = (self.atoms[0].column.shape[0], self.atoms[0].row.shape[0])
        total = np.zeros(shape)
        for atom in self.atoms:
            total += atom.matrix()
        return total


@dataclass(frozen=True)
class SynthesisCoefficients:
    """Input-dependent weights alpha over the active last-layer columns."""

    support: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(int(i) for i in self.support))
        object.__setattr__(self, "values", readonly_array(self.values, ndim=1))
        if len(self.support) != self.values.shape[0]:
            raise ShapeError("support and values must have equal length")


def _masked(block: np.ndarray, arr: np.ndarray) -> np.ndarray:
    """diag(block) @ arr for a 0/1 block, without building the diagonal."""
    if arr.ndim == 1:
        return block * arr
    return block[:, None] * arr


def affine_piece(net: NetworkSpec, theta: Configuration) -> AffinePiece:
    """Assemble the affine map the network realizes on configuration ``theta``.

    The products are accumulated left to right through the layer stack, one
    masked matrix multiply per layer; biases pick up the same masked factors
    as they propagate forward.
    """
    check_configuration(net, theta)
    masks = tuple(block.astype(float) for block in theta.blocks)
    linear = net.layers[0].weights
    bias = net.layers[0].bias
    for k in range(1, net.depth):
        w, b = net.layers[k].weights, net.layers[k].bias
        linear = w @ _masked(masks[k - 1], linear)
        bias = w @ _masked(masks[k - 1], bias) + b
    return AffinePiece(linear=linear, bias=bias, source=theta)


def evaluate(piece: AffinePiece, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (piece.input_dim,):
        raise ShapeError(f"input has shape {x.shape}, expected ({piece.input_dim},)")
    return piece.linear @ x + piece.bias


def middle_product(net: NetworkSpec, theta: Configuration) -> np.ndarray:
    """W_{L-1} D_{L-2} ... D_2 W_2, the coefficient table of the atoms.

    Accumulated as a chain of masked matrix products, so the cost is
    polynomial in the widths no matter how many activation paths the
    entries summarize.  Requires depth >= 3; for L = 3 this is just W_2.
    """
    if net.depth < 3:
        raise ShapeError("the middle product needs at least 3 layers")
    check_configuration(net, theta)
    m = net.layers[1].weights
    for k in range(2, net.depth - 1):
        mask = theta.blocks[k - 1].astype(float)
        m = net.layers[k].weights @ _masked(mask, m)
    return m


def atomic_decomposition(net: NetworkSpec, theta: Configuration) -> AtomicDecomposition:
    """Split the configuration's linear part into rank-one atoms.

    Atoms are ordered by last-layer column index, then first-layer row
    index.  Coefficients come from the accumulated middle product, never
    from enumerating activation paths, so deep-and-wide configurations stay
    cheap; ``path_count_per_atom`` still reports how many paths each
    coefficient absorbs.
    """
    check_configuration(net, theta)
    first_support = theta.support(1)
    last_support = theta.support(theta.num_layers)
    w_first = net.layers[0].weights
    w_last = net.layers[-1].weights

    atoms = []
    if net.depth == 2:
        # single hidden layer: only the diagonal pairs survive, coefficient 1
        for i in first_support:
            atoms.append(
                Atom(
                    out_index=int(i),
                    in_index=int(i),
                    coefficient=1.0,
                    column=w_last[:, i],
                    row=w_first[i, :],
                )
            )
    else:
        table = middle_product(net, theta)
        for i in last_support:
            for j in first_support:
                atoms.append(
                    Atom(
                        out_index=int(i),
                        in_index=int(j),
                        coefficient=float(table[i, j]),
                        column=w_last[:, i],
                        row=w_first[j, :],
                    )
                )

    interior = theta.support_sizes()[1:-1]  # |spt theta_2| ... |spt theta_{L-2}|
    paths = math.prod(interior) if interior else 1
    return AtomicDecomposition(atoms=tuple(atoms), source=theta, path_count_per_atom=paths)


def synthesis_coefficients(net: NetworkSpec, theta: Configuration, x) -> SynthesisCoefficients:
    """Coefficients alpha expressing the output over active last-layer columns.

    alpha_i is the (masked) value reaching hidden neuron i of the last
    hidden layer when ``x`` is pushed through the *linear* part of the
    stack, so  sum_i alpha_i W_L[:, i] + piece.bias  equals the piece
    evaluated at ``x`` whenever theta = config_of(net, x).
    """
    check_configuration(net, theta)
    x = net.check_input(x)
    v = net.layers[0].weights @ x
    for k in range(1, net.depth - 1):
        mask = theta.blocks[k - 1].astype(float)
        v = net.layers[k].weights @ (mask * v)
    support = theta.support(theta.num_layers)
    return SynthesisCoefficients(support=tuple(int(i) for i in support), values=v[support])
