"""Lipschitz and gradient-stability bounds.

Three families of bounds are reported, each as a BoundReport that carries
the ingredients needed to recompute its value:

* weight-magnitude bounds (per configuration and global) built from the
  largest interior weight magnitude C and the activation support sizes;
  these assume the outer factors are normalized (unit rows in the first
  weight matrix, unit columns in the last) and need at least four layers,
  because they bound the coefficient table of the rank-one atoms;
* a spectral bound sigma**L from the largest per-layer spectral norm,
  valid for every depth;
* gradient bounds: the actual backward mask-product of a loss gradient at
  a point, checked against the coarse (N C)**(L-k) growth estimate, plus
  the input-sensitivity estimate beta (N C)**(2 L).

The backward product applies the mask y >= 0 (the subgradient convention
at kinks), which differs from the forward configuration bit y > 0 only on
the measure-zero activation boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, UnsupportedError, ValidationError
from .network import Configuration, NetworkSpec, check_configuration, config_of, forward_pass

KIND_WEIGHT_MAGNITUDE = "WeightMagnitude"
KIND_GLOBAL = "Global"
KIND_SPECTRAL = "Spectral"
KIND_GRADIENT_LAYER = "GradientLayer"
KIND_GRADIENT_INPUT = "GradientInput"

NORMALIZATION_TOL = 1e-8

_POWER_RTOL = 1e-10
_POWER_MAX_ITERS = 100_000


@dataclass(frozen=True, eq=False)
class BoundReport:
    """One computed bound with everything needed to recompute it.

    ``normalization_ok`` records whether the unit-norm precondition on the
    outer weight matrices held; when it did not, weight-magnitude values
    have already been rescaled by the offending norms (the ``rescale``
    ingredient).  Kinds without that precondition report True.
    ``config`` ties per-configuration and per-point reports to their
    activation pattern; global reports leave it None.
    """

    kind: str
    value: float
    ingredients: dict = field(default_factory=dict)
    normalization_ok: bool = True
    config: Configuration | None = None

    def __post_init__(self):
        if self.kind not in (
            KIND_WEIGHT_MAGNITUDE,
            KIND_GLOBAL,
            KIND_SPECTRAL,
            KIND_GRADIENT_LAYER,
            KIND_GRADIENT_INPUT,
        ):
            raise ValidationError(f"unknown bound kind {self.kind!r}")
        value = float(self.value)
        if not (math.isfinite(value) and value >= 0.0):
            raise ValidationError(f"bound value must be finite and non-negative, got {value}")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "ingredients", dict(self.ingredients))

    def recompute(self) -> float:
        """Re-derive the value from the stored ingredients."""
        ing = self.ingredients
        if self.kind == KIND_WEIGHT_MAGNITUDE:
            base = ing["C"] ** (ing["L"] - 2) * math.prod(ing["support_sizes"])
            return base * ing["rescale"]
        if self.kind == KIND_GLOBAL:
            return (ing["C"] * ing["N"]) ** (ing["L"] - 2) * ing["N"] * ing["rescale"]
        if self.kind == KIND_SPECTRAL:
            return ing["sigma"] ** ing["L"]
        if self.kind == KIND_GRADIENT_LAYER:
            return (ing["N"] * ing["C"]) ** (ing["L"] - ing["k"]) * ing["loss_grad_norm"]
        return ing["beta"] * (ing["N"] * ing["C"]) ** (2 * ing["L"])


def _power_converge(g: np.ndarray, v: np.ndarray, rtol: float) -> float:
    """Largest eigenvalue estimate of the PSD matrix ``g`` from start ``v``.

    Returns 0.0 when the start lies in the nullspace.  The Rayleigh
    quotient is monotone under power iteration on a PSD matrix, so the
    stopping rule watches its relative increase.
    """
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return 0.0
    v = v / norm
    rayleigh = 0.0
    for it in range(_POWER_MAX_ITERS):
        gv = g @ v
        gv_norm = float(np.linalg.norm(gv))
        if gv_norm <= 1e-300:
            return 0.0
        new_rayleigh = float(v @ gv)
        v = gv / gv_norm
        if it >= 16 and abs(new_rayleigh - rayleigh) <= rtol * max(new_rayleigh, 1e-300):
            return new_rayleigh
        rayleigh = new_rayleigh
    raise ArithmeticError("power iteration failed to converge")


def spectral_norm(w, rtol: float = _POWER_RTOL) -> float:
    """Spectral norm via power iteration on the smaller Gram matrix.

    Runs from the all-ones start and from every basis vector, keeping the
    largest Rayleigh limit; the basis restarts guarantee at least one start
    overlaps the top eigenspace, at negligible cost for the matrix sizes
    this package targets.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 2:
        raise ShapeError(f"spectral_norm expects a matrix, got shape {w.shape}")
    if w.size == 0 or not np.any(w):
        return 0.0
    g = w.T @ w if w.shape[0] >= w.shape[1] else w @ w.T
    n = g.shape[0]
    best = _power_converge(g, np.ones(n), rtol)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        best = max(best, _power_converge(g, e, rtol))
    return math.sqrt(max(best, 0.0))


def _outer_norms(net: NetworkSpec) -> tuple[bool, float, float]:
    """Normalization check: unit rows in W_1 and unit columns in W_L."""
    row_norms = np.linalg.norm(net.layers[0].weights, axis=1)
    col_norms = np.linalg.norm(net.layers[-1].weights, axis=0)
    max_row = float(row_norms.max())
    max_col = float(col_norms.max())
    ok = bool(
        np.all(np.abs(row_norms - 1.0) <= NORMALIZATION_TOL)
        and np.all(np.abs(col_norms - 1.0) <= NORMALIZATION_TOL)
    )
    return ok, max_row, max_col


def _interior_magnitude(net: NetworkSpec) -> float:
    return max(float(np.max(np.abs(layer.weights))) for layer in net.layers[1:-1])


def _require_deep(net: NetworkSpec, what: str):
    if net.depth <= 3:
        raise UnsupportedError(
            f"{what} needs at least 4 layers (got {net.depth}): with fewer "
            "there is no interior weight block for the estimate to bound"
        )


def lipschitz_config_bound(net: NetworkSpec, theta: Configuration) -> BoundReport:
    """Per-configuration Lipschitz bound C**(L-2) * prod_k |spt theta_k|.

    ``C`` is the largest weight magnitude in the interior layers
    W_2 .. W_{L-1}.  When the outer matrices are not normalized the value
    is rescaled by their largest row/column norms and flagged.
    """
    _require_deep(net, "the per-configuration weight-magnitude bound")
    check_configuration(net, theta)
    c = _interior_magnitude(net)
    supports = theta.support_sizes()
    ok, max_row, max_col = _outer_norms(net)
    rescale = 1.0 if ok else max_row * max_col
    value = c ** (net.depth - 2) * math.prod(supports) * rescale
    return BoundReport(
        kind=KIND_WEIGHT_MAGNITUDE,
        value=value,
        ingredients={
            "C": c,
            "N": max(net.hidden_widths),
            "L": net.depth,
            "support_sizes": supports,
            "rescale": rescale,
            "max_row_norm_first": max_row,
            "max_col_norm_last": max_col,
        },
        normalization_ok=ok,
        config=theta,
    )


def lipschitz_global_bound(net: NetworkSpec) -> BoundReport:
    """Configuration-free bound (C N)**(L-2) * N over the whole input space."""
    _require_deep(net, "the global weight-magnitude bound")
    c = _interior_magnitude(net)
    n = max(net.hidden_widths)
    ok, max_row, max_col = _outer_norms(net)
    rescale = 1.0 if ok else max_row * max_col
    value = (c * n) ** (net.depth - 2) * n * rescale
    return BoundReport(
        kind=KIND_GLOBAL,
        value=value,
        ingredients={
            "C": c,
            "N": n,
            "L": net.depth,
            "rescale": rescale,
            "max_row_norm_first": max_row,
            "max_col_norm_last": max_col,
        },
        normalization_ok=ok,
    )


def spectral_lipschitz_bound(net: NetworkSpec) -> BoundReport:
    """sigma**L with sigma the largest per-layer spectral norm.

    Valid for every depth, since ReLU masks never expand distances.
    """
    layer_norms = tuple(spectral_norm(layer.weights) for layer in net.layers)
    sigma = max(layer_norms)
    return BoundReport(
        kind=KIND_SPECTRAL,
        value=sigma ** net.depth,
        ingredients={"sigma": sigma, "L": net.depth, "layer_norms": layer_norms},
    )


def gradient_backward_product(net: NetworkSpec, x, k: int, loss_grad) -> np.ndarray:
    """Backpropagated gradient at hidden layer ``k`` for input ``x``.

    Computes  Sigma_k W_{k+1}^T ... Sigma_{L-1} W_L^T loss_grad  where
    Sigma_l masks neurons with y_l < 0 (entries with y_l >= 0 pass).
    """
    if not isinstance(k, (int, np.integer)):
        raise ValidationError(f"layer index must be an integer, got {k!r}")
    if not 1 <= k <= net.depth - 1:
        raise ValidationError(
            f"layer index must lie in [1, {net.depth - 1}], got {k}"
        )
    loss_grad = np.asarray(loss_grad, dtype=float)
    if loss_grad.shape != (net.output_dim,):
        raise ShapeError(
            f"loss gradient has shape {loss_grad.shape}, expected ({net.output_dim},)"
        )
    if not np.all(np.isfinite(loss_grad)):
        raise ValidationError("loss gradient contains non-finite entries")
    trace = forward_pass(net, x)
    g = loss_grad
    for l in range(net.depth - 1, k - 1, -1):
        g = net.layers[l].weights.T @ g
        g = np.where(trace.pre_activations[l - 1] >= 0.0, g, 0.0)
    return g


def gradient_stability_report(net: NetworkSpec, x, loss_grad, beta: float) -> list[BoundReport]:
    """Gradient growth reports at ``x``: one per hidden layer plus the input estimate.

    Every layer report uses the coarse constants C = max |entry| over all
    weight matrices and N = the largest width including input and output,
    so the bound (N C)**(L-k) ||loss_grad|| dominates the actual backward
    product at every layer; the tighter product of per-layer spectral
    norms is recorded alongside in the ingredients.  The final report is
    the input-sensitivity estimate beta (N C)**(2 L), which is recorded
    but has no pointwise counterpart to compare against.
    """
    beta = float(beta)
    if not (math.isfinite(beta) and beta >= 0.0):
        raise ValidationError(f"beta must be finite and non-negative, got {beta}")
    loss_grad = np.asarray(loss_grad, dtype=float)
    x = net.check_input(x)
    c = max(float(np.max(np.abs(layer.weights))) for layer in net.layers)
    n = max(net.widths)
    gnorm = float(np.linalg.norm(loss_grad))
    sigmas = [spectral_norm(layer.weights) for layer in net.layers]
    theta = config_of(net, x)
    reports = []
    for k in range(1, net.depth):
        actual = float(np.linalg.norm(gradient_backward_product(net, x, k, loss_grad)))
        value = (n * c) ** (net.depth - k) * gnorm
        reports.append(
            BoundReport(
                kind=KIND_GRADIENT_LAYER,
                value=value,
                ingredients={
                    "N": n,
                    "C": c,
                    "L": net.depth,
                    "k": k,
                    "loss_grad_norm": gnorm,
                    "actual_norm": actual,
                    "spectral_tail": math.prod(sigmas[k:]) * gnorm,
                },
                config=theta,
            )
        )
    reports.append(
        BoundReport(
            kind=KIND_GRADIENT_INPUT,
            value=beta * (n * c) ** (2 * net.depth),
            ingredients={"N": n, "C": c, "L": net.depth, "beta": beta},
            config=theta,
        )
    )
    return reports
