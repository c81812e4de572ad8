"""Input-space regions of activation configurations.

Every hidden pre-activation is an affine function of the network input once
the bits of the earlier layers are fixed:

    y_1(x) = W_1 x + b_1,
    y_{k+1}(x) = W_{k+1} diag(theta_k) y_k(x) + b_{k+1}.

A configuration prefix therefore carves out the polyhedron where each bit-1
neuron has  row.x + offset > 0  and each bit-0 neuron has  row.x + offset
<= 0.  Feasibility inside a bounding box is decided with a max-slack linear
program: maximize t subject to the strict rows having slack at least t, the
non-strict rows holding as stated, x in the box and 0 <= t <= 1.  A strictly
positive optimum certifies an interior point; a feasible program whose
optimum is within tolerance of zero means the prefix is realized on the box
only through lower-dimensional boundary pieces.

Enumeration refines prefixes one layer at a time, and within a layer one
neuron at a time, so an infeasible half-split prunes every completion of
that partial bit pattern.  Parent witnesses that already clear a new row by
more than the tolerance certify the child without another linear program.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import simplex
from .errors import BudgetExceededError, GeometryError, ShapeError, ValidationError
from .geometry import box_corners, clip_halfplane, dedupe_ring, polygon_area
from .network import Configuration, NetworkSpec, check_configuration, readonly_array

DEFAULT_BOX_HALF_WIDTH = 5.0
DEFAULT_TOL = 1e-9
DEFAULT_BUDGET = 10**6


class Verdict(str, enum.Enum):
    FEASIBLE_INTERIOR = "FeasibleInterior"
    EMPTY = "Empty"
    BOUNDARY_ONLY = "BoundaryOnly"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Box:
    """Axis-aligned bounded box {x : lo <= x <= hi} with lo < hi."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = readonly_array(self.lo, ndim=1)
        hi = readonly_array(self.hi, ndim=1)
        if lo.shape != hi.shape:
            raise ShapeError("box bounds must have equal length")
        if lo.shape[0] == 0:
            raise ShapeError("box must have at least one dimension")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValidationError("box bounds must be finite")
        if not np.all(lo < hi):
            raise ValidationError("box needs lo < hi in every coordinate")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, dim: int, half_width: float = DEFAULT_BOX_HALF_WIDTH) -> "Box":
        return cls(lo=np.full(dim, -half_width), hi=np.full(dim, half_width))

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))


@dataclass(frozen=True)
class Halfspace:
    """One constraint row in input space.

    ``strict`` rows demand  normal.x + offset > 0  (an active neuron);
    non-strict rows demand  normal.x + offset <= 0.
    """

    normal: np.ndarray
    offset: float
    strict: bool

    def __post_init__(self):
        object.__setattr__(self, "normal", readonly_array(self.normal, ndim=1))
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "strict", bool(self.strict))

    @property
    def is_zero_normal(self) -> bool:
        return not np.any(self.normal)

    def slack(self, x) -> float:
        return float(self.normal @ np.asarray(x, dtype=float) + self.offset)

    def margin(self, x) -> float:
        """How comfortably ``x`` satisfies the row (positive = satisfied)."""
        s = self.slack(x)
        return s if self.strict else -s

    def holds_at(self, x) -> bool:
        s = self.slack(x)
        return s > 0.0 if self.strict else s <= 0.0


@dataclass(frozen=True)
class ConstraintSystem:
    """The halfspace rows of a configuration prefix, plus the bounding box.

    Rows are ordered layer-major, neuron index ascending within a layer.
    ``source`` is the prefix the rows came from (None for the bare box).
    """

    halfspaces: tuple[Halfspace, ...]
    box: Box
    source: Configuration | None

    def __post_init__(self):
        object.__setattr__(self, "halfspaces", tuple(self.halfspaces))


@dataclass(frozen=True)
class FeasibilityResult:
    """Verdict plus the certificate the solver produced.

    For FeasibleInterior the ``witness`` clears every strict row by at
    least ``max_slack`` and, whenever the region is full-dimensional, sits
    strictly inside the non-strict rows too (so its configuration bits
    recompute exactly).  ``max_slack`` is the witness's certified strict
    slack, a lower bound on the max-slack optimum.  For BoundaryOnly the
    witness lies in the closure and may sit on the boundary.
    """

    verdict: Verdict
    witness: np.ndarray | None
    max_slack: float | None

    def __post_init__(self):
        if self.witness is not None:
            object.__setattr__(self, "witness", readonly_array(self.witness, ndim=1))


def input_space_forms(net: NetworkSpec, theta: Configuration) -> list[tuple[np.ndarray, np.ndarray]]:
    """Affine forms (A_k, c_k) with y_k(x) = A_k x + c_k, for k = 1..len(theta)+1.

    The list has one entry per hidden layer the prefix fixes plus one more:
    the form of the first undecided layer (or of the output layer when the
    prefix is complete).  Entry k uses only blocks 1..k-1 of ``theta``.
    """
    check_configuration(net, theta, allow_prefix=True)
    a = net.layers[0].weights
    c = net.layers[0].bias
    forms = [(a, c)]
    for k in range(theta.num_layers):
        mask = theta.blocks[k].astype(float)
        w, b = net.layers[k + 1].weights, net.layers[k + 1].bias
        a = w @ (mask[:, None] * a)
        c = w @ (mask * c) + b
        forms.append((a, c))
    return forms


def region_constraints(net: NetworkSpec, theta: Configuration, box: Box | None = None) -> ConstraintSystem:
    """Halfspace description of the inputs realizing configuration ``theta``.

    ``theta`` may be a prefix; rows cover exactly the layers it fixes.
    """
    check_configuration(net, theta, allow_prefix=True)
    if box is None:
        box = Box.cube(net.input_dim)
    if box.dim != net.input_dim:
        raise ShapeError(
            f"box dimension {box.dim} does not match input dimension {net.input_dim}"
        )
    forms = input_space_forms(net, theta)
    rows: list[Halfspace] = []
    for k in range(theta.num_layers):
        a, c = forms[k]
        bits = theta.blocks[k]
        rows.extend(
            Halfspace(normal=a[i], offset=float(c[i]), strict=bool(bits[i]))
            for i in range(a.shape[0])
        )
    return ConstraintSystem(halfspaces=tuple(rows), box=box, source=theta)


def _split_rows(halfspaces) -> tuple[list[Halfspace], list[Halfspace], bool]:
    """Separate live rows from zero-normal ones.

    Returns (strict rows, non-strict rows, contradiction).  Zero-normal rows
    are decided here once and for all: a strict row needs offset > 0, a
    non-strict row needs offset <= 0; satisfied ones are dropped so a
    constant row cannot distort the max-slack objective.
    """
    strict_rows: list[Halfspace] = []
    nonstrict_rows: list[Halfspace] = []
    for h in halfspaces:
        if h.is_zero_normal:
            if h.strict:
                if h.offset <= 0.0:
                    return [], [], True
            elif h.offset > 0.0:
                return [], [], True
        elif h.strict:
            strict_rows.append(h)
        else:
            nonstrict_rows.append(h)
    return strict_rows, nonstrict_rows, False


def _solve_max_slack(strict_rows, nonstrict_rows, box, margin_on_nonstrict):
    """Run the max-slack program over u = x - lo >= 0 and the level t:

        maximize t
        s.t.  -a.u + t <= offset + a.lo       (strict rows)
               a.u [+ t] <= -offset - a.lo    (non-strict rows)
               u <= hi - lo,  t <= 1,  u >= 0, t >= 0.

    With ``margin_on_nonstrict`` the bracketed +t is present, so t measures
    the clearance from every hyperplane at once; without it only strict
    rows count, which matches the verdict semantics.
    """
    n = box.dim
    span = box.hi - box.lo
    num_rows = len(strict_rows) + len(nonstrict_rows) + n + 1
    a_ub = np.zeros((num_rows, n + 1))
    b_ub = np.zeros(num_rows)
    r = 0
    for h in strict_rows:
        a_ub[r, :n] = -h.normal
        a_ub[r, n] = 1.0
        b_ub[r] = h.offset + float(h.normal @ box.lo)
        r += 1
    for h in nonstrict_rows:
        a_ub[r, :n] = h.normal
        if margin_on_nonstrict:
            a_ub[r, n] = 1.0
        b_ub[r] = -h.offset - float(h.normal @ box.lo)
        r += 1
    for i in range(n):
        a_ub[r, i] = 1.0
        b_ub[r] = span[i]
        r += 1
    a_ub[r, n] = 1.0
    b_ub[r] = 1.0

    objective = np.zeros(n + 1)
    objective[n] = 1.0
    result = simplex.solve_max(objective, a_ub, b_ub)
    if result.status not in (simplex.OPTIMAL, simplex.INFEASIBLE):
        # t <= 1 keeps the program bounded, so anything else is a solver bug
        raise ArithmeticError(f"unexpected LP status {result.status!r}")
    return result


def check_feasibility(cs: ConstraintSystem, tol: float = DEFAULT_TOL) -> FeasibilityResult:
    """Decide how a constraint system meets its box.

    Feasibility and the FeasibleInterior/BoundaryOnly split are governed by
    the strict-row slack level t* (Empty iff the closed relaxation misses
    the box, FeasibleInterior iff t* > tol).  The witness, however, comes
    from a stronger program that also pushes off the non-strict hyperplanes
    whenever the region leaves room for that; an LP optimum is allowed to
    park exactly on a non-strict row, and a witness there would recompute
    its configuration bits at the mercy of roundoff.  The common case costs
    a single LP: if the all-rows clearance already beats tol, the strict
    slack t* is at least as large and the verdict is settled.
    """
    if tol < 0.0 or not math.isfinite(tol):
        raise ValidationError("tolerance must be a finite non-negative number")
    strict_rows, nonstrict_rows, contradiction = _split_rows(cs.halfspaces)
    if contradiction:
        return FeasibilityResult(Verdict.EMPTY, None, None)

    box = cs.box
    polished = _solve_max_slack(strict_rows, nonstrict_rows, box, True)
    if polished.status == simplex.INFEASIBLE:
        # at t = 0 this program is exactly the closed relaxation
        return FeasibilityResult(Verdict.EMPTY, None, None)
    if float(polished.objective) > tol:
        witness = box.lo + polished.x[: box.dim]
        slack = 1.0
        for h in strict_rows:
            slack = min(slack, h.slack(witness))
        if slack > tol:
            return FeasibilityResult(Verdict.FEASIBLE_INTERIOR, witness, slack)

    # the region is pinched against some non-strict hyperplane (or has no
    # interior at all); fall back to the plain strict-row program
    result = _solve_max_slack(strict_rows, nonstrict_rows, box, False)
    if result.status == simplex.INFEASIBLE:
        return FeasibilityResult(Verdict.EMPTY, None, None)
    witness = box.lo + result.x[: box.dim]
    t_star = float(result.objective)
    if t_star > tol:
        return FeasibilityResult(Verdict.FEASIBLE_INTERIOR, witness, t_star)
    return FeasibilityResult(Verdict.BOUNDARY_ONLY, witness, t_star)


def is_feasible(cs: ConstraintSystem, tol: float = DEFAULT_TOL) -> Verdict:
    return check_feasibility(cs, tol).verdict


@dataclass(frozen=True)
class RegionNode:
    """A feasible configuration prefix in the refinement tree.

    ``config`` is None only at the root (the bare box).  Leaves fix all
    L-1 hidden layers and are the actual linear regions; Empty candidates
    are pruned during the search and never become nodes.
    ``next_layer_form`` holds the input-space affine form (A, c) of the
    first undecided hidden layer (None at the leaves); renderers use it to
    draw that layer's hyperplanes inside the node's polygon.
    """

    config: Configuration | None
    system: ConstraintSystem
    verdict: Verdict
    witness: np.ndarray | None
    max_slack: float | None
    next_layer_form: tuple[np.ndarray, np.ndarray] | None
    children: tuple["RegionNode", ...]

    @property
    def depth(self) -> int:
        return 0 if self.config is None else self.config.num_layers

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class RegionTree:
    """The layerwise partition refinement of a network over a box.

    ``explored`` counts every candidate (partial or complete bit pattern)
    whose feasibility the search had to resolve.
    """

    net: NetworkSpec
    box: Box
    tol: float
    root: RegionNode
    explored: int

    def nodes_at_depth(self, depth: int) -> list[RegionNode]:
        if not 0 <= depth <= self.net.depth - 1:
            raise ValidationError(
                f"depth must lie in [0, {self.net.depth - 1}], got {depth}"
            )
        level = [self.root]
        for _ in range(depth):
            level = [child for node in level for child in node.children]
        return level

    def leaves(self) -> list[RegionNode]:
        return self.nodes_at_depth(self.net.depth - 1)

    def layer_counts(self) -> tuple[int, ...]:
        """Number of realized configuration prefixes per hidden layer."""
        return tuple(len(self.nodes_at_depth(k)) for k in range(1, self.net.depth))


class _Search:
    def __init__(self, net: NetworkSpec, box: Box, tol: float, budget: int):
        self.net = net
        self.box = box
        self.tol = tol
        self.budget = budget
        self.explored = 0

    def _charge(self):
        if self.explored >= self.budget:
            raise BudgetExceededError(self.budget, self.explored)
        self.explored += 1

    def _resolve(self, rows: list[Halfspace], new_row: Halfspace, inherited: FeasibilityResult) -> FeasibilityResult:
        """Feasibility of ``rows + [new_row]``, reusing certificates.

        A zero-normal row is decided by its sign alone.  Otherwise, if the
        parent candidate was certified interior-feasible and its witness
        clears the new row by more than the tolerance, the witness carries
        over.  Only when both shortcuts fail does the LP run.
        """
        self._charge()
        if new_row.is_zero_normal:
            satisfiable = new_row.offset > 0.0 if new_row.strict else new_row.offset <= 0.0
            if not satisfiable:
                return FeasibilityResult(Verdict.EMPTY, None, None)
            return inherited
        if (
            inherited.verdict is Verdict.FEASIBLE_INTERIOR
            and inherited.witness is not None
            and inherited.max_slack is not None
        ):
            m = new_row.margin(inherited.witness)
            if m > self.tol:
                return FeasibilityResult(
                    Verdict.FEASIBLE_INTERIOR,
                    inherited.witness,
                    min(inherited.max_slack, m),
                )
        cs = ConstraintSystem(halfspaces=tuple(rows) + (new_row,), box=self.box, source=None)
        return check_feasibility(cs, self.tol)

    def refine(
        self,
        config: Configuration | None,
        rows: list[Halfspace],
        state: FeasibilityResult,
        form: tuple[np.ndarray, np.ndarray] | None,
    ) -> RegionNode:
        depth = 0 if config is None else config.num_layers
        system = ConstraintSystem(halfspaces=tuple(rows), box=self.box, source=config)
        if depth == self.net.depth - 1:
            return RegionNode(
                config=config,
                system=system,
                verdict=state.verdict,
                witness=state.witness,
                max_slack=state.max_slack,
                next_layer_form=None,
                children=(),
            )

        a, c = form
        width = a.shape[0]
        children: list[RegionNode] = []

        def split(i: int, partial_rows: list[Halfspace], partial_state: FeasibilityResult, bits: list[int]):
            if i == width:
                block = np.array(bits, dtype=np.int8)
                child_config = Configuration((block,)) if config is None else config.extend(block)
                if depth + 1 == self.net.depth - 1:
                    child_form = None
                else:
                    mask = block.astype(float)
                    w = self.net.layers[depth + 1].weights
                    b = self.net.layers[depth + 1].bias
                    child_form = (w @ (mask[:, None] * a), w @ (mask * c) + b)
                children.append(self.refine(child_config, partial_rows, partial_state, child_form))
                return
            for bit in (0, 1):
                row = Halfspace(normal=a[i], offset=float(c[i]), strict=bool(bit))
                result = self._resolve(partial_rows, row, partial_state)
                if result.verdict is not Verdict.EMPTY:
                    split(i + 1, partial_rows + [row], result, bits + [bit])

        split(0, list(rows), state, [])
        return RegionNode(
            config=config,
            system=system,
            verdict=state.verdict,
            witness=state.witness,
            max_slack=state.max_slack,
            next_layer_form=(readonly_array(a, ndim=2), readonly_array(c, ndim=1)),
            children=tuple(children),
        )


def enumerate_regions(
    net: NetworkSpec,
    box: Box | None = None,
    tol: float = DEFAULT_TOL,
    budget: int = DEFAULT_BUDGET,
) -> RegionTree:
    """Enumerate every configuration the network realizes on the box.

    Children are produced in lexicographic bit order (neuron-major, bit 0
    before bit 1), so the tree and everything derived from it are fully
    deterministic.  Exceeding ``budget`` raises BudgetExceededError rather
    than returning a truncated tree.
    """
    if box is None:
        box = Box.cube(net.input_dim)
    if box.dim != net.input_dim:
        raise ShapeError(
            f"box dimension {box.dim} does not match input dimension {net.input_dim}"
        )
    if tol < 0.0 or not math.isfinite(tol):
        raise ValidationError("tolerance must be a finite non-negative number")
    if budget < 1:
        raise ValidationError("budget must be a positive integer")
    search = _Search(net, box, tol, int(budget))
    root_state = FeasibilityResult(
        verdict=Verdict.FEASIBLE_INTERIOR, witness=box.center, max_slack=1.0
    )
    root = search.refine(None, [], root_state, (net.layers[0].weights, net.layers[0].bias))
    return RegionTree(net=net, box=box, tol=tol, root=root, explored=search.explored)


def polygon_of_region_2d(cs: ConstraintSystem) -> np.ndarray:
    """Vertices (counterclockwise) of a 2-d region clipped to its box.

    Intended for FeasibleInterior regions of networks with two inputs;
    anything that comes out degenerate (no area inside the box) raises
    GeometryError.  Strict rows are clipped by their closed side, which
    changes the region only by a measure-zero boundary strip.
    """
    if cs.box.dim != 2:
        raise GeometryError(f"polygons need a 2-d box, got dimension {cs.box.dim}")
    ring = box_corners(cs.box.lo, cs.box.hi)
    for h in cs.halfspaces:
        if h.is_zero_normal:
            ok = h.offset > 0.0 if h.strict else h.offset <= 0.0
            if not ok:
                raise GeometryError("region is empty: a constant row is contradictory")
            continue
        if h.strict:
            ring = clip_halfplane(ring, h.normal, h.offset)
        else:
            ring = clip_halfplane(ring, -h.normal, -h.offset)
        if ring.shape[0] == 0:
            raise GeometryError("region has no area inside the box")
    scale = float(np.max(cs.box.hi - cs.box.lo))
    ring = dedupe_ring(ring, 1e-12 * scale)
    if ring.shape[0] < 3 or polygon_area(ring) <= 0.0:
        raise GeometryError("region degenerates to a point or segment inside the box")
    return readonly_array(ring, ndim=2)
