"""The actual work behind each service route.

Handlers take a request model and return a response model; they raise the
package's exception types and leave transport concerns (HTTP codes, CLI
exit codes) to their callers.
"""

from __future__ import annotations

import numpy as np

from ..affine import affine_piece, atomic_decomposition, evaluate, synthesis_coefficients
from ..bounds import (
    KIND_GLOBAL,
    KIND_WEIGHT_MAGNITUDE,
    BoundReport,
    gradient_stability_report,
    lipschitz_config_bound,
    lipschitz_global_bound,
    spectral_lipschitz_bound,
)
from ..errors import UnsupportedError, ValidationError
from ..netio import config_from_string, config_to_string, network_from_payload
from ..network import NetworkSpec, config_from_trace, forward_pass
from ..regions import (
    Box,
    RegionTree,
    Verdict,
    check_feasibility,
    enumerate_regions,
    region_constraints,
)
from ..tiling import build_tiling_document, render_tiling_svg
from . import schemas


def _net(payload: schemas.NetworkPayload) -> NetworkSpec:
    return network_from_payload(payload.model_dump())


def _box(payload: schemas.BoxPayload | None, net: NetworkSpec) -> Box | None:
    if payload is None:
        return None
    return Box(lo=np.asarray(payload.lo, dtype=float), hi=np.asarray(payload.hi, dtype=float))


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def health() -> schemas.HealthResponse:
    return schemas.HealthResponse(status="ok")


def analyze(req: schemas.AnalyzeRequest) -> schemas.AnalyzeResponse:
    net = _net(req.network)
    x = net.check_input(req.x)
    trace = forward_pass(net, x)
    theta = config_from_trace(trace)
    piece = affine_piece(net, theta)
    deco = atomic_decomposition(net, theta)
    syn = synthesis_coefficients(net, theta, x)

    piece_value = evaluate(piece, x)
    piece_residual = float(np.max(np.abs(trace.output - piece_value)))
    recon = piece.bias.copy()
    w_last = net.layers[-1].weights
    for idx, alpha in zip(syn.support, syn.values):
        recon = recon + alpha * w_last[:, idx]
    synthesis_residual = float(np.max(np.abs(recon - piece_value)))

    return schemas.AnalyzeResponse(
        configuration=config_to_string(theta),
        output=trace.output.tolist(),
        linear=piece.linear.tolist(),
        bias=piece.bias.tolist(),
        atom_count=deco.atom_count,
        nonzero_atom_count=deco.nonzero_atom_count,
        path_count_per_atom=deco.path_count_per_atom,
        atoms=[
            schemas.AtomPayload(
                out_index=a.out_index,
                in_index=a.in_index,
                coefficient=a.coefficient,
                is_zero=a.is_zero,
            )
            for a in deco.atoms
        ],
        synthesis=schemas.SynthesisPayload(support=list(syn.support), values=syn.values.tolist()),
        piece_residual=piece_residual,
        synthesis_residual=synthesis_residual,
    )


def _region_bound(net: NetworkSpec, config) -> float | None:
    if net.depth <= 3:
        return None
    return lipschitz_config_bound(net, config).value


def _enumerate(net: NetworkSpec, box, tol: float, budget: int) -> RegionTree:
    return enumerate_regions(net, box=box, tol=tol, budget=budget)


def enumerate_handler(req: schemas.EnumerateRequest) -> schemas.EnumerateResponse:
    net = _net(req.network)
    tree = _enumerate(net, _box(req.box, net), req.tol, req.budget)
    rows = [
        schemas.RegionRowPayload(
            configuration=config_to_string(leaf.config),
            verdict=leaf.verdict.value,
            atoms=atomic_decomposition(net, leaf.config).atom_count,
            lipschitz_bound=_region_bound(net, leaf.config),
        )
        for leaf in tree.leaves()
    ]
    return schemas.EnumerateResponse(
        box=schemas.BoxPayload(lo=tree.box.lo.tolist(), hi=tree.box.hi.tolist()),
        layer_counts=list(tree.layer_counts()),
        explored=tree.explored,
        rows=rows,
    )


def tile2d(req: schemas.Tile2dRequest) -> schemas.Tile2dResponse:
    net = _net(req.network)
    tree = _enumerate(net, _box(req.box, net), req.tol, req.budget)
    document = build_tiling_document(net, tree)
    svg = render_tiling_svg(net, tree, document)
    return schemas.Tile2dResponse(
        document=schemas.TilingDocumentPayload(**document), svg=svg
    )


def _report_payload(report: BoundReport) -> schemas.BoundReportPayload:
    return schemas.BoundReportPayload(
        kind=report.kind,
        configuration=None if report.config is None else config_to_string(report.config),
        value=report.value,
        ingredients=_jsonable(report.ingredients),
        normalization_ok=report.normalization_ok,
        note=None,
    )


def _note_payload(kind: str, configuration: str | None, message: str) -> schemas.BoundReportPayload:
    return schemas.BoundReportPayload(
        kind=kind, configuration=configuration, value=None, ingredients={},
        normalization_ok=None, note=message,
    )


def bounds(req: schemas.BoundsRequest) -> schemas.BoundsResponse:
    net = _net(req.network)
    box = _box(req.box, net)
    reports: list[schemas.BoundReportPayload] = []

    try:
        reports.append(_report_payload(lipschitz_global_bound(net)))
    except UnsupportedError as exc:
        reports.append(_note_payload(KIND_GLOBAL, None, str(exc)))
    reports.append(_report_payload(spectral_lipschitz_bound(net)))

    if req.config is not None:
        theta = config_from_string(req.config, net)
        try:
            reports.append(_report_payload(lipschitz_config_bound(net, theta)))
        except UnsupportedError as exc:
            reports.append(_note_payload(KIND_WEIGHT_MAGNITUDE, req.config, str(exc)))
        if req.beta is not None:
            cs = region_constraints(net, theta, box)
            res = check_feasibility(cs, req.tol)
            if res.verdict is not Verdict.FEASIBLE_INTERIOR:
                raise ValidationError(
                    f"configuration {req.config} has no interior point in the box "
                    f"(verdict {res.verdict.value})"
                )
            reports.extend(_gradient_payloads(net, res.witness, req.beta))
        return schemas.BoundsResponse(reports=reports)

    tree = _enumerate(net, box, req.tol, req.budget)
    leaves = tree.leaves()
    if net.depth <= 3:
        reports.append(
            _note_payload(
                KIND_WEIGHT_MAGNITUDE,
                None,
                f"per-region weight-magnitude bounds need at least 4 layers (got {net.depth})",
            )
        )
    else:
        reports.extend(
            _report_payload(lipschitz_config_bound(net, leaf.config)) for leaf in leaves
        )
    if req.beta is not None:
        for leaf in leaves:
            if leaf.verdict is Verdict.FEASIBLE_INTERIOR and leaf.witness is not None:
                reports.extend(_gradient_payloads(net, leaf.witness, req.beta))
    return schemas.BoundsResponse(reports=reports)


def _gradient_payloads(net: NetworkSpec, x, beta: float) -> list[schemas.BoundReportPayload]:
    loss_grad = forward_pass(net, x).output  # gradient of ||y||^2/2 at zero target
    return [_report_payload(r) for r in gradient_stability_report(net, x, loss_grad, beta)]
