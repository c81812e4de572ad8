"""File formats: network JSON, configuration strings, CSV rows.

All serialization is canonical so identical inputs produce byte-identical
outputs: floats are printed with %.17g (shortest text that round-trips a
double is not needed; 17 significant digits always round-trip), object keys
keep a fixed order, and collections are emitted with fixed separators.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import NetworkFormatError, ValidationError
from .network import Configuration, NetworkSpec, check_configuration


def format_float(value: float) -> str:
    value = float(value)
    if value != value or value in (float("inf"), float("-inf")):
        raise ValidationError("cannot serialize a non-finite number")
    return "%.17g" % value


def _dump(value, lines: list[str], pad: str, indent: str):
    if isinstance(value, dict):
        if not value:
            lines.append("{}")
            return
        lines.append("{")
        items = list(value.items())
        for pos, (key, item) in enumerate(items):
            if not isinstance(key, str):
                raise ValidationError(f"JSON object keys must be strings, got {key!r}")
            lines.append(f"\n{pad}{indent}{json.dumps(key)}: ")
            _dump(item, lines, pad + indent, indent)
            if pos < len(items) - 1:
                lines.append(",")
        lines.append(f"\n{pad}}}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        seq = value.tolist() if isinstance(value, np.ndarray) else list(value)
        if not seq:
            lines.append("[]")
            return
        lines.append("[")
        for pos, item in enumerate(seq):
            lines.append(f"\n{pad}{indent}")
            _dump(item, lines, pad + indent, indent)
            if pos < len(seq) - 1:
                lines.append(",")
        lines.append(f"\n{pad}]")
    elif isinstance(value, bool) or value is None:
        lines.append("null" if value is None else ("true" if value else "false"))
    elif isinstance(value, (int, np.integer)):
        lines.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        lines.append(format_float(value))
    elif isinstance(value, str):
        lines.append(json.dumps(value))
    else:
        raise ValidationError(f"cannot serialize {type(value).__name__} to JSON")


def canonical_json(value, indent: int = 2) -> str:
    """Deterministic JSON text (keys in insertion order, %.17g floats)."""
    lines: list[str] = []
    _dump(value, lines, "", " " * indent)
    return "".join(lines) + "\n"


def _require_number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise NetworkFormatError(f"{where} must be a number, got {type(value).__name__}")
    out = float(value)
    if not np.isfinite(out):
        raise NetworkFormatError(f"{where} is not finite")
    return out


def network_from_payload(doc) -> NetworkSpec:
    """Build a NetworkSpec from parsed JSON, with pointed error messages."""
    if not isinstance(doc, dict):
        raise NetworkFormatError("top level of a network file must be a JSON object")
    layers = doc.get("layers")
    if not isinstance(layers, list) or not layers:
        raise NetworkFormatError('a network file needs a non-empty "layers" array')
    pairs = []
    for idx, entry in enumerate(layers, start=1):
        where = f"layer {idx}"
        if not isinstance(entry, dict):
            raise NetworkFormatError(f"{where} must be an object")
        weights = entry.get("weights")
        bias = entry.get("bias")
        if not isinstance(weights, list) or not weights:
            raise NetworkFormatError(f'{where}: "weights" must be a non-empty array of rows')
        if not isinstance(bias, list) or not bias:
            raise NetworkFormatError(f'{where}: "bias" must be a non-empty array')
        width = None
        rows = []
        for r, row in enumerate(weights):
            if not isinstance(row, list) or not row:
                raise NetworkFormatError(f"{where}: weights[{r}] must be a non-empty array")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise NetworkFormatError(
                    f"{where}: weights[{r}] has {len(row)} entries, expected {width}"
                )
            rows.append([_require_number(v, f"{where}: weights[{r}][{j}]") for j, v in enumerate(row)])
        bias_row = [_require_number(v, f"{where}: bias[{j}]") for j, v in enumerate(bias)]
        if len(bias_row) != len(rows):
            raise NetworkFormatError(
                f"{where}: bias has {len(bias_row)} entries but weights has {len(rows)} rows"
            )
        pairs.append((rows, bias_row))
    return NetworkSpec.from_arrays(pairs)


def load_network(path) -> NetworkSpec:
    """Read a network JSON file: {"layers": [{"weights": [[..]], "bias": [..]}]}."""
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise NetworkFormatError(f"network file not found: {path}") from None
    except OSError as exc:
        raise NetworkFormatError(f"cannot read network file {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(
            f"invalid JSON in {path} (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from None
    return network_from_payload(doc)


def network_payload(net: NetworkSpec) -> dict:
    return {
        "layers": [
            {"weights": layer.weights.tolist(), "bias": layer.bias.tolist()}
            for layer in net.layers
        ]
    }


def network_to_json_text(net: NetworkSpec) -> str:
    return canonical_json(network_payload(net))


def save_network(net: NetworkSpec, path):
    Path(path).write_text(network_to_json_text(net))


def config_to_string(theta: Configuration) -> str:
    """Bit blocks joined by '|'; character i stands for neuron i+1."""
    return "|".join("".join("1" if b else "0" for b in block) for block in theta.blocks)


def config_from_string(text: str, net: NetworkSpec | None = None) -> Configuration:
    """Parse a '0101|10...' configuration string, optionally checked against a network."""
    if not isinstance(text, str) or not text:
        raise ValidationError("configuration string must be non-empty")
    blocks = []
    for k, chunk in enumerate(text.split("|"), start=1):
        if not chunk or any(ch not in "01" for ch in chunk):
            raise ValidationError(
                f"configuration block {k} must be a non-empty string of 0s and 1s, got {chunk!r}"
            )
        blocks.append(np.array([1 if ch == "1" else 0 for ch in chunk], dtype=np.int8))
    theta = Configuration(tuple(blocks))
    if net is not None:
        check_configuration(net, theta)
    return theta


CSV_HEADER = "configuration,verdict,atoms,lipschitz_bound"


def regions_to_csv(rows) -> str:
    """CSV text for enumerated regions.

    ``rows`` yields (configuration string, verdict string, atom count,
    bound or None); the bound column is left empty when no bound applies.
    """
    lines = [CSV_HEADER]
    for config_text, verdict, atoms, bound in rows:
        bound_text = "" if bound is None else format_float(bound)
        lines.append(f"{config_text},{verdict},{int(atoms)},{bound_text}")
    return "\n".join(lines) + "\n"
