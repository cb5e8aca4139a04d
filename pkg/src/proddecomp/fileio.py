"""JSON file formats for decompositions and operators (format_version "1").

Decomposition files carry per-term kets as parallel re/im arrays plus either
a positive real weight ("w", operator form) or a complex coefficient
("coeff", vector form).  Operator files carry a row-major dense matrix.
Numbers are written with 17 significant digits so parse -> serialize is
byte-stable and floats round-trip exactly.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, DimensionMismatch, FileError
from .tensor import (
    FactoredDims,
    Ket,
    ProductDecomposition,
    ProductTerm,
    StateOperator,
    TriDecomposition,
    TriTerm,
)

FORMAT_VERSION = "1"


# ---------------------------------------------------------------------------
# canonical JSON writing


def _fmt_number(x: float) -> str:
    if isinstance(x, bool) or not math.isfinite(x):
        raise FileError(f"cannot serialize number {x!r}")
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def dumps_canonical(obj, indent: int = 0) -> str:
    """Deterministic JSON text: insertion-ordered keys, 17-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f'{inner}{json.dumps(str(k))}: {dumps_canonical(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [f"{inner}{dumps_canonical(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float)):
        return _fmt_number(obj)
    if obj is None:
        return "null"
    raise FileError(f"cannot serialize object of type {type(obj).__name__}")


def _write(path: str, payload: dict) -> None:
    text = dumps_canonical(payload) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _ket_json(k: Ket) -> dict:
    return {
        "re": [float(v) for v in k.amplitudes.real],
        "im": [float(v) for v in k.amplitudes.imag],
    }


def _complex_json(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


# ---------------------------------------------------------------------------
# saving


def decomposition_payload(obj: ProductDecomposition | TriDecomposition) -> dict:
    terms = []
    if isinstance(obj, ProductDecomposition):
        for t in obj.terms:
            terms.append({"w": t.weight, "kets": [_ket_json(t.a), _ket_json(t.b)]})
    elif isinstance(obj, TriDecomposition):
        for t in obj.terms:
            terms.append(
                {"coeff": _complex_json(t.coeff), "kets": [_ket_json(k) for k in t.kets]}
            )
    else:
        raise FileError(f"cannot serialize decomposition of type {type(obj).__name__}")
    return {
        "format_version": FORMAT_VERSION,
        "kind": "decomposition",
        "dims": list(obj.dims.dims),
        "terms": terms,
    }


def save_decomposition(path: str, obj: ProductDecomposition | TriDecomposition) -> None:
    _write(path, decomposition_payload(obj))


def operator_payload(op: StateOperator) -> dict:
    flat = op.matrix.reshape(-1)
    return {
        "format_version": FORMAT_VERSION,
        "kind": "operator",
        "dims": list(op.dims.dims),
        "matrix": {
            "re": [float(v) for v in flat.real],
            "im": [float(v) for v in flat.imag],
        },
    }


def save_operator(path: str, op: StateOperator) -> None:
    _write(path, operator_payload(op))


# ---------------------------------------------------------------------------
# loading


def _load_json(path: str) -> dict:
    if not os.path.exists(path):
        raise FileError(f"no such file: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FileError(f"{path}: cannot parse JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise FileError(f"{path}: top-level value must be an object")
    if data.get("format_version") != FORMAT_VERSION:
        raise FileError(f"{path}: unsupported format_version {data.get('format_version')!r}")
    return data


def _parse_dims(data: dict, path: str, lengths: tuple[int, ...]) -> FactoredDims:
    dims = data.get("dims")
    if not isinstance(dims, list) or len(dims) not in lengths or not all(
        isinstance(d, int) and d >= 1 for d in dims
    ):
        raise FileError(f"{path}: dims must be a list of {lengths} positive integers, got {dims!r}")
    try:
        return FactoredDims(tuple(dims))
    except DimensionMismatch as exc:
        raise FileError(f"{path}: {exc}") from exc


def _parse_ket(raw, path: str, where: str, dim: int) -> Ket:
    if not isinstance(raw, dict) or set(raw) != {"re", "im"}:
        raise FileError(f"{path}: {where} must be an object with re/im arrays")
    re, im = raw["re"], raw["im"]
    if (
        not isinstance(re, list)
        or not isinstance(im, list)
        or len(re) != dim
        or len(im) != dim
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in re + im)
    ):
        raise FileError(f"{path}: {where} re/im must be numeric arrays of length {dim}")
    try:
        return Ket(np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float))
    except (DegenerateInput, DimensionMismatch) as exc:
        raise FileError(f"{path}: {where}: {exc}") from exc


def _parse_value(term: dict, path: str, where: str) -> tuple[str, complex]:
    has_w = "w" in term
    has_coeff = "coeff" in term
    if has_w == has_coeff:
        raise FileError(f"{path}: {where} must carry exactly one of 'w' or 'coeff'")
    if has_w:
        w = term["w"]
        if not isinstance(w, (int, float)) or isinstance(w, bool) or not w > 0:
            raise FileError(f"{path}: {where} weight must be a positive number, got {w!r}")
        return "weight", complex(float(w))
    z = term["coeff"]
    if isinstance(z, (int, float)) and not isinstance(z, bool):
        val = complex(float(z))
    elif isinstance(z, dict) and set(z) == {"re", "im"}:
        re, im = z["re"], z["im"]
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)):
            raise FileError(f"{path}: {where} coeff re/im must be numbers")
        val = complex(float(re), float(im))
    else:
        raise FileError(f"{path}: {where} coeff must be a number or a re/im object")
    if abs(val) == 0.0:
        raise FileError(f"{path}: {where} coefficient must be nonzero")
    return "coeff", val


@dataclass(frozen=True, eq=False)
class LoadedDecomposition:
    """Schema-validated decomposition file, not yet committed to a core type."""

    dims: FactoredDims
    form: str  # "weight" | "coeff"
    values: tuple[complex, ...]
    kets: tuple[tuple[Ket, ...], ...]  # terms x factors

    @property
    def n(self) -> int:
        return len(self.values)

    def product(self) -> ProductDecomposition:
        """Interpret as a weighted product-projector decomposition (2 factors)."""
        if len(self.dims) != 2:
            raise FileError(f"expected a 2-factor decomposition, file has {len(self.dims)} factors")
        if self.form != "weight":
            raise FileError("expected weight-form terms ('w'), file carries coefficients")
        return ProductDecomposition(
            self.dims,
            tuple(ProductTerm(v.real, ks[0], ks[1]) for v, ks in zip(self.values, self.kets)),
        )

    def tri(self) -> TriDecomposition:
        """Interpret as a coefficient tridecomposition (3 factors)."""
        if len(self.dims) != 3:
            raise FileError(f"expected a 3-factor decomposition, file has {len(self.dims)} factors")
        if self.form != "coeff":
            raise FileError("expected coefficient-form terms ('coeff'), file carries weights")
        return TriDecomposition(
            self.dims,
            tuple(TriTerm(v, ks[0], ks[1], ks[2]) for v, ks in zip(self.values, self.kets)),
        )

    def vector(self) -> tuple[np.ndarray, float]:
        """Raw global vector sum_j value_j (x)kets_j and its norm (coeff form only)."""
        if self.form != "coeff":
            raise FileError("only coefficient-form files define a global vector")
        out = np.zeros(self.dims.total, dtype=complex)
        for v, ks in zip(self.values, self.kets):
            acc = ks[0].amplitudes
            for k in ks[1:]:
                acc = np.kron(acc, k.amplitudes)
            out += v * acc
        return out, float(np.linalg.norm(out))


def load_decomposition(path: str) -> LoadedDecomposition:
    data = _load_json(path)
    if data.get("kind") != "decomposition":
        raise FileError(f"{path}: expected kind 'decomposition', got {data.get('kind')!r}")
    dims = _parse_dims(data, path, (2, 3))
    raw_terms = data.get("terms")
    if not isinstance(raw_terms, list) or not raw_terms:
        raise FileError(f"{path}: terms must be a nonempty list")
    forms, values, kets = set(), [], []
    for i, term in enumerate(raw_terms):
        if not isinstance(term, dict):
            raise FileError(f"{path}: term {i} must be an object")
        form, value = _parse_value(term, path, f"term {i}")
        forms.add(form)
        raw_kets = term.get("kets")
        if not isinstance(raw_kets, list) or len(raw_kets) != len(dims):
            raise FileError(f"{path}: term {i} must carry one ket per factor ({len(dims)})")
        values.append(value)
        kets.append(
            tuple(
                _parse_ket(raw, path, f"term {i} factor {f}", dims[f])
                for f, raw in enumerate(raw_kets)
            )
        )
    if len(forms) != 1:
        raise FileError(f"{path}: terms mix 'w' and 'coeff' forms")
    return LoadedDecomposition(dims, forms.pop(), tuple(values), tuple(kets))


def load_operator(path: str) -> StateOperator:
    data = _load_json(path)
    if data.get("kind") != "operator":
        raise FileError(f"{path}: expected kind 'operator', got {data.get('kind')!r}")
    dims = _parse_dims(data, path, (1, 2, 3))
    raw = data.get("matrix")
    size = dims.total * dims.total
    if not isinstance(raw, dict) or set(raw) != {"re", "im"}:
        raise FileError(f"{path}: matrix must be an object with re/im arrays")
    re, im = raw["re"], raw["im"]
    if (
        not isinstance(re, list)
        or not isinstance(im, list)
        or len(re) != size
        or len(im) != size
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in re + im)
    ):
        raise FileError(f"{path}: matrix re/im must be numeric arrays of length {size}")
    m = (np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float)).reshape(
        dims.total, dims.total
    )
    try:
        return StateOperator(dims, m)
    except (DegenerateInput, DimensionMismatch) as exc:
        raise FileError(f"{path}: {exc}") from exc


def detect_kind(path: str) -> str:
    """'decomposition' or 'operator' per the file's kind field."""
    kind = _load_json(path).get("kind")
    if kind not in ("decomposition", "operator"):
        raise FileError(f"{path}: unknown kind {kind!r}")
    return str(kind)
