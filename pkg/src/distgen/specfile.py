"""JSON spec documents.

A document looks like::

    {
      "form": "direct",
      "n": 1,
      "m": 1,
      "expressions": {
        "scale_u": "1", "scale_v": "0",
        "upper": ["g1"], "lower": ["0"], "m_lower": ["0"], "v_upper": ["0"]
      },
      "baseline_f": {"family": "beta", "params": {"a": 2, "b": 2}},
      "baselines_g": [{"family": "uniform01", "params": {}}]
    }

``label`` is optional.  Expression strings use the monotone DSL grammar.
"""
from __future__ import annotations

import json
from pathlib import Path

from . import dsl
from .baseline import from_spec, to_spec
from .errors import DistgenError, SpecError
from .generator import GeneratorSpec

_KEYS = {"form", "n", "m", "expressions", "baseline_f", "baselines_g", "label"}
_REQUIRED = _KEYS - {"label"}
_LISTS = ("upper", "lower", "m_lower", "v_upper")
_SCALARS = ("scale_u", "scale_v")


def _need(cond: bool, msg: str):
    if not cond:
        raise SpecError(msg)


def _baseline(doc, where: str):
    _need(isinstance(doc, dict), f"{where} must be an object with 'family' and 'params'")
    extra = set(doc) - {"family", "params"}
    _need(not extra, f"{where}: unknown keys {sorted(extra)}")
    _need(isinstance(doc.get("family"), str), f"{where}: 'family' must be a string")
    params = doc.get("params", {})
    _need(isinstance(params, dict), f"{where}: 'params' must be an object")
    return from_spec(doc["family"], params)


def spec_from_document(doc: dict) -> GeneratorSpec:
    """Build a GeneratorSpec from a parsed JSON document."""
    _need(isinstance(doc, dict), "spec document must be a JSON object")
    missing = _REQUIRED - set(doc)
    _need(not missing, f"spec document lacks {sorted(missing)}")
    unknown = set(doc) - _KEYS
    _need(not unknown, f"spec document has unknown keys {sorted(unknown)}")
    n, m = doc["n"], doc["m"]
    _need(isinstance(n, int) and not isinstance(n, bool) and n >= 1, "'n' must be a positive integer")
    _need(isinstance(m, int) and not isinstance(m, bool) and m >= 1, "'m' must be a positive integer")
    gs = doc["baselines_g"]
    _need(isinstance(gs, list) and len(gs) == m, f"'baselines_g' must list exactly m = {m} baselines")
    G = [_baseline(g, f"baselines_g[{i}]") for i, g in enumerate(gs)]
    F = _baseline(doc["baseline_f"], "baseline_f")

    ex = doc["expressions"]
    _need(isinstance(ex, dict), "'expressions' must be an object")
    want = set(_LISTS) | set(_SCALARS)
    _need(set(ex) == want, f"'expressions' needs exactly the keys {sorted(want)}")

    def parse(text, where):
        _need(isinstance(text, str), f"{where} must be a DSL string")
        return dsl.parse(text, m)

    lists = {}
    for key in _LISTS:
        items = ex[key]
        _need(isinstance(items, list) and len(items) == n, f"expressions.{key} must list n = {n} strings")
        lists[key] = [parse(t, f"expressions.{key}[{j}]") for j, t in enumerate(items)]
    label = doc.get("label", "")
    _need(isinstance(label, str), "'label' must be a string")
    return GeneratorSpec(
        doc["form"], parse(ex["scale_u"], "expressions.scale_u"),
        parse(ex["scale_v"], "expressions.scale_v"),
        lists["upper"], lists["lower"], lists["m_lower"], lists["v_upper"], F, G, label,
    )


def document_from_spec(spec: GeneratorSpec) -> dict:
    """Inverse of spec_from_document."""
    try:
        ex = {"scale_u": dsl.to_text(spec.scale_u), "scale_v": dsl.to_text(spec.scale_v)}
        for key in _LISTS:
            ex[key] = [dsl.to_text(e) for e in getattr(spec, key)]
    except DistgenError as exc:
        raise SpecError(f"spec cannot be written as a document: {exc}") from exc
    doc = {
        "form": spec.form,
        "n": spec.n,
        "m": spec.m,
        "expressions": ex,
        "baseline_f": to_spec(spec.baseline_f),
        "baselines_g": [to_spec(G) for G in spec.baselines_g],
    }
    if spec.label:
        doc["label"] = spec.label
    return doc


def loads(text: str) -> GeneratorSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"not valid JSON: {exc}") from exc
    return spec_from_document(doc)


def dumps(spec: GeneratorSpec) -> str:
    return json.dumps(document_from_spec(spec), indent=2, sort_keys=False) + "\n"


def load(path) -> GeneratorSpec:
    return loads(Path(path).read_text(encoding="utf-8"))


def dump(spec: GeneratorSpec, path) -> None:
    Path(path).write_text(dumps(spec), encoding="utf-8")


__all__ = ["spec_from_document", "document_from_spec", "loads", "dumps", "load", "dump"]
