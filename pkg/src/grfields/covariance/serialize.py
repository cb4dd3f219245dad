"""JSON model documents.

Families and their fields (all required unless noted)::

    {"family": "matern", "nu", "kappa", "sigma2", "d", "normalization" (optional: "variance" | "spde")}
    {"family": "schoenberg", "d", "coeffs", "scale" (optional, default 1)}
    {"family": "berg_porcu", "series": {"d", "coeffs", "scale"}, "cfs": [cf, ...]}
    {"family": "schur_product", "factors": [model, model, ...]}

A characteristic function ``cf`` is ``{"kind": "gaussian", "sigma"}``,
``{"kind": "cauchy", "gamma"}``, ``{"kind": "student_spectral", "nu", "kappa"}``
or ``{"kind": "tabulated", "t": [...], "values": [...]}``. Unknown fields are
rejected with ``ModelFormatError``; mathematically invalid values raise
``ModelValidationError``.
"""

import json
import numbers

from ..exceptions import ModelFormatError
from .base import SchurProduct
from .matern import Matern, MaternParams
from .sphere import CharFunction, GeoTemporalModel, SchoenbergSeries

_FIELDS = {
    "matern": ({"family", "nu", "kappa", "sigma2", "d"}, {"normalization"}),
    "schoenberg": ({"family", "d", "coeffs"}, {"scale"}),
    "berg_porcu": ({"family", "series", "cfs"}, set()),
    "schur_product": ({"family", "factors"}, set()),
}
_SERIES_FIELDS = ({"d", "coeffs"}, {"scale"})
_CF_FIELDS = {
    "gaussian": {"kind", "sigma"},
    "cauchy": {"kind", "gamma"},
    "student_spectral": {"kind", "nu", "kappa"},
    "tabulated": {"kind", "t", "values"},
}


def _check_fields(doc, required, optional, what):
    if not isinstance(doc, dict):
        raise ModelFormatError(f"{what} must be a JSON object")
    missing = required - doc.keys()
    if missing:
        raise ModelFormatError(f"{what} is missing fields {sorted(missing)}")
    unknown = doc.keys() - required - optional
    if unknown:
        raise ModelFormatError(f"{what} has unknown fields {sorted(unknown)}")


def _number(doc, key, what):
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ModelFormatError(f"{what}.{key} must be a number")
    return value


def _integer(doc, key, what):
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ModelFormatError(f"{what}.{key} must be an integer")
    return value


def _number_list(doc, key, what):
    value = doc[key]
    if not isinstance(value, list) or not all(
        isinstance(v, numbers.Real) and not isinstance(v, bool) for v in value
    ):
        raise ModelFormatError(f"{what}.{key} must be a list of numbers")
    return value


def _series_from_dict(doc, what):
    _check_fields(doc, *_SERIES_FIELDS, what)
    scale = _number(doc, "scale", what) if "scale" in doc else 1.0
    return SchoenbergSeries(_integer(doc, "d", what), tuple(_number_list(doc, "coeffs", what)), scale)


def _cf_from_dict(doc, what):
    if not isinstance(doc, dict) or doc.get("kind") not in _CF_FIELDS:
        raise ModelFormatError(f"{what} needs a 'kind' among {sorted(_CF_FIELDS)}")
    kind = doc["kind"]
    _check_fields(doc, _CF_FIELDS[kind], set(), what)
    if kind == "tabulated":
        params = {"t": _number_list(doc, "t", what), "values": _number_list(doc, "values", what)}
    else:
        params = {k: _number(doc, k, what) for k in _CF_FIELDS[kind] - {"kind"}}
    return CharFunction(kind, params)


def model_from_dict(doc, what="model"):
    """Build a covariance evaluator from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ModelFormatError(f"{what} must be a JSON object")
    family = doc.get("family")
    if family not in _FIELDS:
        raise ModelFormatError(f"{what}.family must be one of {sorted(_FIELDS)}, got {family!r}")
    _check_fields(doc, *_FIELDS[family], what)
    if family == "matern":
        params = MaternParams(
            _number(doc, "nu", what), _number(doc, "kappa", what), _number(doc, "sigma2", what), _integer(doc, "d", what)
        )
        normalization = doc.get("normalization", "variance")
        if normalization not in ("variance", "spde"):
            raise ModelFormatError(f"{what}.normalization must be 'variance' or 'spde'")
        return Matern(params, normalization)
    if family == "schoenberg":
        return _series_from_dict({k: v for k, v in doc.items() if k != "family"}, what)
    if family == "berg_porcu":
        series = _series_from_dict(doc["series"], f"{what}.series")
        if not isinstance(doc["cfs"], list) or not doc["cfs"]:
            raise ModelFormatError(f"{what}.cfs must be a nonempty list")
        cfs = [_cf_from_dict(cf, f"{what}.cfs[{k}]") for k, cf in enumerate(doc["cfs"])]
        return GeoTemporalModel(series, tuple(cfs))
    factors = doc["factors"]
    if not isinstance(factors, list) or len(factors) < 2:
        raise ModelFormatError(f"{what}.factors must list at least two models")
    built = [model_from_dict(f, f"{what}.factors[{k}]") for k, f in enumerate(factors)]
    try:
        return SchurProduct(built)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc


def _series_to_dict(s):
    return {"d": s.dim, "coeffs": list(s.coeffs), "scale": s.scale}


def _cf_to_dict(cf):
    doc = {"kind": cf.kind}
    for key, value in cf.params.items():
        doc[key] = list(value) if isinstance(value, tuple) else value
    return doc


def model_to_dict(model):
    """Inverse of ``model_from_dict`` for the serializable families."""
    if isinstance(model, Matern):
        p = model.params
        return {
            "family": "matern",
            "nu": p.nu,
            "kappa": p.kappa,
            "sigma2": p.sigma2,
            "d": p.d,
            "normalization": model.normalization,
        }
    if isinstance(model, SchoenbergSeries):
        return {"family": "schoenberg", **_series_to_dict(model)}
    if isinstance(model, GeoTemporalModel):
        return {
            "family": "berg_porcu",
            "series": _series_to_dict(model.series),
            "cfs": [_cf_to_dict(cf) for cf in model.cfs],
        }
    if isinstance(model, SchurProduct):
        return {"family": "schur_product", "factors": [model_to_dict(f) for f in model.factors]}
    raise TypeError(f"cannot serialize {type(model).__name__}")


def loads_model(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"malformed JSON: {exc}") from exc
    return model_from_dict(doc)


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())


def dumps_model(model):
    return json.dumps(model_to_dict(model), indent=2, sort_keys=True)


def dump_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model) + "\n")
