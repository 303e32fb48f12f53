"""JSON model files with a format/version header.

Floats are written with ``repr`` precision by the json module, so a save/load
round trip reproduces predictions bit for bit.
"""

from __future__ import annotations

import json

from ..errors import ModelFormatError
from .bayes import NaiveBayes
from .boosting import BoostedEnsemble
from .forest import Forest
from .tree import Tree

FORMAT = "buycascade-model"
VERSION = 1

_KINDS = {
    "tree": Tree,
    "forest": Forest,
    "adaboost_m1": BoostedEnsemble,
    "naive_bayes": NaiveBayes,
}
_KIND_OF = {cls: kind for kind, cls in _KINDS.items()}


def model_to_dict(model) -> dict:
    kind = _KIND_OF.get(type(model))
    if kind is None:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return {"kind": kind, "params": model.to_dict()}


def model_from_dict(d: dict):
    try:
        cls = _KINDS[d["kind"]]
    except KeyError:
        raise ModelFormatError(f"unknown model kind {d.get('kind')!r}") from None
    return cls.from_dict(d["params"])


def dump_document(payload: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump({"format": FORMAT, "version": VERSION, **payload}, fh)


def load_document(path) -> dict:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: not a model file ({exc})") from None
    if doc.get("format") != FORMAT:
        raise ModelFormatError(f"{path}: missing {FORMAT!r} header")
    if doc.get("version") != VERSION:
        raise ModelFormatError(f"{path}: unsupported version {doc.get('version')}")
    return doc


def save_model(model, path) -> None:
    dump_document({"model": model_to_dict(model)}, path)


def load_model(path):
    return model_from_dict(load_document(path)["model"])
