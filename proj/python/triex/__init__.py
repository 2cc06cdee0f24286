"""Python access to the triex core: intervention math, metrics, equity,
artifact parsing and the offline run pipeline."""

import json as _json

from ._core import (
    ConfigError,
    InvalidInput,
    RunError,
    bounded_update,
    estimate_equity,
    exact_equity_heads_up,
    intervene,
    kappa_quadratic,
    spearman,
)
from . import _core

__all__ = [
    "ConfigError",
    "InvalidInput",
    "RunError",
    "audit",
    "bounded_update",
    "default_manifest",
    "estimate_equity",
    "exact_equity_heads_up",
    "intervene",
    "kappa_quadratic",
    "metrics",
    "parse_first_person",
    "play",
    "report",
    "spearman",
]


def _text(manifest):
    return "" if manifest is None else _json.dumps(manifest)


def default_manifest():
    return _json.loads(_core.default_manifest_json())


def parse_first_person(text):
    return _json.loads(_core.parse_first_person_json(text))


def play(manifest=None):
    return _json.loads(_core.play_json(_text(manifest)))


def audit(manifest=None, oracles=None, offline=True):
    return _json.loads(_core.audit_json(_text(manifest), list(oracles or []), offline))


def metrics(manifest=None):
    return _json.loads(_core.metrics_json(_text(manifest)))


def report(manifest=None):
    return _json.loads(_core.report_json(_text(manifest)))
