"""Scheme file save/load: a versioned JSON document, one top-level map per
object class keyed by id. Round-trips are loss-free."""

from __future__ import annotations

import json

from .errors import IoError, ParseError, VersionMismatch
from .model import (
    BlockInstance,
    ChainDimension,
    Connection,
    ConstructionGrid,
    HeightMark,
    OffsetSpec,
    Pipe,
    PositionDesignator,
    Scheme,
    SchemeSettings,
    SpecRow,
    TextAnnotation,
)

FORMAT_VERSION = 1

_STORES = (
    ("pipes", "pipes", Pipe),
    ("connections", "connections", Connection),
    ("blocks", "blocks", BlockInstance),
    ("dimensions", "dimensions", ChainDimension),
    ("texts", "texts", TextAnnotation),
    ("designators", "designators", PositionDesignator),
    ("heightMarks", "height_marks", HeightMark),
    ("offsets", "offsets", OffsetSpec),
    ("grids", "grids", ConstructionGrid),
)


def scheme_to_dict(scheme: Scheme) -> dict:
    doc: dict = {"version": FORMAT_VERSION}
    for key, attr, _ in _STORES:
        store = getattr(scheme, attr)
        doc[key] = {str(oid): store[oid].to_dict() for oid in sorted(store)}
    doc["specRows"] = {str(p): scheme.spec_rows[p].to_dict()
                       for p in sorted(scheme.spec_rows)}
    doc["settings"] = scheme.settings.to_dict()
    doc["nextId"] = scheme.next_id
    return doc


def scheme_from_dict(doc: dict) -> Scheme:
    if not isinstance(doc, dict) or "version" not in doc:
        raise ParseError("not a scheme document (missing version)")
    if doc["version"] != FORMAT_VERSION:
        raise VersionMismatch(
            f"scheme version {doc['version']!r}, this build reads {FORMAT_VERSION}")
    try:
        scheme = Scheme(settings=SchemeSettings.from_dict(doc["settings"]))
        for key, attr, cls in _STORES:
            store = getattr(scheme, attr)
            for oid_text, data in doc.get(key, {}).items():
                oid = int(oid_text)
                store[oid] = cls.from_dict(oid, data)
        for pos_text, data in doc.get("specRows", {}).items():
            scheme.spec_rows[int(pos_text)] = SpecRow.from_dict(data)
        scheme.next_id = int(doc["nextId"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed scheme document: {exc}") from exc
    return scheme


def save(scheme: Scheme, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(scheme_to_dict(scheme), fh, indent=1, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def load(path: str) -> Scheme:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return scheme_from_dict(doc)


def graph_equal(a: Scheme, b: Scheme) -> bool:
    """Loss-free equality over the whole object graph, ids included."""
    return scheme_to_dict(a) == scheme_to_dict(b)
