"""Session state, the command registry and the script runner.

Every kernel operation is exposed as one verb. The same registry backs the
command-script language (one operation per line) and the HTTP service, so
both run through a single code path. Preview/confirm verbs implement the
two-phase flows (part deletion, replication, branch moves).
"""

from __future__ import annotations

import os
import shlex
import threading
from dataclasses import dataclass, field
from typing import Any, Callable

from . import annotate, editops, persist
from .errors import (
    BadParameter,
    KernelError,
    ParseError,
    StaleToken,
    UnknownId,
    UnknownVerb,
)
from .geometry import AxisDir, Point3
from .model import (
    BlockAttachRef,
    Leader,
    PipeEndRef,
    Scheme,
    integrity_check,
    pick,
)
from .projection import PRESETS, Projection, fly_around
from .render import RenderSettings, render
from .svg import emit_svg
from .symbols import Library, enumerate_orientations, load_library
from . import symbols


class ScriptError(KernelError):
    """A script line failed; the scheme keeps the last successful state."""

    def __init__(self, line: int, cause: Exception, transcript: list):
        super().__init__(f"line {line}: {cause}")
        self.line = line
        self.cause = cause
        self.transcript = transcript


@dataclass
class Session:
    """One open scheme plus the current library, catalogs and pending
    preview. Mutations are serialized through a single lock (one writer)."""

    scheme: Scheme = field(default_factory=Scheme)
    library: Library | None = None
    catalogs: list[annotate.Catalog] = field(default_factory=list)
    pending: dict | None = None
    token_seq: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def new_token(self) -> str:
        self.token_seq += 1
        return f"t{self.token_seq}"

    def require_library(self) -> Library:
        if self.library is None:
            raise BadParameter("no symbol library loaded (use: library load <path>)")
        return self.library


# ---------------------------------------------------------------------------
# argument coercion


def _as_float(v) -> float:
    return float(v)

def _as_int(v) -> int:
    return int(v)

def _as_bool(v) -> bool:
    if isinstance(v, bool):
        return v
    return str(v).lower() in ("1", "true", "on", "yes")

def _as_point(v) -> Point3:
    if isinstance(v, (list, tuple)):
        return Point3.from_list(v)
    parts = str(v).split(",")
    if len(parts) != 3:
        raise ParseError(f"expected x,y,z, got {v!r}")
    return Point3(*(float(p) for p in parts))

def _as_vec2(v) -> tuple[float, float]:
    if isinstance(v, (list, tuple)):
        return (float(v[0]), float(v[1]))
    parts = str(v).split(",")
    if len(parts) != 2:
        raise ParseError(f"expected x,y, got {v!r}")
    return (float(parts[0]), float(parts[1]))

def _as_end(v) -> str:
    end = str(v).lower()
    if end not in ("a", "b"):
        raise ParseError(f"end must be a or b, got {v!r}")
    return end

def _as_axisdir(v) -> AxisDir:
    try:
        return AxisDir.parse(str(v))
    except ValueError:
        raise ParseError(f"bad axis direction {v!r} (use +x,-x,+y,-y,+z,-z)") from None

def _as_ids(v) -> list[int]:
    if isinstance(v, (list, tuple)):
        return [int(x) for x in v]
    return [int(x) for x in str(v).replace(",", " ").split()]

def _as_points(v) -> list[Point3]:
    if isinstance(v, (list, tuple)) and v and isinstance(v[0], (list, tuple)):
        return [Point3.from_list(p) for p in v]
    if isinstance(v, (list, tuple)):
        return [_as_point(x) for x in v]
    return [_as_point(tok) for tok in str(v).split()]

def _as_strs(v) -> list[str]:
    if isinstance(v, (list, tuple)):
        return [str(x) for x in v]
    return str(v).split()

def _as_origin(v):
    """Dimension origin: "<pipe>:<a|b>" or "<block>:@<slot>" (or a dict)."""
    if isinstance(v, dict):
        from .model import dim_origin_from_dict
        return dim_origin_from_dict(v)
    text = str(v)
    head, _, tail = text.partition(":")
    if not tail:
        raise ParseError(f"bad origin {text!r}")
    if tail.startswith("@"):
        return BlockAttachRef(block=int(head), slot=int(tail[1:]))
    return PipeEndRef(pipe=int(head), end=_as_end(tail))

def _as_origins(v) -> list:
    if isinstance(v, (list, tuple)):
        return [_as_origin(x) for x in v]
    return [_as_origin(tok) for tok in str(v).split()]

def _as_target(v) -> Leader:
    """Leader target: "<pipe>:<t>" or "@<block>" (anchor filled by caller)."""
    if isinstance(v, dict):
        return Leader.from_dict({"anchor": v.get("anchor", (0.0, 0.0)), **v})
    text = str(v)
    if text.startswith("@"):
        return Leader(anchor=(0.0, 0.0), block=int(text[1:]))
    head, _, tail = text.partition(":")
    if not tail:
        raise ParseError(f"bad leader target {text!r}")
    return Leader(anchor=(0.0, 0.0), pipe=int(head), t=float(tail))

def _as_targets(v) -> list[Leader]:
    if isinstance(v, (list, tuple)):
        return [_as_target(x) for x in v]
    return [_as_target(tok) for tok in str(v).split()]

def _as_breaks(v) -> list[tuple[int, float]]:
    """Break list: "pipe:t pipe:t" or [[pipe, t], ...]."""
    if isinstance(v, (list, tuple)):
        return [(int(p), float(t)) for p, t in v]
    out = []
    for tok in str(v).replace(",", " ").split():
        head, _, tail = tok.partition(":")
        if not tail:
            raise ParseError(f"bad break {tok!r}")
        out.append((int(head), float(tail)))
    return out


_COERCE: dict[str, Callable[[Any], Any]] = {
    "float": _as_float, "int": _as_int, "str": str, "bool": _as_bool,
    "point": _as_point, "vec2": _as_vec2, "end": _as_end,
    "axisdir": _as_axisdir, "ids": _as_ids, "points": _as_points,
    "strs": _as_strs, "origin": _as_origin, "origins": _as_origins,
    "target": _as_target, "targets": _as_targets, "breaks": _as_breaks,
}


@dataclass
class CommandDef:
    name: str
    func: Callable
    positional: tuple[str, ...] = ()
    variadic: str | None = None
    types: dict[str, str] = field(default_factory=dict)
    defaults: dict[str, Any] = field(default_factory=dict)
    mutates: bool = True
    extra_kw: bool = False      # pass unknown key=value pairs through

    def bind(self, pos_args: list, kw_args: dict) -> dict:
        params = dict(self.defaults)
        names = list(self.positional)
        for value in pos_args:
            if names:
                params[names.pop(0)] = value
            elif self.variadic:
                params.setdefault(self.variadic, [])
                if not isinstance(params[self.variadic], list):
                    params[self.variadic] = list(params[self.variadic])
                params[self.variadic].append(value)
            else:
                raise ParseError(f"{self.name}: too many arguments")
        for key, value in kw_args.items():
            known = (key in self.types or key in self.positional
                     or key == self.variadic)
            if not known and not self.extra_kw:
                raise ParseError(f"{self.name}: unknown argument {key!r}")
            params[key] = value
        missing = [n for n in self.positional if n not in params]
        if missing:
            raise ParseError(f"{self.name}: missing argument {missing[0]!r}")
        for key in list(params):
            typ = self.types.get(key)
            if typ and params[key] is not None:
                params[key] = _COERCE[typ](params[key])
        return params


REGISTRY: dict[str, CommandDef] = {}


def command(name: str, positional=(), variadic=None, types=None, defaults=None,
            mutates=True, extra_kw=False):
    def wrap(func):
        REGISTRY[name] = CommandDef(
            name=name, func=func, positional=tuple(positional),
            variadic=variadic, types=dict(types or {}),
            defaults=dict(defaults or {}), mutates=mutates, extra_kw=extra_kw)
        return func
    return wrap


def invoke(session: Session, verb: str, pos_args: list, kw_args: dict):
    try:
        cmd = REGISTRY[verb]
    except KeyError:
        raise UnknownVerb(f"unknown verb {verb!r}") from None
    params = cmd.bind(pos_args, kw_args)
    with session.lock:
        result = cmd.func(session, **params)
        if cmd.mutates and verb not in ("delete_part", "replicate", "move_branch",
                                        "confirm", "cancel"):
            session.pending = None
    return result


def invoke_json(session: Session, verb: str, body: dict):
    """HTTP entry: JSON object body maps straight onto keyword arguments."""
    body = dict(body or {})
    pos = body.pop("_args", [])
    return invoke(session, verb, list(pos), body)


# ---------------------------------------------------------------------------
# verbs: scheme core and edit ops


@command("add_pipe", positional=("a", "b"), types={"a": "point", "b": "point"})
def _cmd_add_pipe(session, a, b):
    return {"id": session.scheme.add_pipe(a, b)}


@command("sketch_line", variadic="vertices",
         types={"vertices": "points", "snap": "float"}, defaults={"snap": 0.0})
def _cmd_sketch(session, vertices, snap):
    ids = editops.sketch_line(session.scheme, vertices, snap_radius=snap)
    return {"ids": ids}


@command("insert_elbow", positional=("pipe", "t_start", "t_end", "direction", "shift"),
         types={"pipe": "int", "t_start": "float", "t_end": "float",
                "direction": "axisdir", "shift": "float"})
def _cmd_elbow(session, pipe, t_start, t_end, direction, shift):
    return {"ids": editops.insert_elbow(session.scheme, pipe, t_start, t_end,
                                        direction, shift)}


@command("extend_pipe", positional=("pipe", "end", "to"),
         types={"pipe": "int", "end": "end", "to": "point"})
def _cmd_extend(session, pipe, end, to):
    return {"id": editops.extend_pipe(session.scheme, PipeEndRef(pipe, end), to)}


@command("move_point", positional=("pipe", "end", "to"),
         types={"pipe": "int", "end": "end", "to": "point", "scope": "str"},
         defaults={"scope": "all"})
def _cmd_move_point(session, pipe, end, to, scope):
    moved = editops.move_point(session.scheme, PipeEndRef(pipe, end), to, scope)
    return {"pipes": moved}


@command("connect_ends", positional=("pipe1", "end1", "pipe2", "end2"),
         types={"pipe1": "int", "end1": "end", "pipe2": "int", "end2": "end"})
def _cmd_connect(session, pipe1, end1, pipe2, end2):
    cid = editops.connect_ends(session.scheme, PipeEndRef(pipe1, end1),
                               PipeEndRef(pipe2, end2))
    return {"id": cid}


@command("disconnect_ends", positional=("connection",), types={"connection": "int"})
def _cmd_disconnect(session, connection):
    editops.disconnect_ends(session.scheme, connection)
    return {}


@command("cut_pipe", positional=("pipe", "t"), types={"pipe": "int", "t": "float"})
def _cmd_cut(session, pipe, t):
    return {"ids": list(editops.cut_pipe(session.scheme, pipe, t))}


@command("merge_pipes", positional=("pipe",),
         types={"pipe": "int", "side": "end"}, defaults={"side": None})
def _cmd_merge(session, pipe, side):
    return {"id": editops.merge_pipes(session.scheme, pipe, side)}


@command("delete_pipe", positional=("pipe",), types={"pipe": "int"})
def _cmd_delete_pipe(session, pipe):
    return {"deleted": sorted(editops.delete_pipe(session.scheme, pipe))}


@command("delete_part", variadic="ids", types={"ids": "ids"})
def _cmd_delete_part(session, ids):
    doomed = editops.plan_delete_part(session.scheme, set(ids))
    token = session.new_token()
    session.pending = {"token": token, "action": "delete_part",
                       "seed": set(ids), "preview": doomed}
    return {"preview": sorted(doomed), "token": token}


@command("move_part", positional=("shift",), variadic="pipes",
         types={"shift": "point", "pipes": "ids"})
def _cmd_move_part(session, shift, pipes):
    warnings = editops.move_part(session.scheme, set(pipes), shift)
    return {"warnings": warnings}


@command("move_branch", positional=("pipe", "shift"),
         types={"pipe": "int", "shift": "point"})
def _cmd_move_branch(session, pipe, shift):
    branch = editops.branch_of(session.scheme, pipe)
    if not session.scheme.connections_of_pipe(pipe):
        from .errors import NoConnections
        raise NoConnections(f"pipe {pipe} has no connections")
    token = session.new_token()
    session.pending = {"token": token, "action": "move_branch",
                       "pipe": pipe, "shift": shift, "preview": branch}
    return {"preview": sorted(branch), "token": token}


@command("replicate", positional=("shift", "count"), variadic="ids",
         types={"shift": "point", "count": "int", "ids": "ids"})
def _cmd_replicate(session, shift, count, ids):
    work = session.scheme.snapshot()
    maps = editops.replicate(work, set(ids), shift, count)
    new_ids = sorted(nid for m in maps for nid in m.values())
    token = session.new_token()
    session.pending = {"token": token, "action": "replicate",
                       "selection": set(ids), "shift": shift, "count": count,
                       "snapshot": work, "new_ids": new_ids}
    return {"preview": new_ids, "token": token}


@command("confirm", positional=("token",), types={"token": "str"})
def _cmd_confirm(session, token):
    pending = session.pending
    if pending is None or pending["token"] != token:
        raise StaleToken(f"no pending preview for token {token!r}")
    session.pending = None
    if pending["action"] == "delete_part":
        deleted = editops.delete_part(session.scheme, pending["seed"])
        return {"deleted": sorted(deleted)}
    if pending["action"] == "move_branch":
        moved = editops.move_branch(session.scheme, pending["pipe"], pending["shift"])
        return {"moved": sorted(moved)}
    if pending["action"] == "replicate":
        maps = editops.replicate(session.scheme, pending["selection"],
                                 pending["shift"], pending["count"])
        return {"copies": [{str(k): v for k, v in m.items()} for m in maps]}
    raise StaleToken(f"unknown pending action {pending['action']!r}")


@command("cancel", positional=("token",), types={"token": "str"})
def _cmd_cancel(session, token):
    if session.pending is None or session.pending["token"] != token:
        raise StaleToken(f"no pending preview for token {token!r}")
    session.pending = None
    return {}


@command("set_offset", positional=("kind", "pipe", "t", "sign", "shift"),
         types={"kind": "str", "pipe": "int", "t": "float", "sign": "int",
                "shift": "vec2", "scope": "int", "breaks": "breaks"},
         defaults={"scope": None, "breaks": ()})
def _cmd_set_offset(session, kind, pipe, t, sign, shift, scope, breaks):
    oid = editops.set_offset(session.scheme, kind, pipe, t, sign, shift,
                             broken=list(breaks), scope_pipe=scope)
    return {"id": oid}


@command("set_level", positional=("mark", "level"),
         types={"mark": "int", "level": "float"})
def _cmd_set_level(session, mark, level):
    return {"delta": editops.set_level(session.scheme, mark, level)}


@command("move_scheme", positional=("shift",), types={"shift": "vec2"})
def _cmd_move_scheme(session, shift):
    return {"placement": list(editops.move_scheme(session.scheme, shift))}


# ---------------------------------------------------------------------------
# verbs: blocks and library


@command("library", positional=("action", "value"),
         types={"action": "str", "value": "str"})
def _cmd_library(session, action, value):
    if action == "load":
        path = value
        if not os.path.exists(path):
            search = os.environ.get("AXON_LIBRARY_PATH", "")
            for root in search.split(os.pathsep):
                if root and os.path.exists(os.path.join(root, path)):
                    path = os.path.join(root, path)
                    break
        session.library = load_library(path)
        session.scheme.settings.library = session.library.name
        return {"name": session.library.name,
                "symbols": sorted(session.library.symbols)}
    if action == "use":
        lib = session.require_library()
        if lib.name != value:
            raise UnknownId(f"library {value!r} is not loaded")
        session.scheme.settings.library = value
        return {"name": value}
    raise ParseError(f"library action must be load or use, not {action!r}")


@command("place_block", positional=("symbol", "at"),
         types={"symbol": "str", "at": "point", "snap": "float",
                "orient": "int", "t": "float", "pipes": "ids"},
         defaults={"snap": 5.0, "orient": 0, "t": None, "pipes": ()})
def _cmd_place_block(session, symbol, at, snap, orient, t, pipes):
    bid = symbols.place_block(
        session.scheme, session.require_library(), symbol, at,
        snap_radius=snap, orientation=orient, extra_pipes=list(pipes),
        position_t=t)
    return {"id": bid}


@command("attach_pipe", positional=("block", "pipe"),
         types={"block": "int", "pipe": "int"})
def _cmd_attach_pipe(session, block, pipe):
    symbols.attach_pipe_to_block(session.scheme, session.require_library(),
                                 block, pipe)
    return {}


@command("replace_block", positional=("block", "symbol"),
         types={"block": "int", "symbol": "str"})
def _cmd_replace_block(session, block, symbol):
    bid = symbols.replace_block(session.scheme, session.require_library(),
                                block, symbol)
    return {"id": bid}


@command("variants_orientation", positional=("symbol",), variadic="pipes",
         types={"symbol": "str", "pipes": "ids"}, mutates=False)
def _cmd_variants_orientation(session, symbol, pipes):
    lib = session.require_library()
    axes = [session.scheme.pipe(p).direction() for p in pipes]
    variants = enumerate_orientations(lib.get(symbol), axes)
    return {"count": len(variants), "variants": [v.to_dict() for v in variants]}


# ---------------------------------------------------------------------------
# verbs: annotations and speccing


@command("add_dimension", positional=("axis", "side"), variadic="origins",
         types={"axis": "str", "side": "int", "origins": "origins",
                "offset": "float"},
         defaults={"offset": 10.0})
def _cmd_add_dimension(session, axis, side, origins, offset):
    did = annotate.add_chain_dimension(session.scheme, origins, axis, side, offset)
    return {"id": did}


@command("variants_dimension", variadic="origins", types={"origins": "origins"},
         mutates=False)
def _cmd_variants_dimension(session, origins):
    variants = annotate.enumerate_dimension_variants(session.scheme, origins)
    return {"variants": [[axis, side] for axis, side in variants]}


@command("add_text", positional=("text",), variadic="targets",
         types={"text": "str", "targets": "targets", "anchor": "vec2"},
         defaults={"anchor": None})
def _cmd_add_text(session, text, targets, anchor):
    from .projection import project
    leaders = []
    for lt in targets:
        a = anchor
        if a is None:
            a = project(lt.point(session.scheme), session.scheme.settings.projection)
            a = (a[0] + 8.0, a[1] + 8.0)
        leaders.append(Leader(anchor=a, pipe=lt.pipe, t=lt.t, block=lt.block))
    return {"id": annotate.add_leader_text(session.scheme, text, leaders)}


@command("change_leader_target", positional=("owner", "index", "target"),
         types={"owner": "int", "index": "int", "target": "target"})
def _cmd_change_leader_target(session, owner, index, target):
    annotate.change_leader_target(session.scheme, owner, index, target)
    return {}


@command("change_main_leader", positional=("owner", "index"),
         types={"owner": "int", "index": "int"})
def _cmd_change_main_leader(session, owner, index):
    annotate.change_main_leader(session.scheme, owner, index)
    return {}


@command("place_designator", positional=("kind", "target", "count"),
         types={"kind": "str", "target": "int", "count": "int",
                "numbers": "ids", "anchor": "vec2"},
         defaults={"numbers": None, "anchor": None})
def _cmd_place_designator(session, kind, target, count, numbers, anchor):
    gid = annotate.place_designator(session.scheme, kind, target, count,
                                    numbers=numbers, anchor=anchor)
    return {"id": gid, "positions": session.scheme.designators[gid].positions}


@command("place_flange_designator", positional=("kind", "target", "count"),
         types={"kind": "str", "target": "int", "count": "int",
                "numbers": "ids", "anchor": "vec2"},
         defaults={"numbers": None, "anchor": None})
def _cmd_place_flange(session, kind, target, count, numbers, anchor):
    gid = annotate.place_flange_designator(session.scheme, kind, target, count,
                                           numbers=numbers, anchor=anchor)
    return {"id": gid, "positions": session.scheme.designators[gid].positions}


@command("flange_kit", positional=("designator",), variadic="codes",
         types={"designator": "int", "codes": "strs"})
def _cmd_flange_kit(session, designator, codes):
    delta = annotate.flange_kit_wizard(session.scheme, designator, codes,
                                       session.catalogs)
    return {"rows": {str(p): r.to_dict() for p, r in delta.items()}}


@command("set_spec", positional=("kind", "element", "position"),
         types={"kind": "str", "element": "int", "position": "int"},
         extra_kw=True)
def _cmd_set_spec(session, kind, element, position, **fields):
    table = annotate.edit_spec_properties(session.scheme, kind, element)
    row = table.write(position, **fields)
    return {"row": row.to_dict(), "warnings": table.warnings}


@command("spec_rows", positional=("kind", "element"),
         types={"kind": "str", "element": "int"}, mutates=False)
def _cmd_spec_rows(session, kind, element):
    table = annotate.edit_spec_properties(session.scheme, kind, element)
    return {"rows": [r.to_dict() for r in table.rows()]}


@command("specified_part", mutates=False)
def _cmd_specified_part(session):
    specified, unassigned = annotate.specified_part(session.scheme)
    return {"specified": sorted(specified), "unassigned": sorted(unassigned)}


@command("pipe_lengths", variadic="ids", types={"ids": "ids"}, mutates=False)
def _cmd_pipe_lengths(session, ids):
    return {"total": annotate.pipe_length_total(session.scheme, ids)}


@command("place_height_mark", positional=("pipe", "t", "level"),
         types={"pipe": "int", "t": "float", "level": "float"})
def _cmd_place_height_mark(session, pipe, t, level):
    return {"id": annotate.place_height_mark(session.scheme, pipe, t, level)}


@command("import_grid", positional=("path",), types={"path": "str"})
def _cmd_import_grid(session, path):
    return {"id": annotate.import_construction_grid(session.scheme, path)}


@command("load_catalog", positional=("path",),
         types={"path": "str", "name": "str"}, defaults={"name": None})
def _cmd_load_catalog(session, path, name):
    cat = annotate.load_catalog(path, name)
    session.catalogs = [c for c in session.catalogs if c.name != cat.name]
    session.catalogs.append(cat)
    return {"name": cat.name, "rows": len(cat.rows)}


@command("export_spec", positional=("path",), types={"path": "str"},
         mutates=False)
def _cmd_export_spec(session, path):
    text = annotate.export_spec_csv(session.scheme)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return {"path": path, "rows": max(0, len(text.splitlines()) - 1)}


# ---------------------------------------------------------------------------
# verbs: settings, persistence, rendering


@command("set_projection", positional=("name",), types={"name": "str"})
def _cmd_set_projection(session, name):
    if name not in PRESETS:
        raise UnknownId(f"unknown projection {name!r} "
                        f"(have: {', '.join(sorted(PRESETS))})")
    session.scheme.settings.projection = PRESETS[name]
    return {"name": name}


@command("set_visibility", positional=("cls", "flag"),
         types={"cls": "str", "flag": "bool"})
def _cmd_set_visibility(session, cls, flag):
    from .model import OBJECT_CLASSES
    if cls not in OBJECT_CLASSES:
        raise UnknownId(f"unknown object class {cls!r}")
    session.scheme.settings.visibility[cls] = flag
    return {cls: flag}


@command("set_floor", positional=("label",), types={"label": "str"})
def _cmd_set_floor(session, label):
    session.scheme.settings.floor_label = label
    return {"label": label}


@command("set_numbering", positional=("mode",), types={"mode": "str"})
def _cmd_set_numbering(session, mode):
    if mode not in ("auto", "manual"):
        raise BadParameter(f"numbering mode is auto or manual, not {mode!r}")
    session.scheme.settings.numbering = mode
    return {"mode": mode}


@command("save", positional=("path",), types={"path": "str"}, mutates=False)
def _cmd_save(session, path):
    persist.save(session.scheme, path)
    return {"path": path}


@command("load", positional=("path",), types={"path": "str"})
def _cmd_load(session, path):
    session.scheme = persist.load(path)
    return {"path": path, "pipes": len(session.scheme.pipes)}


@command("render", positional=("path",),
         types={"path": "str", "projection": "str", "glyph": "bool"},
         defaults={"projection": None, "glyph": False}, mutates=False)
def _cmd_render(session, path, projection, glyph):
    data = render_svg_bytes(session, projection, glyph)
    with open(path, "wb") as fh:
        fh.write(data)
    return {"path": path, "bytes": len(data)}


def render_svg_bytes(session: Session, projection: str | None = None,
                     glyph: bool = False,
                     construction_ids: set[int] | None = None,
                     scheme: Scheme | None = None,
                     frame: Projection | None = None) -> bytes:
    """Single rendering path shared by the CLI verb and GET /render.svg."""
    settings = RenderSettings(projection_name=projection, projection=frame,
                              axes_glyph=glyph)
    drawable = render(scheme or session.scheme, settings,
                      library=session.library,
                      construction_ids=construction_ids)
    return emit_svg(drawable, settings)


@command("render_preview", positional=("token",),
         types={"token": "str", "projection": "str"},
         defaults={"projection": None}, mutates=False)
def _cmd_render_preview(session, token, projection):
    pending = session.pending
    if pending is None or pending["token"] != token:
        raise StaleToken(f"no pending preview for token {token!r}")
    if pending["action"] == "replicate":
        scheme, ids = pending["snapshot"], pending["new_ids"]
    else:
        scheme, ids = session.scheme, pending["preview"]
    data = render_svg_bytes(session, projection, False,
                            construction_ids=set(ids), scheme=scheme)
    return {"svg": data.decode("utf-8")}


@command("fly_around", positional=("step", "n"),
         types={"step": "float", "n": "int"}, mutates=False)
def _cmd_fly_around(session, step, n):
    frames = fly_around(session.scheme.settings.projection, step, n)
    return {"frames": [p.to_dict() for p in frames]}


@command("pick", positional=("x", "y"),
         types={"x": "float", "y": "float", "classes": "strs",
                "radius": "float"},
         defaults={"classes": ("pipe", "pipe_end", "block"), "radius": 3.0},
         mutates=False)
def _cmd_pick(session, x, y, classes, radius):
    hits = pick(session.scheme, (x, y), session.scheme.settings.projection,
                set(classes), radius)
    ops = {}
    for h in hits:
        key = f"{h.kind}:{h.id}"
        if key not in ops and h.kind != "pipe_end":
            ops[key] = editops.applicable_ops(session.scheme, h.kind, h.id)
    return {
        "candidates": [{"kind": h.kind, "id": h.id, "sub": h.sub,
                        "dist": round(h.dist, 6)} for h in hits],
        "ops": ops,
    }


@command("integrity", mutates=False)
def _cmd_integrity(session):
    problems = integrity_check(session.scheme)
    return {"violations": [{"code": v.code, "obj": v.obj, "detail": v.detail}
                           for v in problems]}


# ---------------------------------------------------------------------------
# script runner


def parse_line(line: str) -> tuple[str, list, dict] | None:
    """Split one script line into verb, positionals and key=value pairs."""
    lexer = shlex.shlex(line, posix=True)
    lexer.whitespace_split = True
    lexer.commenters = "#"
    tokens = list(lexer)
    if not tokens:
        return None
    verb, rest = tokens[0], tokens[1:]
    pos: list = []
    kw: dict = {}
    for tok in rest:
        if "=" in tok and not tok.startswith(("-", "+")) \
                and tok.split("=", 1)[0].replace("_", "").isalnum() \
                and not tok.split("=", 1)[0][0].isdigit():
            key, value = tok.split("=", 1)
            kw[key] = value
        else:
            pos.append(tok)
    return verb, pos, kw


def run_lines(session: Session, lines, source: str = "<script>") -> list[dict]:
    """Apply script lines in order, atomically per line. On error execution
    stops; the scheme keeps the state of the last successful command."""
    transcript: list[dict] = []
    for lineno, raw in enumerate(lines, start=1):
        parsed = None
        try:
            parsed = parse_line(raw)
        except ValueError as exc:
            raise ScriptError(lineno, ParseError(str(exc)), transcript) from exc
        if parsed is None:
            continue
        verb, pos, kw = parsed
        try:
            result = invoke(session, verb, pos, kw)
        except KernelError as exc:
            raise ScriptError(lineno, exc, transcript) from exc
        transcript.append({"line": lineno, "verb": verb, "result": result})
    return transcript


def run_script(session: Session, path: str) -> list[dict]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        from .errors import IoError
        raise IoError(f"cannot read script {path}: {exc}") from exc
    return run_lines(session, lines, source=path)
