"""Dimensions, leaders and texts, height marks, position designators, the
flange-kit wizard, specifying properties, catalogs and pipe-length totals."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

from .errors import (
    AlreadyMain,
    DesignatorExists,
    DuplicateCode,
    DuplicateNumber,
    NoDesignator,
    OnlyOneLeader,
    ParseError,
    TooFewOrigins,
    UnknownCatalogCode,
    UnknownId,
    VariantNotAdmissible,
    WrongPositionCount,
)
from .geometry import EPS, AXIS_NAMES, Vec2, v2_add
from .model import (
    FLANGE_SLOT_ROLES,
    ChainDimension,
    ConstructionGrid,
    DimOrigin,
    HeightMark,
    Leader,
    PositionDesignator,
    Scheme,
    SpecRow,
    TextAnnotation,
)
from .projection import project

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# chain dimensions


def enumerate_dimension_variants(scheme: Scheme,
                                 origins: list[DimOrigin]) -> list[tuple[str, int]]:
    """Admissible (axis, side) pairs for a set of extension-line origins.

    An axis qualifies when the origins do not all share one coordinate on it;
    order is X, Y, Z, each with side +1 then -1."""
    if len(origins) < 2:
        raise TooFewOrigins(f"{len(origins)} origins, need at least 2")
    pts = [o.point(scheme) for o in origins]
    out: list[tuple[str, int]] = []
    for axis in range(3):
        coords = [p.component(axis) for p in pts]
        if max(coords) - min(coords) > EPS:
            out.append((AXIS_NAMES[axis], 1))
            out.append((AXIS_NAMES[axis], -1))
    return out


def add_chain_dimension(scheme: Scheme, origins: list[DimOrigin], axis: str,
                        side: int, offset: float = 10.0) -> int:
    """Store a chain dimension; values are the deltas between consecutive
    distinct origin coordinates along the measurement axis."""
    variants = enumerate_dimension_variants(scheme, origins)
    if (axis, side) not in variants:
        raise VariantNotAdmissible(f"({axis},{side:+d}) not in {variants}")
    did = scheme.new_id()
    scheme.dimensions[did] = ChainDimension(
        id=did, origins=list(origins), axis=AXIS_NAMES.index(axis),
        side=side, offset=offset)
    return did


# ---------------------------------------------------------------------------
# leader texts


def add_leader_text(scheme: Scheme, text: str, leaders: list[Leader]) -> int:
    """Store a text annotation with one or more leaders; leader 0 is main."""
    if not leaders:
        raise TooFewOrigins("a text needs at least one leader")
    for l in leaders:
        _check_leader_target(scheme, l)
    tid = scheme.new_id()
    scheme.texts[tid] = TextAnnotation(id=tid, text=text,
                                       leaders=list(leaders), main_leader=0)
    return tid


def _check_leader_target(scheme: Scheme, leader: Leader) -> None:
    if leader.targets_pipe():
        scheme.pipe(leader.pipe)
        if not (0.0 <= leader.t <= 1.0):
            raise UnknownId(f"leader parameter {leader.t:g} outside [0,1]")
    else:
        scheme.block(leader.block)


def _leaders_owner(scheme: Scheme, oid: int):
    obj = scheme.texts.get(oid) or scheme.designators.get(oid)
    if obj is None:
        raise UnknownId(f"no text or designator with id {oid}")
    return obj


def change_leader_target(scheme: Scheme, owner_id: int, leader_idx: int,
                         new_target: Leader) -> None:
    """Re-point one leader of a text or designator."""
    obj = _leaders_owner(scheme, owner_id)
    if not (0 <= leader_idx < len(obj.leaders)):
        raise UnknownId(f"leader index {leader_idx} out of range")
    _check_leader_target(scheme, new_target)
    old = obj.leaders[leader_idx]
    obj.leaders[leader_idx] = Leader(
        anchor=old.anchor, pipe=new_target.pipe, t=new_target.t,
        block=new_target.block)


def change_main_leader(scheme: Scheme, owner_id: int, leader_idx: int) -> None:
    """Promote a non-main leader to main (the one carrying the shelf)."""
    obj = _leaders_owner(scheme, owner_id)
    if len(obj.leaders) <= 1:
        raise OnlyOneLeader(f"object {owner_id} has a single leader")
    if not (0 <= leader_idx < len(obj.leaders)):
        raise UnknownId(f"leader index {leader_idx} out of range")
    if leader_idx == obj.main_leader:
        raise AlreadyMain(f"leader {leader_idx} is already main")
    obj.main_leader = leader_idx


# ---------------------------------------------------------------------------
# position designators


def place_designator(scheme: Scheme, target_kind: str, target_id: int,
                     count: int, numbers: list[int] | None = None,
                     anchor: Vec2 | None = None) -> int:
    """Put a position balloon with ``count`` numbers on a pipe or block.

    Automatic numbering continues after the highest occupied number; manual
    numbers must not repeat within the balloon."""
    if not (1 <= count <= 5):
        raise WrongPositionCount(f"{count} positions (1..5 allowed)")
    if target_kind == "pipe":
        target = scheme.pipe(target_id)
    elif target_kind == "block":
        target = scheme.block(target_id)
    else:
        raise UnknownId(f"designators target pipes or blocks, not {target_kind!r}")
    if target.designator is not None:
        raise DesignatorExists(
            f"{target_kind} {target_id} already carries designator {target.designator}")
    if numbers is None and scheme.settings.numbering == "manual":
        raise DuplicateNumber("manual numbering mode: position numbers required")
    if numbers is not None:
        if len(numbers) != count:
            raise WrongPositionCount(f"{len(numbers)} numbers for {count} slots")
        if len(set(numbers)) != len(numbers):
            raise DuplicateNumber(f"repeated number in {numbers}")
        if any(n <= 0 for n in numbers):
            raise DuplicateNumber("position numbers must be positive")
        positions = list(numbers)
    else:
        start = max(scheme.used_position_numbers(), default=0) + 1
        positions = list(range(start, start + count))
    if anchor is None:
        if target_kind == "pipe":
            pt = target.point_at(0.5)
        else:
            pt = target.position
        anchor = v2_add(project(pt, scheme.settings.projection), (10.0, 10.0))
    leader = Leader(anchor=anchor, pipe=target_id if target_kind == "pipe" else None,
                    t=0.5 if target_kind == "pipe" else None,
                    block=target_id if target_kind == "block" else None)
    gid = scheme.new_id()
    scheme.designators[gid] = PositionDesignator(
        id=gid, positions=positions, leaders=[leader], main_leader=0,
        target_pipe=target_id if target_kind == "pipe" else None,
        target_block=target_id if target_kind == "block" else None)
    target.designator = gid
    return gid


def place_flange_designator(scheme: Scheme, target_kind: str, target_id: int,
                            count: int, numbers: list[int] | None = None,
                            anchor: Vec2 | None = None) -> int:
    """Group designator for a flange joint: 4 or 5 positions whose slots mean
    block, studs, nuts, washers and (optionally) gaskets."""
    if count not in (4, 5):
        raise WrongPositionCount(f"a flange designator has 4 or 5 positions, not {count}")
    return place_designator(scheme, target_kind, target_id, count, numbers, anchor)


# ---------------------------------------------------------------------------
# catalogs and the flange-kit wizard


CATALOG_COLUMNS = ("code", "name", "dn", "pn", "unit", "mass")


@dataclass
class CatalogRow:
    code: str
    name: str
    dn: float
    pn: float
    unit: str
    mass: float


@dataclass
class Catalog:
    """Industrial parts catalog backing the speccing wizard."""

    name: str
    rows: dict[str, CatalogRow] = field(default_factory=dict)

    def get(self, code: str) -> CatalogRow:
        try:
            return self.rows[code]
        except KeyError:
            raise UnknownCatalogCode(
                f"code {code!r} not in catalog {self.name!r}") from None


def load_catalog(path: str, name: str | None = None) -> Catalog:
    """Read a catalog CSV with header code,name,dn,pn,unit,mass."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read catalog {path}: {exc}") from exc
    return parse_catalog(text, name or _stem(path))


def _stem(path: str) -> str:
    import os
    return os.path.splitext(os.path.basename(path))[0]


def parse_catalog(text: str, name: str) -> Catalog:
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    for col in CATALOG_COLUMNS:
        if col not in header:
            raise ParseError(f"catalog is missing column {col!r}")
    cat = Catalog(name=name)
    for lineno, rec in enumerate(reader, start=2):
        try:
            row = CatalogRow(
                code=rec["code"].strip(), name=rec["name"].strip(),
                dn=float(rec["dn"]), pn=float(rec["pn"]),
                unit=rec["unit"].strip(), mass=float(rec["mass"]))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad catalog value: {exc}", line=lineno) from exc
        if not row.code:
            raise ParseError("empty code", line=lineno)
        if row.code in cat.rows:
            raise DuplicateCode(f"code {row.code!r} appears twice (line {lineno})")
        cat.rows[row.code] = row
    if not cat.rows:
        raise ParseError("catalog has no rows")
    return cat


def flange_kit_wizard(scheme: Scheme, designator_id: int, codes: list[str],
                      catalogs: list[Catalog]) -> dict[int, SpecRow]:
    """Assign catalog-backed property rows to every slot of a 4/5-position
    designator at once. All slots commit atomically."""
    try:
        desig = scheme.designators[designator_id]
    except KeyError:
        raise UnknownId(f"no designator with id {designator_id}") from None
    if len(desig.positions) not in (4, 5):
        raise WrongPositionCount(
            f"flange kit needs 4 or 5 positions, designator has {len(desig.positions)}")
    if len(codes) != len(desig.positions):
        raise WrongPositionCount(
            f"{len(codes)} codes for {len(desig.positions)} positions")

    def resolve(code: str) -> tuple[CatalogRow, str]:
        for cat in catalogs:
            if code in cat.rows:
                return cat.rows[code], cat.name
        raise UnknownCatalogCode(f"code {code!r} not found in any loaded catalog")

    resolved = [resolve(c) for c in codes]
    delta: dict[int, SpecRow] = {}
    for slot, (position, (row, cat_name)) in enumerate(zip(desig.positions, resolved)):
        role = FLANGE_SLOT_ROLES[slot]
        spec = SpecRow(
            position=position, name=row.name,
            type_brand=f"DN{row.dn:g} PN{row.pn:g}", code=row.code,
            unit=row.unit, catalog_ref=cat_name, extra={"role": role})
        delta[position] = spec
    scheme.spec_rows.update({p: r for p, r in delta.items()})
    return delta


# ---------------------------------------------------------------------------
# specifying properties


class SpecTable:
    """Editable view of the property rows behind one element's positions.

    Writing back ignores the quantity field: quantities are derived from the
    scheme (summed pipe lengths or instance counts per position)."""

    def __init__(self, scheme: Scheme, element_kind: str, element_id: int):
        self.scheme = scheme
        if element_kind == "pipe":
            element = scheme.pipe(element_id)
        elif element_kind == "block":
            element = scheme.block(element_id)
        else:
            raise UnknownId(f"spec properties live on pipes or blocks")
        if element.designator is None:
            raise NoDesignator(f"{element_kind} {element_id} has no designator")
        self.designator = scheme.designators[element.designator]
        self.warnings: list[str] = []

    @property
    def positions(self) -> list[int]:
        return list(self.designator.positions)

    def rows(self) -> list[SpecRow]:
        return [self.scheme.spec_rows.get(p) or SpecRow(position=p)
                for p in self.positions]

    def write(self, position: int, **fields) -> SpecRow:
        if position not in self.designator.positions:
            raise UnknownId(f"position {position} not on this designator")
        row = self.scheme.spec_rows.setdefault(position, SpecRow(position=position))
        for key, value in fields.items():
            if key == "quantity":
                msg = "quantity is derived and was ignored"
                self.warnings.append(msg)
                log.warning("spec edit at position %d: %s", position, msg)
                continue
            if key in SpecRow.EDITABLE_FIELDS:
                setattr(row, key, value)
            else:
                row.extra[key] = value
        return row

    def elements_sharing(self, position: int) -> list[tuple[str, int]]:
        """Every element whose designator carries the given position number."""
        return elements_with_position(self.scheme, position)


def edit_spec_properties(scheme: Scheme, element_kind: str,
                         element_id: int) -> SpecTable:
    """Table handle over the element's specifying properties."""
    return SpecTable(scheme, element_kind, element_id)


def elements_with_position(scheme: Scheme, position: int) -> list[tuple[str, int]]:
    out = []
    for gid in sorted(scheme.designators):
        desig = scheme.designators[gid]
        if position in desig.positions:
            kind = "pipe" if desig.target_pipe is not None else "block"
            out.append((kind, desig.target_id()))
    return out


def specified_part(scheme: Scheme) -> tuple[set[int], set[int]]:
    """(specified, unassigned) element ids.

    Specified elements carry a designator; the unassigned subset has some
    position with nothing filled in besides position and quantity."""
    specified: set[int] = set()
    unassigned: set[int] = set()
    for desig in scheme.designators.values():
        eid = desig.target_id()
        if eid is None or not scheme.alive(eid):
            continue
        specified.add(eid)
        for p in desig.positions:
            row = scheme.spec_rows.get(p)
            if row is None or not row.assigned_fields():
                unassigned.add(eid)
                break
    return specified, unassigned


def quantity_for_position(scheme: Scheme, position: int) -> float:
    """Derived quantity: summed pipe length in meters, or instance count."""
    total_mm = 0.0
    count = 0
    for desig in scheme.designators.values():
        if position not in desig.positions:
            continue
        if desig.target_pipe is not None and desig.target_pipe in scheme.pipes:
            total_mm += scheme.pipes[desig.target_pipe].length()
        else:
            count += 1
    if total_mm > 0.0:
        return round(total_mm / 1000.0, 3)
    return float(count)


SPEC_EXPORT_COLUMNS = ("position", "name", "typeBrand", "code", "unit", "quantity")


def export_spec_csv(scheme: Scheme) -> str:
    """Specification data table for every position in use, as CSV text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SPEC_EXPORT_COLUMNS)
    for position in sorted(scheme.used_position_numbers()):
        row = scheme.spec_rows.get(position) or SpecRow(position=position)
        writer.writerow([
            position, row.name, row.type_brand, row.code, row.unit,
            f"{quantity_for_position(scheme, position):g}",
        ])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# height marks, lengths, construction grid


def place_height_mark(scheme: Scheme, pipe_id: int, t: float,
                      level: float) -> int:
    """Elevation mark on a pipe point, level in meters."""
    scheme.pipe(pipe_id)
    if not (0.0 <= t <= 1.0):
        raise UnknownId(f"parameter {t:g} outside [0,1]")
    hid = scheme.new_id()
    scheme.height_marks[hid] = HeightMark(id=hid, pipe=pipe_id, t=t, level=level)
    return hid


def pipe_length_total(scheme: Scheme, pipe_ids) -> float:
    """Total centerline length of a pipe set, mm."""
    total = 0.0
    for pid in pipe_ids:
        total += scheme.pipe(pid).length()
    return total


class LengthTally:
    """Streamed pipe-length total: each added pipe returns the running sum."""

    def __init__(self, scheme: Scheme):
        self.scheme = scheme
        self.pipes: set[int] = set()
        self.total = 0.0

    def add(self, pipe_id: int) -> float:
        if pipe_id not in self.pipes:
            self.total += self.scheme.pipe(pipe_id).length()
            self.pipes.add(pipe_id)
        return self.total


def parse_grid(text: str) -> tuple[list[tuple[str, float]], list[tuple[str, float]]]:
    """Parse `label<TAB>offset-mm` lines into (letter, number) axis families."""
    letters: list[tuple[str, float]] = []
    numbers: list[tuple[str, float]] = []
    seen: set[str] = set()
    any_line = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        any_line = True
        parts = line.split("\t")
        if len(parts) != 2:
            parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'label<TAB>offset', got {raw!r}", line=lineno)
        label, offset_text = parts[0].strip(), parts[1].strip()
        try:
            offset = float(offset_text)
        except ValueError:
            raise ParseError(f"bad offset {offset_text!r}", line=lineno) from None
        if label in seen:
            raise ParseError(f"duplicate axis label {label!r}", line=lineno)
        seen.add(label)
        if label.isdigit():
            numbers.append((label, offset))
        else:
            letters.append((label, offset))
    if not any_line:
        raise ParseError("grid file has no axes")
    letters.sort(key=lambda x: x[1])
    numbers.sort(key=lambda x: x[1])
    return letters, numbers


def import_construction_grid(scheme: Scheme, path: str) -> int:
    """Read a building-axes file into the scheme."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read grid file {path}: {exc}") from exc
    letters, numbers = parse_grid(text)
    gid = scheme.new_id()
    scheme.grids[gid] = ConstructionGrid(id=gid, letter_axes=letters,
                                         number_axes=numbers)
    return gid
