import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from axonpipe import editops, annotate
from axonpipe.geometry import Point3
from axonpipe.model import PipeEndRef, Scheme
from axonpipe.symbols import (
    AttachmentSpec,
    Library,
    Ray,
    SymbolDef,
    SymbolPrimitive,
    place_block,
)


def gate_valve_symbol(cut: float = 8.0) -> SymbolDef:
    """Bowtie gate valve: two filled triangles, axial, symmetric both ways."""
    half = max(4.0, cut / 2.0)
    return SymbolDef(
        name=f"gate_valve_{cut:g}",
        primitives=[
            SymbolPrimitive(kind="filled_polyline",
                            points=[(-half, -3.0), (-half, 3.0), (0.0, 0.0)]),
            SymbolPrimitive(kind="filled_polyline",
                            points=[(half, -3.0), (half, 3.0), (0.0, 0.0)]),
        ],
        attachment=AttachmentSpec(kind="axial", cut=cut),
        sym_axis=True, sym_normal=True,
    )


def elbow_symbol() -> SymbolDef:
    return SymbolDef(
        name="elbow_90",
        primitives=[SymbolPrimitive(kind="polyline",
                                    points=[(40.0, 0.0), (0.0, 0.0), (0.0, 40.0)])],
        attachment=AttachmentSpec(
            kind="angular",
            rays=[Ray(direction=(1.0, 0.0), length=40.0),
                  Ray(direction=(0.0, 1.0), length=40.0)]),
    )


def tee_symbol() -> SymbolDef:
    return SymbolDef(
        name="tee",
        primitives=[
            SymbolPrimitive(kind="segment", points=[(-40.0, 0.0), (40.0, 0.0)]),
            SymbolPrimitive(kind="segment", points=[(0.0, 0.0), (0.0, 40.0)]),
        ],
        attachment=AttachmentSpec(
            kind="tee",
            rays=[Ray(direction=(1.0, 0.0), length=40.0),
                  Ray(direction=(-1.0, 0.0), length=40.0),
                  Ray(direction=(0.0, 1.0), length=40.0)]),
    )


@pytest.fixture
def library() -> Library:
    lib = Library(name="fixtures")
    for sym in (gate_valve_symbol(8.0), gate_valve_symbol(100.0),
                elbow_symbol(), tee_symbol()):
        lib.symbols[sym.name] = sym
    return lib


@pytest.fixture
def f1(library):
    """Reference fixture: P1-P2 connected at (1000,0,0), a 100 mm gate valve
    V on the middle of P1, a height mark H on P1."""
    s = Scheme()
    p1 = s.add_pipe(Point3(0, 0, 0), Point3(1000, 0, 0))
    p2 = s.add_pipe(Point3(1000, 0, 0), Point3(1000, 0, 1000))
    c12 = editops.connect_ends(s, PipeEndRef(p1, "b"), PipeEndRef(p2, "a"))
    v = place_block(s, library, "gate_valve_100", Point3(500, 0, 0),
                    snap_radius=5.0)
    h = annotate.place_height_mark(s, p1, 0.25, 0.0)
    return s, {"p1": p1, "p2": p2, "c12": c12, "v": v, "h": h}


CATALOG_CSV = """\
code,name,dn,pn,unit,mass
F-100,Flange welded,100,16,pcs,3.2
S-M16,Stud M16x80,100,16,pcs,0.12
N-M16,Nut M16,100,16,pcs,0.03
W-16,Washer 16,100,16,pcs,0.01
G-100,Gasket 100,100,16,pcs,0.05
P-108,Pipe 108x4,100,16,m,10.26
V-100,Valve gate DN100,100,16,pcs,18.5
"""


@pytest.fixture
def catalog(tmp_path):
    path = tmp_path / "parts.csv"
    path.write_text(CATALOG_CSV, encoding="utf-8")
    return annotate.load_catalog(str(path))
