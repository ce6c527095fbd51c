"""Place library symbols on pipes: orientation variants (what the spacebar
cycles through in the editor), axial valves with cut-outs, an angular elbow
block on a corner, and symbol replacement.

Run:  python3 demos/02_blocks_and_variants.py  (writes demo02.svg)
"""

from axonpipe import editops
from axonpipe.geometry import Point3
from axonpipe.model import PipeEndRef, Scheme
from axonpipe.render import render
from axonpipe.svg import emit_svg
from axonpipe.symbols import enumerate_orientations, place_block, replace_block

from demo_library import demo_library

lib = demo_library()
scheme = Scheme()

p1 = scheme.add_pipe(Point3(0, 0, 0), Point3(2000, 0, 0))
p2 = scheme.add_pipe(Point3(2000, 0, 0), Point3(2000, 0, 1200))
editops.connect_ends(scheme, PipeEndRef(p1, "b"), PipeEndRef(p2, "a"))

# How many poses can a symbol take on this pipe? A symmetric valve on an
# axis-aligned pipe has 2; stripping the symmetry flags gives 8.
valve = lib.get("gate_valve_100")
variants = enumerate_orientations(valve, [scheme.pipes[p1].direction()])
print(f"gate valve on +X pipe: {len(variants)} orientation variants")
for v in variants:
    print(f"  plane axis {'xyz'[v.ext_axis]}, rot {v.rot}, mirror {v.mir}")

# Axial placement mid-pipe: the declared 100 mm cut hides part of the pipe.
vid = place_block(scheme, lib, "gate_valve_100", Point3(600, 0, 0),
                  snap_radius=5.0, orientation=0)
print("valve cut interval:", scheme.blocks[vid].cut_intervals[p1])

# Angular elbow on the corner: both pipes bind and connect pairwise.
eid = place_block(scheme, lib, "elbow_90", Point3(2000, 0, 0),
                  snap_radius=5.0, extra_pipes=[p2])
print("elbow attachments:", scheme.blocks[eid].attachments)

# Swapping the valve for the small one recomputes its cut-out.
replace_block(scheme, lib, vid, "gate_valve_8")
print("after replace:", scheme.blocks[vid].cut_intervals[p1])

data = emit_svg(render(scheme, library=lib))
with open("demo02.svg", "wb") as fh:
    fh.write(data)
print(f"wrote demo02.svg ({len(data)} bytes)")
