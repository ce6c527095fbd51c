"""Drawing-clarity offsets with break lines, level re-declaration, and the
fly-around view sequence.

Run:  python3 demos/04_offsets_levels_flyaround.py  (writes demo04_*.svg)
"""

from axonpipe import annotate, editops
from axonpipe.geometry import Point3
from axonpipe.model import Scheme
from axonpipe.projection import fly_around
from axonpipe.render import render
from axonpipe.svg import emit_svg

scheme = Scheme()
run = editops.sketch_line(scheme, [
    Point3(0, 0, 0), Point3(4000, 0, 0), Point3(4000, 2500, 0)])
riser = scheme.add_pipe(Point3(2000, 0, 0), Point3(2000, 0, 1600))
editops.cut_pipe(scheme, run[0], 0.5)        # joins the riser's foot point

# A long run reads better when the far half is pulled aside on paper.
# Model coordinates never change; only the projected images shift.
editops.set_offset(scheme, "global", riser, 0.1, 1, (35.0, 0.0))
mark = annotate.place_height_mark(scheme, riser, 1.0, 1.6)

before = scheme.pipes[riser].b.z
editops.set_level(scheme, mark, 2.0)         # whole model rises 400 mm
print(f"riser top z: {before} -> {scheme.pipes[riser].b.z}")

data = emit_svg(render(scheme))
with open("demo04_offset.svg", "wb") as fh:
    fh.write(data)
print(f"wrote demo04_offset.svg ({len(data)} bytes)")

# Fly-around: step the view 45 degrees at a time, a full turn comes home.
frames = fly_around(scheme.settings.projection, 45.0, 8)
for k, proj in enumerate(frames[:3]):
    scheme.settings.projection = proj
    name = f"demo04_turn{k}.svg"
    with open(name, "wb") as fh:
        fh.write(emit_svg(render(scheme)))
    print("wrote", name)
