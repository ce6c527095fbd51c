"""Sketch a pipeline run, cut in a thermal-compensation elbow, and render the
axonometric drawing to SVG.

Run:  python3 demos/01_sketch_and_render.py  (writes demo01.svg)
"""

from axonpipe import editops
from axonpipe.geometry import AxisDir, Point3
from axonpipe.model import Scheme, integrity_check
from axonpipe.render import RenderSettings, render
from axonpipe.svg import emit_svg

scheme = Scheme()

# Freehand vertices; each one after the first snaps to existing points and
# orthogonalizes onto the dominant model axis, so the run stays axis-aligned.
pipe_ids = editops.sketch_line(scheme, [
    Point3(0, 0, 0),
    Point3(2990, 12, 0),        # becomes (2990, 0, 0)
    Point3(2987, 2005, -8),     # becomes (2990, 2005, 0)
    Point3(2992, 2001, 1500),   # becomes (2990, 2005, 1500)
])
print("sketched pipes:", pipe_ids)
print("connections:", sorted(scheme.connections))

# A U-shaped elbow in the first pipe, detouring 300 mm along +Y.
elbow_ids = editops.insert_elbow(scheme, pipe_ids[0], 0.35, 0.55,
                                 AxisDir.PY, 300.0)
print("elbow pieces:", elbow_ids)

# The free end of the last pipe can still be stretched along its axis.
last = elbow_ids[-1] if pipe_ids[-1] in elbow_ids else pipe_ids[-1]
print("violations:", integrity_check(scheme))

data = emit_svg(render(scheme, RenderSettings(axes_glyph=True)))
with open("demo01.svg", "wb") as fh:
    fh.write(data)
print(f"wrote demo01.svg ({len(data)} bytes)")
