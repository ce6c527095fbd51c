"""Chain dimensions, position designators, the flange-kit wizard and the
specification table: from geometry to a bill-of-materials CSV.

Run:  python3 demos/03_dimensions_and_bom.py
"""

from axonpipe import annotate, editops
from axonpipe.geometry import Point3
from axonpipe.model import PipeEndRef, Scheme
from axonpipe.symbols import place_block

from demo_library import demo_library

CATALOG = """\
code,name,dn,pn,unit,mass
V-100,Valve gate DN100,100,16,pcs,18.5
S-M16,Stud M16x80,100,16,pcs,0.12
N-M16,Nut M16,100,16,pcs,0.03
W-16,Washer 16,100,16,pcs,0.01
G-100,Gasket 100,100,16,pcs,0.05
P-108,Pipe 108x4,100,16,m,10.26
"""

lib = demo_library()
scheme = Scheme()
p1 = scheme.add_pipe(Point3(0, 0, 0), Point3(3000, 0, 0))
p2 = scheme.add_pipe(Point3(3000, 0, 0), Point3(3000, 0, 1800))
editops.connect_ends(scheme, PipeEndRef(p1, "b"), PipeEndRef(p2, "a"))
valve = place_block(scheme, lib, "gate_valve_100", Point3(1200, 0, 0),
                    snap_radius=5.0)

# Chain dimension along X between the run's ends and the corner.
origins = [PipeEndRef(p1, "a"), PipeEndRef(p1, "b")]
print("admissible dimension variants:",
      annotate.enumerate_dimension_variants(scheme, origins))
did = annotate.add_chain_dimension(scheme, origins, "x", -1, offset=15.0)
print("dimension values:", scheme.dimensions[did].values(scheme))

# Position numbers: pipes first, then a 5-slot flange designator on the
# valve, numbered automatically after the highest used number.
annotate.place_designator(scheme, "pipe", p1, 1, numbers=[1])
annotate.place_designator(scheme, "pipe", p2, 1, numbers=[1])   # same part
gid = annotate.place_flange_designator(scheme, "block", valve, 5)
print("flange positions:", scheme.designators[gid].positions)

# The wizard fills all five slots from the catalog in one pass:
# block, studs, nuts, washers, gaskets.
catalog = annotate.parse_catalog(CATALOG, "demo")
annotate.flange_kit_wizard(scheme, gid,
                           ["V-100", "S-M16", "N-M16", "W-16", "G-100"],
                           [catalog])
table = annotate.edit_spec_properties(scheme, "pipe", p1)
table.write(1, name="Pipe 108x4", code="P-108", unit="m")

specified, unassigned = annotate.specified_part(scheme)
print("specified elements:", sorted(specified), "unassigned:", sorted(unassigned))
print("total pipe length, mm:", annotate.pipe_length_total(scheme, {p1, p2}))

print("\nspecification table:")
print(annotate.export_spec_csv(scheme))
