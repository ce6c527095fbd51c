"""The command-script language and the preview/confirm protocol, as the HTTP
service and CLI use them. Deleting a part first shows the closure of what
must go; the caller then confirms or cancels.

Run:  python3 demos/05_scripts_and_service.py
"""

from axonpipe.model import integrity_check
from axonpipe.script import Session, invoke, run_lines

SCRIPT = """
# two connected pipes and a mark -- one operation per line
add_pipe 0,0,0 1500,0,0
add_pipe 1500,0,0 1500,0,900      # riser
connect_ends 1 b 2 a
place_height_mark 1 0.5 0.0
set_projection isometric
"""

session = Session()
for entry in run_lines(session, SCRIPT.splitlines()):
    print(f"{entry['line']:3d} {entry['verb']:18s} -> {entry['result']}")

# Deleting pipe 1 must also take its connection and height mark: the preview
# is the reference closure of the seed.
preview = invoke(session, "delete_part", ["1"], {})
print("delete would remove:", preview["preview"])
invoke(session, "cancel", [preview["token"]], {})
print("cancelled; pipes still:", sorted(session.scheme.pipes))

preview = invoke(session, "delete_part", ["1"], {})
result = invoke(session, "confirm", [preview["token"]], {})
print("confirmed; deleted:", result["deleted"])
print("violations:", integrity_check(session.scheme))

# The HTTP service exposes exactly the same verbs:
#   axon serve --port 8787
#   POST /op/add_pipe {"a": [0,0,0], "b": [1500,0,0]}
#   GET  /render.svg?projection=isometric
#   GET  /pick?x=...&y=...&classes=pipe,pipe_end
