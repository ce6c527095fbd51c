"""JSON-over-HTTP service consumed by the browser editor.

Every kernel operation is POST /op/<verb>; previews confirm through
POST /confirm/<token>. Reads are served from the same kernel code path as
the script runner, so results match script execution exactly.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from . import annotate, editops, persist
from .errors import KernelError, PortInUse, StaleToken
from .model import pick
from .projection import PRESETS
from .script import Session, invoke, invoke_json, render_svg_bytes
from .symbols import enumerate_orientations


def create_app(session: Session) -> FastAPI:
    app = FastAPI(title="axonpipe", docs_url=None, redoc_url=None)

    @app.exception_handler(KernelError)
    async def _kernel_error(request: Request, exc: KernelError):
        return JSONResponse(status_code=exc.http_status,
                            content={"error": exc.code, "detail": str(exc)})

    @app.get("/scheme")
    def get_scheme():
        with session.lock:
            return persist.scheme_to_dict(session.scheme)

    @app.post("/op/{verb}")
    async def post_op(verb: str, request: Request):
        body = await request.json() if await _has_body(request) else {}
        return invoke_json(session, verb, body)

    @app.post("/confirm/{token}")
    def post_confirm(token: str):
        return invoke(session, "confirm", [token], {})

    @app.post("/cancel/{token}")
    def post_cancel(token: str):
        return invoke(session, "cancel", [token], {})

    @app.get("/render.svg")
    def get_render(projection: str | None = None, glyph: bool = False,
                   token: str | None = None, ex: str | None = None,
                   ey: str | None = None, ez: str | None = None):
        # ex/ey/ez ("x,y" pairs) pose an explicit view frame, e.g. one of the
        # fly-around frames, which need not be a stored preset
        frame = None
        if ex and ey and ez:
            from .projection import _view_frame
            def pair(text):
                a, b = text.split(",")
                return (float(a), float(b))
            frame = _view_frame(pair(ex), pair(ey), pair(ez), "view")
        with session.lock:
            if token is not None:
                pending = session.pending
                if pending is None or pending["token"] != token:
                    raise StaleToken(f"no pending preview for token {token!r}")
                if pending["action"] == "replicate":
                    scheme, ids = pending["snapshot"], pending["new_ids"]
                else:
                    scheme, ids = session.scheme, pending["preview"]
                data = render_svg_bytes(session, projection, glyph,
                                        construction_ids=set(ids),
                                        scheme=scheme, frame=frame)
            else:
                data = render_svg_bytes(session, projection, glyph, frame=frame)
        return Response(content=data, media_type="image/svg+xml")

    @app.get("/pick")
    def get_pick(x: float, y: float, classes: str = "pipe,pipe_end,block",
                 radius: float = 3.0):
        with session.lock:
            wanted = set(filter(None, classes.split(",")))
            hits = pick(session.scheme, (x, y),
                        session.scheme.settings.projection, wanted, radius)
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

    @app.get("/variants/orientation")
    def get_variants_orientation(symbol: str, pipes: str):
        with session.lock:
            lib = session.require_library()
            axes = [session.scheme.pipe(int(p)).direction()
                    for p in pipes.split(",") if p]
            variants = enumerate_orientations(lib.get(symbol), axes)
            return {"count": len(variants),
                    "variants": [v.to_dict() for v in variants]}

    @app.get("/variants/dimension")
    def get_variants_dimension(origins: str):
        from .script import _as_origins
        with session.lock:
            parsed = _as_origins(origins)
            variants = annotate.enumerate_dimension_variants(session.scheme, parsed)
            return {"variants": [[axis, side] for axis, side in variants]}

    @app.get("/library")
    def get_library():
        with session.lock:
            if session.library is None:
                return {"name": None, "symbols": {}}
            return session.library.to_dict()

    @app.get("/catalogs")
    def get_catalogs():
        with session.lock:
            return {
                "catalogs": [
                    {"name": c.name,
                     "rows": [vars(r) for r in c.rows.values()]}
                    for c in session.catalogs
                ]
            }

    @app.get("/projections")
    def get_projections():
        return {"presets": sorted(PRESETS),
                "current": session.scheme.settings.projection.name}

    @app.get("/applicable/{kind}/{oid}")
    def get_applicable(kind: str, oid: int):
        with session.lock:
            return {"ops": editops.applicable_ops(session.scheme, kind, oid)}

    return app


async def _has_body(request: Request) -> bool:
    body = await request.body()
    return bool(body)


def serve(session: Session, port: int = 8787, host: str = "127.0.0.1") -> None:
    """Run the service until interrupted."""
    import uvicorn

    app = create_app(session)
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        if getattr(exc, "errno", None) in (48, 98):
            raise PortInUse(f"port {port} is already in use") from exc
        raise
