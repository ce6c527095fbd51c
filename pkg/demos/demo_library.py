"""Shared demo symbol library: a gate valve (axial), a 90-degree elbow
(angular) and a tee, built the same way a user would define new conditional
graphic designations."""

from axonpipe.symbols import (
    AttachmentSpec,
    Library,
    Ray,
    SymbolDef,
    SymbolPrimitive,
    validate_symbol,
)


def gate_valve(cut_mm: float) -> SymbolDef:
    half = max(4.0, cut_mm / 2.0)
    return SymbolDef(
        name=f"gate_valve_{cut_mm:g}",
        primitives=[
            SymbolPrimitive(kind="filled_polyline",
                            points=[(-half, -3.0), (-half, 3.0), (0.0, 0.0)]),
            SymbolPrimitive(kind="filled_polyline",
                            points=[(half, -3.0), (half, 3.0), (0.0, 0.0)]),
        ],
        attachment=AttachmentSpec(kind="axial", cut=cut_mm),
        sym_axis=True, sym_normal=True,
    )


def elbow_90() -> SymbolDef:
    return SymbolDef(
        name="elbow_90",
        primitives=[SymbolPrimitive(
            kind="polyline", points=[(40.0, 0.0), (0.0, 0.0), (0.0, 40.0)])],
        attachment=AttachmentSpec(
            kind="angular",
            rays=[Ray(direction=(1.0, 0.0), length=40.0),
                  Ray(direction=(0.0, 1.0), length=40.0)]),
    )


def tee() -> SymbolDef:
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


def demo_library() -> Library:
    lib = Library(name="demo")
    for sym in (gate_valve(100.0), gate_valve(8.0), elbow_90(), tee()):
        problems = validate_symbol(sym)
        assert not problems, problems
        lib.symbols[sym.name] = sym
    return lib


if __name__ == "__main__":
    lib = demo_library()
    print(f"library {lib.name!r} with {len(lib.symbols)} symbols:")
    for name, sym in lib.symbols.items():
        print(f"  {name}: {sym.attachment.kind}, "
              f"{len(sym.primitives)} primitives")
