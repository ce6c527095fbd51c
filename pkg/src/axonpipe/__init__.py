"""axonpipe: kernel, service and script runner for axonometric pipeline
schemes (3D parametric pipes, connections, library symbols, dimensions and
annotations with SVG drawing output and specification tables)."""

from .geometry import EPS, AxisDir, Point3
from .model import (
    BlockAttachRef,
    BlockInstance,
    ChainDimension,
    Connection,
    HeightMark,
    Leader,
    OffsetSpec,
    Pipe,
    PipeEndRef,
    PositionDesignator,
    Scheme,
    TextAnnotation,
    integrity_check,
    pick,
    reference_closure,
)
from .projection import (
    ISOMETRIC,
    PRESETS,
    Projection,
    fly_around,
    orthogonalize,
    project,
    snap,
)
from .script import Session, run_lines, run_script
from .symbols import Library, SymbolDef, enumerate_orientations, validate_symbol

__version__ = "0.1.0"

__all__ = [
    "EPS", "AxisDir", "Point3",
    "BlockAttachRef", "BlockInstance", "ChainDimension", "Connection",
    "HeightMark", "Leader", "OffsetSpec", "Pipe", "PipeEndRef",
    "PositionDesignator", "Scheme", "TextAnnotation",
    "integrity_check", "pick", "reference_closure",
    "ISOMETRIC", "PRESETS", "Projection", "fly_around", "orthogonalize",
    "project", "snap",
    "Session", "run_lines", "run_script",
    "Library", "SymbolDef", "enumerate_orientations", "validate_symbol",
    "__version__",
]
