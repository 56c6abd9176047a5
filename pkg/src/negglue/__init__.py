"""Two-handed tile assembly with negative glues: reaction engine, gadget
library, shape compiler and verifier."""

from .core import (
    INFINITE_STRENGTH,
    Assembly,
    BondGraph,
    EmptyAssembly,
    GlueLabel,
    InvalidScale,
    PositionedAssembly,
    Shape,
    StrengthTable,
    Tile,
    UnknownGlue,
    bond_graph,
    canonicalize,
    scale,
    shape_of,
)
from .cuts import Cut, TooLargeForExact
from .engine import (
    InconclusiveVerdict,
    ReactionEvent,
    SystemConfig,
    TraceDivergence,
    check_unique_shape,
    combinations,
    enumerate_cuts,
    find_breaks,
    is_tau_stable,
    is_terminal,
    producible_set,
    replay,
)
from .gadgets import (
    TAU,
    Gadget,
    GadgetLoadError,
    InequalityRow,
    TraceScript,
    default_strengths,
    inequality_rows,
    load_gadgets,
    trace_catalog,
    verify_inequalities,
)
from .compiler import (
    SCALE,
    BaseConversionPlan,
    CompiledSystem,
    DisconnectedShape,
    EmptyShape,
    GarbagePolicy,
    InstructionSequence,
    InstructionTape,
    SpanningTree,
    base_conversion_plan,
    compile_shape,
    instructions_to_tape,
    load_system,
    parse_shape,
    serialize_system,
    spanning_tree,
    system_bit_encoding_size,
    tree_outline_instructions,
)
from .verifier import AuditReport, ProbeReport, adversarial_probe, audit_run, two_handed_demo
from .render import RenderOptions, render

__version__ = "0.1.0"
