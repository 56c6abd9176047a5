"""Compile a shape, run the scripted assembly and print the terminal shape."""
import sys

from negglue import audit_run, compile_shape, parse_shape
from negglue.core import shape_of

text = sys.argv[1].replace("/", "\n") if len(sys.argv) > 1 else "#./##"
system = compile_shape(parse_shape(text))
print(f"instructions: {system.instructions.text()}")
final = {}
report = audit_run(system, on_step=lambda i, step, scene: final.update(tiles=scene.tiles))
print(report.to_text(), end="")
small = shape_of(final["tiles"])
print(f"terminal cells: {len(small)} (target {len(system.target)})")
