"""Attach a corner tile to an L at temperature 1, then watch the square break."""
from negglue import two_handed_demo, producible_set, render
from negglue.verifier import example_assemblies, example_config

for event in two_handed_demo():
    print(event.to_line())

pieces = example_assemblies()
for name in ("L", "square", "top", "bottom"):
    print(f"\n{name}:\n{render(pieces[name])}")

prod = producible_set(example_config())
print(f"\nproducible assemblies: {len(prod)} (saturated={prod.saturated})")
