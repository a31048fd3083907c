"""A rule whose orbit quadruples every vertex, keeping the grid shape.

Each vertex becomes a 2x2 block; each edge stitches two blocks along
the matching side.  Applied to a w x h grid it yields the 2w x 2h grid,
so vertex counts follow |V| * 4^n exactly.

Run with:  python3 demos/02_inflating_grid.py
"""
from cgd import apply_rule, orbit, to_dot, validate_local_rule
from cgd.corpus import grid_graph, path_graph
from cgd.library import inflating_grid_rule

f = inflating_grid_rule()
print("Rule: radius", f.params.radius, "image bound", f.params.bound,
      "over", f.params.port_count, "ports")

rep = validate_local_rule(f, samples=300, seed=1)
print("Consistency conditions:", "pass" if rep.ok else "FAIL",
      f"({rep.checked} cases, {rep.coverage})")

print("\nOrbit of the 3x3 grid:")
for n, g in enumerate(orbit(f, grid_graph(3, 3), 3)):
    print(f"  step {n}: |V|={len(g.vertices):4d} |E|={len(g.edges):4d}")

print("\nIt is a genuine grid each time, not just the right size:")
assert apply_rule(f, grid_graph(3, 3)) == apply_rule(f, grid_graph(3, 3))
doubled = apply_rule(f, grid_graph(2, 2))
print("  F(grid 2x2) has", len(doubled.vertices), "vertices; the 4x4 grid has",
      len(grid_graph(4, 4).vertices))

print("\nThe rule is total on any 4-port world, grid or not; a lone vertex")
lone = grid_graph(1, 1)
ring = apply_rule(f, lone)
print(f"becomes a 4-cycle: |V|={len(ring.vertices)} |E|={len(ring.edges)}")

print("\nDOT rendering of that 4-cycle (pointer double-circled):")
print(to_dot(ring), end="")
