"""Canonical names, codes, and the ultrametric on pointed port graphs.

Run with:  python3 demos/01_codes_and_disks.py
"""
from cgd import (
    canonicalize,
    decode_graph,
    disk,
    distance,
    encode_graph,
    enumerate_disks,
    shift,
    write_code,
)
from cgd.corpus import grid_graph, sample_graph

x = sample_graph()
print("A 4-vertex, 3-port graph; every vertex is named by its least path")
print("from the pointer (pairs are out-port,in-port):")
for v in sorted(x.vertices, key=len):
    print(f"  {v!r}  label {x.label(v)}")

code = encode_graph(x)
print("\nIts depth-first code, one word per vertex in visit order:")
print(" ", code.text)
assert decode_graph(code) == x
print("Decoding gives back the same canonical graph.")

print("\nThe full file form is self-describing:")
print(write_code(code), end="")

y = shift(x, ((1, 1),))
print("\nRe-pointing at the vertex behind port 1 renames everything:")
print(" ", sorted(y.vertices, key=len))
print("Canonical forms make equality a hash check: x == shift back?",
      x == shift(y, ((1, 1),)))

g = grid_graph(3, 3)
print("\nDisks are induced balls around the pointer; on a 3x3 grid:")
for r in range(4):
    d = disk(g, r)
    print(f"  radius {r}: {len(d.graph.vertices)} vertices")

h = grid_graph(4, 4)
print("\nThe distance between the 3x3 and 4x4 grids is 1/2^r where r is")
print(f"the first radius whose disks differ: {distance(g, h).value}")
assert disk(g, 2) == disk(h, 2) and disk(g, 3) != disk(h, 3)

print("\nEvery radius-1 disk over 1 port and 1 label, enumerated in code order:")
for d in enumerate_disks(1, (0,), 1):
    print(" ", encode_graph(d.graph).text)
