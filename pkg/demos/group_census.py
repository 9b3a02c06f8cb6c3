"""
Enumerating the two-qubit Clifford group
========================================

Builds the full 11520-element group from circuit templates, prints the
class census and gate-cost statistics, then round-trips one element
through its stored circuit.
"""

import numpy as np

from rbsim.cliffords import (
    CLASS_NAMES,
    SignedPauliPerm,
    circuit_perm,
    clifford_table,
    group_stats,
)

table = clifford_table()
stats = group_stats(table)

print(f"group order {len(table)}")
for name, size in zip(CLASS_NAMES, stats.class_sizes):
    print(f"  {name:<13} {size:>5}")
print(f"mean entangling layers per element  {stats.avg_entangling_layers}")
print(f"mean non-identity pulses            {stats.avg_pulses:.4f}")
print(f"longest single-qubit word           {stats.max_word_length}")

# pick an element and show how it is scheduled
rng = np.random.default_rng(7)
index = int(rng.integers(len(table)))
print(f"\nelement {index} is {CLASS_NAMES[table.class_ids[index]]}:")
for layer in table.circuits[index]:
    if layer.kind == "zx":
        print("  zx   echoed ZX_-pi/2 block")
    else:
        words = " ".join(f"({g1},{g2})" for g1, g2 in layer.pulses)
        print(f"  1q   {words}")

# the stored circuit recomposes to the element exactly, and the stored
# inverse really inverts it
assert circuit_perm(table.circuits[index]) == table.elements[index]
inverse = table.elements[table.inverse_indices[index]]
identity = SignedPauliPerm.identity(2)
print("\ninverse closes to identity:",
      inverse.compose(table.elements[index]) == identity)

# closure spot check: the product of two random elements is a member
a, b = (int(x) for x in rng.integers(len(table), size=2))
product = table.elements[a].compose(table.elements[b])
print(f"closure: element {a} after {b} lands on {table.index_of(product)}")
