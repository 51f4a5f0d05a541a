"""Compiling a normal-form instance into trees of height 3.

    python3 demos/compile_instance.py        # about two minutes

The instance asks, for a number x, whether some set X makes every clause
"p != q or psi" hold.  The compiler turns clause automata into a forest
whose leaf counts encode the arithmetic, stacks copies of it into a
height-2 pair level, and adds one more level of roots.  The trees T (for x)
and U are then checked: markers c^e carry 2e+1 leaves, pair blocks an even
number.
"""

import time

from otl.acceptance import check_height3
from otl.corpus import FIXED_SETS, tautology_instance, two_clause_instance
from otl.hardness import build_base_forest, build_height3_trees, clause_root, set_word
from otl.trees import leaf_cardinality

inst = two_clause_instance()
print("instance:", inst.to_json())
forest = build_base_forest(inst)
X = set_word(FIXED_SETS[3])  # X = {1}
for values in [{"x": 1, "y": 1, "z1": 1}, {"x": 1, "y": 1, "z1": 2}]:
    root = clause_root(inst, 2, [X], values, 1)
    print(f"clause 2 at {values}: {leaf_cardinality(forest, root)!r} leaves, "
          f"expected {inst.expected_leaves(2, [X], values, 1)}")

t = time.perf_counter()
res = build_height3_trees(tautology_instance(), 1)
print(f"height-3 trees built in {time.perf_counter() - t:.0f}s")
for name, tree in res.trees.items():
    print(f"  {name}: {tree.sizes()}")
ok, notes = check_height3(res.trees)
print("checks passed:", ok)
for line in notes:
    print("  " + line)
