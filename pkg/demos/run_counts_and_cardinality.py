"""Counting accepting runs and measuring languages.

    python3 demos/run_counts_and_cardinality.py

A Buchi automaton can have many accepting runs on one lasso word.  Here we
build the automaton for the pairing polynomial (x+y)^2 + 3x + y, whose run
count on a^e1 (x) a^e2 equals the polynomial's value, and then classify a
few languages as finite, countable or continuum.
"""

from otl import (BuchiAutomaton, LassoWord, TrackAlphabet, complement, convolve,
                 count_accepting_runs, language_cardinality)
from otl.automata import disjoint_union, flag_intersection, member
from otl.cardinality import enumerate_members
from otl.hardness import cantor, poly_automaton, unary_word, var

# run counts follow the polynomial
m = poly_automaton(cantor(var(0), var(1)), 2)
print(f"pairing automaton: {m.n_states} states")
for e1, e2 in [(1, 1), (1, 2), (2, 1), (3, 4)]:
    w = convolve([unary_word(e1), unary_word(e2)])
    print(f"  runs on a^{e1} (x) a^{e2}: {count_accepting_runs(m, w)!r}")

# union adds run counts, the flag product multiplies them
x = poly_automaton(var(0), 1)
w = unary_word(3)
print("runs of x on a^3:", count_accepting_runs(x, w))
print("  union with itself:", count_accepting_runs(disjoint_union(x, x), w))
print("  product with itself:", count_accepting_runs(flag_intersection(x, x), w))

# the three possible sizes of an omega-regular language
AB = TrackAlphabet(("a", "b"))
b_star_a = BuchiAutomaton([AB], 2, [0], [1], [(0, ("b",), 0), (0, ("a",), 1), (1, ("a",), 1)])
everything = BuchiAutomaton([AB], 1, [0], [0], [(0, ("a",), 0), (0, ("b",), 0)])
one_b = BuchiAutomaton([AB], 3, [0], [2], [(0, ("a",), 0), (0, ("b",), 1), (1, ("a",), 2),
                                           (2, ("a",), 2)])
for name, auto in [("b* a^w", b_star_a), ("{a,b}^w", everything), ("a* b a^w", one_b)]:
    print(f"|{name}| = {language_cardinality(auto)!r}")
print("first members of b* a^w:", sorted(str(u) for u in enumerate_members(b_star_a, 3)))

# complementation goes through a deterministic parity automaton
inf_a = BuchiAutomaton([AB], 2, [0], [1], [(q, ("a",), 1) for q in (0, 1)]
                       + [(q, ("b",), 0) for q in (0, 1)])
co = complement(inf_a)
for u in [LassoWord.of("", "ab"), LassoWord.of("aa", "b")]:
    print(f"{u}: infinitely many a = {member(inf_a, u)}, complement = {member(co, u)}")
