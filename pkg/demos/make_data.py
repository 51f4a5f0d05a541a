"""Write the small JSON inputs used by the CLI walkthrough into demos/data/.

    python3 demos/make_data.py
"""

import json
import os

from otl.corpus import (TAUTOLOGY, TWO_CLAUSES, diamond, infinite_star, s_block_explicit,
                        s_block_runs, singleton_automaton)
from otl.io import automaton_to_json, dumps, presentation_to_json

HERE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


def write(name, data):
    path = os.path.join(HERE, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(data))
    print("wrote", path)


def main():
    os.makedirs(HERE, exist_ok=True)
    write("trivial_singleton.json", automaton_to_json(singleton_automaton()))
    write("s23_a.json", presentation_to_json(s_block_explicit(2, 3)))
    write("s23_b.json", presentation_to_json(s_block_runs(2, 3)))
    write("countable_star.json", presentation_to_json(infinite_star(False)))
    write("continuum_star.json", presentation_to_json(infinite_star(True)))
    write("diamond.json", presentation_to_json(diamond()))
    write("taut.json", json.loads(json.dumps(TAUTOLOGY)))
    write("two_clauses.json", TWO_CLAUSES)


if __name__ == "__main__":
    main()
