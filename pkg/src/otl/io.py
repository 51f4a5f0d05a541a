"""JSON formats for automata, parity automata, presentations and lasso words.

Atoms are strings or integers; compound atoms (tuples) are written as JSON
lists and read back as tuples, so every file round-trips unchanged.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile

from .automata import BuchiAutomaton, TrackAlphabet
from .lasso import PAD, LassoWord, parse_lasso
from .parity import ParityAutomaton
from .presentation import Presentation


class FormatError(ValueError):
    pass


def atom_to_json(a):
    if isinstance(a, tuple):
        return [atom_to_json(x) for x in a]
    if isinstance(a, (str, int)) and not isinstance(a, bool):
        return a
    raise FormatError(f"atom {a!r} cannot be serialised")


def atom_from_json(a):
    if isinstance(a, list):
        return tuple(atom_from_json(x) for x in a)
    if isinstance(a, (str, int)) and not isinstance(a, bool):
        return a
    raise FormatError(f"bad atom {a!r}")


def _tracks_to_json(tracks):
    return [{"symbols": [atom_to_json(s) for s in t.symbols], "pad": atom_to_json(t.pad)
             if t.pad is not None else None} for t in tracks]


def _tracks_from_json(data):
    if not isinstance(data, list):
        raise FormatError("'tracks' must be a list")
    out = []
    for t in data:
        try:
            syms = tuple(atom_from_json(s) for s in t["symbols"])
            pad = t.get("pad")
            out.append(TrackAlphabet(syms, atom_from_json(pad) if pad is not None else None))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad track alphabet: {exc}") from None
    return out


def automaton_to_json(m: BuchiAutomaton) -> dict:
    trans = sorted(([p, [atom_to_json(c) for c in a], q] for p, a, q in m.transitions),
                   key=lambda t: (t[0], json.dumps(t[1], ensure_ascii=False), t[2]))
    return {"tracks": _tracks_to_json(m.tracks), "states": m.n_states,
            "initial": sorted(m.initial), "accepting": sorted(m.accepting),
            "transitions": trans}


def automaton_from_json(data: dict) -> BuchiAutomaton:
    try:
        tracks = _tracks_from_json(data["tracks"])
        trans = [(int(p), tuple(atom_from_json(c) for c in a), int(q))
                 for p, a, q in data["transitions"]]
        return BuchiAutomaton(tracks, int(data["states"]), data["initial"], data["accepting"],
                              trans, check=True)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed automaton: {exc}") from None


def parity_to_json(pa: ParityAutomaton) -> dict:
    trans = sorted(([p, [atom_to_json(c) for c in a], q] for (p, a), q in pa.delta.items()),
                   key=lambda t: (t[0], json.dumps(t[1], ensure_ascii=False), t[2]))
    return {"tracks": _tracks_to_json(pa.tracks), "states": pa.n_states,
            "initial": [pa.initial], "priority": list(pa.priority), "sink": pa.sink,
            "transitions": trans}


def parity_from_json(data: dict) -> ParityAutomaton:
    """Read a deterministic parity automaton; without ``"sink"`` a rejecting one is added."""
    try:
        tracks = _tracks_from_json(data["tracks"])
        n = int(data["states"])
        prio = [int(p) for p in data["priority"]]
        init = data["initial"]
        init = int(init[0] if isinstance(init, list) else init)
        delta = {}
        for p, a, q in data["transitions"]:
            key = (int(p), tuple(atom_from_json(c) for c in a))
            if key in delta:
                raise FormatError(f"parity automaton is not deterministic at state {p}")
            delta[key] = int(q)
        sink = data.get("sink")
        if sink is None:
            sink = n
            n += 1
            prio.append(max(prio, default=0) | 1)
        return ParityAutomaton(tracks, n, init, prio, delta, int(sink))
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed parity automaton: {exc}") from None


def is_parity_json(data: dict) -> bool:
    return isinstance(data, dict) and "priority" in data


def presentation_to_json(p: Presentation) -> dict:
    return {
        "alphabet": {"symbols": [atom_to_json(s) for s in p.alphabet.symbols],
                     "pad": atom_to_json(p.alphabet.pad) if p.alphabet.pad is not None else None},
        "domain": automaton_to_json(p.domain),
        "equality": "identity" if p.equality is None else automaton_to_json(p.equality),
        "relations": {name: {"arity": k, "automaton": automaton_to_json(a)}
                      for name, (k, a) in sorted(p.relations.items())},
        "injective": p.injective,
    }


def presentation_from_json(data: dict) -> Presentation:
    try:
        alpha = data["alphabet"]
        if isinstance(alpha, list):
            alphabet = TrackAlphabet(tuple(atom_from_json(s) for s in alpha),
                                     PAD if PAD in alpha else None)
        else:
            pad = alpha.get("pad")
            alphabet = TrackAlphabet(tuple(atom_from_json(s) for s in alpha["symbols"]),
                                     atom_from_json(pad) if pad is not None else None)
        eq = data.get("equality", "identity")
        equality = None if eq in (None, "identity") else automaton_from_json(eq)
        rels = {}
        for name, spec in data.get("relations", {}).items():
            rels[name] = (int(spec["arity"]), automaton_from_json(spec["automaton"]))
        injective = bool(data.get("injective", equality is None))
        return Presentation(alphabet, automaton_from_json(data["domain"]), equality, rels, injective)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise FormatError(f"malformed presentation: {exc}") from None


def lasso_to_json(w: LassoWord) -> dict:
    return {"prefix": [[atom_to_json(c) for c in s] for s in w.prefix],
            "period": [[atom_to_json(c) for c in s] for s in w.period]}


def lasso_from_json(data) -> LassoWord:
    """A lasso from ``{"prefix": [...], "period": [...]}`` or the text form ``"u|v"``."""
    if isinstance(data, str):
        return parse_lasso(data)
    try:
        return LassoWord([tuple(atom_from_json(c) for c in s) for s in data["prefix"]],
                         [tuple(atom_from_json(c) for c in s) for s in data["period"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed lasso: {exc}") from None


def dumps(data) -> str:
    return json.dumps(data, ensure_ascii=False, sort_keys=True, separators=(",", ":")) + "\n"


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def write_atomic(path, text: str) -> str:
    """Write ``text`` via a temporary file and rename; returns the sha256 digest."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.chmod(tmp, 0o644)
    os.replace(tmp, path)
    return digest(text)


def digest(text: str | bytes) -> str:
    if isinstance(text, str):
        text = text.encode("utf-8")
    return hashlib.sha256(text).hexdigest()


def file_digest(path) -> str:
    with open(path, "rb") as fh:
        return digest(fh.read())


def load_automaton(path):
    """Buchi or parity automaton, depending on the file contents."""
    data = load_json(path)
    return parity_from_json(data) if is_parity_json(data) else automaton_from_json(data)


def load_presentation(path) -> Presentation:
    return presentation_from_json(load_json(path))
