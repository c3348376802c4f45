"""JSON automaton documents.

An NFA document::

    {"kind": "nfa", "alphabet": ["a"], "states": ["p", "q"],
     "accepting": ["q"], "transitions": {"p": {"a": ["q"]}}}

A PA document replaces ``accepting`` by ``output`` (state -> [0, 1]) and uses
weight maps as transition targets.  Unknown or duplicate keys are errors.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

from .automata import NfaCoalgebra, PaCoalgebra

_FIELDS = {
    "nfa": ({"kind", "alphabet", "states", "transitions"}, {"accepting"}),
    "pa": ({"kind", "alphabet", "states", "transitions", "output"}, set()),
}


class DocumentError(ValueError):
    """Malformed or inconsistent automaton document."""


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise DocumentError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _loads(text: str) -> Any:
    try:
        return json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as e:
        raise DocumentError(f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}") from None


def _str_list(doc, key) -> list:
    value = doc.get(key, [])
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise DocumentError(f"{key!r} must be a list of strings")
    if len(set(value)) != len(value):
        dup = next(v for v in value if value.count(v) > 1)
        raise DocumentError(f"duplicate entry {dup!r} in {key!r}")
    return value


def _mapping(value, what) -> dict:
    if not isinstance(value, dict):
        raise DocumentError(f"{what} must be an object")
    return value


def _weight(value, what) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(f"{what} must be a number, got {value!r}")
    return float(value)


def from_document(doc: Any) -> NfaCoalgebra | PaCoalgebra:
    """Build a coalgebra from an already parsed document."""
    doc = _mapping(doc, "document")
    kind = doc.get("kind")
    if kind not in _FIELDS:
        raise DocumentError(f"'kind' must be 'nfa' or 'pa', got {kind!r}")
    required, optional = _FIELDS[kind]
    for key in doc:
        if key not in required | optional:
            raise DocumentError(f"unknown field {key!r} in {kind} document")
    for key in sorted(required - set(doc)):
        raise DocumentError(f"missing field {key!r}")
    alphabet = _str_list(doc, "alphabet")
    states = _str_list(doc, "states")
    known, symbols = set(states), set(alphabet)
    transitions = _mapping(doc["transitions"], "'transitions'")
    for q, row in transitions.items():
        if q not in known:
            raise DocumentError(f"transitions given for undeclared state {q!r}")
        for a in _mapping(row, f"transitions of {q!r}"):
            if a not in symbols:
                raise DocumentError(f"transition of {q!r} on undeclared symbol {a!r}")

    try:
        if kind == "nfa":
            accepting = _str_list(doc, "accepting")
            for q in accepting:
                if q not in known:
                    raise DocumentError(f"accepting state {q!r} is not declared")
            trans = {}
            for q, row in transitions.items():
                for a, targets in row.items():
                    if not isinstance(targets, list) or not all(isinstance(t, str) for t in targets):
                        raise DocumentError(f"successors of {q!r} on {a!r} must be a list of states")
                    for t in targets:
                        if t not in known:
                            raise DocumentError(f"transition {q!r} --{a}--> undeclared state {t!r}")
                    trans[q, a] = targets
            return NfaCoalgebra(states, alphabet, accepting, trans)

        output = _mapping(doc["output"], "'output'")
        for q in output:
            if q not in known:
                raise DocumentError(f"output given for undeclared state {q!r}")
        out = {q: _weight(r, f"output of {q!r}") for q, r in output.items()}
        trans = {}
        for q, row in transitions.items():
            for a, weights in row.items():
                weights = _mapping(weights, f"distribution of {q!r} on {a!r}")
                for t in weights:
                    if t not in known:
                        raise DocumentError(f"transition {q!r} --{a}--> undeclared state {t!r}")
                trans[q, a] = {t: _weight(w, f"weight {q!r} --{a}--> {t!r}") for t, w in weights.items()}
        return PaCoalgebra(states, alphabet, out, trans)
    except DocumentError:
        raise
    except ValueError as e:
        raise DocumentError(str(e)) from None


def parse_automaton(source: str | os.PathLike) -> NfaCoalgebra | PaCoalgebra:
    """Parse a document from a path or from JSON text."""
    if isinstance(source, os.PathLike) or not source.lstrip().startswith("{"):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise DocumentError(f"cannot read {path}: {e.strerror}") from None
    else:
        text = source
    return from_document(_loads(text))


def to_document(aut: NfaCoalgebra | PaCoalgebra) -> dict:
    states = list(aut.states)
    for q in states + list(aut.alphabet):
        if not isinstance(q, str):
            raise TypeError(f"only string names can be serialized, got {q!r}")
    pos = {q: i for i, q in enumerate(states)}
    if isinstance(aut, NfaCoalgebra):
        trans = {}
        for q in states:
            row = {a: sorted(aut.succ(q, a), key=pos.__getitem__) for a in aut.alphabet if aut.succ(q, a)}
            if row:
                trans[q] = row
        return {"kind": "nfa", "alphabet": list(aut.alphabet), "states": states,
                "accepting": [q for q in states if q in aut.accepting], "transitions": trans}
    trans = {q: {a: {t: w for t, w in sorted(aut.succ(q, a).items(), key=lambda kv: pos[kv[0]])}
                 for a in aut.alphabet}
             for q in states}
    return {"kind": "pa", "alphabet": list(aut.alphabet), "states": states,
            "output": {q: aut.output(q) for q in states}, "transitions": trans}


def serialize_automaton(aut: NfaCoalgebra | PaCoalgebra) -> str:
    return json.dumps(to_document(aut), indent=2) + "\n"
