"""Parsing and serialization of language and sentence documents.

Text formats are line oriented:

language::

    domain 2
    relation NOT 2
    0 1
    1 0
    end

sentence::

    forall x
    exists y
    constraint NOT x y

A JSON mirror of both formats (same field names) is accepted for files with a
``.json`` extension.  Blank lines and ``#`` comments are ignored in the text
forms.  Variables containing ``$`` are reserved for transform-generated names
and rejected in user input; pass ``allow_reserved=True`` to re-read serialized
transform output.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .errors import ParseError
from .model import (
    EXISTS,
    FORALL,
    Atom,
    ConstraintLanguage,
    DomainSpec,
    QuantifiedSentence,
    Relation,
    RESERVED_MARK,
)

_RELATION_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_$]*$")
_VARIABLE_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_$]*$")

_NULLARY_ROW = "()"


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if line.strip():
            yield lineno, raw, line.split()


def _column(raw: str, token: str) -> int:
    pos = raw.find(token)
    return pos + 1 if pos >= 0 else 1


def _parse_int(token: str, lineno: int, raw: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", lineno, _column(raw, token)) from None


def parse_language(text: str) -> ConstraintLanguage:
    """Parse the text language format; errors report line and column."""
    domain: DomainSpec | None = None
    relations: dict[str, Relation] = {}
    current: tuple[str, int, list[tuple[int, ...]]] | None = None
    current_line = 0

    for lineno, raw, tokens in _lines(text):
        head = tokens[0]
        if domain is None:
            if head != "domain" or len(tokens) != 2:
                raise ParseError("expected 'domain <size>' as the first directive", lineno, 1)
            size = _parse_int(tokens[1], lineno, raw)
            if size < 1:
                raise ParseError(f"domain size must be >= 1, got {size}", lineno, _column(raw, tokens[1]))
            domain = DomainSpec(size)
        elif head == "relation":
            if current is not None:
                raise ParseError(
                    f"relation block starting at line {current_line} not terminated by 'end'", lineno, 1
                )
            if len(tokens) != 3:
                raise ParseError("expected 'relation <name> <arity>'", lineno, 1)
            name = tokens[1]
            if not _RELATION_NAME.match(name):
                raise ParseError(f"bad relation name {name!r}", lineno, _column(raw, name))
            if name in relations:
                raise ParseError(f"duplicate relation name {name!r}", lineno, _column(raw, name))
            arity = _parse_int(tokens[2], lineno, raw)
            if arity < 0:
                raise ParseError("arity must be >= 0", lineno, _column(raw, tokens[2]))
            current = (name, arity, [])
            current_line = lineno
        elif head == "end":
            if current is None:
                raise ParseError("'end' outside a relation block", lineno, 1)
            name, arity, rows = current
            relations[name] = Relation(name, arity, frozenset(rows))
            current = None
        elif head == "domain":
            raise ParseError("duplicate 'domain' directive", lineno, 1)
        elif current is not None:
            name, arity, rows = current
            if arity == 0:
                if tokens != [_NULLARY_ROW]:
                    raise ParseError(
                        f"nullary relation rows must be the literal {_NULLARY_ROW!r}", lineno, 1
                    )
                rows.append(())
                continue
            if len(tokens) != arity:
                raise ParseError(
                    f"tuple has {len(tokens)} entries, relation {name} has arity {arity}", lineno, 1
                )
            row = []
            for token in tokens:
                v = _parse_int(token, lineno, raw)
                if not (0 <= v < domain.size):
                    raise ParseError(
                        f"element {v} out of domain 0..{domain.size - 1}",
                        lineno,
                        _column(raw, token),
                    )
                row.append(v)
            rows.append(tuple(row))
        else:
            raise ParseError(f"unexpected directive {head!r}", lineno, 1)

    if domain is None:
        raise ParseError("empty document: missing 'domain' directive")
    if current is not None:
        raise ParseError(f"relation block starting at line {current_line} not terminated by 'end'")
    return ConstraintLanguage(domain, relations)


def _check_variable(name: str, lineno: int, raw: str, allow_reserved: bool) -> None:
    if not _VARIABLE_NAME.match(name):
        raise ParseError(f"bad variable name {name!r}", lineno, _column(raw, name))
    if not allow_reserved and RESERVED_MARK in name:
        raise ParseError(
            f"variable {name!r} uses the reserved '{RESERVED_MARK}' marker", lineno, _column(raw, name)
        )


def parse_sentence(
    text: str, lang: ConstraintLanguage, allow_reserved: bool = False
) -> QuantifiedSentence:
    """Parse the text sentence format and validate it against ``lang``."""
    prefix: list[tuple[str, str]] = []
    atoms: list[Atom] = []
    quantified: set[str] = set()
    in_matrix = False

    for lineno, raw, tokens in _lines(text):
        head = tokens[0]
        if head in (FORALL, EXISTS):
            if in_matrix:
                raise ParseError("quantifier after the first constraint line", lineno, 1)
            if len(tokens) != 2:
                raise ParseError(f"expected '{head} <var>'", lineno, 1)
            var = tokens[1]
            _check_variable(var, lineno, raw, allow_reserved)
            if var in quantified:
                raise ParseError(f"variable {var!r} quantified twice", lineno, _column(raw, var))
            quantified.add(var)
            prefix.append((head, var))
        elif head == "constraint":
            in_matrix = True
            if len(tokens) < 2:
                raise ParseError("expected 'constraint <relation> <vars...>'", lineno, 1)
            name = tokens[1]
            rel = lang.relations.get(name)
            if rel is None:
                raise ParseError(f"unknown relation {name!r}", lineno, _column(raw, name))
            args = tokens[2:]
            if len(args) != rel.arity:
                raise ParseError(
                    f"relation {name} has arity {rel.arity}, got {len(args)} arguments", lineno, 1
                )
            for var in args:
                _check_variable(var, lineno, raw, allow_reserved)
                if var not in quantified:
                    raise ParseError(f"variable {var!r} is not quantified", lineno, _column(raw, var))
            atoms.append(Atom(name, tuple(args)))
        else:
            raise ParseError(f"unexpected directive {head!r}", lineno, 1)

    return QuantifiedSentence(tuple(prefix), tuple(atoms), lang)


# ---------------------------------------------------------------------------
# serialization


def serialize_language(lang: ConstraintLanguage) -> str:
    lines = [f"domain {lang.domain.size}"]
    for rel in lang.sorted_relations():
        lines.append(f"relation {rel.name} {rel.arity}")
        for row in rel.sorted_tuples():
            lines.append(_NULLARY_ROW if rel.arity == 0 else " ".join(str(v) for v in row))
        lines.append("end")
    return "\n".join(lines) + "\n"


def serialize_sentence(sentence: QuantifiedSentence) -> str:
    lines = [f"{q} {v}" for q, v in sentence.prefix]
    for atom in sentence.matrix:
        lines.append(" ".join(["constraint", atom.relation, *atom.args]))
    return "\n".join(lines) + "\n" if lines else ""


def language_to_dict(lang: ConstraintLanguage) -> dict:
    return {
        "domain": lang.domain.size,
        "relations": [
            {"relation": rel.name, "arity": rel.arity, "rows": [list(t) for t in rel.sorted_tuples()]}
            for rel in lang.sorted_relations()
        ],
    }


def sentence_to_dict(sentence: QuantifiedSentence) -> dict:
    return {
        "prefix": [[q, v] for q, v in sentence.prefix],
        "constraints": [[atom.relation, *atom.args] for atom in sentence.matrix],
    }


def language_from_dict(data: dict) -> ConstraintLanguage:
    if not isinstance(data, dict) or "domain" not in data:
        raise ParseError("language JSON must be an object with a 'domain' field")
    size = data["domain"]
    if not isinstance(size, int) or size < 1:
        raise ParseError(f"bad domain size {size!r}")
    relations: dict[str, Relation] = {}
    for entry in data.get("relations", []):
        name = entry.get("relation")
        arity = entry.get("arity")
        rows = entry.get("rows", [])
        if not isinstance(name, str) or not _RELATION_NAME.match(name):
            raise ParseError(f"bad relation name {name!r}")
        if name in relations:
            raise ParseError(f"duplicate relation name {name!r}")
        if not isinstance(arity, int) or arity < 0:
            raise ParseError(f"relation {name}: bad arity {arity!r}")
        tuples = set()
        for row in rows:
            if not isinstance(row, list) or len(row) != arity:
                raise ParseError(f"relation {name}: row {row!r} does not match arity {arity}")
            for v in row:
                if not isinstance(v, int) or not (0 <= v < size):
                    raise ParseError(f"relation {name}: element {v!r} out of domain 0..{size - 1}")
            tuples.add(tuple(row))
        relations[name] = Relation(name, arity, frozenset(tuples))
    return ConstraintLanguage(DomainSpec(size), relations)


def sentence_from_dict(
    data: dict, lang: ConstraintLanguage, allow_reserved: bool = False
) -> QuantifiedSentence:
    if not isinstance(data, dict):
        raise ParseError("sentence JSON must be an object")
    lines: list[str] = []
    for entry in data.get("prefix", []):
        if not (isinstance(entry, list) and len(entry) == 2):
            raise ParseError(f"bad prefix entry {entry!r}")
        lines.append(f"{entry[0]} {entry[1]}")
    for entry in data.get("constraints", []):
        if not (isinstance(entry, list) and entry):
            raise ParseError(f"bad constraint entry {entry!r}")
        lines.append(" ".join(["constraint", *map(str, entry)]))
    return parse_sentence("\n".join(lines), lang, allow_reserved=allow_reserved)


def load_language(path: str | Path) -> ConstraintLanguage:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return language_from_dict(json.loads(text))
    return parse_language(text)


def load_sentence(
    path: str | Path, lang: ConstraintLanguage, allow_reserved: bool = False
) -> QuantifiedSentence:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        return sentence_from_dict(json.loads(text), lang, allow_reserved=allow_reserved)
    return parse_sentence(text, lang, allow_reserved=allow_reserved)
