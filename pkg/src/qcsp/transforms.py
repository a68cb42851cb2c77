"""Syntactic transformations of quantified sentences.

The pipeline pieces here rewrite prefixes while preserving truth value:

* :func:`normalize_alternating` pads a prefix into strict exists/forall
  alternation with unconstrained dummy variables.
* :func:`omega` collapses runs of universal variables between chosen
  positions into shared leading universals.
* :func:`eliminate_universals` expands universals into constant-tagged
  copies, yielding a plain CSP over the language with constants.
* :func:`move_universals_left` hoists universals over the existential block
  in front of them, copy by copy, until the prefix is forall*exists*.
* :func:`reduce_universal_count` shrinks a forall*exists* prefix to at most
  one universal per domain element.
* :func:`zeta` fully expands an alternating sentence into an equivalent
  forall*exists* sentence of exponential size.
* relational powers and the lexicographic column constraints translate
  between quantified sentences and CSPs over a power domain.

Every transform returns freshly named variables marked with "$" so the output
never collides with user input, and every output is checked well-formed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from .budgets import DEFAULT_BUDGETS, Budgets
from .model import (
    EXISTS,
    FORALL,
    Atom,
    ConstraintLanguage,
    DomainSpec,
    QuantifiedSentence,
    Relation,
    check_wellformed,
    const_name,
    encode_tuple,
    gamma_star,
)

GAMMA_PREFIX = "gamma$"


@dataclass(frozen=True)
class AlternatingSentence:
    """A sentence whose prefix is exactly exists y1 forall x1 ... exists yn forall xn."""

    sentence: QuantifiedSentence
    n: int

    def __post_init__(self):
        prefix = self.sentence.prefix
        if len(prefix) != 2 * self.n or self.n < 1:
            raise ValueError(f"prefix length {len(prefix)} does not match n={self.n}")
        for i, (q, _) in enumerate(prefix):
            want = EXISTS if i % 2 == 0 else FORALL
            if q != want:
                raise ValueError(f"prefix position {i} is {q}, expected {want}")

    def y_vars(self) -> list[str]:
        return [v for i, (_, v) in enumerate(self.sentence.prefix) if i % 2 == 0]

    def x_vars(self) -> list[str]:
        return [v for i, (_, v) in enumerate(self.sentence.prefix) if i % 2 == 1]


@dataclass(frozen=True)
class CspInstance:
    """A conjunction of atoms with every variable existential."""

    language: ConstraintLanguage
    variables: tuple[str, ...]
    atoms: tuple[Atom, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "atoms", tuple(self.atoms))
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise ValueError("instance variables must be distinct")
        for atom in self.atoms:
            rel = self.language.relations.get(atom.relation)
            if rel is None:
                raise ValueError(f"atom over unknown relation {atom.relation!r}")
            if len(atom.args) != rel.arity:
                raise ValueError(
                    f"atom {atom.relation}{atom.args}: arity {rel.arity} expected"
                )
            for v in atom.args:
                if v not in declared:
                    raise ValueError(f"atom variable {v!r} not declared in the instance")

    def as_sentence(self) -> QuantifiedSentence:
        return QuantifiedSentence(
            tuple((EXISTS, v) for v in self.variables), self.atoms, self.language
        )


@dataclass(frozen=True)
class CanonicalFalse:
    """Distinguished FALSE verdict carried where a sentence cannot be built."""

    truth: bool = False

    def to_json(self) -> dict:
        return {"kind": "canonical-false", "truth": False}


CANONICAL_FALSE = CanonicalFalse()


@dataclass(frozen=True)
class GammaColumn:
    """Column i of the matrix whose rows list A^k in lexicographic order."""

    index: int
    column: tuple[int, ...]


# ---------------------------------------------------------------------------
# alternation normal form


def normalize_alternating(s: QuantifiedSentence) -> AlternatingSentence:
    """Insert unconstrained dummies until the prefix strictly alternates
    exists/forall, starting with exists and ending with forall."""
    out: list[tuple[str, str]] = []
    counter = 1
    expect = EXISTS
    for q, v in s.prefix:
        if q != expect:
            dummy = f"y$d{counter}" if expect == EXISTS else f"x$d{counter}"
            counter += 1
            out.append((expect, dummy))
            expect = FORALL if expect == EXISTS else EXISTS
        out.append((q, v))
        expect = FORALL if expect == EXISTS else EXISTS
    if expect == EXISTS and not out:
        out.append((EXISTS, f"y$d{counter}"))
        counter += 1
        expect = FORALL
    if expect == FORALL:
        out.append((FORALL, f"x$d{counter}"))
    sentence = QuantifiedSentence(tuple(out), s.matrix, s.language)
    check_wellformed(sentence)
    return AlternatingSentence(sentence, len(out) // 2)


# ---------------------------------------------------------------------------
# collapsing interleaved universals


def omega(alt: AlternatingSentence, indices: tuple[int, ...]) -> QuantifiedSentence:
    """Collapse the universals away from the chosen positions.

    With 1 <= n_1 < ... < n_k <= n, the universal at each chosen position is
    kept; every other universal between two chosen positions is replaced by a
    shared fresh variable z$j, universally quantified at the front together
    with z$0..z$k.  The output has exactly 2k+1 universals.
    """
    n = alt.n
    indices = tuple(indices)
    for a, b in zip(indices, indices[1:]):
        if a >= b:
            raise ValueError(f"indices must be strictly increasing, got {indices}")
    if indices and not (1 <= indices[0] and indices[-1] <= n):
        raise ValueError(f"indices out of range 1..{n}: {indices}")
    k = len(indices)
    xs = alt.x_vars()
    kept = set(indices)
    rename: dict[str, str] = {}
    for i in range(1, n + 1):
        if i in kept:
            continue
        j = sum(1 for nj in indices if nj < i)
        rename[xs[i - 1]] = f"z${j}"
    prefix: list[tuple[str, str]] = [(FORALL, f"z${j}") for j in range(k + 1)]
    for q, v in alt.sentence.prefix:
        if q == FORALL and v in rename:
            continue
        prefix.append((q, v))
    matrix = tuple(a.rename(rename) for a in alt.sentence.matrix)
    out = QuantifiedSentence(tuple(prefix), matrix, alt.sentence.language)
    check_wellformed(out)
    return out


# ---------------------------------------------------------------------------
# universal elimination (to a CSP with constants)


def eliminate_universals(s: QuantifiedSentence, budgets: Budgets = DEFAULT_BUDGETS) -> CspInstance:
    """Expand every universal into one constant-tagged copy per domain element.

    The innermost universal is expanded first; each expansion renames the
    variable and the existential tail with a $c copy suffix and adds a
    const_a(x$c) atom.  The result is a CSP over the language with constants.
    """
    size = s.language.domain.size
    n_univ = s.universal_count()
    budgets.check("universal elimination copies", size**n_univ, budgets.max_matrix_copies)
    budgets.check(
        "universal elimination atoms",
        (len(s.matrix) + 1) * size**n_univ,
        budgets.max_matrix_atoms,
    )
    budgets.check_bytes("universal elimination", (len(s.matrix) + 1) * size**n_univ)

    prefix = list(s.prefix)
    matrix = list(s.matrix)
    while True:
        pos = next((i for i in range(len(prefix) - 1, -1, -1) if prefix[i][0] == FORALL), None)
        if pos is None:
            break
        x = prefix[pos][1]
        tail = [v for _, v in prefix[pos + 1 :]]
        renamed = [x, *tail]
        new_prefix = prefix[:pos] + [(EXISTS, f"{x}${c}") for c in range(1, size + 1)]
        for c in range(1, size + 1):
            new_prefix.extend((EXISTS, f"{v}${c}") for v in tail)
        new_matrix: list[Atom] = []
        for c in range(1, size + 1):
            cmap = {v: f"{v}${c}" for v in renamed}
            new_matrix.extend(a.rename(cmap) for a in matrix)
        consts = [Atom(const_name(c - 1), (f"{x}${c}",)) for c in range(1, size + 1)]
        prefix = new_prefix
        matrix = new_matrix + consts

    glang = gamma_star(s.language)
    variables = tuple(v for _, v in prefix)
    if len(set(variables)) != len(variables):
        raise ValueError("internal renaming collision during universal elimination")
    return CspInstance(glang, variables, tuple(matrix))


# ---------------------------------------------------------------------------
# moving universals left


def move_universals_left(s: QuantifiedSentence, budgets: Budgets = DEFAULT_BUDGETS) -> QuantifiedSentence:
    """Rewrite into forall*exists* form without constants.

    Repeatedly takes the rightmost universal directly preceded by an
    existential block and hoists it over that block, splitting it into one
    copy per domain element.  Bound existentials in the scope behind it are
    renamed per copy; universal quantifiers there are shared between copies
    (conjunction distributes over a shared universal), which keeps the
    rewrite terminating.  The universal count compounds per nesting level.
    """
    size = s.language.domain.size
    prefix = list(s.prefix)
    matrix = list(s.matrix)
    while True:
        boundary = None
        for i in range(len(prefix) - 2, -1, -1):
            if prefix[i][0] == EXISTS and prefix[i + 1][0] == FORALL:
                boundary = i
                break
        if boundary is None:
            break
        u = prefix[boundary + 1][1]
        j = boundary
        while j > 0 and prefix[j - 1][0] == EXISTS:
            j -= 1
        w_part = prefix[:j]
        e_part = prefix[j : boundary + 1]
        tail = prefix[boundary + 2 :]
        tail_exists = [v for q, v in tail if q == EXISTS]
        renamed = [u, *tail_exists]
        renamed_set = set(renamed)

        touched = [a for a in matrix if renamed_set & a.variables()]
        budgets.check(
            "universal hoisting atoms",
            len(matrix) + (size - 1) * len(touched),
            budgets.max_matrix_atoms,
        )
        budgets.check(
            "universal hoisting prefix",
            len(prefix) + (size - 1) * (1 + len(tail_exists)),
            budgets.max_prefix_vars,
        )
        budgets.check_bytes("universal hoisting", len(matrix) + (size - 1) * len(touched))

        maps = [{v: f"{v}${c}" for v in renamed} for c in range(1, size + 1)]
        new_tail: list[tuple[str, str]] = []
        for q, v in tail:
            if q == FORALL:
                new_tail.append((q, v))
            else:
                new_tail.extend((EXISTS, f"{v}${c}") for c in range(1, size + 1))
        new_matrix = [a.rename(maps[0]) for a in matrix]
        for c in range(1, size):
            new_matrix.extend(a.rename(maps[c]) for a in touched)
        prefix = (
            w_part
            + [(FORALL, f"{u}${c}") for c in range(1, size + 1)]
            + e_part
            + new_tail
        )
        matrix = new_matrix

    out = QuantifiedSentence(tuple(prefix), tuple(matrix), s.language)
    check_wellformed(out)
    if not out.is_pi2():
        raise AssertionError("universal hoisting did not reach forall*exists* form")
    return out


# ---------------------------------------------------------------------------
# shrinking the universal count


def reduce_universal_count(s: QuantifiedSentence, budgets: Budgets = DEFAULT_BUDGETS) -> QuantifiedSentence:
    """Conjoin one renamed copy per map from the k universals to |A| shared
    universals, leaving a forall*exists* sentence with at most |A| universals."""
    if not s.is_pi2():
        raise ValueError("input must be in forall*exists* form")
    size = s.language.domain.size
    uvars = s.universals()
    evars = s.existentials()
    k = len(uvars)
    if k == 0:
        return s
    copies = size**k
    budgets.check("universal-count reduction copies", copies, budgets.max_matrix_copies)
    budgets.check(
        "universal-count reduction atoms", copies * max(1, len(s.matrix)), budgets.max_matrix_atoms
    )
    budgets.check(
        "universal-count reduction prefix", size + copies * len(evars), budgets.max_prefix_vars
    )
    budgets.check_bytes("universal-count reduction", copies * max(1, len(s.matrix)))

    zs = [f"z$u{i}" for i in range(1, size + 1)]
    prefix: list[tuple[str, str]] = [(FORALL, z) for z in zs]
    matrix: list[Atom] = []
    for j, phi in enumerate(product(range(size), repeat=k), start=1):
        cmap: dict[str, str] = {uvars[i]: zs[phi[i]] for i in range(k)}
        cmap.update({e: f"{e}${j}" for e in evars})
        prefix.extend((EXISTS, cmap[e]) for e in evars)
        matrix.extend(a.rename(cmap) for a in s.matrix)
    out = QuantifiedSentence(tuple(prefix), tuple(matrix), s.language)
    check_wellformed(out)
    return out


# ---------------------------------------------------------------------------
# full expansion to forall*exists*


def zeta(alt: AlternatingSentence, budgets: Budgets = DEFAULT_BUDGETS) -> QuantifiedSentence:
    """Equivalent forall*exists* sentence with one matrix copy per tuple of A^n.

    In the copy for (a_1,..,a_n) the i-th universal becomes x$i$a_1-..-a_i and
    the i-th existential becomes y$i$a_1-..-a_(i-1), so existentials are shared
    exactly between copies that agree on the earlier universal values.
    """
    n = alt.n
    size = alt.sentence.language.domain.size
    copies = size**n
    budgets.check("full expansion copies", copies, budgets.max_matrix_copies)
    budgets.check("full expansion atoms", copies * max(1, len(alt.sentence.matrix)), budgets.max_matrix_atoms)
    x_total = sum(size**i for i in range(1, n + 1))
    y_total = sum(size ** (i - 1) for i in range(1, n + 1))
    budgets.check("full expansion prefix", x_total + y_total, budgets.max_prefix_vars)
    budgets.check_bytes("full expansion", copies * max(1, len(alt.sentence.matrix)))

    xs = alt.x_vars()
    ys = alt.y_vars()

    def tag(values: tuple[int, ...]) -> str:
        return "-".join(str(v) for v in values)

    def x_name(i: int, values: tuple[int, ...]) -> str:
        return f"x${i}${tag(values)}"

    def y_name(i: int, values: tuple[int, ...]) -> str:
        return f"y${i}${tag(values)}"

    prefix: list[tuple[str, str]] = []
    for i in range(1, n + 1):
        for values in product(range(size), repeat=i):
            prefix.append((FORALL, x_name(i, values)))
    for i in range(1, n + 1):
        for values in product(range(size), repeat=i - 1):
            prefix.append((EXISTS, y_name(i, values)))

    matrix: list[Atom] = []
    for a_tuple in product(range(size), repeat=n):
        cmap: dict[str, str] = {}
        for i in range(1, n + 1):
            cmap[xs[i - 1]] = x_name(i, a_tuple[:i])
            cmap[ys[i - 1]] = y_name(i, a_tuple[: i - 1])
        matrix.extend(a.rename(cmap) for a in alt.sentence.matrix)
    out = QuantifiedSentence(tuple(prefix), tuple(matrix), alt.sentence.language)
    check_wellformed(out)
    return out


# ---------------------------------------------------------------------------
# relational powers and lexicographic columns


def gamma_columns(k: int, dom: DomainSpec, budgets: Budgets = DEFAULT_BUDGETS) -> list[GammaColumn]:
    """The k columns of the matrix whose rows list A^k in lexicographic order."""
    if k < 1:
        raise ValueError("column width must be >= 1")
    size = dom.size
    rows = size**k
    budgets.check("lexicographic column length", rows, budgets.max_power_domain)
    cols = []
    for i in range(1, k + 1):
        stride = size ** (k - i)
        cols.append(GammaColumn(i, tuple((row // stride) % size for row in range(rows))))
    return cols


def power_relation(rel: Relation, k: int, dom: DomainSpec, budgets: Budgets = DEFAULT_BUDGETS) -> Relation:
    """The relation over A^k holding iff every digit slice lies in ``rel``.

    Power-domain elements are the lexicographic ranks of k-tuples over A, so
    membership is pure arithmetic on encodings.  |result| = |rel|**k.
    """
    if k < 1:
        raise ValueError("power must be >= 1")
    size = dom.size
    budgets.check("power domain", size**k, budgets.max_power_domain)
    if rel.tuples:
        budgets.check("power relation tuples", len(rel.tuples) ** k, budgets.max_power_tuples)
    rows = rel.sorted_tuples()
    out = set()
    for choice in product(rows, repeat=k):
        out.add(
            tuple(
                encode_tuple(tuple(choice[i][j] for i in range(k)), size)
                for j in range(rel.arity)
            )
        )
    return Relation(rel.name, rel.arity, frozenset(out))


@dataclass(frozen=True)
class PowerLanguage(ConstraintLanguage):
    """A base language raised to a power, plus the column singleton constraints."""

    base: ConstraintLanguage
    power: int


def build_power_language(base: ConstraintLanguage, budgets: Budgets = DEFAULT_BUDGETS) -> PowerLanguage:
    """The language over A^(|A|**|A|): every base relation powered, plus one
    unary singleton per lexicographic column of width |A|."""
    size = base.domain.size
    k = size**size
    budgets.check("power domain", size**k, budgets.max_power_domain)
    pdom = DomainSpec(size**k)
    rels: dict[str, Relation] = {}
    for rel in base.sorted_relations():
        if rel.name.startswith(GAMMA_PREFIX):
            raise ValueError(f"base relation name {rel.name!r} collides with column constraints")
        rels[rel.name] = power_relation(rel, k, base.domain, budgets)
    for col in gamma_columns(size, base.domain, budgets):
        name = f"{GAMMA_PREFIX}{col.index}"
        rels[name] = Relation(name, 1, frozenset({(encode_tuple(col.column, size),)}))
    return PowerLanguage(pdom, rels, base, k)


def qcsp_to_power_csp(s: QuantifiedSentence, budgets: Budgets = DEFAULT_BUDGETS) -> CspInstance:
    """Translate a forall*exists* sentence with at most |A| universals into a
    CSP over the power language, constraining each universal to its column."""
    if not s.is_pi2():
        raise ValueError("input must be in forall*exists* form")
    size = s.language.domain.size
    uvars = s.universals()
    if len(uvars) > size:
        raise ValueError(
            f"input has {len(uvars)} universals; at most {size} allowed (reduce the count first)"
        )
    pad = [f"x$pad{i}" for i in range(1, size - len(uvars) + 1)]
    uvars = pad + uvars
    plang = build_power_language(s.language, budgets)
    variables = tuple(pad + [v for _, v in s.prefix])
    atoms = list(s.matrix)
    atoms.extend(Atom(f"{GAMMA_PREFIX}{i}", (v,)) for i, v in enumerate(uvars, start=1))
    return CspInstance(plang, variables, tuple(atoms))


def power_csp_to_qcsp(inst: CspInstance) -> QuantifiedSentence | CanonicalFalse:
    """Translate an instance over a power language back to a quantified sentence.

    Column-constrained variables become the universals x$u1..x$u|A|; a variable
    carrying two different column constraints makes the instance canonically
    false.  All other variables stay existential over the base domain.
    """
    plang = inst.language
    if not isinstance(plang, PowerLanguage):
        raise ValueError("instance language is not a power language")
    base = plang.base
    size = base.domain.size
    column_of: dict[str, int] = {}
    kept: list[Atom] = []
    for atom in inst.atoms:
        if atom.relation.startswith(GAMMA_PREFIX):
            i = int(atom.relation[len(GAMMA_PREFIX):])
            if not (1 <= i <= size):
                raise ValueError(f"foreign relation name {atom.relation!r}")
            z = atom.args[0]
            if column_of.get(z, i) != i:
                return CANONICAL_FALSE
            column_of[z] = i
        elif atom.relation in base.relations:
            kept.append(atom)
        else:
            raise ValueError(f"foreign relation name {atom.relation!r}")
    xs = [f"x$u{i}" for i in range(1, size + 1)]
    rename = {z: xs[i - 1] for z, i in column_of.items()}
    prefix: list[tuple[str, str]] = [(FORALL, x) for x in xs]
    prefix.extend((EXISTS, v) for v in inst.variables if v not in column_of)
    matrix = tuple(a.rename(rename) for a in kept)
    out = QuantifiedSentence(tuple(prefix), matrix, base)
    check_wellformed(out)
    return out
