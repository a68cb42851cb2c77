"""Ground-truth oracles and the reduction pipelines.

The game-tree oracle evaluates any quantified sentence exactly and is the
reference every transformation is checked against.  The CSP solver is a
deterministic backtracking search with generalized arc consistency, sound and
complete.  The reduction pipelines are gated on a switchability witness: the
equivalence they compute is only guaranteed when the bounded-switch tuples
actually generate the powers.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations, product

from .algebra import (
    OperationTable,
    SwitchabilityWitness,
    WITNESSED,
    find_wnu,
    is_wnu,
    lift_operation,
    preserves,
    switchability_witness,
)
from .budgets import DEFAULT_BUDGETS, Budgets
from .errors import WitnessRequiredError
from .model import (
    EXISTS,
    FORALL,
    Atom,
    ConstraintLanguage,
    QuantifiedSentence,
    check_wellformed,
    const_name,
    gamma_star,
    validate_sentence,
)
from .transforms import (
    AlternatingSentence,
    CanonicalFalse,
    CspInstance,
    build_power_language,
    eliminate_universals,
    move_universals_left,
    normalize_alternating,
    omega,
    reduce_universal_count,
)

P_TIME = "P"
NP_COMPLETE_BOUNDED = "NP-complete-modulo-arity-bound"
NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class SolveVerdict:
    truth: bool
    method: str
    witness: dict[str, int] | None
    stats: dict[str, int]

    def __post_init__(self):
        if self.witness is not None and not self.truth:
            raise ValueError("witness present on an unsatisfiable verdict")

    def to_json(self) -> dict:
        out = {"truth": self.truth, "method": self.method, "stats": dict(self.stats)}
        if self.witness is not None:
            out["witness"] = dict(self.witness)
        return out


# ---------------------------------------------------------------------------
# exact game-tree oracle


def oracle_qcsp(sentence: QuantifiedSentence, budgets: Budgets = DEFAULT_BUDGETS) -> SolveVerdict:
    """Evaluate the sentence by exhaustive recursion over the raw prefix.

    Prefix variables that occur in no atom have identical children under
    either quantifier, so the recursion branches only on occurring variables;
    the verdict is exact and the budget is counted over those levels.
    """
    report = validate_sentence(sentence)
    if not report.ok:
        raise ValueError(f"invalid sentence: {report.issues[0].message}")
    size = sentence.language.domain.size
    occurring = sentence.matrix_variables()
    levels = [(q, v) for q, v in sentence.prefix if v in occurring]
    nvars = len(levels)
    budgets.check("game tree size", size**nvars, budgets.max_game_tree)

    position = {v: i for i, (_, v) in enumerate(levels)}
    ready: list[list[tuple[frozenset, tuple[int, ...]]]] = [[] for _ in range(nvars)]
    truth = True
    for atom in sentence.matrix:
        rel = sentence.language.relations[atom.relation]
        idxs = tuple(position[v] for v in atom.args)
        if not idxs:
            if () not in rel.tuples:
                truth = False
            continue
        ready[max(idxs)].append((rel.tuples, idxs))

    assignment = [0] * nvars
    nodes = 0

    def holds_at(level: int) -> bool:
        for tuples, idxs in ready[level]:
            if tuple(assignment[i] for i in idxs) not in tuples:
                return False
        return True

    def walk(level: int) -> bool:
        nonlocal nodes
        if level == nvars:
            return True
        q = levels[level][0]
        for value in range(size):
            nodes += 1
            assignment[level] = value
            sub = holds_at(level) and walk(level + 1)
            if q == FORALL and not sub:
                return False
            if q == EXISTS and sub:
                return True
        return q == FORALL

    truth = truth and walk(0)
    return SolveVerdict(truth, "oracle", None, {"nodes": nodes})


# ---------------------------------------------------------------------------
# CSP backtracking with generalized arc consistency


def solve_csp(inst: CspInstance, budgets: Budgets = DEFAULT_BUDGETS) -> SolveVerdict:
    """Sound and complete backtracking with lexicographic variable and value order.

    After the initial arc-consistency pass the constraint graph is split on
    the variables still carrying more than one value; each connected component
    is searched independently (lexicographically inside the component), which
    keeps chronological backtracking from thrashing across unrelated blocks.
    """
    size = inst.language.domain.size
    variables = list(inst.variables)
    if not inst.atoms:
        return SolveVerdict(True, "csp", {}, {"nodes": 0})

    index = {v: i for i, v in enumerate(variables)}
    compiled: list[tuple[list[tuple[int, ...]], tuple[int, ...]]] = []
    watch: list[list[int]] = [[] for _ in variables]
    for atom in inst.atoms:
        rel = inst.language.relations[atom.relation]
        idxs = tuple(index[v] for v in atom.args)
        aid = len(compiled)
        compiled.append((rel.sorted_tuples(), idxs))
        for i in set(idxs):
            watch[i].append(aid)

    domains: list[set[int]] = [set(range(size)) for _ in variables]
    trail: list[tuple[int, set[int]]] = []
    in_queue = [False] * len(compiled)
    nodes = 0

    def undo(mark: int) -> None:
        while len(trail) > mark:
            w, removed = trail.pop()
            domains[w] |= removed

    def propagate(seed_atoms) -> bool:
        queue = deque()
        for aid in seed_atoms:
            if not in_queue[aid]:
                in_queue[aid] = True
                queue.append(aid)
        while queue:
            aid = queue.popleft()
            in_queue[aid] = False
            tuples, idxs = compiled[aid]
            arity = len(idxs)
            allowed: list[set[int]] = [set() for _ in range(arity)]
            for t in tuples:
                ok = True
                for p in range(arity):
                    if t[p] not in domains[idxs[p]]:
                        ok = False
                        break
                if ok:
                    for p in range(arity):
                        allowed[p].add(t[p])
            for p in range(arity):
                w = idxs[p]
                new = domains[w] & allowed[p]
                if len(new) < len(domains[w]):
                    trail.append((w, domains[w] - new))
                    domains[w] = new
                    if not new:
                        while queue:
                            in_queue[queue.popleft()] = False
                        return False
                    for a2 in watch[w]:
                        if not in_queue[a2]:
                            in_queue[a2] = True
                            queue.append(a2)
        return True

    if not propagate(range(len(compiled))):
        return SolveVerdict(False, "csp", None, {"nodes": 0})

    # connected components over the still-branching variables
    parent = list(range(len(variables)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for _, idxs in compiled:
        live = [i for i in set(idxs) if len(domains[i]) > 1]
        for a, b in zip(live, live[1:]):
            parent[find(a)] = find(b)
    groups: dict[int, list[int]] = {}
    for i in range(len(variables)):
        if len(domains[i]) > 1:
            groups.setdefault(find(i), []).append(i)
    components = sorted(
        (sorted(g, key=lambda i: variables[i]) for g in groups.values()),
        key=lambda g: variables[g[0]],
    )

    def search(order: list[int]) -> bool:
        nonlocal nodes
        # frames: (var, remaining values, trail mark before its assignment, cursor)
        stack: list[tuple[int, list[int], int, int]] = []
        cursor = 0
        pending: tuple[int, list[int], int] | None = None
        while True:
            if pending is None:
                v = None
                c = cursor
                while c < len(order):
                    if len(domains[order[c]]) > 1:
                        v = order[c]
                        break
                    c += 1
                if v is None:
                    return True
                pending = (v, sorted(domains[v]), c)
            v, values, cursor = pending
            placed = False
            while values:
                value = values.pop(0)
                nodes += 1
                mark = len(trail)
                trail.append((v, domains[v] - {value}))
                domains[v] = {value}
                if propagate(list(watch[v])):
                    stack.append((v, values, mark, cursor))
                    placed = True
                    break
                undo(mark)
            if placed:
                pending = None
                continue
            if not stack:
                return False
            v, values, mark, cursor = stack.pop()
            undo(mark)
            pending = (v, values, cursor)

    for component in components:
        if not search(component):
            return SolveVerdict(False, "csp", None, {"nodes": nodes})
    witness = {variables[i]: min(domains[i]) for i in range(len(variables))}
    for tuples, idxs in compiled:
        assert tuple(witness[variables[i]] for i in idxs) in set(tuples)
    return SolveVerdict(True, "csp", witness, {"nodes": nodes})


def truth_of(obj, budgets: Budgets = DEFAULT_BUDGETS) -> bool:
    """Truth of any pipeline object: sentence, instance, or canonical false."""
    if isinstance(obj, CanonicalFalse):
        return False
    if isinstance(obj, CspInstance):
        return solve_csp(obj, budgets).truth
    if isinstance(obj, AlternatingSentence):
        obj = obj.sentence
    return oracle_qcsp(obj, budgets).truth


def pi2_truth(sentence: QuantifiedSentence, budgets: Budgets = DEFAULT_BUDGETS) -> bool:
    """Truth of a forall*exists* sentence.

    The universal block distributes over the conjunction, so the matrix is
    split into components connected through shared existential variables;
    each component is checked satisfiable under every assignment of the
    universals it actually touches.
    """
    if not sentence.is_pi2():
        raise ValueError("input must be in forall*exists* form")
    report = validate_sentence(sentence)
    if not report.ok:
        raise ValueError(f"invalid sentence: {report.issues[0].message}")
    size = sentence.language.domain.size
    universal_pos = {v: i for i, v in enumerate(sentence.universals())}
    existentials = set(sentence.existentials())
    glang = gamma_star(sentence.language)

    # union-find over existential variables; atoms join their existentials
    parent: dict[str, str] = {v: v for v in existentials}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    groups: dict[str, list[Atom]] = {}
    universal_only: list[Atom] = []
    for atom in sentence.matrix:
        evars = sorted(set(atom.args) & existentials)
        if not evars:
            universal_only.append(atom)
            continue
        for a, b in zip(evars, evars[1:]):
            parent[find(a)] = find(b)
    for atom in sentence.matrix:
        evars = sorted(set(atom.args) & existentials)
        if evars:
            groups.setdefault(find(evars[0]), []).append(atom)

    def holds_for_all(atoms: list[Atom]) -> bool:
        touched = sorted(
            {v for a in atoms for v in a.args if v in universal_pos},
            key=universal_pos.get,
        )
        budgets.check("component assignments", size ** len(touched), budgets.max_game_tree)
        evars = sorted({v for a in atoms for v in a.args if v not in universal_pos})
        for values in product(range(size), repeat=len(touched)):
            fixed = dict(zip(touched, values))
            inst_atoms = list(atoms) + [Atom(const_name(val), (v,)) for v, val in fixed.items()]
            inst = CspInstance(glang, tuple(touched + evars), tuple(inst_atoms))
            if not solve_csp(inst, budgets).truth:
                return False
        return True

    for atom in universal_only:
        if not holds_for_all([atom]):
            return False
    for key in sorted(groups):
        if not holds_for_all(groups[key]):
            return False
    return True


# ---------------------------------------------------------------------------
# witness-gated reductions


def _check_witness_gate(
    witness: SwitchabilityWitness | None, r: int, override: bool
) -> bool:
    """Returns True when the result must carry the conditional caveat."""
    valid = witness is not None and witness.verdict == WITNESSED and witness.r <= r
    if valid:
        return False
    if override:
        return True
    raise WitnessRequiredError(
        f"no switchability witness for switch bound {r}; pass override to proceed conditionally"
    )


def _index_sets(n: int, r: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    for k in range(0, min(r, n) + 1):
        out.extend(combinations(range(1, n + 1), k))
    return out


@dataclass(frozen=True)
class BundleMember:
    indices: tuple[int, ...]
    sentence: QuantifiedSentence
    instance: CspInstance
    verdict: SolveVerdict


@dataclass(frozen=True)
class ReductionBundle:
    """One CSP instance per collapse pattern; true iff all are satisfiable."""

    source: QuantifiedSentence
    r: int
    members: tuple[BundleMember, ...]
    combined: bool
    conditional: bool

    def __post_init__(self):
        if self.combined != all(m.verdict.truth for m in self.members):
            raise ValueError("combined verdict must be the conjunction of member verdicts")

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "combined": self.combined,
            "conditional": self.conditional,
            "instances_solved": len(self.members),
            "members": [
                {
                    "indices": list(m.indices),
                    "satisfiable": m.verdict.truth,
                    "nodes": m.verdict.stats.get("nodes", 0),
                }
                for m in self.members
            ],
        }


def reduce_pgp_to_csp(
    s: QuantifiedSentence,
    r: int,
    witness: SwitchabilityWitness | None = None,
    override: bool = False,
    budgets: Budgets = DEFAULT_BUDGETS,
    workers: int | None = None,
) -> ReductionBundle:
    """Solve the sentence as a conjunction of plain CSP instances, one per
    collapse pattern with at most r kept universals (2k+1 universals each)."""
    conditional = _check_witness_gate(witness, r, override)
    alt = normalize_alternating(s)
    sets = _index_sets(alt.n, r)
    sentences = [omega(alt, idx) for idx in sets]
    instances = [eliminate_universals(w, budgets) for w in sentences]

    def solve(inst: CspInstance) -> SolveVerdict:
        return solve_csp(inst, budgets)

    if workers:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            verdicts = list(pool.map(solve, instances))
    else:
        verdicts = [solve(inst) for inst in instances]
    members = tuple(
        BundleMember(idx, w, inst, v)
        for idx, w, inst, v in zip(sets, sentences, instances, verdicts)
    )
    combined = all(v.truth for v in verdicts)
    return ReductionBundle(s, r, members, combined, conditional)


def reduce_to_pi2(
    s: QuantifiedSentence,
    r: int,
    witness: SwitchabilityWitness | None = None,
    override: bool = False,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> QuantifiedSentence:
    """Equivalent forall*exists* sentence with at most |A| universals.

    Builds the collapse bundle, hoists each member's universals left, conjoins
    the members on a shared universal ladder with member-disjoint existentials,
    and shrinks the universal count.
    """
    _check_witness_gate(witness, r, override)
    alt = normalize_alternating(s)
    members = [move_universals_left(omega(alt, idx), budgets) for idx in _index_sets(alt.n, r)]

    shared_count = max(m.universal_count() for m in members)
    shared = [f"z$s{i}" for i in range(1, shared_count + 1)]
    prefix: list[tuple[str, str]] = [(FORALL, z) for z in shared]
    matrix = []
    for j, member in enumerate(members, start=1):
        cmap: dict[str, str] = {}
        for i, u in enumerate(member.universals()):
            cmap[u] = shared[i]
        for e in member.existentials():
            cmap[e] = f"{e}$c{j}"
        prefix.extend((EXISTS, cmap[e]) for e in member.existentials())
        matrix.extend(a.rename(cmap) for a in member.matrix)
    conjoined = QuantifiedSentence(tuple(prefix), tuple(matrix), s.language)
    check_wellformed(conjoined)
    out = reduce_universal_count(conjoined, budgets)
    if out.universal_count() > s.language.domain.size:
        raise AssertionError("universal-count reduction exceeded the domain size")
    return out


# ---------------------------------------------------------------------------
# tractability classification


@dataclass(frozen=True)
class ClassificationReport:
    verdict: str
    caveat: str
    wnu: OperationTable | None = None
    base_wnu: OperationTable | None = None
    searched_arities: tuple[int, ...] = ()
    searched_tables: int = 0

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "caveat": self.caveat,
            "searched_arities": list(self.searched_arities),
            "searched_tables": self.searched_tables,
        }
        if self.wnu is not None:
            out["wnu_table"] = {
                "arity": self.wnu.arity,
                "domain_size": self.wnu.domain.size,
                "table": list(self.wnu.table),
            }
        return out


def classify(
    lang: ConstraintLanguage,
    r: int,
    wnu_arity: int = 3,
    override: bool = False,
    witness: SwitchabilityWitness | None = None,
    max_witness_arity: int = 3,
    max_witness_power: int = 4,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> ClassificationReport:
    """Classify the quantified problem over the power language with columns.

    Searches weak near-unanimity operations over the base domain (complete for
    every table up to ``wnu_arity``), lifts any hit digitwise to the power
    domain, and verifies it there directly.  The negative answer is always
    bounded by the searched arities.
    """
    size = lang.domain.size
    budgets.check("power domain", size ** (size**size), budgets.max_power_domain)
    if witness is None:
        witness = switchability_witness(
            lang, r, max_arity=max_witness_arity, max_power=max_witness_power, budgets=budgets
        )
    if witness.verdict != WITNESSED and not override:
        return ClassificationReport(
            NOT_APPLICABLE,
            f"switchability check returned {witness.verdict!r}; classification needs a witness",
        )

    plang = build_power_language(lang, budgets)
    arities = tuple(range(2, wnu_arity + 1))
    searched = sum(size ** (size**m) for m in arities)
    base = None
    for m in arities:
        base = find_wnu(lang, m, budgets)
        if base is not None:
            break
    if base is None:
        return ClassificationReport(
            NP_COMPLETE_BOUNDED,
            f"no weak near-unanimity polymorphism up to arity {wnu_arity}; "
            "absence beyond this bound is not decided",
            searched_arities=arities,
            searched_tables=searched,
        )
    lifted = lift_operation(base, plang.power, budgets)
    if not is_wnu(lifted):
        raise AssertionError("digitwise lift lost the near-unanimity identities")
    for rel in plang.sorted_relations():
        if not preserves(lifted, rel, budgets):
            raise AssertionError(f"digitwise lift does not preserve {rel.name}")
    return ClassificationReport(
        P_TIME,
        f"witnessed by a verified arity-{base.arity} weak near-unanimity operation "
        "on the power domain",
        wnu=lifted,
        base_wnu=base,
        searched_arities=arities,
        searched_tables=searched,
    )
