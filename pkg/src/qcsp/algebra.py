"""Operations on the algebraic side: polymorphisms, coordinatewise closure,
switchability witnesses, and weak near-unanimity checks.

An operation table stores a total map A^m -> A in lexicographic argument
order.  Preservation, closure, and the witness computation are all bounded by
explicit budgets because their natural formulations are exponential.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Sequence

import numpy as np

from .budgets import DEFAULT_BUDGETS, Budgets
from .errors import BudgetError
from .model import (
    ConstraintLanguage,
    DomainSpec,
    Relation,
    decode_rank,
    encode_tuple,
    enumerate_switch_bounded,
)

WITNESSED = "witnessed"
REFUTED_AT_BOUNDS = "refuted-at-bounds"
INCONCLUSIVE = "inconclusive"

# below this many combination checks a plain Python loop beats array setup
_NUMPY_CUTOFF = 50_000


@dataclass(frozen=True)
class OperationTable:
    """A finite operation A^m -> A, outputs listed in lexicographic argument order."""

    arity: int
    domain: DomainSpec
    table: tuple[int, ...]

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("operation arity must be >= 1")
        expected = self.domain.size**self.arity
        table = tuple(self.table)
        if len(table) != expected:
            raise ValueError(f"table has {len(table)} entries, expected {expected}")
        if any(not (0 <= v < self.domain.size) for v in table):
            raise ValueError("table output out of domain range")
        object.__setattr__(self, "table", table)

    def apply(self, args: Sequence[int]) -> int:
        return self.table[encode_tuple(tuple(args), self.domain.size)]

    def sort_key(self) -> tuple:
        return (self.arity, self.table)


def table_from_function(dom: DomainSpec, arity: int, fn: Callable[..., int]) -> OperationTable:
    table = tuple(fn(*args) for args in product(dom.elements, repeat=arity))
    return OperationTable(arity, dom, table)


def projection_table(dom: DomainSpec, arity: int, position: int) -> OperationTable:
    return table_from_function(dom, arity, lambda *args: args[position])


def lift_operation(f: OperationTable, k: int, budgets: Budgets = DEFAULT_BUDGETS) -> OperationTable:
    """Apply ``f`` digitwise to k-digit encodings, giving an operation on A^k."""
    size = f.domain.size
    power_size = size**k
    budgets.check("power domain for lifted operation", power_size, budgets.max_power_domain)
    budgets.check("lifted operation table", power_size**f.arity, budgets.max_op_tables)
    pdom = DomainSpec(power_size)
    table = []
    for combo in product(range(power_size), repeat=f.arity):
        digits = [decode_rank(e, size, k) for e in combo]
        out = tuple(f.apply(tuple(d[i] for d in digits)) for i in range(k))
        table.append(encode_tuple(out, size))
    return OperationTable(f.arity, pdom, tuple(table))


# ---------------------------------------------------------------------------
# preservation


def _preserves_python(f: OperationTable, tuples: list[tuple[int, ...]], member: frozenset) -> bool:
    size = f.domain.size
    table = f.table
    arity = len(tuples[0])
    for combo in product(tuples, repeat=f.arity):
        out = []
        for j in range(arity):
            idx = 0
            for t in combo:
                idx = idx * size + t[j]
            out.append(table[idx])
        if tuple(out) not in member:
            return False
    return True


def _preserves_numpy(
    f: OperationTable, tuples: list[tuple[int, ...]], budgets: Budgets
) -> bool:
    size = f.domain.size
    m = f.arity
    t = len(tuples)
    arity = len(tuples[0])
    cells = (t**m) * arity
    budgets.check("preservation check cells", cells, budgets.max_preserve_cells)
    arr = np.asarray(tuples, dtype=np.int64)
    f_nd = np.asarray(f.table, dtype=np.int64).reshape((size,) * m)
    views = []
    for i in range(m):
        shape = [1] * m + [arity]
        shape[i] = t
        views.append(arr.reshape(shape))
    out = f_nd[tuple(views)]  # shape (t,)*m + (arity,)
    pows = size ** np.arange(arity - 1, -1, -1, dtype=np.int64)
    codes = out.reshape(-1, arity) @ pows
    rel_codes = arr @ pows
    return bool(np.isin(codes, rel_codes).all())


def preserves(f: OperationTable, rel: Relation, budgets: Budgets = DEFAULT_BUDGETS) -> bool:
    """True iff applying ``f`` coordinatewise to any tuples of ``rel`` stays in ``rel``."""
    for t in rel.tuples:
        for v in t:
            if not (0 <= v < f.domain.size):
                raise ValueError(
                    f"relation {rel.name} has element {v} outside the operation domain"
                )
    if not rel.tuples or rel.arity == 0:
        return True
    tuples = rel.sorted_tuples()
    if len(tuples) ** f.arity * rel.arity <= _NUMPY_CUTOFF:
        return _preserves_python(f, tuples, rel.tuples)
    return _preserves_numpy(f, tuples, budgets)


def polymorphisms(
    lang: ConstraintLanguage, m: int, budgets: Budgets = DEFAULT_BUDGETS
) -> tuple[OperationTable, ...]:
    """All arity-m operations preserving every relation of the language."""
    size = lang.domain.size
    space = size ** (size**m)
    budgets.check(f"arity-{m} operation enumeration", space, budgets.max_op_tables)
    rels = lang.sorted_relations()
    found = []
    for table in product(range(size), repeat=size**m):
        f = OperationTable(m, lang.domain, table)
        if all(preserves(f, r, budgets) for r in rels):
            found.append(f)
    return tuple(found)


# ---------------------------------------------------------------------------
# coordinatewise closure


def generate_closure(
    seeds: Iterable[tuple[int, ...]],
    ops: Iterable[OperationTable],
    n: int,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> frozenset[tuple[int, ...]]:
    """Least superset of ``seeds`` closed under coordinatewise application of ``ops``.

    Breadth-first over a frontier with a bitset membership index over A^n;
    deterministic regardless of the input iteration order.
    """
    ops = sorted(set(ops), key=OperationTable.sort_key)
    members = sorted(set(tuple(s) for s in seeds))
    for s in members:
        if len(s) != n:
            raise ValueError(f"seed {s} does not have length {n}")
    if not ops:
        return frozenset(members)
    dom = ops[0].domain
    size = dom.size
    for f in ops:
        if f.domain != dom:
            raise ValueError("operations drawn from different domains")
    total = size**n
    budgets.check("closure membership index", total, budgets.max_power_rank)
    for s in members:
        if any(not (0 <= v < size) for v in s):
            raise ValueError(f"seed {s} out of domain range")

    bits = bytearray((total + 7) // 8)

    def mark(rank: int) -> None:
        bits[rank >> 3] |= 1 << (rank & 7)

    def seen(rank: int) -> bool:
        return bool(bits[rank >> 3] & (1 << (rank & 7)))

    for s in members:
        mark(encode_tuple(s, size))
    budgets.check("closure size", len(members), budgets.max_closure_points)

    frontier_start = 0
    while frontier_start < len(members):
        snapshot = len(members)
        for f in ops:
            m = f.arity
            table = f.table
            for combo in product(range(snapshot), repeat=m):
                if max(combo) < frontier_start:
                    continue
                args = [members[i] for i in combo]
                out = []
                for j in range(n):
                    idx = 0
                    for t in args:
                        idx = idx * size + t[j]
                    out.append(table[idx])
                rank = encode_tuple(tuple(out), size)
                if not seen(rank):
                    mark(rank)
                    members.append(tuple(out))
                    budgets.check("closure size", len(members), budgets.max_closure_points)
        frontier_start = snapshot
    return frozenset(members)


# ---------------------------------------------------------------------------
# switchability witnesses


@dataclass(frozen=True)
class SwitchabilityWitness:
    """Evidence that switch-bounded tuples generate A^n at the checked powers.

    ``witnessed`` is sound for the checked powers: any superset of the found
    operations generates a superset.  ``refuted-at-bounds`` only refutes
    generation by the operations found within the arity bound.
    """

    r: int
    operations: tuple[OperationTable, ...]
    powers: tuple[tuple[int, bool], ...]
    verdict: str

    def __post_init__(self):
        if self.verdict == WITNESSED and not all(g for _, g in self.powers):
            raise ValueError("witnessed verdict with a failed power")

    def arities_used(self) -> list[int]:
        return sorted({f.arity for f in self.operations})

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "arities_used": self.arities_used(),
            "powers": [{"n": n, "generated": g} for n, g in self.powers],
            "verdict": self.verdict,
        }


def switchability_witness(
    lang: ConstraintLanguage,
    r: int,
    max_arity: int = 3,
    max_power: int = 4,
    budgets: Budgets = DEFAULT_BUDGETS,
    workers: int | None = None,
) -> SwitchabilityWitness:
    """Check whether tuples with at most ``r`` switches generate A^n for n up to
    ``max_power`` under the polymorphisms of arity up to ``max_arity``."""
    size = lang.domain.size
    for m in range(1, max_arity + 1):
        budgets.check(
            f"arity-{m} operation enumeration", size ** (size**m), budgets.max_op_tables
        )
    budgets.check("closure membership index", size**max_power, budgets.max_power_rank)

    ops: list[OperationTable] = []
    for m in range(1, max_arity + 1):
        ops.extend(polymorphisms(lang, m, budgets))
    ops_t = tuple(ops)

    def check(n: int) -> tuple[int, bool]:
        seeds = enumerate_switch_bounded(n, r, lang.domain)
        closed = generate_closure(seeds, ops_t, n, budgets)
        return (n, len(closed) == size**n)

    ns = list(range(2, max_power + 1))
    powers: list[tuple[int, bool]] = []
    exhausted = False
    if workers:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(check, n) for n in ns]
            for f in futures:
                try:
                    powers.append(f.result())
                except BudgetError:
                    exhausted = True
                    break
    else:
        for n in ns:
            try:
                powers.append(check(n))
            except BudgetError:
                exhausted = True
                break

    if any(not g for _, g in powers):
        verdict = REFUTED_AT_BOUNDS
    elif exhausted or len(powers) < len(ns):
        verdict = INCONCLUSIVE
    else:
        verdict = WITNESSED
    return SwitchabilityWitness(r, ops_t, tuple(powers), verdict)


# ---------------------------------------------------------------------------
# weak near-unanimity


def is_wnu(f: OperationTable) -> bool:
    """Idempotent and equal on all one-off argument patterns f(y,x,..,x) etc."""
    if f.arity < 2:
        raise ValueError("weak near-unanimity needs arity >= 2")
    size = f.domain.size
    for x in range(size):
        if f.apply((x,) * f.arity) != x:
            return False
    for x in range(size):
        for y in range(size):
            base = [x] * f.arity
            vals = set()
            for pos in range(f.arity):
                args = list(base)
                args[pos] = y
                vals.add(f.apply(args))
            if len(vals) != 1:
                return False
    return True


def _wnu_slots(size: int, m: int) -> tuple[dict[tuple[int, ...], int], list]:
    """Fixed entries plus shared value slots for the candidate tables.

    Idempotence pins the diagonal; the one-off symmetry shares a single slot
    per (repeated value, odd value) pattern.  Everything else is free.
    """
    fixed: dict[tuple[int, ...], int] = {}
    slot_of: dict[tuple[int, ...], int] = {}
    keys: dict[object, int] = {}
    for args in product(range(size), repeat=m):
        vals = set(args)
        if len(vals) == 1:
            fixed[args] = args[0]
            continue
        key: object = None
        if len(vals) == 2:
            a, b = sorted(vals)
            ca = args.count(a)
            if m == 2:
                key = ("pair", a, b)
            elif ca == m - 1:
                key = ("oneoff", a, b)
            elif ca == 1:
                key = ("oneoff", b, a)
        if key is None:
            key = ("free", args)
        if key not in keys:
            keys[key] = len(keys)
        slot_of[args] = keys[key]
    return {**fixed}, [slot_of]


def find_wnu(
    lang: ConstraintLanguage, m: int, budgets: Budgets = DEFAULT_BUDGETS
) -> OperationTable | None:
    """First arity-m weak near-unanimity polymorphism of the language, if any.

    Enumerates only idempotent tables already satisfying the one-off symmetry,
    which covers the full size**(size**m) table space.
    """
    if m < 2:
        raise ValueError("weak near-unanimity needs arity >= 2")
    size = lang.domain.size
    fixed, (slot_of,) = _wnu_slots(size, m)
    n_slots = max(slot_of.values()) + 1 if slot_of else 0
    budgets.check(f"arity-{m} symmetric-table enumeration", size**n_slots, budgets.max_op_tables)
    args_list = list(product(range(size), repeat=m))
    rels = lang.sorted_relations()
    for assignment in product(range(size), repeat=n_slots):
        table = tuple(
            fixed[args] if args in fixed else assignment[slot_of[args]] for args in args_list
        )
        f = OperationTable(m, lang.domain, table)
        if all(preserves(f, r, budgets) for r in rels):
            return f
    return None
