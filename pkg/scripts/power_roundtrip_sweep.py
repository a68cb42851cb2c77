#!/usr/bin/env python3
"""Round-trip experiment for the power-domain translation at |A| = 2.

Random two-level sentences go to the 16-element power domain and back; random
instances over the power language (column conflicts included) come back as
sentences.  Both directions must match the exact truth value on every draw.
"""

import argparse
import random
import time

from qcsp import (
    Atom,
    ConstraintLanguage,
    CspInstance,
    QuantifiedSentence,
    Relation,
    build_power_language,
    oracle_qcsp,
    power_csp_to_qcsp,
    qcsp_to_power_csp,
    solve_csp,
    truth_of,
)

XOR0 = Relation("XOR0", 3, frozenset({(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)}))
NOT = Relation("NOT", 2, frozenset({(0, 1), (1, 0)}))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    lang = ConstraintLanguage.of(2, XOR0, NOT)
    plang = build_power_language(lang)
    rnd = random.Random(args.seed)
    start = time.time()
    failures = 0
    conflicts = 0

    for i in range(args.count):
        if rnd.random() < 0.5:
            nu = rnd.randint(0, 2)
            ne = rnd.randint(1, 3)
            names = [f"u{j}" for j in range(nu)] + [f"e{j}" for j in range(ne)]
            prefix = tuple(
                ("forall" if j < nu else "exists", names[j]) for j in range(len(names))
            )
            atoms = []
            for _ in range(rnd.randint(0, 3)):
                rel = rnd.choice(["XOR0", "NOT"])
                arity = lang.relations[rel].arity
                atoms.append(Atom(rel, tuple(rnd.choice(names) for _ in range(arity))))
            s = QuantifiedSentence(prefix, tuple(atoms), lang)
            truth = oracle_qcsp(s).truth
            inst = qcsp_to_power_csp(s)
            back = power_csp_to_qcsp(inst)
            if solve_csp(inst).truth != truth or truth_of(back) != truth:
                failures += 1
                print(f"FAIL forward at {i}: {s.prefix} {s.matrix}")
        else:
            names = ["p", "q", "w"]
            atoms = []
            for _ in range(rnd.randint(1, 4)):
                rel = rnd.choice(["XOR0", "NOT", "gamma$1", "gamma$2"])
                arity = plang.relations[rel].arity
                atoms.append(Atom(rel, tuple(rnd.choice(names) for _ in range(arity))))
            inst = CspInstance(plang, tuple(names), tuple(atoms))
            back = power_csp_to_qcsp(inst)
            if truth_of(back) != solve_csp(inst).truth:
                failures += 1
                print(f"FAIL backward at {i}: {atoms}")
            seen = {}
            for a in atoms:
                if a.relation.startswith("gamma$"):
                    idx = int(a.relation.split("$")[1])
                    if seen.setdefault(a.args[0], idx) != idx:
                        conflicts += 1
                        break

    elapsed = time.time() - start
    print(
        f"{args.count - failures}/{args.count} round trips exact "
        f"({conflicts} column-conflict draws), {elapsed:.1f}s"
    )
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    raise SystemExit(main())
