#!/usr/bin/env python3
"""Randomized agreement experiment: exact oracle vs the collapse bundle.

Draws random quantified sentences over the affine language, solves each both
ways, and reports the agreement rate with timing.  Exits nonzero on any
disagreement.
"""

import argparse
import random
import time

from qcsp import (
    Atom,
    ConstraintLanguage,
    QuantifiedSentence,
    Relation,
    oracle_qcsp,
    reduce_pgp_to_csp,
    switchability_witness,
)

XOR0 = Relation("XOR0", 3, frozenset({(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)}))


def random_sentence(rnd, lang, max_vars, max_atoms):
    names = [f"v{i}" for i in range(rnd.randint(1, max_vars))]
    prefix = tuple((rnd.choice(["forall", "exists"]), v) for v in names)
    atoms = tuple(
        Atom("XOR0", tuple(rnd.choice(names) for _ in range(3)))
        for _ in range(rnd.randint(0, max_atoms))
    )
    return QuantifiedSentence(prefix, atoms, lang)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=200)
    parser.add_argument("--max-vars", type=int, default=8)
    parser.add_argument("--max-atoms", type=int, default=3)
    parser.add_argument("--r", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    lang = ConstraintLanguage.of(2, XOR0)
    witness = switchability_witness(lang, args.r, max_arity=3, max_power=4)
    print(f"witness at bound {args.r}: {witness.verdict}")
    if witness.verdict != "witnessed":
        print("no witness; aborting")
        return 2

    rnd = random.Random(args.seed)
    start = time.time()
    agree = 0
    true_count = 0
    instances = 0
    for i in range(args.count):
        s = random_sentence(rnd, lang, args.max_vars, args.max_atoms)
        truth = oracle_qcsp(s).truth
        bundle = reduce_pgp_to_csp(s, args.r, witness=witness)
        instances += len(bundle.members)
        true_count += truth
        if truth == bundle.combined:
            agree += 1
        else:
            print(f"DISAGREEMENT at sentence {i}: oracle={truth} bundle={bundle.combined}")
            print("  prefix:", s.prefix)
            print("  matrix:", s.matrix)
    elapsed = time.time() - start
    print(
        f"{agree}/{args.count} agree ({100.0 * agree / args.count:.1f}%), "
        f"{true_count} true, {instances} CSP instances solved, {elapsed:.1f}s"
    )
    return 0 if agree == args.count else 1


if __name__ == "__main__":
    raise SystemExit(main())
