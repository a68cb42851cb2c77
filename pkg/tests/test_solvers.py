import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcsp import (
    Atom,
    BudgetError,
    Budgets,
    ConstraintLanguage,
    CspInstance,
    QuantifiedSentence,
    Relation,
    WitnessRequiredError,
    classify,
    is_wnu,
    oracle_qcsp,
    preserves,
    reduce_pgp_to_csp,
    reduce_to_pi2,
    solve_csp,
    switchability_witness,
)
from qcsp.solvers import pi2_truth
from helpers import (
    NOT,
    lang_mixed2,
    random_pi2,
    random_sentence,
    sat_by_enumeration,
)


def sent(lang, prefix, atoms):
    return QuantifiedSentence(tuple(prefix), tuple(atoms), lang)


# ---------------------------------------------------------------------------
# oracle


def test_oracle_forall_exists_not(mixed_lang):
    s = sent(mixed_lang, [("forall", "x"), ("exists", "y")], [Atom("NOT", ("x", "y"))])
    assert oracle_qcsp(s).truth is True


def test_oracle_exists_forall_not(mixed_lang):
    s = sent(mixed_lang, [("exists", "y"), ("forall", "x")], [Atom("NOT", ("x", "y"))])
    assert oracle_qcsp(s).truth is False


def test_oracle_affine_pi2(xor0_lang):
    s = sent(
        xor0_lang,
        [("forall", "x1"), ("forall", "x2"), ("exists", "y")],
        [Atom("XOR0", ("x1", "x2", "y"))],
    )
    assert oracle_qcsp(s).truth is True


def test_oracle_empty_matrix_is_true(mixed_lang):
    assert oracle_qcsp(sent(mixed_lang, [("forall", "x")], [])).truth is True


def test_oracle_budget(mixed_lang):
    names = [f"v{i}" for i in range(30)]
    atoms = [Atom("XOR0", (names[i], names[i + 1], names[i + 2])) for i in range(0, 27, 3)]
    s = sent(mixed_lang, [("forall", v) for v in names], atoms)
    with pytest.raises(BudgetError):
        oracle_qcsp(s)


def test_oracle_skips_unconstrained_variables(mixed_lang):
    # thirty unused universals on top of a satisfiable core stay cheap and exact
    prefix = [("forall", f"pad{i}") for i in range(30)] + [("forall", "x"), ("exists", "y")]
    s = sent(mixed_lang, prefix, [Atom("NOT", ("x", "y"))])
    verdict = oracle_qcsp(s)
    assert verdict.truth is True
    assert verdict.stats["nodes"] <= 8


def test_oracle_rejects_invalid(mixed_lang):
    s = sent(mixed_lang, [], [Atom("NOT", ("a", "b"))])
    with pytest.raises(ValueError):
        oracle_qcsp(s)


# ---------------------------------------------------------------------------
# CSP solver


def test_solve_empty_relation_unsat(mixed_lang):
    lang = ConstraintLanguage.of(2, Relation("E", 1, frozenset()), NOT)
    inst = CspInstance(lang, ("x",), (Atom("E", ("x",)),))
    assert solve_csp(inst).truth is False


def test_solve_zero_atoms_empty_witness(mixed_lang):
    inst = CspInstance(mixed_lang, ("x", "y"), ())
    verdict = solve_csp(inst)
    assert verdict.truth and verdict.witness == {}


def test_solve_witness_satisfies_atoms(mixed_lang):
    inst = CspInstance(
        mixed_lang,
        ("a", "b", "c"),
        (Atom("XOR0", ("a", "b", "c")), Atom("NOT", ("a", "b"))),
    )
    verdict = solve_csp(inst)
    assert verdict.truth
    w = verdict.witness
    assert (w["a"] + w["b"] + w["c"]) % 2 == 0
    assert w["a"] != w["b"]


@given(st.data())
@settings(max_examples=80, deadline=None)
def test_solve_agrees_with_enumeration(data):
    lang = lang_mixed2()
    nv = data.draw(st.integers(min_value=1, max_value=6))
    names = [f"v{i}" for i in range(nv)]
    n_atoms = data.draw(st.integers(min_value=0, max_value=5))
    atoms = []
    for _ in range(n_atoms):
        rel = data.draw(st.sampled_from(sorted(lang.relations)))
        arity = lang.relations[rel].arity
        atoms.append(Atom(rel, tuple(data.draw(st.sampled_from(names)) for _ in range(arity))))
    inst = CspInstance(lang, tuple(names), tuple(atoms))
    assert solve_csp(inst).truth == sat_by_enumeration(inst)


def test_solve_agrees_with_enumeration_twelve_vars():
    rnd = random.Random(47)
    lang = lang_mixed2()
    names = [f"v{i:02d}" for i in range(12)]
    for _ in range(40):
        atoms = tuple(
            Atom("XOR0", tuple(rnd.choice(names) for _ in range(3)))
            if rnd.random() < 0.5
            else Atom("NOT", tuple(rnd.choice(names) for _ in range(2)))
            for _ in range(rnd.randint(1, 6))
        )
        inst = CspInstance(lang, tuple(names), atoms)
        assert solve_csp(inst).truth == sat_by_enumeration(inst)


def test_oracle_self_consistency(mixed_lang):
    # a purely existential sentence is just CSP satisfiability
    rnd = random.Random(53)
    for _ in range(80):
        s = random_pi2(rnd, mixed_lang, max_univ=0, max_exist=4, max_atoms=3)
        inst = CspInstance(mixed_lang, tuple(s.prefix_variables()), s.matrix)
        assert oracle_qcsp(s).truth == solve_csp(inst).truth


# ---------------------------------------------------------------------------
# bundle reduction


@pytest.fixture(scope="module")
def xor0_witness():
    from helpers import lang_xor0

    return switchability_witness(lang_xor0(), 2, max_arity=3, max_power=4)


def test_bundle_member_count(xor0_lang, xor0_witness):
    s = sent(
        xor0_lang,
        [("exists", "y1"), ("forall", "x1"), ("exists", "y2"), ("forall", "x2"),
         ("exists", "y3"), ("forall", "x3")],
        [Atom("XOR0", ("y1", "x1", "x3"))],
    )
    bundle = reduce_pgp_to_csp(s, 2, witness=xor0_witness)
    assert len(bundle.members) == 1 + 3 + 3
    assert [m.indices for m in bundle.members] == [
        (), (1,), (2,), (3,), (1, 2), (1, 3), (2, 3),
    ]
    assert bundle.combined == all(m.verdict.truth for m in bundle.members)


def test_bundle_r0_single_member(xor0_lang, xor0_witness):
    w0 = switchability_witness(xor0_lang, 0, max_arity=2, max_power=2)
    s = sent(xor0_lang, [("exists", "y")], [Atom("XOR0", ("y", "y", "y"))])
    bundle = reduce_pgp_to_csp(s, 0, witness=w0, override=True)
    assert len(bundle.members) == 1
    assert bundle.members[0].indices == ()
    assert bundle.members[0].sentence.universal_count() == 1


def test_bundle_requires_witness(xor0_lang):
    s = sent(xor0_lang, [("forall", "x"), ("exists", "y")], [Atom("XOR0", ("x", "x", "y"))])
    with pytest.raises(WitnessRequiredError):
        reduce_pgp_to_csp(s, 2)
    refuted = switchability_witness(xor0_lang, 0, max_arity=3, max_power=3)
    with pytest.raises(WitnessRequiredError):
        reduce_pgp_to_csp(s, 0, witness=refuted)
    bundle = reduce_pgp_to_csp(s, 0, witness=refuted, override=True)
    assert bundle.conditional is True


def test_override_on_unswitchable_language_goes_wrong_but_says_so():
    # weakening flips truth here, so the conditional bundle answers wrongly;
    # this is exactly what the witness gate exists to flag
    lang = ConstraintLanguage.of(2, NOT)
    refuted = switchability_witness(lang, 0, max_arity=3, max_power=3)
    assert refuted.verdict == "refuted-at-bounds"
    s = sent(lang, [("exists", "y"), ("forall", "x")], [Atom("NOT", ("x", "y"))])
    assert oracle_qcsp(s).truth is False
    bundle = reduce_pgp_to_csp(s, 0, witness=refuted, override=True)
    assert bundle.conditional is True
    assert bundle.combined is True  # disagrees with the oracle, as flagged


def test_bundle_lower_witness_bound_accepted(xor0_lang, xor0_witness):
    s = sent(xor0_lang, [("forall", "x"), ("exists", "y")], [Atom("XOR0", ("x", "x", "y"))])
    bundle = reduce_pgp_to_csp(s, 3, witness=xor0_witness)
    assert bundle.conditional is False


def test_bundle_matches_oracle_random(xor0_lang, xor0_witness):
    rnd = random.Random(59)
    for _ in range(120):
        s = random_sentence(rnd, xor0_lang, max_vars=6, max_atoms=2)
        bundle = reduce_pgp_to_csp(s, 2, witness=xor0_witness)
        assert bundle.combined == oracle_qcsp(s).truth


def test_bundle_parallel_matches_serial(xor0_lang, xor0_witness):
    rnd = random.Random(61)
    for _ in range(10):
        s = random_sentence(rnd, xor0_lang, max_vars=5, max_atoms=2)
        serial = reduce_pgp_to_csp(s, 2, witness=xor0_witness)
        parallel = reduce_pgp_to_csp(s, 2, witness=xor0_witness, workers=4)
        assert json.dumps(serial.to_json(), sort_keys=True) == json.dumps(
            parallel.to_json(), sort_keys=True
        )


def test_bundle_json_lists_members(xor0_lang, xor0_witness):
    s = sent(xor0_lang, [("forall", "x"), ("exists", "y")], [Atom("XOR0", ("x", "x", "y"))])
    data = reduce_pgp_to_csp(s, 2, witness=xor0_witness).to_json()
    assert {"r", "combined", "conditional", "members", "instances_solved"} <= set(data)
    assert all({"indices", "satisfiable", "nodes"} <= set(m) for m in data["members"])


# ---------------------------------------------------------------------------
# reduction to two quantifier levels


def test_pi2_universal_bound(xor0_lang, xor0_witness):
    rnd = random.Random(67)
    roomy = Budgets(max_prefix_vars=1 << 18, max_matrix_atoms=1 << 20)
    for _ in range(20):
        s = random_sentence(rnd, xor0_lang, max_vars=4, max_atoms=1)
        out = reduce_to_pi2(s, 2, witness=xor0_witness, budgets=roomy)
        assert out.is_pi2()
        assert out.universal_count() <= xor0_lang.domain.size


def test_pi2_matches_oracle(xor0_lang, xor0_witness):
    rnd = random.Random(71)
    for _ in range(25):
        s = random_sentence(rnd, xor0_lang, max_vars=3, max_atoms=1)
        out = reduce_to_pi2(s, 2, witness=xor0_witness)
        assert pi2_truth(out) == oracle_qcsp(s).truth


def test_pi2_on_pi2_input(xor0_lang, xor0_witness):
    # already two quantifier levels with few enough universals: truth unchanged
    s = sent(xor0_lang, [("forall", "x"), ("exists", "y")], [Atom("XOR0", ("x", "x", "y"))])
    out = reduce_to_pi2(s, 2, witness=xor0_witness)
    assert oracle_qcsp(s).truth is True
    assert pi2_truth(out) is True
    unsat = sent(xor0_lang, [("forall", "x"), ("exists", "y")], [Atom("XOR0", ("x", "y", "y"))])
    assert oracle_qcsp(unsat).truth is False
    assert pi2_truth(reduce_to_pi2(unsat, 2, witness=xor0_witness)) is False


# ---------------------------------------------------------------------------
# classification


def test_classify_affine_is_tractable(xor0_lang):
    report = classify(xor0_lang, 2, wnu_arity=3)
    assert report.verdict == "P"
    f = report.wnu
    assert f.domain.size == 16
    assert is_wnu(f)
    plang_rels = report  # sanity: table preserves the powered relation and both columns
    from qcsp import build_power_language

    plang = build_power_language(xor0_lang)
    assert preserves(f, plang.relations["XOR0"])
    assert preserves(f, plang.relations["gamma$1"])
    assert preserves(f, plang.relations["gamma$2"])
    # the exhibited operation is digitwise minority: xor of the three codes
    for a, b, c in [(1, 2, 4), (15, 3, 5), (9, 9, 2)]:
        assert f.apply((a, b, c)) == a ^ b ^ c


def test_classify_without_witness_not_applicable(one_in_three_lang):
    report = classify(one_in_three_lang, 1, wnu_arity=3)
    assert report.verdict == "not-applicable"


def test_classify_one_in_three_override(one_in_three_lang):
    report = classify(one_in_three_lang, 2, wnu_arity=3, override=True)
    assert report.verdict == "NP-complete-modulo-arity-bound"
    assert "arity" in report.caveat
    assert report.searched_tables == 2**4 + 2**8  # complete through the 256-table space


def test_classify_refuses_dom3(dom3_lang):
    with pytest.raises(BudgetError) as err:
        classify(dom3_lang, 2)
    assert err.value.required == 3**27


def test_classify_json_keys(xor0_lang):
    data = classify(xor0_lang, 2).to_json()
    assert {"verdict", "caveat", "searched_arities", "searched_tables"} <= set(data)
    assert "wnu_table" in data
    assert data["wnu_table"]["domain_size"] == 16
