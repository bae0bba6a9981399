"""Parser round trips, precedence, and brute-force evaluation semantics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zolab.errors import (
    FormulaSyntaxError,
    UnassignedFreeVariable,
    UnboundVariable,
    WorkBudgetExceeded,
)
from zolab.folang import (
    And,
    Color,
    DistGt,
    Eq,
    Exists,
    Forall,
    Iff,
    Implies,
    Not,
    Or,
    Rel,
    check_sentence,
    color_swap,
    evaluate,
    free_variables,
    parse,
    to_text,
)
from zolab.grid import Pixel, TorusGeometry
from zolab.image import Image, SampleSpec, sample

TAUT_1 = "forall x. forall y. forall z. (R(x,y) & U(y,z)) -> D1(x,z)"
TAUT_2 = "forall x. forall z. (exists y. (R(x,y) & U(y,z))) <-> D1(x,z)"


# --- parsing ---------------------------------------------------------------

def test_parse_examples():
    assert parse("exists x. C(x)") == Exists("x", Color("x"))
    assert parse(TAUT_1) == Forall(
        "x",
        Forall(
            "y",
            Forall("z", Implies(And(Rel("R", "x", "y"), Rel("U", "y", "z")), Rel("D1", "x", "z"))),
        ),
    )
    assert parse("x = y") == Eq("x", "y")
    assert parse("dist>(x,y,3)") == DistGt("x", "y", 3)
    assert parse("not C(x)") == parse("!C(x)") == Not(Color("x"))


def test_precedence_and_associativity():
    assert parse("C(x) & C(y) | C(z)") == Or(And(Color("x"), Color("y")), Color("z"))
    assert parse("!C(x) & C(y)") == And(Not(Color("x")), Color("y"))
    # -> and <-> associate right, & and | left
    assert parse("C(x) -> C(y) -> C(z)") == Implies(Color("x"), Implies(Color("y"), Color("z")))
    assert parse("C(x) <-> C(y) <-> C(z)") == Iff(Color("x"), Iff(Color("y"), Color("z")))
    assert parse("C(x) & C(y) & C(z)") == And(And(Color("x"), Color("y")), Color("z"))
    # quantifier body extends maximally rightward
    assert parse("exists x. C(x) & C(x)") == Exists("x", And(Color("x"), Color("x")))


def test_comments_are_ignored():
    text = "exists x. # a witness\n  C(x)  # black\n"
    assert parse(text) == Exists("x", Color("x"))


@pytest.mark.parametrize(
    "bad",
    ["", "exists x C(x)", "C(x", "C()", "x =", "dist>(x,y)", "forall C. C(C)",
     "C(x) &", "(C(x)", "exists x. @", "R(x)"],
)
def test_syntax_errors_carry_positions(bad):
    with pytest.raises(FormulaSyntaxError) as err:
        parse(bad)
    assert err.value.position >= 0


def test_well_formedness_check():
    with pytest.raises(UnboundVariable):
        check_sentence(parse("exists x. C(y)"))
    check_sentence(parse("exists y. C(y)"))
    assert free_variables(parse("exists y. (R(x,y) & C(y))")) == {"x"}


# --- printer round trip ----------------------------------------------------

_VARS = st.sampled_from(["x", "y", "z", "w"])


def _formulas():
    atoms = st.one_of(
        st.builds(Color, _VARS),
        st.builds(Rel, st.sampled_from(["U", "R", "D1", "D2"]), _VARS, _VARS),
        st.builds(Eq, _VARS, _VARS),
        st.builds(DistGt, _VARS, _VARS, st.integers(0, 4)),
    )
    return st.recursive(
        atoms,
        lambda sub: st.one_of(
            st.builds(Not, sub),
            st.builds(And, sub, sub),
            st.builds(Or, sub, sub),
            st.builds(Implies, sub, sub),
            st.builds(Iff, sub, sub),
            st.builds(Forall, _VARS, sub),
            st.builds(Exists, _VARS, sub),
        ),
        max_leaves=12,
    )


@given(_formulas())
@settings(max_examples=300)
def test_print_parse_round_trip(f):
    assert parse(to_text(f)) == f


# --- evaluation ------------------------------------------------------------

def test_both_section_tautologies_hold_on_random_images():
    taut1, taut2 = parse(TAUT_1), parse(TAUT_2)
    for seed in range(12):
        img = sample(SampleSpec(3 + seed % 4, 0.5, seed))
        assert evaluate(img, taut1)
        assert evaluate(img, taut2)


def test_exists_black_pixel():
    f = parse("exists x. C(x)")
    assert not evaluate(Image.solid(4, 0), f)
    pix = np.zeros((4, 4), dtype=np.uint8)
    pix[1, 2] = 1
    assert evaluate(Image(pix), f)


def test_atom_semantics_on_torus():
    img = Image.solid(3, 0)
    assert evaluate(img, parse("R(x,y)"), {"x": (2, 1), "y": (0, 1)})
    assert evaluate(img, parse("U(x,y)"), {"x": (1, 2), "y": (1, 0)})
    assert evaluate(img, parse("D1(x,y)"), {"x": (2, 2), "y": (0, 0)})
    assert evaluate(img, parse("D2(x,y)"), {"x": (0, 0), "y": (1, 2)})
    assert not evaluate(img, parse("R(x,y)"), {"x": (0, 0), "y": (0, 1)})
    assert evaluate(img, parse("x = y"), {"x": (1, 1), "y": (1, 1)})


@given(st.integers(2, 7), st.tuples(st.integers(0, 6), st.integers(0, 6)),
       st.tuples(st.integers(0, 6), st.integers(0, 6)), st.integers(0, 5))
@settings(max_examples=100)
def test_dist_gt_matches_grid_distance(n, a, b, bound):
    x = Pixel(a[0] % n, a[1] % n)
    y = Pixel(b[0] % n, b[1] % n)
    img = Image.solid(n, 0)
    expected = TorusGeometry(n).distance(x, y) > bound
    assert evaluate(img, DistGt("x", "y", bound), {"x": x, "y": y}) == expected


@given(_formulas(), st.integers(0, 500))
@settings(max_examples=60, deadline=None)
def test_quantifier_negation_duality(f, seed):
    img = sample(SampleSpec(3, 0.5, seed))
    body = f
    assignment = {v: (0, 0) for v in free_variables(body) - {"q"}}
    left = evaluate(img, Not(Forall("q", body)), assignment)
    right = evaluate(img, Exists("q", Not(body)), assignment)
    assert left == right


def test_domain_restriction_defaults_to_full_set():
    f = parse("forall x. exists y. (R(x,y) & !C(y))")
    for seed in range(5):
        img = sample(SampleSpec(4, 0.3, seed))
        full = [(r, c) for r in range(4) for c in range(4)]
        assert evaluate(img, f) == evaluate(img, f, domain=full)


def test_domain_restriction_limits_quantifiers():
    pix = np.zeros((4, 4), dtype=np.uint8)
    pix[0, 1] = 1
    img = Image(pix)
    f = parse("exists x. C(x)")
    assert evaluate(img, f, domain=[(0, 1), (2, 2)])
    assert not evaluate(img, f, domain=[(0, 0), (2, 2)])


def test_relations_stay_global_under_domain_restriction():
    # the witness relation leaves the domain, but atoms use torus arithmetic
    img = Image.solid(4, 1)
    f = parse("exists y. R(x,y)")
    assert evaluate(img, f, {"x": (0, 0)}, domain=[(0, 0), (1, 0)])
    assert not evaluate(img, f, {"x": (1, 0)}, domain=[(0, 0), (1, 0)])


def test_assignment_errors():
    img = Image.solid(3, 0)
    with pytest.raises(UnassignedFreeVariable):
        evaluate(img, parse("C(x)"))
    with pytest.raises(UnassignedFreeVariable):
        evaluate(img, parse("C(x)"), {"x": (0, 0)}, domain=[(1, 1)])


def test_work_budget_is_enforced():
    img = Image.solid(6, 0)
    f = parse("forall x. forall y. forall z. !C(x) | !C(y) | !C(z)")
    with pytest.raises(WorkBudgetExceeded):
        evaluate(img, f, work_budget=100)
    assert evaluate(img, parse("forall x. x = x"), work_budget=100)


def test_color_swap():
    f = parse("exists x. (C(x) & exists y. (R(x,y) & !C(y)))")
    swapped = color_swap(f)
    assert swapped == parse("exists x. (!C(x) & exists y. (R(x,y) & !!C(y)))")
    pix = np.zeros((4, 4), dtype=np.uint8)
    pix[1, 1] = 1
    img = Image(pix)
    assert evaluate(img, f) == evaluate(Image(1 - pix), swapped)


def test_variable_shadowing_restores_bindings():
    # inner exists rebinds x; the outer binding must be visible afterwards
    f = parse("exists x. ((exists x. !C(x)) & C(x))")
    pix = np.zeros((3, 3), dtype=np.uint8)
    pix[2, 2] = 1
    assert evaluate(Image(pix), f)
    assert not evaluate(Image.solid(3, 0), f)
