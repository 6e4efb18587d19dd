import random
import time

import pytest
import sympy

from tannakit.coherence import (
    ActionData,
    FreeProductAction,
    action_from_json,
    nat_identity,
    restriction_is_identity,
    verify_fp_associativity,
)
from tannakit.cli import load_fixture
from tannakit.semigroup import AbelianPresentation, FreeProduct, FreeProductWord, fp_multiply, fp_words_up_to

from generators import block_diagonal_data, identity_data, scalar_data

N1 = AbelianPresentation(1, ())
N2 = AbelianPresentation(2, ())
Z2 = AbelianPresentation(0, (2,))
NZ2 = AbelianPresentation(1, (2,))


def _named(doc, prefix):
    doc = dict(doc)
    doc["functors"] = [dict(f, name=f"{prefix}{k}") for k, f in enumerate(doc["functors"], start=1)]
    return doc


def build(pres_by_id, seed, family=block_diagonal_data):
    rng = random.Random(seed)
    factors, category = {}, None
    for fid, pres in pres_by_id.items():
        d = action_from_json(_named(family(pres, rng), fid))
        if category is None:
            category = d.category
        factors[fid] = ActionData(category, d.presentation, d.functors, d.exchange, d.torsion)
    fp = FreeProduct.of(pres_by_id)
    return FreeProductAction(fp, factors)


def fw(action, *blocks):
    return FreeProductWord(action.fp, tuple((fid, action.fp.presentation(fid).word(ex)) for fid, ex in blocks))


def _sym(block):
    return sympy.Matrix([[sympy.Rational(str(x)) for x in r] for r in block])


def _pad(comp):
    return sum(F.pad for F in comp)


class TestComposite:
    def test_identity_across_factors(self):
        A = build({"A": N2, "B": N1}, 1)
        f, g = fw(A, ("A", (1, 1))), fw(A, ("B", (2,)))
        c = A.c(f, g)
        assert c == nat_identity(A.T(f) + A.T(g), A.coeffs)
        assert c.tgt == A.T(fp_multiply(f, g))

    def test_same_factor_is_factor_c(self):
        A = build({"A": N2, "B": N1}, 2)
        f, g = fw(A, ("A", (0, 1))), fw(A, ("A", (1, 0)))
        assert A.c(f, g) == A.actions["A"].c(f.blocks[0][1], g.blocks[0][1])

    def test_whiskered_block_matrix(self):
        # c([b][a u], [a v][b]) = T(b) c_{u,v} T(b); with untwisted pads its
        # block is I (+) P (+) s*I
        A = build({"A": N2, "B": N1}, 3)
        f = fw(A, ("B", (1,)), ("A", (1, 0)))
        g = fw(A, ("A", (0, 1)), ("B", (1,)))
        inner = A.actions["A"].c(f.blocks[-1][1], g.blocks[0][1])
        left, right = A.T(fw(A, ("B", (1,)))), A.T(fw(A, ("B", (1,))))
        expected = sympy.diag(sympy.eye(_pad(left)), _sym(inner.block),
                              sympy.Rational(str(inner.scale)) * sympy.eye(_pad(right)))
        c = A.c(f, g)
        assert _sym(c.block) == expected
        assert c.scale == inner.scale

    def test_torsion_cascade_lands_in_product(self):
        A = build({"A": N1, "B": Z2}, 4)
        f = fw(A, ("A", (1,)), ("B", (1,)))
        g = fw(A, ("B", (1,)), ("A", (2,)))
        fg = fp_multiply(f, g)
        assert [fid for fid, _ in fg.blocks] == ["A"]
        c = A.c(f, g)
        assert c.src == A.T(f) + A.T(g) and c.tgt == A.T(fg)


class TestRestriction:
    @pytest.mark.parametrize("seed", range(3))
    def test_restriction_is_identity(self, seed):
        assert restriction_is_identity(build({"A": N2, "B": NZ2}, seed))

    def test_restriction_identity_data(self):
        assert restriction_is_identity(build({"A": N1, "B": Z2, "C": N1}, 5, identity_data))


class TestAssociativity:
    @pytest.mark.parametrize("pres_by_id,seed", [({"A": N1, "B": Z2}, 0), ({"A": N2, "B": N1}, 1),
                                                 ({"A": Z2, "B": Z2}, 2)])
    def test_holds_up_to_four_blocks(self, pres_by_id, seed):
        t = time.perf_counter()
        assert verify_fp_associativity(build(pres_by_id, seed, scalar_data), 4) == []
        assert time.perf_counter() - t < 60

    def test_bad_factor_propagates(self):
        rng = random.Random(0)
        bad = action_from_json(load_fixture("counterexample")["data"])
        other = action_from_json(_named(identity_data(N1, rng), "B"))
        factors = {"A": bad, "B": ActionData(bad.category, other.presentation, other.functors,
                                             other.exchange, other.torsion)}
        A = FreeProductAction(FreeProduct.of({"A": bad.presentation, "B": N1}), factors)
        assert verify_fp_associativity(A, 3, block_len=1, max_failures=1)


class TestValidation:
    def test_categories_must_be_shared(self):
        rng = random.Random(0)
        a = action_from_json(_named(identity_data(N1, rng), "A"))
        b = action_from_json(_named(identity_data(N1, rng), "B"))
        with pytest.raises(ValueError, match="category"):
            FreeProductAction(FreeProduct.of({"A": N1, "B": N1}), {"A": a, "B": b})

    def test_functor_names_distinct(self):
        rng = random.Random(0)
        a = action_from_json(_named(identity_data(N1, rng), "T"))
        b = action_from_json(_named(identity_data(N1, rng), "T"))
        b = ActionData(a.category, b.presentation, b.functors, b.exchange, b.torsion)
        with pytest.raises(ValueError, match="distinct"):
            FreeProductAction(FreeProduct.of({"A": N1, "B": N1}), {"A": a, "B": b})

    def test_one_action_per_factor(self):
        a = action_from_json(_named(identity_data(N1, random.Random(0)), "A"))
        with pytest.raises(ValueError):
            FreeProductAction(FreeProduct.of({"A": N1, "B": N1}), {"A": a})


def test_block_factors_up_to_four_blocks():
    A = build({"A": N2, "B": Z2, "C": N1}, 11)
    assert len(fp_words_up_to(A.fp, 4, 2)) > 500
    assert verify_fp_associativity(A, 4) == []
