import random
import time

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from tannakit.hopf import (
    BasisTooLarge,
    Comodule,
    Filtration,
    GLnDiffHopf,
    GPoly,
    L_filtration,
    comodule_axioms,
    comodule_constructions,
    comodule_dual,
    comodule_sum,
    comodule_tensor,
    det_comodule,
    gpoly_apply,
    ind_key,
    merge_sides,
    normalize,
    ord_,
    parse_ind_key,
    standard_comodule,
    trivial_comodule,
    twist_comodule,
)
from tannakit.semigroup import AbelianPresentation, PresentationMismatch, Word, multiply, word_length, words_up_to

N = AbelianPresentation(1, ())
N2 = AbelianPresentation(2, ())
Z2 = AbelianPresentation(0, (2,))
Z3 = AbelianPresentation(0, (3,))
NZ2 = AbelianPresentation(1, (2,))


def random_gpoly(rng, pres, max_len=2, degree=2, terms=3, kinds=("x",), n=2, with_D=False):
    words = [tuple(w.exps) for w in words_up_to(pres, max_len)]
    gens = []
    for w in words:
        if "x" in kinds:
            gens += [GPoly.x(pres, i, j, w) for i in range(1, n + 1) for j in range(1, n + 1)]
        if "y" in kinds:
            gens += [GPoly.y(pres, i, w) for i in (1, 2, 3)]
        if with_D:
            gens.append(GPoly.D(pres, w))
    f = GPoly(pres)
    for _ in range(terms):
        t = GPoly.const(pres, mpq(rng.randint(-3, 3), rng.randint(1, 3)))
        for _ in range(rng.randint(0, degree)):
            t = t * rng.choice(gens)
        f = f + t
    return f


# sympy mirror: every indeterminate becomes a symbol, D_w becomes 1/det(X_w)

def _symbol(k):
    side, kind, idx, w = k
    return sympy.Symbol(f"{kind}{''.join(map(str, idx))}_s{side}_w{'_'.join(map(str, w))}")


def to_sym(f, n):
    out = sympy.Integer(0)
    for m, c in f.terms.items():
        term = sympy.Rational(int(c.numerator), int(c.denominator))
        for k, e in m:
            if k[1] == "D":
                X = sympy.Matrix(n, n, lambda i, j: _symbol((k[0], "x", (i + 1, j + 1), k[3])))
                term *= X.det() ** (-e)
            else:
                term *= _symbol(k) ** e
        out += term
    return out


def sym_same(f, g, n):
    return sympy.cancel(sympy.together(to_sym(f, n) - to_sym(g, n))) == 0


class TestApply:
    def test_identity_word(self):
        f = GPoly.y(N, 1, (2,)) * GPoly.y(N, 2) + 3
        assert gpoly_apply((0,), f) is f or gpoly_apply((0,), f) == f

    def test_shift_in_n(self):
        assert gpoly_apply((1,), GPoly.y(N, 1)) == GPoly.y(N, 1, (1,))

    def test_z3_wraps(self):
        f = GPoly.y(Z3, 1, (2,)) * GPoly.y(Z3, 2, (0,))
        assert gpoly_apply((1,), f) == GPoly.y(Z3, 1, (0,)) * GPoly.y(Z3, 2, (1,))

    def test_word_objects_and_mismatch(self):
        f = GPoly.y(N2, 1, (1, 0))
        assert gpoly_apply(Word(N2, (0, 2)), f) == GPoly.y(N2, 1, (1, 2))
        with pytest.raises(PresentationMismatch):
            gpoly_apply(Word(N, (1,)), f)

    def test_acts_on_every_side(self):
        f = GPoly.x(N, 1, 2, (0,), side=1) * GPoly.D(N, (1,), side=2)
        assert gpoly_apply((2,), f) == GPoly.x(N, 1, 2, (2,), side=1) * GPoly.D(N, (3,), side=2)


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.sampled_from([N, N2, Z3, NZ2]))
def test_apply_is_ring_hom_and_action(seed, pres):
    rng = random.Random(seed)
    f = random_gpoly(rng, pres, kinds=("y",))
    g = random_gpoly(rng, pres, kinds=("y",))
    ws = words_up_to(pres, 2)
    h, h2 = rng.choice(ws), rng.choice(ws)
    assert gpoly_apply(h, f * g) == gpoly_apply(h, f) * gpoly_apply(h, g)
    assert gpoly_apply(h, f + g) == gpoly_apply(h, f) + gpoly_apply(h, g)
    assert gpoly_apply(h, gpoly_apply(h2, f)) == gpoly_apply(multiply(h, h2), f)


class TestOrd:
    def test_examples(self):
        assert ord_(GPoly.y(N, 1, (2,)) * GPoly.y(N, 1, (3,))) == 3
        assert ord_(GPoly.const(N, 5)) == 0

    def test_zero(self):
        with pytest.raises(ValueError):
            ord_(GPoly(N))
        with pytest.raises(ValueError):
            ord_(GPoly.y(N, 1, (4,)) - GPoly.y(N, 1, (4,)))

    def test_length_not_exponent_sum_under_torsion(self):
        assert ord_(GPoly.y(NZ2, 1, (2, 1))) == 3

    def test_product_rule_on_random_pairs(self):
        rng = random.Random(2024)
        pairs = 0
        for pres in (N, N2, NZ2, Z3):
            while pairs < 50 * (1 + [N, N2, NZ2, Z3].index(pres)):
                f = random_gpoly(rng, pres, max_len=3, kinds=("y",))
                g = random_gpoly(rng, pres, max_len=3, kinds=("y",))
                if f.is_zero() or g.is_zero():
                    continue
                # oracle: word lengths read off the indeterminates directly
                lens = lambda p: max((word_length(Word(pres, k[3])) for k in p.indeterminates()), default=0)
                assert ord_(f * g) == max(lens(f), lens(g)) == max(ord_(f), ord_(g))
                pairs += 1
        assert pairs == 200

    @settings(max_examples=30)
    @given(st.integers(0, 10**6))
    def test_apply_raises_ord_by_at_most_length(self, seed):
        rng = random.Random(seed)
        pres = rng.choice([N, N2, NZ2])
        f = random_gpoly(rng, pres, kinds=("y",))
        if f.is_zero():
            return
        h = rng.choice(words_up_to(pres, 3))
        assert ord_(gpoly_apply(h, f)) <= ord_(f) + word_length(h)


class TestHopfMaps:
    def test_group_like_for_n1(self):
        H = GLnDiffHopf(1, N)
        for w in ((0,), (2,)):
            assert H.delta(H.x(1, 1, w)) == H.x(1, 1, w) * H.x(1, 1, w, side=1)

    def test_generators_gl2(self):
        H = GLnDiffHopf(2, N)
        assert H.check_axioms(H.generators(2)) == []

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_counit_of_antipode(self, n):
        H = GLnDiffHopf(n, N)
        for g in H.generators(1):
            assert H.counit(H.antipode(g)) == H.counit(g)

    def test_antipode_identity_gl2(self):
        H = GLnDiffHopf(2, N)
        for i in (1, 2):
            for j in (1, 2):
                s = sum((H.x(i, l) * H.antipode(H.x(l, j)) for l in (1, 2)), GPoly(N))
                assert s == (1 if i == j else 0)
                assert normalize(s) == GPoly.const(N, 1 if i == j else 0)

    def test_antipode_is_matrix_inverse(self):
        # S(X) against sympy's inverse of the generic matrix
        for n in (2, 3):
            H = GLnDiffHopf(n, N)
            X = sympy.Matrix(n, n, lambda i, j: _symbol((0, "x", (i + 1, j + 1), (0,))))
            Xi = X.inv()
            for i in range(n):
                for j in range(n):
                    got = to_sym(H.antipode(H.x(i + 1, j + 1)), n)
                    assert sympy.cancel(got - Xi[i, j]) == 0

    def test_delta_matches_matrix_product(self):
        H = GLnDiffHopf(2, N)
        X = sympy.Matrix(2, 2, lambda i, j: _symbol((0, "x", (i + 1, j + 1), (1,))))
        Y = sympy.Matrix(2, 2, lambda i, j: _symbol((1, "x", (i + 1, j + 1), (1,))))
        P = X * Y
        for i in range(2):
            for j in range(2):
                assert sympy.expand(to_sym(H.delta(H.x(i + 1, j + 1, (1,))), 2) - P[i, j]) == 0

    def test_hundred_random_elements(self):
        H = GLnDiffHopf(2, N)
        rng = random.Random(7)
        elems = [random_gpoly(rng, N, max_len=1, degree=2, with_D=True) for _ in range(100)]
        t = time.perf_counter()
        assert H.check_axioms(elems) == []
        assert time.perf_counter() - t < 30

    def test_antipode_axiom_via_sympy(self):
        H = GLnDiffHopf(2, N)
        rng = random.Random(11)
        for _ in range(10):
            f = random_gpoly(rng, N, max_len=1, degree=2, with_D=True)
            lhs = merge_sides(H.antipode_at(H.delta(f), 0))
            assert sym_same(lhs, H.counit(f), 2)

    @pytest.mark.parametrize("pres", [N, Z2, NZ2])
    def test_maps_commute_with_apply(self, pres):
        H = GLnDiffHopf(2, pres)
        rng = random.Random(3)
        for _ in range(15):
            f = random_gpoly(rng, pres, max_len=1, degree=2, with_D=True)
            h = rng.choice(words_up_to(pres, 2))
            assert H.delta(gpoly_apply(h, f)) == gpoly_apply(h, H.delta(f))
            assert H.counit(gpoly_apply(h, f)) == H.counit(f)
            assert H.antipode(gpoly_apply(h, f)) == gpoly_apply(h, H.antipode(f))



class TestLocalization:
    def test_det_times_d(self):
        H = GLnDiffHopf(2, N)
        assert H.det((1,)) * H.D((1,)) == 1
        assert normalize(H.det() * H.D() * H.x(1, 2)) == H.x(1, 2)
        assert H.D() != H.D((1,))

    def test_normal_form_is_canonical(self):
        H = GLnDiffHopf(2, N)
        rng = random.Random(5)
        for _ in range(10):
            f = random_gpoly(rng, N, max_len=1, with_D=True)
            g = f * H.det() * H.D()
            assert normalize(f, 2).terms == normalize(g, 2).terms

    def test_pure_d_polynomials(self):
        assert not GPoly.D(N).is_zero()
        assert (GPoly.D(N) ** 2 - GPoly.D(N) * GPoly.D(N)).is_zero()
        assert normalize(GPoly.D(N, (1,)) * 2).terms == (GPoly.D(N, (1,)) * 2).terms


class TestSerialization:
    def test_keys(self):
        for k in [(0, "x", (1, 2), (3,)), (1, "D", (), (0,)), (2, "y", (4,), (1,))]:
            assert parse_ind_key(ind_key(k), N) == k
        assert ind_key((0, "x", (1, 2), (0, 1))) == "x[1][2]@[0,1]"
        with pytest.raises(ValueError):
            parse_ind_key("z[1]@[0]", N)

    def test_json_round_trip(self):
        rng = random.Random(1)
        for _ in range(10):
            f = random_gpoly(rng, NZ2, with_D=True)
            assert GPoly.from_json(NZ2, f.to_json()).terms == f.terms

    def test_words_validated(self):
        with pytest.raises(Exception):
            parse_ind_key("x[1][1]@[0,3]", NZ2)


class TestComodules:
    def test_standard_and_corrupted(self):
        H = GLnDiffHopf(2, N)
        V = standard_comodule(H)
        assert comodule_axioms(V)
        rho = [list(r) for r in V.rho]
        rho[0][1] = GPoly(N)
        assert not comodule_axioms(Comodule(H, rho))

    def test_unit_for_tensor(self):
        H = GLnDiffHopf(2, N)
        V = standard_comodule(H, (1,))
        assert comodule_tensor(V, trivial_comodule(H)) == V
        assert comodule_tensor(trivial_comodule(H), V) == V

    def test_dual_det(self):
        H = GLnDiffHopf(2, N)
        Dv = comodule_dual(det_comodule(H))
        assert Dv.rho[0][0].terms == H.D().terms
        assert comodule_axioms(Dv)

    def test_gl1_square(self):
        H = GLnDiffHopf(1, N)
        V = standard_comodule(H)
        T = comodule_tensor(V, V)
        assert T.rho[0][0] == H.x(1, 1) ** 2

    def test_constructions_pass(self):
        H = GLnDiffHopf(2, N)
        V, W = standard_comodule(H), standard_comodule(H, (1,))
        for name, C in comodule_constructions(V, W).items():
            assert comodule_axioms(C), name
        assert comodule_axioms(comodule_dual(comodule_tensor(V, W)))
        assert comodule_axioms(comodule_sum(det_comodule(H), V))

    def test_dual_pairs_to_trivial(self):
        # rho* is the transpose of S(X), so (rho*)^T X = X^-1 X
        H = GLnDiffHopf(2, N)
        V = standard_comodule(H)
        Vd = comodule_dual(V)
        for j in range(2):
            for l in range(2):
                s = sum((Vd.rho[i][j] * V.rho[i][l] for i in range(2)), GPoly(N))
                assert s == (1 if j == l else 0)

    def test_algebra_mismatch(self):
        with pytest.raises(ValueError):
            comodule_tensor(standard_comodule(GLnDiffHopf(2, N)), standard_comodule(GLnDiffHopf(2, Z2)))


class TestTwist:
    def test_identity(self):
        H = GLnDiffHopf(2, N)
        V = standard_comodule(H)
        assert twist_comodule(V, (0,)) == V

    def test_standard_entries_move(self):
        H = GLnDiffHopf(2, N)
        T = twist_comodule(standard_comodule(H), (1,))
        assert all(T.rho[i - 1][j - 1].terms == H.x(i, j, (1,)).terms for i in (1, 2) for j in (1, 2))

    def test_double_twist_in_z2(self):
        H = GLnDiffHopf(2, Z2)
        V = standard_comodule(H)
        once = twist_comodule(V, (1,))
        assert once != V
        assert twist_comodule(once, (1,)) == V

    def test_composite(self):
        H = GLnDiffHopf(2, NZ2)
        V = comodule_tensor(standard_comodule(H), det_comodule(H, (0, 1)))
        g, h = NZ2.word((1, 1)), NZ2.word((2, 1))
        assert twist_comodule(twist_comodule(V, h), g) == twist_comodule(V, multiply(g, h))

    @pytest.mark.parametrize("pres", [N, Z2, NZ2])
    def test_preserves_axioms(self, pres):
        H = GLnDiffHopf(2, pres)
        base = [standard_comodule(H), comodule_dual(standard_comodule(H)), det_comodule(H)]
        for V in base:
            for g in words_up_to(pres, 2):
                assert comodule_axioms(twist_comodule(V, g))


class TestFiltration:
    def test_l010(self):
        R = L_filtration(2, 0, 1, 0)
        H = GLnDiffHopf(2, N)
        assert R.dim == 4 and R.ok
        assert {str(b) for b in R.basis} == {str(H.x(i, j)) for i in (1, 2) for j in (1, 2)}

    def test_l011(self):
        R = L_filtration(2, 0, 1, 1)
        assert R.dim == 8 and R.certificate and R.equivariance and R.dim_check

    def test_det_inverse_times_det_is_in_l(self):
        H = GLnDiffHopf(2, N)
        L = Filtration(H, 1, 2, 0)
        assert L.contains(H.det() * H.D())
        assert L.contains(H.one())
        assert not L.contains(H.x(1, 1))
        assert not L.contains(H.D() * H.x(1, 1, (1,)) ** 2)

    def test_certificate_against_sympy(self):
        # independent expansion: substitute X -> X Y and 1/det(X) -> 1/(det X det Y)
        for n, r, s, p in ((2, 0, 1, 1), (2, 1, 2, 0), (1, 2, 3, 1)):
            R = L_filtration(n, r, s, p)
            assert R.ok
            words = R.words
            X = {w: sympy.Matrix(n, n, lambda i, j: sympy.Symbol(f"x{i}{j}_{w}")) for w in words}
            Y = {w: sympy.Matrix(n, n, lambda i, j: sympy.Symbol(f"y{i}{j}_{w}")) for w in words}
            d_e = sympy.Symbol("De")
            allowed = {sym for w in words for sym in X[w]}
            e = words[0]
            for b in R.basis:
                expr = sympy.Integer(1)
                for (side, kind, idx, w), ex in next(iter(b.terms)):
                    if kind == "D":
                        expr *= d_e ** ex
                    else:
                        expr *= sympy.Symbol(f"x{idx[0] - 1}{idx[1] - 1}_{w}") ** ex
                sub = {X[w][i, j]: (X[w] * Y[w])[i, j] for w in words for i in range(n) for j in range(n)}
                image = sympy.Poly(sympy.expand(expr.subs(sub, simultaneous=True)),
                                   *sorted(allowed | {d_e}, key=str))
                for monom, _ in image.terms():
                    powers = dict(zip(sorted(allowed | {d_e}, key=str), monom))
                    assert powers[d_e] == r
                    assert sum(v for k, v in powers.items() if k != d_e) == s

    def test_cap(self):
        with pytest.raises(BasisTooLarge):
            L_filtration(2, 0, 3, 3, cap=100)

    def test_torsion_words(self):
        R = L_filtration(2, 0, 1, 3, pres=Z2)
        assert R.dim == 8 and R.ok
