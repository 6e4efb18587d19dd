"""Independent reference computations built on sympy."""

import random

import sympy

from tannakit.field import MultiPoly, RatFunc


def sym(f) -> sympy.Expr:
    """Our RatFunc (or MultiPoly) as a sympy expression via its text form."""
    return sympy.sympify(str(f).replace("^", "**"))


def sym_equal(a, b) -> bool:
    return sympy.cancel(sympy.together(sym(a) - b if isinstance(b, sympy.Expr) else sym(a) - sym(b))) == 0


def random_poly_data(rng: random.Random, nvars: int, max_deg: int = 2, max_terms: int = 3):
    items = []
    for _ in range(rng.randint(1, max_terms)):
        ex = [0] * nvars
        for _ in range(rng.randint(0, max_deg)):
            ex[rng.randrange(nvars)] += 1
        items.append((ex, rng.randint(-4, 4)))
    return items


def poly_pair(variables, items):
    ours = MultiPoly.from_exponents(variables, items)
    syms = sympy.symbols(variables)
    theirs = sum((c * sympy.Mul(*[s ** e for s, e in zip(syms, ex)]) for ex, c in items), sympy.Integer(0))
    return ours, theirs


def random_ratfunc(rng: random.Random, variables, max_deg: int = 2):
    """(RatFunc, sympy expr) built from the same random data."""
    n = len(variables)
    while True:
        num, snum = poly_pair(variables, random_poly_data(rng, n, max_deg))
        den, sden = poly_pair(variables, random_poly_data(rng, n, max_deg))
        if not den.is_zero():
            return RatFunc(num, den), snum / sden
