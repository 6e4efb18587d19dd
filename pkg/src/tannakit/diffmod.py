"""Differential modules over QQ(vars) with a derivation and named endomorphisms.

A module of dimension d is a d x d matrix A encoding the system dY = A*Y.

Twist.  If sigma is an endomorphism with d o sigma = lam * sigma o d, applying
sigma to dY = AY gives d(sigma Y) = lam * sigma(A) * sigma(Y).  So the twisted
module has matrix lam * sigma(A), and twisting by sigma and then tau agrees
with twisting once by tau o sigma, whose factor is lam_tau * tau(lam_sigma).

Gauge.  Substituting Y = C*Z turns A into C^-1 A C - C^-1 dC.  Gauging by C
and then by C' equals gauging once by C*C'.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .field import (
    DerivationTable,
    MultiPoly,
    RatField,
    RatFunc,
    SubstEndo,
    commutation_factor,
    parse_ratfunc,
    rf_derive,
    rf_equals,
    rf_substitute,
)
from .field.linalg import (
    Matrix,
    block_diag,
    det,
    identity,
    kron,
    mat_add,
    mat_equal,
    mat_inverse,
    mat_map,
    mat_mul,
    mat_neg,
    mat_sub,
    nullspace_poly,
    transpose,
    zeros,
)


class UnknownEndomorphism(KeyError):
    pass


class DiffField:
    """QQ(vars) with a derivation and registered endomorphisms."""

    def __init__(self, variables: Sequence[str], derivation: Mapping[str, object]):
        self.vars = tuple(variables)
        self.K = RatField(self.vars)
        self.derivation = DerivationTable(self.vars, {v: self.K(x) for v, x in derivation.items()})
        self.endos: Dict[str, Tuple[SubstEndo, RatFunc]] = {}

    def __call__(self, x) -> RatFunc:
        return self.K(x)

    def register(self, name: str, images: Mapping[str, object]) -> RatFunc:
        """Add the endomorphism v -> images[v] (unlisted variables are fixed)."""
        full = {}
        for v in self.vars:
            full[v] = self.K(images[v]) if v in images else self.K.var(v)
        sigma = SubstEndo(self.vars, full, name)
        lam = commutation_factor(sigma, self.derivation)
        self.endos[name] = (sigma, lam)
        return lam

    def register_partial(self, name: str, images: Mapping[str, object]) -> RatFunc:
        """Like register, but variables without an image stay outside the domain."""
        sigma = SubstEndo(self.vars, {v: self.K(x) for v, x in images.items()}, name)
        lam = commutation_factor(sigma, self.derivation)
        self.endos[name] = (sigma, lam)
        return lam

    def compose(self, name: str, outer: str, inner: str) -> RatFunc:
        """Register outer o inner (inner acts first) with factor lam_outer * outer(lam_inner)."""
        tau, lt = self.endo(outer)
        sigma, ls = self.endo(inner)
        comp = tau.compose(sigma, name)
        lam = lt * rf_substitute(ls, tau)
        self.endos[name] = (comp, lam)
        return lam

    def endo(self, name: str) -> Tuple[SubstEndo, RatFunc]:
        try:
            return self.endos[name]
        except KeyError:
            raise UnknownEndomorphism(f"unknown endomorphism {name!r}") from None

    def derive(self, f: RatFunc) -> RatFunc:
        return rf_derive(f, self.derivation)

    def derivation_variable(self) -> str:
        active = self.derivation.active()
        if len(active) != 1:
            raise ValueError(f"need exactly one non-constant variable, have {list(active)}")
        return active[0]

    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "derivation": {v: str(x) for v, x in self.derivation.values.items()},
            "endomorphisms": {n: s.to_json() for n, (s, _) in self.endos.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "DiffField":
        F = cls(data["vars"], data.get("derivation", {}))
        for name, images in data.get("endomorphisms", {}).items():
            F.register(name, images)
        return F


@dataclass
class DiffModule:
    field: DiffField
    matrix: Matrix

    def __post_init__(self):
        d = len(self.matrix)
        if any(len(r) != d for r in self.matrix):
            raise ValueError("module matrix must be square")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def __eq__(self, other) -> bool:
        return isinstance(other, DiffModule) and mat_equal(self.matrix, other.matrix)

    def to_json(self) -> dict:
        return {"field": self.field.to_json(), "dim": self.dim,
                "matrix": [[str(x) for x in row] for row in self.matrix]}

    @classmethod
    def from_json(cls, data: Mapping, field: DiffField | None = None) -> "DiffModule":
        F = field or DiffField.from_json(data["field"])
        rows = data["matrix"]
        mat = [[parse_ratfunc(x, F.vars) for x in row] for row in rows]
        if "dim" in data and data["dim"] != len(mat):
            raise ValueError(f"dim {data['dim']} does not match matrix size {len(mat)}")
        return cls(F, mat)


def module(F: DiffField, rows: Sequence[Sequence[object]]) -> DiffModule:
    return DiffModule(F, [[F(x) for x in row] for row in rows])


# -- twist and gauge ------------------------------------------------------------

def twist(M: DiffModule, name: str) -> DiffModule:
    sigma, lam = M.field.endo(name)
    return DiffModule(M.field, mat_map(M.matrix, lambda x: lam * rf_substitute(x, sigma)))


def gauge(M: DiffModule, C: Matrix) -> DiffModule:
    """C^-1 A C - C^-1 dC."""
    F = M.field
    Ci = mat_inverse(C)
    dC = mat_map(C, F.derive)
    return DiffModule(F, mat_sub(mat_mul(Ci, mat_mul(M.matrix, C)), mat_mul(Ci, dC)))


def verify_gauge_equiv(M: DiffModule, N: DiffModule, C: Matrix) -> bool:
    if M.dim != N.dim or len(C) != M.dim:
        raise ValueError("dimension mismatch")
    return mat_equal(gauge(M, C).matrix, N.matrix)


def gauge_residual(M: DiffModule, N: DiffModule, C: Matrix) -> Matrix:
    """dC - A C + C B; zero iff C carries M to N (for invertible C)."""
    F = M.field
    return mat_add(mat_sub(mat_map(C, F.derive), mat_mul(M.matrix, C)), mat_mul(C, N.matrix))


def _common_denominator(polys: Iterable[MultiPoly], variables) -> MultiPoly:
    common = MultiPoly.one(variables)
    seen: List[MultiPoly] = []
    for d in polys:
        if d.is_constant() or any(d == s for s in seen):
            continue
        seen.append(d)
        if common.try_div(d) is None:
            common = common * d
    return common


def solve_gauge(M: DiffModule, N: DiffModule, deg_bound: int, denom: MultiPoly | RatFunc | str | int = 1,
                *, max_combos: int = 200) -> Optional[Matrix]:
    """Look for C with gauge(M, C) = N among C = P(t)/denom.

    P has entries polynomial in the derivation variable t of degree at most
    deg_bound + deg_t(denom), with coefficients in the remaining (constant)
    variables.  The linear conditions dC = AC - CB are collected
    coefficient-wise in t and solved by fraction-free elimination.
    """
    F = M.field
    if M.dim != N.dim:
        raise ValueError("dimension mismatch")
    d = M.dim
    t = F.derivation_variable()
    for v in F.vars:
        if v != t and not F.derivation.of(v).is_zero():
            raise ValueError("parameters must be constants")
    q = F(denom) if not isinstance(denom, MultiPoly) else RatFunc(denom)
    if not q.is_polynomial() or q.is_zero():
        raise ValueError("denominator must be a nonzero polynomial")
    qpoly = q.num * (1 / q.den.constant_value())
    top = deg_bound + max(qpoly.degree_in(t), 0)
    tvar = F.K.var(t)
    unknowns = [(i, j, k) for i in range(d) for j in range(d) for k in range(top + 1)]
    A, B = M.matrix, N.matrix
    zero = F(0)
    # residual of each unknown's elementary matrix, entry by entry
    entries: Dict[Tuple[int, int], List[RatFunc]] = {(a, b): [zero] * len(unknowns) for a in range(d) for b in range(d)}
    for u, (i, j, k) in enumerate(unknowns):
        base = tvar ** k / q
        dbase = F.derive(base)
        entries[(i, j)][u] = entries[(i, j)][u] + dbase
        for a in range(d):
            if not A[a][i].is_zero():
                entries[(a, j)][u] = entries[(a, j)][u] - A[a][i] * base
        for b in range(d):
            if not B[j][b].is_zero():
                entries[(i, b)][u] = entries[(i, b)][u] + base * B[j][b]
    rows: List[List[MultiPoly]] = []
    for key in sorted(entries):
        vals = entries[key]
        L = _common_denominator((x.den for x in vals if not x.is_zero()), F.vars)
        polys = [x.num * L.exact_div(x.den) if not x.is_zero() else MultiPoly.zero(F.vars) for x in vals]
        powers: Dict[int, List[MultiPoly]] = {}
        for u, p in enumerate(polys):
            for e, coef in p.coefficients_in(t).items():
                powers.setdefault(e, [MultiPoly.zero(F.vars)] * len(unknowns))
                powers[e][u] = coef
        rows.extend(powers[e] for e in sorted(powers))
    if not rows:
        rows = [[MultiPoly.zero(F.vars)] * len(unknowns)]
    basis = nullspace_poly(rows, F.vars)
    if not basis:
        return None
    basis = [_primitive(v) for v in basis]
    for coeffs in _small_combinations(len(basis), max_combos):
        vec = [sum((v[u] * c for v, c in zip(basis, coeffs) if c), MultiPoly.zero(F.vars))
               for u in range(len(unknowns))]
        C = [[zero for _ in range(d)] for _ in range(d)]
        for u, (i, j, k) in enumerate(unknowns):
            if not vec[u].is_zero():
                C[i][j] = C[i][j] + RatFunc(vec[u]) * tvar ** k
        C = [[x / q for x in row] for row in C]
        if det(C).is_zero():
            continue
        if not verify_gauge_equiv(M, N, C):
            raise AssertionError("solver produced a matrix that fails the gauge identity")
        return C
    return None


def _primitive(v: List[MultiPoly]) -> List[MultiPoly]:
    """Divide a polynomial vector by its rational content and monomial gcd."""
    nz = [p for p in v if not p.is_zero()]
    if not nz:
        return v
    from gmpy2 import gcd, lcm, mpq, mpz
    g, l = mpz(0), mpz(1)
    for p in nz:
        c = p.content()
        g = gcd(g, c.numerator)
        l = lcm(l, c.denominator)
    scale = mpq(l, g)
    if nz[0].leading_coefficient() < 0:
        scale = -scale
    lay = nz[0]._lay
    mins = None
    for p in nz:
        ex = lay.unpack(p.monomial_gcd_key()) if p.monomial_gcd_key() else (0,) * lay.n
        mins = ex if mins is None else tuple(min(a, b) for a, b in zip(mins, ex))
    key = lay.pack(mins) if any(mins) else 0
    return [(p * scale).shift_down(key) if not p.is_zero() else p for p in v]


def _small_combinations(n: int, limit: int):
    """Deterministic integer coefficient vectors: unit vectors first, then small mixes."""
    count = 0
    for i in range(n):
        vec = [0] * n
        vec[i] = 1
        yield vec
        count += 1
    if n == 1:
        return
    for bound in (1, 2, 3):
        for vec in itertools.product(range(-bound, bound + 1), repeat=n):
            if max(abs(x) for x in vec) != bound or sum(1 for x in vec if x) < 2:
                continue
            yield list(vec)
            count += 1
            if count >= limit:
                return


# -- constructions -----------------------------------------------------------------

def module_constructions(M: DiffModule, N: DiffModule) -> Dict[str, DiffModule]:
    if M.field is not N.field and M.field.vars != N.field.vars:
        raise ValueError("modules over different fields")
    F = M.field
    Id_m, Id_n = identity(F.vars, M.dim), identity(F.vars, N.dim)
    tensor = mat_add(kron(M.matrix, Id_n), kron(Id_m, N.matrix))
    return {
        "tensor": DiffModule(F, tensor),
        "dual": DiffModule(F, mat_neg(transpose(M.matrix))),
        "direct_sum": DiffModule(F, block_diag(M.matrix, N.matrix)),
    }


def tensor(M: DiffModule, N: DiffModule) -> DiffModule:
    return module_constructions(M, N)["tensor"]


def dual(M: DiffModule) -> DiffModule:
    return DiffModule(M.field, mat_neg(transpose(M.matrix)))


def direct_sum(M: DiffModule, N: DiffModule) -> DiffModule:
    return DiffModule(M.field, block_diag(M.matrix, N.matrix))


def shuffle_matrix(F: DiffField, p: int, q: int) -> Matrix:
    """Permutation P with P (X kron Y) P^-1 = Y kron X for p x p X and q x q Y."""
    P = zeros(F.vars, p * q)
    for i in range(p):
        for j in range(q):
            P[j * p + i][i * q + j] = F(1)
    return P


# -- the shift/scale example -------------------------------------------------------

def exp_field() -> DiffField:
    """QQ(x, E) with dx = 1 and dE = E (E stands for exp(x))."""
    return DiffField(("x", "E"), {"x": 1, "E": "E"})


def hyperexp_criterion(kappa) -> Optional[RatFunc]:
    """A nonzero c in QQ(x, E) with dc = kappa*c, of the form r(x)*E^j, if any.

    d(r E^j) = (r' + j r) E^j, so r'/r = kappa - j.  A rational r with r'/r
    a nonzero constant does not exist (compare pole/degree behaviour), hence
    j = kappa and r is constant: a solution exists iff kappa is an integer.
    """
    kappa = Fraction(kappa)
    F = exp_field()
    if kappa.denominator != 1:
        return None
    c = F.K.var("E") ** int(kappa)
    if not rf_equals(F.derive(c), c * int(kappa)):
        raise AssertionError("hyperexponential witness failed")
    return c


def shift_scale_field(symbolic: bool = True) -> DiffField:
    """QQ(x, n, m, s1, s2) with d/dx, sigma1: x -> x+s1 and sigma2: x -> s2*x."""
    F = DiffField(("x", "n", "m", "s1", "s2"), {"x": 1})
    F.register("sigma1", {"x": "x + s1"})
    F.register("sigma2", {"x": "s2*x"})
    return F


def commute_modules(F: DiffField) -> Tuple[DiffModule, DiffModule, DiffModule]:
    """(nx+m, sigma2 then sigma1, sigma1 then sigma2)."""
    M = module(F, [["n*x + m"]])
    return M, twist(twist(M, "sigma2"), "sigma1"), twist(twist(M, "sigma1"), "sigma2")


def commute_up_to_gauge(s1, s2, n_range: Iterable[int]) -> List[dict]:
    """For each n, whether the two orders of twisting give gauge-equivalent modules."""
    s1 = Fraction(s1)
    s2 = Fraction(s2)
    if s2.denominator != 1 or s2 in (0, 1):
        raise ValueError("s2 must be an integer different from 0 and 1")
    F = DiffField(("x", "E", "m"), {"x": 1, "E": "E"})
    F.register_partial("sigma1", {"x": f"x + {s1.numerator}/{s1.denominator}", "m": "m"})
    F.register_partial("sigma2", {"x": f"{s2.numerator}*x", "m": "m"})

    def one(n: int) -> dict:
        M = module(F, [[f"{n}*x + m"]])
        tx2 = twist(twist(M, "sigma2"), "sigma1")
        tx3 = twist(twist(M, "sigma1"), "sigma2")
        diff = tx2.matrix[0][0] - tx3.matrix[0][0]
        if not diff.is_constant():
            raise AssertionError("difference of the twisted eigenvalues is not constant")
        kappa = Fraction(int(diff.constant_value().numerator), int(diff.constant_value().denominator))
        c = hyperexp_criterion(kappa)
        entry = {"n": n, "kappa": str(kappa), "tx2": str(tx2.matrix[0][0]), "tx3": str(tx3.matrix[0][0]),
                 "equivalent": c is not None}
        if c is not None:
            c = c.rename(F.vars)
            if not verify_gauge_equiv(tx2, tx3, [[c]]):
                raise AssertionError("gauge witness does not verify")
            entry["gauge"] = str(c)
        return entry

    ns = list(n_range)
    workers = _workers()
    if workers > 1 and len(ns) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(one, ns))
    return [one(n) for n in ns]


def uniform_condition(s1, s2) -> bool:
    """s1*(s2-1)*s2 is an integer."""
    v = Fraction(s1) * (Fraction(s2) - 1) * Fraction(s2)
    return v.denominator == 1


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("TANNAKIT_THREADS", "1")))
    except ValueError:
        return 1


# -- the hypergeometric example ---------------------------------------------------

def hypergeometric_field() -> DiffField:
    F = DiffField(("a", "b", "c", "z"), {"z": 1})
    F.register("sigma1", {"a": "a + 1"})
    F.register("sigma2", {"b": "b + 1"})
    F.register("sigma3", {"c": "c + 1"})
    return F


def hypergeometric_module(F: DiffField | None = None) -> DiffModule:
    F = F or hypergeometric_field()
    return module(F, [["0", "1"], ["a*b/(z*(1-z))", "((a+b+1)*z - c)/(z*(1-z))"]])


CONTIGUITY_PRINTED = {
    "sigma1": [["(c - z*b - a - 1)/a", "z*(z-1)/a"], ["b", "z - 1"]],
    "sigma2": [["(c - z*a - b - 1)/b", "z*(z-1)/b"], ["a", "z - 1"]],
    "sigma3": [["c", "z"], ["a*b/(1-z)", "z*(a+b-c)/(1-z)"]],
}

# The (1,2) entries of the first two matrices carry the opposite sign.
CONTIGUITY_CORRECTED = {
    "sigma1": [["(c - z*b - a - 1)/a", "-z*(z-1)/a"], ["b", "z - 1"]],
    "sigma2": [["(c - z*a - b - 1)/b", "-z*(z-1)/b"], ["a", "z - 1"]],
    "sigma3": CONTIGUITY_PRINTED["sigma3"],
}


def contiguity_matrix(F: DiffField, name: str, corrected: bool = False) -> Matrix:
    table = CONTIGUITY_CORRECTED if corrected else CONTIGUITY_PRINTED
    return [[F(x) for x in row] for row in table[name]]


def contiguity_orientations(M: DiffModule, C: Matrix, name: str) -> Dict[str, bool]:
    """Both readings of 'M is isomorphic to its twist via C'."""
    S = twist(M, name)
    return {
        "gauge(A,C)=sigma(A)": verify_gauge_equiv(M, S, C),
        "gauge(sigma(A),C)=A": verify_gauge_equiv(S, M, C),
    }


def projective_ratio(C: Matrix, D: Matrix, F: DiffField) -> Optional[RatFunc]:
    """kappa with C = kappa*D and d(kappa) = 0, or None."""
    kappa = None
    for rc, rd in zip(C, D):
        for x, y in zip(rc, rd):
            if y.is_zero():
                if not x.is_zero():
                    return None
                continue
            kappa = x / y
            break
        if kappa is not None:
            break
    if kappa is None or not F.derive(kappa).is_zero():
        return None
    if not mat_equal(C, [[kappa * y for y in row] for row in D]):
        return None
    return kappa
