"""Difference polynomials, the GL_n difference Hopf algebra and its comodules.

Indeterminates are ``(side, kind, index, word)``:

* ``kind`` is ``"x"`` (index ``(i, j)``), ``"y"`` (index ``(i,)``) or ``"D"``
  (index ``()``), where ``D_w`` stands for ``1/det(x_{ij,w})``;
* ``word`` is the exponent tuple of a normal-form word;
* ``side`` numbers the tensor factor, so B (x) B is modelled as the ring on two
  disjoint copies of the indeterminates (and B (x) B (x) B on three).

Equality is equality in the localized ring: f = g iff clearing every D_w
against det_w turns f - g into the zero polynomial.  ``normalize`` produces the
unique form N * prod D_w^k_w with det_w not dividing N whenever k_w > 0
(det of a generic matrix is irreducible, so this is canonical).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from gmpy2 import mpq

from .field import MultiPoly
from .semigroup import AbelianPresentation, PresentationMismatch, Word, multiply, word_length, words_up_to

Ind = Tuple[int, str, Tuple[int, ...], Tuple[int, ...]]
Mono = Tuple[Tuple[Ind, int], ...]


class BasisTooLarge(ValueError):
    pass


def _mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    acc = dict(a)
    for k, e in b:
        acc[k] = acc.get(k, 0) + e
    return tuple(sorted(acc.items()))


class GPoly:
    """Sparse polynomial over QQ in indexed indeterminates (and D_w symbols)."""

    __slots__ = ("pres", "terms")

    def __init__(self, pres: AbelianPresentation, terms: Mapping[Mono, object] | None = None):
        self.pres = pres
        self.terms: Dict[Mono, mpq] = {}
        for m, c in (terms or {}).items():
            c = mpq(c)
            if c:
                self.terms[m] = c

    # -- construction ----------------------------------------------------------
    @classmethod
    def const(cls, pres, c) -> "GPoly":
        return cls(pres, {(): c})

    @classmethod
    def ind(cls, pres, ind: Ind) -> "GPoly":
        _check_word(pres, ind[3])
        return cls(pres, {((ind, 1),): 1})

    @classmethod
    def x(cls, pres, i: int, j: int, w=None, side: int = 0) -> "GPoly":
        return cls.ind(pres, (side, "x", (i, j), _exps(pres, w)))

    @classmethod
    def y(cls, pres, i: int, w=None, side: int = 0) -> "GPoly":
        return cls.ind(pres, (side, "y", (i,), _exps(pres, w)))

    @classmethod
    def D(cls, pres, w=None, side: int = 0) -> "GPoly":
        return cls.ind(pres, (side, "D", (), _exps(pres, w)))

    def _new(self, terms: Dict[Mono, mpq]) -> "GPoly":
        out = GPoly(self.pres)
        out.terms = {m: c for m, c in terms.items() if c}
        return out

    def _coerce(self, other) -> "GPoly":
        if isinstance(other, GPoly):
            if other.pres != self.pres:
                raise PresentationMismatch("polynomials over different semigroups")
            return other
        return GPoly.const(self.pres, other)

    # -- arithmetic ------------------------------------------------------------
    def __add__(self, other) -> "GPoly":
        other = self._coerce(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, 0) + c
        return self._new(acc)

    __radd__ = __add__

    def __neg__(self) -> "GPoly":
        return self._new({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "GPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "GPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "GPoly":
        other = self._coerce(other)
        acc: Dict[Mono, mpq] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                acc[m] = acc.get(m, 0) + c1 * c2
        return self._new(acc)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "GPoly":
        if e < 0:
            raise ValueError("negative power")
        out, base = GPoly.const(self.pres, 1), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def is_syntactic_zero(self) -> bool:
        return not self.terms

    def is_zero(self) -> bool:
        if not _has_x(self):
            # the 1/det_w are algebraically independent, nothing to clear
            return self.is_syntactic_zero()
        return clear_inverses(self)[0].is_syntactic_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, (GPoly, int)):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def indeterminates(self) -> Tuple[Ind, ...]:
        return tuple(sorted({k for m in self.terms for k, _ in m}))

    def total_degree(self) -> int:
        """Degree counting x and y only."""
        return max((sum(e for k, e in m if k[1] != "D") for m in self.terms), default=0)

    def map_inds(self, f: Callable[[Ind], Ind]) -> "GPoly":
        acc: Dict[Mono, mpq] = {}
        for m, c in self.terms.items():
            mm: Dict[Ind, int] = {}
            for k, e in m:
                k2 = f(k)
                mm[k2] = mm.get(k2, 0) + e
            key = tuple(sorted(mm.items()))
            acc[key] = acc.get(key, 0) + c
        return self._new(acc)

    def substitute(self, image: Callable[[Ind], "GPoly"]) -> "GPoly":
        """Algebra map determined by its values on indeterminates."""
        cache: Dict[Tuple[Ind, int], GPoly] = {}

        def power(k: Ind, e: int) -> GPoly:
            hit = cache.get((k, e))
            if hit is None:
                hit = cache[(k, e)] = image(k) ** e
            return hit

        out = GPoly(self.pres)
        for m, c in self.terms.items():
            term = GPoly.const(self.pres, c)
            for k, e in m:
                term = term * power(k, e)
            out = out + term
        return out

    # -- text form -------------------------------------------------------------
    def to_json(self) -> list:
        return [{"coeff": _qstr(c), "mono": [[ind_key(k), e] for k, e in m]}
                for m, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, pres, data: list) -> "GPoly":
        terms = {}
        for item in data:
            mono = tuple(sorted((parse_ind_key(k, pres), int(e)) for k, e in item["mono"]))
            terms[mono] = terms.get(mono, 0) + mpq(item["coeff"])
        return cls(pres, terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            factors = [ind_key(k) + (f"^{e}" if e != 1 else "") for k, e in m]
            if not factors:
                parts.append(_qstr(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(_qstr(c) + "*" + "*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"GPoly({str(self)!r})"


def _qstr(c) -> str:
    c = mpq(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _exps(pres: AbelianPresentation, w) -> Tuple[int, ...]:
    if w is None:
        return (0,) * pres.m
    if isinstance(w, Word):
        if w.pres != pres:
            raise PresentationMismatch("word from another presentation")
        return tuple(w.exps)
    return tuple(w)


def _check_word(pres: AbelianPresentation, exps: Tuple[int, ...]) -> None:
    Word(pres, exps)


_KEY = re.compile(r"^(?:(\d+):)?(x\[(\d+)\]\[(\d+)\]|y\[(\d+)\]|D)@\[([0-9,\s]*)\]$")


def ind_key(k: Ind) -> str:
    side, kind, idx, w = k
    pre = f"{side}:" if side else ""
    body = {"x": lambda: f"x[{idx[0]}][{idx[1]}]", "y": lambda: f"y[{idx[0]}]", "D": lambda: "D"}[kind]()
    return f"{pre}{body}@[{','.join(map(str, w))}]"


def parse_ind_key(s: str, pres: AbelianPresentation) -> Ind:
    m = _KEY.match(s.strip())
    if not m:
        raise ValueError(f"bad indeterminate key {s!r}")
    side = int(m.group(1) or 0)
    word = tuple(int(t) for t in m.group(6).split(",") if t.strip())
    _check_word(pres, word)
    if m.group(3):
        return (side, "x", (int(m.group(3)), int(m.group(4))), word)
    if m.group(5):
        return (side, "y", (int(m.group(5)),), word)
    return (side, "D", (), word)


# -- the semigroup action and ord ----------------------------------------------

def gpoly_apply(h, f: GPoly) -> GPoly:
    """y_{i,w} -> y_{i,hw} (likewise x and D) on every tensor side."""
    pres = f.pres
    hw = Word(pres, _exps(pres, h))
    if hw.is_identity():
        return f
    return f.map_inds(lambda k: (k[0], k[1], k[2], tuple(multiply(hw, Word(pres, k[3])).exps)))


def ord_(f: GPoly) -> int:
    """Largest word length among the indeterminates of the normal form of f."""
    g = normalize(f)
    if g.is_syntactic_zero():
        raise ValueError("ord of the zero polynomial")
    return max((word_length(Word(f.pres, k[3])) for k in g.indeterminates()), default=0)


# -- GL_n -------------------------------------------------------------------------

def det_poly(pres, n: int, w, side: int = 0) -> GPoly:
    w = _exps(pres, w)
    total = GPoly(pres)
    for perm in itertools.permutations(range(1, n + 1)):
        sign = _perm_sign(perm)
        term = GPoly.const(pres, sign)
        for i, j in enumerate(perm, start=1):
            term = term * GPoly.x(pres, i, j, w, side)
        total = total + term
    return total


def _perm_sign(perm) -> int:
    sign, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j] - 1
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _minor(pres, n, w, side, skip_row, skip_col) -> GPoly:
    rows = [i for i in range(1, n + 1) if i != skip_row]
    cols = [j for j in range(1, n + 1) if j != skip_col]
    total = GPoly(pres)
    if not rows:
        return GPoly.const(pres, 1)
    for perm in itertools.permutations(range(len(cols))):
        term = GPoly.const(pres, _perm_sign([p + 1 for p in perm]))
        for r, p in zip(rows, perm):
            term = term * GPoly.x(pres, r, cols[p], w, side)
        total = total + term
    return total


def clear_inverses(f: GPoly, n: int | None = None) -> Tuple[GPoly, Dict[Tuple[int, Tuple[int, ...]], int]]:
    """(N, k) with f = N * prod D^k and N free of D symbols."""
    need: Dict[Tuple[int, Tuple[int, ...]], int] = {}
    for m in f.terms:
        for k, e in m:
            if k[1] == "D":
                key = (k[0], k[3])
                need[key] = max(need.get(key, 0), e)
    if not need:
        return f, {}
    n = n or _matrix_size(f)
    pres = f.pres
    dets = {key: det_poly(pres, n, key[1], key[0]) for key in need}
    out = GPoly(pres)
    for m, c in f.terms.items():
        rest = []
        have: Dict[Tuple[int, Tuple[int, ...]], int] = {}
        for k, e in m:
            if k[1] == "D":
                have[(k[0], k[3])] = e
            else:
                rest.append((k, e))
        term = GPoly(pres, {tuple(rest): c})
        for key, top in need.items():
            term = term * dets[key] ** (top - have.get(key, 0))
        out = out + term
    return out, need


def _has_x(f: GPoly) -> bool:
    return any(k[1] == "x" for m in f.terms for k, _ in m)


def _matrix_size(f: GPoly) -> int:
    n = 0
    for m in f.terms:
        for k, _ in m:
            if k[1] == "x":
                n = max(n, *k[2])
    if n == 0:
        raise ValueError("cannot infer GL_n size: D symbols without x indeterminates")
    return n


def normalize(f: GPoly, n: int | None = None) -> GPoly:
    """Canonical form N * prod D_w^k (det_w never divides N when k_w > 0)."""
    if n is None and not _has_x(f):
        return f._new(dict(f.terms))
    N, need = clear_inverses(f, n)
    if not need or N.is_syntactic_zero():
        return N
    n = n or _matrix_size(f)
    pres = f.pres
    inds = sorted(set(N.indeterminates()) | {(s, "x", (i, j), w) for (s, w) in need
                                               for i in range(1, n + 1) for j in range(1, n + 1)})
    names = [ind_key(k) for k in inds]
    pos = {k: i for i, k in enumerate(inds)}

    def to_mp(g: GPoly) -> MultiPoly:
        items = []
        for m, c in g.terms.items():
            ex = [0] * len(inds)
            for k, e in m:
                ex[pos[k]] = e
            items.append((ex, c))
        return MultiPoly.from_exponents(names, items)

    P = to_mp(N)
    for key in list(need):
        d = to_mp(det_poly(pres, n, key[1], key[0]))
        while need[key] > 0:
            q = P.try_div(d)
            if q is None:
                break
            P = q
            need[key] -= 1
    out = GPoly(pres)
    for ex, c in P.exponents():
        out.terms[tuple((inds[i], e) for i, e in enumerate(ex) if e)] = c
    out = out._new(dict(out.terms))
    for (side, w), k in need.items():
        if k:
            out = out * GPoly.D(pres, w, side) ** k
    return out


@dataclass(frozen=True)
class GLnDiffHopf:
    """Coordinate ring of GL_n with difference indeterminates x_{ij,w} and D_w."""

    n: int
    pres: AbelianPresentation

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")

    def x(self, i, j, w=None, side=0) -> GPoly:
        return GPoly.x(self.pres, i, j, w, side)

    def D(self, w=None, side=0) -> GPoly:
        return GPoly.D(self.pres, w, side)

    def det(self, w=None, side=0) -> GPoly:
        return det_poly(self.pres, self.n, w, side)

    def one(self) -> GPoly:
        return GPoly.const(self.pres, 1)

    def generators(self, max_len: int) -> List[GPoly]:
        out = []
        for w in words_up_to(self.pres, max_len):
            out.extend(self.x(i, j, w) for i in range(1, self.n + 1) for j in range(1, self.n + 1))
            out.append(self.D(w))
        return out

    # structure maps, each an algebra map given on indeterminates of one side
    def _delta_image(self, k: Ind, side: int) -> GPoly:
        s, kind, idx, w = k
        if kind == "x":
            i, j = idx
            return sum((self.x(i, l, w, side) * self.x(l, j, w, side + 1) for l in range(1, self.n + 1)),
                       GPoly(self.pres))
        if kind == "D":
            return self.D(w, side) * self.D(w, side + 1)
        raise ValueError("y indeterminates are not part of the Hopf algebra")

    def _eps_image(self, k: Ind) -> GPoly:
        kind, idx = k[1], k[2]
        if kind == "x":
            return GPoly.const(self.pres, 1 if idx[0] == idx[1] else 0)
        if kind == "D":
            return self.one()
        raise ValueError("y indeterminates are not part of the Hopf algebra")

    def _antipode_image(self, k: Ind) -> GPoly:
        s, kind, idx, w = k
        if kind == "x":
            i, j = idx
            sign = -1 if (i + j) % 2 else 1
            # (X^-1)_{ij} = (-1)^{i+j} minor_{ji} / det
            return _minor(self.pres, self.n, w, s, j, i) * self.D(w, s) * sign
        if kind == "D":
            return self.det(w, s)
        raise ValueError("y indeterminates are not part of the Hopf algebra")

    def delta_at(self, f: GPoly, side: int) -> GPoly:
        """Apply Delta to tensor factor ``side``; later factors shift up by one."""
        def image(k: Ind) -> GPoly:
            if k[0] == side:
                return self._delta_image(k, side)
            if k[0] > side:
                return GPoly.ind(self.pres, (k[0] + 1,) + k[1:])
            return GPoly.ind(self.pres, k)
        return f.substitute(image)

    def eps_at(self, f: GPoly, side: int) -> GPoly:
        def image(k: Ind) -> GPoly:
            if k[0] == side:
                return self._eps_image(k)
            if k[0] > side:
                return GPoly.ind(self.pres, (k[0] - 1,) + k[1:])
            return GPoly.ind(self.pres, k)
        return f.substitute(image)

    def antipode_at(self, f: GPoly, side: int = 0) -> GPoly:
        def image(k: Ind) -> GPoly:
            return self._antipode_image(k) if k[0] == side else GPoly.ind(self.pres, k)
        return f.substitute(image)

    def delta(self, f: GPoly) -> GPoly:
        return self.delta_at(f, 0)

    def counit(self, f: GPoly) -> GPoly:
        return self.eps_at(f, 0)

    def antipode(self, f: GPoly) -> GPoly:
        return self.antipode_at(f, 0)

    def hopf_maps(self) -> Dict[str, Callable[[GPoly], GPoly]]:
        return {"delta": self.delta, "epsilon": self.counit, "antipode": self.antipode}

    # axioms on a single element
    def coassociative_on(self, f: GPoly) -> bool:
        d = self.delta(f)
        return self.delta_at(d, 0) == self.delta_at(d, 1)

    def counit_on(self, f: GPoly) -> bool:
        d = self.delta(f)
        left = self.eps_at(d, 0)
        right = self.eps_at(d, 1)
        return left == f and right == f

    def antipode_on(self, f: GPoly) -> bool:
        d = self.delta(f)
        eps = self.counit(f)
        left = merge_sides(self.antipode_at(d, 0))
        right = merge_sides(self.antipode_at(d, 1))
        return left == eps and right == eps

    def check_axioms(self, elements: Iterable[GPoly]) -> List[dict]:
        report = []
        for f in elements:
            for name, ok in (("coassociativity", self.coassociative_on), ("counit", self.counit_on),
                             ("antipode", self.antipode_on)):
                if not ok(f):
                    report.append({"axiom": name, "element": str(f)})
        return report


def merge_sides(f: GPoly) -> GPoly:
    """Multiplication B (x) ... (x) B -> B."""
    return f.map_inds(lambda k: (0,) + k[1:])


def shift_side(f: GPoly, side: int) -> GPoly:
    return f.map_inds(lambda k: (side,) + k[1:])


# -- comodules ----------------------------------------------------------------------

@dataclass
class Comodule:
    """rho(e_j) = sum_i e_i (x) rho[i][j]."""

    hopf: GLnDiffHopf
    rho: List[List[GPoly]]

    @property
    def dim(self) -> int:
        return len(self.rho)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Comodule) and self.dim == other.dim
                and all(a == b for ra, rb in zip(self.rho, other.rho) for a, b in zip(ra, rb)))

    def to_json(self) -> dict:
        return {"n": self.hopf.n, "presentation": self.hopf.pres.to_json(), "dim": self.dim,
                "rho": [[f.to_json() for f in row] for row in self.rho]}


def standard_comodule(H: GLnDiffHopf, w=None) -> Comodule:
    return Comodule(H, [[H.x(i, j, w) for j in range(1, H.n + 1)] for i in range(1, H.n + 1)])


def trivial_comodule(H: GLnDiffHopf) -> Comodule:
    return Comodule(H, [[H.one()]])


def det_comodule(H: GLnDiffHopf, w=None) -> Comodule:
    return Comodule(H, [[H.det(w)]])


def twist_comodule(V: Comodule, g) -> Comodule:
    return Comodule(V.hopf, [[gpoly_apply(g, f) for f in row] for row in V.rho])


def comodule_axioms(V: Comodule) -> bool:
    H = V.hopf
    d = V.dim
    for i in range(d):
        for j in range(d):
            lhs = sum((V.rho[i][k] * shift_side(V.rho[k][j], 1) for k in range(d)), GPoly(H.pres))
            if not H.delta(V.rho[i][j]) == lhs:
                return False
            if not H.counit(V.rho[i][j]) == (1 if i == j else 0):
                return False
    return True


def _same_algebra(V: Comodule, W: Comodule) -> None:
    if V.hopf != W.hopf:
        raise ValueError("comodules over different Hopf algebras")


def comodule_tensor(V: Comodule, W: Comodule) -> Comodule:
    _same_algebra(V, W)
    dv, dw = V.dim, W.dim
    rho = [[V.rho[i][j] * W.rho[k][l] for j in range(dv) for l in range(dw)]
           for i in range(dv) for k in range(dw)]
    return Comodule(V.hopf, rho)


def comodule_dual(V: Comodule) -> Comodule:
    H = V.hopf
    return Comodule(H, [[normalize(H.antipode(V.rho[j][i]), H.n) for j in range(V.dim)] for i in range(V.dim)])


def comodule_sum(V: Comodule, W: Comodule) -> Comodule:
    _same_algebra(V, W)
    z = GPoly(V.hopf.pres)
    rho = [list(r) + [z] * W.dim for r in V.rho] + [[z] * V.dim + list(r) for r in W.rho]
    return Comodule(V.hopf, rho)


def comodule_constructions(V: Comodule, W: Comodule) -> Dict[str, Comodule]:
    return {"tensor": comodule_tensor(V, W), "dual": comodule_dual(V), "direct_sum": comodule_sum(V, W)}


# -- the filtration L_{r,s,p} ----------------------------------------------------

@dataclass
class FiltrationReport:
    n: int
    r: int
    s: int
    p: int
    words: List[Tuple[int, ...]]
    basis: List[GPoly]
    certificate: bool
    equivariance: bool
    dim_check: Optional[bool]
    failures: List[dict]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ok(self) -> bool:
        return self.certificate and self.equivariance and self.dim_check is not False

    def to_json(self) -> dict:
        return {"n": self.n, "r": self.r, "s": self.s, "p": self.p, "dim": self.dim,
                "words": [list(w) for w in self.words], "basis": [str(b) for b in self.basis],
                "certificate": self.certificate, "equivariance": self.equivariance,
                "dim_check": self.dim_check, "failures": self.failures}


def _monomials(vars_: Sequence[Ind], degree: int) -> Iterator[Mono]:
    for combo in itertools.combinations_with_replacement(vars_, degree):
        acc: Dict[Ind, int] = {}
        for v in combo:
            acc[v] = acc.get(v, 0) + 1
        yield tuple(sorted(acc.items()))


def _n_multichoose(k: int, d: int) -> int:
    from math import comb
    return comb(k + d - 1, d) if k else (1 if d == 0 else 0)


class Filtration:
    """D_e^r times the monomials of degree s in x_{ij,w}, |w| <= p."""

    def __init__(self, H: GLnDiffHopf, r: int, s: int, p: int, cap: int = 20000):
        if min(r, s, p) < 0:
            raise ValueError("r, s, p must be nonnegative")
        self.H, self.r, self.s, self.p = H, r, s, p
        self.words = [tuple(w.exps) for w in words_up_to(H.pres, p)]
        n = H.n
        self.vars = [(0, "x", (i, j), w) for w in self.words for i in range(1, n + 1) for j in range(1, n + 1)]
        size = _n_multichoose(len(self.vars), s)
        if size > cap:
            raise BasisTooLarge(f"basis of size {size} exceeds cap {cap}")
        self.e = (0,) * H.pres.m
        self.varset = set(self.vars)

    def basis(self) -> List[GPoly]:
        H = self.H
        Dr = H.D(self.e) ** self.r
        return [Dr * GPoly(H.pres, {m: 1}) for m in _monomials(self.vars, self.s)]

    def monomial_in_span(self, mono: Mono, side: int = 0) -> bool:
        """Whether the side-``side`` part of a monomial is a basis monomial."""
        deg = 0
        dpow = 0
        for (sd, kind, idx, w), e in mono:
            if sd != side:
                continue
            if kind == "D":
                if w != self.e:
                    return False
                dpow += e
            elif (0, kind, idx, w) in self.varset:
                deg += e
            else:
                return False
        return deg == self.s and dpow == self.r

    def contains(self, f: GPoly) -> bool:
        """Membership of an arbitrary element: f * det_e^r must be a degree-s form in the allowed x."""
        g = normalize(f * self.H.det(self.e) ** self.r, self.H.n)
        return all(_plain_in_span(self, m) for m in g.terms)


def _plain_in_span(L: Filtration, mono: Mono) -> bool:
    deg = 0
    for k, e in mono:
        if k not in L.varset:
            return False
        deg += e
    return deg == L.s


def _split_sides(f: GPoly) -> Dict[Mono, GPoly]:
    """Group by the side-1 monomial: f = sum left_m (x) m."""
    out: Dict[Mono, Dict[Mono, mpq]] = {}
    for m, c in f.terms.items():
        left = tuple(t for t in m if t[0][0] == 0)
        right = tuple(t for t in m if t[0][0] != 0)
        bucket = out.setdefault(right, {})
        bucket[left] = bucket.get(left, 0) + c
    return {k: GPoly(f.pres, v) for k, v in out.items()}


def L_filtration(n: int, r: int, s: int, p: int, pres: AbelianPresentation | None = None,
                 cap: int = 20000) -> FiltrationReport:
    pres = pres or AbelianPresentation(1, ())
    H = GLnDiffHopf(n, pres)
    L = Filtration(H, r, s, p, cap)
    basis = L.basis()
    failures: List[dict] = []
    cert = True
    for b in basis:
        for right, left in _split_sides(H.delta(b)).items():
            if left.is_syntactic_zero():
                continue
            if not all(L.monomial_in_span(m) for m in left.terms):
                cert = False
                failures.append({"check": "subcomodule", "element": str(b), "left": str(left)})
                break
    # phi_{i,w}: v_j -> x_{ij,w} intertwines rho of the w-twisted standard comodule with Delta
    equiv = True
    for w in L.words:
        V = standard_comodule(H, w)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                lhs = sum((H.x(i, k, w) * shift_side(V.rho[k - 1][j - 1], 1) for k in range(1, n + 1)),
                          GPoly(pres))
                if not lhs == H.delta(H.x(i, j, w)):
                    equiv = False
                    failures.append({"check": "equivariance", "i": i, "j": j, "word": list(w)})
    dim_check = None
    if (r, s) == (0, 1):
        dim_check = len(basis) == n * (n * len(L.words))
        if not dim_check:
            failures.append({"check": "dimension", "dim": len(basis), "expected": n * n * len(L.words)})
    return FiltrationReport(n, r, s, p, L.words, basis, cert, equiv, dim_check, failures)
