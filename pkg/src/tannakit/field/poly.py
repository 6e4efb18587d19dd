"""Sparse multivariate polynomials over QQ.

Monomials are packed into a single integer: the total degree sits in the
high bits and the exponents follow in variable order, one fixed-width field
each.  Integer comparison of packed keys is then graded-lexicographic order
and monomial multiplication is integer addition.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

import gmpy2
from gmpy2 import mpq

_W = 16                      # bits per exponent field
_MAXEXP = (1 << (_W - 1)) - 1  # top bit of every field is a guard bit

QQ = mpq


class VariableMismatch(ValueError):
    """Operands live in polynomial rings with different variable lists."""


class NotDivisible(ArithmeticError):
    """Raised by exact division when the divisor does not divide."""


def to_qq(c) -> mpq:
    if isinstance(c, type(mpq())):
        return c
    if isinstance(c, Fraction):
        return mpq(c.numerator, c.denominator)
    if isinstance(c, (int, gmpy2.mpz().__class__)):
        return mpq(c)
    if isinstance(c, str):
        return mpq(Fraction(c))
    raise TypeError(f"cannot interpret {c!r} as a rational number")


class _Layout:
    """Packing parameters for a fixed variable list (shared, cached)."""

    _cache: Dict[Tuple[str, ...], "_Layout"] = {}

    def __init__(self, names: Tuple[str, ...]):
        n = len(names)
        self.names = names
        self.n = n
        self.index = {v: i for i, v in enumerate(names)}
        self.shifts = [_W * (n - 1 - i) for i in range(n)]
        self.expbits = _W * n
        self.expmask = (1 << self.expbits) - 1
        self.guard = sum(1 << (s + _W - 1) for s in self.shifts)
        self.fieldmask = (1 << _W) - 1
        self.unit = [(1 << self.expbits) | (1 << s) for s in self.shifts]

    @classmethod
    def get(cls, names: Tuple[str, ...]) -> "_Layout":
        lay = cls._cache.get(names)
        if lay is None:
            lay = cls._cache[names] = cls(names)
        return lay

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != self.n:
            raise ValueError(f"exponent vector {tuple(exps)} has wrong length for {self.names}")
        key = 0
        deg = 0
        for e, s in zip(exps, self.shifts):
            if e < 0 or e > _MAXEXP:
                raise ValueError(f"exponent {e} out of range")
            key |= e << s
            deg += e
        return (deg << self.expbits) | key

    def unpack(self, key: int) -> Tuple[int, ...]:
        m = self.fieldmask
        return tuple((key >> s) & m for s in self.shifts)

    def degree(self, key: int) -> int:
        return key >> self.expbits

    def exp(self, key: int, i: int) -> int:
        return (key >> self.shifts[i]) & self.fieldmask

    def divides(self, a: int, b: int) -> bool:
        """True iff monomial a divides monomial b."""
        eb = b & self.expmask
        ea = a & self.expmask
        g = self.guard
        return ((eb | g) - ea) & g == g


class MultiPoly:
    """Immutable sparse polynomial with rational coefficients.

    ``terms`` maps packed monomial keys to nonzero ``mpq`` coefficients.
    """

    __slots__ = ("vars", "terms", "_lay", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[int, mpq] | None = None, *, _trusted=False):
        self.vars = tuple(variables)
        self._lay = _Layout.get(self.vars)
        if terms is None:
            self.terms = {}
        elif _trusted:
            self.terms = terms
        else:
            self.terms = {k: to_qq(c) for k, c in terms.items() if c != 0}
        self._hash = None

    # -- construction -----------------------------------------------------
    @classmethod
    def zero(cls, variables: Sequence[str]) -> "MultiPoly":
        return cls(variables)

    @classmethod
    def const(cls, variables: Sequence[str], c) -> "MultiPoly":
        c = to_qq(c)
        return cls(variables, {0: c} if c else {}, _trusted=True)

    @classmethod
    def one(cls, variables: Sequence[str]) -> "MultiPoly":
        return cls.const(variables, 1)

    @classmethod
    def var(cls, variables: Sequence[str], name: str) -> "MultiPoly":
        lay = _Layout.get(tuple(variables))
        if name not in lay.index:
            raise KeyError(f"unknown variable {name!r}")
        return cls(variables, {lay.unit[lay.index[name]]: mpq(1)}, _trusted=True)

    @classmethod
    def from_exponents(cls, variables: Sequence[str], items: Iterable[Tuple[Sequence[int], object]]) -> "MultiPoly":
        lay = _Layout.get(tuple(variables))
        terms: Dict[int, mpq] = {}
        for exps, c in items:
            k = lay.pack(exps)
            terms[k] = terms.get(k, mpq(0)) + to_qq(c)
        return cls(variables, {k: c for k, c in terms.items() if c}, _trusted=True)

    def _new(self, terms: Dict[int, mpq]) -> "MultiPoly":
        return MultiPoly(self.vars, terms, _trusted=True)

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.vars != self.vars:
                raise VariableMismatch(f"{self.vars} vs {other.vars}")
            return other
        return MultiPoly.const(self.vars, other)

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self) -> mpq:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get(0, mpq(0))

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get(0) == 1

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.vars == other.vars and self.terms == other.terms
        try:
            return self.is_constant() and self.constant_value() == to_qq(other)
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic -------------------------------------------------------
    def __neg__(self) -> "MultiPoly":
        return self._new({k: -c for k, c in self.terms.items()})

    def __add__(self, other) -> "MultiPoly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        res = dict(a)
        for k, c in b.items():
            v = res.get(k)
            if v is None:
                res[k] = c
            else:
                v = v + c
                if v:
                    res[k] = v
                else:
                    del res[k]
        return self._new(res)

    __radd__ = __add__

    def __sub__(self, other) -> "MultiPoly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        res = dict(self.terms)
        for k, c in other.terms.items():
            v = res.get(k)
            if v is None:
                res[k] = -c
            else:
                v = v - c
                if v:
                    res[k] = v
                else:
                    del res[k]
        return self._new(res)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            try:
                c = to_qq(other)
            except TypeError:
                return NotImplemented
            if not c:
                return self._new({})
            return self._new({k: v * c for k, v in self.terms.items()})
        if other.vars != self.vars:
            raise VariableMismatch(f"{self.vars} vs {other.vars}")
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (kb, cb), = b.items()
            return self._new({k + kb: c * cb for k, c in a.items()})
        res: Dict[int, mpq] = {}
        get = res.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                v = get(k)
                res[k] = ca * cb if v is None else v + ca * cb
        return self._new({k: c for k, c in res.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "MultiPoly":
        if not isinstance(e, int) or e < 0:
            raise ValueError("polynomial exponent must be a nonnegative integer")
        result = MultiPoly.one(self.vars)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- structure --------------------------------------------------------
    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(self.terms) >> self._lay.expbits

    def degree_in(self, name: str) -> int:
        i = self._lay.index[name]
        if not self.terms:
            return -1
        return max(self._lay.exp(k, i) for k in self.terms)

    def variables_used(self) -> Tuple[str, ...]:
        used = set()
        for k in self.terms:
            for i, e in enumerate(self._lay.unpack(k)):
                if e:
                    used.add(i)
        return tuple(self.vars[i] for i in sorted(used))

    def leading_key(self) -> int:
        return max(self.terms)

    def leading_coefficient(self) -> mpq:
        return self.terms[max(self.terms)]

    def exponents(self) -> Iterator[Tuple[Tuple[int, ...], mpq]]:
        """Terms as (exponent tuple, coefficient), descending graded-lex."""
        for k in sorted(self.terms, reverse=True):
            yield self._lay.unpack(k), self.terms[k]

    def monomial_gcd_key(self) -> int:
        """Packed key of the gcd of all monomials (0 for the zero polynomial)."""
        if not self.terms:
            return 0
        lay = self._lay
        mins = None
        for k in self.terms:
            ex = lay.unpack(k)
            mins = ex if mins is None else tuple(min(a, b) for a, b in zip(mins, ex))
            if not any(mins):
                return 0
        return lay.pack(mins)

    def shift_down(self, key: int) -> "MultiPoly":
        """Divide by the monomial with packed key ``key`` (must divide every term)."""
        if not key:
            return self
        return self._new({k - key: c for k, c in self.terms.items()})

    def content(self) -> mpq:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self.terms:
            return mpq(1)
        g = gmpy2.mpz(0)
        l = gmpy2.mpz(1)
        for c in self.terms.values():
            g = gmpy2.gcd(g, c.numerator)
            l = gmpy2.lcm(l, c.denominator)
        return mpq(g, l)

    def exact_div(self, other: "MultiPoly") -> "MultiPoly":
        q = self.try_div(other)
        if q is None:
            raise NotDivisible("exact polynomial division failed")
        return q

    def try_div(self, other) -> "MultiPoly | None":
        """Quotient self/other if other divides self exactly, else None."""
        other = self._coerce(other)
        if not other.terms:
            raise ZeroDivisionError("polynomial division by zero")
        if not self.terms:
            return self
        if len(other.terms) == 1:
            (kd, cd), = other.terms.items()
            lay = self._lay
            out = {}
            for k, c in self.terms.items():
                if not lay.divides(kd, k):
                    return None
                out[k - kd] = c / cd
            return self._new(out)
        lay = self._lay
        lk = max(other.terms)
        lc = other.terms[lk]
        if self.total_degree() < other.total_degree():
            return None
        rem = dict(self.terms)
        quot: Dict[int, mpq] = {}
        oterms = list(other.terms.items())
        while rem:
            k = max(rem)
            if not lay.divides(lk, k):
                return None
            qk = k - lk
            qc = rem[k] / lc
            quot[qk] = qc
            for ok, oc in oterms:
                kk = ok + qk
                v = rem.get(kk)
                nv = -oc * qc if v is None else v - oc * qc
                if nv:
                    rem[kk] = nv
                else:
                    rem.pop(kk, None)
        return self._new(quot)

    def diff(self, name: str) -> "MultiPoly":
        lay = self._lay
        i = lay.index[name]
        unit = lay.unit[i]
        out = {}
        for k, c in self.terms.items():
            e = lay.exp(k, i)
            if e:
                out[k - unit] = c * e
        return self._new(out)

    def coefficients_in(self, name: str) -> Dict[int, "MultiPoly"]:
        """Split as sum_e p_e * name**e; the p_e keep the full variable list."""
        lay = self._lay
        i = lay.index[name]
        unit = lay.unit[i]
        out: Dict[int, Dict[int, mpq]] = {}
        for k, c in self.terms.items():
            e = lay.exp(k, i)
            out.setdefault(e, {})[k - e * unit] = c
        return {e: self._new(t) for e, t in out.items()}

    def evaluate(self, values: Mapping[str, object]):
        """Evaluate at rational points (all variables that occur must be given)."""
        lay = self._lay
        vals = [to_qq(values[v]) if v in values else None for v in self.vars]
        total = mpq(0)
        for k, c in self.terms.items():
            t = c
            for i, e in enumerate(lay.unpack(k)):
                if e:
                    if vals[i] is None:
                        raise KeyError(self.vars[i])
                    t *= vals[i] ** e
            total += t
        return total

    def rename(self, variables: Sequence[str]) -> "MultiPoly":
        """Re-embed into a ring whose variable list contains all used variables."""
        variables = tuple(variables)
        if variables == self.vars:
            return self
        lay = _Layout.get(variables)
        src = self._lay
        pos = []
        for i, v in enumerate(self.vars):
            pos.append(lay.index.get(v))
        out = {}
        for k, c in self.terms.items():
            ex = src.unpack(k)
            new = [0] * lay.n
            for i, e in enumerate(ex):
                if e:
                    if pos[i] is None:
                        raise VariableMismatch(f"variable {self.vars[i]!r} not in {variables}")
                    new[pos[i]] = e
            out[lay.pack(new)] = c
        return MultiPoly(variables, out, _trusted=True)

    # -- serialization ----------------------------------------------------
    def to_json(self) -> list:
        return [{"coeff": str(c), "exps": list(ex)} for ex, c in self.exponents()]

    @classmethod
    def from_json(cls, variables: Sequence[str], data: list) -> "MultiPoly":
        return cls.from_exponents(variables, ((d["exps"], Fraction(d["coeff"])) for d in data))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for ex, c in self.exponents():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.vars, ex) if e
            )
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            parts.append(("-" if neg else "+", body))
        s = parts[0][1] if parts[0][0] == "+" else "-" + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self) -> str:
        return f"MultiPoly({str(self)!r}, vars={self.vars})"
