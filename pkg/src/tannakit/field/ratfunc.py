"""Rational functions over QQ, derivations and substitution endomorphisms.

Fractions are kept unreduced: there is no multivariate gcd.  After every
operation the pair is normalized cheaply (rational content moved into the
numerator, denominator made primitive with positive leading coefficient,
common monomial factors stripped, exact divisibility tried when one side
is a single term or the two sides coincide up to scale).  Equality is
decided by cross-multiplication.
"""

from __future__ import annotations

from typing import Dict, Iterable, Mapping, Sequence, Tuple

from gmpy2 import mpq

from .poly import MultiPoly, VariableMismatch, to_qq


class RatFunc:
    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None, *, normalize: bool = True):
        if den is None:
            den = MultiPoly.one(num.vars)
        if num.vars != den.vars:
            raise VariableMismatch(f"{num.vars} vs {den.vars}")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        self.num = num
        self.den = den
        if normalize:
            self._normalize()

    # -- construction -----------------------------------------------------
    @classmethod
    def const(cls, variables: Sequence[str], c) -> "RatFunc":
        return cls(MultiPoly.const(variables, c), normalize=False)

    @classmethod
    def var(cls, variables: Sequence[str], name: str) -> "RatFunc":
        return cls(MultiPoly.var(variables, name), normalize=False)

    @property
    def vars(self) -> Tuple[str, ...]:
        return self.num.vars

    def _normalize(self) -> None:
        num, den = self.num, self.den
        if num.is_zero():
            self.den = MultiPoly.one(num.vars)
            return
        if den.is_constant():
            c = den.constant_value()
            if c != 1:
                self.num = num * (1 / c)
                self.den = MultiPoly.one(num.vars)
            return
        # common monomial factor
        gn = num.monomial_gcd_key()
        if gn:
            gd = den.monomial_gcd_key()
            if gd:
                lay = num._lay
                g = lay.pack([min(a, b) for a, b in zip(lay.unpack(gn), lay.unpack(gd))])
                if g:
                    num = num.shift_down(g)
                    den = den.shift_down(g)
        # cheap exact cancellations
        if len(den.terms) <= len(num.terms) and den.total_degree() <= num.total_degree():
            q = num.try_div(den)
            if q is not None:
                self.num = q
                self.den = MultiPoly.one(num.vars)
                return
        elif num.total_degree() <= den.total_degree():
            q = den.try_div(num)
            if q is not None:
                num = MultiPoly.one(num.vars)
                den = q
        c = den.content()
        if den.leading_coefficient() < 0:
            c = -c
        if c != 1:
            inv = 1 / c
            num = num * inv
            den = den * inv
        self.num = num
        self.den = den

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            if other.vars != self.vars:
                raise VariableMismatch(f"{self.vars} vs {other.vars}")
            return other
        if isinstance(other, MultiPoly):
            return RatFunc(other, normalize=False)
        return RatFunc.const(self.vars, other)

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        """True iff the function has no variable dependence (checked exactly)."""
        if self.num.is_zero():
            return True
        if self.num.is_constant() and self.den.is_constant():
            return True
        # p/q constant iff p * lc(q) == lc(p) * q
        return self.num * self.den.leading_coefficient() == self.den * self.num.leading_coefficient()

    def constant_value(self) -> mpq:
        if not self.is_constant():
            raise ValueError("not a constant")
        if self.num.is_zero():
            return mpq(0)
        return self.num.leading_coefficient() / self.den.leading_coefficient()

    def __eq__(self, other) -> bool:
        try:
            other = self._coerce(other)
        except (TypeError, VariableMismatch):
            return NotImplemented
        return rf_equals(self, other)

    __hash__ = None  # equality is not structural

    # -- arithmetic -------------------------------------------------------
    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, normalize=False)

    def __add__(self, other) -> "RatFunc":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        if o.den.is_one():
            return RatFunc(self.num + o.num * self.den, self.den)
        if self.den.is_one():
            return RatFunc(self.num * o.den + o.num, o.den)
        q = self.den.try_div(o.den) if len(self.den.terms) >= len(o.den.terms) else None
        if q is not None:
            return RatFunc(self.num + o.num * q, self.den)
        q = o.den.try_div(self.den) if len(o.den.terms) >= len(self.den.terms) else None
        if q is not None:
            return RatFunc(self.num * q + o.num, o.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RatFunc":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "RatFunc":
        return (-self) + other

    def __mul__(self, other) -> "RatFunc":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.num.is_zero() or o.num.is_zero():
            return RatFunc.const(self.vars, 0)
        a, b, c, d = self.num, self.den, o.num, o.den
        # cross-cancel a/d and c/b when exact
        if not d.is_one():
            q = a.try_div(d) if len(d.terms) <= len(a.terms) else None
            if q is not None:
                a, d = q, MultiPoly.one(d.vars)
        if not b.is_one():
            q = c.try_div(b) if len(b.terms) <= len(c.terms) else None
            if q is not None:
                c, b = q, MultiPoly.one(b.vars)
        return RatFunc(a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other) -> "RatFunc":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> "RatFunc":
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int) -> "RatFunc":
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunc(self.num ** e, self.den ** e)

    # -- misc -------------------------------------------------------------
    def variables_used(self) -> Tuple[str, ...]:
        used = set(self.num.variables_used()) | set(self.den.variables_used())
        return tuple(v for v in self.vars if v in used)

    def evaluate(self, values: Mapping[str, object]) -> mpq:
        d = self.den.evaluate(values)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at evaluation point")
        return self.num.evaluate(values) / d

    def rename(self, variables: Sequence[str]) -> "RatFunc":
        return RatFunc(self.num.rename(variables), self.den.rename(variables), normalize=False)

    def __str__(self) -> str:
        if self.den.is_one():
            return str(self.num)
        n = str(self.num)
        if len(self.num.terms) > 1:
            n = f"({n})"
        return f"{n}/({self.den})"

    def __repr__(self) -> str:
        return f"RatFunc({str(self)!r})"

    def to_json(self) -> str:
        return str(self)


def rf_equals(f: RatFunc, g: RatFunc) -> bool:
    """Cross-multiplied equality p/q == r/s iff p*s == r*q."""
    if f.vars != g.vars:
        raise VariableMismatch(f"{f.vars} vs {g.vars}")
    if f.den == g.den:
        return f.num == g.num
    return f.num * g.den == g.num * f.den


class DerivationTable:
    """A derivation given by its values on the variables (missing ones are 0)."""

    def __init__(self, variables: Sequence[str], values: Mapping[str, RatFunc | object]):
        self.vars = tuple(variables)
        unknown = set(values) - set(self.vars)
        if unknown:
            raise KeyError(f"derivation given on unknown variables {sorted(unknown)}")
        self.values: Dict[str, RatFunc] = {}
        for v in self.vars:
            val = values.get(v, 0)
            if isinstance(val, str):
                from .parse import parse_ratfunc
                val = parse_ratfunc(val, self.vars)
            elif not isinstance(val, RatFunc):
                val = RatFunc.const(self.vars, val)
            if not val.is_zero():
                self.values[v] = val

    def of(self, v: str) -> RatFunc:
        return self.values.get(v, RatFunc.const(self.vars, 0))

    def constants(self) -> Tuple[str, ...]:
        return tuple(v for v in self.vars if v not in self.values)

    def active(self) -> Tuple[str, ...]:
        return tuple(v for v in self.vars if v in self.values)

    def derive_poly(self, p: MultiPoly) -> RatFunc:
        acc = RatFunc.const(self.vars, 0)
        for v, dv in self.values.items():
            pv = p.diff(v)
            if not pv.is_zero():
                acc = acc + dv * pv
        return acc


def rf_derive(f: RatFunc, table: DerivationTable) -> RatFunc:
    """Quotient rule: (p'q - pq') / q^2."""
    if f.vars != table.vars:
        raise VariableMismatch(f"{f.vars} vs {table.vars}")
    dp = table.derive_poly(f.num)
    if f.den.is_constant():
        return dp * RatFunc.const(f.vars, 1 / f.den.constant_value())
    dq = table.derive_poly(f.den)
    q = RatFunc(f.den, normalize=False)
    return (dp * q - RatFunc(f.num, normalize=False) * dq) / (q * q)


class SubstEndo:
    """Ring endomorphism fixed by the images of (some of) the variables.

    Variables without an image are outside the domain; substituting into a
    function that mentions them raises ``KeyError``.  Constants (variables
    mapped to themselves) should be listed explicitly.
    """

    def __init__(self, variables: Sequence[str], images: Mapping[str, RatFunc | object], name: str = ""):
        self.vars = tuple(variables)
        self.name = name
        self.images: Dict[str, RatFunc] = {}
        for v, img in images.items():
            if v not in self.vars:
                raise KeyError(f"unknown variable {v!r}")
            if not isinstance(img, RatFunc):
                img = RatFunc.const(self.vars, img)
            if img.vars != self.vars:
                raise VariableMismatch(f"{img.vars} vs {self.vars}")
            self.images[v] = img

    @classmethod
    def identity(cls, variables: Sequence[str], name: str = "id") -> "SubstEndo":
        return cls(variables, {v: RatFunc.var(variables, v) for v in variables}, name)

    def is_defined_on(self, names: Iterable[str]) -> bool:
        return all(v in self.images for v in names)

    def is_identity(self) -> bool:
        for v in self.vars:
            img = self.images.get(v)
            if img is None:
                continue
            if not (img.den.is_one() and img.num == MultiPoly.var(self.vars, v)):
                return False
        return True

    def apply_poly(self, p: MultiPoly, degs: Dict[str, int]) -> MultiPoly:
        """Numerator of sigma(p) over the common denominator prod q_v**degs[v]."""
        lay = p._lay
        idx = [i for i, v in enumerate(self.vars) if degs.get(v, 0)]
        nums: Dict[int, list] = {}
        dens: Dict[int, list] = {}
        for i in idx:
            img = self.images[self.vars[i]]
            D = degs[self.vars[i]]
            pw = [MultiPoly.one(self.vars)]
            for _ in range(D):
                pw.append(pw[-1] * img.num)
            nums[i] = pw
            qw = [MultiPoly.one(self.vars)]
            if not img.den.is_one():
                for _ in range(D):
                    qw.append(qw[-1] * img.den)
            dens[i] = qw
        acc = MultiPoly.zero(self.vars)
        for k, c in p.terms.items():
            ex = list(lay.unpack(k))
            for i in idx:
                ex[i] = 0
            t = MultiPoly(self.vars, {lay.pack(ex): c}, _trusted=True)
            for i in idx:
                e = lay.exp(k, i)
                D = degs[self.vars[i]]
                if e:
                    t = t * nums[i][e]
                qw = dens[i]
                if len(qw) > 1 and D - e:
                    t = t * qw[D - e]
            acc = acc + t
        return acc

    def __call__(self, f: RatFunc) -> RatFunc:
        return rf_substitute(f, self)

    def compose(self, inner: "SubstEndo", name: str = "") -> "SubstEndo":
        """self o inner: first apply inner, then self."""
        if inner.vars != self.vars:
            raise VariableMismatch(f"{inner.vars} vs {self.vars}")
        images = {}
        for v, img in inner.images.items():
            if self.is_defined_on(img.variables_used()):
                images[v] = self(img)
        return SubstEndo(self.vars, images, name or f"{self.name}*{inner.name}")

    def to_json(self) -> dict:
        return {v: str(img) for v, img in self.images.items()}

    def __repr__(self) -> str:
        body = ", ".join(f"{v}->{img}" for v, img in self.images.items())
        return f"SubstEndo({self.name or '?'}: {body})"


def rf_substitute(f: RatFunc, sigma: SubstEndo) -> RatFunc:
    """Image of f under sigma, computed with a shared denominator."""
    if f.vars != sigma.vars:
        raise VariableMismatch(f"{f.vars} vs {sigma.vars}")
    used = f.variables_used()
    missing = [v for v in used if v not in sigma.images]
    if missing:
        raise KeyError(f"substitution undefined on {missing}")
    degs = {}
    for v in used:
        img = sigma.images[v]
        if img.den.is_one() and img.num == MultiPoly.var(sigma.vars, v):
            continue
        degs[v] = max(f.num.degree_in(v), f.den.degree_in(v))
    if not degs:
        return f
    num = sigma.apply_poly(f.num, degs)
    den = sigma.apply_poly(f.den, degs)
    if den.is_zero():
        raise ZeroDivisionError("substitution sends the denominator to zero")
    return RatFunc(num, den)


class NoCommutationFactor(ValueError):
    """No single lambda satisfies d(sigma v) = lambda * sigma(d v) for all v."""


def commutation_factor(sigma: SubstEndo, table: DerivationTable) -> RatFunc:
    """The lambda with d o sigma = lambda * sigma o d on the variables.

    Only variables in the domain of sigma are consulted; a variable where
    both sides vanish imposes nothing.  Returns 1 when unconstrained.
    """
    if sigma.vars != table.vars:
        raise VariableMismatch(f"{sigma.vars} vs {table.vars}")
    lam = None
    for v in sigma.vars:
        if v not in sigma.images:
            continue
        lhs = rf_derive(sigma.images[v], table)
        dv = table.of(v)
        if not sigma.is_defined_on(dv.variables_used()):
            raise NoCommutationFactor(f"substitution undefined on the derivative of {v}")
        rhs = rf_substitute(dv, sigma)
        if rhs.is_zero():
            if lhs.is_zero():
                continue
            raise NoCommutationFactor(f"d(sigma {v}) != 0 but sigma(d {v}) = 0")
        cand = lhs / rhs
        if lam is None:
            lam = cand
        elif not rf_equals(lam, cand):
            raise NoCommutationFactor(f"factor {cand} at {v} differs from {lam}")
    return lam if lam is not None else RatFunc.const(sigma.vars, 1)


class RatField:
    """QQ(vars): a convenience namespace for building elements."""

    def __init__(self, variables: Sequence[str]):
        self.vars = tuple(variables)

    def __call__(self, x) -> RatFunc:
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, str):
            from .parse import parse_ratfunc
            return parse_ratfunc(x, self.vars)
        if isinstance(x, MultiPoly):
            return RatFunc(x)
        return RatFunc.const(self.vars, x)

    def var(self, name: str) -> RatFunc:
        return RatFunc.var(self.vars, name)

    def gens(self) -> Tuple[RatFunc, ...]:
        return tuple(self.var(v) for v in self.vars)

    def zero(self) -> RatFunc:
        return RatFunc.const(self.vars, 0)

    def one(self) -> RatFunc:
        return RatFunc.const(self.vars, 1)

    def poly(self, x) -> MultiPoly:
        r = self(x)
        if not r.den.is_constant():
            raise ValueError(f"{x!r} is not a polynomial")
        return r.num * (1 / r.den.constant_value())

    def __eq__(self, other) -> bool:
        return isinstance(other, RatField) and other.vars == self.vars

    def __hash__(self) -> int:
        return hash(self.vars)

    def __repr__(self) -> str:
        return f"QQ({', '.join(self.vars)})"


def qq(x) -> mpq:
    return to_qq(x)
