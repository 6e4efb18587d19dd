"""Evaluation categories, block functors and natural isomorphisms.

An evaluation category is a finite skeleton of Vect_K: objects are named
spaces K^d and a few generating morphisms are given as matrices.  Every
functor used here has the block shape

    F(V) = K^k  (+)  sigma(V),      F(phi) = id_k (+) sigma(phi)

for a pad size k and an optional coefficient substitution sigma.  A natural
isomorphism between two composites of such functors with equal total pad K
is determined by a K x K matrix P and a scalar s: its component at an object
of dimension d is P (+) s*I_d.  Off-diagonal blocks are forced to vanish by
naturality against zero maps, so nothing is lost by this representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Sequence, Tuple

from gmpy2 import mpq

from ..field import RatField, RatFunc, SubstEndo, parse_ratfunc, rf_substitute

Mat = List[List[Any]]


# -- coefficients -------------------------------------------------------------

class Coeffs:
    """Coefficient field of an evaluation category."""

    vars: Tuple[str, ...] = ()

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def parse(self, text):
        raise NotImplementedError

    def fmt(self, x) -> str:
        return str(x)

    def substitute(self, sigma: SubstEndo | None, x):
        raise NotImplementedError

    def is_zero(self, x) -> bool:
        return x == 0

    def to_json(self) -> dict:
        raise NotImplementedError


class QQCoeffs(Coeffs):
    """QQ with gmpy2 rationals; no twists."""

    def zero(self):
        return mpq(0)

    def one(self):
        return mpq(1)

    def parse(self, text):
        if isinstance(text, (int, Fraction)):
            return mpq(text)
        if isinstance(text, str):
            return mpq(Fraction(text.strip()))
        if isinstance(text, type(mpq())):
            return text
        raise ValueError(f"cannot read {text!r} as a rational number")

    def substitute(self, sigma, x):
        if sigma is not None and not sigma.is_identity():
            raise ValueError("coefficient twist requires a rational-function field")
        return x

    def to_json(self) -> dict:
        return {"vars": []}

    def __eq__(self, other):
        return isinstance(other, QQCoeffs)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


class RatCoeffs(Coeffs):
    """QQ(vars) with rational-function entries."""

    def __init__(self, variables: Sequence[str]):
        self.vars = tuple(variables)
        self.field = RatField(self.vars)

    def zero(self):
        return RatFunc.const(self.vars, 0)

    def one(self):
        return RatFunc.const(self.vars, 1)

    def parse(self, text):
        if isinstance(text, RatFunc):
            return text
        if isinstance(text, int):
            return RatFunc.const(self.vars, text)
        return parse_ratfunc(text, self.vars)

    def substitute(self, sigma, x):
        if sigma is None:
            return x
        return rf_substitute(x, sigma)

    def is_zero(self, x) -> bool:
        return x.is_zero()

    def to_json(self) -> dict:
        return {"vars": list(self.vars)}

    def __eq__(self, other):
        return isinstance(other, RatCoeffs) and other.vars == self.vars

    def __hash__(self):
        return hash(self.vars)

    def __repr__(self):
        return f"QQ({', '.join(self.vars)})"


def coeffs_for(variables: Sequence[str]) -> Coeffs:
    return RatCoeffs(variables) if variables else QQCoeffs()


# -- small dense matrix kit over a Coeffs -------------------------------------

def eye(C: Coeffs, k: int) -> Mat:
    return [[C.one() if i == j else C.zero() for j in range(k)] for i in range(k)]


def mmul(a: Mat, b: Mat, C: Coeffs) -> Mat:
    if not a:
        return []
    n, k, p = len(a), len(b), (len(b[0]) if b else 0)
    if len(a[0]) != k:
        raise ValueError(f"shape mismatch {n}x{len(a[0])} * {k}x{p}")
    out = []
    for i in range(n):
        ai = a[i]
        row = [C.zero()] * p
        for l in range(k):
            x = ai[l]
            if C.is_zero(x):
                continue
            bl = b[l]
            for j in range(p):
                y = bl[j]
                if not C.is_zero(y):
                    row[j] = row[j] + x * y
        out.append(row)
    return out


def dsum(a: Mat, b: Mat, C: Coeffs) -> Mat:
    n, m = len(a), len(b)
    out = [list(r) + [C.zero()] * m for r in a]
    out += [[C.zero()] * n + list(r) for r in b]
    return out


def scalar_eye(C: Coeffs, s, k: int) -> Mat:
    return [[s if i == j else C.zero() for j in range(k)] for i in range(k)]


def mat_eq(a: Mat, b: Mat) -> bool:
    return len(a) == len(b) and all(
        len(ra) == len(rb) and all(x == y for x, y in zip(ra, rb)) for ra, rb in zip(a, b)
    )


def msub(a: Mat, b: Mat) -> Mat:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def minv(a: Mat, C: Coeffs) -> Mat:
    """Gauss-Jordan inverse over the coefficient field."""
    n = len(a)
    work = [list(r) + [C.one() if i == j else C.zero() for j in range(n)] for i, r in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if not C.is_zero(work[r][c])), None)
        if piv is None:
            raise ArithmeticError("singular block matrix")
        work[c], work[piv] = work[piv], work[c]
        inv = C.one() / work[c][c]
        work[c] = [x * inv for x in work[c]]
        for r in range(n):
            if r != c and not C.is_zero(work[r][c]):
                f = work[r][c]
                work[r] = [x - f * y for x, y in zip(work[r], work[c])]
    return [row[n:] for row in work]


def mfmt(a: Mat, C: Coeffs) -> list:
    return [[C.fmt(x) for x in row] for row in a]


def mparse(rows, C: Coeffs) -> Mat:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ValueError("matrix must be a list of rows")
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix")
    return [[C.parse(x) for x in row] for row in rows]


# -- the category -------------------------------------------------------------

@dataclass
class Morphism:
    name: str
    src: int
    tgt: int
    matrix: Mat


@dataclass
class EvalCategory:
    coeffs: Coeffs
    objects: List[Tuple[str, int]]
    morphisms: List[Morphism] = field(default_factory=list)

    def __post_init__(self):
        for mor in self.morphisms:
            rows = self.objects[mor.tgt][1]
            cols = self.objects[mor.src][1]
            if len(mor.matrix) != rows or any(len(r) != cols for r in mor.matrix):
                raise ValueError(f"morphism {mor.name} does not have shape {rows}x{cols}")

    @classmethod
    def vect(cls, coeffs: Coeffs, dims: Sequence[int] = (0, 1, 2), morphisms: Sequence[Tuple[int, int, Mat]] = ()):
        objs = [(f"V{d}" if dims.count(d) == 1 else f"V{d}_{i}", d) for i, d in enumerate(dims)]
        mors = [Morphism(f"f{k}", s, t, m) for k, (s, t, m) in enumerate(morphisms)]
        return cls(coeffs, objs, mors)

    def dims(self) -> List[int]:
        return [d for _, d in self.objects]

    def has_positive_dim(self) -> bool:
        return any(d > 0 for _, d in self.objects)

    def to_json(self) -> dict:
        C = self.coeffs
        return {
            "field": C.to_json(),
            "objects": [{"name": n, "dim": d} for n, d in self.objects],
            "morphisms": [
                {"name": m.name, "src": m.src, "tgt": m.tgt, "matrix": mfmt(m.matrix, C)} for m in self.morphisms
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "EvalCategory":
        fvars = data.get("field", {}).get("vars", [])
        C = coeffs_for(fvars)
        objs = [(o["name"], int(o["dim"])) for o in data["objects"]]
        mors = [Morphism(m.get("name", f"f{k}"), int(m["src"]), int(m["tgt"]), mparse(m["matrix"], C))
                for k, m in enumerate(data.get("morphisms", []))]
        return cls(C, objs, mors)


# -- functors ----------------------------------------------------------------

@dataclass(frozen=True)
class BlockFunctor:
    """V -> K^pad (+) twist(V)."""

    name: str
    pad: int = 0
    twist: SubstEndo | None = field(default=None, compare=False, hash=False)

    def apply_dim(self, d: int) -> int:
        return self.pad + d

    def apply_matrix(self, C: Coeffs, phi: Mat, rows: int, cols: int) -> Mat:
        tw = [[C.substitute(self.twist, x) for x in r] for r in phi]
        out = [[C.one() if i == j else C.zero() for j in range(self.pad + cols)] for i in range(self.pad)]
        for r in range(rows):
            out.append([C.zero()] * self.pad + tw[r])
        return out

    def to_json(self) -> dict:
        return {"name": self.name, "pad": self.pad, "twist": self.twist.to_json() if self.twist else None}


Composite = Tuple[BlockFunctor, ...]


def total_pad(fs: Composite) -> int:
    return sum(f.pad for f in fs)


def apply_composite_dim(fs: Composite, d: int) -> int:
    return total_pad(fs) + d


def apply_composite(fs: Composite, C: Coeffs, phi: Mat, rows: int, cols: int) -> Mat:
    """F1 o ... o Fp applied to a morphism (Fp acts first)."""
    for f in reversed(fs):
        phi = f.apply_matrix(C, phi, rows, cols)
        rows += f.pad
        cols += f.pad
    return phi


# -- natural isomorphisms ----------------------------------------------------

@dataclass
class NatIso:
    """Natural iso src => tgt with components block (+) scale * I."""

    src: Composite
    tgt: Composite
    block: Mat
    scale: Any

    def __post_init__(self):
        k = total_pad(self.src)
        if total_pad(self.tgt) != k:
            raise ValueError(f"pad mismatch: {total_pad(self.src)} vs {total_pad(self.tgt)}")
        if len(self.block) != k or any(len(r) != k for r in self.block):
            raise ValueError(f"block must be {k}x{k}")

    def component(self, C: Coeffs, d: int) -> Mat:
        return dsum(self.block, scalar_eye(C, self.scale, d), C)

    def signature(self) -> str:
        def s(fs):
            return "o".join(f.name for f in fs) or "Id"
        return f"{s(self.src)} => {s(self.tgt)}"


def nat_identity(fs: Composite, C: Coeffs) -> NatIso:
    return NatIso(tuple(fs), tuple(fs), eye(C, total_pad(fs)), C.one())


def whisker_left(fs: Composite, eta: NatIso, C: Coeffs) -> NatIso:
    """F o eta: components F(eta_X)."""
    block, s = eta.block, eta.scale
    for f in reversed(fs):
        tw = [[C.substitute(f.twist, x) for x in r] for r in block]
        block = dsum(eye(C, f.pad), tw, C)
        s = C.substitute(f.twist, s)
    return NatIso(tuple(fs) + eta.src, tuple(fs) + eta.tgt, block, s)


def whisker_right(eta: NatIso, gs: Composite, C: Coeffs) -> NatIso:
    """eta o G: components eta_{G(X)}."""
    block = dsum(eta.block, scalar_eye(C, eta.scale, total_pad(gs)), C)
    return NatIso(eta.src + tuple(gs), eta.tgt + tuple(gs), block, eta.scale)


def whisker(fs: Composite, eta: NatIso, gs: Composite, C: Coeffs) -> NatIso:
    return whisker_right(whisker_left(fs, eta, C), gs, C) if gs else whisker_left(fs, eta, C)


def vcompose(theta: NatIso, eta: NatIso, C: Coeffs) -> NatIso:
    """theta o eta (eta first)."""
    if eta.tgt != theta.src:
        raise ValueError(f"cannot compose {theta.signature()} after {eta.signature()}")
    return NatIso(eta.src, theta.tgt, mmul(theta.block, eta.block, C), theta.scale * eta.scale)


def vcompose_all(isos: Sequence[NatIso], C: Coeffs) -> NatIso:
    """isos[-1] o ... o isos[0]."""
    acc = isos[0]
    for nxt in isos[1:]:
        acc = vcompose(nxt, acc, C)
    return acc


def hcompose(alpha: NatIso, beta: NatIso, C: Coeffs) -> NatIso:
    """alpha * beta : F o G => F' o G'."""
    return vcompose(whisker_left(alpha.tgt, beta, C), whisker_right(alpha, beta.src, C), C)


def nat_inverse(eta: NatIso, C: Coeffs) -> NatIso:
    return NatIso(eta.tgt, eta.src, minv(eta.block, C), C.one() / eta.scale)


def compare(eta: NatIso, theta: NatIso, cat: EvalCategory) -> List[dict]:
    """Objects where the components differ, with residual matrices."""
    C = cat.coeffs
    if eta.src != theta.src or eta.tgt != theta.tgt:
        raise ValueError(f"comparing {eta.signature()} with {theta.signature()}")
    blocks_ok = mat_eq(eta.block, theta.block)
    scales_ok = eta.scale == theta.scale
    if blocks_ok and scales_ok:
        return []
    out = []
    for name, d in cat.objects:
        if blocks_ok and d == 0:
            continue
        a, b = eta.component(C, d), theta.component(C, d)
        out.append({"object": name, "residual": mfmt(msub(a, b), C), "lhs": mfmt(a, C), "rhs": mfmt(b, C)})
    return out


def check_naturality(eta: NatIso, cat: EvalCategory) -> List[dict]:
    """Naturality squares G(phi) eta_X = eta_Y F(phi) on generating morphisms."""
    C = cat.coeffs
    failures = []
    for mor in cat.morphisms:
        dx, dy = cat.objects[mor.src][1], cat.objects[mor.tgt][1]
        if dx == 0 or dy == 0:
            continue  # the square only involves the pad block, where both sides equal P
        Fphi = apply_composite(eta.src, C, mor.matrix, dy, dx)
        Gphi = apply_composite(eta.tgt, C, mor.matrix, dy, dx)
        lhs = mmul(Gphi, eta.component(C, dx), C)
        rhs = mmul(eta.component(C, dy), Fphi, C)
        if not mat_eq(lhs, rhs):
            failures.append({"iso": eta.signature(), "morphism": mor.name, "residual": mfmt(msub(lhs, rhs), C)})
    return failures


def check_functor_laws(f: BlockFunctor, cat: EvalCategory) -> bool:
    """F(id) = id and F(phi psi) = F(phi) F(psi) on composable generators."""
    C = cat.coeffs
    for _, d in cat.objects:
        if not mat_eq(f.apply_matrix(C, eye(C, d), d, d), eye(C, f.pad + d)):
            return False
    for a in cat.morphisms:
        for b in cat.morphisms:
            if b.tgt != a.src:
                continue
            dx = cat.objects[b.src][1]
            dy = cat.objects[b.tgt][1]
            dz = cat.objects[a.tgt][1]
            if dx == 0 or dz == 0:
                continue
            prod = mmul(a.matrix, b.matrix, C) if dy else [[C.zero()] * dx for _ in range(dz)]
            lhs = f.apply_matrix(C, prod, dz, dx)
            fa = f.apply_matrix(C, a.matrix, dz, dy)
            fb = f.apply_matrix(C, b.matrix, dy, dx)
            if not mat_eq(lhs, mmul(fa, fb, C)):
                return False
    return True
