"""Finite action data, its coherence checks, and extension to the whole semigroup.

Conventions.  ``exchange[(i, j)]`` for i > j is the iso T_i o T_j => T_j o T_i;
exchanges with i < j are identities.  ``torsion[j]`` is T_{n+j}^{n_j} => Id.
The composite c_{f,g} : T(f) o T(g) => T(fg) is obtained by replaying the
exchange schedule of (f, g): each swap contributes a whiskered exchange iso,
each torsion reduction a whiskered torsion iso.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from ..semigroup import (
    AbelianPresentation,
    Word,
    exchange_schedule,
    generator_string,
    multiply,
    words_up_to,
)
from .core import (
    BlockFunctor,
    Coeffs,
    Composite,
    EvalCategory,
    Mat,
    NatIso,
    check_naturality,
    compare,
    hcompose,
    mat_eq,
    mfmt,
    nat_identity,
    nat_inverse,
    vcompose,
    vcompose_all,
    whisker,
    whisker_left,
    whisker_right,
)


@dataclass
class ActionData:
    category: EvalCategory
    presentation: AbelianPresentation
    functors: List[BlockFunctor]
    exchange: Dict[Tuple[int, int], NatIso]
    torsion: List[NatIso] = field(default_factory=list)

    def __post_init__(self):
        pres = self.presentation
        m = pres.m
        if len(self.functors) != m:
            raise ValueError(f"need {m} generator functors, got {len(self.functors)}")
        names = [f.name for f in self.functors]
        if len(set(names)) != m:
            raise ValueError("generator functor names must be distinct")
        for i in range(1, m + 1):
            for j in range(1, i):
                eta = self.exchange.get((i, j))
                if eta is None:
                    raise ValueError(f"missing exchange iso for ({i},{j})")
                if eta.src != (self.T(i), self.T(j)) or eta.tgt != (self.T(j), self.T(i)):
                    raise ValueError(f"exchange ({i},{j}) has signature {eta.signature()}")
        extra = set(self.exchange) - {(i, j) for i in range(1, m + 1) for j in range(1, i)}
        if extra:
            raise ValueError(f"exchange isos only exist for i > j, got {sorted(extra)}")
        if len(self.torsion) != len(pres.torsion):
            raise ValueError(f"need {len(pres.torsion)} torsion isos, got {len(self.torsion)}")
        for j, (n_j, iso) in enumerate(zip(pres.torsion, self.torsion), start=1):
            if n_j < 2:
                raise ValueError("torsion moduli of an action must be >= 2")
            t = self.T(pres.free + j)
            if t.pad:
                raise ValueError(f"torsion generator {t.name} must have pad 0 (T^n is iso to Id)")
            if iso.src != (t,) * n_j or iso.tgt != ():
                raise ValueError(f"torsion iso {j} has signature {iso.signature()}")

    @property
    def coeffs(self) -> Coeffs:
        return self.category.coeffs

    def T(self, i: int) -> BlockFunctor:
        return self.functors[i - 1]

    def composite(self, string: Sequence[int]) -> Composite:
        return tuple(self.functors[i - 1] for i in string)

    def word_composite(self, w: Word) -> Composite:
        return self.composite(generator_string(w))

    def all_isos(self) -> List[Tuple[str, NatIso]]:
        out = [(f"i{i}{j}", eta) for (i, j), eta in sorted(self.exchange.items())]
        out += [(f"I{j}", iso) for j, iso in enumerate(self.torsion, start=1)]
        return out


# -- finite checks --------------------------------------------------------------

def hexagon_paths(data: ActionData, i1: int, i2: int, i3: int) -> Tuple[NatIso, NatIso]:
    """Both paths T3 T2 T1 => T1 T2 T3 for generators i1 < i2 < i3."""
    C = data.coeffs
    T1, T2, T3 = data.T(i1), data.T(i2), data.T(i3)
    i32, i31, i21 = data.exchange[(i3, i2)], data.exchange[(i3, i1)], data.exchange[(i2, i1)]
    upper = vcompose_all([
        whisker_right(i32, (T1,), C),
        whisker_left((T2,), i31, C),
        whisker_right(i21, (T3,), C),
    ], C)
    lower = vcompose_all([
        whisker_left((T3,), i21, C),
        whisker_right(i31, (T2,), C),
        whisker_left((T1,), i32, C),
    ], C)
    return upper, lower


def check_hexagon(data: ActionData) -> List[dict]:
    report = []
    for i1, i2, i3 in itertools.combinations(range(1, data.presentation.m + 1), 3):
        upper, lower = hexagon_paths(data, i1, i2, i3)
        for fail in compare(upper, lower, data.category):
            report.append({"check": "hexagon", "triple": [i1, i2, i3], **fail})
    return report


def torsion_sides(data: ActionData, j: int) -> Tuple[NatIso, NatIso]:
    """(I o id_T, id_T o I) as isos T^{n+1} => T."""
    C = data.coeffs
    t = data.T(data.presentation.free + j)
    iso = data.torsion[j - 1]
    return whisker_right(iso, (t,), C), whisker_left((t,), iso, C)


def check_torsion(data: ActionData) -> List[dict]:
    report = []
    for j in range(1, len(data.presentation.torsion) + 1):
        a, b = torsion_sides(data, j)
        for fail in compare(a, b, data.category):
            report.append({"check": "torsion", "generator": data.presentation.free + j, **fail})
    return report


def _exchange(data: ActionData, i: int, j: int) -> NatIso:
    """T_i T_j => T_j T_i for any i != j (inverse of the stored iso if i < j)."""
    if i > j:
        return data.exchange[(i, j)]
    return nat_inverse(data.exchange[(j, i)], data.coeffs)


def torsion_exchange_sides(data: ActionData, j: int, k: int) -> Tuple[NatIso, NatIso]:
    """Two isos T_k T_t^n => T_k for the torsion generator t = a_{n+j}.

    One side carries T_k to the right through all n copies of T_t with the
    exchange isos and then collapses T_t^n; the other collapses directly.
    """
    C = data.coeffs
    pres = data.presentation
    t = pres.free + j
    n = pres.torsion[j - 1]
    Tk, Tt = data.T(k), data.T(t)
    iso = data.torsion[j - 1]
    steps = []
    for p in range(n):
        steps.append(whisker((Tt,) * p, _exchange(data, k, t), (Tt,) * (n - 1 - p), C))
    steps.append(whisker_right(iso, (Tk,), C))
    moved = vcompose_all(steps, C)
    direct = whisker_left((Tk,), iso, C)
    return moved, direct


def check_torsion_exchange(data: ActionData) -> List[dict]:
    """Compatibility of each torsion iso with the exchanges through it.

    This condition is implied by associativity of the extended action but
    is not a consequence of the hexagon and torsion squares alone.
    """
    report = []
    pres = data.presentation
    for j in range(1, len(pres.torsion) + 1):
        t = pres.free + j
        for k in range(1, pres.m + 1):
            if k == t:
                continue
            a, b = torsion_exchange_sides(data, j, k)
            for fail in compare(a, b, data.category):
                report.append({"check": "torsion-exchange", "torsion": t, "other": k, **fail})
    return report


def check_data_naturality(data: ActionData) -> List[dict]:
    report = []
    for name, eta in data.all_isos():
        for fail in check_naturality(eta, data.category):
            report.append({"check": "naturality", "name": name, **fail})
    return report


# -- extension -------------------------------------------------------------------

class AbelianAction:
    """The extended action T(w), c_{f,g} for all words, with memoized c."""

    def __init__(self, data: ActionData):
        self.data = data
        self._cache: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], NatIso] = {}

    @property
    def coeffs(self) -> Coeffs:
        return self.data.coeffs

    def T(self, w: Word) -> Composite:
        return self.data.word_composite(w)

    def c(self, f: Word, g: Word) -> NatIso:
        key = (f.exps, g.exps)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = extend_iso(self.data, f, g)
        return hit


def extend_iso(data: ActionData, w1: Word, w2: Word) -> NatIso:
    """c_{w1,w2} by replaying the exchange schedule."""
    C = data.coeffs
    pres = data.presentation
    string = generator_string(w1) + generator_string(w2)
    current = nat_identity(data.composite(string), C)
    for st in exchange_schedule(w1, w2):
        p = st.position
        if st.kind == "swap":
            step = whisker(data.composite(string[:p]), data.exchange[(st.i, st.j)], data.composite(string[p + 2:]), C)
            string[p], string[p + 1] = string[p + 1], string[p]
        elif st.kind == "torsion_reduce":
            n = pres.modulus(st.i)
            step = whisker(data.composite(string[:p]), data.torsion[st.j - 1], data.composite(string[p + n:]), C)
            del string[p : p + n]
        else:
            continue
        current = vcompose(step, current, C)
    return current


def assoc_sides(action, f, g, h, mul: Callable) -> Tuple[NatIso, NatIso]:
    """(c_{fg,h} o (c_{f,g} * id_h), c_{f,gh} o (id_f * c_{g,h}))."""
    C = action.coeffs
    lhs = vcompose(action.c(mul(f, g), h), whisker_right(action.c(f, g), action.T(h), C), C)
    rhs = vcompose(action.c(f, mul(g, h)), whisker_left(action.T(f), action.c(g, h), C), C)
    return lhs, rhs


def _assoc_chunk(data: ActionData, triples: List[Tuple[Tuple[int, ...], ...]], max_failures: int) -> List[dict]:
    action = AbelianAction(data)
    pres = data.presentation
    out = []
    for fe, ge, he in triples:
        f, g, h = Word(pres, fe), Word(pres, ge), Word(pres, he)
        lhs, rhs = assoc_sides(action, f, g, h, multiply)
        for fail in compare(lhs, rhs, data.category):
            out.append({"check": "associativity", "triple": [list(fe), list(ge), list(he)], **fail})
            if len(out) >= max_failures:
                return out
    return out


def worker_count() -> int:
    raw = os.environ.get("TANNAKIT_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def verify_associativity(data: ActionData, max_len: int, *, max_failures: int = 50,
                         workers: Optional[int] = None) -> List[dict]:
    """Brute-force check of the associativity square for all word triples."""
    words = [w.exps for w in words_up_to(data.presentation, max_len)]
    triples = list(itertools.product(words, repeat=3))
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(triples) < 200:
        return _assoc_chunk(data, triples, max_failures)
    chunks = [triples[k::workers] for k in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(_assoc_chunk, [data] * workers, chunks, [max_failures] * workers))
    merged = [r for part in parts for r in part]
    order = {t: k for k, t in enumerate(triples)}
    merged.sort(key=lambda r: order[tuple(tuple(x) for x in r["triple"])])
    return merged[:max_failures]


# -- restriction ------------------------------------------------------------------

def restrict_generators(c: Callable, composite: Callable, gen: Callable, pres: AbelianPresentation,
                        C: Coeffs, functors: Sequence[BlockFunctor], category: EvalCategory) -> ActionData:
    """Recover (T(a), i, I) from an extended action.

    ``gen(i, k)`` is the word a_i^k, ``c(f, g)`` the extended iso and
    ``composite(w)`` the functor string of a word.  i_{ij} := c_{a_j,a_i}^{-1}
    o c_{a_i,a_j} and I_j := c_{a,a^{n-1}} o ... o (T^{n-2} * c_{a,a}).
    """
    exchange = {}
    for i in range(1, pres.m + 1):
        for j in range(1, i):
            ai, aj = gen(i, 1), gen(j, 1)
            exchange[(i, j)] = vcompose(nat_inverse(c(aj, ai), C), c(ai, aj), C)
    torsion = []
    for jj, n in enumerate(pres.torsion, start=1):
        i = pres.free + jj
        a = gen(i, 1)
        Ta = composite(a)
        steps = []
        for k in range(1, n):
            steps.append(whisker_left(Ta * (n - 1 - k), c(a, gen(i, k)), C))
        torsion.append(vcompose_all(steps, C))
    return ActionData(category, pres, list(functors), exchange, torsion)


def restrict(action: AbelianAction) -> ActionData:
    data = action.data
    pres = data.presentation

    def gen(i, k):
        ex = [0] * pres.m
        mod = pres.modulus(i)
        ex[i - 1] = k % mod if mod else k
        return Word(pres, ex)

    return restrict_generators(action.c, action.T, gen, pres, data.coeffs,
                               data.functors, data.category)


def data_equal(a: ActionData, b: ActionData) -> bool:
    """Exact equality of two finite data sets (same category assumed)."""
    if a.presentation != b.presentation or a.functors != b.functors:
        return False
    for key in a.exchange:
        x, y = a.exchange[key], b.exchange[key]
        if not (mat_eq(x.block, y.block) and x.scale == y.scale):
            return False
    for x, y in zip(a.torsion, b.torsion):
        if not (mat_eq(x.block, y.block) and x.scale == y.scale):
            return False
    return True


# -- morphisms of actions ---------------------------------------------------------

def hpower(isos: Sequence[NatIso], C: Coeffs) -> NatIso:
    acc = isos[0]
    for nxt in isos[1:]:
        acc = hcompose(acc, nxt, C)
    return acc


def check_action_morphism(T: ActionData, T2: ActionData, m: Dict[int, NatIso]) -> List[dict]:
    """Squares for a morphism family m_i : T(a_i) => T2(a_i).

    For i > j:  i2_{ij} o (m_i * m_j) = (m_j * m_i) o i_{ij};
    for torsion generators:  I2_j o m^{*n} = I_j.
    """
    if T.presentation != T2.presentation:
        raise ValueError("actions over different presentations")
    C = T.coeffs
    pres = T.presentation
    for i in range(1, pres.m + 1):
        if m[i].src != (T.T(i),) or m[i].tgt != (T2.T(i),):
            raise ValueError(f"m_{i} has signature {m[i].signature()}")
    report = []
    for (i, j), eta in sorted(T.exchange.items()):
        lhs = vcompose(T2.exchange[(i, j)], hcompose(m[i], m[j], C), C)
        rhs = vcompose(hcompose(m[j], m[i], C), eta, C)
        for fail in compare(lhs, rhs, T.category):
            report.append({"check": "morphism-exchange", "pair": [i, j], **fail})
    for jj, n in enumerate(pres.torsion, start=1):
        i = pres.free + jj
        lhs = vcompose(T2.torsion[jj - 1], hpower([m[i]] * n, C), C)
        for fail in compare(lhs, T.torsion[jj - 1], T.category):
            report.append({"check": "morphism-torsion", "generator": i, **fail})
    return report


def check_extended_morphism(T: ActionData, T2: ActionData, m: Dict[int, NatIso], max_len: int) -> List[dict]:
    """m_{fg} o c_{f,g} = c2_{f,g} o (m_f * m_g) for the extended family m_w."""
    C = T.coeffs
    A, A2 = AbelianAction(T), AbelianAction(T2)

    def mw(w: Word) -> NatIso:
        s = generator_string(w)
        if not s:
            return nat_identity((), C)
        return hpower([m[i] for i in s], C)

    report = []
    for f, g in itertools.product(words_up_to(T.presentation, max_len), repeat=2):
        lhs = vcompose(mw(multiply(f, g)), A.c(f, g), C)
        rhs = vcompose(A2.c(f, g), hcompose(mw(f), mw(g), C), C)
        for fail in compare(lhs, rhs, T.category):
            report.append({"check": "morphism-extended", "pair": [list(f.exps), list(g.exps)], **fail})
    return report


def replace_functor(data: ActionData, i: int, F: BlockFunctor, I: NatIso) -> Tuple[ActionData, Dict[int, NatIso]]:
    """Swap T(a_i) for an isomorphic F via I : F => T(a_i).

    Returns the transported data and the isomorphism family m with
    m_i = I^{-1} and m_k = id otherwise.
    """
    C = data.coeffs
    Ti = data.T(i)
    if I.src != (F,) or I.tgt != (Ti,):
        raise ValueError(f"I must be F => T(a_{i}), got {I.signature()}")
    Iinv = nat_inverse(I, C)
    functors = list(data.functors)
    functors[i - 1] = F
    new_exchange = {}
    for (a, b), eta in data.exchange.items():
        if a == i:
            Tb = data.T(b)
            new_exchange[(a, b)] = vcompose_all([whisker_right(I, (Tb,), C), eta, whisker_left((Tb,), Iinv, C)], C)
        elif b == i:
            Ta = data.T(a)
            new_exchange[(a, b)] = vcompose_all([whisker_left((Ta,), I, C), eta, whisker_right(Iinv, (Ta,), C)], C)
        else:
            new_exchange[(a, b)] = eta
    torsion = list(data.torsion)
    pres = data.presentation
    if i > pres.free:
        jj = i - pres.free
        n = pres.torsion[jj - 1]
        torsion[jj - 1] = vcompose(data.torsion[jj - 1], hpower([I] * n, C), C)
    new = ActionData(data.category, pres, functors, new_exchange, torsion)
    m = {k: nat_identity((data.T(k),), C) for k in range(1, pres.m + 1)}
    m[i] = Iinv
    return new, m


def transport(data: ActionData, m: Dict[int, NatIso], functors: Sequence[BlockFunctor]) -> ActionData:
    """Conjugate the data along isos m_i : T(a_i) => functors[i-1]."""
    C = data.coeffs
    pres = data.presentation
    new_exchange = {}
    for (i, j), eta in data.exchange.items():
        new_exchange[(i, j)] = vcompose_all(
            [hcompose(nat_inverse(m[i], C), nat_inverse(m[j], C), C), eta, hcompose(m[j], m[i], C)], C)
    torsion = []
    for jj, n in enumerate(pres.torsion, start=1):
        k = pres.free + jj
        torsion.append(vcompose(data.torsion[jj - 1], hpower([nat_inverse(m[k], C)] * n, C), C))
    return ActionData(data.category, pres, list(functors), new_exchange, torsion)
