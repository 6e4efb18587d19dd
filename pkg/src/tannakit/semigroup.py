"""Words in N^n x Z/n_1 x ... x Z/n_r and in finite free products of such.

A word is stored as its exponent vector (d_1, ..., d_m) with the torsion
entries reduced.  The generator string of a word is a_1^{d_1} ... a_m^{d_m},
read as the composite T(a_1)^{d_1} o ... o T(a_m)^{d_m} (leftmost outermost).

The exchange schedule of (w1, w2) rewrites the concatenated string of w1 and
w2 into the string of w1*w2.  Blocks of w1 are moved right starting from the
highest generator; inside a block the rightmost copy moves first, one
adjacent transposition at a time.  When a block reaches its partner in w2 a
``merge`` marker is recorded, and if a torsion exponent reaches its modulus
the leftmost n_j copies are removed by ``torsion_reduce``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, Iterator, List, Mapping, Sequence, Tuple


class PresentationMismatch(ValueError):
    pass


@dataclass(frozen=True)
class AbelianPresentation:
    free: int = 0
    torsion: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(t) for t in self.torsion))
        if self.free < 0:
            raise ValueError("free rank must be nonnegative")
        if any(t < 1 for t in self.torsion):
            raise ValueError("torsion moduli must be >= 1")

    @property
    def m(self) -> int:
        return self.free + len(self.torsion)

    def modulus(self, i: int) -> int | None:
        """Modulus of generator i (1-based), or None for a free generator."""
        self._check_index(i)
        return None if i <= self.free else self.torsion[i - self.free - 1]

    def _check_index(self, i: int) -> None:
        if not 1 <= i <= self.m:
            raise IndexError(f"generator index {i} outside 1..{self.m}")

    def identity(self) -> "Word":
        return Word(self, (0,) * self.m)

    def generator(self, i: int) -> "Word":
        return normalize_word(self, [i])

    def word(self, exps: Sequence[int]) -> "Word":
        return Word(self, tuple(exps))

    def to_json(self) -> dict:
        return {"free": self.free, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, data: Mapping) -> "AbelianPresentation":
        extra = set(data) - {"free", "torsion"}
        if extra:
            raise ValueError(f"unknown presentation keys {sorted(extra)}")
        free = data.get("free", 0)
        torsion = data.get("torsion", [])
        if not isinstance(free, int) or isinstance(free, bool) or not isinstance(torsion, list):
            raise ValueError("presentation needs an integer 'free' and a list 'torsion'")
        return cls(free, tuple(torsion))

    def __str__(self) -> str:
        parts = ["N"] * self.free + [f"Z/{t}" for t in self.torsion]
        return " x ".join(parts) if parts else "{e}"


@dataclass(frozen=True)
class Word:
    pres: AbelianPresentation
    exps: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exps", tuple(int(e) for e in self.exps))
        if len(self.exps) != self.pres.m:
            raise ValueError(f"word {self.exps} has wrong length for {self.pres}")
        for i, e in enumerate(self.exps, start=1):
            if e < 0:
                raise ValueError("exponents must be nonnegative")
            mod = self.pres.modulus(i)
            if mod is not None and e >= mod:
                raise ValueError(f"exponent {e} of generator {i} not reduced mod {mod}")

    def is_identity(self) -> bool:
        return not any(self.exps)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def to_json(self) -> list:
        return list(self.exps)

    def __str__(self) -> str:
        return word_string(self)


def normalize_word(pres: AbelianPresentation, raw: Iterable[int]) -> Word:
    exps = [0] * pres.m
    for i in raw:
        pres._check_index(i)
        exps[i - 1] += 1
    return Word(pres, _reduce(pres, exps))


def _reduce(pres: AbelianPresentation, exps: Sequence[int]) -> Tuple[int, ...]:
    out = list(exps)
    for j, mod in enumerate(pres.torsion):
        out[pres.free + j] %= mod
    return tuple(out)


def multiply(w1: Word, w2: Word) -> Word:
    if w1.pres != w2.pres:
        raise PresentationMismatch(f"{w1.pres} vs {w2.pres}")
    return Word(w1.pres, _reduce(w1.pres, [a + b for a, b in zip(w1.exps, w2.exps)]))


def word_length(w: Word) -> int:
    return sum(w.exps)


def generator_string(w: Word) -> List[int]:
    """The string a_1^{d_1} ... a_m^{d_m} as a list of generator indices."""
    out: List[int] = []
    for i, e in enumerate(w.exps, start=1):
        out.extend([i] * e)
    return out


def word_string(w: Word) -> str:
    parts = []
    for i, e in enumerate(w.exps, start=1):
        if e == 1:
            parts.append(f"a{i}")
        elif e:
            parts.append(f"a{i}^{e}")
    return "*".join(parts) if parts else "e"


def words_up_to(pres: AbelianPresentation, max_len: int) -> List[Word]:
    """All words of length <= max_len, ordered by length then exponents."""
    ranges = []
    for i in range(1, pres.m + 1):
        mod = pres.modulus(i)
        top = max_len if mod is None else min(max_len, mod - 1)
        ranges.append(range(top + 1))
    words = [Word(pres, ex) for ex in itertools.product(*ranges) if sum(ex) <= max_len]
    words.sort(key=lambda w: (word_length(w), w.exps))
    return words


# -- exchange schedules -------------------------------------------------------

@dataclass(frozen=True)
class ExchangeStep:
    """One rewriting step on a generator string.

    kind ``swap``: positions (position, position+1) hold (a_i, a_j), i > j,
    and are exchanged.  kind ``torsion_reduce``: the n_j copies of a_i
    starting at ``position`` are deleted (``j`` is the torsion index).
    kind ``merge``: the block of a_i starting at ``position`` is complete.
    """

    kind: str
    position: int
    i: int
    j: int = 0

    def to_json(self) -> dict:
        return {"kind": self.kind, "position": self.position, "i": self.i, "j": self.j}


def exchange_schedule(w1: Word, w2: Word) -> List[ExchangeStep]:
    if w1.pres != w2.pres:
        raise PresentationMismatch(f"{w1.pres} vs {w2.pres}")
    pres = w1.pres
    m = pres.m
    s, q = w1.exps, w2.exps
    steps: List[ExchangeStep] = []
    if w1.is_identity() or w2.is_identity():
        return steps
    # Layout while processing generator i (going down from m):
    #   a_1^{s_1} .. a_i^{s_i} | a_1^{q_1} .. a_{i-1}^{q_{i-1}} a_i^{q_i} | merged tail
    for i in range(m, 0, -1):
        start = sum(s[: i - 1])          # first copy of a_i^{s_i}
        lower = sum(q[: i - 1])          # lower-index generators to cross
        if s[i - 1] and lower:
            # copy c sits at start+c with the lower block immediately right of it
            crossing = [_generator_at(q, t, i) for t in range(lower)]
            for copy in range(s[i - 1] - 1, -1, -1):
                for t, j in enumerate(crossing):
                    steps.append(ExchangeStep("swap", start + copy + t, i, j))
        if s[i - 1] and q[i - 1]:
            block = start + lower
            steps.append(ExchangeStep("merge", block, i))
            mod = pres.modulus(i)
            if mod is not None and s[i - 1] + q[i - 1] >= mod:
                steps.append(ExchangeStep("torsion_reduce", block, i, i - pres.free))
    return steps


def _generator_at(q: Sequence[int], offset: int, i: int) -> int:
    """Index of the generator at ``offset`` inside a_1^{q_1} .. a_{i-1}^{q_{i-1}}."""
    acc = 0
    for j in range(1, i):
        acc += q[j - 1]
        if offset < acc:
            return j
    raise AssertionError("offset outside the lower block")


def apply_schedule(w1: Word, w2: Word, steps: Sequence[ExchangeStep]) -> List[int]:
    """Replay a schedule as literal string rewriting; validates every step."""
    pres = w1.pres
    string = generator_string(w1) + generator_string(w2)
    for st in steps:
        p = st.position
        if st.kind == "swap":
            if not (st.i > st.j and string[p] == st.i and string[p + 1] == st.j):
                raise ValueError(f"invalid swap {st} on {string}")
            string[p], string[p + 1] = string[p + 1], string[p]
        elif st.kind == "torsion_reduce":
            mod = pres.modulus(st.i)
            if mod is None or string[p : p + mod] != [st.i] * mod:
                raise ValueError(f"invalid torsion reduction {st} on {string}")
            del string[p : p + mod]
        elif st.kind == "merge":
            if string[p] != st.i:
                raise ValueError(f"invalid merge marker {st} on {string}")
        else:
            raise ValueError(f"unknown step kind {st.kind!r}")
    return string


# -- free products -------------------------------------------------------------

@dataclass(frozen=True)
class FreeProduct:
    """Registry of factor presentations, keyed by factor id."""

    factors: Tuple[Tuple[Hashable, AbelianPresentation], ...]

    @classmethod
    def of(cls, factors: Mapping[Hashable, AbelianPresentation]) -> "FreeProduct":
        return cls(tuple(factors.items()))

    def presentation(self, fid: Hashable) -> AbelianPresentation:
        for k, p in self.factors:
            if k == fid:
                return p
        raise KeyError(f"unknown factor id {fid!r}")

    def ids(self) -> Tuple[Hashable, ...]:
        return tuple(k for k, _ in self.factors)


@dataclass(frozen=True)
class FreeProductWord:
    fp: FreeProduct
    blocks: Tuple[Tuple[Hashable, Word], ...] = field(default=())

    def __post_init__(self):
        prev = None
        for fid, w in self.blocks:
            if w.pres != self.fp.presentation(fid):
                raise PresentationMismatch(f"block word {w} not in factor {fid!r}")
            if w.is_identity():
                raise ValueError("identity block in a reduced free-product word")
            if fid == prev:
                raise ValueError("adjacent blocks from the same factor")
            prev = fid

    def is_identity(self) -> bool:
        return not self.blocks

    def __mul__(self, other: "FreeProductWord") -> "FreeProductWord":
        return fp_multiply(self, other)

    def block_length(self) -> int:
        return len(self.blocks)

    def to_json(self) -> list:
        return [{"factor": fid, "word": w.to_json()} for fid, w in self.blocks]

    @classmethod
    def from_json(cls, fp: FreeProduct, data: list) -> "FreeProductWord":
        return fp_normalize(fp, [(d["factor"], fp.presentation(d["factor"]).word(d["word"])) for d in data])

    def __str__(self) -> str:
        if not self.blocks:
            return "e"
        return " ".join(f"[{fid}:{word_string(w)}]" for fid, w in self.blocks)


def fp_normalize(fp: FreeProduct, blocks: Iterable[Tuple[Hashable, Word]]) -> FreeProductWord:
    """Merge adjacent same-factor blocks and drop identities (repeatedly)."""
    stack: List[Tuple[Hashable, Word]] = []
    for fid, w in blocks:
        if w.pres != fp.presentation(fid):
            raise PresentationMismatch(f"block word {w} not in factor {fid!r}")
        if w.is_identity():
            continue
        if stack and stack[-1][0] == fid:
            merged = multiply(stack[-1][1], w)
            stack.pop()
            if not merged.is_identity():
                stack.append((fid, merged))
        else:
            stack.append((fid, w))
    return FreeProductWord(fp, tuple(stack))


def fp_multiply(f: FreeProductWord, g: FreeProductWord) -> FreeProductWord:
    if f.fp != g.fp:
        raise PresentationMismatch("free-product words over different registries")
    return fp_normalize(f.fp, f.blocks + g.blocks)


def fp_words_up_to(fp: FreeProduct, max_blocks: int, max_len: int = 1) -> List[FreeProductWord]:
    """Reduced words with at most ``max_blocks`` blocks, each of length <= max_len."""
    per = {fid: [w for w in words_up_to(p, max_len) if not w.is_identity()] for fid, p in fp.factors}
    out = [FreeProductWord(fp, ())]
    frontier = [()]
    for _ in range(max_blocks):
        nxt = []
        for blocks in frontier:
            last = blocks[-1][0] if blocks else None
            for fid in fp.ids():
                if fid == last:
                    continue
                for w in per[fid]:
                    nb = blocks + ((fid, w),)
                    nxt.append(nb)
                    out.append(FreeProductWord(fp, nb))
        frontier = nxt
    return out
