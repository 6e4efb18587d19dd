"""Actions of finite free products assembled from actions of the factors.

T([u_1, ..., u_r]) is the composite T(u_1) o ... o T(u_r) of the factor
actions.  c_{f,g} is the identity unless the last block of f and the first
block of g lie in the same factor; then the factor's c_{u,u'} is whiskered
by the remaining blocks.  If u*u' collapses to the identity (possible with
torsion) the blocks now meeting at the seam are merged the same way, and so
on until no merge is left.
"""

from __future__ import annotations

import itertools
from typing import Dict, Hashable, List, Tuple

from ..semigroup import FreeProduct, FreeProductWord, Word, fp_multiply, fp_words_up_to, multiply
from .action import ActionData, AbelianAction, assoc_sides, data_equal, restrict_generators
from .core import Coeffs, Composite, NatIso, compare, nat_identity, vcompose, whisker


class FreeProductAction:
    def __init__(self, fp: FreeProduct, factors: Dict[Hashable, ActionData]):
        if set(factors) != set(fp.ids()):
            raise ValueError("one action per factor is required")
        cats = [d.category for d in factors.values()]
        if any(c is not cats[0] for c in cats[1:]):
            raise ValueError("factor actions must share the same evaluation category")
        names = [f.name for d in factors.values() for f in d.functors]
        if len(set(names)) != len(names):
            raise ValueError("generator functor names must be distinct across factors")
        for fid, d in factors.items():
            if d.presentation != fp.presentation(fid):
                raise ValueError(f"factor {fid!r}: presentation mismatch")
        self.fp = fp
        self.factors = dict(factors)
        self.actions = {fid: AbelianAction(d) for fid, d in factors.items()}
        self.category = cats[0]
        self._cache: Dict[Tuple, NatIso] = {}

    @property
    def coeffs(self) -> Coeffs:
        return self.category.coeffs

    def _blocks_composite(self, blocks) -> Composite:
        out: Composite = ()
        for fid, w in blocks:
            out += self.actions[fid].T(w)
        return out

    def T(self, f: FreeProductWord) -> Composite:
        return self._blocks_composite(f.blocks)

    def c(self, f: FreeProductWord, g: FreeProductWord) -> NatIso:
        key = (f.blocks, g.blocks)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = self._compute_c(f, g)
        return hit

    def _compute_c(self, f: FreeProductWord, g: FreeProductWord) -> NatIso:
        C = self.coeffs
        left, right = list(f.blocks), list(g.blocks)
        current = nat_identity(self.T(f) + self.T(g), C)
        while left and right and left[-1][0] == right[0][0]:
            fid = left[-1][0]
            u, v = left[-1][1], right[0][1]
            step = whisker(self._blocks_composite(left[:-1]), self.actions[fid].c(u, v),
                           self._blocks_composite(right[1:]), C)
            current = vcompose(step, current, C)
            uv = multiply(u, v)
            if uv.is_identity():
                left.pop()
                right.pop(0)
                continue
            left[-1] = (fid, uv)
            right.pop(0)
            break
        if current.tgt != self.T(fp_multiply(f, g)):
            raise AssertionError("free-product composite does not land in T(fg)")
        return current


def combine_free_product(fp: FreeProduct, factors: Dict[Hashable, ActionData]) -> FreeProductAction:
    return FreeProductAction(fp, factors)


def restrict_free_product(action: FreeProductAction) -> Dict[Hashable, ActionData]:
    """Restriction to each factor, computed from the free-product c only."""
    out = {}
    fp = action.fp
    for fid, data in action.factors.items():
        pres = data.presentation

        def gen(i, k, fid=fid, pres=pres):
            ex = [0] * pres.m
            mod = pres.modulus(i)
            ex[i - 1] = k % mod if mod else k
            w = Word(pres, ex)
            return FreeProductWord(fp, ((fid, w),) if not w.is_identity() else ())

        out[fid] = restrict_generators(action.c, action.T, gen, pres,
                                       action.coeffs, data.functors, data.category)
    return out


def restriction_is_identity(action: FreeProductAction) -> bool:
    back = restrict_free_product(action)
    return all(data_equal(back[fid], action.factors[fid]) for fid in action.factors)


def verify_fp_associativity(action: FreeProductAction, max_total_blocks: int = 4, block_len: int = 2,
                            max_failures: int = 50) -> List[dict]:
    """Associativity square for all triples with total block count <= max_total_blocks."""
    words = fp_words_up_to(action.fp, max_total_blocks, block_len)
    by_len: Dict[int, list] = {}
    for w in words:
        by_len.setdefault(w.block_length(), []).append(w)
    report = []
    for lf, lg, lh in itertools.product(range(max_total_blocks + 1), repeat=3):
        if lf + lg + lh > max_total_blocks:
            continue
        for f, g, h in itertools.product(by_len.get(lf, []), by_len.get(lg, []), by_len.get(lh, [])):
            lhs, rhs = assoc_sides(action, f, g, h, fp_multiply)
            for fail in compare(lhs, rhs, action.category):
                report.append({"check": "fp-associativity", "triple": [str(f), str(g), str(h)], **fail})
                if len(report) >= max_failures:
                    return report
    return report
