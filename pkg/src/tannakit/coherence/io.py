"""JSON reading and writing of action data.

Layout::

    {"category": {"field": {"vars": [...]}, "objects": [{"name", "dim"}],
                  "morphisms": [{"src", "tgt", "matrix"}]},
     "presentation": {"free": n, "torsion": [...]},
     "functors": [{"name": "T1", "pad": k, "twist": {"t": "-t"} | null}],
     "exchange": {"(2,1)": {"block": [[...]], "scale": "..."}},
     "torsion": [{"block": [], "scale": "..."}]}

Isos are stored in the uniform form block (+) scale*I, which fixes the
component at every object of the category at once.
"""

from __future__ import annotations

import re
from typing import Any, Dict

from ..field import SubstEndo
from ..semigroup import AbelianPresentation
from .action import ActionData
from .core import BlockFunctor, EvalCategory, NatIso, mfmt, mparse


_PAIR = re.compile(r"^\(\s*(\d+)\s*,\s*(\d+)\s*\)$")


def iso_to_json(eta: NatIso, C) -> dict:
    return {"block": mfmt(eta.block, C), "scale": C.fmt(eta.scale)}


def functor_from_json(d: dict, k: int, category: EvalCategory) -> BlockFunctor:
    C = category.coeffs
    twist = d.get("twist")
    sigma = None
    if twist is not None:
        if not C.vars:
            raise ValueError("a functor twist needs a rational-function field")
        sigma = SubstEndo(C.vars, {v: C.parse(img) for v, img in twist.items()}, name=f"sigma_{k}")
    pad = d.get("pad", 0)
    if not isinstance(pad, int) or pad < 0:
        raise ValueError("functor pad must be a nonnegative integer")
    return BlockFunctor(d.get("name", f"T{k}"), pad, sigma)


def action_from_json(data: Dict[str, Any]) -> ActionData:
    category = EvalCategory.from_json(data.get("category", {"objects": [{"name": "V0", "dim": 0},
                                                                        {"name": "V1", "dim": 1},
                                                                        {"name": "V2", "dim": 2}]}))
    C = category.coeffs
    pres = AbelianPresentation.from_json(data["presentation"])
    functors = [functor_from_json(d, k, category) for k, d in enumerate(data["functors"], start=1)]
    exchange = {}
    for key, val in data.get("exchange", {}).items():
        m = _PAIR.match(key)
        if not m:
            raise ValueError(f"exchange key {key!r} is not of the form '(i,j)'")
        i, j = int(m.group(1)), int(m.group(2))
        if not (1 <= j < i <= pres.m):
            raise ValueError(f"exchange key {key!r} needs 1 <= j < i <= {pres.m}")
        exchange[(i, j)] = NatIso((functors[i - 1], functors[j - 1]), (functors[j - 1], functors[i - 1]),
                                  mparse(val.get("block", []), C), C.parse(val.get("scale", "1")))
    torsion = []
    for jj, val in enumerate(data.get("torsion", []), start=1):
        t = functors[pres.free + jj - 1]
        n = pres.torsion[jj - 1]
        torsion.append(NatIso((t,) * n, (), mparse(val.get("block", []), C), C.parse(val.get("scale", "1"))))
    return ActionData(category, pres, functors, exchange, torsion)


def action_to_json(data: ActionData) -> dict:
    C = data.coeffs
    return {
        "category": data.category.to_json(),
        "presentation": data.presentation.to_json(),
        "functors": [f.to_json() for f in data.functors],
        "exchange": {f"({i},{j})": iso_to_json(eta, C) for (i, j), eta in sorted(data.exchange.items())},
        "torsion": [iso_to_json(iso, C) for iso in data.torsion],
    }
