"""Domain semantics and informational consequence.

Formulas are evaluated at pairs (world, information state); the box
quantifies over the information state and leaves it untouched.  Only the
basic modal fragment is meaningful here, so anything else is rejected.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .consequence import SearchBound, SweepStats, Verdict, Witness
from .kripke import Frame, Model
from .syntax import And, Atom, Bottom, Box, Formula, Fragment, Not, fragment_of
from . import syntax


class FragmentError(ValueError):
    """A formula falls outside the fragment a semantics is defined for."""


@dataclass(frozen=True)
class DomainModel:
    """A world set with a valuation; no accessibility relation."""

    worlds: tuple[int, ...]
    valuation: tuple[tuple[str, frozenset[int]], ...]

    @classmethod
    def of(cls, worlds: Iterable[int], valuation: Mapping[str, Iterable[int]]) -> "DomainModel":
        ws = tuple(sorted(set(worlds)))
        if not ws:
            raise ValueError("a domain model needs at least one world")
        wset = set(ws)
        items = []
        for atom in sorted(valuation):
            vs = frozenset(valuation[atom])
            if not vs <= wset:
                raise ValueError(f"valuation of {atom!r} outside worlds")
            items.append((atom, vs))
        return cls(ws, tuple(items))

    def atom_set(self, name: str) -> frozenset[int]:
        return dict(self.valuation).get(name, frozenset())


InfoState = frozenset


def _require_basic(f: Formula):
    if fragment_of(f) > Fragment.BASIC:
        raise FragmentError(f"domain semantics is defined for the basic modal "
                            f"fragment only: {syntax.render(f)}")


def _sat_set(d: DomainModel, i: frozenset[int], f: Formula) -> frozenset[int]:
    """Worlds w with (w, i) satisfying f; box makes this all-or-nothing."""
    ws = frozenset(d.worlds)
    if isinstance(f, Atom):
        return d.atom_set(f.name)
    if isinstance(f, Bottom):
        return frozenset()
    if isinstance(f, Not):
        return ws - _sat_set(d, i, f.child)
    if isinstance(f, And):
        return _sat_set(d, i, f.left) & _sat_set(d, i, f.right)
    if isinstance(f, Box):
        return ws if i <= _sat_set(d, i, f.child) else frozenset()
    raise FragmentError(f"domain semantics cannot evaluate {syntax.render(f)}")


def domain_satisfies(d: DomainModel, w: int, i: Iterable[int], f: Formula) -> bool:
    """Truth of f at the pair (w, i)."""
    _require_basic(f)
    if w not in d.worlds:
        raise ValueError(f"world {w} out of range")
    state = frozenset(i)
    if not state <= set(d.worlds):
        raise ValueError("information state outside worlds")
    return w in _sat_set(d, state, f)


def info_supports(d: DomainModel, i: Iterable[int], f: Formula) -> bool:
    """Support: f holds at (w, i) for every w in i; vacuous for empty i."""
    _require_basic(f)
    state = frozenset(i)
    if not state <= set(d.worlds):
        raise ValueError("information state outside worlds")
    return state <= _sat_set(d, state, f)


def enumerate_domain_models(max_worlds: int, atoms: tuple[str, ...]) -> Iterator[DomainModel]:
    """All domain models with 1..max_worlds worlds, valuations in bitmask order."""
    for n in range(1, max_worlds + 1):
        for v in range(1 << (len(atoms) * n)):
            val = {a: frozenset(w for w in range(n) if (v >> (ai * n + w)) & 1)
                   for ai, a in enumerate(atoms)}
            yield DomainModel.of(range(n), val)


def informational_consequence(premises: Iterable[Formula], conclusion: Formula,
                              b: SearchBound) -> Verdict:
    """Support preservation over all (domain model, information state) pairs."""
    prems = tuple(premises)
    for f in prems + (conclusion,):
        _require_basic(f)
    ats = _query_atoms(prems, conclusion, b)
    t0 = time.perf_counter()
    models = 0
    for d in enumerate_domain_models(b.max_worlds, ats):
        models += 1
        n = len(d.worlds)
        for s in range(1 << n):
            state = frozenset(w for w in range(n) if (s >> w) & 1)
            if all(info_supports(d, state, g) for g in prems) and \
                    not info_supports(d, state, conclusion):
                stats = SweepStats(0, models, (time.perf_counter() - t0) * 1000)
                return Verdict(False, Witness(d, state=state), stats)
    return Verdict(True, None, SweepStats(0, models, (time.perf_counter() - t0) * 1000))


def _query_atoms(premises: tuple[Formula, ...], conclusion: Formula,
                 b: SearchBound) -> tuple[str, ...]:
    names: set[str] = set(b.atoms)
    for f in premises + (conclusion,):
        names |= syntax.atoms(f)
    return tuple(sorted(names))


def universal_model_of(d: DomainModel, i: Iterable[int]) -> Model:
    """The total relational model on a nonempty information state.

    Support of basic formulas at i coincides with global truth here.
    """
    state = sorted(set(i))
    if not state:
        raise ValueError("cannot build a model on the empty state")
    if not set(state) <= set(d.worlds):
        raise ValueError("information state outside worlds")
    frame = Frame(tuple(state), frozenset((u, v) for u in state for v in state))
    val = {a: vs & frozenset(state) for a, vs in d.valuation}
    return Model.of(frame, val)


def domain_model_to_json(d: DomainModel) -> dict:
    return {"worlds": [str(w) for w in d.worlds],
            "valuation": {a: [str(w) for w in sorted(vs)] for a, vs in d.valuation}}


def domain_model_from_json(data: dict) -> DomainModel:
    names = [str(x) for x in data["worlds"]]
    if len(set(names)) != len(names):
        raise ValueError("duplicate world names")
    index = {nm: i for i, nm in enumerate(names)}
    val = {a: {index[str(x)] for x in ws} for a, ws in data.get("valuation", {}).items()}
    return DomainModel.of(range(len(names)), val)
