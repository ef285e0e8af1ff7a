"""Update semantics: the state-update function, support, update and
sequential-update consequence, the indicative conditional, and the
translation into announcement form with its reduction back to the basic
fragment.

States shrink under update, and the empty state supports every formula
(the fixpoint test is trivially met), which is exactly what makes
sequences like "not p, might p" end in support of falsum.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .consequence import SearchBound, SweepStats, Verdict, Witness
from .domain import FragmentError
from .kripke import Frame, Model
from .syntax import (
    And,
    Announce,
    Arrow,
    Atom,
    Bottom,
    Box,
    Formula,
    Not,
    Seq,
    implies,
)
from . import syntax


@dataclass(frozen=True)
class UpdateModel:
    """A world set with a valuation; states are subsets of the worlds."""

    worlds: tuple[int, ...]
    valuation: tuple[tuple[str, frozenset[int]], ...]

    @classmethod
    def of(cls, worlds: Iterable[int], valuation: Mapping[str, Iterable[int]]) -> "UpdateModel":
        ws = tuple(sorted(set(worlds)))
        if not ws:
            raise ValueError("an update model needs at least one world")
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


_DYNAMIC_OK = (Atom, Bottom, Not, And, Box, Seq, Arrow)


def _check_dynamic(f: Formula):
    for g in syntax.subformulas(f):
        if not isinstance(g, _DYNAMIC_OK):
            raise FragmentError(f"update semantics cannot evaluate {syntax.render(g)}")


def update(u: UpdateModel, s: Iterable[int], f: Formula) -> frozenset[int]:
    """The update s[f]; always a subset of s."""
    _check_dynamic(f)
    state = frozenset(s)
    if not state <= set(u.worlds):
        raise ValueError("state outside worlds")
    return _update(u, state, f)


def _update(u: UpdateModel, s: frozenset[int], f: Formula) -> frozenset[int]:
    if isinstance(f, Atom):
        return s & u.atom_set(f.name)
    if isinstance(f, Bottom):
        return frozenset()
    if isinstance(f, Not):
        return s - _update(u, s, f.child)
    if isinstance(f, And):
        return _update(u, s, f.left) & _update(u, s, f.right)
    if isinstance(f, Seq):
        return _update(u, _update(u, s, f.left), f.right)
    if isinstance(f, Box):
        return s if _update(u, s, f.child) == s else frozenset()
    if isinstance(f, Arrow):
        left = _update(u, s, f.left)
        return s if _update(u, left, f.right) == left else frozenset()
    raise FragmentError(f"update semantics cannot evaluate {syntax.render(f)}")


def supports(u: UpdateModel, s: Iterable[int], f: Formula) -> bool:
    """s supports f when updating with f is a fixpoint."""
    state = frozenset(s)
    return update(u, state, f) == state


def enumerate_update_models(max_worlds: int, atoms: tuple[str, ...]) -> Iterator[UpdateModel]:
    for n in range(1, max_worlds + 1):
        for v in range(1 << (len(atoms) * n)):
            val = {a: frozenset(w for w in range(n) if (v >> (ai * n + w)) & 1)
                   for ai, a in enumerate(atoms)}
            yield UpdateModel.of(range(n), val)


def _query_atoms(formulas: Sequence[Formula], b: SearchBound) -> tuple[str, ...]:
    names: set[str] = set(b.atoms)
    for f in formulas:
        names |= syntax.atoms(f)
    return tuple(sorted(names))


def update_consequence(premises: Iterable[Formula], conclusion: Formula,
                       b: SearchBound) -> Verdict:
    """Support preservation over all (update model, state) pairs."""
    prems = tuple(premises)
    for f in prems + (conclusion,):
        _check_dynamic(f)
    ats = _query_atoms(prems + (conclusion,), b)
    t0 = time.perf_counter()
    models = 0
    for u in enumerate_update_models(b.max_worlds, ats):
        models += 1
        n = len(u.worlds)
        for sbits in range(1 << n):
            state = frozenset(w for w in range(n) if (sbits >> w) & 1)
            if all(supports(u, state, g) for g in prems) and \
                    not supports(u, state, conclusion):
                stats = SweepStats(0, models, (time.perf_counter() - t0) * 1000)
                return Verdict(False, Witness(u, state=state), stats)
    return Verdict(True, None, SweepStats(0, models, (time.perf_counter() - t0) * 1000))


def sequential_update_consequence(gammas: Sequence[Formula], conclusion: Formula,
                                  b: SearchBound) -> Verdict:
    """Fold the updates left to right, then require support of the conclusion."""
    gs = tuple(gammas)
    for f in gs + (conclusion,):
        _check_dynamic(f)
    ats = _query_atoms(gs + (conclusion,), b)
    t0 = time.perf_counter()
    models = 0
    for u in enumerate_update_models(b.max_worlds, ats):
        models += 1
        n = len(u.worlds)
        for sbits in range(1 << n):
            state = frozenset(w for w in range(n) if (sbits >> w) & 1)
            cur = state
            for g in gs:
                cur = update(u, cur, g)
            if not supports(u, cur, conclusion):
                stats = SweepStats(0, models, (time.perf_counter() - t0) * 1000)
                return Verdict(False, Witness(u, state=state), stats)
    return Verdict(True, None, SweepStats(0, models, (time.perf_counter() - t0) * 1000))


def arrow_expansion(f: Arrow) -> Formula:
    """The box/not/seq formula whose update coincides with the conditional."""
    return Box(Not(Seq(f.left, Not(f.right))))


def arrow_definability_check(u: UpdateModel, s: Iterable[int], f: Formula) -> bool:
    """Native conditional clause versus its box/not/seq expansion."""
    if not isinstance(f, Arrow):
        raise ValueError("expected a conditional formula")
    state = frozenset(s)
    return update(u, state, f) == update(u, state, arrow_expansion(f))


def model_from_state(u: UpdateModel, s: Iterable[int]) -> Model:
    """The total relational model on a nonempty state.

    Updates of dynamic formulas coincide with truth sets here, which is the
    bridge from update consequence to global consequence over total models.
    """
    state = sorted(set(s))
    if not state:
        raise ValueError("cannot build a model on the empty state")
    if not set(state) <= set(u.worlds):
        raise ValueError("state outside worlds")
    frame = Frame(tuple(state), frozenset((a, b) for a in state for b in state))
    val = {atom: vs & frozenset(state) for atom, vs in u.valuation}
    return Model.of(frame, val)


def update_model_of(m: Model) -> tuple[UpdateModel, frozenset[int]]:
    """Strip the relation from a total model; returns the full state too."""
    ws = m.frame.worlds
    if m.frame.rel != frozenset((a, b) for a in ws for b in ws):
        raise ValueError("the relation must be total")
    u = UpdateModel.of(ws, {a: vs for a, vs in m.valuation})
    return u, frozenset(ws)


def _rewrite_arrows(f: Formula) -> Formula:
    if isinstance(f, (Atom, Bottom)):
        return f
    if isinstance(f, Not):
        return Not(_rewrite_arrows(f.child))
    if isinstance(f, And):
        return And(_rewrite_arrows(f.left), _rewrite_arrows(f.right))
    if isinstance(f, Box):
        return Box(_rewrite_arrows(f.child))
    if isinstance(f, Seq):
        return Seq(_rewrite_arrows(f.left), _rewrite_arrows(f.right))
    if isinstance(f, Arrow):
        return _rewrite_arrows(arrow_expansion(f))
    raise FragmentError(f"cannot translate {syntax.render(f)}")


def translate_pal(f: Formula) -> Formula:
    """Replace dynamic conjunction by announcement, homomorphically.

    Conditionals are first rewritten through their definability; the output
    contains no Seq or Arrow nodes.
    """
    return _seq_to_announce(_rewrite_arrows(f))


def _seq_to_announce(f: Formula) -> Formula:
    if isinstance(f, (Atom, Bottom)):
        return f
    if isinstance(f, Not):
        return Not(_seq_to_announce(f.child))
    if isinstance(f, And):
        return And(_seq_to_announce(f.left), _seq_to_announce(f.right))
    if isinstance(f, Box):
        return Box(_seq_to_announce(f.child))
    if isinstance(f, Seq):
        return Announce(_seq_to_announce(f.left), _seq_to_announce(f.right))
    raise FragmentError(f"cannot translate {syntax.render(f)}")


_PAL_OK = (Atom, Bottom, Not, And, Box, Announce)


def pal_reduce(f: Formula) -> Formula:
    """Eliminate announcements, preserving truth sets on every model.

    Innermost announcements reduce first; each push rule strictly shrinks
    the announcement nesting, so the recursion terminates.
    """
    for g in syntax.subformulas(f):
        if not isinstance(g, _PAL_OK):
            raise FragmentError(f"reduction expects box-plus-announcement "
                                f"formulas, found {syntax.render(g)}")
    return _reduce(f)


def _reduce(f: Formula) -> Formula:
    if isinstance(f, (Atom, Bottom)):
        return f
    if isinstance(f, Not):
        return Not(_reduce(f.child))
    if isinstance(f, And):
        return And(_reduce(f.left), _reduce(f.right))
    if isinstance(f, Box):
        return Box(_reduce(f.child))
    if isinstance(f, Announce):
        ann = _reduce(f.announced)
        return _push(ann, _reduce(f.body))
    raise AssertionError(f)


def _push(ann: Formula, body: Formula) -> Formula:
    """Push one announcement through an announcement-free body."""
    if isinstance(body, Atom):
        return And(ann, body)
    if isinstance(body, Bottom):
        return Bottom()
    if isinstance(body, Not):
        return And(ann, Not(_push(ann, body.child)))
    if isinstance(body, And):
        return And(_push(ann, body.left), _push(ann, body.right))
    if isinstance(body, Box):
        return And(ann, Box(implies(ann, _push(ann, body.child))))
    raise AssertionError(body)
