"""Finite frames and models, the satisfaction relation, and model surgery.

This module is the semantic reference: everything here is written for
auditability (plain sets, short recursions) and doubles as the oracle that
the vectorized sweep kernels are tested against.  Worlds are integers; they
are usually dense 0..n-1 but submodel constructions keep the original ids,
so sparse world sets are legal.

Model files are JSON::

    {"worlds": ["0", "1"], "relation": [["0", "1"]], "valuation": {"p": ["1"]}}

World names are strings in files and are mapped to dense integer ids in
file order; round-tripping preserves the names.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .syntax import (
    And,
    Announce,
    Arrow,
    Atom,
    Bottom,
    Box,
    BoxPlus,
    Exist,
    Formula,
    Not,
    Only,
    Seq,
    Univ,
)

Relation = frozenset[tuple[int, int]]


@dataclass(frozen=True)
class Frame:
    """A finite frame (W, R). names, when present, aligns with worlds."""

    worlds: tuple[int, ...]
    rel: Relation
    names: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        ws = self.worlds
        if tuple(sorted(set(ws))) != ws:
            raise ValueError("worlds must be sorted and duplicate-free")
        wset = set(ws)
        for u, v in self.rel:
            if u not in wset or v not in wset:
                raise ValueError(f"relation pair ({u},{v}) outside worlds")
        if self.names is not None and len(self.names) != len(ws):
            raise ValueError("names must align with worlds")

    @classmethod
    def of(cls, worlds: Iterable[int], rel: Iterable[tuple[int, int]],
           names: Iterable[str] | None = None) -> "Frame":
        return cls(tuple(sorted(set(worlds))), frozenset((u, v) for u, v in rel),
                   tuple(names) if names is not None else None)

    @property
    def n(self) -> int:
        return len(self.worlds)

    @cached_property
    def _index(self) -> dict[int, int]:
        return {w: i for i, w in enumerate(self.worlds)}

    @cached_property
    def rel_mask(self) -> int:
        """Relation as a bitmask over positional indices; bit u*n+v."""
        idx, n = self._index, self.n
        mask = 0
        for u, v in self.rel:
            mask |= 1 << (idx[u] * n + idx[v])
        return mask

    @cached_property
    def succ_masks(self) -> tuple[int, ...]:
        """Per-world successor bitmasks over positional indices."""
        idx, n = self._index, self.n
        rows = [0] * n
        for u, v in self.rel:
            rows[idx[u]] |= 1 << idx[v]
        return tuple(rows)

    def successors(self, w: int) -> frozenset[int]:
        return frozenset(v for u, v in self.rel if u == w)

    def canonical_key(self) -> tuple[int, int, tuple[int, ...]]:
        """Total order on frames: (size, relation bitmask, world ids)."""
        return (self.n, self.rel_mask, self.worlds)

    def world_name(self, w: int) -> str:
        return self.names[self._index[w]] if self.names is not None else str(w)


@dataclass(frozen=True)
class Model:
    """A frame with a valuation; valuation is stored sorted for hashability."""

    frame: Frame
    valuation: tuple[tuple[str, frozenset[int]], ...]

    @classmethod
    def of(cls, frame: Frame, valuation: Mapping[str, Iterable[int]]) -> "Model":
        wset = set(frame.worlds)
        items = []
        for atom in sorted(valuation):
            vs = frozenset(valuation[atom])
            if not vs <= wset:
                raise ValueError(f"valuation of {atom!r} outside worlds")
            items.append((atom, vs))
        return cls(frame, tuple(items))

    @cached_property
    def _val(self) -> dict[str, frozenset[int]]:
        return dict(self.valuation)

    def atom_set(self, name: str) -> frozenset[int]:
        return self._val.get(name, frozenset())

    @property
    def worlds(self) -> tuple[int, ...]:
        return self.frame.worlds


@dataclass(frozen=True)
class PointedModel:
    model: Model
    world: int

    def __post_init__(self):
        if self.world not in self.model.frame.worlds:
            raise ValueError(f"world {self.world} not in model")


def reflexive_transitive_closure(rel: Iterable[tuple[int, int]],
                                 worlds: Iterable[int]) -> Relation:
    """Least reflexive transitive superset of rel on the given worlds."""
    ws = list(worlds)
    reach = {w: {w} for w in ws}
    for u, v in rel:
        reach[u].add(v)
    changed = True
    while changed:
        changed = False
        for w in ws:
            new = set()
            for u in reach[w]:
                new |= reach[u]
            if not new <= reach[w]:
                reach[w] |= new
                changed = True
    return frozenset((w, u) for w in ws for u in reach[w])


def reachable_set(frame: Frame, w: int) -> frozenset[int]:
    """Worlds reachable from w in finitely many steps, including w."""
    seen = {w}
    todo = [w]
    while todo:
        u = todo.pop()
        for v in frame.successors(u):
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return frozenset(seen)


def truth_set(m: Model, f: Formula) -> frozenset[int]:
    """All worlds of m satisfying f."""
    ws = frozenset(m.frame.worlds)
    if isinstance(f, Atom):
        return m.atom_set(f.name)
    if isinstance(f, Bottom):
        return frozenset()
    if isinstance(f, Not):
        return ws - truth_set(m, f.child)
    if isinstance(f, And):
        return truth_set(m, f.left) & truth_set(m, f.right)
    if isinstance(f, Box):
        t = truth_set(m, f.child)
        return frozenset(w for w in ws if m.frame.successors(w) <= t)
    if isinstance(f, BoxPlus):
        t = truth_set(m, f.child)
        return frozenset(w for w in ws if reachable_set(m.frame, w) <= t)
    if isinstance(f, Univ):
        return ws if truth_set(m, f.child) == ws else frozenset()
    if isinstance(f, Exist):
        return ws if truth_set(m, f.child) else frozenset()
    if isinstance(f, Only):
        t = truth_set(m, f.child)
        return t if len(t) == 1 else frozenset()
    if isinstance(f, (Seq, Announce)):
        left, right = _dynamic_parts(f)
        sub = relativize(m, left)
        return truth_set(sub, right)
    if isinstance(f, Arrow):
        # Relational reading licensed by the update-side definability of =>.
        return truth_set(m, Box(Not(Seq(f.left, Not(f.right)))))
    raise TypeError(f"not a formula: {f!r}")


def _dynamic_parts(f: Formula) -> tuple[Formula, Formula]:
    if isinstance(f, Seq):
        return f.left, f.right
    return f.announced, f.body


def satisfies(m: Model, w: int, f: Formula) -> bool:
    """Truth of f at world w of m."""
    if w not in m.frame.worlds:
        raise ValueError(f"world {w} out of range")
    return w in truth_set(m, f)


def globally_true(m: Model, f: Formula) -> bool:
    """Truth of f at every world of m (vacuous on an empty carrier)."""
    return truth_set(m, f) == frozenset(m.frame.worlds)


def restrict_model(m: Model, keep: frozenset[int]) -> Model:
    worlds = tuple(w for w in m.frame.worlds if w in keep)
    rel = frozenset(p for p in m.frame.rel if p[0] in keep and p[1] in keep)
    names = None
    if m.frame.names is not None:
        names = tuple(nm for w, nm in zip(m.frame.worlds, m.frame.names) if w in keep)
    frame = Frame(worlds, rel, names)
    val = tuple((a, vs & keep) for a, vs in m.valuation)
    return Model(frame, val)


def generated_submodel(m: Model, w: int) -> Model:
    """Submodel on the worlds reachable from w (including w)."""
    if w not in m.frame.worlds:
        raise ValueError(f"world {w} out of range")
    return restrict_model(m, reachable_set(m.frame, w))


def generated_subframe(fr: Frame, w: int) -> Frame:
    """Subframe on the worlds reachable from w (including w)."""
    if w not in fr.worlds:
        raise ValueError(f"world {w} out of range")
    keep = reachable_set(fr, w)
    worlds = tuple(x for x in fr.worlds if x in keep)
    rel = frozenset(p for p in fr.rel if p[0] in keep and p[1] in keep)
    names = None
    if fr.names is not None:
        names = tuple(nm for x, nm in zip(fr.worlds, fr.names) if x in keep)
    return Frame(worlds, rel, names)


def relativize(m: Model, f: Formula) -> Model:
    """The model restricted to the truth set of f; the carrier may be empty."""
    return restrict_model(m, truth_set(m, f))


def irreflexive_point_extension(fr: Frame, w: int, fresh: int) -> Frame:
    """Add a fresh point seeing w and all of w's successors.

    Defined only when w is irreflexive and fresh is not already a world.
    """
    if w not in fr.worlds:
        raise ValueError(f"world {w} out of range")
    if (w, w) in fr.rel:
        raise ValueError(f"world {w} is reflexive; extension undefined")
    if fresh in fr.worlds:
        raise ValueError(f"fresh world {fresh} collides with an existing world")
    worlds = tuple(sorted(fr.worlds + (fresh,)))
    rel = set(fr.rel)
    rel.add((fresh, w))
    for u, v in fr.rel:
        if u == w:
            rel.add((fresh, v))
    names = None
    if fr.names is not None:
        taken = set(fr.names)
        fresh_name = str(fresh)
        while fresh_name in taken:
            fresh_name += "'"
        by_world = dict(zip(fr.worlds, fr.names))
        by_world[fresh] = fresh_name
        names = tuple(by_world[x] for x in worlds)
    return Frame(worlds, frozenset(rel), names)


# --- JSON interchange ---------------------------------------------------


def frame_to_json(fr: Frame) -> dict:
    names = [fr.world_name(w) for w in fr.worlds]
    return {
        "worlds": names,
        "relation": [[fr.world_name(u), fr.world_name(v)]
                     for u, v in sorted(fr.rel, key=lambda p: (fr._index[p[0]], fr._index[p[1]]))],
    }


def model_to_json(m: Model) -> dict:
    d = frame_to_json(m.frame)
    d["valuation"] = {a: [m.frame.world_name(w) for w in sorted(vs)]
                      for a, vs in m.valuation}
    return d


def frame_from_json(d: dict) -> Frame:
    names = [str(x) for x in d["worlds"]]
    if not names:
        raise ValueError("a frame file needs at least one world")
    if len(set(names)) != len(names):
        raise ValueError("duplicate world names")
    index = {nm: i for i, nm in enumerate(names)}
    rel = set()
    for pair in d.get("relation", []):
        u, v = str(pair[0]), str(pair[1])
        if u not in index or v not in index:
            raise ValueError(f"relation pair [{u},{v}] names unknown worlds")
        rel.add((index[u], index[v]))
    return Frame(tuple(range(len(names))), frozenset(rel), tuple(names))


def model_from_json(d: dict) -> Model:
    fr = frame_from_json(d)
    index = {nm: w for nm, w in zip(fr.names or (), fr.worlds)}
    valuation = {}
    for atom, ws in d.get("valuation", {}).items():
        try:
            valuation[atom] = {index[str(x)] for x in ws}
        except KeyError as e:
            raise ValueError(f"valuation of {atom!r} names unknown world {e.args[0]!r}") from None
    return Model.of(fr, valuation)
