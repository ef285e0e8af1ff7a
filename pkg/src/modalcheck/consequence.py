"""Bounded-exhaustive local and global consequence over frame classes.

Verdicts are "holds at bound" or carry the canonically first refuting
model.  Canonical order: frames by (size, relation bitmask), valuations by
bitmask over the sorted atom list (bit a*n+w gives atom index a at world
position w), then worlds by id.  Verdicts are therefore reproducible
byte-for-byte across runs and worker counts.

The sweeps evaluate whole valuation batches per frame through
tables.frame_tables; witnesses are re-derived from the reported bitmask
and can always be re-validated with the reference evaluator.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import syntax
from .frameprops import FrameClass, rows_in_class
from .kripke import Frame, Model
from .syntax import And, Atom, Box, BoxPlus, Formula, implies
from .tables import frame_tables


@dataclass(frozen=True)
class SearchBound:
    """Finitization of "for every model": sizes 1..max_worlds.

    atoms lists extra valuation atoms beyond those in the query;
    dedup_isomorphic keeps one frame per isomorphism class.
    """

    max_worlds: int
    atoms: tuple[str, ...] = ()
    dedup_isomorphic: bool = False

    def __post_init__(self):
        if self.max_worlds < 1:
            raise ValueError("max_worlds must be at least 1")


@dataclass(frozen=True)
class Witness:
    """A concrete refutation: a model, and a world or state when relevant."""

    model: object
    world: int | None = None
    state: frozenset[int] | None = None


@dataclass(frozen=True)
class SweepStats:
    frames: int
    models: int
    elapsed_ms: float


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Witness | None = None
    stats: SweepStats | None = field(default=None, compare=False)

    @property
    def outcome(self) -> str:
        return "holds" if self.holds else "refuted"


def _perm_canonical_mask(n: int, rows: Sequence[int]) -> int:
    """Minimum relation bitmask over all world permutations."""
    best = None
    for perm in itertools.permutations(range(n)):
        mask = 0
        for u in range(n):
            ru = rows[u]
            pu = perm[u]
            for v in range(n):
                if (ru >> v) & 1:
                    mask |= 1 << (pu * n + perm[v])
        if best is None or mask < best:
            best = mask
    return best


def _mask_rows(n: int, mask: int) -> tuple[int, ...]:
    full = (1 << n) - 1
    return tuple((mask >> (u * n)) & full for u in range(n))


def _iter_dense(max_worlds: int, c: FrameClass, dedup_isomorphic: bool = False,
                ) -> Iterator[tuple[int, tuple[int, ...], Frame | None]]:
    """Yield (n, succ_rows, frame) in canonical order.

    frame is None for generated dense frames (built on demand) and the
    original member for explicit classes, preserving world ids and names.
    """
    if c.is_explicit:
        seen = set()
        for fr in c.members:
            if fr.n > max_worlds:
                continue
            rows = fr.succ_masks
            if dedup_isomorphic:
                key = (fr.n, _perm_canonical_mask(fr.n, rows))
                if key in seen:
                    continue
                seen.add(key)
            yield fr.n, rows, fr
        return
    for n in range(1, max_worlds + 1):
        for mask in range(1 << (n * n)):
            rows = _mask_rows(n, mask)
            if not rows_in_class(rows, c):
                continue
            if dedup_isomorphic and _perm_canonical_mask(n, rows) != mask:
                continue
            yield n, rows, None


def _dense_frame(n: int, rows: Sequence[int]) -> Frame:
    rel = frozenset((u, v) for u in range(n) for v in range(n) if (rows[u] >> v) & 1)
    return Frame(tuple(range(n)), rel)


def enumerate_frames(n: int, c: FrameClass,
                     dedup_isomorphic: bool = False) -> Iterator[Frame]:
    """All frames of c with at most n worlds, canonically ordered."""
    if n < 1:
        raise ValueError("n must be at least 1")
    for m, rows, fr in _iter_dense(n, c, dedup_isomorphic):
        yield fr if fr is not None else _dense_frame(m, rows)


def enumerate_valuations(fr: Frame, atoms: Sequence[str]) -> Iterator[dict[str, frozenset[int]]]:
    """All valuations of the given atoms on fr, in bitmask order."""
    n = fr.n
    for v in range(1 << (len(atoms) * n)):
        yield decode_valuation(fr, atoms, v)


def decode_valuation(fr: Frame, atoms: Sequence[str], v: int) -> dict[str, frozenset[int]]:
    n = fr.n
    return {a: frozenset(fr.worlds[j] for j in range(n) if (v >> (i * n + j)) & 1)
            for i, a in enumerate(atoms)}


def query_atoms(premises: Iterable[Formula], conclusion: Formula,
                bound: SearchBound) -> tuple[str, ...]:
    names: set[str] = set(bound.atoms)
    for f in itertools.chain(premises, (conclusion,)):
        names |= syntax.atoms(f)
    return tuple(sorted(names))


def _premise_tables(tables: np.ndarray, n_premises: int, full: int) -> np.ndarray:
    if n_premises == 0:
        return np.full(tables.shape[1], full, dtype=np.uint32)
    return np.bitwise_and.reduce(tables[:n_premises], axis=0)


def local_consequence(premises: Iterable[Formula], conclusion: Formula,
                      c: FrameClass, b: SearchBound,
                      backend: str | None = None) -> Verdict:
    """Truth preservation at a world: premises true at w force the conclusion.

    Refutations name the world; the witness is the canonical-first triple
    (frame, valuation, world).
    """
    prems = tuple(premises)
    ats = query_atoms(prems, conclusion, b)
    formulas = list(prems) + [conclusion]
    t0 = time.perf_counter()
    frames = models = 0
    for n, rows, fr in _iter_dense(b.max_worlds, c, b.dedup_isomorphic):
        frames += 1
        full = (1 << n) - 1
        tables = frame_tables(n, tuple(rows), formulas, ats, backend=backend)
        bad = _premise_tables(tables, len(prems), full) & ~tables[-1]
        nz = np.nonzero(bad)[0]
        if len(nz):
            v = int(nz[0])
            models += v + 1
            frame = fr if fr is not None else _dense_frame(n, rows)
            model = Model.of(frame, decode_valuation(frame, ats, v))
            world = frame.worlds[_lowest_bit(int(bad[v]))]
            stats = SweepStats(frames, models, _ms(t0))
            return Verdict(False, Witness(model, world=world), stats)
        models += tables.shape[1]
    return Verdict(True, None, SweepStats(frames, models, _ms(t0)))


def global_consequence(premises: Iterable[Formula], conclusion: Formula,
                       c: FrameClass, b: SearchBound,
                       backend: str | None = None) -> Verdict:
    """Truth-in-model preservation; refutations carry a model, no world."""
    prems = tuple(premises)
    ats = query_atoms(prems, conclusion, b)
    formulas = list(prems) + [conclusion]
    t0 = time.perf_counter()
    frames = models = 0
    for n, rows, fr in _iter_dense(b.max_worlds, c, b.dedup_isomorphic):
        frames += 1
        full = (1 << n) - 1
        tables = frame_tables(n, tuple(rows), formulas, ats, backend=backend)
        prem_glob = _premise_tables(tables, len(prems), full) == full
        bad = prem_glob & (tables[-1] != full)
        nz = np.nonzero(bad)[0]
        if len(nz):
            v = int(nz[0])
            models += v + 1
            frame = fr if fr is not None else _dense_frame(n, rows)
            model = Model.of(frame, decode_valuation(frame, ats, v))
            stats = SweepStats(frames, models, _ms(t0))
            return Verdict(False, Witness(model), stats)
        models += tables.shape[1]
    return Verdict(True, None, SweepStats(frames, models, _ms(t0)))


def _lowest_bit(x: int) -> int:
    return (x & -x).bit_length() - 1


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1000.0


def box_set(g: Iterable[Formula]) -> tuple[Formula, ...]:
    """Box every formula."""
    return tuple(Box(f) for f in g)


def box_r_set(g: Iterable[Formula]) -> tuple[Formula, ...]:
    """Reflexivized box: f becomes f & []f."""
    return tuple(And(f, Box(f)) for f in g)


def box_omega_set(g: Iterable[Formula]) -> tuple[Formula, ...]:
    """Finite stand-in for the infinite iterated-box premise set.

    On any finite model a world satisfies [*]f exactly when it satisfies
    every finite box iterate of f, so this realizes the omega set exactly
    for bounded checks.
    """
    return tuple(BoxPlus(f) for f in g)


def venema_localization(premises: Iterable[Formula],
                        conclusion: Formula) -> tuple[tuple[Formula, ...], Formula]:
    """Recast a local query as a global one using E, O and a fresh atom."""
    prems = tuple(premises)
    used: set[str] = set(syntax.atoms(conclusion))
    for g in prems:
        used |= syntax.atoms(g)
    fresh = "p"
    k = 0
    while fresh in used:
        fresh = f"p{k}"
        k += 1
    marker = Atom(fresh)
    new_premises = (syntax.Exist(syntax.Only(marker)),) + tuple(
        implies(marker, g) for g in prems)
    return new_premises, implies(marker, conclusion)


class ClassSweep:
    """Reusable query context: one class, one bound, one shared atom list.

    Caches per-formula tables across queries, concatenated over all frames
    of the class, so verdict-agreement sweeps cost a few vector ops per
    query.  Only yields holds/refuted; use the plain consequence functions
    when a canonical witness is needed.
    """

    def __init__(self, c: FrameClass, max_worlds: int, atoms: Sequence[str],
                 backend: str | None = None):
        self.frame_class = c
        self.max_worlds = max_worlds
        self.atoms = tuple(atoms)
        self.backend = backend
        self._specs = list(_iter_dense(max_worlds, c))
        self._fulls = np.concatenate([
            np.full(1 << (len(self.atoms) * n), (1 << n) - 1, dtype=np.uint32)
            for n, _, _ in self._specs]) if self._specs else np.zeros(0, dtype=np.uint32)
        self._offsets = np.cumsum([0] + [1 << (len(self.atoms) * n)
                                         for n, _, _ in self._specs])
        self._local: dict[Formula, np.ndarray] = {}

    @property
    def n_frames(self) -> int:
        return len(self._specs)

    @property
    def n_models(self) -> int:
        return int(self._fulls.shape[0])

    def local_table(self, f: Formula) -> np.ndarray:
        """uint32 per (frame, valuation) slot: bit w = f holds at world w."""
        cached = self._local.get(f)
        if cached is None:
            parts = [frame_tables(n, rows, [f], self.atoms, backend=self.backend)[0]
                     for n, rows, _ in self._specs]
            cached = np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint32)
            self._local[f] = cached
        return cached

    def global_table(self, f: Formula) -> np.ndarray:
        return self.local_table(f) == self._fulls

    def local_holds(self, premises: Sequence[Formula], conclusion: Formula) -> bool:
        bad = ~self.local_table(conclusion)
        for g in premises:
            bad = bad & self.local_table(g)
        if not premises:
            bad = bad & self._fulls
        return not bool(bad.any())

    def global_holds(self, premises: Sequence[Formula], conclusion: Formula) -> bool:
        bad = ~self.global_table(conclusion)
        for g in premises:
            bad = bad & self.global_table(g)
        return not bool(bad.any())

    def global_premise_slots(self, premises: Sequence[Formula]) -> np.ndarray:
        """Bool per (frame, valuation) slot: every premise globally true."""
        acc = np.ones(self.n_models, dtype=bool)
        for g in premises:
            acc &= self.global_table(g)
        return acc
