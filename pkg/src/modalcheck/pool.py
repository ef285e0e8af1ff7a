"""Deterministic formula pools and seeded random frame classes.

Pools are generated size-by-size over a fixed constructor order, so the
same parameters always give the same tuple of formulas.  Random classes
come from an RNG seeded by hashing (seed, label), making every sampled
artifact reproducible from the report's seed alone.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from typing import Iterable, Sequence

from .frameprops import FrameClass
from .kripke import Frame, generated_subframe
from .syntax import And, Atom, Bottom, Box, Formula, Fragment, Not, Seq, fragment_of, modal_depth


def derive_rng(seed: int, label: str) -> random.Random:
    """An independent RNG stream for (seed, label), stable across runs."""
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def formulas_up_to(atoms: Sequence[str], max_size: int, max_modal_depth: int,
                   with_seq: bool = False) -> tuple[Formula, ...]:
    """All formulas over the given atoms with at most max_size AST nodes.

    Constructors: atoms, falsum, negation, conjunction, box, and optionally
    dynamic conjunction.  Output order is fixed by generation order.
    """
    by_size: dict[int, list[Formula]] = {1: [Atom(a) for a in atoms] + [Bottom()]}
    for k in range(2, max_size + 1):
        items: list[Formula] = []
        for g in by_size[k - 1]:
            items.append(Not(g))
        for g in by_size[k - 1]:
            items.append(Box(g))
        for i in range(1, k - 1):
            j = k - 1 - i
            for a in by_size[i]:
                for b in by_size[j]:
                    items.append(And(a, b))
        if with_seq:
            for i in range(1, k - 1):
                j = k - 1 - i
                for a in by_size[i]:
                    for b in by_size[j]:
                        items.append(Seq(a, b))
        by_size[k] = items
    out = []
    for k in range(1, max_size + 1):
        for f in by_size[k]:
            if modal_depth(f) <= max_modal_depth:
                out.append(f)
    return tuple(out)


def basic_pool(max_size_one_atom: int = 4, max_size_two_atoms: int = 3,
               max_modal_depth: int = 2) -> tuple[Formula, ...]:
    """Default pool: depth <= 2 over one atom plus depth <= 1 over two atoms."""
    one = formulas_up_to(("p",), max_size_one_atom, max_modal_depth)
    two = formulas_up_to(("p", "q"), max_size_two_atoms, min(1, max_modal_depth))
    return tuple(dict.fromkeys(one + two))


def dynamic_pool(max_size_one_atom: int = 4, max_size_two_atoms: int = 3,
                 max_modal_depth: int = 2) -> tuple[Formula, ...]:
    """Pool with dynamic conjunction, for the update-semantics checks."""
    one = formulas_up_to(("p",), max_size_one_atom, max_modal_depth, with_seq=True)
    two = formulas_up_to(("p", "q"), max_size_two_atoms, max_modal_depth, with_seq=True)
    return tuple(dict.fromkeys(one + two))


def modal_free(pool: Iterable[Formula]) -> tuple[Formula, ...]:
    return tuple(f for f in pool if fragment_of(f) == Fragment.MODAL_FREE)


def singleton_queries(pool: Sequence[Formula]) -> list[tuple[tuple[Formula, ...], Formula]]:
    """Every (one-premise, conclusion) pair, in pool order."""
    return [((g,), f) for g in pool for f in pool]


def pair_queries(pool: Sequence[Formula], rng: random.Random,
                 count: int) -> list[tuple[tuple[Formula, ...], Formula]]:
    """Seeded sample of two-premise queries (premise indices i < j)."""
    out = []
    n = len(pool)
    for _ in range(count):
        i = rng.randrange(n - 1)
        j = rng.randrange(i + 1, n)
        f = pool[rng.randrange(n)]
        out.append(((pool[i], pool[j]), f))
    return out


def sample_queries(pool: Sequence[Formula], rng: random.Random, singles: int,
                   pairs: int) -> list[tuple[tuple[Formula, ...], Formula]]:
    """Seeded mix of one- and two-premise queries plus a few empty-premise ones."""
    n = len(pool)
    out: list[tuple[tuple[Formula, ...], Formula]] = []
    for _ in range(singles):
        out.append(((pool[rng.randrange(n)],), pool[rng.randrange(n)]))
    out.extend(pair_queries(pool, rng, pairs))
    for _ in range(max(2, singles // 20)):
        out.append(((), pool[rng.randrange(n)]))
    return out


def random_dense_frame(rng: random.Random, max_worlds: int) -> Frame:
    n = rng.randint(1, max_worlds)
    mask = rng.getrandbits(n * n)
    rel = frozenset((u, v) for u in range(n) for v in range(n)
                    if (mask >> (u * n + v)) & 1)
    return Frame(tuple(range(n)), rel)


def random_explicit_classes(seed: int, count: int = 200, max_frames: int = 3,
                            max_worlds: int = 3,
                            close_under_generated: bool = False) -> list[FrameClass]:
    """Seeded explicit classes of small dense frames.

    With close_under_generated each class also contains every point-generated
    subframe of its members, which is the closure hypothesis several of the
    paper's reductions need.
    """
    rng = derive_rng(seed, "explicit-classes")
    classes = []
    for _ in range(count):
        frames = [random_dense_frame(rng, max_worlds)
                  for _ in range(rng.randint(1, max_frames))]
        if close_under_generated:
            extra = []
            for fr in frames:
                for w in fr.worlds:
                    extra.append(generated_subframe(fr, w))
            frames.extend(extra)
        classes.append(FrameClass.explicit(frames))
    return classes
