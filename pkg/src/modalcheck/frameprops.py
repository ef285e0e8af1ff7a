"""Frame classes and the global first-order frame conditions.

Named classes follow the usual axiom naming: T reflexive, D serial, B
symmetric, K4 transitive, S5 equivalence relations, and so on.  The
"globally X" properties are the weakened exists-prefixed conditions that
correspond to globally valid inferences; they are decided by naive
quantifier loops with short-circuiting, which is instantaneous at the
frame sizes this tool sweeps and keeps every decision auditable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .kripke import Frame, Relation

_NAMED_CLASSES = ("K", "T", "D", "B", "K4", "KD4", "S4", "S5", "K45", "KD45")


@dataclass(frozen=True)
class FrameClass:
    """A named frame class, or an explicit finite list of frames."""

    name: str
    members: tuple[Frame, ...] | None = None

    def __post_init__(self):
        if self.name == "explicit":
            if not self.members:
                raise ValueError("an explicit class needs at least one frame")
        elif self.name not in _NAMED_CLASSES:
            raise ValueError(f"unknown frame class {self.name!r}")
        elif self.members is not None:
            raise ValueError("named classes carry no member list")

    @classmethod
    def named(cls, name: str) -> "FrameClass":
        return cls(name)

    @classmethod
    def explicit(cls, frames: Iterable[Frame]) -> "FrameClass":
        ordered = sorted(frames, key=Frame.canonical_key)
        dedup: list[Frame] = []
        seen = set()
        for fr in ordered:
            key = (fr.n, fr.rel_mask)
            if key not in seen:
                seen.add(key)
                dedup.append(fr)
        return cls("explicit", tuple(dedup))

    @property
    def is_explicit(self) -> bool:
        return self.members is not None

    def __str__(self) -> str:
        if self.is_explicit:
            return f"explicit[{len(self.members)}]"
        return self.name


K = FrameClass.named("K")
T = FrameClass.named("T")
D = FrameClass.named("D")
B = FrameClass.named("B")
K4 = FrameClass.named("K4")
KD4 = FrameClass.named("KD4")
S4 = FrameClass.named("S4")
S5 = FrameClass.named("S5")
K45 = FrameClass.named("K45")
KD45 = FrameClass.named("KD45")


def frame_class(name: str) -> FrameClass:
    """Look up a named class, case-insensitively."""
    for known in _NAMED_CLASSES:
        if known.lower() == name.lower():
            return FrameClass.named(known)
    raise ValueError(f"unknown frame class {name!r}")


def is_reflexive(rows: tuple[int, ...]) -> bool:
    return all((rows[w] >> w) & 1 for w in range(len(rows)))


def is_serial(rows: tuple[int, ...]) -> bool:
    return all(rows[w] != 0 for w in range(len(rows)))


def is_transitive(rows: tuple[int, ...]) -> bool:
    n = len(rows)
    for w in range(n):
        acc = 0
        r = rows[w]
        for v in range(n):
            if (r >> v) & 1:
                acc |= rows[v]
        if acc & ~r:
            return False
    return True


def is_symmetric(rows: tuple[int, ...]) -> bool:
    n = len(rows)
    return all(not ((rows[w] >> v) & 1) or ((rows[v] >> w) & 1)
               for w in range(n) for v in range(n))


def is_euclidean(rows: tuple[int, ...]) -> bool:
    n = len(rows)
    for w in range(n):
        r = rows[w]
        for u in range(n):
            if (r >> u) & 1 and (r & ~rows[u]):
                return False
    return True


_CLASS_PREDICATES = {
    "K": lambda rows: True,
    "T": is_reflexive,
    "D": is_serial,
    "B": is_symmetric,
    "K4": is_transitive,
    "KD4": lambda rows: is_serial(rows) and is_transitive(rows),
    "S4": lambda rows: is_reflexive(rows) and is_transitive(rows),
    "S5": lambda rows: is_reflexive(rows) and is_symmetric(rows) and is_transitive(rows),
    "K45": lambda rows: is_transitive(rows) and is_euclidean(rows),
    "KD45": lambda rows: is_serial(rows) and is_transitive(rows) and is_euclidean(rows),
}


def rows_in_class(rows: tuple[int, ...], c: FrameClass) -> bool:
    if c.is_explicit:
        raise ValueError("rows_in_class only handles named classes")
    return _CLASS_PREDICATES[c.name](rows)


def in_class(fr: Frame, c: FrameClass) -> bool:
    """Membership of a frame in a class; explicit classes compare canonically."""
    if c.is_explicit:
        key = (fr.n, fr.rel_mask)
        return any((m.n, m.rel_mask) == key for m in c.members)
    return _CLASS_PREDICATES[c.name](fr.succ_masks)


def relation_power(rel: Iterable[tuple[int, int]], worlds: Iterable[int],
                   m: int) -> Relation:
    """R**0 is the identity; R**(m+1) composes one more step of R."""
    if m < 0:
        raise ValueError("power must be nonnegative")
    ws = list(worlds)
    cur = frozenset((w, w) for w in ws)
    step = frozenset(rel)
    by_src: dict[int, list[int]] = {}
    for u, v in step:
        by_src.setdefault(u, []).append(v)
    for _ in range(m):
        cur = frozenset((u, z) for u, v in cur for z in by_src.get(v, ()))
    return cur


def _power_rows(rows: tuple[int, ...], m: int) -> tuple[int, ...]:
    n = len(rows)
    cur = tuple(1 << w for w in range(n))
    for _ in range(m):
        nxt = []
        for w in range(n):
            acc = 0
            r = cur[w]
            for v in range(n):
                if (r >> v) & 1:
                    acc |= rows[v]
            nxt.append(acc)
        cur = tuple(nxt)
    return cur


def general_condition_rows(rows: tuple[int, ...], i: int, j: int, k: int, l: int) -> bool:
    n = len(rows)
    ri = _power_rows(rows, i)
    rj = _power_rows(rows, j)
    rk = _power_rows(rows, k)
    rl = _power_rows(rows, l)
    for w in range(n):
        for x in range(n):
            if not (rk[w] >> x) & 1:
                continue
            found_y = False
            for y in range(n):
                ok = True
                zbits = ri[y]
                for z in range(n):
                    if (zbits >> z) & 1 and not (rl[x] & rj[z]):
                        ok = False
                        break
                if ok:
                    found_y = True
                    break
            if not found_y:
                return False
    return True


def general_condition(fr: Frame, i: int, j: int, k: int, l: int) -> bool:
    """The prefix forall w x exists y forall z exists u over relation powers.

    Matrix: R^k(w,x) and R^i(y,z) imply R^l(x,u) and R^j(z,u).  When the
    antecedent fails the matrix is vacuously true, so only R^k-pairs (w,x)
    constrain the choice of y.
    """
    for e in (i, j, k, l):
        if e < 0:
            raise ValueError("exponents must be nonnegative")
    return general_condition_rows(fr.succ_masks, i, j, k, l)


GLOBAL_PROPERTIES = (
    "globally-isolated",
    "globally-transitive",
    "globally-euclidean",
    "globally-reflexive",
    "globally-inverse-reflexive",
    "globally-serial",
    "globally-symmetric",
    "globally-inverse-symmetric",
)

# (i, j, k, l) instance of the general condition matching each named
# property, read off the inference shape diamond^i box^j p |=g box^k diamond^l p.
PROPERTY_PROFILE = {
    "globally-isolated": (1, 0, 0, 0),
    "globally-transitive": (2, 0, 0, 1),
    "globally-euclidean": (1, 1, 1, 0),
    "globally-reflexive": (0, 1, 0, 0),
    "globally-inverse-reflexive": (0, 0, 0, 1),
    "globally-serial": (0, 1, 0, 1),
    "globally-symmetric": (0, 0, 1, 1),
    "globally-inverse-symmetric": (1, 1, 0, 0),
}


@dataclass(frozen=True)
class GlobalProperty:
    """A named global frame condition or a General(i,j,k,l) instance."""

    name: str
    profile: tuple[int, int, int, int] | None = None

    def __post_init__(self):
        if self.name == "general":
            if self.profile is None:
                raise ValueError("general needs a profile (i, j, k, l)")
            if any(e < 0 for e in self.profile):
                raise ValueError("profile exponents must be nonnegative")
        elif self.name not in GLOBAL_PROPERTIES:
            raise ValueError(f"unknown global property {self.name!r}")

    @classmethod
    def general(cls, i: int, j: int, k: int, l: int) -> "GlobalProperty":
        return cls("general", (i, j, k, l))


def has_global_property(fr: Frame, p: GlobalProperty) -> bool:
    rows = fr.succ_masks
    n = fr.n
    if p.name == "general":
        return general_condition_rows(rows, *p.profile)
    if p.name == "globally-isolated":
        # forall x exists y forall z (Ryz -> z = x)
        return all(any(rows[y] & ~(1 << x) == 0 for y in range(n)) for x in range(n))
    if p.name == "globally-transitive":
        # forall w exists x forall y forall z (Rxy & Ryz -> Rwz)
        def two_step(x):
            acc = 0
            for y in range(n):
                if (rows[x] >> y) & 1:
                    acc |= rows[y]
            return acc
        return all(any(two_step(x) & ~rows[w] == 0 for x in range(n)) for w in range(n))
    if p.name == "globally-euclidean":
        # forall w forall x exists y forall z (Rwx & Ryz -> Rzx)
        for w in range(n):
            for x in range(n):
                if not (rows[w] >> x) & 1:
                    continue
                if not any(all(not ((rows[y] >> z) & 1) or ((rows[z] >> x) & 1)
                               for z in range(n)) for y in range(n)):
                    return False
        return True
    if p.name == "globally-reflexive":
        # forall x exists y Ryx
        return all(any((rows[y] >> x) & 1 for y in range(n)) for x in range(n))
    if p.name == "globally-inverse-reflexive":
        # forall x exists y Rxy
        return all(rows[x] != 0 for x in range(n))
    if p.name == "globally-serial":
        # forall x exists y exists z (Ryz & Rxz)
        has_pred = 0
        for y in range(n):
            has_pred |= rows[y]
        return all(rows[x] & has_pred for x in range(n))
    if p.name == "globally-symmetric":
        # forall x forall y (Rxy -> exists z Ryz); see module notes on the
        # quantifier placement in the printed form.
        seen = 0
        for x in range(n):
            seen |= rows[x]
        return all(not ((seen >> y) & 1) or rows[y] != 0 for y in range(n))
    if p.name == "globally-inverse-symmetric":
        # forall x exists y forall z (Ryz -> Rzx)
        return all(any(all(not ((rows[y] >> z) & 1) or ((rows[z] >> x) & 1)
                           for z in range(n)) for y in range(n)) for x in range(n))
    raise AssertionError(p.name)
