"""Batch truth tables for dense frames: the hot kernel behind all sweeps.

For a dense frame with n worlds and k query atoms there are 2**(n*k)
valuations.  A single call computes, for each formula, a uint32 table with
one entry per valuation whose bit w says that world w satisfies the formula
under that valuation.  Valuation v assigns atom a the worlds in bits
``(v >> (a*n)) & ((1<<n)-1)``, so enumeration order is plain integer order.

Two interchangeable backends produce these tables:

* ``numba``: an @njit stack-machine interpreter over compiled node arrays
  (the default when numba imports);
* ``numpy``: a vectorized recursion over the AST.

Select with the MODALCHECK_BACKEND environment variable or the ``backend=``
argument.  Results are bit-identical; tests cross-check both against the
plain recursive evaluator in kripke.py, and benchmarks/backends_bench.py
compares their speed.
"""

from __future__ import annotations

import os

import numpy as np

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

OP_ATOM = 0
OP_BOT = 1
OP_NOT = 2
OP_AND = 3
OP_BOX = 4
OP_BOXPLUS = 5
OP_UNIV = 6
OP_EXIST = 7
OP_ONLY = 8
OP_SEQ = 9

MAX_VAL_BITS = 22  # refuse sweeps beyond 4M valuations per frame


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except Exception:
        return False
    return True


_DEFAULT_BACKEND: str | None = None


def default_backend() -> str:
    """Backend chosen by MODALCHECK_BACKEND, else numba when importable."""
    global _DEFAULT_BACKEND
    if _DEFAULT_BACKEND is None:
        env = os.environ.get("MODALCHECK_BACKEND", "").strip().lower()
        if env in ("numba", "numpy"):
            _DEFAULT_BACKEND = env
        elif env:
            raise ValueError(f"MODALCHECK_BACKEND must be 'numba' or 'numpy', not {env!r}")
        else:
            _DEFAULT_BACKEND = "numba" if _numba_available() else "numpy"
    return _DEFAULT_BACKEND


def compile_nodes(formulas: list[Formula], atom_index: dict[str, int]):
    """Flatten formulas into parallel op/arg arrays plus root indices.

    Arrow is rewritten through its box/not/seq definition and Announce
    shares the Seq opcode, so the kernels only see ten opcodes.
    """
    ops: list[int] = []
    arg1: list[int] = []
    arg2: list[int] = []
    memo: dict[Formula, int] = {}

    def emit(f: Formula) -> int:
        if f in memo:
            return memo[f]
        if isinstance(f, Atom):
            node = _push(OP_ATOM, atom_index[f.name], -1)
        elif isinstance(f, Bottom):
            node = _push(OP_BOT, -1, -1)
        elif isinstance(f, Not):
            node = _push(OP_NOT, emit(f.child), -1)
        elif isinstance(f, And):
            node = _push(OP_AND, emit(f.left), emit(f.right))
        elif isinstance(f, Box):
            node = _push(OP_BOX, emit(f.child), -1)
        elif isinstance(f, BoxPlus):
            node = _push(OP_BOXPLUS, emit(f.child), -1)
        elif isinstance(f, Univ):
            node = _push(OP_UNIV, emit(f.child), -1)
        elif isinstance(f, Exist):
            node = _push(OP_EXIST, emit(f.child), -1)
        elif isinstance(f, Only):
            node = _push(OP_ONLY, emit(f.child), -1)
        elif isinstance(f, Seq):
            node = _push(OP_SEQ, emit(f.left), emit(f.right))
        elif isinstance(f, Announce):
            node = _push(OP_SEQ, emit(f.announced), emit(f.body))
        elif isinstance(f, Arrow):
            node = emit(Box(Not(Seq(f.left, Not(f.right)))))
        else:
            raise TypeError(f"not a formula: {f!r}")
        memo[f] = node
        return node

    def _push(op: int, a: int, b: int) -> int:
        ops.append(op)
        arg1.append(a)
        arg2.append(b)
        return len(ops) - 1

    roots = np.array([emit(f) for f in formulas], dtype=np.int32)
    return (np.array(ops, dtype=np.int8), np.array(arg1, dtype=np.int32),
            np.array(arg2, dtype=np.int32), roots)


def frame_tables(n: int, succ_masks: tuple[int, ...], formulas: list[Formula],
                 atoms: tuple[str, ...], backend: str | None = None) -> np.ndarray:
    """Truth tables of shape (len(formulas), 2**(n*len(atoms))), dtype uint32."""
    if n < 1 or n > 16:
        raise ValueError(f"dense frames must have 1..16 worlds, got {n}")
    bits = n * len(atoms)
    if bits > MAX_VAL_BITS:
        raise ValueError(f"{len(atoms)} atoms on {n} worlds means 2**{bits} "
                         f"valuations; refusing (limit 2**{MAX_VAL_BITS})")
    which = backend or default_backend()
    atom_index = {a: i for i, a in enumerate(atoms)}
    ops, arg1, arg2, roots = compile_nodes(formulas, atom_index)
    succ = np.array(succ_masks, dtype=np.int64)
    n_vals = 1 << bits
    if which == "numba":
        from . import _njit_kernel
        out = np.zeros((len(formulas), n_vals), dtype=np.uint32)
        _njit_kernel.eval_tables(n, succ, ops, arg1, arg2, roots, out)
        return out
    if which == "numpy":
        return _numpy_tables(n, succ, ops, arg1, arg2, roots, len(atoms), n_vals)
    raise ValueError(f"unknown backend {which!r}")


def _numpy_tables(n, succ, ops, arg1, arg2, roots, n_atoms, n_vals) -> np.ndarray:
    full = (1 << n) - 1
    vs = np.arange(n_vals, dtype=np.int64)
    atom_cols = [((vs >> (a * n)) & full) for a in range(n_atoms)]

    def ev(node: int, carrier: np.ndarray) -> np.ndarray:
        op = ops[node]
        a, b = arg1[node], arg2[node]
        if op == OP_ATOM:
            return atom_cols[a] & carrier
        if op == OP_BOT:
            return np.zeros_like(carrier)
        if op == OP_NOT:
            return carrier & ~ev(a, carrier)
        if op == OP_AND:
            return ev(a, carrier) & ev(b, carrier)
        if op == OP_BOX:
            x = ev(a, carrier)
            res = np.zeros_like(carrier)
            for w in range(n):
                ok = (succ[w] & carrier & ~x) == 0
                res |= ((carrier >> w) & 1 & ok) << w
            return res
        if op == OP_BOXPLUS:
            x = ev(a, carrier)
            rows = np.empty((n, len(carrier)), dtype=np.int64)
            for w in range(n):
                rows[w] = succ[w] & carrier
            for k in range(n):  # Warshall, vectorized over valuations
                for w in range(n):
                    rows[w] |= np.where((rows[w] >> k) & 1, rows[k], 0)
            res = np.zeros_like(carrier)
            for w in range(n):
                star = rows[w] | (1 << w)
                ok = (star & ~x) == 0
                res |= ((carrier >> w) & 1 & ok) << w
            return res
        if op == OP_UNIV:
            x = ev(a, carrier)
            return np.where(x == carrier, carrier, 0)
        if op == OP_EXIST:
            x = ev(a, carrier)
            return np.where(x != 0, carrier, 0)
        if op == OP_ONLY:
            x = ev(a, carrier)
            return np.where((x != 0) & ((x & (x - 1)) == 0), x, 0)
        if op == OP_SEQ:
            x = ev(a, carrier)
            return ev(b, x)
        raise AssertionError(f"bad opcode {op}")

    top = np.full(n_vals, full, dtype=np.int64)
    out = np.empty((len(roots), n_vals), dtype=np.uint32)
    for i, r in enumerate(roots):
        out[i] = ev(int(r), top).astype(np.uint32)
    return out
