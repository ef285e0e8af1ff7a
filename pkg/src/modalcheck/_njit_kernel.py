"""Numba backend: one @njit stack-machine interpreter for truth tables.

The compiled node arrays come from tables.compile_nodes.  Everything is
int64 bit arithmetic on world masks; see tables.py for the layout contract.
Kept in its own module so importing the package never forces a JIT compile
unless the numba backend is actually used.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def eval_tables(n, succ, ops, arg1, arg2, roots, out):
    full = (np.int64(1) << n) - 1
    n_nodes = ops.shape[0]
    n_roots = roots.shape[0]
    n_vals = out.shape[1]
    cap = 2 * n_nodes + 4
    st_node = np.empty(cap, dtype=np.int32)
    st_carrier = np.empty(cap, dtype=np.int64)
    st_stage = np.empty(cap, dtype=np.int8)
    vals = np.empty(cap, dtype=np.int64)
    rows = np.empty(n, dtype=np.int64)

    for v in range(n_vals):
        for ri in range(n_roots):
            st_node[0] = roots[ri]
            st_carrier[0] = full
            st_stage[0] = 0
            sp = 1
            vsp = 0
            while sp > 0:
                sp -= 1
                node = st_node[sp]
                carrier = st_carrier[sp]
                stage = st_stage[sp]
                op = ops[node]
                if op == 0:  # atom
                    a = arg1[node]
                    vals[vsp] = ((v >> (a * n)) & full) & carrier
                    vsp += 1
                elif op == 1:  # bottom
                    vals[vsp] = 0
                    vsp += 1
                elif op == 3:  # and
                    if stage == 0:
                        st_node[sp] = node
                        st_carrier[sp] = carrier
                        st_stage[sp] = 1
                        sp += 1
                        st_node[sp] = arg1[node]
                        st_carrier[sp] = carrier
                        st_stage[sp] = 0
                        sp += 1
                    elif stage == 1:
                        st_node[sp] = node
                        st_carrier[sp] = carrier
                        st_stage[sp] = 2
                        sp += 1
                        st_node[sp] = arg2[node]
                        st_carrier[sp] = carrier
                        st_stage[sp] = 0
                        sp += 1
                    else:
                        y = vals[vsp - 1]
                        x = vals[vsp - 2]
                        vsp -= 2
                        vals[vsp] = x & y
                        vsp += 1
                elif op == 9:  # seq: right child evaluates in the left truth set
                    if stage == 0:
                        st_node[sp] = node
                        st_carrier[sp] = carrier
                        st_stage[sp] = 1
                        sp += 1
                        st_node[sp] = arg1[node]
                        st_carrier[sp] = carrier
                        st_stage[sp] = 0
                        sp += 1
                    else:
                        x = vals[vsp - 1]
                        vsp -= 1
                        st_node[sp] = arg2[node]
                        st_carrier[sp] = x
                        st_stage[sp] = 0
                        sp += 1
                else:  # unary operators
                    if stage == 0:
                        st_node[sp] = node
                        st_carrier[sp] = carrier
                        st_stage[sp] = 1
                        sp += 1
                        st_node[sp] = arg1[node]
                        st_carrier[sp] = carrier
                        st_stage[sp] = 0
                        sp += 1
                    else:
                        x = vals[vsp - 1]
                        vsp -= 1
                        r = np.int64(0)
                        if op == 2:  # not
                            r = carrier & (~x)
                        elif op == 4:  # box
                            for w in range(n):
                                if (carrier >> w) & 1:
                                    if ((succ[w] & carrier) & (~x)) == 0:
                                        r |= np.int64(1) << w
                        elif op == 5:  # boxplus: reachability within the carrier
                            for w in range(n):
                                rows[w] = succ[w] & carrier
                            for k in range(n):
                                rk = rows[k]
                                for w in range(n):
                                    if (rows[w] >> k) & 1:
                                        rows[w] |= rk
                            for w in range(n):
                                if (carrier >> w) & 1:
                                    star = rows[w] | (np.int64(1) << w)
                                    if (star & (~x)) == 0:
                                        r |= np.int64(1) << w
                        elif op == 6:  # universal modality
                            if x == carrier:
                                r = carrier
                        elif op == 7:  # existential modality
                            if x != 0:
                                r = carrier
                        elif op == 8:  # only
                            if x != 0 and (x & (x - 1)) == 0:
                                r = x
                        vals[vsp] = r
                        vsp += 1
            out[ri, v] = np.uint32(vals[0])
