# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled sparse evaluation kernel; mirrors ``lexfst._pykernel.run_sparse``.

Same flattened arrays, same candidate resolution, same outcome tuple.  The
pure-Python module is the behavioural reference; any divergence between the
two is a bug.
"""

from libc.stdlib cimport free, malloc, realloc

ctypedef long long i64

cdef int AMB_NONE = 0
cdef int AMB_CELL = 1
cdef int AMB_FINAL = 2


cdef inline int _cmp_tail(i64 *prev, i64 *weight, i64 a, i64 b) noexcept nogil:
    cdef i64 wa, wb
    while a != b:
        wa = weight[a]
        wb = weight[b]
        if wa != wb:
            return 1 if wa > wb else -1
        a = prev[a]
        b = prev[b]
    return 0


cdef object _path_output(i64 *prev, i64 *trans, list tout, i64 cell):
    parts = []
    while trans[cell] >= 0:
        parts.append(tout[trans[cell]])
        cell = prev[cell]
    parts.reverse()
    return "".join(parts)


cdef tuple _segments_to_ancestor(i64 *prev, i64 *trans, list tout, i64 a, i64 b):
    # outputs emitted since the two chains diverged; the shared prefix above
    # the common ancestor cell cancels out of any equality check
    ids_a = []
    ids_b = []
    while a != b:
        ids_a.append(tout[trans[a]])
        ids_b.append(tout[trans[b]])
        a = prev[a]
        b = prev[b]
    ids_a.reverse()
    ids_b.reverse()
    return "".join(ids_a), "".join(ids_b)




def run(prep, codes_obj):
    """Evaluate prepared machine arrays over an array('q') of code points.

    Returns the EvalOutcome fields as a plain tuple:
    (accepted, output, amb_kind, amb_pos, amb_state, cells, probes).
    """
    cdef const i64[::1] codes = codes_obj
    cdef const i64[::1] bp_off = prep.bp_off
    cdef const i64[::1] bp_val = prep.bp_val
    cdef const i64[::1] row_off = prep.row_off
    cdef const i64[::1] row_trans = prep.row_trans
    cdef const i64[::1] tdst = prep.trans_dst
    cdef const i64[::1] tw = prep.trans_w
    cdef const i64[::1] tau_w = prep.tau_w
    cdef const unsigned char[::1] tau_has = prep.tau_has
    cdef list tout = prep.trans_out
    cdef list tau_out = prep.tau_out

    cdef Py_ssize_t n_in = codes.shape[0]
    cdef int n_states = prep.n_states
    cdef bint is_max = prep.policy_is_max
    cdef i64 initial = prep.initial

    cdef Py_ssize_t cap = 1024
    cdef i64 *pstate = NULL
    cdef i64 *pprev = NULL
    cdef i64 *ptrans = NULL
    cdef i64 *pweight = NULL
    cdef char *pflag = NULL
    cdef i64 *col_start = NULL
    cdef i64 *seen = NULL
    cdef i64 *cell_at = NULL

    cdef Py_ssize_t pool_len, j, ci, ridx, new_cap
    cdef i64 *tmp
    cdef char *ctmp
    cdef i64 x, p, q, w, tid, cidx, base, end, lo, hi, mid
    cdef i64 probes = 0
    cdef int c
    cdef i64 amb_state
    cdef i64 best
    cdef bint best_amb
    cdef i64 tq, tb
    cdef object out_new, out_old, output

    try:
        pstate = <i64 *> malloc(cap * sizeof(i64))
        pprev = <i64 *> malloc(cap * sizeof(i64))
        ptrans = <i64 *> malloc(cap * sizeof(i64))
        pweight = <i64 *> malloc(cap * sizeof(i64))
        pflag = <char *> malloc(cap)
        col_start = <i64 *> malloc((n_in + 2) * sizeof(i64))
        seen = <i64 *> malloc(n_states * sizeof(i64))
        cell_at = <i64 *> malloc(n_states * sizeof(i64))
        if (pstate == NULL or pprev == NULL or ptrans == NULL or pweight == NULL
                or pflag == NULL or col_start == NULL or seen == NULL or cell_at == NULL):
            raise MemoryError()

        for j in range(n_states):
            seen[j] = -1
            cell_at[j] = 0
        pstate[0] = initial
        pprev[0] = -1
        ptrans[0] = -1
        pweight[0] = 0
        pflag[0] = 0
        pool_len = 1
        col_start[0] = 0
        col_start[1] = 1
        seen[initial] = 0

        for j in range(n_in):
            x = codes[j]
            for ci in range(col_start[j], col_start[j + 1]):
                p = pstate[ci]
                base = bp_off[p]
                end = bp_off[p + 1]
                lo = base
                hi = end
                while lo < hi:
                    mid = (lo + hi) >> 1
                    if bp_val[mid] < x:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo == end:
                    continue
                for ridx in range(row_off[lo], row_off[lo + 1]):
                    tid = row_trans[ridx]
                    probes += 1
                    q = tdst[tid]
                    w = tw[tid]
                    if seen[q] != j + 1:
                        seen[q] = j + 1
                        if pool_len == cap:
                            # grow through temporaries: on failure the old
                            # blocks stay valid for the finally block to free
                            new_cap = cap * 2
                            tmp = <i64 *> realloc(pstate, new_cap * sizeof(i64))
                            if tmp == NULL:
                                raise MemoryError()
                            pstate = tmp
                            tmp = <i64 *> realloc(pprev, new_cap * sizeof(i64))
                            if tmp == NULL:
                                raise MemoryError()
                            pprev = tmp
                            tmp = <i64 *> realloc(ptrans, new_cap * sizeof(i64))
                            if tmp == NULL:
                                raise MemoryError()
                            ptrans = tmp
                            tmp = <i64 *> realloc(pweight, new_cap * sizeof(i64))
                            if tmp == NULL:
                                raise MemoryError()
                            pweight = tmp
                            ctmp = <char *> realloc(pflag, new_cap)
                            if ctmp == NULL:
                                raise MemoryError()
                            pflag = ctmp
                            cap = new_cap
                        cell_at[q] = pool_len
                        pstate[pool_len] = q
                        pprev[pool_len] = ci
                        ptrans[pool_len] = tid
                        pweight[pool_len] = w
                        pflag[pool_len] = 0
                        pool_len += 1
                        continue
                    cidx = cell_at[q]
                    if w != pweight[cidx]:
                        c = 1 if w > pweight[cidx] else -1
                    else:
                        c = _cmp_tail(pprev, pweight, ci, pprev[cidx])
                    if c == 0:
                        if not pflag[cidx]:
                            out_new, out_old = _segments_to_ancestor(
                                pprev, ptrans, tout, ci, pprev[cidx])
                            if out_new + tout[tid] != out_old + tout[ptrans[cidx]]:
                                pflag[cidx] = 1
                    elif (c > 0) == is_max:
                        pprev[cidx] = ci
                        ptrans[cidx] = tid
                        pweight[cidx] = w
                        pflag[cidx] = 0
            col_start[j + 2] = pool_len
            amb_state = -1
            for ci in range(col_start[j + 1], col_start[j + 2]):
                if pflag[ci] and (amb_state < 0 or pstate[ci] < amb_state):
                    amb_state = pstate[ci]
            if amb_state >= 0:
                return (False, None, AMB_CELL, j, amb_state, pool_len, probes)

        best = -1
        best_amb = False
        for ci in range(col_start[n_in], col_start[n_in + 1]):
            q = pstate[ci]
            if not tau_has[q]:
                continue
            if best < 0:
                best = ci
                continue
            tq = tau_w[q]
            tb = tau_w[pstate[best]]
            if tq != tb:
                c = 1 if tq > tb else -1
            else:
                c = _cmp_tail(pprev, pweight, ci, best)
            if c == 0:
                if not best_amb:
                    out_new, out_old = _segments_to_ancestor(pprev, ptrans, tout, ci, best)
                    if out_new + tau_out[q] != out_old + tau_out[pstate[best]]:
                        best_amb = True
            elif (c > 0) == is_max:
                best = ci
                best_amb = False

        if best < 0:
            return (False, None, AMB_NONE, 0, -1, pool_len, probes)
        if best_amb:
            return (False, None, AMB_FINAL, n_in, pstate[best], pool_len, probes)
        output = _path_output(pprev, ptrans, tout, best) + tau_out[pstate[best]]
        return (True, output, AMB_NONE, 0, -1, pool_len, probes)
    finally:
        free(pstate)
        free(pprev)
        free(ptrans)
        free(pweight)
        free(pflag)
        free(col_start)
        free(seen)
        free(cell_at)
