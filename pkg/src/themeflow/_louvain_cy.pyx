# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Louvain kernel.

Twin of _louvain_py.louvain_kernel: the same CSR layout, the same visit
order, the same strict-improvement move rule with lowest-community-id tie
breaking, and floating-point operations in the same order.  Built with
-ffp-contract=off so every C double rounds exactly like the CPython float
in the fallback, which makes the two backends return identical partitions.
"""

from libc.stdlib cimport free, malloc

BACKEND = "cython"


cdef double _level_modularity(long n, double* inn, double* tot,
                              double inv_m, double inv_two_m):
    cdef double q = 0.0
    cdef double t
    cdef long c
    for c in range(n):
        t = tot[c] * inv_two_m
        q += inn[c] * inv_m - t * t
    return q


cdef long _one_level(long n, long* xadj, long* adjncy, double* adjwgt,
                     double* selfw, long* order, bint check,
                     long* comm, double* deg, double* tot, double* inn,
                     long* cand, double* wval, long* where,
                     double* q_out, double* two_m_out) except -1:
    cdef long i, k, c, t, old, best_c, ncand, t_old, oi
    cdef long moves, moved_total
    cdef double s, two_m, inv_two_m, m, inv_m
    cdef double ki_old, gain, best_gain, best_w, q_prev, q_now

    for i in range(n):
        s = 0.0
        for k in range(xadj[i], xadj[i + 1]):
            s += adjwgt[k]
        deg[i] = s + 2.0 * selfw[i]
    two_m = 0.0
    for i in range(n):
        two_m += deg[i]
    if two_m <= 0.0:
        raise ValueError("louvain kernel requires positive total weight")
    inv_two_m = 1.0 / two_m
    m = 0.5 * two_m
    inv_m = 1.0 / m

    for i in range(n):
        comm[i] = i
        tot[i] = deg[i]
        inn[i] = selfw[i]
        where[i] = -1

    q_prev = _level_modularity(n, inn, tot, inv_m, inv_two_m) if check else 0.0

    moved_total = 0
    while True:
        moves = 0
        for oi in range(n):
            i = order[oi]
            old = comm[i]
            ncand = 0
            for k in range(xadj[i], xadj[i + 1]):
                c = comm[adjncy[k]]
                t = where[c]
                if t < 0:
                    where[c] = ncand
                    cand[ncand] = c
                    wval[ncand] = adjwgt[k]
                    ncand += 1
                else:
                    wval[t] += adjwgt[k]

            t_old = where[old]
            ki_old = wval[t_old] if t_old >= 0 else 0.0

            tot[old] -= deg[i]
            inn[old] -= ki_old + selfw[i]

            best_c = old
            best_gain = ki_old - (tot[old] * deg[i]) * inv_two_m
            best_w = ki_old
            for t in range(ncand):
                c = cand[t]
                if c == old:
                    continue
                gain = wval[t] - (tot[c] * deg[i]) * inv_two_m
                if gain > best_gain or (gain == best_gain and best_c != old and c < best_c):
                    best_gain = gain
                    best_c = c
                    best_w = wval[t]

            tot[best_c] += deg[i]
            inn[best_c] += best_w + selfw[i]
            comm[i] = best_c
            if best_c != old:
                moves += 1

            for t in range(ncand):
                where[cand[t]] = -1

            if check:
                q_now = _level_modularity(n, inn, tot, inv_m, inv_two_m)
                if q_now < q_prev - 1e-12:
                    raise AssertionError(
                        f"modularity decreased during local move: {q_prev} -> {q_now}"
                    )
                q_prev = q_now

        moved_total += moves
        if moves == 0:
            break

    q_out[0] = _level_modularity(n, inn, tot, inv_m, inv_two_m)
    two_m_out[0] = two_m
    return moved_total


cdef long _aggregate(long n, long* xadj, long* adjncy, double* adjwgt,
                     double* selfw, long* comm,
                     long* new_xadj, long* new_adjncy, double* new_adjwgt,
                     double* new_selfw, long* new_id,
                     long* occupied, long* count, long* fill, long* members,
                     long* cand, double* wval, long* where) except -1:
    cdef long i, c, k, cj, t, nc, ncand, idx, n_new, nnz_new
    cdef double acc_self

    for c in range(n):
        occupied[c] = 0
    for i in range(n):
        occupied[comm[i]] = 1
    n_new = 0
    for c in range(n):
        if occupied[c]:
            new_id[c] = n_new
            n_new += 1
        else:
            new_id[c] = -1

    for c in range(n_new + 1):
        count[c] = 0
    for i in range(n):
        count[new_id[comm[i]] + 1] += 1
    for c in range(n_new):
        count[c + 1] += count[c]
    for c in range(n_new + 1):
        fill[c] = count[c]
    for i in range(n):
        c = new_id[comm[i]]
        members[fill[c]] = i
        fill[c] += 1

    for c in range(n_new):
        where[c] = -1

    nnz_new = 0
    new_xadj[0] = 0
    for nc in range(n_new):
        ncand = 0
        acc_self = 0.0
        for idx in range(count[nc], count[nc + 1]):
            i = members[idx]
            acc_self += selfw[i]
            for k in range(xadj[i], xadj[i + 1]):
                cj = new_id[comm[adjncy[k]]]
                if cj == nc:
                    acc_self += 0.5 * adjwgt[k]
                else:
                    t = where[cj]
                    if t < 0:
                        where[cj] = ncand
                        cand[ncand] = cj
                        wval[ncand] = adjwgt[k]
                        ncand += 1
                    else:
                        wval[t] += adjwgt[k]
        new_selfw[nc] = acc_self
        for t in range(ncand):
            new_adjncy[nnz_new] = cand[t]
            new_adjwgt[nnz_new] = wval[t]
            nnz_new += 1
            where[cand[t]] = -1
        new_xadj[nc + 1] = nnz_new

    return n_new


def louvain_kernel(n, xadj, adjncy, adjwgt, order, check=False):
    """Full two-phase Louvain over CSR lists; see the Python twin."""
    cdef long N = n
    cdef long NNZ = len(adjncy)
    cdef bint do_check = bool(check)
    cdef long i, k, c, v, levels, moved, n_new, n_cur
    cdef double q, two_m, inv_two_m, inv_m, s, t, q_agg

    if N <= 0:
        raise ValueError("empty graph")

    cdef long* xadj_a = NULL
    cdef long* adjncy_a = NULL
    cdef double* adjwgt_a = NULL
    cdef long* xadj_b = NULL
    cdef long* adjncy_b = NULL
    cdef double* adjwgt_b = NULL
    cdef double* selfw_a = NULL
    cdef double* selfw_b = NULL
    cdef long* order_a = NULL
    cdef long* comm = NULL
    cdef double* deg = NULL
    cdef double* tot = NULL
    cdef double* inn = NULL
    cdef long* cand = NULL
    cdef double* wval = NULL
    cdef long* where = NULL
    cdef long* occupied = NULL
    cdef long* new_id = NULL
    cdef long* count = NULL
    cdef long* fill = NULL
    cdef long* members = NULL
    cdef long* flat = NULL
    cdef long* tmp_l
    cdef double* tmp_d

    try:
        xadj_a = <long*> malloc((N + 1) * sizeof(long))
        adjncy_a = <long*> malloc(max(NNZ, 1) * sizeof(long))
        adjwgt_a = <double*> malloc(max(NNZ, 1) * sizeof(double))
        xadj_b = <long*> malloc((N + 1) * sizeof(long))
        adjncy_b = <long*> malloc(max(NNZ, 1) * sizeof(long))
        adjwgt_b = <double*> malloc(max(NNZ, 1) * sizeof(double))
        selfw_a = <double*> malloc(N * sizeof(double))
        selfw_b = <double*> malloc(N * sizeof(double))
        order_a = <long*> malloc(N * sizeof(long))
        comm = <long*> malloc(N * sizeof(long))
        deg = <double*> malloc(N * sizeof(double))
        tot = <double*> malloc(N * sizeof(double))
        inn = <double*> malloc(N * sizeof(double))
        cand = <long*> malloc(N * sizeof(long))
        wval = <double*> malloc(N * sizeof(double))
        where = <long*> malloc(N * sizeof(long))
        occupied = <long*> malloc(N * sizeof(long))
        new_id = <long*> malloc(N * sizeof(long))
        count = <long*> malloc((N + 1) * sizeof(long))
        fill = <long*> malloc((N + 1) * sizeof(long))
        members = <long*> malloc(N * sizeof(long))
        flat = <long*> malloc(N * sizeof(long))
        if (xadj_a == NULL or adjncy_a == NULL or adjwgt_a == NULL or
                xadj_b == NULL or adjncy_b == NULL or adjwgt_b == NULL or
                selfw_a == NULL or selfw_b == NULL or order_a == NULL or
                comm == NULL or deg == NULL or tot == NULL or inn == NULL or
                cand == NULL or wval == NULL or where == NULL or
                occupied == NULL or new_id == NULL or count == NULL or
                fill == NULL or members == NULL or flat == NULL):
            raise MemoryError()

        for i in range(N + 1):
            xadj_a[i] = xadj[i]
        for k in range(NNZ):
            adjncy_a[k] = adjncy[k]
            adjwgt_a[k] = adjwgt[k]
        for i in range(N):
            order_a[i] = order[i]
            selfw_a[i] = 0.0
            flat[i] = i

        n_cur = N
        levels = 0
        q = 0.0
        while True:
            moved = _one_level(n_cur, xadj_a, adjncy_a, adjwgt_a, selfw_a,
                               order_a, do_check, comm, deg, tot, inn,
                               cand, wval, where, &q, &two_m)
            levels += 1
            if moved == 0:
                break
            n_new = _aggregate(n_cur, xadj_a, adjncy_a, adjwgt_a, selfw_a,
                               comm, xadj_b, adjncy_b, adjwgt_b, selfw_b,
                               new_id, occupied, count, fill, members,
                               cand, wval, where)
            if do_check:
                inv_two_m = 1.0 / two_m
                inv_m = 2.0 * inv_two_m
                q_agg = 0.0
                for c in range(n_new):
                    s = 0.0
                    for k in range(xadj_b[c], xadj_b[c + 1]):
                        s += adjwgt_b[k]
                    t = (s + 2.0 * selfw_b[c]) * inv_two_m
                    q_agg += selfw_b[c] * inv_m - t * t
                if abs(q_agg - q) > 1e-9:
                    raise AssertionError(
                        f"aggregation changed modularity: {q} -> {q_agg}"
                    )
            for v in range(N):
                flat[v] = new_id[comm[flat[v]]]
            if n_new == 1:
                break
            tmp_l = xadj_a; xadj_a = xadj_b; xadj_b = tmp_l
            tmp_l = adjncy_a; adjncy_a = adjncy_b; adjncy_b = tmp_l
            tmp_d = adjwgt_a; adjwgt_a = adjwgt_b; adjwgt_b = tmp_d
            tmp_d = selfw_a; selfw_a = selfw_b; selfw_b = tmp_d
            n_cur = n_new
            for i in range(n_cur):
                order_a[i] = i

        membership = [0] * N
        for i in range(N):
            membership[i] = flat[i]
        return membership, q, levels
    finally:
        free(xadj_a); free(adjncy_a); free(adjwgt_a)
        free(xadj_b); free(adjncy_b); free(adjwgt_b)
        free(selfw_a); free(selfw_b); free(order_a)
        free(comm); free(deg); free(tot); free(inn)
        free(cand); free(wval); free(where)
        free(occupied); free(new_id); free(count); free(fill)
        free(members); free(flat)
