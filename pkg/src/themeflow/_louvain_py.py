"""Pure-Python Louvain kernel.

This is the fallback twin of the compiled kernel in _louvain_cy.pyx.  The
two implementations must stay operation-for-operation identical in their
floating-point arithmetic: the extension is compiled with -ffp-contract=off
so a C double computes exactly what a CPython float computes here, and the
deterministic visit order plus lowest-community-id tie-breaking then yield
bit-identical partitions from either backend.

Input graph: CSR arrays over n nodes (xadj, adjncy, adjwgt; each undirected
edge stored in both directions, no self entries) plus a per-node self-weight
array used by aggregated levels.  Moves are accepted only on strict
modularity improvement, which guarantees termination and a monotonically
increasing objective.
"""

from __future__ import annotations

BACKEND = "python"


def _level_modularity(n, inn, tot, inv_m, inv_two_m):
    q = 0.0
    for c in range(n):
        t = tot[c] * inv_two_m
        q += inn[c] * inv_m - t * t
    return q


def _one_level(n, xadj, adjncy, adjwgt, selfw, order, check):
    """Local-move phase.  Returns (comm, moved_total, q, two_m)."""
    deg = [0.0] * n
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

    comm = list(range(n))
    tot = deg[:]
    inn = selfw[:]

    cand = [0] * n
    wval = [0.0] * n
    where = [-1] * n

    q_prev = _level_modularity(n, inn, tot, inv_m, inv_two_m) if check else 0.0

    moved_total = 0
    while True:
        moves = 0
        for i in order:
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
                # strict improvement over staying; ties between improving
                # candidates go to the lowest community id
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

    q = _level_modularity(n, inn, tot, inv_m, inv_two_m)
    return comm, moved_total, q, two_m


def _aggregate(n, xadj, adjncy, adjwgt, selfw, comm):
    """Collapse communities into supernodes.  Internal weight (edges once
    plus member self-weights) becomes the supernode self-weight."""
    occupied = [0] * n
    for i in range(n):
        occupied[comm[i]] = 1
    new_id = [-1] * n
    n_new = 0
    for c in range(n):
        if occupied[c]:
            new_id[c] = n_new
            n_new += 1

    # members grouped by new community id, ascending node index within
    count = [0] * (n_new + 1)
    for i in range(n):
        count[new_id[comm[i]] + 1] += 1
    for c in range(n_new):
        count[c + 1] += count[c]
    members = [0] * n
    fill = count[:]
    for i in range(n):
        c = new_id[comm[i]]
        members[fill[c]] = i
        fill[c] += 1

    new_xadj = [0] * (n_new + 1)
    new_adjncy = []
    new_adjwgt = []
    new_selfw = [0.0] * n_new

    cand = [0] * n_new
    wval = [0.0] * n_new
    where = [-1] * n_new

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
            new_adjncy.append(cand[t])
            new_adjwgt.append(wval[t])
            where[cand[t]] = -1
        new_xadj[nc + 1] = len(new_adjncy)

    return n_new, new_xadj, new_adjncy, new_adjwgt, new_selfw, new_id


def louvain_kernel(n, xadj, adjncy, adjwgt, order, check=False):
    """Full two-phase Louvain.

    Returns (membership, q, levels): membership maps each original node to
    a dense community id, q is the modularity of the final level, levels is
    the number of local-move phases executed.
    """
    if n <= 0:
        raise ValueError("empty graph")
    xadj = list(xadj)
    adjncy = list(adjncy)
    adjwgt = [float(w) for w in adjwgt]
    order = list(order)
    selfw = [0.0] * n

    flat = list(range(n))
    levels = 0
    while True:
        comm, moved, q, two_m = _one_level(
            n, xadj, adjncy, adjwgt, selfw, order, check
        )
        levels += 1
        if moved == 0:
            break  # comm is the identity; flat already holds the partition
        n_new, xadj2, adjncy2, adjwgt2, selfw2, new_id = _aggregate(
            n, xadj, adjncy, adjwgt, selfw, comm
        )
        if check:
            inv_two_m = 1.0 / two_m
            inv_m = 2.0 * inv_two_m
            q_agg = 0.0
            for c in range(n_new):
                s = 0.0
                for k in range(xadj2[c], xadj2[c + 1]):
                    s += adjwgt2[k]
                t = (s + 2.0 * selfw2[c]) * inv_two_m
                q_agg += selfw2[c] * inv_m - t * t
            if abs(q_agg - q) > 1e-9:
                raise AssertionError(f"aggregation changed modularity: {q} -> {q_agg}")
        for v in range(len(flat)):
            flat[v] = new_id[comm[flat[v]]]
        if n_new == 1:
            break
        n, xadj, adjncy, adjwgt, selfw = n_new, xadj2, adjncy2, adjwgt2, selfw2
        order = list(range(n))

    return flat, q, levels
