"""Numba kernels for the hot loops: Split labels, local-search scans, ant steps.

All tours are int64 arrays of arc ids. ``W`` is the arc-to-arc distance
matrix with arc 0 the depot loop, so a trip ``a1..aq`` costs
``W[0,a1] + sum(cost) + sum(W[a_k, a_k+1]) + W[aq,0]``.
"""
import numpy as np
from numba import njit

INF = np.int64(2**62)


@njit(cache=True, nogil=True)
def split_labels(tour, W, cost, demand, Q, V, pred, ntrips):
    """Fill shortest-path labels of the Split graph; returns V[n].

    Ties: fewer trips, then the smallest predecessor.
    """
    n = tour.shape[0]
    V[0] = 0
    ntrips[0] = 0
    pred[0] = -1
    for j in range(1, n + 1):
        best = INF
        bt = INF
        bp = -1
        load = 0
        inner = 0
        last = tour[j - 1]
        back = W[last, 0]
        for i in range(j - 1, -1, -1):
            a = tour[i]
            load += demand[a]
            if load > Q:
                break
            if i == j - 1:
                inner = cost[a]
            else:
                inner += cost[a] + W[a, tour[i + 1]]
            if V[i] >= INF:
                continue
            c = V[i] + W[0, a] + inner + back
            t = ntrips[i] + 1
            if c < best or (c == best and t <= bt):
                best = c
                bt = t
                bp = i
        V[j] = best
        ntrips[j] = bt
        pred[j] = bp
    return V[n]


@njit(cache=True, nogil=True)
def split_cost(tour, W, cost, demand, Q):
    n = tour.shape[0]
    V = np.empty(n + 1, dtype=np.int64)
    pred = np.empty(n + 1, dtype=np.int64)
    nt = np.empty(n + 1, dtype=np.int64)
    return split_labels(tour, W, cost, demand, Q, V, pred, nt)


@njit(cache=True, nogil=True)
def split_forward(tour, W, cost, demand, Q, B, succ, ntrips):
    """Suffix form of Split with the break points used for reconstruction.

    B[j] is the best cost of tasks j.. and succ[j] the end of the first trip
    of that suffix. Ties: fewer trips, then the smallest end, so following
    succ from 0 gives the lexicographically earliest break points.
    """
    n = tour.shape[0]
    B[n] = 0
    ntrips[n] = 0
    succ[n] = -1
    for j in range(n - 1, -1, -1):
        best = INF
        bt = INF
        be = -1
        load = 0
        inner = 0
        out = W[0, tour[j]]
        for e in range(j, n):
            a = tour[e]
            load += demand[a]
            if load > Q:
                break
            if e == j:
                inner = cost[a]
            else:
                inner += cost[a] + W[tour[e - 1], a]
            if B[e + 1] >= INF:
                continue
            c = out + inner + W[a, 0] + B[e + 1]
            t = ntrips[e + 1] + 1
            if c < best or (c == best and t < bt):
                best = c
                bt = t
                be = e + 1
        B[j] = best
        ntrips[j] = bt
        succ[j] = be
    return B[0]


@njit(cache=True, nogil=True)
def suffix_labels(tour, W, cost, demand, Q, B):
    """B[j] = optimal Split cost of tasks j..n-1 alone."""
    n = tour.shape[0]
    B[n] = 0
    for j in range(n - 1, -1, -1):
        best = INF
        load = 0
        inner = 0
        first = tour[j]
        out = W[0, first]
        for e in range(j, n):
            a = tour[e]
            load += demand[a]
            if load > Q:
                break
            if e == j:
                inner = cost[a]
            else:
                inner += cost[a] + W[tour[e - 1], a]
            if B[e + 1] >= INF:
                continue
            c = out + inner + W[a, 0] + B[e + 1]
            if c < best:
                best = c
        B[j] = best
    return B[0]


@njit(cache=True, nogil=True)
def _eval_window(cand, m, r, curV, B, work, W, cost, demand, Q, lmax, bound):
    """Exact Split cost of ``cand``, which equals the current tour outside [m, r).

    Labels 0..m come from ``curV`` and suffix costs from ``B``; since no trip
    holds more than ``lmax`` tasks, some break point lies in [r, r + lmax],
    so labels are only needed up to there. Labels never decrease (triangle
    inequality) which allows an early exit once one reaches ``bound``.
    """
    n = cand.shape[0]
    if n == 0:
        return 0
    hi = r + lmax
    if hi > n:
        hi = n
    for j in range(m + 1, hi + 1):
        best = INF
        load = 0
        inner = 0
        last = cand[j - 1]
        back = W[last, 0]
        for i in range(j - 1, -1, -1):
            a = cand[i]
            load += demand[a]
            if load > Q:
                break
            if i == j - 1:
                inner = cost[a]
            else:
                inner += cost[a] + W[a, cand[i + 1]]
            vi = curV[i] if i <= m else work[i]
            if vi >= INF:
                continue
            c = vi + W[0, a] + inner + back
            if c < best:
                best = c
        work[j] = best
        if best >= bound:
            return best
    best = INF
    for b in range(r, hi + 1):
        vb = curV[b] if b <= m else work[b]
        if vb >= INF or B[b] >= INF:
            continue
        c = vb + B[b]
        if c < best:
            best = c
    return best


@njit(cache=True, nogil=True)
def _sides(R, VR, BR, p, W, cost, demand, Q, lv, ll, rv, rl):
    """Partial trips around an insertion point ``p`` of the reduced tour ``R``.

    Left option k=0 starts a trip at the inserted block (value VR[p]); k>=1
    lets the trip begin k tasks earlier, at R[p-k]. Right option k=0 ends
    the trip after the block (value BR[p]); k>=1 carries it on through
    R[p..p+k-1]. Values exclude the links to the block itself.
    """
    nr = R.shape[0]
    lv[0] = VR[p]
    ll[0] = 0
    nl = 1
    load = 0
    inner = 0
    for i in range(p - 1, -1, -1):
        a = R[i]
        load += demand[a]
        if load > Q:
            break
        if i == p - 1:
            inner = cost[a]
        else:
            inner += cost[a] + W[a, R[i + 1]]
        lv[nl] = VR[i] + W[0, a] + inner
        ll[nl] = load
        nl += 1
    rv[0] = BR[p]
    rl[0] = 0
    nrt = 1
    load = 0
    inner = 0
    for e in range(p, nr):
        a = R[e]
        load += demand[a]
        if load > Q:
            break
        if e == p:
            inner = cost[a]
        else:
            inner += cost[a] + W[R[e - 1], a]
        rv[nrt] = inner + W[a, 0] + BR[e + 1]
        rl[nrt] = load
        nrt += 1
    return nl, nrt


@njit(cache=True, nogil=True)
def _left_min(R, p, nl, lv, ll, W, x, cap):
    """Cheapest prefix ending with a trip that reaches ``x``, left load <= cap."""
    best = INF
    for k in range(nl):
        if ll[k] > cap:
            break
        v = lv[k] + (W[0, x] if k == 0 else W[R[p - 1], x])
        if v < best:
            best = v
    return best


@njit(cache=True, nogil=True)
def _right_min(R, p, nrt, rv, rl, W, y, cap):
    best = INF
    for k in range(nrt):
        if rl[k] > cap:
            break
        v = rv[k] + (W[y, 0] if k == 0 else W[y, R[p]])
        if v < best:
            best = v
    return best


@njit(cache=True, nogil=True)
def _block_cost(R, p, nl, lv, ll, nrt, rv, rl, pm, W, x, y, cb, db, Q):
    """Exact Split cost when a block entered by ``x`` and left by ``y``
    (cost ``cb``, demand ``db``) is inserted at ``p`` and kept in one trip.

    Any segmentation has one trip holding the block; its best left and
    right extensions are combined under the capacity left over.
    """
    cap = Q - db
    if cap < 0:
        return INF
    cnt = 0
    m = INF
    for k in range(nrt):
        if rl[k] > cap:
            break
        v = rv[k] + (W[y, 0] if k == 0 else W[y, R[p]])
        if v < m:
            m = v
        pm[k] = m
        cnt = k + 1
    best = INF
    kr = cnt - 1
    for k in range(nl):
        if ll[k] > cap:
            break
        while kr >= 0 and ll[k] + rl[kr] > cap:
            kr -= 1
        if kr < 0:
            break
        v = lv[k] + (W[0, x] if k == 0 else W[R[p - 1], x]) + pm[kr]
        if v < best:
            best = v
    if best >= INF:
        return INF
    return best + cb


@njit(cache=True, nogil=True)
def _reduced(cur, i, width, R, VR, BR, pred, nt, W, cost, demand, Q):
    """Tour without positions i..i+width-1, with its prefix and suffix labels."""
    n = cur.shape[0]
    k = 0
    for s in range(n):
        if s < i or s >= i + width:
            R[k] = cur[s]
            k += 1
    split_labels(R[:k], W, cost, demand, Q, VR, pred, nt)
    suffix_labels(R[:k], W, cost, demand, Q, BR)
    return R[:k]


@njit(cache=True, nogil=True)
def _insert(R, p, x, y, width, cand):
    k = 0
    for s in range(R.shape[0] + 1):
        if s == p:
            cand[k] = x
            k += 1
            if width == 2:
                cand[k] = y
                k += 1
        if s < R.shape[0]:
            cand[k] = R[s]
            k += 1


@njit(cache=True, nogil=True)
def scan_relocate(cur, curV, B, curcost, cand, work, W, cost, demand, opp, Q, lmax, i0):
    """First improving single-task move with task position >= i0.

    Task i is taken out and put back at position p of the remaining tour,
    as is (o=0) or flipped (o=1). Returns (new cost, i, p, o), new cost -1
    if none; ``cand`` then holds the improved tour.
    """
    n = cur.shape[0]
    R = np.empty(n, dtype=np.int64)
    VR = np.empty(n + 1, dtype=np.int64)
    BR = np.empty(n + 1, dtype=np.int64)
    pred = np.empty(n + 1, dtype=np.int64)
    nt = np.empty(n + 1, dtype=np.int64)
    lv = np.empty(lmax + 2, dtype=np.int64)
    ll = np.empty(lmax + 2, dtype=np.int64)
    rv = np.empty(lmax + 2, dtype=np.int64)
    rl = np.empty(lmax + 2, dtype=np.int64)
    pm = np.empty(lmax + 2, dtype=np.int64)
    for i in range(i0, n):
        x = cur[i]
        Rv = _reduced(cur, i, 1, R, VR, BR, pred, nt, W, cost, demand, Q)
        for p in range(n):
            nl, nrt = _sides(Rv, VR, BR, p, W, cost, demand, Q, lv, ll, rv, rl)
            for o in range(2):
                if p == i and o == 0:
                    continue
                y = x if o == 0 else opp[x]
                c = _block_cost(Rv, p, nl, lv, ll, nrt, rv, rl, pm, W, y, y, cost[y], demand[y], Q)
                if c < curcost:
                    _insert(Rv, p, y, y, 1, cand)
                    return c, i, p, o
    return -1, -1, -1, -1


@njit(cache=True, nogil=True)
def scan_pair(cur, curV, B, curcost, cand, work, W, cost, demand, opp, Q, lmax, i0):
    """First improving move of the two tasks at i, i+1 (i >= i0).

    Variants: 0 keep (a,b), 1 flip both (a',b'), 2 swap (b,a), 3 reverse (b',a').
    The pair may end up in one trip or straddle two; both are costed.
    """
    n = cur.shape[0]
    R = np.empty(n, dtype=np.int64)
    VR = np.empty(n + 1, dtype=np.int64)
    BR = np.empty(n + 1, dtype=np.int64)
    pred = np.empty(n + 1, dtype=np.int64)
    nt = np.empty(n + 1, dtype=np.int64)
    lv = np.empty(lmax + 2, dtype=np.int64)
    ll = np.empty(lmax + 2, dtype=np.int64)
    rv = np.empty(lmax + 2, dtype=np.int64)
    rl = np.empty(lmax + 2, dtype=np.int64)
    pm = np.empty(lmax + 2, dtype=np.int64)
    for i in range(i0, n - 1):
        a = cur[i]
        b = cur[i + 1]
        Rv = _reduced(cur, i, 2, R, VR, BR, pred, nt, W, cost, demand, Q)
        for p in range(n - 1):
            nl, nrt = _sides(Rv, VR, BR, p, W, cost, demand, Q, lv, ll, rv, rl)
            for v in range(4):
                if p == i and v == 0:
                    continue
                if v == 0:
                    x, y = a, b
                elif v == 1:
                    x, y = opp[a], opp[b]
                elif v == 2:
                    x, y = b, a
                else:
                    x, y = opp[b], opp[a]
                c = _block_cost(Rv, p, nl, lv, ll, nrt, rv, rl, pm, W, x, y,
                                cost[x] + W[x, y] + cost[y], demand[x] + demand[y], Q)
                lm = _left_min(Rv, p, nl, lv, ll, W, x, Q - demand[x])
                rm = _right_min(Rv, p, nrt, rv, rl, W, y, Q - demand[y])
                if lm < INF and rm < INF:
                    c2 = lm + cost[x] + W[x, 0] + W[0, y] + cost[y] + rm
                    if c2 < c:
                        c = c2
                if c < curcost:
                    _insert(Rv, p, x, y, 2, cand)
                    return c, i, p, v
    return -1, -1, -1, -1


@njit(cache=True, nogil=True)
def scan_two_opt(cur, curV, B, curcost, cand, work, W, cost, demand, opp, Q, lmax, i0):
    """First improving reversal of cur[i..j], orientations flipped (i >= i0)."""
    n = cur.shape[0]
    for s in range(n):
        cand[s] = cur[s]
    for i in range(i0, n - 1):
        for j in range(i + 1, n):
            for s in range(i, j + 1):
                cand[s] = opp[cur[i + j - s]]
            c = _eval_window(cand, i, j + 1, curV, B, work, W, cost, demand, Q, lmax, curcost)
            if c < curcost:
                return c, i, j, 0
            for s in range(i, j + 1):
                cand[s] = cur[s]
    return -1, -1, -1, -1


@njit(cache=True, nogil=True)
def _scan(kind, cur, curV, B, curcost, cand, work, W, cost, demand, opp, Q, lmax, i0):
    if kind == 0:
        return scan_relocate(cur, curV, B, curcost, cand, work, W, cost, demand, opp, Q, lmax, i0)
    if kind == 1:
        return scan_pair(cur, curV, B, curcost, cand, work, W, cost, demand, opp, Q, lmax, i0)
    return scan_two_opt(cur, curV, B, curcost, cand, work, W, cost, demand, opp, Q, lmax, i0)


@njit(cache=True, nogil=True)
def scan_first(kind, tour, W, cost, demand, opp, Q, lmax):
    """First improving move of one kind from position 0; returns (cost, i, j, variant, tour)."""
    n = tour.shape[0]
    cur = tour.copy()
    cand = np.empty(n, dtype=np.int64)
    curV = np.empty(n + 1, dtype=np.int64)
    B = np.empty(n + 1, dtype=np.int64)
    work = np.empty(n + 1, dtype=np.int64)
    pred = np.empty(n + 1, dtype=np.int64)
    nt = np.empty(n + 1, dtype=np.int64)
    curcost = split_labels(cur, W, cost, demand, Q, curV, pred, nt)
    suffix_labels(cur, W, cost, demand, Q, B)
    c, i, j, v = _scan(kind, cur, curV, B, curcost, cand, work, W, cost, demand, opp, Q, lmax, 0)
    return curcost, c, i, j, v, cand


@njit(cache=True, nogil=True)
def improve(tour, W, cost, demand, opp, Q, lmax):
    """Apply first-improving moves until no neighbourhood improves the tour.

    Each neighbourhood is scanned by ascending position; after a move the
    scan resumes at the same position. Rounds over the three neighbourhoods
    repeat until one round changes nothing.
    """
    n = tour.shape[0]
    cur = tour.copy()
    cand = np.empty(n, dtype=np.int64)
    curV = np.empty(n + 1, dtype=np.int64)
    B = np.empty(n + 1, dtype=np.int64)
    work = np.empty(n + 1, dtype=np.int64)
    pred = np.empty(n + 1, dtype=np.int64)
    nt = np.empty(n + 1, dtype=np.int64)
    curcost = split_labels(cur, W, cost, demand, Q, curV, pred, nt)
    suffix_labels(cur, W, cost, demand, Q, B)
    moves = 0
    while True:
        round_moves = 0
        for kind in range(3):
            i0 = 0
            while True:
                c, i, _, _ = _scan(kind, cur, curV, B, curcost, cand, work, W, cost, demand,
                                   opp, Q, lmax, i0)
                if c < 0:
                    break
                cur[:] = cand
                curcost = split_labels(cur, W, cost, demand, Q, curV, pred, nt)
                suffix_labels(cur, W, cost, demand, Q, B)
                round_moves += 1
                i0 = i
        moves += round_moves
        if round_moves == 0:
            break
    return cur, curcost, moves


# ------------------------------------------------------------------- ants

@njit(cache=True, nogil=True)
def candidate_sets(cur, remaining, r, W, tau, k):
    """Omega (best savings = smallest W) and Psi (largest tau), ties by arc id.

    ``remaining[:r]`` holds the non-taboo arcs in increasing arc id order.
    """
    rem = remaining[:r]
    kk = min(k, r)
    dkey = np.empty(r, dtype=np.int64)
    tkey = np.empty(r, dtype=np.float64)
    for x in range(r):
        dkey[x] = W[cur, rem[x]]
        tkey[x] = -tau[cur, rem[x]]
    omega = rem[np.argsort(dkey, kind="mergesort")[:kk]]
    psi = rem[np.argsort(tkey, kind="mergesort")[:kk]]
    return omega, psi


@njit(cache=True, nogil=True)
def psi_weights(cur, psi, W, tau, md, alpha, beta):
    w = np.empty(psi.shape[0], dtype=np.float64)
    for x in range(psi.shape[0]):
        s = (md - W[cur, psi[x]]) / md
        w[x] = s**alpha * tau[cur, psi[x]] ** beta
    return w


@njit(cache=True, nogil=True)
def select_step(cur, remaining, r, W, tau, md, k, p_p, alpha, beta, u1, u2):
    omega, psi = candidate_sets(cur, remaining, r, W, tau, k)
    if u1 < p_p:
        idx = int(u2 * omega.shape[0])
        if idx >= omega.shape[0]:
            idx = omega.shape[0] - 1
        return omega[idx]
    w = psi_weights(cur, psi, W, tau, md, alpha, beta)
    total = w.sum()
    if not total > 0.0:
        idx = int(u2 * psi.shape[0])
        if idx >= psi.shape[0]:
            idx = psi.shape[0] - 1
        return psi[idx]
    target = u2 * total
    acc = 0.0
    for x in range(psi.shape[0]):
        acc += w[x]
        if acc > target:
            return psi[x]
    # rounding: fall back to the last candidate with positive weight
    for x in range(psi.shape[0] - 1, -1, -1):
        if w[x] > 0.0:
            return psi[x]
    return psi[psi.shape[0] - 1]


@njit(cache=True, nogil=True)
def construct(req_arcs, opp, W, tau, md, k, p_p, alpha, beta, uniforms):
    """One ant tour from the depot; ``uniforms`` holds two draws per step."""
    remaining = req_arcs.copy()
    r = remaining.shape[0]
    t = r // 2
    tour = np.empty(t, dtype=np.int64)
    cur = 0
    for step in range(t):
        a = select_step(cur, remaining, r, W, tau, md, k, p_p, alpha, beta,
                        uniforms[2 * step], uniforms[2 * step + 1])
        tour[step] = a
        b = opp[a]
        w = 0
        for x in range(r):
            if remaining[x] != a and remaining[x] != b:
                remaining[w] = remaining[x]
                w += 1
        r = w
        cur = a
    return tour
