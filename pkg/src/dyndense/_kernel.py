"""Compiled mirror of the controller for small vertex counts.

Every structure of the reference implementation is laid out in dense
``int64`` arrays indexed by (copy, vertex[, vertex]).  Labels are the same
scaled integers, ring order and tie-breaking are identical, so both engines
produce the same orientation after every operation.  Out-neighbour maxima
and the label maximum are found by scanning, which is cheap at the sizes this
engine accepts.
"""

from __future__ import annotations

from collections import namedtuple

import numpy as np
from numba import njit

# P: scalar parameters and mutable controller state
P_N, P_K, P_ACTIVE, P_ALPHA, P_LEVEL_HI, P_ETA_FLOOR, P_SCALE, P_RHO2_ZERO, P_CAP = range(9)
# S: controller statistics
(S_FLIPS_TOTAL, S_FLIPS_LAST, S_MAX_ROUND, S_ROUND_VIOL, S_FORCED, S_GROWTHS,
 S_MAX_STEP, S_ERR_COPY, S_PEND_VIOL) = range(9)
# per-copy counters
C_INSERTS, C_DELETES, C_FLIPS, C_MAX_CHAIN, C_CTRL_FLIPS, C_LAST_CHAIN = range(6)

ERR_CHAIN = -1
ERR_ABSENT = -2
ERR_NEGATIVE = -3
ERR_NO_ROOM = -4

# invariant-check codes
OK = 0
BAD_RING = 1
BAD_MIRROR = 2
BAD_INDEG = 3
BAD_LABEL = 4
BAD_GAP = 5
BAD_CONSERVATION = 6
BAD_PENDING_ABOVE = 7
BAD_MAXLAB = 8
BAD_PENDING_LIMIT = 9

Kernel = namedtuple(
    "Kernel",
    "P S unit eta half rho rho2 maxlab cstat lab indeg ringsz icur scur cnt key nxt prv pend pendsz live",
)


def allocate(n: int, capacity: int) -> Kernel:
    z1 = lambda: np.zeros(capacity, dtype=np.int64)  # noqa: E731
    z2 = lambda: np.zeros((capacity, n), dtype=np.int64)  # noqa: E731
    z3 = lambda: np.zeros((capacity, n, n), dtype=np.int64)  # noqa: E731
    return Kernel(
        P=np.zeros(9, dtype=np.int64),
        S=np.zeros(9, dtype=np.int64),
        unit=np.zeros(n, dtype=np.int64),
        eta=z1(), half=z1(), rho=z1(), rho2=z1(), maxlab=z1(),
        cstat=np.zeros((capacity, 6), dtype=np.int64),
        lab=z2(), indeg=z2(), ringsz=z2(),
        icur=np.full((capacity, n), -1, dtype=np.int64),
        scur=np.full((capacity, n), -1, dtype=np.int64),
        cnt=z3(), key=z3(),
        nxt=np.full((capacity, n, n), -1, dtype=np.int64),
        prv=np.full((capacity, n, n), -1, dtype=np.int64),
        pend=z3(), pendsz=z1(),
        live=np.zeros((n, n), dtype=np.int64),
    )


def grow_capacity(k: Kernel, extra: int) -> Kernel:
    """Copy of ``k`` with room for ``extra`` more copies."""
    out = {}
    for name in Kernel._fields:
        a = getattr(k, name)
        if name in ("P", "S", "unit", "live"):
            out[name] = a.copy()
            continue
        fill = -1 if name in ("icur", "scur", "nxt", "prv") else 0
        pad = np.full((extra,) + a.shape[1:], fill, dtype=np.int64)
        out[name] = np.concatenate([a, pad])
    return Kernel(**out)


# ----------------------------------------------------------------------
# orientation store


@njit(cache=True, _nrt=False, error_model="numpy")
def _ring_insert(k, c, v, x):
    cur = k.icur[c, v]
    if cur < 0:
        k.nxt[c, v, x] = x
        k.prv[c, v, x] = x
        k.icur[c, v] = x
        k.scur[c, v] = x
    else:
        p = k.prv[c, v, cur]
        k.nxt[c, v, p] = x
        k.prv[c, v, x] = p
        k.nxt[c, v, x] = cur
        k.prv[c, v, cur] = x
    k.ringsz[c, v] += 1


@njit(cache=True, _nrt=False, error_model="numpy")
def _ring_remove(k, c, v, x):
    after = k.nxt[c, v, x]
    before = k.prv[c, v, x]
    k.nxt[c, v, x] = -1
    k.prv[c, v, x] = -1
    k.ringsz[c, v] -= 1
    if after == x:
        k.icur[c, v] = -1
        k.scur[c, v] = -1
        return
    k.nxt[c, v, before] = after
    k.prv[c, v, after] = before
    if k.icur[c, v] == x:
        k.icur[c, v] = after
    if k.scur[c, v] == x:
        k.scur[c, v] = after


@njit(cache=True, _nrt=False, error_model="numpy")
def _batch(k, c, size):
    # ceil(4 * size / eta) in scaled integers, at most the ring size
    b = -((-4 * size * k.P[P_SCALE]) // k.eta[c])
    return size if b > size else b


@njit(cache=True, _nrt=False, error_model="numpy")
def _add_edge(k, c, u, v):
    had = k.cnt[c, u, v]
    k.cnt[c, u, v] = had + 1
    k.indeg[c, v] += 1
    if had == 0:
        _ring_insert(k, c, v, u)
    k.key[c, u, v] = k.lab[c, v]


@njit(cache=True, _nrt=False, error_model="numpy")
def _remove_edge(k, c, u, v):
    had = k.cnt[c, u, v]
    if had == 0:
        return False
    k.cnt[c, u, v] = had - 1
    if had == 1:
        _ring_remove(k, c, v, u)
    k.indeg[c, v] -= 1
    return True


@njit(cache=True, _nrt=False, error_model="numpy")
def _relabel(k, c, u, new):
    old = k.lab[c, u]
    k.lab[c, u] = new
    if new > k.maxlab[c]:
        k.maxlab[c] = new
    elif old == k.maxlab[c] and new < old:
        m = 0
        for x in range(k.P[P_N]):
            if k.lab[c, x] > m:
                m = k.lab[c, x]
        k.maxlab[c] = m
    size = k.ringsz[c, u]
    if size == 0:
        return
    b = _batch(k, c, size)
    x = k.icur[c, u]
    for _ in range(b):
        k.key[c, x, u] = new
        x = k.nxt[c, u, x]
    k.icur[c, u] = x


@njit(cache=True, _nrt=False, error_model="numpy")
def _tight_in(k, c, u):
    size = k.ringsz[c, u]
    if size == 0:
        return -1
    b = _batch(k, c, size)
    thr = k.lab[c, u] - k.half[c]
    x = k.scur[c, u]
    for _ in range(b):
        if k.lab[c, x] <= thr:
            k.scur[c, u] = x
            return x
        x = k.nxt[c, u, x]
    k.scur[c, u] = x
    return -1


@njit(cache=True, _nrt=False, error_model="numpy")
def _tight_out(k, c, u):
    best = -1
    bkey = 0
    for x in range(k.P[P_N]):
        if k.cnt[c, u, x] > 0:
            kx = k.key[c, u, x]
            if best < 0 or kx > bkey:
                best = x
                bkey = kx
    if best >= 0 and bkey >= k.lab[c, u] + k.half[c]:
        return best
    return -1


# ----------------------------------------------------------------------
# threshold instance


@njit(cache=True, _nrt=False, error_model="numpy")
def _cap(k, c):
    return (2 * k.maxlab[c]) // k.eta[c] + 2


@njit(cache=True, _nrt=False, error_model="numpy")
def _note(k, c, chain):
    k.cstat[c, C_LAST_CHAIN] = chain
    k.cstat[c, C_FLIPS] += chain
    if chain > k.cstat[c, C_MAX_CHAIN]:
        k.cstat[c, C_MAX_CHAIN] = chain


@njit(cache=True, _nrt=False, error_model="numpy")
def ti_insert(k, c, u, v):
    """Returns the chain length, or ERR_CHAIN."""
    if k.lab[c, u] >= k.lab[c, v]:
        _add_edge(k, c, u, v)
        w = v
    else:
        _add_edge(k, c, v, u)
        w = u
    cap = _cap(k, c)
    chain = 0
    while True:
        x = _tight_in(k, c, w)
        if x < 0:
            break
        _remove_edge(k, c, x, w)
        _add_edge(k, c, w, x)
        w = x
        chain += 1
        if chain > cap:
            return ERR_CHAIN
    _relabel(k, c, w, k.lab[c, w] + k.unit[w])
    k.cstat[c, C_INSERTS] += 1
    _note(k, c, chain)
    return chain


@njit(cache=True, _nrt=False, error_model="numpy")
def ti_delete(k, c, u, v):
    """Returns (terminal vertex, chain length) or (error code, 0)."""
    if k.cnt[c, u, v] > 0:
        _remove_edge(k, c, u, v)
        w = v
    elif k.cnt[c, v, u] > 0:
        _remove_edge(k, c, v, u)
        w = u
    else:
        return ERR_ABSENT, 0
    cap = _cap(k, c)
    chain = 0
    while True:
        x = _tight_out(k, c, w)
        if x < 0:
            break
        _remove_edge(k, c, w, x)
        _add_edge(k, c, x, w)
        w = x
        chain += 1
        if chain > cap:
            return ERR_CHAIN, 0
    new = k.lab[c, w] - k.unit[w]
    if new < 0:
        return ERR_NEGATIVE, 0
    _relabel(k, c, w, new)
    k.cstat[c, C_DELETES] += 1
    _note(k, c, chain)
    return w, chain


# ----------------------------------------------------------------------
# pending lists


@njit(cache=True, _nrt=False, error_model="numpy")
def _pend_add(k, c, u, v):
    # audit: both endpoints must sit at the copy's load limit
    if k.lab[c, u] < k.rho2[c] or k.lab[c, v] < k.rho2[c]:
        k.S[S_PEND_VIOL] += 1
    k.pend[c, u, v] += 1
    k.pend[c, v, u] += 1
    k.pendsz[c] += 1


@njit(cache=True, _nrt=False, error_model="numpy")
def _pend_discard(k, c, u, v):
    if k.pend[c, u, v] > 0:
        k.pend[c, u, v] -= 1
        k.pend[c, v, u] -= 1
        k.pendsz[c] -= 1
        return True
    return False


@njit(cache=True, _nrt=False, error_model="numpy")
def _pend_pop_incident(k, c, w):
    if k.pendsz[c] == 0:
        return -1
    for x in range(k.P[P_N]):
        if k.pend[c, w, x] > 0:
            _pend_discard(k, c, w, x)
            return x
    return -1


# ----------------------------------------------------------------------
# controller


@njit(cache=True, _nrt=False, error_model="numpy")
def _fail(k, c, code):
    k.S[S_ERR_COPY] = c
    return code


@njit(cache=True, _nrt=False, error_model="numpy")
def _ins(k, c, u, v):
    f = ti_insert(k, c, u, v)
    if f >= 0:
        k.cstat[c, C_CTRL_FLIPS] += f
    return f


@njit(cache=True, _nrt=False, error_model="numpy")
def _end_round(k, flips):
    if flips > k.S[S_MAX_ROUND]:
        k.S[S_MAX_ROUND] = flips
    if flips > k.P[P_K] * (2 * k.P[P_ALPHA] + 2):
        k.S[S_ROUND_VIOL] += 1


@njit(cache=True, _nrt=False, error_model="numpy")
def _init_copy(k, c, level):
    scale = k.P[P_SCALE]
    # level >= 2 here, so both estimates are integral multiples of alpha
    e = np.int64(1) << (level - 1)
    if e < k.P[P_ETA_FLOOR]:
        e = k.P[P_ETA_FLOOR]
    k.eta[c] = e * scale
    k.half[c] = e * scale // 2
    r = (np.int64(1) << (level - 2)) * k.P[P_ALPHA] * scale
    k.rho[c] = r
    k.rho2[c] = 2 * r


@njit(cache=True, _nrt=False, error_model="numpy")
def _grow(k, u, v, rounds):
    c = k.P[P_K]
    if c >= k.eta.shape[0]:
        return ERR_NO_ROOM
    level = k.P[P_LEVEL_HI] + 1
    _init_copy(k, c, level)
    n = k.P[P_N]
    alpha = k.P[P_ALPHA]
    for a in range(n):
        for b in range(a + 1, n):
            for _ in range(k.live[a, b] * alpha):
                if ti_insert(k, c, a, b) < 0:
                    return _fail(k, c, ERR_CHAIN)
    for _ in range(rounds):
        if ti_insert(k, c, u, v) < 0:
            return _fail(k, c, ERR_CHAIN)
    k.P[P_LEVEL_HI] = level
    k.P[P_K] = c + 1
    k.S[S_GROWTHS] += 1
    return 0


@njit(cache=True, _nrt=False, error_model="numpy")
def _finish(k, start, total):
    k.S[S_FLIPS_LAST] = total
    k.S[S_FLIPS_TOTAL] += total
    step = k.P[P_ACTIVE] - start
    if step < 0:
        step = -step
    if step > k.S[S_MAX_STEP]:
        k.S[S_MAX_STEP] = step


@njit(cache=True, _nrt=False, error_model="numpy", nogil=True)
def insert_op(k, u, v):
    start = k.P[P_ACTIVE]
    total = 0
    for rnd in range(1, k.P[P_ALPHA] + 1):
        flips = 0
        for pos in range(k.P[P_K], k.P[P_ACTIVE], -1):
            f = _ins(k, pos - 1, u, v)
            if f < 0:
                return _fail(k, pos - 1, f)
            flips += f
        a = k.P[P_ACTIVE]
        if a == k.P[P_K] and k.maxlab[a - 1] >= k.rho2[a - 1]:
            g = _grow(k, u, v, rnd)
            if g < 0:
                return g
        thr = k.rho2[a - 1] if a >= 1 else k.P[P_RHO2_ZERO]
        if a < k.P[P_K] and k.maxlab[a] >= thr:
            k.P[P_ACTIVE] = a + 1
        elif a >= 1:
            f = _ins(k, a - 1, u, v)
            if f < 0:
                return _fail(k, a - 1, f)
            flips += f
        for pos in range(k.P[P_ACTIVE] - 1, 0, -1):
            c = pos - 1
            lim = k.rho2[c]
            if k.lab[c, u] >= lim and k.lab[c, v] >= lim:
                _pend_add(k, c, u, v)
            else:
                f = _ins(k, c, u, v)
                if f < 0:
                    return _fail(k, c, f)
                flips += f
        _end_round(k, flips)
        total += flips
    if u < v:
        k.live[u, v] += 1
    else:
        k.live[v, u] += 1
    _finish(k, start, total)
    return 0


@njit(cache=True, _nrt=False, error_model="numpy")
def _del(k, c, u, v):
    w, f = ti_delete(k, c, u, v)
    if w >= 0:
        k.cstat[c, C_CTRL_FLIPS] += f
    return w, f


@njit(cache=True, _nrt=False, error_model="numpy")
def _flush(k, c):
    n = k.P[P_N]
    flips = 0
    for a in range(n):
        for b in range(a + 1, n):
            while k.pend[c, a, b] > 0:
                _pend_discard(k, c, a, b)
                f = _ins(k, c, a, b)
                if f < 0:
                    return _fail(k, c, f)
                flips += f
                k.S[S_FORCED] += 1
    return flips


@njit(cache=True, _nrt=False, error_model="numpy", nogil=True)
def delete_op(k, u, v):
    start = k.P[P_ACTIVE]
    total = 0
    for _ in range(k.P[P_ALPHA]):
        flips = 0
        for pos in range(k.P[P_K], k.P[P_ACTIVE], -1):
            w, f = _del(k, pos - 1, u, v)
            if w < 0:
                return _fail(k, pos - 1, w)
            flips += f
        a = k.P[P_ACTIVE]
        if a >= 1:
            w, f = _del(k, a - 1, u, v)
            if w < 0:
                return _fail(k, a - 1, w)
            flips += f
            if k.maxlab[a - 1] < k.rho[a - 1]:
                k.P[P_ACTIVE] = a - 1
        for pos in range(a - 1, 0, -1):
            c = pos - 1
            if _pend_discard(k, c, u, v):
                continue
            w, f = _del(k, c, u, v)
            if w < 0:
                return _fail(k, c, w)
            flips += f
            x = _pend_pop_incident(k, c, w)
            if x >= 0:
                f = _ins(k, c, min(w, x), max(w, x))
                if f < 0:
                    return _fail(k, c, f)
                flips += f
        b = k.P[P_ACTIVE]
        if b >= 1 and k.pendsz[b - 1] > 0:
            f = _flush(k, b - 1)
            if f < 0:
                return f
            flips += f
        _end_round(k, flips)
        total += flips
    if u < v:
        k.live[u, v] -= 1
    else:
        k.live[v, u] -= 1
    _finish(k, start, total)
    return 0


# ----------------------------------------------------------------------
# full-scan checks


@njit(cache=True, _nrt=False, error_model="numpy")
def check_copy(k, c):
    n = k.P[P_N]
    m = 0
    for v in range(n):
        # ring: a single cycle over exactly the distinct in-neighbours
        size = k.ringsz[c, v]
        distinct = 0
        deg = 0
        for x in range(n):
            if k.cnt[c, x, v] > 0:
                distinct += 1
                deg += k.cnt[c, x, v]
                if k.nxt[c, v, x] < 0:
                    return BAD_MIRROR
            elif k.nxt[c, v, x] >= 0 or k.prv[c, v, x] >= 0:
                return BAD_MIRROR
        if size != distinct:
            return BAD_RING
        if size == 0:
            if k.icur[c, v] != -1 or k.scur[c, v] != -1:
                return BAD_RING
        else:
            x = k.icur[c, v]
            seen_scan = False
            for _ in range(size):
                if k.cnt[c, x, v] == 0 or k.prv[c, v, k.nxt[c, v, x]] != x:
                    return BAD_RING
                if x == k.scur[c, v]:
                    seen_scan = True
                x = k.nxt[c, v, x]
            if x != k.icur[c, v] or not seen_scan:
                return BAD_RING
        if deg != k.indeg[c, v]:
            return BAD_INDEG
        if k.lab[c, v] != deg * k.unit[v]:
            return BAD_LABEL
        if k.lab[c, v] > m:
            m = k.lab[c, v]
    if m != k.maxlab[c]:
        return BAD_MAXLAB
    for u in range(n):
        for v in range(n):
            if k.cnt[c, u, v] > 0 and k.lab[c, v] > k.lab[c, u] + k.eta[c]:
                return BAD_GAP
    pos = c + 1
    if pos >= k.P[P_ACTIVE] and k.pendsz[c] > 0:
        return BAD_PENDING_ABOVE
    total = 0
    for a in range(n):
        for b in range(a + 1, n):
            held = k.cnt[c, a, b] + k.cnt[c, b, a] + k.pend[c, a, b]
            if held != k.live[a, b] * k.P[P_ALPHA]:
                return BAD_CONSERVATION
            total += k.pend[c, a, b]
    if total != k.pendsz[c]:
        return BAD_CONSERVATION
    return OK


@njit(cache=True, _nrt=False, error_model="numpy", nogil=True)
def check_all(k):
    if k.S[S_PEND_VIOL] > 0:
        k.S[S_ERR_COPY] = 0
        return BAD_PENDING_LIMIT
    for c in range(k.P[P_K]):
        code = check_copy(k, c)
        if code != OK:
            k.S[S_ERR_COPY] = c
            return code
    return OK
