# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled exploration kernel; mirrors ``_pykernel`` result for result."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    MAXN = 64

HOLDS, DEADLOCK, LIVELOCK = 0, 1, 2


cdef inline void _digits(long long s, int m, int n, int* x) noexcept nogil:
    cdef int i
    for i in range(n):
        x[i] = <int>(s % m)
        s = s // m


cdef inline bint _satisfies(long long s, int m, int n, const unsigned char[:] tab) noexcept nogil:
    cdef int x[MAXN]
    cdef int i
    _digits(s, m, n, x)
    for i in range(n):
        if not tab[x[(i + n - 1) % n] * m + x[i]]:
            return False
    return True


cdef inline int _successors(long long s, int m, int n, const int[:] delta,
                            const long long* powers, long long* out) noexcept nogil:
    cdef int x[MAXN]
    cdef int i, c, k = 0
    _digits(s, m, n, x)
    for i in range(n):
        c = delta[x[(i + n - 1) % n] * m + x[i]]
        if c >= 0:
            out[k] = s + (c - x[i]) * powers[i]
            k += 1
    return k


cdef inline int _predecessors(long long s, int m, int n, const int[:] delta,
                              const long long* powers, long long* out) noexcept nogil:
    cdef int x[MAXN]
    cdef int i, a, b, c, k = 0
    _digits(s, m, n, x)
    for i in range(n):
        a = x[(i + n - 1) % n]
        c = x[i]
        for b in range(m):
            if b != c and delta[a * m + b] == c:
                out[k] = s + (b - c) * powers[i]
                k += 1
    return k


def _path_to(long long s, cnp.int64_t[:] parent):
    path = [s]
    while parent[s] != -1:
        s = parent[s]
        path.append(s)
    path.reverse()
    return path


def explore(int m, int n, delta_in, qtab_in, init):
    if n > MAXN:
        raise ValueError("ring too large for the compiled kernel")
    cdef long long total = 1
    cdef long long powers[MAXN]
    cdef int i
    for i in range(n):
        powers[i] = total
        total *= m
    cdef const int[:] delta = np.asarray(delta_in, dtype=np.intc)
    cdef const unsigned char[:] qtab = np.asarray(qtab_in, dtype=np.uint8)

    # status: 0 unseen, 1 seen outside Q, 2 seen inside Q, 3 peeled
    status_arr = np.zeros(total, dtype=np.uint8)
    parent_arr = np.full(total, -2, dtype=np.int64)
    queue_arr = np.empty(total, dtype=np.int64)
    cdef unsigned char[:] status = status_arr
    cdef cnp.int64_t[:] parent = parent_arr
    cdef cnp.int64_t[:] queue = queue_arr
    cdef long long head = 0, tail = 0, s, t
    buf_arr = np.empty(n * m + 1, dtype=np.int64)
    cdef long long* buf = <long long*> cnp.PyArray_DATA(buf_arr)
    cdef int k, j
    cdef long long deadlocked = -1

    for s in init:
        if parent[s] == -2:
            parent[s] = -1
            queue[tail] = s
            tail += 1

    with nogil:
        while head < tail:
            s = queue[head]
            head += 1
            if _satisfies(s, m, n, qtab):
                status[s] = 2
                continue
            status[s] = 1
            k = _successors(s, m, n, delta, powers, buf)
            if k == 0:
                deadlocked = s
                break
            for j in range(k):
                t = buf[j]
                if parent[t] == -2:
                    parent[t] = s
                    queue[tail] = t
                    tail += 1

    if deadlocked >= 0:
        return DEADLOCK, _path_to(deadlocked, parent), [], int(tail)

    outdeg_arr = np.zeros(total, dtype=np.uint8)
    stack_arr = np.empty(tail if tail > 0 else 1, dtype=np.int64)
    cdef unsigned char[:] outdeg = outdeg_arr
    cdef cnp.int64_t[:] stack = stack_arr
    cdef long long top = 0, idx, cnt
    cdef long long start = -1

    with nogil:
        for idx in range(tail):
            s = queue[idx]
            if status[s] != 1:
                continue
            k = _successors(s, m, n, delta, powers, buf)
            cnt = 0
            for j in range(k):
                if status[buf[j]] == 1:
                    cnt += 1
            outdeg[s] = <unsigned char>cnt
            if cnt == 0:
                stack[top] = s
                top += 1
        while top > 0:
            top -= 1
            t = stack[top]
            status[t] = 3
            k = _predecessors(t, m, n, delta, powers, buf)
            for j in range(k):
                s = buf[j]
                if status[s] == 1:
                    outdeg[s] -= 1
                    if outdeg[s] == 0:
                        stack[top] = s
                        top += 1
        for idx in range(tail):
            if status[queue[idx]] == 1:
                start = queue[idx]
                break

    if start < 0:
        return HOLDS, [], [], int(tail)

    walk = [start]
    seen = {start: 0}
    cdef long long cur = start, nxt
    while True:
        k = _successors(cur, m, n, delta, powers, buf)
        nxt = -1
        for j in range(k):
            if status[buf[j]] == 1:
                nxt = buf[j]
                break
        if nxt in seen:
            entry = seen[nxt]
            stem = _path_to(start, parent) + walk[1:entry + 1]
            loop = walk[entry:] + [nxt]
            return LIVELOCK, stem, loop, int(tail)
        seen[nxt] = len(walk)
        walk.append(nxt)
        cur = nxt


def first_exit(int m, int n, delta_in, tab_in, states):
    if n > MAXN:
        raise ValueError("ring too large for the compiled kernel")
    cdef long long powers[MAXN]
    cdef long long total = 1
    cdef int i, k, j
    for i in range(n):
        powers[i] = total
        total *= m
    cdef const int[:] delta = np.asarray(delta_in, dtype=np.intc)
    cdef const unsigned char[:] tab = np.asarray(tab_in, dtype=np.uint8)
    cdef long long buf[MAXN]
    cdef long long s
    for s in states:
        k = _successors(s, m, n, delta, powers, buf)
        for j in range(k):
            if not _satisfies(buf[j], m, n, tab):
                return s, buf[j]
    return None
