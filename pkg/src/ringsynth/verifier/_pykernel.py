"""Pure-Python exploration kernel.

Reference implementation of the compiled ``_ckernel`` module; both expose
the same two functions with the same results.  States are integers in base
``m`` with process 0 in the least significant digit.
"""

from __future__ import annotations

from collections import deque

HOLDS, DEADLOCK, LIVELOCK = 0, 1, 2


def _digits(s, m, n):
    out = [0] * n
    for i in range(n):
        s, out[i] = divmod(s, m)
    return out


def _successors(s, m, n, delta, powers):
    x = _digits(s, m, n)
    out = []
    for i in range(n):
        c = delta[x[i - 1] * m + x[i]]
        if c >= 0:
            out.append(s + (c - x[i]) * powers[i])
    return out


def _predecessors(s, m, n, delta, powers):
    x = _digits(s, m, n)
    out = []
    for i in range(n):
        a, c = x[i - 1], x[i]
        for b in range(m):
            if b != c and delta[a * m + b] == c:
                out.append(s + (b - c) * powers[i])
    return out


def _satisfies(s, m, n, tab):
    x = _digits(s, m, n)
    for i in range(n):
        if not tab[x[i - 1] * m + x[i]]:
            return False
    return True


def explore(m, n, delta, qtab, init):
    """Decide ``R ~> Q`` from the sorted state codes *init*.

    Returns ``(kind, stem, loop, explored)``.  For a deadlock, ``stem`` runs
    from an initial state to the deadlocked state.  For a livelock, ``stem``
    ends at the first state of ``loop`` and ``loop`` returns to it.
    """
    powers = [m ** i for i in range(n)]
    parent: dict[int, int] = {}
    in_q: dict[int, bool] = {}
    order: list[int] = []
    queue = deque()
    for s in init:
        if s not in parent:
            parent[s] = -1
            queue.append(s)

    def path_to(s):
        path = [s]
        while parent[path[-1]] != -1:
            path.append(parent[path[-1]])
        path.reverse()
        return path

    while queue:
        s = queue.popleft()
        if _satisfies(s, m, n, qtab):
            in_q[s] = True
            continue
        in_q[s] = False
        order.append(s)
        succ = _successors(s, m, n, delta, powers)
        if not succ:
            return DEADLOCK, path_to(s), [], len(parent)
        for t in succ:
            if t not in parent:
                parent[t] = s
                queue.append(t)

    region = set(order)
    outdeg = {s: 0 for s in order}
    for s in order:
        outdeg[s] = sum(1 for t in _successors(s, m, n, delta, powers) if t in region)
    sinks = [s for s in order if outdeg[s] == 0]
    removed = set()
    while sinks:
        t = sinks.pop()
        removed.add(t)
        for u in _predecessors(t, m, n, delta, powers):
            if u in region and u not in removed:
                outdeg[u] -= 1
                if outdeg[u] == 0:
                    sinks.append(u)
    live = [s for s in order if s not in removed]
    if not live:
        return HOLDS, [], [], len(parent)

    start = live[0]
    alive = region - removed
    walk = [start]
    seen = {start: 0}
    while True:
        nxt = next(t for t in _successors(walk[-1], m, n, delta, powers) if t in alive)
        if nxt in seen:
            entry = seen[nxt]
            stem = path_to(start) + walk[1:entry + 1]
            loop = walk[entry:] + [nxt]
            return LIVELOCK, stem, loop, len(parent)
        seen[nxt] = len(walk)
        walk.append(nxt)


def first_exit(m, n, delta, tab, states):
    """First transition ``(s, t)`` leaving the set defined by *tab*, or None."""
    powers = [m ** i for i in range(n)]
    for s in states:
        for t in _successors(s, m, n, delta, powers):
            if not _satisfies(t, m, n, tab):
                return s, t
    return None
