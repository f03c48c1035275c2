"""Brute-force reference implementations used only by the tests.

Everything here is written the slow, obvious way (nested loops, Python
sets, normal equations) and shares no code with the package.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict

import numpy as np

EARTH_R = 3958.8


def tuple_set(df) -> set[tuple]:
    return set(df.select("place", "user", "date").iter_rows())


def days_oracle(tuples) -> dict[tuple[str, str], int]:
    dates = defaultdict(set)
    for place, user, date in tuples:
        dates[(place, user)].add(date)
    return {k: len(v) for k, v in dates.items()}


def users_oracle(tuples) -> dict[str, int]:
    members = defaultdict(set)
    for place, user, _ in tuples:
        members[place].add(user)
    return {p: len(u) for p, u in members.items()}


def shared_oracle(tuples) -> dict[tuple[str, str], int]:
    """All-pairs set intersection, O(P^2 * U)."""
    members = defaultdict(set)
    for place, user, _ in tuples:
        members[place].add(user)
    places = sorted(members)
    out = {}
    for a in range(len(places)):
        for b in range(a + 1, len(places)):
            n = 0
            for u in members[places[a]]:
                if u in members[places[b]]:
                    n += 1
            if n:
                out[(places[a], places[b])] = n
    return out


def movements_oracle(tuples) -> dict[tuple[str, str], int]:
    visited = defaultdict(set)
    for place, user, date in tuples:
        visited[(user, date)].add(place)
    out = defaultdict(int)
    for places in visited.values():
        for a, b in itertools.combinations(sorted(places), 2):
            out[(a, b)] += 1
    return dict(out)


def pci_oracle(tuples) -> dict[tuple[str, str], tuple]:
    """(users_i, users_j, shared, pci, i->j, j->i) per pair."""
    users = users_oracle(tuples)
    out = {}
    for (a, b), s in shared_oracle(tuples).items():
        ui, uj = users[a], users[b]
        out[(a, b)] = (ui, uj, s, s / math.sqrt(ui * uj), s / uj, s / ui)
    return out


def haversine_oracle(lat1, lon1, lat2, lon2) -> float:
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_R * math.asin(min(1.0, math.sqrt(h)))


def upgma_oracle(D: np.ndarray, rel_tie: float = 1e-12) -> list[tuple[int, int, float, int]]:
    """Naive UPGMA: recompute every cluster-pair mean from leaf distances each step.

    Pairs whose mean is within ``rel_tie`` of the minimum count as tied and
    the smallest (id_a, id_b) wins. Returns (id_a, id_b, height, size).
    """
    n = D.shape[0]
    clusters = {i: [i] for i in range(n)}
    merges = []
    for step in range(n - 1):
        ids = sorted(clusters)
        cands = []
        for x in range(len(ids)):
            for y in range(x + 1, len(ids)):
                a, b = ids[x], ids[y]
                total = 0.0
                for i in clusters[a]:
                    for j in clusters[b]:
                        total += D[i, j]
                cands.append((total / (len(clusters[a]) * len(clusters[b])), a, b))
        best = min(c[0] for c in cands)
        tied = [c for c in cands if c[0] <= best * (1 + rel_tie) + 1e-300]
        h, a, b = min(tied, key=lambda c: (c[1], c[2]))
        members = clusters.pop(a) + clusters.pop(b)
        clusters[n + step] = members
        merges.append((a, b, h, len(members)))
    return merges


def normal_equations(y: np.ndarray, X: np.ndarray):
    """Coefficients and classical SEs via (X'X)^-1 X'y; X includes the intercept column."""
    XtX = X.T @ X
    beta = np.linalg.solve(XtX, X.T @ y)
    resid = y - X @ beta
    n, k = X.shape
    s2 = resid @ resid / (n - k)
    se = np.sqrt(np.diag(s2 * np.linalg.inv(XtX)))
    tss = ((y - y.mean()) ** 2).sum()
    r2 = 1 - (resid @ resid) / tss
    return beta, se, r2


def pearson_textbook(x, y) -> float:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def adjusted_rand(a, b) -> float:
    """ARI from the contingency table (Hubert and Arabie)."""
    a = list(a)
    b = list(b)
    n = len(a)
    pairs = defaultdict(int)
    ca = defaultdict(int)
    cb = defaultdict(int)
    for x, y in zip(a, b):
        pairs[(x, y)] += 1
        ca[x] += 1
        cb[y] += 1
    c2 = lambda m: m * (m - 1) / 2  # noqa: E731
    index = sum(c2(v) for v in pairs.values())
    sa = sum(c2(v) for v in ca.values())
    sb = sum(c2(v) for v in cb.values())
    expected = sa * sb / c2(n)
    top = (sa + sb) / 2
    if top == expected:
        return 1.0
    return (index - expected) / (top - expected)
