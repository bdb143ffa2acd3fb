"""Independent reference computations used to derive and check expected values.

Deliberately plain Python: no numpy linear algebra, no shared code with the package.
"""
import itertools
import math


def quantile_linear(values, p):
    s = sorted(values)
    pos = p * (len(s) - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (pos - lo) * (s[hi] - s[lo])


def brute_force_kmeans(points, k):
    """Minimum inertia over every labeling of points into k (non-empty) groups."""
    best = math.inf
    n = len(points)
    for labels in itertools.product(range(k), repeat=n):
        if len(set(labels)) != k:
            continue
        total = 0.0
        for c in range(k):
            members = [points[i] for i in range(n) if labels[i] == c]
            dim = len(members[0])
            mean = [sum(p[j] for p in members) / len(members) for j in range(dim)]
            total += sum(sum((p[j] - mean[j]) ** 2 for j in range(dim)) for p in members)
        best = min(best, total)
    return best


def gauss_solve(a, b):
    """Solve a x = b (b a list of right-hand-side columns) by Gauss-Jordan elimination."""
    n = len(a)
    m = [list(map(float, a[i])) + list(map(float, b[i])) for i in range(n)]
    width = len(m[0])
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(m[r][col]))
        m[col], m[pivot] = m[pivot], m[col]
        p = m[col][col]
        m[col] = [v / p for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0.0:
                f = m[r][col]
                m[r] = [m[r][c] - f * m[col][c] for c in range(width)]
    return [row[n:] for row in m]


def ridge_oracle(phi, t, lam):
    """(phi^T phi + lam I)^-1 phi^T t, every product written out by hand."""
    n, j = len(phi), len(phi[0])
    l = len(t[0])
    gram = [[sum(phi[r][a] * phi[r][b] for r in range(n)) + (lam if a == b else 0.0) for b in range(j)]
            for a in range(j)]
    rhs = [[sum(phi[r][a] * t[r][c] for r in range(n)) for c in range(l)] for a in range(j)]
    return gauss_solve(gram, rhs)


def central_difference(f, params, h=1e-6):
    """Gradient of scalar f w.r.t. each entry of a list of flat parameter lists."""
    grads = []
    for block in range(len(params)):
        g = []
        for i in range(len(params[block])):
            plus = [list(p) for p in params]
            minus = [list(p) for p in params]
            plus[block][i] += h
            minus[block][i] -= h
            g.append((f(plus) - f(minus)) / (2 * h))
        grads.append(g)
    return grads
