"""Independent brute-force references used by the tests."""

from fractions import Fraction
from itertools import combinations, permutations


def leibniz_det(m):
    n = len(m)
    total = 0
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        prod = 1
        for i in range(n):
            prod *= m[i][perm[i]]
            if prod == 0:
                break
        total += -prod if inversions % 2 else prod
    return total


def minor_rank(m):
    """Largest k with a nonvanishing k x k minor."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    for k in range(min(rows, cols), 0, -1):
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                if leibniz_det([[m[r][c] for c in cs] for r in rs]) != 0:
                    return k
    return 0


def example4_z_limits(y1, y2, total=1.0):
    """Balance y1*z1 = y2*z2 with z1 + z2 = total."""
    z1 = Fraction(y2) / (Fraction(y1) + Fraction(y2)) * Fraction(total)
    return z1, Fraction(total) - z1
