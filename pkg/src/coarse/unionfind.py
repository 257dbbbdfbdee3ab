import numpy as np


class UnionFind:
    """Disjoint sets over 0..size-1 whose roots are always the smallest member.

    Keeping the minimum as root makes component labels depend only on the
    enumeration order of the points, never on the order unions arrive in.
    """

    def __init__(self, size):
        self.parent = list(range(size))

    def find(self, x):
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb
        return True

    def union_pairs(self, left, right):
        if len(left) == 0:
            return
        # collapse duplicate edges first; windows produce many
        pairs = np.unique(np.stack([np.asarray(left), np.asarray(right)], axis=1), axis=0)
        for a, b in pairs.tolist():
            self.union(a, b)

    def roots(self):
        return np.array([self.find(i) for i in range(len(self.parent))], dtype=np.int64)


def canonical_labels(roots, mask):
    """Relabel masked points 0..k-1 by the smallest point id in each class.

    Points outside ``mask`` get label -1.
    """
    labels = np.full(len(mask), -1, dtype=np.int64)
    idx = np.flatnonzero(mask)
    if len(idx) == 0:
        return labels
    _, first, inverse = np.unique(roots[idx], return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(idx[first], kind="stable")] = np.arange(len(first))
    labels[idx] = rank[inverse]
    return labels
