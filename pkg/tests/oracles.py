"""Independent reference implementations used to cross-check the library.

Deliberately naive (explicit sorting, O(n^2) pair counting, dense angle
grids) and kept free of any mcca internals.
"""

import numpy as np


def bf_ranking(scores):
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def bf_recall_at_k(score_rows, relevance, cutoff):
    vals = []
    for scores, rel in zip(score_rows, relevance):
        top = set(bf_ranking(list(scores))[:cutoff])
        vals.append(len(top & set(rel)) / len(rel))
    return 100.0 * sum(vals) / len(vals)


def bf_mrr(score_rows, relevance):
    vals = []
    for scores, rel in zip(score_rows, relevance):
        for rank, idx in enumerate(bf_ranking(list(scores)), start=1):
            if idx in set(rel):
                vals.append(1.0 / rank)
                break
    return sum(vals) / len(vals)


def bf_auc(scores, labels):
    pos = [s for s, l in zip(scores, labels) if l]
    neg = [s for s, l in zip(scores, labels) if not l]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return 100.0 * wins / (len(pos) * len(neg))


def bf_top_canonical_correlation(cxx, cxy, cyy, grid=10_000):
    """Exhaustive first-view direction search for 2x2 covariances, k=1.

    For a fixed direction a the best partner direction is closed form:
    rho(a)^2 = (a' Cxy Cyy^-1 Cyx a) / (a' Cxx a), so the 2-D search
    collapses to one angle grid.
    """
    angles = np.linspace(0.0, np.pi, grid, endpoint=False)
    dirs = np.stack([np.cos(angles), np.sin(angles)])
    middle = cxy @ np.linalg.inv(cyy) @ cxy.T
    num = np.einsum("ij,ik,kj->j", dirs, middle, dirs)
    den = np.einsum("ij,ik,kj->j", dirs, cxx, dirs)
    return float(np.sqrt(np.max(num / den)))


def inv_sqrt_sym(a):
    lam, q = np.linalg.eigh(a)
    return q @ np.diag(1.0 / np.sqrt(lam)) @ q.T


def random_feasible_pair(cxx, cyy, k, rng):
    """(u, v) satisfying the whitening constraints, from random bases."""
    qx, _ = np.linalg.qr(rng.standard_normal((cxx.shape[0], k)))
    qy, _ = np.linalg.qr(rng.standard_normal((cyy.shape[0], k)))
    return inv_sqrt_sym(cxx) @ qx, inv_sqrt_sym(cyy) @ qy
