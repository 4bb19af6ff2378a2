"""Pure numpy implementations of the hot kernels.

Semantics must match ``_kernels.pyx`` exactly, including tie-breaking in
:func:`best_split`; ``tests/test_kernels.py`` runs both side by side.
"""

import numpy as np

# (dy, dx) of the eight neighbours, top-left first, clockwise; weight 2**(7-k)
LBP_NEIGHBOURS = ((-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1))


def glcm_counts(codes, offsets, levels):
    """Symmetric co-occurrence counts.

    ``codes`` is an int image with -1 outside the ROI; ``offsets`` rows are
    (dx, dy). Each in-ROI pair is counted once as (a, b) and once as (b, a).
    """
    codes = np.asarray(codes, dtype=np.int32)
    h, w = codes.shape
    out = np.zeros((levels, levels), dtype=np.int64)
    for dx, dy in np.asarray(offsets, dtype=np.int64).reshape(-1, 2):
        y0, y1 = max(0, -dy), min(h, h - dy)
        x0, x1 = max(0, -dx), min(w, w - dx)
        if y0 >= y1 or x0 >= x1:
            continue
        a = codes[y0:y1, x0:x1]
        b = codes[y0 + dy : y1 + dy, x0 + dx : x1 + dx]
        ok = (a >= 0) & (b >= 0)
        np.add.at(out, (a[ok], b[ok]), 1)
        np.add.at(out, (b[ok], a[ok]), 1)
    return out


def lbp_codes(image, mask):
    """8-bit LBP code for every mask pixel whose 8-neighbourhood lies in the image."""
    image = np.asarray(image, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    h, w = image.shape
    if h < 3 or w < 3:
        return np.zeros(0, dtype=np.int64)
    inner = mask[1:-1, 1:-1]
    centre = image[1:-1, 1:-1][inner]
    code = np.zeros(centre.shape, dtype=np.int64)
    for k, (dy, dx) in enumerate(LBP_NEIGHBOURS):
        nb = image[1 + dy : h - 1 + dy, 1 + dx : w - 1 + dx][inner]
        code |= (nb >= centre).astype(np.int64) << (7 - k)
    return code


def best_split(X, y, rows, features, n_classes, min_features):
    """Best Gini split of ``rows`` over ``features`` (evaluated in order).

    Maximises sum(c_left**2)/n_left + sum(c_right**2)/n_right, which is
    equivalent to minimising the weighted Gini impurity. Evaluation stops
    once ``min_features`` features have been tried and a valid split exists.
    Returns (feature, threshold, score); feature is -1 when no split exists.
    """
    rows = np.asarray(rows, dtype=np.intp)
    m = rows.size
    best_f, best_t, best_s = -1, 0.0, -np.inf
    if m < 2:
        return best_f, best_t, best_s
    yr = y[rows]
    onehot = np.zeros((m, n_classes), dtype=np.int64)
    nl = np.arange(1, m, dtype=np.int64)
    nr = m - nl
    for tried, f in enumerate(features, 1):
        v = X[rows, f]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        valid = vs[:-1] < vs[1:]
        if valid.any():
            onehot[:] = 0
            onehot[np.arange(m), yr[order]] = 1
            left = np.cumsum(onehot, axis=0)[:-1]
            right = left[-1] + onehot[-1] - left
            a = (left * left).sum(axis=1)
            b = (right * right).sum(axis=1)
            score = a.astype(np.float64) / nl.astype(np.float64) + b.astype(np.float64) / nr.astype(np.float64)
            score[~valid] = -np.inf
            k = int(np.argmax(score))
            if score[k] > best_s:
                best_s = float(score[k])
                best_f = int(f)
                lo, hi = vs[k], vs[k + 1]
                t = lo + (hi - lo) / 2.0
                best_t = float(lo if t >= hi else t)
        if tried >= min_features and best_f >= 0:
            break
    return best_f, best_t, best_s
