"""Independent reference implementations used as test oracles.

Everything here is written from first principles in plain Python (loops,
math module, exhaustive enumeration) so it shares no code path with the
library being checked. Keep it slow and obvious.
"""

import itertools
import math

PERM_TABLE = [
    (0, 1, 2),
    (1, 0, 2),
    (2, 1, 0),
    (0, 2, 1),
    (1, 2, 0),
    (2, 0, 1),
]


def best_tip_assignment(pred, gt, visible=(True, True, True)):
    """Exhaustive search over the six orderings; first strict minimum wins.

    pred/gt are sequences of three (x, y) pairs. Returns (index, cost).
    """
    best_idx = None
    best_cost = None
    for idx, perm in enumerate(PERM_TABLE):
        cost = 0.0
        for slot in range(3):
            if not visible[slot]:
                continue
            px, py = pred[perm[slot]]
            gx, gy = gt[slot]
            cost += (px - gx) ** 2 + (py - gy) ** 2
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_idx = idx
    return best_idx, best_cost


def all_permutations_are_listed():
    """The fixed 6-entry table is exactly the symmetric group S3."""
    return sorted(PERM_TABLE) == sorted(itertools.permutations(range(3)))


def oks_value(pred, gt, visible, area, k=0.1):
    """Mean Gaussian keypoint similarity over visible ground-truth points."""
    terms = []
    for (px, py), (gx, gy), vis in zip(pred, gt, visible):
        if vis:
            d_sq = (px - gx) ** 2 + (py - gy) ** 2
            terms.append(math.exp(-d_sq / (2.0 * area * k * k)))
    if not terms:
        return None
    return sum(terms) / len(terms)


def box_iou(a, b):
    ax1, ay1, ax2, ay2 = a
    bx1, by1, bx2, by2 = b
    iw = min(ax2, bx2) - max(ax1, bx1)
    ih = min(ay2, by2) - max(ay1, by1)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / ((ax2 - ax1) * (ay2 - ay1) + (bx2 - bx1) * (by2 - by1) - inter)


def greedy_match(similarities, confidences, threshold):
    """Reference matcher on a precomputed det x gt similarity table.

    Returns TP flags in the original detection order.
    """
    n_det = len(similarities)
    n_gt = len(similarities[0]) if n_det else 0
    order = sorted(range(n_det), key=lambda i: (-confidences[i], i))
    taken = [False] * n_gt
    flags = [False] * n_det
    for i in order:
        best_j, best_sim = -1, None
        for j in range(n_gt):
            if taken[j] or similarities[i][j] is None:
                continue
            if similarities[i][j] < threshold:
                continue
            if best_sim is None or similarities[i][j] > best_sim:
                best_sim = similarities[i][j]
                best_j = j
        if best_j >= 0:
            taken[best_j] = True
            flags[i] = True
    return flags


def interpolated_ap(tp_flags_sorted, num_gts, grid_points=101):
    """101-point AP from a TP/FP sequence already sorted by confidence."""
    if num_gts == 0:
        return None
    precisions = []
    recalls = []
    tp = fp = 0
    for flag in tp_flags_sorted:
        if flag:
            tp += 1
        else:
            fp += 1
        precisions.append(tp / (tp + fp))
        recalls.append(tp / num_gts)
    values = []
    for i in range(grid_points):
        r = i / (grid_points - 1)
        best = 0.0
        for p, rec in zip(precisions, recalls):
            if rec >= r and p > best:
                best = p
        values.append(best)
    import numpy as np

    # same averaging arithmetic as the library so equality can be exact;
    # the averaged values themselves come from the loops above
    return float(np.mean(np.array(values, dtype=float)))


def rotate_z(point, degrees):
    """Right-handed rotation about +z, for hand-building expected poses."""
    a = math.radians(degrees)
    x, y, z = point
    return (
        x * math.cos(a) - y * math.sin(a),
        x * math.sin(a) + y * math.cos(a),
        z,
    )
