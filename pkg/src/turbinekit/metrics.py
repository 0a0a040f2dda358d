"""Detection evaluation: permutation-invariant OKS, IoU, matching and mAP.

Blade tips have no natural identity, so before scoring a prediction
against a ground-truth turbine the three predicted tips are re-ordered by
the permutation (out of the 6 possible) that minimizes the sum of squared
distances to the ground-truth tips. Keypoint similarity is then the mean
Gaussian kernel over visible keypoints (OKS), with the object scale taken
as the ground-truth box area. Boxes are scored with plain IoU.

Matching follows the usual COCO-style protocol: detections in descending
confidence order greedily claim the best unmatched ground truth above the
threshold; AP is 101-point interpolated; mAP50-95 averages thresholds
0.50 to 0.95 in 0.05 steps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .dataset import AnnotationRecord, read_label_file

# The six orderings of three tips, in fixed tie-break order (identity
# first, then the three swaps, then the two cycles). Entry k holds the
# source index for each output slot: permuted[i] = tips[PERM[k][i]].
TIP_PERMUTATIONS: Tuple[Tuple[int, int, int], ...] = (
    (0, 1, 2),
    (1, 0, 2),
    (2, 1, 0),
    (0, 2, 1),
    (1, 2, 0),
    (2, 0, 1),
)

IOU_THRESHOLDS = tuple(round(0.50 + 0.05 * i, 2) for i in range(10))
RECALL_GRID = np.linspace(0.0, 1.0, 101)

DEFAULT_OKS_SIGMA = 0.1


def permutation_matrix(index: int) -> np.ndarray:
    """0/1 matrix P of the permutation such that P @ tips reorders rows."""
    perm = TIP_PERMUTATIONS[index]
    mat = np.zeros((3, 3))
    for row, src in enumerate(perm):
        mat[row, src] = 1.0
    return mat


@dataclass
class Detection:
    image_id: str
    bbox: Tuple[float, float, float, float]  # (x1, y1, x2, y2) pixels
    keypoints: np.ndarray  # (7, 2) pixels
    confidence: float
    class_id: int = 0

    def __post_init__(self):
        self.keypoints = np.asarray(self.keypoints, dtype=float)
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        x1, y1, x2, y2 = self.bbox
        if x2 <= x1 or y2 <= y1:
            raise ValueError(f"bbox not well-ordered: {self.bbox}")


@dataclass
class GroundTruth:
    image_id: str
    bbox: Tuple[float, float, float, float]  # (x1, y1, x2, y2) pixels
    keypoints: np.ndarray  # (7, 2) pixels
    visibility: np.ndarray  # (7,) flags

    @property
    def area(self) -> float:
        x1, y1, x2, y2 = self.bbox
        return (x2 - x1) * (y2 - y1)

    @property
    def num_visible(self) -> int:
        return int(np.count_nonzero(self.visibility > 0))


def tip_distances(pred_tips: np.ndarray, gt_tips: np.ndarray) -> np.ndarray:
    """Euclidean distance between corresponding tips, index by index."""
    p = np.asarray(pred_tips, dtype=float)
    g = np.asarray(gt_tips, dtype=float)
    if p.shape != (3, 2) or g.shape != (3, 2):
        raise ValueError("expected (3, 2) tip arrays")
    if not (np.isfinite(p).all() and np.isfinite(g).all()):
        raise ValueError("tip coordinates must be finite")
    return np.linalg.norm(p - g, axis=1)


def optimal_tip_permutation(
    pred_tips: np.ndarray,
    gt_tips: np.ndarray,
    gt_visible: Optional[np.ndarray] = None,
) -> Tuple[int, np.ndarray]:
    """Best of the six tip orderings by summed squared distance.

    Returns (permutation index, permuted predicted tips). Ties go to the
    lowest index, so the identity wins when nothing beats it. When a
    visibility mask is given, only visible ground-truth tips contribute
    to the cost.
    """
    p = np.asarray(pred_tips, dtype=float)
    g = np.asarray(gt_tips, dtype=float)
    if p.shape != (3, 2) or g.shape != (3, 2):
        raise ValueError("expected (3, 2) tip arrays")
    mask = np.ones(3, dtype=bool) if gt_visible is None else np.asarray(gt_visible) > 0

    best_index = 0
    best_cost = None
    for k, perm in enumerate(TIP_PERMUTATIONS):
        diff = p[list(perm)] - g
        cost = float(np.sum(diff[mask] ** 2))
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_index = k
    return best_index, p[list(TIP_PERMUTATIONS[best_index])]


def oks(
    pred_keypoints: np.ndarray,
    gt_keypoints: np.ndarray,
    gt_visibility: np.ndarray,
    scale_sq: float,
    sigmas=DEFAULT_OKS_SIGMA,
) -> Optional[float]:
    """Object keypoint similarity over the visible ground-truth keypoints.

    ``scale_sq`` is the squared object scale (ground-truth box area).
    Returns None when no keypoint is visible; callers treat that pair as
    unmatchable rather than propagating a NaN.
    """
    vis = np.asarray(gt_visibility) > 0
    if not vis.any():
        return None
    p = np.asarray(pred_keypoints, dtype=float)
    g = np.asarray(gt_keypoints, dtype=float)
    k = np.broadcast_to(np.asarray(sigmas, dtype=float), (p.shape[0],))
    d_sq = np.sum((p[vis] - g[vis]) ** 2, axis=1)
    denom = 2.0 * max(scale_sq, np.finfo(float).tiny) * k[vis] ** 2
    return float(np.mean(np.exp(-d_sq / denom)))


def iou(box_a, box_b) -> float:
    """Intersection over union of two (x1, y1, x2, y2) boxes."""
    ax1, ay1, ax2, ay2 = box_a
    bx1, by1, bx2, by2 = box_b
    if ax2 <= ax1 or ay2 <= ay1 or bx2 <= bx1 or by2 <= by1:
        raise ValueError("boxes must be well-ordered with positive area")
    iw = min(ax2, bx2) - max(ax1, bx1)
    ih = min(ay2, by2) - max(ay1, by1)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = (ax2 - ax1) * (ay2 - ay1) + (bx2 - bx1) * (by2 - by1) - inter
    return inter / union


def box_similarity(det: Detection, gt: GroundTruth) -> Optional[float]:
    return iou(det.bbox, gt.bbox)


def make_pose_similarity(sigmas=DEFAULT_OKS_SIGMA) -> Callable[[Detection, GroundTruth], Optional[float]]:
    def pose_similarity(det: Detection, gt: GroundTruth) -> Optional[float]:
        _, permuted_tips = optimal_tip_permutation(
            det.keypoints[:3], gt.keypoints[:3], gt.visibility[:3]
        )
        pred = np.vstack([permuted_tips, det.keypoints[3:]])
        return oks(pred, gt.keypoints, gt.visibility, gt.area, sigmas)

    return pose_similarity


def match_detections(
    detections: Sequence[Detection],
    ground_truths: Sequence[GroundTruth],
    threshold: float,
    similarity: Callable[[Detection, GroundTruth], Optional[float]],
) -> List[bool]:
    """Greedy single-image matching; returns a TP flag per detection.

    Detections are visited in descending confidence (input order breaks
    ties); each claims the unmatched ground truth with the highest
    similarity at or above the threshold. A ground truth is never matched
    twice.
    """
    order = sorted(range(len(detections)), key=lambda i: (-detections[i].confidence, i))
    taken = [False] * len(ground_truths)
    flags = [False] * len(detections)
    for i in order:
        best_j = -1
        best_sim = -np.inf
        for j, gt in enumerate(ground_truths):
            if taken[j]:
                continue
            sim = similarity(detections[i], gt)
            if sim is None or sim < threshold:
                continue
            if sim > best_sim:  # strict: ties keep the first ground truth
                best_sim = sim
                best_j = j
        if best_j >= 0:
            taken[best_j] = True
            flags[i] = True
    return flags


def average_precision(tp_flags: Sequence[bool], num_gts: int) -> float:
    """101-point interpolated AP for a confidence-sorted TP/FP sequence."""
    if num_gts == 0:
        return float("nan")
    if len(tp_flags) == 0:
        return 0.0
    tp = np.cumsum(np.asarray(tp_flags, dtype=float))
    fp = np.cumsum(~np.asarray(tp_flags, dtype=bool))
    recall = tp / num_gts
    precision = tp / (tp + fp)
    interpolated = np.zeros_like(RECALL_GRID)
    for idx, r in enumerate(RECALL_GRID):
        at_least = precision[recall >= r]
        if at_least.size:
            interpolated[idx] = at_least.max()
    return float(interpolated.mean())


@dataclass
class MetricReport:
    map50_box: float
    map50_95_box: float
    map50_pose: float
    map50_95_pose: float
    per_threshold: Dict[str, Dict[str, float]] = field(default_factory=dict)
    counts: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "map50_box": self.map50_box,
            "map50_95_box": self.map50_95_box,
            "map50_pose": self.map50_pose,
            "map50_95_pose": self.map50_95_pose,
            "per_threshold": self.per_threshold,
            "counts": self.counts,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _task_ap(
    dets_by_image: Dict[str, List[Detection]],
    gts_by_image: Dict[str, List[GroundTruth]],
    threshold: float,
    similarity,
    countable: Callable[[GroundTruth], bool],
) -> float:
    num_gts = sum(1 for gts in gts_by_image.values() for gt in gts if countable(gt))
    scored: List[Tuple[float, str, int, bool]] = []
    for image_id in sorted(set(dets_by_image) | set(gts_by_image)):
        dets = dets_by_image.get(image_id, [])
        gts = [gt for gt in gts_by_image.get(image_id, []) if countable(gt)]
        flags = match_detections(dets, gts, threshold, similarity)
        for idx, det in enumerate(dets):
            scored.append((det.confidence, image_id, idx, flags[idx]))
    # deterministic pooling: confidence desc, then image id / index
    scored.sort(key=lambda t: (-t[0], t[1], t[2]))
    return average_precision([s[3] for s in scored], num_gts)


def map_report(
    dets_by_image: Dict[str, List[Detection]],
    gts_by_image: Dict[str, List[GroundTruth]],
    oks_sigmas=DEFAULT_OKS_SIGMA,
) -> MetricReport:
    """Box and pose mAP50 / mAP50-95 over a prediction set.

    Images present in the ground truth but absent from the predictions
    count as images with zero detections. Ground truths with no visible
    keypoint are excluded from the pose task (they cannot be matched).
    """
    pose_sim = make_pose_similarity(oks_sigmas)
    box_aps = {}
    pose_aps = {}
    for tau in IOU_THRESHOLDS:
        box_aps[f"{tau:.2f}"] = _task_ap(
            dets_by_image, gts_by_image, tau, box_similarity, lambda gt: True
        )
        pose_aps[f"{tau:.2f}"] = _task_ap(
            dets_by_image, gts_by_image, tau, pose_sim, lambda gt: gt.num_visible > 0
        )

    def agg(values):
        vals = [v for v in values if not np.isnan(v)]
        return float(np.mean(vals)) if vals else 0.0

    num_gts = sum(len(v) for v in gts_by_image.values())
    num_dets = sum(len(v) for v in dets_by_image.values())
    return MetricReport(
        map50_box=agg([box_aps["0.50"]]),
        map50_95_box=agg(box_aps.values()),
        map50_pose=agg([pose_aps["0.50"]]),
        map50_95_pose=agg(pose_aps.values()),
        per_threshold={"box": box_aps, "pose": pose_aps},
        counts={
            "images": len(set(dets_by_image) | set(gts_by_image)),
            "ground_truths": num_gts,
            "detections": num_dets,
        },
    )


def ground_truths_from_records(
    image_id: str, records: Sequence[AnnotationRecord], image_size
) -> List[GroundTruth]:
    out = []
    for rec in records:
        out.append(
            GroundTruth(
                image_id=image_id,
                bbox=rec.bbox_corners_px(image_size),
                keypoints=rec.keypoints_px(image_size),
                visibility=rec.visibility,
            )
        )
    return out


def detections_from_records(
    image_id: str,
    records: Sequence[Tuple[AnnotationRecord, Optional[float]]],
    image_size,
) -> List[Detection]:
    out = []
    for rec, conf in records:
        out.append(
            Detection(
                image_id=image_id,
                bbox=rec.bbox_corners_px(image_size),
                keypoints=rec.keypoints_px(image_size),
                confidence=1.0 if conf is None else conf,
            )
        )
    return out


def load_ground_truth_dir(path, image_size) -> Dict[str, List[GroundTruth]]:
    """Read every label file in a directory, keyed by file stem."""
    out = {}
    for file in sorted(Path(path).glob("*.txt")):
        records = [rec for rec, _ in read_label_file(file)]
        out[file.stem] = ground_truths_from_records(file.stem, records, image_size)
    return out


def load_prediction_dir(path, image_size) -> Dict[str, List[Detection]]:
    """Read prediction files (label format + trailing confidence column)."""
    out = {}
    for file in sorted(Path(path).glob("*.txt")):
        out[file.stem] = detections_from_records(
            file.stem, read_label_file(file, with_confidence=True), image_size
        )
    return out
