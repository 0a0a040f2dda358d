"""Hand-built 5-image evaluation fixture with exactly computable metrics.

Designed so every interpolated precision is dyadic (1, 3/4) and every AP
is an exact small rational over 101, making bit-exact equality between
the library, the naive oracle, and frozen literals meaningful.

Contents (image size 100 x 100, one class):

* 000: one turbine, one perfect detection (conf 0.90)
* 001: one turbine, detection with IoU exactly 0.6 and perfect keypoints
       (conf 0.95)
* 002: two turbines; one detection (conf 0.85) matching the first with
       cyclically relabeled tips (exercises the permutation step); the
       second turbine goes undetected
* 003: one turbine; detection (conf 0.80) with box exact and all seven
       keypoints shifted by DX pixels giving OKS ~ 0.58, plus a far
       false positive at conf 0.70
* 004: one turbine, no detections

Six ground truths, five detections.
"""

import numpy as np

from turbinekit.dataset import AnnotationRecord
from turbinekit.metrics import Detection, GroundTruth

IMAGE_SIZE = (100, 100)

# all-keypoint shift giving OKS = exp(-DX^2 / 32) ~ 0.580 on a 40x40 box
DX = 4.175


def _kps(points):
    return np.asarray(points, dtype=float)


def _gt(image_id, box, points):
    return GroundTruth(
        image_id=image_id,
        bbox=box,
        keypoints=_kps(points),
        visibility=np.full(7, 2),
    )


def _det(image_id, box, points, conf):
    return Detection(image_id=image_id, bbox=box, keypoints=_kps(points), confidence=conf)


GT_POINTS = {
    "000": [(15, 15), (20, 15), (25, 15), (30, 30), (35, 30), (30, 20), (30, 48)],
    "001": [(11, 11), (14, 11), (17, 11), (12, 15), (15, 15), (12, 18), (18, 18)],
    "002a": [(25, 25), (30, 40), (45, 30), (50, 50), (52, 50), (50, 30), (50, 58)],
    "002b": [(75, 75), (80, 75), (85, 75), (88, 88), (90, 88), (88, 80), (88, 93)],
    "003": [(45, 45), (50, 45), (55, 45), (60, 60), (62, 60), (60, 50), (60, 78)],
    "004": [(35, 35), (40, 35), (45, 35), (50, 50), (52, 50), (50, 40), (50, 68)],
}

GT_BOXES = {
    "000": (10.0, 10.0, 50.0, 50.0),
    "001": (10.0, 10.0, 20.0, 20.0),
    "002a": (20.0, 20.0, 60.0, 60.0),
    "002b": (70.0, 70.0, 95.0, 95.0),
    "003": (40.0, 40.0, 80.0, 80.0),
    "004": (30.0, 30.0, 70.0, 70.0),
}


def ground_truths():
    return {
        "000": [_gt("000", GT_BOXES["000"], GT_POINTS["000"])],
        "001": [_gt("001", GT_BOXES["001"], GT_POINTS["001"])],
        "002": [
            _gt("002", GT_BOXES["002a"], GT_POINTS["002a"]),
            _gt("002", GT_BOXES["002b"], GT_POINTS["002b"]),
        ],
        "003": [_gt("003", GT_BOXES["003"], GT_POINTS["003"])],
        "004": [_gt("004", GT_BOXES["004"], GT_POINTS["004"])],
    }


def detections():
    pts_002 = GT_POINTS["002a"]
    cycled = [pts_002[1], pts_002[2], pts_002[0]] + pts_002[3:]
    shifted_003 = [(x + DX, y) for x, y in GT_POINTS["003"]]
    far_points = [(10, 10), (11, 10), (12, 10), (10, 12), (11, 12), (10, 14), (12, 14)]
    return {
        "000": [_det("000", GT_BOXES["000"], GT_POINTS["000"], 0.90)],
        "001": [_det("001", (12.5, 10.0, 22.5, 20.0), GT_POINTS["001"], 0.95)],
        "002": [_det("002", GT_BOXES["002a"], cycled, 0.85)],
        "003": [
            _det("003", GT_BOXES["003"], shifted_003, 0.80),
            _det("003", (5.0, 5.0, 15.0, 15.0), far_points, 0.70),
        ],
        "004": [],
    }


def gt_label_records():
    """The same ground truths as normalized AnnotationRecords per image."""
    w, h = IMAGE_SIZE
    out = {}
    for image_id, gts in ground_truths().items():
        records = []
        for gt in gts:
            x1, y1, x2, y2 = gt.bbox
            kps = np.zeros((7, 3))
            kps[:, 0] = gt.keypoints[:, 0] / w
            kps[:, 1] = gt.keypoints[:, 1] / h
            kps[:, 2] = 2
            records.append(
                AnnotationRecord(
                    class_id=0,
                    bbox=((x1 + x2) / 2 / w, (y1 + y2) / 2 / h, (x2 - x1) / w, (y2 - y1) / h),
                    keypoints=kps,
                )
            )
        out[image_id] = records
    return out
