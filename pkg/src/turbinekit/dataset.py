"""Annotation records, label files, dataset layout and the manifest.

Label format (one line per turbine, 6-decimal fixed point, space
separated)::

    class cx cy w h x1 y1 v1 ... x7 y7 v7

Box center/size and keypoint coordinates are normalized to [0, 1] by the
image dimensions. Visibility flags v are integers (0 = not labeled,
2 = labeled and visible); keypoints with v = 0 carry x = y = 0. A
prediction file uses the same line with one extra trailing confidence
column. Datasets are laid out as ``images/{train,val}`` plus
``labels/{train,val}`` with a ``manifest.json`` at the root.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .camera import PixelPoint, keypoint_visibility
from .config import GeneratorConfig
from .scene import KEYPOINT_NAMES

LABEL_COLUMNS = 5 + 3 * len(KEYPOINT_NAMES)


@dataclass
class AnnotationRecord:
    """One turbine's normalized box and keypoints."""

    class_id: int
    bbox: Tuple[float, float, float, float]  # (cx, cy, w, h), normalized
    keypoints: np.ndarray  # (7, 3): x, y normalized; v flag

    def __post_init__(self):
        self.keypoints = np.asarray(self.keypoints, dtype=float)
        if self.keypoints.shape != (7, 3):
            raise ValueError("keypoints must be a (7, 3) array")
        cx, cy, w, h = self.bbox
        if not (0 < w <= 1 and 0 < h <= 1):
            raise ValueError(f"degenerate normalized box size ({w}, {h})")
        # slack covers the 6-decimal quantization of values read back from disk
        eps = 2e-6
        if not (-eps <= cx - w / 2 and cx + w / 2 <= 1 + eps and -eps <= cy - h / 2 and cy + h / 2 <= 1 + eps):
            raise ValueError("box extends outside the unit square")

    def bbox_corners_px(self, image_size) -> Tuple[float, float, float, float]:
        w, h = image_size
        cx, cy, bw, bh = self.bbox
        return ((cx - bw / 2) * w, (cy - bh / 2) * h, (cx + bw / 2) * w, (cy + bh / 2) * h)

    def keypoints_px(self, image_size) -> np.ndarray:
        w, h = image_size
        return self.keypoints[:, :2] * (w, h)

    @property
    def visibility(self) -> np.ndarray:
        return self.keypoints[:, 2].astype(int)


def record_from_projection(
    bbox_px: Tuple[float, float, float, float],
    pixels: Sequence[Optional[PixelPoint]],
    image_size: Tuple[int, int],
    class_id: int = 0,
) -> AnnotationRecord:
    """Build a normalized record from a pixel box and projected keypoints."""
    w, h = image_size
    x1, y1, x2, y2 = bbox_px
    bbox = ((x1 + x2) / 2 / w, (y1 + y2) / 2 / h, (x2 - x1) / w, (y2 - y1) / h)
    kps = np.zeros((len(KEYPOINT_NAMES), 3))
    for i, px in enumerate(pixels):
        flag = keypoint_visibility(px, image_size)
        if flag == 2:
            kps[i] = (px.u / w, px.v / h, 2)
    return AnnotationRecord(class_id=class_id, bbox=bbox, keypoints=kps)


def format_label_line(record: AnnotationRecord) -> str:
    parts = [str(int(record.class_id))] + [f"{v:.6f}" for v in record.bbox]
    for x, y, v in record.keypoints:
        parts.append(f"{x:.6f}")
        parts.append(f"{y:.6f}")
        parts.append(str(int(v)))
    return " ".join(parts)


def parse_label_line(line: str, with_confidence: bool = False) -> Tuple[AnnotationRecord, Optional[float]]:
    tokens = line.split()
    expected = LABEL_COLUMNS + (1 if with_confidence else 0)
    if len(tokens) != expected:
        raise ValueError(f"expected {expected} columns, got {len(tokens)}")
    class_id = int(tokens[0])
    bbox = tuple(float(t) for t in tokens[1:5])
    kps = np.array([float(t) for t in tokens[5 : 5 + 21]]).reshape(7, 3)
    conf = float(tokens[-1]) if with_confidence else None
    return AnnotationRecord(class_id=class_id, bbox=bbox, keypoints=kps), conf


def write_label_file(path, records: Sequence[AnnotationRecord]) -> None:
    """Write one label file; empty (0-byte) when no turbine is visible."""
    try:
        with open(path, "w") as fh:
            for rec in records:
                fh.write(format_label_line(rec) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing label file {path}: {exc}") from exc


def read_label_file(path, with_confidence: bool = False):
    """Parse a label (or prediction) file; raises with file/line context."""
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append(parse_label_line(line, with_confidence))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return out


def split_indices(count: int, train_fraction: float, master_seed: int) -> Tuple[List[int], List[int]]:
    """Deterministic pseudo-random split with exact counts.

    Indices are ranked by a per-index hash and the first
    round(count * train_fraction) go to train, so the same inputs always
    produce the same partition and split sizes are exact, not binomial.
    """
    from .sampling import STAGE_SPLIT  # local import to avoid a cycle

    train_count = int(round(count * train_fraction))
    keys = [
        np.random.SeedSequence((int(master_seed), i, STAGE_SPLIT)).generate_state(1)[0]
        for i in range(count)
    ]
    order = sorted(range(count), key=lambda i: (keys[i], i))
    train = sorted(order[:train_count])
    val = sorted(order[train_count:])
    return train, val


def _generate_and_write(args):
    # module-level so ProcessPoolExecutor can pickle it
    master_seed, index, config, library_path, out_dir, split_name = args
    from .pipeline import generate_image, open_library

    library = open_library(library_path)
    result = generate_image(master_seed, index, config, library)
    stem = f"{index:06d}"
    out = Path(out_dir)
    image_rel = f"images/{split_name}/{stem}.{result.encoding}"
    result.save_image(out / image_rel)
    write_label_file(out / "labels" / split_name / f"{stem}.txt", result.records)
    return index, split_name, stem, image_rel, result.pixel_sha256(), len(result.records)


def write_dataset(
    config: GeneratorConfig,
    out_dir,
    master_seed: Optional[int] = None,
    count: Optional[int] = None,
    workers: int = 1,
    progress=None,
) -> dict:
    """Generate a full dataset tree and its manifest; returns the manifest.

    Regeneration with the same seed overwrites files in place, so an
    interrupted run can simply be rerun. Worker count never changes the
    output bytes.
    """
    seed = config.master_seed if master_seed is None else int(master_seed)
    n = config.image_count if count is None else int(count)

    out = Path(out_dir)
    for sub in ("images/train", "images/val", "labels/train", "labels/val"):
        (out / sub).mkdir(parents=True, exist_ok=True)

    train, val = split_indices(n, config.train_fraction, seed)
    split_of = {i: "train" for i in train}
    split_of.update({i: "val" for i in val})

    tasks = [
        (seed, i, config, config.background_library, str(out), split_of[i]) for i in range(n)
    ]
    images = {}
    done = 0
    if workers > 1 and n > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            for index, split_name, stem, rel, sha, nrec in pool.map(
                _generate_and_write, tasks, chunksize=4
            ):
                images[f"{split_name}/{stem}"] = {
                    "file": rel,
                    "pixel_sha256": sha,
                    "turbines": nrec,
                }
                done += 1
                if progress:
                    progress(done, n)
    else:
        for task in tasks:
            index, split_name, stem, rel, sha, nrec = _generate_and_write(task)
            images[f"{split_name}/{stem}"] = {
                "file": rel,
                "pixel_sha256": sha,
                "turbines": nrec,
            }
            done += 1
            if progress:
                progress(done, n)

    manifest = {
        "generator": "turbinekit",
        "version": __version__,
        "master_seed": seed,
        "image_count": n,
        "image_size": list(config.image_size),
        "train_fraction": config.train_fraction,
        "counts": {"train": len(train), "val": len(val)},
        "keypoint_names": list(KEYPOINT_NAMES),
        "visibility_flags": {"0": "not labeled", "2": "labeled and visible"},
        "conventions": {
            "yaw_zero": "rotor axis along world +y; positive yaw is counterclockwise from above",
            "blade_angle": "0 is straight up, increasing clockwise viewed from upwind",
            "tip_segments_deg": [[0, 120], [120, 240], [240, 360]],
            "camera": "on the world -y axis; pitch aims the configured point at the center row",
            "label_format": "class cx cy w h x1 y1 v1 ... x7 y7 v7 (normalized)",
        },
        "config": config.to_dict(),
        "images": {k: images[k] for k in sorted(images)},
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def pixel_hash(buffer: np.ndarray) -> str:
    arr = np.ascontiguousarray(buffer)
    digest = hashlib.sha256()
    digest.update(str(arr.shape).encode())
    digest.update(arr.tobytes())
    return digest.hexdigest()
