"""Overlay rendering for visual audits: boxes, keypoints, tip numerals."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from PIL import Image, ImageDraw

from .dataset import AnnotationRecord

BOX_COLOR = (255, 64, 64)
KP_COLOR = (64, 255, 64)
TIP_COLOR = (255, 224, 32)


def draw_annotations(image: Image.Image, records: Sequence[AnnotationRecord]) -> Image.Image:
    """Draw each record's box, its 7 keypoints, and numbered tips."""
    out = image.convert("RGB")
    draw = ImageDraw.Draw(out)
    w, h = out.size
    for rec in records:
        x1, y1, x2, y2 = rec.bbox_corners_px((w, h))
        draw.rectangle([x1, y1, x2, y2], outline=BOX_COLOR, width=2)
        draw.text((x1 + 3, max(0, y1 - 12)), "wind_turbine", fill=BOX_COLOR)
        pixels = rec.keypoints_px((w, h))
        for i, ((u, v), flag) in enumerate(zip(pixels, rec.visibility)):
            if flag == 0:
                continue
            color = TIP_COLOR if i < 3 else KP_COLOR
            draw.ellipse([u - 3, v - 3, u + 3, v + 3], outline=color, width=2)
            if i < 3:
                draw.text((u + 4, v - 4), str(i + 1), fill=TIP_COLOR)
    return out


def watermark_missing(image: Image.Image) -> Image.Image:
    out = image.convert("RGB")
    draw = ImageDraw.Draw(out)
    draw.text((10, 10), "no annotations", fill=(255, 48, 48))
    return out


def preview_dataset(dataset_dir, n: int, out_dir) -> int:
    """Write up to n overlay images; returns how many were produced."""
    from .dataset import read_label_file

    dataset = Path(dataset_dir)
    out = Path(out_dir)
    images = sorted((dataset / "images").rglob("*.*")) if (dataset / "images").is_dir() else []
    if not images:
        images = sorted(p for p in dataset.rglob("*.png")) + sorted(dataset.rglob("*.jpg"))
    produced = 0
    out.mkdir(parents=True, exist_ok=True)
    for img_path in images:
        if produced >= n:
            break
        label_path = Path(
            str(img_path.parent).replace("images", "labels", 1)
        ) / (img_path.stem + ".txt")
        with Image.open(img_path) as im:
            if label_path.is_file():
                records = [rec for rec, _ in read_label_file(label_path)]
                overlay = draw_annotations(im, records)
            else:
                overlay = watermark_missing(im)
        overlay.save(out / f"{img_path.stem}_overlay.png")
        produced += 1
    return produced
