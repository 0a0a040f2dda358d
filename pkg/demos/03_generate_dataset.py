"""
Generating an annotated dataset
===============================

Renders a small dataset end to end: sample scenes, draw turbine
silhouettes, composite over backgrounds, augment, and write images plus
pose labels and a manifest. Then draws annotation overlays for a visual
check. Equivalent CLI:

    turbinekit generate --seed 7 --count 12 --out demo_dataset
    turbinekit preview --dataset demo_dataset --n 4 --out demo_overlays
"""

import json
from pathlib import Path

from turbinekit.config import GeneratorConfig
from turbinekit.dataset import write_dataset
from turbinekit.preview import preview_dataset

out = Path("demo_dataset")

config = GeneratorConfig()
config.image_size = (1280, 720)
# no background library configured -> uniform-noise backgrounds everywhere;
# point this at a directory of landscape photos for natural composites
config.background_library = None

manifest = write_dataset(config, out, master_seed=7, count=12, workers=2)
print(f"wrote {manifest['image_count']} images: {manifest['counts']}")

# every image I has a label file with one line per visible turbine:
#   class cx cy w h x1 y1 v1 ... x7 y7 v7   (all normalized)
sample_label = next((out / "labels" / "train").glob("*.txt"))
print(f"\n{sample_label.name}:")
print(sample_label.read_text() or "  (no turbine in frame: negative example)")

meta = json.loads((out / "manifest.json").read_text())
print("keypoint order:", meta["keypoint_names"])

n = preview_dataset(out, 4, "demo_overlays")
print(f"wrote {n} overlay images to demo_overlays/")
