import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

sys.path.insert(0, str(Path(__file__).parent))  # for the naive oracle module

from turbinekit.config import GeneratorConfig

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def default_config():
    return GeneratorConfig()


@pytest.fixture(scope="session")
def background_library_dir(tmp_path_factory):
    """Three small deterministic images standing in for a photo library."""
    root = tmp_path_factory.mktemp("backgrounds")
    h, w = 240, 400
    yy, xx = np.mgrid[0:h, 0:w]
    skies = [
        np.stack([40 + xx * 0.3, 80 + yy * 0.5, 120 + (xx + yy) * 0.2], axis=-1),
        np.stack([90 + yy * 0.4, 120 + xx * 0.1, 60 + xx * 0.25], axis=-1),
        np.stack([30 + (xx * yy) % 97, 140 + xx * 0.2, 90 + yy * 0.3], axis=-1),
    ]
    for i, arr in enumerate(skies):
        img = np.clip(arr, 0, 255).astype(np.uint8)
        Image.fromarray(img, "RGB").save(root / f"bg_{i}.png")
    return root
