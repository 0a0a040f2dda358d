"""turbinekit: deterministic synthetic wind-turbine keypoint datasets and
permutation-invariant pose evaluation.

The library is organized around small, pure modules:

* ``scene``     turbine geometry, world keypoints, tip labeling
* ``sampling``  seeded per-image scene sampling
* ``camera``    pinhole projection, visibility, boxes
* ``render``    silhouette rasterization and compositing
* ``augment``   HSV / JPEG / noise augmentations
* ``dataset``   label files, split, manifest, dataset writer
* ``metrics``   permutation-invariant OKS, IoU, mAP reports
* ``cli``       the ``turbinekit`` command-line entry point
"""

__version__ = "0.1.0"
