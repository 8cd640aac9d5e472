"""symmpix: reflection-symmetry aware superpixel segmentation.

Detects mirror-symmetric pixel pairs from edge-curve normals, groups them
by symmetry axis, partitions the image into superpixels that preserve the
detected symmetry, and derives symmetry axes and unsupervised symmetric
object masks, with the standard superpixel quality metrics.
"""

from symmpix.config import PipelineConfig
from symmpix.geometry import ReflectionTransform, reflection_from_pair
from symmpix.image import RasterImage, load_image, rgb_to_lab
from symmpix.pairs import detect_pairs, detection_probability
from symmpix.slic import run_symmetric_slic

__version__ = "0.1.0"

__all__ = [
    "PipelineConfig",
    "RasterImage",
    "ReflectionTransform",
    "detect_pairs",
    "detection_probability",
    "load_image",
    "reflection_from_pair",
    "rgb_to_lab",
    "run_symmetric_slic",
    "__version__",
]
