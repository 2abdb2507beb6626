import numpy as np

from artifact.frame_io import LumaFrame


def frame_of(samples, index: int = 0) -> LumaFrame:
    """Wrap a 2-D array (any integer dtype) as a luma frame."""
    arr = np.asarray(samples, dtype=np.uint8)
    return LumaFrame(width=arr.shape[1], height=arr.shape[0], samples=arr, frame_index=index)


def random_frame(rng, height: int, width: int, index: int = 0) -> LumaFrame:
    return frame_of(rng.integers(0, 256, size=(height, width)), index)
