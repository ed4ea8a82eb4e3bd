#!/usr/bin/env python3
"""Export a small sample of natural photographs as binary PPM files.

Usage: make_photos.py OUTPUT_DIR

The calibration acceptance check needs real photographs. scikit-image ships
a few; when it is not installed this script exits quietly and the check
falls back to reporting the sample as missing.
"""
import sys
from pathlib import Path


def main() -> int:
    if len(sys.argv) != 2:
        print("usage: make_photos.py OUTPUT_DIR", file=sys.stderr)
        return 2
    out_dir = Path(sys.argv[1])

    try:
        import numpy as np
        from skimage import data
    except ImportError:
        return 0  # optional dependency; the consumer handles absence

    names = [
        "astronaut", "chelsea", "coffee", "rocket", "cat",
        "immunohistochemistry", "hubble_deep_field", "camera", "coins", "moon",
    ]
    out_dir.mkdir(parents=True, exist_ok=True)
    written = 0
    for name in names:
        try:
            img = getattr(data, name)()
        except Exception:
            continue
        arr = np.asarray(img)
        if arr.ndim == 2:  # grayscale -> replicate channels
            arr = np.stack([arr] * 3, axis=-1)
        arr = arr.astype(np.uint8)
        h, w = arr.shape[:2]
        path = out_dir / f"{name}.ppm"
        with open(path, "wb") as f:
            f.write(f"P6\n{w} {h}\n255\n".encode())
            f.write(arr[:, :, :3].tobytes())
        written += 1
    print(f"wrote {written} photographs to {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
