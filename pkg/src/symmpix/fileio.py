"""File formats and atomic output.

Labels travel as 16-bit grayscale PNG (pixel value = label id) or CSV
(h rows of w comma-separated ids); masks as 1-bit PNG (nonzero =
foreground); structured data as sorted-key JSON.  All writes go through a
temp file + rename so failures leave no partial outputs, and identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np
from PIL import Image

__all__ = [
    "atomic_write_bytes",
    "write_json",
    "read_json",
    "write_label_png",
    "read_label_png",
    "write_label_csv",
    "read_label_csv",
    "read_labels_any",
    "write_mask_png",
    "read_mask_png",
    "render_label_overlay",
    "render_pairs_overlay",
    "render_axes_overlay",
    "save_rgb_png",
]


def atomic_write_bytes(path: str, payload: bytes) -> None:
    tmp = f"{path}.tmp-{os.getpid()}"
    try:
        with open(tmp, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def write_json(path: str, obj) -> None:
    payload = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    atomic_write_bytes(path, payload.encode("utf-8"))


def read_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _png_bytes(img: Image.Image) -> bytes:
    import io

    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def write_label_png(path: str, labels: np.ndarray) -> None:
    if labels.min() < 0:
        raise ValueError("labels must be non-negative for PNG export")
    if labels.max() > 65535:
        raise ValueError("label ids exceed 16-bit range")
    img = Image.fromarray(labels.astype(np.uint16))
    atomic_write_bytes(path, _png_bytes(img))


def read_label_png(path: str) -> np.ndarray:
    with Image.open(path) as img:
        arr = np.asarray(img)
    return arr.astype(np.int32)


def write_label_csv(path: str, labels: np.ndarray) -> None:
    lines = "\n".join(",".join(str(int(v)) for v in row) for row in labels)
    atomic_write_bytes(path, (lines + "\n").encode("ascii"))


def read_label_csv(path: str) -> np.ndarray:
    arr = np.loadtxt(path, delimiter=",", dtype=np.int64, ndmin=2)
    return arr.astype(np.int32)


def read_labels_any(path: str) -> np.ndarray:
    if path.endswith(".csv"):
        return read_label_csv(path)
    return read_label_png(path)


def write_mask_png(path: str, mask: np.ndarray) -> None:
    img = Image.fromarray((mask.astype(np.uint8) * 255)).convert("1")
    atomic_write_bytes(path, _png_bytes(img))


def read_mask_png(path: str) -> np.ndarray:
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"))
    return arr > 0


def save_rgb_png(path: str, rgb: np.ndarray) -> None:
    atomic_write_bytes(path, _png_bytes(Image.fromarray(rgb.astype(np.uint8), "RGB")))


# ---------------------------------------------------------------------------
# Overlays (plain numpy drawing; debug artifacts, not a UI)
# ---------------------------------------------------------------------------

def _pair_hue_color(idx: int) -> np.ndarray:
    import colorsys

    hue = (idx * 0.6180339887498949) % 1.0
    return 255.0 * np.array(colorsys.hsv_to_rgb(hue, 0.75, 1.0))


def render_label_overlay(rgb: np.ndarray, labels: np.ndarray, pairing=None) -> np.ndarray:
    """White superpixel boundaries; active mirror pairs tinted in matched hues."""
    from symmpix.metrics import boundary_mask

    out = rgb.astype(np.float64).copy()
    if pairing is not None:
        for idx, ln in enumerate(pairing.active_links()):
            tint = _pair_hue_color(idx)
            sel = (labels == ln.left) | (labels == ln.right)
            out[sel] = 0.6 * out[sel] + 0.4 * tint
    out[boundary_mask(labels)] = 255.0
    return np.clip(out, 0, 255).astype(np.uint8)


def _draw_disc(out: np.ndarray, x: float, y: float, color, radius: int = 1) -> None:
    h, w, _ = out.shape
    cx, cy = int(round(x)), int(round(y))
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            px, py = cx + dx, cy + dy
            if 0 <= px < w and 0 <= py < h:
                out[py, px] = color


def render_pairs_overlay(rgb: np.ndarray, pairs) -> np.ndarray:
    """Mirror-pair endpoints as dots connected by faint segments."""
    out = rgb.astype(np.float64).copy()
    for pr in pairs:
        _draw_segment(out, pr.xi, pr.xj, np.array([200.0, 200.0, 200.0]), blend=0.35)
    for pr in pairs:
        _draw_disc(out, pr.xi[0], pr.xi[1], np.array([0.0, 255.0, 255.0]))
        _draw_disc(out, pr.xj[0], pr.xj[1], np.array([255.0, 0.0, 255.0]))
    return np.clip(out, 0, 255).astype(np.uint8)


def _draw_segment(out, a, b, color, blend: float = 1.0) -> None:
    h, w, _ = out.shape
    length = math.hypot(b[0] - a[0], b[1] - a[1])
    steps = max(2, int(length * 4))
    for i in range(steps + 1):
        t = i / steps
        x = a[0] + t * (b[0] - a[0])
        y = a[1] + t * (b[1] - a[1])
        px, py = int(round(x)), int(round(y))
        if 0 <= px < w and 0 <= py < h:
            out[py, px] = (1 - blend) * out[py, px] + blend * color


def render_axes_overlay(rgb: np.ndarray, axes) -> np.ndarray:
    """Axes drawn as full-frame yellow lines."""
    out = rgb.astype(np.float64).copy()
    h, w, _ = out.shape
    diag = math.hypot(w, h)
    for ax in axes:
        a = (ax.point[0] - diag * ax.direction[0], ax.point[1] - diag * ax.direction[1])
        b = (ax.point[0] + diag * ax.direction[0], ax.point[1] + diag * ax.direction[1])
        _draw_segment(out, a, b, np.array([255.0, 220.0, 0.0]))
    return np.clip(out, 0, 255).astype(np.uint8)
