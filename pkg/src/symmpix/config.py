"""Pipeline configuration.

All tunable defaults live in one place so CLI flags, config files, and the
library agree.  A config file is plain ``key=value`` lines (``#`` comments
allowed); keys match the dataclass field names.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

__all__ = ["PipelineConfig", "load_config_file", "thread_cap"]


@dataclass(frozen=True)
class PipelineConfig:
    # mirror-pair detection
    curve_samples: int = 64          # p: samples per edge curve
    partner_draws: int = 200         # h: random partner draws per edge pixel
    window_side: int = 5             # u: tolerance window for the hit-probability model
    epsilon: float = 0.2             # gradient-consistency threshold
    score_threshold: float = 1.6     # minimum normal-agreement score for a pair
    canny_sigma: float = 1.4
    canny_low: float = 2.0
    canny_high: float = 6.0

    # pair clustering
    tau: float = 0.85                # graph edge threshold (score > 2*tau)
    n_axes: int = 5                  # cliques extracted per image
    min_cluster_size: int = 5        # clusters below this are discarded as noise
    max_graph_vertices: int = 2000   # cap on pairs entering the clique stage

    # superpixel clustering
    k: int = 500                     # requested superpixel count
    compactness: float = 10.0        # lambda, spatial/color weight, sane range [1, 40]
    max_iters: int = 15
    conv_tol: float = 0.25           # mean center displacement (px) to stop
    oob_demote_frac: float = 0.2     # pair demotion threshold on dropped mirror writes

    # axis evaluation
    angle_tol_deg: float = 10.0
    dist_tol_px: float = 20.0

    seed: int = 42

    def validated(self) -> "PipelineConfig":
        if self.curve_samples < 3:
            raise ValueError("curve_samples must be >= 3")
        if self.partner_draws < 1:
            raise ValueError("partner_draws must be >= 1")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must be in (0, 1)")
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must be in (0, 1)")
        if self.k < 4:
            raise ValueError("k must be >= 4")
        if self.compactness <= 0.0:
            raise ValueError("compactness must be positive")
        if not 0.0 <= self.canny_low < self.canny_high:
            raise ValueError("need 0 <= canny_low < canny_high")
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def load_config_file(path: str, base: PipelineConfig | None = None) -> PipelineConfig:
    """Read ``key=value`` lines into a PipelineConfig, starting from *base*."""
    cfg = base or PipelineConfig()
    updates = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _FIELD_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            kind = _FIELD_TYPES[key]
            updates[key] = int(value) if kind == "int" else float(value)
    return replace(cfg, **updates).validated()


def thread_cap() -> int:
    """Parallelism cap from SYMMPIX_THREADS (0 = auto).

    All kernels currently run sequentially, so any cap is honored trivially;
    the value is validated and plumbed through for future parallel stages.
    """
    raw = os.environ.get("SYMMPIX_THREADS", "0").strip()
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"SYMMPIX_THREADS must be an integer, got {raw!r}") from exc
    if cap < 0:
        raise ValueError("SYMMPIX_THREADS must be >= 0")
    return cap
