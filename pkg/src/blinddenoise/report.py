"""Run report carried alongside every denoised image."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field


@dataclass
class DenoiseReport:
    """Per-run metrics: cost/PSNR trajectories, iteration count, timing,
    and a full echo of the configuration that produced them."""

    method: str
    noise: dict
    psnr_noisy: float | None
    psnr_denoised: float | None
    cost_trajectory: list[float]
    iterations_run: int
    wall_time: float
    config_echo: dict
    psnr_trajectory: list[float] | None = field(default=None)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())
            fh.write("\n")


def _jsonable(obj):
    # Strict JSON has no Infinity/NaN literals; encode them as strings.
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
        return obj
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj
