"""Domain types for detection streams plus validation and JSON (de)serialization.

The detection-exchange JSON contract used by the CLI and the external
detector protocol is::

    {"frame_id": <int>,
     "detections": [{"bbox": [x1, y1, x2, y2],
                     "confidence": <float>,
                     "class_id": <int>}, ...]}

A sequence file is a JSON array of such frame objects ordered by frame_id.
Coordinates are corner-format reals with the origin at the top-left of the
image. All types are immutable after construction and safe to share across
workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigError, MalformedInputError


@dataclass(frozen=True)
class BBox:
    """Axis-aligned rectangle in pixel coordinates (x1,y1 top-left corner).

    Boxes that survive :func:`validate_frame` always satisfy x1 < x2 and
    y1 < y2; degenerate boxes can exist transiently before validation.
    """

    x1: float
    y1: float
    x2: float
    y2: float

    def area(self) -> float:
        return max(0.0, self.x2 - self.x1) * max(0.0, self.y2 - self.y1)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.as_tuple())


@dataclass(frozen=True)
class Detection:
    """One detector output element: box, confidence score and class label."""

    bbox: BBox
    confidence: float
    class_id: int


@dataclass(frozen=True)
class FrameDetections:
    """Ordered detections for one timestamped frame."""

    frame_id: int
    detections: tuple[Detection, ...] = ()

    def __post_init__(self):
        if not isinstance(self.detections, tuple):
            object.__setattr__(self, "detections", tuple(self.detections))

    def __len__(self) -> int:
        return len(self.detections)


@dataclass(frozen=True)
class MetricConfig:
    """Hyperparameters of the weighted-AP frame distance.

    min_overlap gates the IoU-and-class matching rule; `a` shapes the area
    weighting F(x) = x / (x + a); gamma_cs scales all confidence terms;
    the alphas weight the TP/FP/FN components of the final distance.
    """

    min_overlap: float = 0.5
    a: float = 0.5
    gamma_cs: float = 0.1
    alpha_tp: float = 1.0
    alpha_fp: float = 1.0
    alpha_fn: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.min_overlap < 1.0):
            raise ConfigError(f"min_overlap must be in (0,1), got {self.min_overlap}")
        if not self.a > 0.0:
            raise ConfigError(f"weight function parameter a must be positive, got {self.a}")
        if self.gamma_cs < 0.0:
            raise ConfigError(f"gamma_cs must be non-negative, got {self.gamma_cs}")
        for name in ("alpha_tp", "alpha_fp", "alpha_fn"):
            if getattr(self, name) < 0.0:
                raise ConfigError(f"{name} must be non-negative")
        if self.alpha_tp + self.alpha_fp + self.alpha_fn <= 0.0:
            raise ConfigError("alpha_tp + alpha_fp + alpha_fn must be positive")


@dataclass
class ValidationCounters:
    """Tallies of silently repaired inputs, for run-end warnings."""

    boxes_clamped: int = 0
    boxes_dropped: int = 0
    confidences_clamped: int = 0

    def merge(self, other: "ValidationCounters") -> None:
        self.boxes_clamped += other.boxes_clamped
        self.boxes_dropped += other.boxes_dropped
        self.confidences_clamped += other.confidences_clamped

    def any(self) -> bool:
        return bool(self.boxes_clamped or self.boxes_dropped or self.confidences_clamped)


def validate_frame(
    frame: FrameDetections,
    image_w: int,
    image_h: int,
    counters: ValidationCounters | None = None,
) -> FrameDetections:
    """Clamp boxes to the image, drop degenerate ones, clamp confidences.

    Detections whose clamped area is zero are dropped instead of rejected
    so that noisy external detectors do not abort a run. Non-finite
    coordinates or confidences raise :class:`MalformedInputError`.
    Idempotent: validating a validated frame is a no-op.
    """
    kept = []
    for det in frame.detections:
        box = det.bbox
        if not box.is_finite():
            raise MalformedInputError(
                f"frame {frame.frame_id}: non-finite bbox {box.as_tuple()}"
            )
        if not math.isfinite(det.confidence):
            raise MalformedInputError(
                f"frame {frame.frame_id}: non-finite confidence {det.confidence}"
            )
        x1 = min(max(box.x1, 0.0), float(image_w))
        y1 = min(max(box.y1, 0.0), float(image_h))
        x2 = min(max(box.x2, 0.0), float(image_w))
        y2 = min(max(box.y2, 0.0), float(image_h))
        if counters is not None and (x1, y1, x2, y2) != box.as_tuple():
            counters.boxes_clamped += 1
        if x2 - x1 <= 0.0 or y2 - y1 <= 0.0:
            if counters is not None:
                counters.boxes_dropped += 1
            continue
        conf = min(max(det.confidence, 0.0), 1.0)
        if counters is not None and conf != det.confidence:
            counters.confidences_clamped += 1
        kept.append(Detection(BBox(x1, y1, x2, y2), conf, det.class_id))
    return FrameDetections(frame.frame_id, tuple(kept))


# ---------------------------------------------------------------------------
# detection-exchange JSON


def frame_to_dict(frame: FrameDetections) -> dict:
    return {
        "frame_id": frame.frame_id,
        "detections": [
            {
                "bbox": [d.bbox.x1, d.bbox.y1, d.bbox.x2, d.bbox.y2],
                "confidence": d.confidence,
                "class_id": d.class_id,
            }
            for d in frame.detections
        ],
    }


def frame_from_dict(obj: dict) -> FrameDetections:
    if not isinstance(obj, dict):
        raise MalformedInputError(f"frame object must be a JSON object, got {type(obj).__name__}")
    try:
        frame_id = obj["frame_id"]
        raw_dets = obj["detections"]
    except KeyError as exc:
        raise MalformedInputError(f"frame object missing key {exc}") from exc
    if not isinstance(frame_id, int) or isinstance(frame_id, bool) or frame_id < 0:
        raise MalformedInputError(f"frame_id must be a non-negative integer, got {frame_id!r}")
    if not isinstance(raw_dets, list):
        raise MalformedInputError("detections must be a JSON array")
    dets = []
    for k, raw in enumerate(raw_dets):
        try:
            bbox = raw["bbox"]
            conf = raw["confidence"]
            class_id = raw["class_id"]
        except (KeyError, TypeError) as exc:
            raise MalformedInputError(f"frame {frame_id}: bad detection #{k}: {exc}") from exc
        if not isinstance(bbox, list) or len(bbox) != 4:
            raise MalformedInputError(f"frame {frame_id}: bbox must be [x1,y1,x2,y2]")
        try:
            coords = [float(v) for v in bbox]
            conf = float(conf)
        except (TypeError, ValueError) as exc:
            raise MalformedInputError(f"frame {frame_id}: non-numeric field: {exc}") from exc
        if not all(math.isfinite(v) for v in coords):
            raise MalformedInputError(f"frame {frame_id}: non-finite bbox {coords}")
        if not math.isfinite(conf):
            raise MalformedInputError(f"frame {frame_id}: non-finite confidence")
        if not isinstance(class_id, int) or isinstance(class_id, bool) or class_id < 0:
            raise MalformedInputError(
                f"frame {frame_id}: class_id must be a non-negative integer, got {class_id!r}"
            )
        dets.append(Detection(BBox(*coords), conf, class_id))
    return FrameDetections(frame_id, tuple(dets))


def serialize_frame(frame: FrameDetections) -> str:
    return json.dumps(frame_to_dict(frame), indent=2) + "\n"


def parse_frame(text: str) -> FrameDetections:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"invalid JSON: {exc}") from exc
    return frame_from_dict(obj)


def serialize_sequence(frames: Sequence[FrameDetections]) -> str:
    ordered = sorted(frames, key=lambda f: f.frame_id)
    return json.dumps([frame_to_dict(f) for f in ordered], indent=2) + "\n"


def parse_sequence(text: str) -> list[FrameDetections]:
    try:
        arr = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"invalid JSON: {exc}") from exc
    if isinstance(arr, dict):
        arr = [arr]
    if not isinstance(arr, list):
        raise MalformedInputError("sequence file must be a JSON array of frame objects")
    frames = [frame_from_dict(obj) for obj in arr]
    seen = set()
    for f in frames:
        if f.frame_id in seen:
            raise MalformedInputError(f"duplicate frame_id {f.frame_id} in sequence")
        seen.add(f.frame_id)
    return sorted(frames, key=lambda f: f.frame_id)


def load_sequence(path: str | Path) -> list[FrameDetections]:
    return parse_sequence(Path(path).read_text())


def save_sequence(frames: Iterable[FrameDetections], path: str | Path) -> None:
    Path(path).write_text(serialize_sequence(list(frames)))
