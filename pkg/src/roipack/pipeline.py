"""Frame scheduling: anchors, packed frames, fallbacks and skips.

Every anchor_interval-th frame is an anchor and runs the detector on the
full-size frame. In between, the previous frame's confident detections
become ROIs and are packed into the reduced frame; detections found there
are mapped back to full-frame coordinates before being reported. When
packing fails the frame falls back to full size, and when the previous
frame produced no ROIs the frame is skipped outright (which then cascades
until the next anchor).
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence, Union

from .costmodel import CostParams, CostReport, DecisionKind, aggregate
from .geometry import FrameSpec, Rect, intersection
from .packing import PackPlan, pack

Packer = Callable[[Sequence[Rect], FrameSpec, FrameSpec], Optional[PackPlan]]


@dataclass(frozen=True, slots=True)
class Detection:
    """One detected object in the coordinates of the view it came from."""

    rect: Rect
    class_id: int
    confidence: float

    def __post_init__(self):
        if self.class_id < 0:
            raise ValueError("class_id must be nonnegative")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence out of range: {self.confidence}")


@dataclass(frozen=True, slots=True)
class PipelineConfig:
    """Knobs for the frame scheduler."""

    anchor_interval: int = 5
    tau: float = 0.2
    s1: FrameSpec = field(default=FrameSpec(300.0))
    s2: FrameSpec = field(default=FrameSpec(150.0))

    def __post_init__(self):
        if self.anchor_interval < 1:
            raise ValueError("anchor_interval must be >= 1")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must be in [0, 1]")
        if self.s2.side > self.s1.side:
            raise ValueError("reduced frame cannot be larger than the full frame")


@dataclass(frozen=True, slots=True)
class FrameDecision:
    """Tagged processing decision; PACKED carries its plan."""

    kind: DecisionKind
    plan: Optional[PackPlan] = None

    def __post_init__(self):
        if (self.kind is DecisionKind.PACKED) != (self.plan is not None):
            raise ValueError("exactly the PACKED decision carries a plan")

    @classmethod
    def anchor(cls) -> "FrameDecision":
        return cls(DecisionKind.ANCHOR)

    @classmethod
    def packed(cls, plan: PackPlan) -> "FrameDecision":
        return cls(DecisionKind.PACKED, plan)

    @classmethod
    def fallback_full(cls) -> "FrameDecision":
        return cls(DecisionKind.FALLBACK_FULL)

    @classmethod
    def skipped(cls) -> "FrameDecision":
        return cls(DecisionKind.SKIPPED)


@dataclass(frozen=True, slots=True)
class FullView:
    """Detector input: the whole frame at full size."""

    frame: FrameSpec


@dataclass(frozen=True, slots=True)
class ReducedView:
    """Detector input: the reduced frame assembled from a packing plan."""

    plan: PackPlan


View = Union[FullView, ReducedView]


class Detector(Protocol):
    """Anything that can report detections for a frame under a view.

    Returned rects lie within the view: inside (0, 0, s1, s1) for a full
    view and inside (0, 0, s2, s2) for a reduced one.
    """

    def detect(self, frame_index: int, view: View) -> list[Detection]: ...


def rois_from_detections(detections: Sequence[Detection], tau: float) -> list[Rect]:
    """Rects of the detections at or above the confidence threshold."""
    return [d.rect for d in detections if d.confidence >= tau]


def map_back(detections: Sequence[Detection], plan: PackPlan) -> list[Detection]:
    """Translate reduced-frame detections into source-frame coordinates.

    Each detection is assigned to the slot whose dst it overlaps most (a
    detection straddling slots follows the greatest overlap), inverted
    through that slot's transform and clipped to the slot's src. Detections
    overlapping no slot are dropped.
    """
    out = []
    for det in detections:
        best = None
        best_area = 0.0
        for slot in plan.slots:
            inter = intersection(det.rect, slot.dst)
            if inter is not None and inter.area > best_area:
                best, best_area = slot, inter.area
        if best is None:
            continue
        mapped = best.to_source(det.rect)
        clipped = intersection(mapped, best.src)
        if clipped is None:
            continue
        out.append(Detection(clipped, det.class_id, det.confidence))
    return out


def step(
    prev_detections: Sequence[Detection],
    frame_index: int,
    config: PipelineConfig,
    detector: Detector,
    packer: Packer = pack,
) -> tuple[FrameDecision, list[Detection]]:
    """Decide and process one frame; returns source-frame detections."""
    if frame_index < 0:
        raise ValueError("frame_index must be nonnegative")
    if frame_index % config.anchor_interval == 0:
        return FrameDecision.anchor(), detector.detect(frame_index, FullView(config.s1))
    rois = rois_from_detections(prev_detections, config.tau)
    if not rois:
        return FrameDecision.skipped(), []
    plan = packer(rois, config.s1, config.s2)
    if plan is None:
        return (
            FrameDecision.fallback_full(),
            detector.detect(frame_index, FullView(config.s1)),
        )
    raw = detector.detect(frame_index, ReducedView(plan))
    return FrameDecision.packed(plan), map_back(raw, plan)


@dataclass(frozen=True, slots=True)
class FrameRecord:
    """Outcome of one frame: its schedule index, decision and detections."""

    index: int
    decision: FrameDecision
    detections: tuple[Detection, ...]


@dataclass(frozen=True, slots=True)
class VideoRun:
    """All frame records of one video plus the aggregated cost."""

    records: tuple[FrameRecord, ...]
    cost: Optional[CostReport]


def run_video(
    n_frames: int,
    config: PipelineConfig,
    detector: Detector,
    cost_params: Optional[CostParams] = None,
    packer: Packer = pack,
) -> VideoRun:
    """Process frames 0..n_frames-1 sequentially, threading detections.

    Frame i's decision depends only on frame i-1's detections and on i
    itself, so a run can be replayed from any checkpoint. An empty video
    yields empty records and no cost report.
    """
    records: list[FrameRecord] = []
    prev: Sequence[Detection] = ()
    for i in range(n_frames):
        decision, detections = step(prev, i, config, detector, packer)
        records.append(FrameRecord(i, decision, tuple(detections)))
        prev = detections
    if not records:
        return VideoRun(records=(), cost=None)
    params = cost_params or CostParams.for_frames(config.s1, config.s2)
    cost = aggregate([r.decision for r in records], params)
    return VideoRun(records=tuple(records), cost=cost)
