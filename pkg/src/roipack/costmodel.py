"""FLOP accounting for per-frame processing decisions.

Detector cost is modeled as proportional to the squared frame side, so a
half-size frame costs a quarter of a full one. Packing a frame adds a fixed
overhead expressed as a fraction of the full-frame cost; a failed pack
attempt pays that overhead and then the full-frame cost on top.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Mapping, Sequence

from .geometry import FrameSpec

if TYPE_CHECKING:
    from .pipeline import FrameDecision


class DecisionKind(str, Enum):
    """How a frame was processed."""

    ANCHOR = "anchor"
    PACKED = "packed"
    FALLBACK_FULL = "fallback_full"
    SKIPPED = "skipped"


@dataclass(frozen=True, slots=True)
class CostParams:
    """Cost constants, in arbitrary FLOP units.

    pack_overhead is the cost of one pack attempt as a fraction of
    flops_full and is charged on packed frames and on failed attempts
    alike. skip_cost is the (usually zero) cost of emitting nothing.
    """

    flops_full: float = 90000.0
    flops_reduced: float = 22500.0
    pack_overhead: float = 0.02
    skip_cost: float = 0.0

    def __post_init__(self):
        if self.flops_full <= 0 or self.flops_reduced <= 0:
            raise ValueError("frame costs must be positive")
        if self.flops_reduced > self.flops_full:
            raise ValueError("reduced-frame cost cannot exceed full-frame cost")
        if self.pack_overhead < 0 or self.skip_cost < 0:
            raise ValueError("overhead and skip cost must be nonnegative")

    @classmethod
    def for_frames(
        cls,
        full: FrameSpec,
        reduced: FrameSpec,
        pack_overhead: float = 0.02,
        skip_cost: float = 0.0,
    ) -> "CostParams":
        """Derive frame costs from frame sizes (cost proportional to side^2)."""
        return cls(
            flops_full=full.side * full.side,
            flops_reduced=reduced.side * reduced.side,
            pack_overhead=pack_overhead,
            skip_cost=skip_cost,
        )


def frame_cost(decision: "FrameDecision", params: CostParams) -> float:
    """FLOP cost of processing one frame under the given decision."""
    kind = decision.kind
    if kind is DecisionKind.ANCHOR:
        return params.flops_full
    if kind is DecisionKind.PACKED:
        return params.pack_overhead * params.flops_full + params.flops_reduced
    if kind is DecisionKind.FALLBACK_FULL:
        return params.pack_overhead * params.flops_full + params.flops_full
    if kind is DecisionKind.SKIPPED:
        return params.skip_cost
    raise ValueError(f"unknown decision kind: {kind!r}")


def _frame_overhead(decision: "FrameDecision", params: CostParams) -> float:
    if decision.kind in (DecisionKind.PACKED, DecisionKind.FALLBACK_FULL):
        return params.pack_overhead * params.flops_full
    return 0.0


@dataclass(frozen=True)
class CostReport:
    """Aggregate cost of a run against the always-full-size baseline.

    speedup is derived from flop_reduction so the identity
    speedup == 1 / (1 - flop_reduction) holds exactly.
    """

    per_frame: tuple[float, ...]
    total: float
    baseline: float
    decision_fractions: Mapping[str, float]
    flop_reduction: float
    speedup: float
    overhead_share: float

    def to_json_dict(self) -> dict:
        return {
            "frames": len(self.per_frame),
            "total_flops": self.total,
            "baseline_flops": self.baseline,
            "decision_fractions": dict(self.decision_fractions),
            "flop_reduction": self.flop_reduction,
            "speedup": self.speedup,
            "overhead_share": self.overhead_share,
        }


def aggregate(decisions: Sequence["FrameDecision"], params: CostParams) -> CostReport:
    """Total a sequence of per-frame decisions into a CostReport.

    Raises:
        ValueError: on an empty decision sequence.
    """
    if not decisions:
        raise ValueError("aggregate() needs at least one decision")
    per_frame = tuple(frame_cost(d, params) for d in decisions)
    total = sum(per_frame)
    baseline = params.flops_full * len(decisions)
    counts = {kind: 0 for kind in DecisionKind}
    for d in decisions:
        counts[d.kind] += 1
    n = len(decisions)
    fractions = {kind.value: counts[kind] / n for kind in DecisionKind}
    reduction = 1.0 - total / baseline
    speedup = math.inf if reduction >= 1.0 else 1.0 / (1.0 - reduction)
    overhead = sum(_frame_overhead(d, params) for d in decisions)
    overhead_share = overhead / total if total > 0 else 0.0
    return CostReport(
        per_frame=per_frame,
        total=total,
        baseline=baseline,
        decision_fractions=fractions,
        flop_reduction=reduction,
        speedup=speedup,
        overhead_share=overhead_share,
    )
