"""Motion-to-photon latency decomposition and budget checking.

The end-to-end delay splits into sensing, rendering, streaming
(encode + transmit + decode), and display (panel response plus the wait for
the next VSync tick). Stage-dependent MTP ceilings come from the profiles
registry.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .capacity import BitRate
from .errors import DomainError

__all__ = [
    "PipelineTiming",
    "LatencyBudget",
    "StageKey",
    "RefreshDelay",
    "BudgetReport",
    "refresh_delay",
    "stream_latency",
    "e2e_latency",
    "budget_check",
    "mtp_limit_for",
]


@dataclass(frozen=True)
class PipelineTiming:
    """Fixed per-frame processing delays, milliseconds.

    ``fixed_display`` is the screen-response (pixel switching) part of the
    display delay; the VSync wait is modeled separately because it depends on
    frame arrival time.
    """

    t_sense: float = 0.0
    t_render: float = 0.0
    t_encode: float = 0.0
    t_decode: float = 0.0
    fixed_display: float = 0.0

    def __post_init__(self) -> None:
        for name in ("t_sense", "t_render", "t_encode", "t_decode", "fixed_display"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} cannot be negative")

    @property
    def processing_total(self) -> float:
        return self.t_sense + self.t_render + self.t_encode + self.t_decode + self.fixed_display


@dataclass(frozen=True)
class StageKey:
    """Addresses one (taxonomy, stage, interaction) cell of the stage registry."""

    taxonomy: str
    stage: str
    interaction: str | None = None


@dataclass(frozen=True)
class LatencyBudget:
    """An MTP ceiling and the delays competing for it.

    When ``refresh_hz`` is given, a VSync wait joins the component sum;
    ``vsync_mode`` selects the average wait (half a refresh interval, the
    default), the worst case, or none.
    """

    mtp_limit: float
    components: PipelineTiming = field(default_factory=PipelineTiming)
    comm_ul: float = 0.0
    comm_dl: float = 0.0
    refresh_hz: float | None = None
    vsync_mode: str = "avg"

    def __post_init__(self) -> None:
        if self.mtp_limit <= 0:
            raise DomainError(f"mtp limit must be positive, got {self.mtp_limit}")
        if self.comm_ul < 0 or self.comm_dl < 0:
            raise DomainError("communication delays cannot be negative")
        if self.vsync_mode not in ("avg", "max", "none"):
            raise DomainError(f"vsync mode must be avg, max, or none, got {self.vsync_mode!r}")


@dataclass(frozen=True)
class RefreshDelay:
    max_ms: float
    avg_ms: float


@dataclass(frozen=True)
class BudgetReport:
    remaining_ms: float
    violated: bool
    breakdown: tuple[tuple[str, float], ...]


def refresh_delay(refresh_hz: float) -> RefreshDelay:
    """Worst-case and average wait for the next VSync tick.

    A frame missing a tick waits up to one full refresh interval; arrivals
    uniform over the interval wait half of it on average.
    """
    if refresh_hz <= 0:
        raise DomainError(f"refresh rate must be positive, got {refresh_hz}")
    max_ms = 1000.0 / refresh_hz
    return RefreshDelay(max_ms=max_ms, avg_ms=max_ms / 2.0)


def stream_latency(t_encode: float, frame_bits: float, throughput: BitRate | float, t_decode: float) -> float:
    """Encode + transmit + decode time for one frame, milliseconds.

    Transmission is the frame size over the available bit rate.
    """
    rate_bps = throughput.bps if isinstance(throughput, BitRate) else float(throughput)
    if rate_bps <= 0:
        raise DomainError(f"throughput must be positive, got {rate_bps}")
    if t_encode < 0 or t_decode < 0:
        raise DomainError("encode/decode times cannot be negative")
    if frame_bits < 0:
        raise DomainError(f"frame size cannot be negative, got {frame_bits}")
    return t_encode + 1000.0 * frame_bits / rate_bps + t_decode


def e2e_latency(timing: PipelineTiming, stream_ms: float, display_ms: float) -> float:
    """Motion-to-photon total: sense + render + stream + display.

    ``stream_ms`` already contains encode/transmit/decode and ``display_ms``
    contains the fixed display delay plus whatever VSync wait the caller
    chose, so only ``t_sense`` and ``t_render`` are read from ``timing``.
    """
    if stream_ms < 0 or display_ms < 0:
        raise DomainError("stream/display delays cannot be negative")
    return timing.t_sense + timing.t_render + stream_ms + display_ms


def budget_check(budget: LatencyBudget) -> BudgetReport:
    """Subtract every component from the MTP ceiling and report what is left."""
    timing = budget.components
    breakdown = [
        ("sense", timing.t_sense),
        ("render", timing.t_render),
        ("encode", timing.t_encode),
        ("decode", timing.t_decode),
        ("display", timing.fixed_display),
        ("comm_ul", budget.comm_ul),
        ("comm_dl", budget.comm_dl),
    ]
    if budget.refresh_hz is not None and budget.vsync_mode != "none":
        delay = refresh_delay(budget.refresh_hz)
        wait = delay.avg_ms if budget.vsync_mode == "avg" else delay.max_ms
        breakdown.append((f"vsync_{budget.vsync_mode}", wait))
    breakdown = [(name, ms) for name, ms in breakdown if ms > 0]
    remaining = budget.mtp_limit - sum(ms for _, ms in breakdown)
    return BudgetReport(remaining_ms=remaining, violated=remaining < 0, breakdown=tuple(breakdown))


def mtp_limit_for(key: StageKey, registry=None) -> float:
    """The registered MTP ceiling in milliseconds for a stage key."""
    if registry is None:
        from .profiles import builtin_registry

        registry = builtin_registry()
    return registry.mtp_limit(key.taxonomy, key.stage, key.interaction)
