"""Discrete-event playback of a frame trace over a parameterized link.

Each frame travels the full pipeline: pose uplink, render and encode on the
server, FIFO serialization on the downlink (the only queuing effect
modeled), propagation, decode, panel response, then the wait for the next
VSync tick. Packet loss is decided by a seeded draw keyed on
(frame, packet, attempt) so that changing the bandwidth never perturbs the
loss pattern; that keying is what makes bandwidth sweeps monotone and
repeatable.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import TextIO

from .errors import DomainError
from .latency import PipelineTiming
from .tracegen import FrameTrace

__all__ = ["LinkModel", "FrameResult", "Aggregates", "SimReport", "simulate"]


@dataclass(frozen=True)
class LinkModel:
    """Channel parameters for one simulation run.

    ``propagation_rtt`` is in milliseconds and is split evenly between the
    pose uplink and the video downlink. ``udp_like`` drops a frame on any
    lost packet; ``tcp_like`` retransmits each lost packet after one
    propagation RTT, up to ``max_retx`` times, before giving the frame up.
    The pose uplink defaults to zero-size messages (they are a few kbps at
    most); ``uplink_payload_bits`` can widen them.
    """

    downlink_bps: float
    uplink_bps: float = 1e9
    propagation_rtt: float = 0.0
    loss_prob: float = 0.0
    seed: int = 0
    mode: str = "udp_like"
    max_retx: int = 3
    mtu_payload_bits: int = 11680
    uplink_payload_bits: int = 0

    def __post_init__(self) -> None:
        if self.downlink_bps <= 0 or self.uplink_bps <= 0:
            raise DomainError("link rates must be positive")
        if not 0 <= self.loss_prob <= 1:
            raise DomainError(f"loss probability must lie in [0, 1], got {self.loss_prob}")
        if self.propagation_rtt < 0:
            raise DomainError(f"propagation rtt cannot be negative, got {self.propagation_rtt}")
        if self.mode not in ("udp_like", "tcp_like"):
            raise DomainError(f"mode must be udp_like or tcp_like, got {self.mode!r}")
        if self.max_retx < 0:
            raise DomainError(f"max retransmissions cannot be negative, got {self.max_retx}")
        if self.mtu_payload_bits <= 0:
            raise DomainError(f"mtu payload must be positive, got {self.mtu_payload_bits}")
        if self.uplink_payload_bits < 0:
            raise DomainError("uplink payload cannot be negative")


@dataclass(frozen=True)
class FrameResult:
    index: int
    displayed: bool
    e2e_ms: float | None
    vsync_wait_ms: float | None
    retx_count: int


@dataclass(frozen=True)
class Aggregates:
    mean_e2e_ms: float | None
    p50_e2e_ms: float | None
    p95_e2e_ms: float | None
    p99_e2e_ms: float | None
    max_e2e_ms: float | None
    displayed_count: int
    dropped_count: int
    mtp_violations: int
    effective_fps: float


@dataclass(frozen=True)
class SimReport:
    frames: tuple[FrameResult, ...]
    aggregates: Aggregates
    refresh_hz: float
    mtp_limit: float
    link: LinkModel
    timing: PipelineTiming

    def to_dict(self) -> dict:
        return {
            "link": {
                "downlink_bps": self.link.downlink_bps,
                "uplink_bps": self.link.uplink_bps,
                "propagation_rtt_ms": self.link.propagation_rtt,
                "loss_prob": self.link.loss_prob,
                "seed": self.link.seed,
                "mode": self.link.mode,
                "max_retx": self.link.max_retx,
                "mtu_payload_bits": self.link.mtu_payload_bits,
            },
            "refresh_hz": self.refresh_hz,
            "mtp_limit_ms": self.mtp_limit,
            "frames": [
                {
                    "frame_index": f.index,
                    "displayed": f.displayed,
                    "e2e_ms": f.e2e_ms,
                    "vsync_wait_ms": f.vsync_wait_ms,
                    "retx_count": f.retx_count,
                }
                for f in self.frames
            ],
            "aggregates": {
                "mean_e2e_ms": self.aggregates.mean_e2e_ms,
                "p50_e2e_ms": self.aggregates.p50_e2e_ms,
                "p95_e2e_ms": self.aggregates.p95_e2e_ms,
                "p99_e2e_ms": self.aggregates.p99_e2e_ms,
                "max_e2e_ms": self.aggregates.max_e2e_ms,
                "displayed_count": self.aggregates.displayed_count,
                "dropped_count": self.aggregates.dropped_count,
                "mtp_violations": self.aggregates.mtp_violations,
                "effective_fps": self.aggregates.effective_fps,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def write_csv(self, handle: TextIO) -> None:
        """Per-frame rows followed by an aggregates block."""
        handle.write("frame_index,displayed,e2e_ms,vsync_wait_ms,retx_count\n")
        for f in self.frames:
            e2e = "" if f.e2e_ms is None else f"{f.e2e_ms:.6f}"
            wait = "" if f.vsync_wait_ms is None else f"{f.vsync_wait_ms:.6f}"
            handle.write(f"{f.index},{int(f.displayed)},{e2e},{wait},{f.retx_count}\n")
        handle.write("\nmetric,value\n")
        for name, value in vars(self.aggregates).items():
            handle.write(f"{name},{'' if value is None else value}\n")


def _loss_draw(seed: int, frame_index: int, packet_index: int, attempt: int) -> float:
    """Uniform [0, 1) draw pinned to one transmission attempt."""
    key = f"{seed}:{frame_index}:{packet_index}:{attempt}".encode("ascii")
    digest = hashlib.blake2b(key, digest_size=8).digest()
    return int.from_bytes(digest, "big") / 2.0**64


def _percentile(sorted_values: list[float], q: float) -> float:
    # Nearest-rank definition; sorted_values must be non-empty.
    rank = max(0, math.ceil(q * len(sorted_values)) - 1)
    return sorted_values[min(rank, len(sorted_values) - 1)]


def _packet_sizes(frame_bits: int, mtu: int) -> list[int]:
    count = max(1, math.ceil(frame_bits / mtu))
    sizes = [mtu] * (count - 1)
    sizes.append(frame_bits - mtu * (count - 1))
    return sizes


def simulate(
    trace: FrameTrace,
    link: LinkModel,
    timing: PipelineTiming,
    refresh_hz: float,
    mtp_limit: float,
) -> SimReport:
    """Play a trace through the motion-to-photon pipeline over a link.

    Frames are serialized FIFO on the downlink: a frame's transmission
    starts no earlier than the previous frame finishes, which is where
    queuing delay comes from. A frame is displayed at the first VSync tick
    (k * 1000/refresh_hz, k >= 0) at or after it becomes ready.
    """
    if len(trace) == 0:
        raise DomainError("cannot simulate an empty trace")
    if refresh_hz <= 0:
        raise DomainError(f"refresh rate must be positive, got {refresh_hz}")
    if mtp_limit <= 0:
        raise DomainError(f"mtp limit must be positive, got {mtp_limit}")

    tick = 1000.0 / refresh_hz
    half_rtt = link.propagation_rtt / 2.0
    uplink_ms = 1000.0 * link.uplink_payload_bits / link.uplink_bps
    max_attempts = 1 + (link.max_retx if link.mode == "tcp_like" else 0)

    link_free = 0.0
    results = []
    for record in trace:
        arrival = record.t_gen + timing.t_sense + uplink_ms + half_rtt + timing.t_render + timing.t_encode
        t = max(arrival, link_free)
        delivered = True
        retx = 0
        for packet_index, packet_bits in enumerate(_packet_sizes(record.size_bits, link.mtu_payload_bits)):
            for attempt in range(max_attempts):
                t += 1000.0 * packet_bits / link.downlink_bps
                lost = link.loss_prob > 0.0 and _loss_draw(
                    link.seed, record.index, packet_index, attempt
                ) < link.loss_prob
                if not lost:
                    break
                if attempt < max_attempts - 1:
                    t += link.propagation_rtt
                    retx += 1
            if lost:
                delivered = False
        link_free = t

        if delivered:
            ready = t + half_rtt + timing.t_decode + timing.fixed_display
            k = max(0, math.ceil(ready / tick - 1e-9))
            display = k * tick
            results.append(
                FrameResult(
                    index=record.index,
                    displayed=True,
                    e2e_ms=display - record.t_gen,
                    vsync_wait_ms=display - ready,
                    retx_count=retx,
                )
            )
        else:
            results.append(
                FrameResult(index=record.index, displayed=False, e2e_ms=None, vsync_wait_ms=None, retx_count=retx)
            )

    shown = sorted(f.e2e_ms for f in results if f.displayed)
    displayed_count = len(shown)
    aggregates = Aggregates(
        mean_e2e_ms=sum(shown) / displayed_count if shown else None,
        p50_e2e_ms=_percentile(shown, 0.50) if shown else None,
        p95_e2e_ms=_percentile(shown, 0.95) if shown else None,
        p99_e2e_ms=_percentile(shown, 0.99) if shown else None,
        max_e2e_ms=shown[-1] if shown else None,
        displayed_count=displayed_count,
        dropped_count=len(results) - displayed_count,
        mtp_violations=sum(1 for f in results if f.displayed and f.e2e_ms > mtp_limit),
        effective_fps=displayed_count / trace.duration,
    )
    return SimReport(
        frames=tuple(results),
        aggregates=aggregates,
        refresh_hz=refresh_hz,
        mtp_limit=mtp_limit,
        link=link,
        timing=timing,
    )
