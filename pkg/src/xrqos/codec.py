"""GOP-structured frame sizing and the pose-driven (strong-interaction) bitrate model.

A pose-driven VR stream is encoded as one I-frame followed by P-frames per
GOP; B-frames need a future reference and are therefore excluded. Frame sizes
start from the warped render surface (the visible field plus reprojection
margins and an extra-picture allowance), add depth-of-field side data, and
divide by the per-frame-type compression factor.
"""
from __future__ import annotations

from dataclasses import dataclass

from .capacity import BitDepth, BitRate, CompressionProfile
from .errors import ConfigError, DomainError
from .geometry import FovSpec, Resolution

__all__ = [
    "GopConfig",
    "RenderSurface",
    "FrameSizes",
    "nb_pixels",
    "frame_size",
    "p_frame_count",
    "gop_bitrate",
    "strong_interaction_bitrate",
]


@dataclass(frozen=True)
class GopConfig:
    """Group-of-pictures timing and overhead parameters.

    ``pattern`` optionally spells the frame-type cycle of one GOP: position 0
    must be 'I' and the remainder repeats to fill the GOP (e.g. "IBBP" gives
    the classic I BBP BBP ... layout). ``None`` means the pose-driven default
    of one I followed by P-frames only.
    """

    gop_time: float
    fps: float
    redundancy_fraction: float = 0.10
    pattern: str | None = None

    def __post_init__(self) -> None:
        if self.gop_time <= 0:
            raise DomainError(f"gop duration must be positive, got {self.gop_time}")
        if self.fps <= 0:
            raise DomainError(f"frame rate must be positive, got {self.fps}")
        if self.gop_time * self.fps < 1:
            raise DomainError("a gop must span at least one frame")
        if not 0 <= self.redundancy_fraction < 1:
            raise DomainError(f"redundancy fraction must lie in [0, 1), got {self.redundancy_fraction}")
        if self.pattern is not None:
            if not self.pattern or self.pattern[0] != "I" or self.pattern.count("I") != 1:
                raise DomainError("pattern must start with its single 'I' frame")
            if set(self.pattern) - set("IPB"):
                raise DomainError(f"pattern may only contain I/P/B, got {self.pattern!r}")

    @property
    def frames_per_gop(self) -> int:
        return round(self.gop_time * self.fps)

    def frame_type(self, position: int) -> str:
        """Frame type at a position within one GOP."""
        if position == 0:
            return "I"
        if self.pattern is None or len(self.pattern) == 1:
            return "P"
        cycle = self.pattern[1:]
        return cycle[(position - 1) % len(cycle)]


@dataclass(frozen=True)
class RenderSurface:
    """What actually gets encoded for one stereo frame.

    The rendered image exceeds the visible field: ``fov.extra_h/extra_v``
    degrees of margin keep late reprojection from exposing unrendered area,
    ``extra_picture_fraction`` pads each axis by a further percentage, and
    ``dof_fraction`` accounts for the depth side data reprojection needs.
    """

    per_eye: Resolution
    fov: FovSpec
    depth: BitDepth
    extra_picture_fraction: float = 0.10
    dof_fraction: float = 0.15

    def __post_init__(self) -> None:
        if not 0 <= self.extra_picture_fraction < 1:
            raise DomainError(f"extra picture fraction must lie in [0, 1), got {self.extra_picture_fraction}")
        if not 0 <= self.dof_fraction < 1:
            raise DomainError(f"dof fraction must lie in [0, 1), got {self.dof_fraction}")


@dataclass(frozen=True)
class FrameSizes:
    """Encoded size per frame type, in bits."""

    i_bits: float
    p_bits: float
    b_bits: float | None = None

    def __post_init__(self) -> None:
        if self.i_bits <= 0 or self.p_bits <= 0:
            raise DomainError("I- and P-frame sizes must be positive")
        if self.b_bits is not None and self.b_bits < 0:
            raise DomainError("B-frame size cannot be negative")

    def bits_for(self, frame_type: str) -> float:
        if frame_type == "I":
            return self.i_bits
        if frame_type == "P":
            return self.p_bits
        if frame_type == "B":
            if self.b_bits is None:
                raise ConfigError("trace pattern uses B-frames but no B-frame size is configured")
            return self.b_bits
        raise DomainError(f"unknown frame type {frame_type!r}")


def nb_pixels(surface: RenderSurface) -> float:
    """Pixel count of one rendered stereo frame, margins included.

    2 * W * H * (1 + extra_h/fov_h) * (1 + extra_v/fov_v)
      * (1 + extra_picture_fraction)^2
    """
    fov_h = surface.fov.horizontal.degrees
    fov_v = surface.fov.vertical.degrees
    if fov_h <= 0 or fov_v <= 0:
        raise DomainError("render surface fov must be positive on both axes")
    margin_h = 1.0 + surface.fov.extra_h.degrees / fov_h
    margin_v = 1.0 + surface.fov.extra_v.degrees / fov_v
    padding = (1.0 + surface.extra_picture_fraction) ** 2
    return 2.0 * surface.per_eye.pixels * margin_h * margin_v * padding


def frame_size(pixel_count: float, depth: BitDepth, dof_fraction: float, factor: float) -> float:
    """Encoded frame size in bits: pixels * bpp * (1 + dof) / compression factor."""
    if factor < 1:
        raise DomainError(f"compression factor must be >= 1, got {factor}")
    if pixel_count < 0:
        raise DomainError(f"pixel count cannot be negative, got {pixel_count}")
    if dof_fraction < 0:
        raise DomainError(f"dof fraction cannot be negative, got {dof_fraction}")
    return pixel_count * depth.bits_per_pixel * (1.0 + dof_fraction) / factor


def p_frame_count(cfg: GopConfig) -> int:
    """P-frames per GOP: every slot but the leading I-frame."""
    return cfg.frames_per_gop - 1


def gop_bitrate(sizes: FrameSizes, n_i: int, n_p: int, cfg: GopConfig) -> BitRate:
    """Average bitrate of one GOP's worth of frames plus redundancy overhead."""
    if n_i < 1:
        raise DomainError(f"a gop carries at least one I-frame, got {n_i}")
    if n_p < 0:
        raise DomainError(f"p-frame count cannot be negative, got {n_p}")
    payload = sizes.i_bits * n_i + sizes.p_bits * n_p
    return BitRate(payload * (1.0 + cfg.redundancy_fraction) / cfg.gop_time)


def strong_interaction_bitrate(
    surface: RenderSurface, cfg: GopConfig, comp: CompressionProfile
) -> BitRate:
    """End-to-end pose-driven bitrate: surface -> frame sizes -> GOP average."""
    if cfg.pattern is not None and "B" in cfg.pattern:
        raise ConfigError("pose-driven streams carry no B-frames (no future reference exists)")
    i_factor, p_factor = comp.require_frame_factors()
    pixels = nb_pixels(surface)
    sizes = FrameSizes(
        i_bits=frame_size(pixels, surface.depth, surface.dof_fraction, i_factor),
        p_bits=frame_size(pixels, surface.depth, surface.dof_fraction, p_factor),
    )
    return gop_bitrate(sizes, 1, p_frame_count(cfg), cfg)
