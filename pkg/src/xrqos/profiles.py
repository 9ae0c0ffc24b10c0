"""Data-driven registry of device profiles and VR evolution-stage parameters.

Built-in profiles ship inside the package so the toolkit runs with no
external files; user-supplied JSON files with the same shape (top-level
``devices``/``stages``/``pipelines`` arrays) can be merged on top. Published
stage figures are stored verbatim with their prefix convention tagged, never
re-derived, because the underlying assumptions are not all disclosed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import capacity
from .capacity import BitDepth, BitRate, CompressionProfile
from .errors import ProfileError, UnknownKeyError
from .geometry import FovSpec, Resolution
from .latency import PipelineTiming

__all__ = [
    "RefreshMode",
    "DeviceProfile",
    "StageProfile",
    "PublishedRate",
    "PipelinePreset",
    "ProfileRegistry",
    "builtin_registry",
    "load_profiles",
    "reproduce_quest2_table",
    "reproduce_summary_table",
]

_INTERACTIONS = ("weak_2d", "weak_3d", "strong")

# Common spellings seen in the literature mapped onto canonical stage names.
_STAGE_ALIASES = {
    "pre": "pre_vr",
    "previr": "pre_vr",
    "entry": "entry_level",
    "entry_level_vr": "entry_level",
    "advanced_vr": "advanced",
    "ultimate_vr": "ultimate",
}


def _norm(token: str) -> str:
    return token.strip().lower().replace("-", "_").replace(" ", "_")


def norm_stage(stage: str) -> str:
    token = _norm(stage)
    return _STAGE_ALIASES.get(token, token)


def norm_interaction(interaction: str | None) -> str | None:
    if interaction is None:
        return None
    token = _norm(interaction)
    if token in ("any", "", "-"):
        return None
    if token in ("weak", "weak_2d", "weak_3d", "strong"):
        return token
    raise UnknownKeyError(f"unknown interaction {interaction!r}; expected one of weak_2d, weak_3d, strong, weak")


@dataclass(frozen=True)
class RefreshMode:
    """One refresh-rate operating point of a device."""

    hz: float
    render_target: Resolution | None = None
    full_video: Resolution | None = None
    ppd: float | None = None


@dataclass(frozen=True)
class PublishedRate:
    """A bitrate quoted from the literature, kept verbatim."""

    label: str
    value: float
    unit: str
    prefix: str

    @property
    def bitrate(self) -> BitRate:
        table = dict(capacity.DECIMAL_PREFIXES if self.prefix == "decimal" else capacity.BINARY_PREFIXES)
        if self.unit not in table:
            raise ProfileError(f"published rate {self.label!r} has unknown unit {self.unit!r}")
        return BitRate(self.value * table[self.unit])


@dataclass(frozen=True)
class DeviceProfile:
    name: str
    fov: FovSpec
    depth_bpc: int
    chroma: str
    refresh_modes: tuple[RefreshMode, ...]
    per_eye: Resolution | None = None
    ppd: float | None = None
    pipeline: PipelineTiming | None = None
    measured_mtp_ms: float | None = None
    mtp_limits_ms: dict[str, float] = field(default_factory=dict)
    published_loss_rate: float | None = None
    published_delivery_pct: float | None = None

    @property
    def depth(self) -> BitDepth:
        return BitDepth.from_bpc(self.depth_bpc, self.chroma)

    def mode(self, hz: float) -> RefreshMode:
        for mode in self.refresh_modes:
            if mode.hz == hz:
                return mode
        valid = ", ".join(str(m.hz) for m in self.refresh_modes)
        raise UnknownKeyError(f"device {self.name!r} has no {hz} Hz mode; available: {valid}")

    def mode_ppd(self, mode: RefreshMode) -> float:
        """Angular resolution of a mode, derived from the render target when present."""
        if mode.render_target is not None:
            return mode.render_target.width / self.fov.horizontal.degrees
        if mode.ppd is not None:
            return mode.ppd
        if self.ppd is not None:
            return self.ppd
        raise ProfileError(f"device {self.name!r} mode {mode.hz} Hz defines neither render target nor ppd")

    def mode_eye_resolution(self, mode: RefreshMode) -> Resolution:
        if mode.render_target is not None:
            return mode.render_target
        ppd = self.mode_ppd(mode)
        return Resolution(
            round(self.fov.horizontal.degrees * ppd), round(self.fov.vertical.degrees * ppd)
        )

    def mode_full_video(self, mode: RefreshMode) -> Resolution:
        if mode.full_video is not None:
            return mode.full_video
        ppd = self.mode_ppd(mode)
        return Resolution(round(360.0 * ppd), round(180.0 * ppd))


@dataclass(frozen=True)
class StageProfile:
    taxonomy: str
    stage: str
    per_eye: Resolution | None = None
    ppd: float | None = None
    fps: dict[str, float] = field(default_factory=dict)
    bpc: int | None = None
    chroma: str = "4:4:4"
    fov: FovSpec | None = None
    codec: str | None = None
    stereo: bool | None = None
    iframe_factor: float | None = None
    pframe_factor: float | None = None
    gop_time_s: float | None = None
    redundancy_fraction: float | None = None
    extra_picture_fraction: float | None = None
    dof_fraction: float | None = None
    mtp_ms: dict[str, float] = field(default_factory=dict)
    loss_rate: dict[str, float] = field(default_factory=dict)
    bitrates: tuple[PublishedRate, ...] = ()

    def published(self, label: str) -> PublishedRate:
        for rate in self.bitrates:
            if rate.label == label:
                return rate
        valid = ", ".join(r.label for r in self.bitrates)
        raise UnknownKeyError(f"stage {self.taxonomy}/{self.stage} has no published rate {label!r}; available: {valid}")

    def compression(self, overall_factor: float = 600.0) -> CompressionProfile:
        return CompressionProfile(
            self.codec or "unknown",
            overall_factor,
            iframe_factor=self.iframe_factor,
            pframe_factor=self.pframe_factor,
        )


@dataclass(frozen=True)
class PipelinePreset:
    """A named set of MTP budget components."""

    name: str
    timing: PipelineTiming
    comm_ul: float = 0.0
    comm_dl: float = 0.0
    refresh_hz: float | None = None
    vsync_mode: str = "avg"
    note: str = ""


class ProfileRegistry:
    """Immutable-after-load lookup of devices, stages, and pipeline presets."""

    def __init__(self) -> None:
        self.devices: dict[str, DeviceProfile] = {}
        self.stages: dict[tuple[str, str], StageProfile] = {}
        self.pipelines: dict[str, PipelinePreset] = {}

    # -- population -------------------------------------------------------

    def add_device(self, profile: DeviceProfile) -> None:
        if profile.name in self.devices:
            raise ProfileError(f"duplicate device profile {profile.name!r}")
        self._validate_device(profile)
        self.devices[profile.name] = profile

    def add_stage(self, profile: StageProfile) -> None:
        key = (profile.taxonomy, profile.stage)
        if key in self.stages:
            raise ProfileError(f"duplicate stage profile {profile.taxonomy}/{profile.stage}")
        self.stages[key] = profile

    def add_pipeline(self, preset: PipelinePreset) -> None:
        if preset.name in self.pipelines:
            raise ProfileError(f"duplicate pipeline preset {preset.name!r}")
        self.pipelines[preset.name] = preset

    @staticmethod
    def _validate_device(profile: DeviceProfile) -> None:
        # A stored per-mode ppd must agree with the render target over the fov.
        for mode in profile.refresh_modes:
            if mode.render_target is not None and mode.ppd is not None:
                derived = mode.render_target.width / profile.fov.horizontal.degrees
                if abs(derived - mode.ppd) > 0.01:
                    raise ProfileError(
                        f"device {profile.name!r} mode {mode.hz} Hz: stored ppd {mode.ppd} "
                        f"disagrees with render target ({derived:.4f})"
                    )

    # -- lookups ----------------------------------------------------------

    def device(self, name: str) -> DeviceProfile:
        base = name.split("@", 1)[0]
        if base not in self.devices:
            valid = ", ".join(sorted(self.devices))
            raise UnknownKeyError(f"unknown device profile {name!r}; available: {valid}")
        return self.devices[base]

    def device_mode(self, name: str) -> tuple[DeviceProfile, RefreshMode]:
        """Resolve 'name' or 'name@hz' to a device and one refresh mode."""
        profile = self.device(name)
        if "@" in name:
            suffix = name.split("@", 1)[1]
            try:
                hz = float(suffix)
            except ValueError:
                raise UnknownKeyError(f"bad refresh-rate suffix {suffix!r} in profile key {name!r}") from None
            return profile, profile.mode(hz)
        return profile, profile.refresh_modes[0]

    def stage(self, taxonomy: str, stage: str) -> StageProfile:
        key = (_norm(taxonomy), norm_stage(stage))
        if key not in self.stages:
            valid = ", ".join(f"{t}/{s}" for t, s in sorted(self.stages))
            raise UnknownKeyError(f"unknown stage {taxonomy}/{stage}; available: {valid}")
        return self.stages[key]

    def _stage_value(self, table_name: str, taxonomy: str, stage: str, interaction: str | None) -> float:
        profile = self.stage(taxonomy, stage)
        table: dict[str, float] = getattr(profile, table_name)
        requested = norm_interaction(interaction)
        if requested in table:
            return table[requested]
        if requested == "weak" or requested is None:
            pool = ["weak_2d", "weak_3d"] if requested == "weak" else list(_INTERACTIONS)
            values = {table[i] for i in pool if i in table}
            if len(values) == 1:
                return values.pop()
            if len(values) > 1:
                raise UnknownKeyError(
                    f"{table_name} for {taxonomy}/{stage} is ambiguous without an interaction; "
                    f"registered: {sorted(table)}"
                )
        valid = ", ".join(
            f"{t}/{s}/{i}" for (t, s), p in sorted(self.stages.items()) for i in sorted(getattr(p, table_name))
        )
        raise UnknownKeyError(
            f"no {table_name} registered for {taxonomy}/{stage}/{interaction}; available: {valid}"
        )

    def mtp_limit(self, taxonomy: str, stage: str, interaction: str | None) -> float:
        return self._stage_value("mtp_ms", taxonomy, stage, interaction)

    def loss_rate(self, taxonomy: str, stage: str, interaction: str | None) -> float:
        return self._stage_value("loss_rate", taxonomy, stage, interaction)

    def pipeline(self, name: str) -> PipelinePreset:
        if name not in self.pipelines:
            valid = ", ".join(sorted(self.pipelines))
            raise UnknownKeyError(f"unknown pipeline preset {name!r}; available: {valid}")
        return self.pipelines[name]


# -- parsing ---------------------------------------------------------------


def _get(obj: dict, key: str, path: str, required: bool = True, default=None):
    if key not in obj:
        if required:
            raise ProfileError(f"missing key {path}.{key}")
        return default
    return obj[key]


def _parse_resolution(obj: dict | None, path: str) -> Resolution | None:
    if obj is None:
        return None
    try:
        return Resolution(int(_get(obj, "width", path)), int(_get(obj, "height", path)))
    except (TypeError, ValueError) as exc:
        raise ProfileError(f"bad resolution at {path}: {exc}") from exc


def _parse_fov(obj: dict | None, path: str) -> FovSpec | None:
    if obj is None:
        return None
    try:
        return FovSpec(
            horizontal=float(_get(obj, "horizontal", path)),
            vertical=float(_get(obj, "vertical", path)),
            extra_h=float(obj.get("extra_h", 0.0)),
            extra_v=float(obj.get("extra_v", 0.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ProfileError(f"bad fov at {path}: {exc}") from exc


def _parse_device(obj: dict, path: str) -> DeviceProfile:
    depth = _get(obj, "depth", path)
    modes = []
    for i, mode in enumerate(_get(obj, "refresh_modes", path)):
        mode_path = f"{path}.refresh_modes[{i}]"
        modes.append(
            RefreshMode(
                hz=float(_get(mode, "hz", mode_path)),
                render_target=_parse_resolution(mode.get("render_target"), mode_path),
                full_video=_parse_resolution(mode.get("full_video"), mode_path),
                ppd=float(mode["ppd"]) if "ppd" in mode else None,
            )
        )
    pipeline = None
    if "pipeline" in obj and isinstance(obj["pipeline"], dict) and "t_sense" in obj["pipeline"]:
        timing = obj["pipeline"]
        pipeline = PipelineTiming(
            t_sense=float(timing.get("t_sense", 0.0)),
            t_render=float(timing.get("t_render", 0.0)),
            t_encode=float(timing.get("t_encode", 0.0)),
            t_decode=float(timing.get("t_decode", 0.0)),
            fixed_display=float(timing.get("fixed_display", 0.0)),
        )
    fov = _parse_fov(_get(obj, "fov", path), f"{path}.fov")
    assert fov is not None
    return DeviceProfile(
        name=str(_get(obj, "name", path)),
        per_eye=_parse_resolution(obj.get("per_eye"), f"{path}.per_eye"),
        fov=fov,
        depth_bpc=int(_get(depth, "bits_per_color", f"{path}.depth")),
        chroma=str(depth.get("chroma", "4:4:4")),
        refresh_modes=tuple(modes),
        ppd=float(obj["ppd"]) if "ppd" in obj else None,
        pipeline=pipeline,
        measured_mtp_ms=float(obj["measured_mtp_ms"]) if "measured_mtp_ms" in obj else None,
        mtp_limits_ms={str(k): float(v) for k, v in obj.get("mtp_ms", {}).items()},
        published_loss_rate=float(obj["published_loss_rate"]) if "published_loss_rate" in obj else None,
        published_delivery_pct=float(obj["published_delivery_pct"]) if "published_delivery_pct" in obj else None,
    )


def _parse_stage(obj: dict, path: str) -> StageProfile:
    rates = []
    for i, rate in enumerate(obj.get("bitrates", [])):
        rate_path = f"{path}.bitrates[{i}]"
        rates.append(
            PublishedRate(
                label=str(_get(rate, "label", rate_path)),
                value=float(_get(rate, "value", rate_path)),
                unit=str(_get(rate, "unit", rate_path)),
                prefix=str(rate.get("prefix", "decimal")),
            )
        )
    return StageProfile(
        taxonomy=_norm(str(_get(obj, "taxonomy", path))),
        stage=norm_stage(str(_get(obj, "stage", path))),
        per_eye=_parse_resolution(obj.get("per_eye"), f"{path}.per_eye"),
        ppd=float(obj["ppd"]) if "ppd" in obj else None,
        fps={str(k): float(v) for k, v in obj.get("fps", {}).items()},
        bpc=int(obj["bpc"]) if "bpc" in obj else None,
        chroma=str(obj.get("chroma", "4:4:4")),
        fov=_parse_fov(obj.get("fov"), f"{path}.fov"),
        codec=str(obj["codec"]) if "codec" in obj else None,
        stereo=bool(obj["stereo"]) if "stereo" in obj else None,
        iframe_factor=float(obj["iframe_factor"]) if "iframe_factor" in obj else None,
        pframe_factor=float(obj["pframe_factor"]) if "pframe_factor" in obj else None,
        gop_time_s=float(obj["gop_time_s"]) if "gop_time_s" in obj else None,
        redundancy_fraction=float(obj["redundancy_fraction"]) if "redundancy_fraction" in obj else None,
        extra_picture_fraction=float(obj["extra_picture_fraction"]) if "extra_picture_fraction" in obj else None,
        dof_fraction=float(obj["dof_fraction"]) if "dof_fraction" in obj else None,
        mtp_ms={str(k): float(v) for k, v in obj.get("mtp_ms", {}).items()},
        loss_rate={str(k): float(v) for k, v in obj.get("loss_rate", {}).items()},
        bitrates=tuple(rates),
    )


def _parse_pipeline(obj: dict, path: str) -> PipelinePreset:
    return PipelinePreset(
        name=str(_get(obj, "name", path)),
        timing=PipelineTiming(
            t_sense=float(obj.get("t_sense", 0.0)),
            t_render=float(obj.get("t_render", 0.0)),
            t_encode=float(obj.get("t_encode", 0.0)),
            t_decode=float(obj.get("t_decode", 0.0)),
            fixed_display=float(obj.get("fixed_display", 0.0)),
        ),
        comm_ul=float(obj.get("comm_ul", 0.0)),
        comm_dl=float(obj.get("comm_dl", 0.0)),
        refresh_hz=float(obj["refresh_hz"]) if "refresh_hz" in obj else None,
        vsync_mode=str(obj.get("vsync_mode", "avg")),
        note=str(obj.get("note", "")),
    )


def _load_document(registry: ProfileRegistry, document: dict, source: str) -> None:
    if not isinstance(document, dict):
        raise ProfileError(f"{source}: top level must be an object with devices/stages arrays")
    for i, obj in enumerate(document.get("devices", [])):
        registry.add_device(_parse_device(obj, f"devices[{i}]"))
    for i, obj in enumerate(document.get("stages", [])):
        registry.add_stage(_parse_stage(obj, f"stages[{i}]"))
    for i, obj in enumerate(document.get("pipelines", [])):
        registry.add_pipeline(_parse_pipeline(obj, f"pipelines[{i}]"))


def _read_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProfileError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ProfileError(f"{path}: {exc}") from exc


_builtin: ProfileRegistry | None = None


def builtin_registry() -> ProfileRegistry:
    """The registry of embedded profiles, built once per process."""
    global _builtin
    if _builtin is None:
        registry = ProfileRegistry()
        data = resources.files("xrqos").joinpath("data/builtin_profiles.json").read_text(encoding="utf-8")
        _load_document(registry, json.loads(data), "builtin profiles")
        _builtin = registry
    return _builtin


def load_profiles(path: str | Path | None = None) -> ProfileRegistry:
    """Built-in profiles plus, optionally, a user profile file merged on top."""
    registry = ProfileRegistry()
    base = builtin_registry()
    registry.devices.update(base.devices)
    registry.stages.update(base.stages)
    registry.pipelines.update(base.pipelines)
    if path is not None:
        _load_document(registry, _read_json(Path(path)), str(path))
    return registry


# -- table reproductions ----------------------------------------------------

_LOSSY_FACTOR = CompressionProfile("H.265 (600:1)", 600.0)


def reproduce_quest2_table(registry: ProfileRegistry) -> list[dict]:
    """One row per Quest 2 refresh mode: resolutions, ppd, and both bitrates.

    Bitrates are recomputed from the mode's resolutions at the 600:1 lossy
    factor: the viewport stream is stereo, the full-view raster is sent once.
    """
    device = registry.device("quest2")
    rows = []
    for mode in device.refresh_modes:
        render = device.mode_eye_resolution(mode)
        full = device.mode_full_video(mode)
        rows.append(
            {
                "hz": mode.hz,
                "render_target": render,
                "full_video": full,
                "ppd": device.mode_ppd(mode),
                "viewport_bitrate": capacity.hmd_capacity(
                    render, device.depth, mode.hz, _LOSSY_FACTOR, stereo=True
                ),
                "full_video_bitrate": capacity.hmd_capacity(
                    full, device.depth, mode.hz, _LOSSY_FACTOR, stereo=False
                ),
            }
        )
    return rows


def _device_requirements(registry: ProfileRegistry, key: str, factors: tuple[float, ...]) -> dict:
    device, mode = registry.device_mode(key)
    eye = device.mode_eye_resolution(mode)
    full = device.mode_full_video(mode)
    ppd = device.mode_ppd(mode)
    requirements: dict = {
        "profile": key,
        "full_view_resolution": full,
        "single_eye_resolution": eye,
        "fov": device.fov,
        "bpc": device.depth_bpc,
        "bpp": device.depth.bits_per_pixel,
        "ppd": ppd,
        "refresh_hz": mode.hz,
        "bitrates": {},
    }
    for factor in factors:
        comp = CompressionProfile(f"{factor:g}:1", factor)
        if device.per_eye is None and mode.render_target is None:
            # ppd-defined experience: pixel budget comes straight from fov x ppd.
            rate = capacity.eye_like_capacity(device.fov, ppd, device.depth, mode.hz, comp)
        else:
            rate = capacity.hmd_capacity(eye, device.depth, mode.hz, comp, stereo=True)
        requirements["bitrates"][factor] = rate
    if device.measured_mtp_ms is not None:
        requirements["mtp_limit_ms"] = device.measured_mtp_ms
    elif device.mtp_limits_ms:
        requirements["mtp_limit_ms"] = device.mtp_limits_ms.get("weak", min(device.mtp_limits_ms.values()))
    if device.published_loss_rate is not None:
        from .reliability import delivery_success

        requirements["max_loss_rate"] = device.published_loss_rate
        requirements["min_delivery_pct"] = delivery_success(device.published_loss_rate)
    return requirements


def reproduce_summary_table(
    registry: ProfileRegistry,
    columns: tuple[str, ...] = ("quest2@72", "eye_like"),
    factors: tuple[float, ...] = (1.0, 20.0, 600.0),
) -> dict:
    """The side-by-side QoS requirement summary for a set of device profiles.

    Every cell except the stored full-video resolutions and the published
    loss bounds is recomputed from profile primitives.
    """
    return {
        "columns": list(columns),
        "profiles": {key: _device_requirements(registry, key, factors) for key in columns},
    }
