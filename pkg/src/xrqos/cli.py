"""Command-line frontend for the toolkit.

Data goes to stdout, diagnostics to stderr. Exit codes: 0 success, 1 domain
error, 2 usage error. Rate literals take K/M/G/T (decimal) or Ki/Mi/Gi/Ti
(binary) suffixes; time literals take us/ms/s and default to milliseconds.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import capacity, codec, geometry, latency, netsim, reliability, report, tracegen
from .capacity import BitDepth, BitRate, CompressionProfile, VoxelSpec
from .codec import FrameSizes, GopConfig, RenderSurface
from .errors import ConfigError, DomainError, XrqosError
from .geometry import FovSpec, PhysicalSize, Resolution
from .latency import LatencyBudget, PipelineTiming
from .netsim import LinkModel
from .profiles import (
    ProfileRegistry,
    StageProfile,
    load_profiles,
    norm_interaction,
    reproduce_quest2_table,
    reproduce_summary_table,
)
from .reliability import DEFAULT_MSS_BITS, LossModel

PROFILES_ENV = "XRQOS_PROFILES"

_RATE_SUFFIXES = dict(capacity.BINARY_PREFIXES + capacity.DECIMAL_PREFIXES)


# -- literal parsing ---------------------------------------------------------


def parse_rate(text: str) -> float:
    """'140M' -> 140e6; '25Mi' -> 25*2**20; bare numbers are bits per second."""
    token = text.strip()
    if token.lower().endswith("bps"):
        token = token[:-3]
    for suffix in sorted(_RATE_SUFFIXES, key=len, reverse=True):
        if token.endswith(suffix):
            try:
                return float(token[: -len(suffix)]) * _RATE_SUFFIXES[suffix]
            except ValueError:
                raise DomainError(f"bad rate literal {text!r}") from None
    try:
        return float(token)
    except ValueError:
        raise DomainError(f"bad rate literal {text!r}") from None


def parse_time_ms(text: str) -> float:
    """'20ms' -> 20.0; '2s' -> 2000.0; '500us' -> 0.5; bare numbers are ms."""
    token = text.strip()
    try:
        if token.endswith("us"):
            return float(token[:-2]) / 1000.0
        if token.endswith("ms"):
            return float(token[:-2])
        if token.endswith("s"):
            return float(token[:-1]) * 1000.0
        return float(token)
    except ValueError:
        raise DomainError(f"bad time literal {text!r}") from None


def parse_resolution(text: str) -> Resolution:
    try:
        width, height = text.lower().split("x", 1)
        return Resolution(int(width), int(height))
    except (ValueError, TypeError):
        raise DomainError(f"bad resolution literal {text!r}; expected WIDTHxHEIGHT") from None


def parse_pair(text: str) -> tuple[float, float]:
    try:
        first, second = text.lower().split("x", 1)
        return float(first), float(second)
    except (ValueError, TypeError):
        raise DomainError(f"bad pair literal {text!r}; expected HxV") from None


def _depth_from_args(args) -> BitDepth:
    if args.bpp is not None:
        return BitDepth(args.bpp)
    return BitDepth.from_bpc(args.bpc, args.chroma)


def _registry(args) -> ProfileRegistry:
    path = args.profiles_file or os.environ.get(PROFILES_ENV)
    return load_profiles(path)


# -- output rendering --------------------------------------------------------


def _rate_payload(rate: BitRate, units: str) -> dict:
    return {"bps": rate.bps, "formatted": rate.format(units), "units": units}


def _jsonable(value, units: str):
    if isinstance(value, BitRate):
        return _rate_payload(value, units)
    if isinstance(value, Resolution):
        return str(value)
    if isinstance(value, FovSpec):
        return f"{value.horizontal.degrees:g}x{value.vertical.degrees:g}"
    if isinstance(value, dict):
        return {str(k): _jsonable(v, units) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v, units) for v in value]
    return value


def _text_value(value, units: str) -> str:
    if isinstance(value, BitRate):
        return value.format(units)
    if isinstance(value, FovSpec):
        return f"{value.horizontal.degrees:g}x{value.vertical.degrees:g}"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def _emit(args, command: str, data, text_lines: list[str]) -> int:
    if args.format == "json":
        payload = {"command": command, "units": args.units, "data": _jsonable(data, args.units)}
        print(json.dumps(payload, indent=2, sort_keys=True))
    elif args.format == "csv":
        import csv as _csv

        rows = data if isinstance(data, list) else [data]
        keys: list[str] = []
        for row in rows:
            for key in row:
                if key not in keys:
                    keys.append(key)
        writer = _csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(keys)
        for row in rows:
            flat = {k: _jsonable(v, args.units) for k, v in row.items()}
            cells = []
            for key in keys:
                value = flat.get(key, "")
                if isinstance(value, dict) and "bps" in value:
                    value = repr(value["bps"])
                elif isinstance(value, (dict, list)):
                    value = json.dumps(value, sort_keys=True)
                elif value is None:
                    value = ""
                cells.append(str(value))
            writer.writerow(cells)
    else:
        for line in text_lines:
            print(line)
    return 0


def _emit_scalar(args, command: str, data: dict) -> int:
    lines = [f"{key}: {_text_value(value, args.units)}" for key, value in data.items()]
    return _emit(args, command, data, lines)


# -- geometry ----------------------------------------------------------------


def _cmd_geometry_ppi(args) -> int:
    res = parse_resolution(args.resolution)
    if "x" in args.size.lower():
        width, height = parse_pair(args.size)
        value = geometry.ppi(res, PhysicalSize(width, height))
    else:
        value = geometry.ppi_from_diagonal(res, float(args.size))
    return _emit_scalar(args, "geometry.ppi", {"ppi": value})


def _cmd_geometry_fov(args) -> int:
    fov = geometry.fov_from_physical(args.extent, args.distance)
    return _emit_scalar(args, "geometry.fov", {"fov_deg": fov.degrees})


def _cmd_geometry_ppd(args) -> int:
    if args.fov is not None:
        value = geometry.ppd_from_fov(args.pixels, args.fov)
    elif args.extent is not None and args.distance is not None:
        value = geometry.ppd_from_physical(args.pixels, args.extent, args.distance)
    else:
        raise DomainError("ppd needs either --fov or both --extent and --distance")
    return _emit_scalar(args, "geometry.ppd", {"ppd": value})


def _cmd_geometry_scale(args) -> int:
    value = geometry.scale_resolution(args.pixels, args.from_fov, args.to_fov)
    return _emit_scalar(args, "geometry.scale", {"pixels": value})


def _cmd_geometry_cone_ppd(args) -> int:
    value = geometry.ppd_from_cone_density(args.density, args.lens_distance)
    return _emit_scalar(args, "geometry.cone-ppd", {"ppd": value})


# -- capacity ----------------------------------------------------------------


def _comp(args) -> CompressionProfile:
    return CompressionProfile(f"{args.factor:g}:1", args.factor)


def _cmd_capacity_eye_like(args) -> int:
    fov_h, fov_v = parse_pair(args.fov)
    rate = capacity.eye_like_capacity(FovSpec(fov_h, fov_v), args.ppd, _depth_from_args(args), args.fps, _comp(args))
    return _emit_scalar(args, "capacity.eye-like", {"bitrate": rate})


def _cmd_capacity_hmd(args) -> int:
    rate = capacity.hmd_capacity(
        parse_resolution(args.resolution), _depth_from_args(args), args.fps, _comp(args), stereo=not args.mono
    )
    return _emit_scalar(args, "capacity.hmd", {"bitrate": rate})


def _cmd_capacity_sphere(args) -> int:
    rate = capacity.full_sphere_capacity(args.ppd, _depth_from_args(args), args.fps, _comp(args))
    return _emit_scalar(args, "capacity.sphere", {"bitrate": rate})


def _cmd_capacity_volumetric(args) -> int:
    voxel = VoxelSpec(args.voxels, color_depth=args.color_bits, position_depth=args.position_bits)
    rate = capacity.volumetric_capacity(voxel, args.fps, _comp(args))
    return _emit_scalar(args, "capacity.volumetric", {"bitrate": rate})


# -- gop -----------------------------------------------------------------------


def _stage_key(args) -> str | None:
    return args.stage_profile or args.profile


def _stage_for(args, registry: ProfileRegistry) -> StageProfile:
    token = _stage_key(args)
    if "/" not in token:
        raise DomainError(f"stage key must look like taxonomy/stage, got {token!r}")
    taxonomy, stage = token.split("/", 1)
    return registry.stage(taxonomy, stage)


def _surface_from_stage(stage: StageProfile) -> tuple[RenderSurface, GopConfig, CompressionProfile]:
    missing = [
        name
        for name in ("per_eye", "fov", "bpc", "iframe_factor", "pframe_factor", "gop_time_s")
        if getattr(stage, name) in (None, {})
    ]
    if missing:
        raise ConfigError(f"stage {stage.taxonomy}/{stage.stage} lacks fields for the GOP model: {missing}")
    surface = RenderSurface(
        per_eye=stage.per_eye,
        fov=stage.fov,
        depth=BitDepth.from_bpc(stage.bpc, stage.chroma),
        extra_picture_fraction=stage.extra_picture_fraction or 0.0,
        dof_fraction=stage.dof_fraction or 0.0,
    )
    cfg = GopConfig(
        gop_time=stage.gop_time_s,
        fps=stage.fps.get("strong") or next(iter(stage.fps.values())),
        redundancy_fraction=stage.redundancy_fraction or 0.0,
    )
    return surface, cfg, stage.compression()


def _surface_from_args(args) -> RenderSurface:
    fov_h, fov_v = parse_pair(args.fov)
    extra_h, extra_v = parse_pair(args.extra_fov) if args.extra_fov else (0.0, 0.0)
    return RenderSurface(
        per_eye=parse_resolution(args.resolution),
        fov=FovSpec(fov_h, fov_v, extra_h, extra_v),
        depth=_depth_from_args(args),
        extra_picture_fraction=args.extra_picture,
        dof_fraction=args.dof,
    )


def _gop_numbers(args, registry: ProfileRegistry) -> dict:
    if _stage_key(args):
        surface, cfg, comp = _surface_from_stage(_stage_for(args, registry))
    else:
        if not (args.resolution and args.fov and args.ifactor and args.pfactor):
            raise DomainError("gop needs --stage-profile or --resolution/--fov/--ifactor/--pfactor")
        surface = _surface_from_args(args)
        cfg = GopConfig(gop_time=args.gop_time, fps=args.fps, redundancy_fraction=args.redundancy)
        comp = CompressionProfile("cli", max(args.ifactor, 1.0), args.ifactor, args.pfactor)
    pixels = codec.nb_pixels(surface)
    i_bits = codec.frame_size(pixels, surface.depth, surface.dof_fraction, comp.iframe_factor)
    p_bits = codec.frame_size(pixels, surface.depth, surface.dof_fraction, comp.pframe_factor)
    return {
        "surface": surface,
        "cfg": cfg,
        "comp": comp,
        "pixels": pixels,
        "i_bits": i_bits,
        "p_bits": p_bits,
    }


def _cmd_gop_frame_sizes(args) -> int:
    numbers = _gop_numbers(args, _registry(args))
    data = {
        "pixels_per_frame": numbers["pixels"],
        "iframe_bits": numbers["i_bits"],
        "pframe_bits": numbers["p_bits"],
    }
    return _emit_scalar(args, "gop.frame-sizes", data)


def _cmd_gop_bitrate(args) -> int:
    numbers = _gop_numbers(args, _registry(args))
    cfg: GopConfig = numbers["cfg"]
    sizes = FrameSizes(numbers["i_bits"], numbers["p_bits"])
    n_p = codec.p_frame_count(cfg)
    rate = codec.gop_bitrate(sizes, 1, n_p, cfg)
    data = {
        "pixels_per_frame": numbers["pixels"],
        "iframe_bits": numbers["i_bits"],
        "pframe_bits": numbers["p_bits"],
        "pframes_per_gop": n_p,
        "bitrate": rate,
    }
    return _emit_scalar(args, "gop.bitrate", data)


# -- latency -------------------------------------------------------------------


def _cmd_latency_refresh(args) -> int:
    delay = latency.refresh_delay(args.hz)
    return _emit_scalar(args, "latency.refresh", {"max_ms": delay.max_ms, "avg_ms": delay.avg_ms})


def _cmd_latency_stream(args) -> int:
    value = latency.stream_latency(
        parse_time_ms(args.encode), args.frame_bits, parse_rate(args.throughput), parse_time_ms(args.decode)
    )
    return _emit_scalar(args, "latency.stream", {"stream_ms": value})


def _cmd_latency_budget(args) -> int:
    registry = _registry(args)
    if args.pipeline:
        preset = registry.pipeline(args.pipeline)
        timing, comm_ul, comm_dl = preset.timing, preset.comm_ul, preset.comm_dl
        refresh_hz, vsync = preset.refresh_hz, preset.vsync_mode
    else:
        timing = PipelineTiming(
            t_sense=args.sense, t_render=args.render, t_encode=args.encode,
            t_decode=args.decode, fixed_display=args.display,
        )
        comm_ul, comm_dl = args.comm_ul, args.comm_dl
        refresh_hz, vsync = args.refresh_hz, args.vsync
    budget = LatencyBudget(
        mtp_limit=parse_time_ms(args.limit), components=timing, comm_ul=comm_ul, comm_dl=comm_dl,
        refresh_hz=refresh_hz, vsync_mode=vsync,
    )
    result = latency.budget_check(budget)
    data = {
        "mtp_limit_ms": budget.mtp_limit,
        "remaining_ms": result.remaining_ms,
        "violated": result.violated,
        "breakdown": dict(result.breakdown),
    }
    lines = [f"mtp_limit_ms: {budget.mtp_limit:g}"]
    lines += [f"  {name}: {ms:g}" for name, ms in result.breakdown]
    lines.append(f"remaining_ms: {result.remaining_ms:g}")
    lines.append(f"violated: {result.violated}")
    return _emit(args, "latency.budget", data, lines)


def _cmd_latency_limits(args) -> int:
    registry = _registry(args)
    if args.taxonomy and args.stage:
        value = registry.mtp_limit(args.taxonomy, args.stage, args.interaction)
        return _emit_scalar(args, "latency.limits", {"mtp_limit_ms": value})
    rows = [
        {"taxonomy": taxonomy, "stage": stage, "interaction": interaction, "mtp_limit_ms": ms}
        for (taxonomy, stage), profile in sorted(registry.stages.items())
        for interaction, ms in sorted(profile.mtp_ms.items())
    ]
    lines = [f"{r['taxonomy']:<12} {r['stage']:<16} {r['interaction']:<8} {r['mtp_limit_ms']:g} ms" for r in rows]
    return _emit(args, "latency.limits", rows, lines)


# -- reliability -----------------------------------------------------------------


def _cmd_reliability_max_loss(args) -> int:
    loss = reliability.max_loss_rate(
        LossModel(mss_bits=args.mss), parse_rate(args.throughput), parse_time_ms(args.rtt) / 1000.0
    )
    success = reliability.delivery_success(loss)
    data = {"max_loss_rate": loss, "delivery_pct": success}
    lines = [f"max_loss_rate: {loss:.2g}", f"delivery_pct: {success:.4f}"]
    return _emit(args, "reliability.max-loss", data, lines)


def _cmd_reliability_delivery(args) -> int:
    success = reliability.delivery_success(args.loss)
    return _emit(
        args, "reliability.delivery", {"delivery_pct": success}, [f"delivery_pct: {success:.4f}"]
    )


def _cmd_reliability_requirements(args) -> int:
    registry = _registry(args)
    if args.taxonomy and args.stage:
        value = registry.loss_rate(args.taxonomy, args.stage, args.interaction)
        data = {"max_loss_rate": value, "delivery_pct": reliability.delivery_success(value)}
        lines = [f"max_loss_rate: {value:g}", f"delivery_pct: {data['delivery_pct']}"]
        return _emit(args, "reliability.requirements", data, lines)
    rows = [
        {"taxonomy": taxonomy, "stage": stage, "interaction": interaction, "max_loss_rate": rate}
        for (taxonomy, stage), profile in sorted(registry.stages.items())
        for interaction, rate in sorted(profile.loss_rate.items())
    ]
    lines = [f"{r['taxonomy']:<12} {r['stage']:<16} {r['interaction']:<8} {r['max_loss_rate']:g}" for r in rows]
    return _emit(args, "reliability.requirements", rows, lines)


# -- profiles --------------------------------------------------------------------


def _cmd_profiles_list(args) -> int:
    registry = _registry(args)
    data = {
        "devices": sorted(registry.devices),
        "stages": [f"{t}/{s}" for t, s in sorted(registry.stages)],
        "pipelines": sorted(registry.pipelines),
    }
    lines = (
        [f"device: {name}" for name in data["devices"]]
        + [f"stage: {name}" for name in data["stages"]]
        + [f"pipeline: {name}" for name in data["pipelines"]]
    )
    return _emit(args, "profiles.list", data, lines)


def _cmd_profiles_show(args) -> int:
    registry = _registry(args)
    if "/" in args.name:
        taxonomy, stage = args.name.split("/", 1)
        profile = registry.stage(taxonomy, stage)
        data = {
            "taxonomy": profile.taxonomy,
            "stage": profile.stage,
            "per_eye": str(profile.per_eye) if profile.per_eye else None,
            "ppd": profile.ppd,
            "fps": profile.fps,
            "bpc": profile.bpc,
            "fov": profile.fov,
            "codec": profile.codec,
            "mtp_ms": profile.mtp_ms,
            "loss_rate": profile.loss_rate,
            "published": {r.label: f"{r.value:g} {r.unit}bps ({r.prefix})" for r in profile.bitrates},
        }
    else:
        device, mode = registry.device_mode(args.name)
        data = {
            "name": device.name,
            "per_eye": str(device.per_eye) if device.per_eye else None,
            "fov": device.fov,
            "bpc": device.depth_bpc,
            "chroma": device.chroma,
            "modes": {
                f"{m.hz:g}": {
                    "render_target": str(device.mode_eye_resolution(m)),
                    "full_video": str(device.mode_full_video(m)),
                    "ppd": device.mode_ppd(m),
                }
                for m in device.refresh_modes
            },
        }
    lines = [f"{key}: {_jsonable(value, args.units)}" for key, value in data.items()]
    return _emit(args, "profiles.show", data, lines)


def _cmd_profiles_validate(args) -> int:
    load_profiles(args.path)
    return _emit(args, "profiles.validate", {"ok": True, "path": str(args.path)}, [f"ok: {args.path}"])


# -- tables ----------------------------------------------------------------------


def _cmd_table_quest2(args) -> int:
    rows = reproduce_quest2_table(_registry(args))
    data = [
        {
            "hz": row["hz"],
            "render_target": row["render_target"],
            "full_video": row["full_video"],
            "ppd": row["ppd"],
            "viewport_bitrate": row["viewport_bitrate"],
            "full_video_bitrate": row["full_video_bitrate"],
        }
        for row in rows
    ]
    lines = [f"{'hz':>5}  {'render':>10}  {'full video':>10}  {'ppd':>6}  {'viewport':>12}  {'full':>12}"]
    for row in rows:
        lines.append(
            f"{row['hz']:>5g}  {str(row['render_target']):>10}  {str(row['full_video']):>10}"
            f"  {row['ppd']:>6.2f}  {row['viewport_bitrate'].format(args.units):>12}"
            f"  {row['full_video_bitrate'].format(args.units):>12}"
        )
    return _emit(args, "table.quest2", data, lines)


def _cmd_table_summary(args) -> int:
    if args.profile:
        table = reproduce_summary_table(_registry(args), columns=(args.profile,))
    else:
        table = reproduce_summary_table(_registry(args))
    columns = table["columns"]
    lines = [f"{'requirement':<28}" + "".join(f"{key:>22}" for key in columns)]
    labels = [
        "full_view_resolution", "single_eye_resolution", "fov", "bpc", "bpp", "ppd",
        "refresh_hz", "mtp_limit_ms", "max_loss_rate", "min_delivery_pct",
    ]
    styles = {"ppd": "{:.2f}", "min_delivery_pct": "{:.5f}"}
    for label in labels:
        cells = []
        for key in columns:
            value = table["profiles"][key].get(label, "")
            if label in styles and isinstance(value, float):
                cells.append(f"{styles[label].format(value):>22}")
            else:
                cells.append(f"{_text_value(value, args.units):>22}")
        lines.append(f"{label:<28}" + "".join(cells))
    factors = sorted(next(iter(table["profiles"].values()))["bitrates"])
    for factor in factors:
        cells = [
            f"{table['profiles'][key]['bitrates'][factor].format(args.units):>22}" for key in columns
        ]
        lines.append(f"{'bitrate_' + format(factor, 'g') + ':1':<28}" + "".join(cells))
    return _emit(args, "table.summary", table["profiles"], lines)


def _cmd_report(args) -> int:
    registry = _registry(args)
    result = report.requirements_report(registry, tuple(args.profiles))
    if args.format == "csv":
        print(report.report_to_csv(result), end="")
        return 0
    print(report.report_to_json(result), end="")
    return 0


# -- traces and simulation ---------------------------------------------------------


def _trace_from_args(args, registry: ProfileRegistry) -> tracegen.FrameTrace:
    if args.input:
        path = Path(args.input)
        if path.suffix.lower() != ".json":
            raise DomainError("simulate/packetize need a JSON trace (CSV lacks the config block)")
        return tracegen.load_trace_json(path)
    if _stage_key(args):
        surface, cfg, comp = _surface_from_stage(_stage_for(args, registry))
        pixels = codec.nb_pixels(surface)
        sizes = FrameSizes(
            codec.frame_size(pixels, surface.depth, surface.dof_fraction, comp.iframe_factor),
            codec.frame_size(pixels, surface.depth, surface.dof_fraction, comp.pframe_factor),
        )
    else:
        if args.i_bits is None or args.p_bits is None:
            raise DomainError("trace needs --input, --stage-profile, or --i-bits/--p-bits")
        sizes = FrameSizes(args.i_bits, args.p_bits, args.b_bits)
        cfg = GopConfig(
            gop_time=args.gop_time, fps=args.fps,
            redundancy_fraction=args.redundancy, pattern=args.pattern,
        )
    return tracegen.generate_trace(sizes, cfg, args.duration)


def _cmd_trace_generate(args) -> int:
    trace = _trace_from_args(args, _registry(args))
    fmt = "json" if args.format == "json" else "csv"
    if args.output:
        tracegen.export_trace(trace, fmt, args.output)
        print(f"wrote {len(trace)} frames to {args.output}", file=sys.stderr)
    else:
        tracegen.export_trace(trace, fmt, sys.stdout)
    return 0


def _cmd_trace_packetize(args) -> int:
    trace = _trace_from_args(args, _registry(args))
    packets = tracegen.packetize(trace, args.mtu)
    fmt = "json" if args.format == "json" else "csv"
    if args.output:
        tracegen.export_packets(packets, fmt, args.output)
        print(f"wrote {len(packets)} packets to {args.output}", file=sys.stderr)
    else:
        tracegen.export_packets(packets, fmt, sys.stdout)
    return 0


def _link_from_args(args) -> LinkModel:
    return LinkModel(
        downlink_bps=parse_rate(args.downlink),
        uplink_bps=parse_rate(args.uplink),
        propagation_rtt=parse_time_ms(args.rtt),
        loss_prob=args.loss,
        seed=args.seed,
        mode="tcp_like" if args.mode == "tcp" else "udp_like",
        max_retx=args.max_retx,
        mtu_payload_bits=args.mtu,
    )


def _cmd_simulate(args) -> int:
    registry = _registry(args)
    trace = _trace_from_args(args, registry)
    timing = PipelineTiming(
        t_sense=args.sense, t_render=args.render, t_encode=args.encode,
        t_decode=args.decode, fixed_display=args.display,
    )
    mtp_limit = parse_time_ms(args.mtp_limit)
    downlinks = [args.downlink] if not args.sweep_downlink else args.sweep_downlink.split(",")
    reports = []
    for downlink in downlinks:
        args.downlink = downlink
        link = _link_from_args(args)
        reports.append(netsim.simulate(trace, link, timing, args.refresh_hz, mtp_limit))

    if len(reports) == 1:
        sim = reports[0]
        if args.format == "json":
            output = sim.to_json()
            if args.output:
                Path(args.output).write_text(output, encoding="utf-8")
                print(f"wrote report to {args.output}", file=sys.stderr)
            else:
                print(output, end="")
            return 0
        if args.format == "csv":
            if args.output:
                with open(args.output, "w", encoding="utf-8") as handle:
                    sim.write_csv(handle)
                print(f"wrote report to {args.output}", file=sys.stderr)
            else:
                sim.write_csv(sys.stdout)
            return 0
        agg = sim.aggregates
        for name, value in vars(agg).items():
            print(f"{name}: {'n/a' if value is None else f'{value:.4f}' if isinstance(value, float) else value}")
        return 0

    rows = []
    for downlink, sim in zip(downlinks, reports):
        agg = sim.aggregates
        rows.append(
            {
                "downlink": downlink.strip(),
                "displayed": agg.displayed_count,
                "dropped": agg.dropped_count,
                "mean_e2e_ms": agg.mean_e2e_ms,
                "p99_e2e_ms": agg.p99_e2e_ms,
                "mtp_violations": agg.mtp_violations,
            }
        )
    lines = [
        f"{r['downlink']:>10}  displayed={r['displayed']}  dropped={r['dropped']}"
        f"  mean={'n/a' if r['mean_e2e_ms'] is None else format(r['mean_e2e_ms'], '.3f')}"
        f"  p99={'n/a' if r['p99_e2e_ms'] is None else format(r['p99_e2e_ms'], '.3f')}"
        f"  violations={r['mtp_violations']}"
        for r in rows
    ]
    return _emit(args, "simulate.sweep", rows, lines)


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xrqos", description=__doc__)
    parser.add_argument("--units", choices=("binary", "decimal"), default="binary",
                        help="prefix convention for formatted bit rates (default binary)")
    parser.add_argument("--format", choices=("text", "csv", "json"), default="text")
    parser.add_argument("--profile", default=None,
                        help="default profile key: taxonomy/stage for gop|trace|simulate, device[@hz] for table summary")
    parser.add_argument("--profiles-file", default=None, help=f"extra profiles JSON (or ${PROFILES_ENV})")
    parser.add_argument("--seed", type=int, default=0, help="seed for the simulator's loss draws")
    sub = parser.add_subparsers(dest="command")

    geo = sub.add_parser("geometry", help="pixel density, fov, and scaling math").add_subparsers(dest="sub")
    p = geo.add_parser("ppi")
    p.add_argument("--resolution", required=True)
    p.add_argument("--size", required=True, help="WxH inches, or a bare diagonal length")
    p.set_defaults(func=_cmd_geometry_ppi)
    p = geo.add_parser("fov")
    p.add_argument("--extent", type=float, required=True)
    p.add_argument("--distance", type=float, required=True)
    p.set_defaults(func=_cmd_geometry_fov)
    p = geo.add_parser("ppd")
    p.add_argument("--pixels", type=int, required=True)
    p.add_argument("--fov", type=float)
    p.add_argument("--extent", type=float)
    p.add_argument("--distance", type=float)
    p.set_defaults(func=_cmd_geometry_ppd)
    p = geo.add_parser("scale")
    p.add_argument("--pixels", type=int, required=True)
    p.add_argument("--from-fov", type=float, required=True)
    p.add_argument("--to-fov", type=float, required=True)
    p.set_defaults(func=_cmd_geometry_scale)
    p = geo.add_parser("cone-ppd")
    p.add_argument("--density", type=float, required=True, help="cones per square millimetre")
    p.add_argument("--lens-distance", type=float, default=17.1)
    p.set_defaults(func=_cmd_geometry_cone_ppd)

    cap = sub.add_parser("capacity", help="required bitrate models").add_subparsers(dest="sub")

    def _depth_flags(p):
        p.add_argument("--bpp", type=float, default=None)
        p.add_argument("--bpc", type=int, default=8)
        p.add_argument("--chroma", choices=("4:4:4", "4:2:0"), default="4:4:4")
        p.add_argument("--fps", type=float, required=True)
        p.add_argument("--factor", type=float, default=1.0)

    p = cap.add_parser("eye-like")
    p.add_argument("--ppd", type=float, required=True)
    p.add_argument("--fov", required=True, help="per-eye HxV degrees, e.g. 155x130")
    _depth_flags(p)
    p.set_defaults(func=_cmd_capacity_eye_like)
    p = cap.add_parser("hmd")
    p.add_argument("--resolution", required=True)
    p.add_argument("--mono", action="store_true", help="single shared raster instead of per-eye streams")
    _depth_flags(p)
    p.set_defaults(func=_cmd_capacity_hmd)
    p = cap.add_parser("sphere")
    p.add_argument("--ppd", type=float, required=True)
    _depth_flags(p)
    p.set_defaults(func=_cmd_capacity_sphere)
    p = cap.add_parser("volumetric")
    p.add_argument("--voxels", type=int, required=True)
    p.add_argument("--color-bits", type=int, default=24)
    p.add_argument("--position-bits", type=int, default=48)
    p.add_argument("--fps", type=float, required=True)
    p.add_argument("--factor", type=float, default=1.0)
    p.set_defaults(func=_cmd_capacity_volumetric)

    gop = sub.add_parser("gop", help="GOP frame sizes and pose-driven bitrate").add_subparsers(dest="sub")

    def _gop_flags(p):
        p.add_argument("--stage-profile", default=None, help="taxonomy/stage to pull parameters from")
        p.add_argument("--resolution")
        p.add_argument("--fov")
        p.add_argument("--extra-fov", default=None, help="reprojection margin HxV degrees")
        p.add_argument("--extra-picture", type=float, default=0.10)
        p.add_argument("--dof", type=float, default=0.15)
        p.add_argument("--bpp", type=float, default=None)
        p.add_argument("--bpc", type=int, default=8)
        p.add_argument("--chroma", choices=("4:4:4", "4:2:0"), default="4:2:0")
        p.add_argument("--ifactor", type=float)
        p.add_argument("--pfactor", type=float)
        p.add_argument("--fps", type=float, default=90.0)
        p.add_argument("--gop-time", type=float, default=2.0)
        p.add_argument("--redundancy", type=float, default=0.10)

    p = gop.add_parser("frame-sizes")
    _gop_flags(p)
    p.set_defaults(func=_cmd_gop_frame_sizes)
    p = gop.add_parser("bitrate")
    _gop_flags(p)
    p.set_defaults(func=_cmd_gop_bitrate)

    lat = sub.add_parser("latency", help="MTP decomposition and budgets").add_subparsers(dest="sub")
    p = lat.add_parser("refresh")
    p.add_argument("--hz", type=float, required=True)
    p.set_defaults(func=_cmd_latency_refresh)
    p = lat.add_parser("stream")
    p.add_argument("--encode", default="0ms")
    p.add_argument("--decode", default="0ms")
    p.add_argument("--frame-bits", type=float, required=True)
    p.add_argument("--throughput", required=True)
    p.set_defaults(func=_cmd_latency_stream)
    p = lat.add_parser("budget")
    p.add_argument("--limit", required=True, help="MTP ceiling, e.g. 20ms")
    p.add_argument("--pipeline", default=None, help="named pipeline preset")
    p.add_argument("--sense", type=float, default=0.0)
    p.add_argument("--render", type=float, default=0.0)
    p.add_argument("--encode", type=float, default=0.0)
    p.add_argument("--decode", type=float, default=0.0)
    p.add_argument("--display", type=float, default=0.0)
    p.add_argument("--comm-ul", type=float, default=0.0)
    p.add_argument("--comm-dl", type=float, default=0.0)
    p.add_argument("--refresh-hz", type=float, default=None)
    p.add_argument("--vsync", choices=("avg", "max", "none"), default="avg")
    p.set_defaults(func=_cmd_latency_budget)
    p = lat.add_parser("limits")
    p.add_argument("--taxonomy")
    p.add_argument("--stage")
    p.add_argument("--interaction", type=norm_interaction, default=None)
    p.set_defaults(func=_cmd_latency_limits)

    rel = sub.add_parser("reliability", help="loss bounds and delivery rates").add_subparsers(dest="sub")
    p = rel.add_parser("max-loss")
    p.add_argument("--throughput", required=True)
    p.add_argument("--rtt", required=True)
    p.add_argument("--mss", type=int, default=DEFAULT_MSS_BITS)
    p.set_defaults(func=_cmd_reliability_max_loss)
    p = rel.add_parser("delivery")
    p.add_argument("--loss", type=float, required=True)
    p.set_defaults(func=_cmd_reliability_delivery)
    p = rel.add_parser("requirements")
    p.add_argument("--taxonomy")
    p.add_argument("--stage")
    p.add_argument("--interaction", type=norm_interaction, default=None)
    p.set_defaults(func=_cmd_reliability_requirements)

    prof = sub.add_parser("profiles", help="inspect and validate profile data").add_subparsers(dest="sub")
    prof.add_parser("list").set_defaults(func=_cmd_profiles_list)
    p = prof.add_parser("show")
    p.add_argument("name", help="device name, device@hz, or taxonomy/stage")
    p.set_defaults(func=_cmd_profiles_show)
    p = prof.add_parser("validate")
    p.add_argument("path")
    p.set_defaults(func=_cmd_profiles_validate)

    table = sub.add_parser("table", help="reproduce the measurement/QoS tables").add_subparsers(dest="sub")
    table.add_parser("quest2").set_defaults(func=_cmd_table_quest2)
    table.add_parser("summary").set_defaults(func=_cmd_table_summary)

    rep = sub.add_parser("report", help="requirements report for chosen profiles")
    rep.add_argument("profiles", nargs="+", help="device keys, e.g. quest2@72 eye_like")
    rep.set_defaults(func=_cmd_report)

    def _trace_source_flags(p):
        p.add_argument("--input", default=None, help="existing trace JSON")
        p.add_argument("--stage-profile", default=None, help="taxonomy/stage with GOP parameters")
        p.add_argument("--i-bits", type=float, default=None)
        p.add_argument("--p-bits", type=float, default=None)
        p.add_argument("--b-bits", type=float, default=None)
        p.add_argument("--fps", type=float, default=90.0)
        p.add_argument("--gop-time", type=float, default=2.0)
        p.add_argument("--redundancy", type=float, default=0.10)
        p.add_argument("--pattern", default=None)
        p.add_argument("--duration", type=float, default=2.0, help="seconds")

    trace = sub.add_parser("trace", help="synthesize frame/packet traces").add_subparsers(dest="sub")
    p = trace.add_parser("generate")
    _trace_source_flags(p)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_trace_generate)
    p = trace.add_parser("packetize")
    _trace_source_flags(p)
    p.add_argument("--mtu", type=int, default=DEFAULT_MSS_BITS)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_trace_packetize)

    sim = sub.add_parser("simulate", help="play a trace through the MTP pipeline")
    _trace_source_flags(sim)
    sim.add_argument("--downlink", required=True)
    sim.add_argument("--uplink", default="1G")
    sim.add_argument("--rtt", default="0ms", help="propagation round trip")
    sim.add_argument("--loss", type=float, default=0.0)
    sim.add_argument("--mode", choices=("udp", "tcp"), default="udp")
    sim.add_argument("--max-retx", type=int, default=3)
    sim.add_argument("--mtu", type=int, default=DEFAULT_MSS_BITS)
    sim.add_argument("--sense", type=float, default=0.0)
    sim.add_argument("--render", type=float, default=0.0)
    sim.add_argument("--encode", type=float, default=0.0)
    sim.add_argument("--decode", type=float, default=0.0)
    sim.add_argument("--display", type=float, default=0.0)
    sim.add_argument("--refresh-hz", type=float, required=True)
    sim.add_argument("--mtp-limit", default="20ms")
    sim.add_argument("--sweep-downlink", default=None, help="comma-separated rates to sweep")
    sim.add_argument("--output", default=None)
    sim.set_defaults(func=_cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args) or 0
    except XrqosError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
