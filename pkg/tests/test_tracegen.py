import io
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xrqos.capacity import BitDepth
from xrqos.codec import FrameSizes, GopConfig, RenderSurface, frame_size, gop_bitrate, nb_pixels
from xrqos.errors import ConfigError, DomainError
from xrqos.geometry import FovSpec, Resolution
from xrqos.tracegen import (
    export_packets,
    export_trace,
    generate_trace,
    load_trace_csv,
    load_trace_json,
    packetize,
    trace_csv_text,
    trace_from_dict,
    trace_to_dict,
)


def comfortable_sizes() -> FrameSizes:
    surface = RenderSurface(
        per_eye=Resolution(1920, 1920),
        fov=FovSpec(120, 120, 12, 12),
        depth=BitDepth.from_bpc(8, "4:2:0"),
    )
    pixels = nb_pixels(surface)
    return FrameSizes(
        i_bits=frame_size(pixels, surface.depth, 0.15, 38),
        p_bits=frame_size(pixels, surface.depth, 0.15, 165),
    )


COMFORT_CFG = GopConfig(2.0, 90.0, redundancy_fraction=0.10)


class TestGenerateTrace:
    def test_comfortable_two_seconds(self):
        sizes = comfortable_sizes()
        trace = generate_trace(sizes, COMFORT_CFG, 2.0)
        assert len(trace) == 180
        types = [r.frame_type for r in trace]
        assert types.count("I") == 1
        assert types.count("P") == 179
        # average rate of the recorded (redundancy-inflated, rounded) payload
        # matches the closed form up to half a bit per frame
        closed = gop_bitrate(sizes, 1, 179, COMFORT_CFG).bps
        bound = 0.5 * len(trace) / 2.0
        assert abs(trace.total_bits / 2.0 - closed) <= bound

    def test_all_iframe_gop(self):
        cfg = GopConfig(1.0, 1.0, redundancy_fraction=0.0)
        trace = generate_trace(FrameSizes(1000, 10), cfg, 5.0)
        assert [r.frame_type for r in trace] == ["I"] * 5
        assert [r.gop_index for r in trace] == list(range(5))

    def test_ten_seconds_at_72(self):
        cfg = GopConfig(2.0, 72.0, redundancy_fraction=0.0)
        trace = generate_trace(FrameSizes(1000, 10), cfg, 10.0)
        assert len(trace) == 720
        i_indices = [r.index for r in trace if r.frame_type == "I"]
        assert i_indices == [0, 144, 288, 432, 576]

    def test_timestamps_follow_fps(self):
        trace = generate_trace(FrameSizes(100, 10), GopConfig(1.0, 90.0), 1.0)
        for record in trace:
            assert record.t_gen == pytest.approx(record.index * 1000.0 / 90.0, rel=1e-12)

    def test_b_pattern_requires_b_size(self):
        cfg = GopConfig(1.0, 12.0, pattern="IBBP")
        with pytest.raises(ConfigError):
            generate_trace(FrameSizes(1000, 100), cfg, 1.0)
        trace = generate_trace(FrameSizes(1000, 100, b_bits=10), cfg, 1.0)
        assert [r.frame_type for r in trace][:4] == ["I", "B", "B", "P"]

    def test_nonpositive_duration_rejected(self):
        with pytest.raises(DomainError):
            generate_trace(FrameSizes(100, 10), COMFORT_CFG, 0.0)

    def test_sizes_inflated_by_redundancy(self):
        cfg = GopConfig(1.0, 2.0, redundancy_fraction=0.10)
        trace = generate_trace(FrameSizes(1000, 500), cfg, 1.0)
        assert trace.records[0].size_bits == 1100
        assert trace.records[1].size_bits == 550

    def test_jitter_hook_defaults_off(self):
        cfg = GopConfig(1.0, 10.0)
        a = generate_trace(FrameSizes(1000, 500), cfg, 1.0)
        b = generate_trace(FrameSizes(1000, 500), cfg, 1.0)
        assert [r.size_bits for r in a] == [r.size_bits for r in b]
        jittered = generate_trace(FrameSizes(1000, 500), cfg, 1.0, size_jitter=0.2, jitter_seed=1)
        assert [r.size_bits for r in jittered] != [r.size_bits for r in a]


class TestPacketize:
    def test_single_full_packet(self):
        cfg = GopConfig(1.0, 1.0, redundancy_fraction=0.0)
        trace = generate_trace(FrameSizes(11680, 1), cfg, 1.0)
        packets = packetize(trace, 11680)
        assert len(packets) == 1
        assert packets[0].size_bits == 11680

    def test_comfortable_iframe_packet_count(self):
        # ceil-division oracle on the redundancy-inflated worked I-frame
        inflated = round(3_920_114 * 1.1)
        cfg = GopConfig(1.0, 1.0, redundancy_fraction=0.10)
        trace = generate_trace(FrameSizes(3_920_114, 1), cfg, 1.0)
        packets = packetize(trace, 11680)
        assert len(packets) == math.ceil(inflated / 11680) == 370

    def test_empty_trace(self):
        assert packetize([], 11680) == []

    def test_zero_mtu_rejected(self):
        with pytest.raises(DomainError):
            packetize([], 0)

    @settings(max_examples=150, deadline=None)
    @given(
        i_bits=st.integers(min_value=1, max_value=500_000),
        p_bits=st.integers(min_value=1, max_value=100_000),
        mtu=st.integers(min_value=256, max_value=20_000),
        frames=st.integers(min_value=1, max_value=20),
    )
    def test_bit_conservation(self, i_bits, p_bits, mtu, frames):
        from itertools import groupby

        cfg = GopConfig(max(1.0, frames / 10.0), 10.0, redundancy_fraction=0.10)
        trace = generate_trace(FrameSizes(i_bits, p_bits), cfg, frames / 10.0)
        packets = packetize(trace, mtu)
        sizes_by_frame = {
            index: [p.size_bits for p in group]
            for index, group in groupby(packets, key=lambda p: p.frame_index)
        }
        for record in trace:
            frame_sizes = sizes_by_frame[record.index]
            assert sum(frame_sizes) == record.size_bits
            assert all(size == mtu for size in frame_sizes[:-1])
            assert frame_sizes[-1] <= mtu


class TestExport:
    def test_csv_shape(self):
        trace = generate_trace(comfortable_sizes(), COMFORT_CFG, 2.0)
        text = trace_csv_text(trace)
        lines = text.split("\n")
        assert lines[0] == "frame_index,t_gen_ms,frame_type,size_bits,gop_index"
        assert len(lines) == 182  # header + 180 rows + trailing newline
        assert lines[-1] == ""
        first = lines[1].split(",")
        assert first[0] == "0" and first[2] == "I"
        # t_gen carries exactly three decimals; other numerics parse as ints
        assert first[1] == "0.000"
        assert lines[2].split(",")[1] == "11.111"
        int(first[3]), int(first[4])

    def test_csv_round_trip(self):
        trace = generate_trace(FrameSizes(5000, 600), GopConfig(1.0, 30.0), 1.0)
        text = trace_csv_text(trace)
        records = load_trace_csv(io.StringIO(text))
        assert len(records) == len(trace)
        for loaded, original in zip(records, trace):
            assert loaded.index == original.index
            assert loaded.frame_type == original.frame_type
            assert loaded.size_bits == original.size_bits
            assert loaded.gop_index == original.gop_index
            assert loaded.t_gen == pytest.approx(original.t_gen, abs=5e-4)

    def test_json_round_trip_identity(self):
        trace = generate_trace(FrameSizes(5000, 600), GopConfig(1.0, 30.0, pattern="IPP"), 1.5)
        buffer = io.StringIO()
        export_trace(trace, "json", buffer)
        loaded = load_trace_json(io.StringIO(buffer.getvalue()))
        assert loaded == trace

    def test_dict_round_trip(self):
        trace = generate_trace(FrameSizes(100, 10, b_bits=5), GopConfig(1.0, 12.0, pattern="IBBP"), 1.0)
        assert trace_from_dict(trace_to_dict(trace)) == trace

    def test_deterministic_bytes(self):
        trace_a = generate_trace(comfortable_sizes(), COMFORT_CFG, 2.0)
        trace_b = generate_trace(comfortable_sizes(), COMFORT_CFG, 2.0)
        assert trace_csv_text(trace_a) == trace_csv_text(trace_b)
        buf_a, buf_b = io.StringIO(), io.StringIO()
        export_trace(trace_a, "json", buf_a)
        export_trace(trace_b, "json", buf_b)
        assert buf_a.getvalue() == buf_b.getvalue()

    def test_packets_csv(self):
        trace = generate_trace(FrameSizes(25000, 1000), GopConfig(1.0, 2.0, redundancy_fraction=0.0), 1.0)
        packets = packetize(trace, 11680)
        buffer = io.StringIO()
        export_packets(packets, "csv", buffer)
        lines = buffer.getvalue().split("\n")
        assert lines[0] == "frame_index,packet_index,size_bits,t_ready_ms"
        assert len(lines) == 2 + len(packets)

    def test_unknown_format(self):
        trace = generate_trace(FrameSizes(100, 10), GopConfig(1.0, 2.0), 1.0)
        with pytest.raises(DomainError):
            export_trace(trace, "xml", io.StringIO())

    def test_file_destination(self, tmp_path):
        trace = generate_trace(FrameSizes(100, 10), GopConfig(1.0, 2.0), 1.0)
        path = tmp_path / "trace.csv"
        export_trace(trace, "csv", path)
        assert load_trace_csv(path)[0].size_bits == trace.records[0].size_bits
        json_path = tmp_path / "trace.json"
        export_trace(trace, "json", json_path)
        assert load_trace_json(json_path) == trace


@settings(max_examples=100)
@given(
    fps=st.sampled_from([24.0, 30.0, 60.0, 72.0, 90.0, 120.0]),
    gops=st.integers(min_value=1, max_value=4),
    gop_frames=st.integers(min_value=1, max_value=30),
    i_bits=st.integers(min_value=1000, max_value=5_000_000),
    ratio=st.floats(min_value=1.0, max_value=20.0),
    redundancy=st.floats(min_value=0.0, max_value=0.4),
)
def test_trace_rate_matches_gop_bitrate_for_full_gops(fps, gops, gop_frames, i_bits, ratio, redundancy):
    gop_time = gop_frames / fps
    cfg = GopConfig(gop_time, fps, redundancy_fraction=redundancy)
    sizes = FrameSizes(i_bits, max(1.0, i_bits / ratio))
    duration = gops * gop_time
    trace = generate_trace(sizes, cfg, duration)
    assert len(trace) == gops * gop_frames
    closed = gop_bitrate(sizes, 1, gop_frames - 1, cfg).bps
    # integer rounding of each frame perturbs the total by at most half a bit per frame
    bound = 0.5 * len(trace) / duration + 1e-6
    assert abs(trace.total_bits / duration - closed) <= bound
