# Copyright 2026 The TTKS Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Smoke tests for the python module: every exposed surface does something."""

import json
import random

import pytest

import ttks


def make_gray(width, height, seed=7):
    rng = random.Random(seed)
    pixels = bytes(rng.randrange(256) for _ in range(width * height))
    return ttks.Image(width, height, "gray", pixels)


def test_quantization_scalars():
    qp = ttks.QuantParams(scale=1.0 / 255.0, zero_point=-128)
    assert ttks.quantize(0.0, qp) == -128
    assert ttks.quantize(1.0, qp) == 127
    # The scale is stored as a float, so compare at float precision.
    assert abs(ttks.dequantize(0, qp) - 128.0 / 255.0) < 1e-6

    mult, shift = ttks.derive_requant(0.05, 0.01, 0.05)
    assert 2**30 <= mult < 2**31
    # A zero accumulator lands exactly on the output zero point.
    assert ttks.requantize(0, mult, shift, 3) == 3


def test_image_ops_roundtrip(tmp_path):
    rgb = ttks.Image(4, 2, "rgb", bytes(range(24)))
    gray = ttks.rgb_to_gray(rgb)
    assert gray.format == "gray"
    assert gray.width == 4 and gray.height == 2

    crop = ttks.center_crop(make_gray(10, 6), 6)
    assert crop.width == 6 and crop.height == 6

    small = ttks.resize_bilinear(make_gray(8, 8), 4, 4)
    assert small.width == 4 and small.height == 4

    path = str(tmp_path / "frame.pgm")
    ttks.write_ppm(make_gray(5, 3), path)
    back = ttks.read_ppm(path)
    assert back.pixels == make_gray(5, 3).pixels


def test_model_container_roundtrip(tmp_path):
    model = ttks.build_reference_model(seed=1)
    assert model.params == 84946
    assert model.macs == 5609152
    assert model.arena_peak_bytes == 110592
    assert model.arena_peak_bytes <= ttks.ARENA_BUDGET_BYTES
    ok, message = model.validate()
    assert ok, message

    blob = model.encode()
    again = ttks.decode_model(blob)
    assert again.encode() == blob

    path = str(tmp_path / "m.ttks")
    model.save(path)
    loaded = ttks.load_model(path)
    assert loaded.encode() == blob

    with pytest.raises(ttks.DecodeError):
        ttks.decode_model(b"TTKS" + b"\x00" * 10)


def test_engine_predicts_inside_screen():
    eng = ttks.make_engine(ttks.build_reference_model(seed=2), name="py")
    assert eng.name == "py"
    est = eng.predict(make_gray(320, 240))
    assert -10.0 <= est.x_cm <= 10.0
    assert -10.0 <= est.y_cm <= 10.0
    assert eng.last_inference_micros == est.inference_micros

    # Same frame, same model: bit-identical estimate.
    est2 = eng.predict(make_gray(320, 240))
    assert (est.x_cm, est.y_cm, est.raw_x, est.raw_y) == (
        est2.x_cm,
        est2.y_cm,
        est2.raw_x,
        est2.raw_y,
    )


def test_bench_json_report():
    eng = ttks.make_engine(ttks.build_reference_model(seed=1), name="bench")
    frames = [make_gray(320, 240, seed=s) for s in range(3)]
    doc = json.loads(
        ttks.bench_json(eng, frames, iterations=4, warmup=1,
                        clock_hz=1.56e8, fixed_step_micros=500)
    )
    assert doc["model"] == "bench"
    assert doc["macs"] == 5609152
    assert doc["end_to_end"]["mean_ms"] == pytest.approx(1.5)
    assert doc["inference"]["mean_ms"] == pytest.approx(0.5)
    assert doc["mac_per_cycle"] == pytest.approx(
        doc["macs"] / (0.0005 * 1.56e8)
    )


def test_wire_codecs():
    payload = b"\x01\x02\x03"
    msg = ttks.encode_message(ttks.FRAME, payload)
    assert msg[0] == 0xA5
    assert ttks.crc16(b"123456789") == 0x29B1

    events = ttks.decode_messages(b"junk" + msg)
    kinds = [e for e in events if isinstance(e, tuple)]
    diags = [e for e in events if isinstance(e, str)]
    assert kinds == [(ttks.FRAME, payload)]
    assert "garbage" in " ".join(diags)

    frame = make_gray(6, 4)
    fp = ttks.encode_frame_payload(frame)
    assert len(fp) == 5 + 24
