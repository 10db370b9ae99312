"""Command-line surface for the capture / embed / extract / analyze flow.

Exit codes are a stable scripting contract:
  0  success
  1  usage error (bad flags, message too large)
  2  I/O or file-format error
  3  decode failure (uncorrectable data or CRC mismatch; wrong key lands here)
  4  analysis verdict "suspicious" while --fail-on-suspicious is set

Outputs are written atomically (temp file + rename), so no partial
artifact survives an error. Every run with fixed seeds is byte-reproducible.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import codec, pipeline, statcheck
from .camera import SensorConfig, capture, capture_pair, make_scene
from .codec import CodecError, DecodeError
from .imageio import PgmFormatError, read_pgm16, write_pgm16, write_report
from .statcheck import CalibrationError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are exit 1
        raise UsageError(message)


def _write_atomic(path: str, data: bytes) -> None:
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _read_file(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _load_image(path: str):
    return read_pgm16(_read_file(path))


def _add_scene_flags(p: _Parser) -> None:
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--pattern", choices=("flat", "gradient", "pcb"), default="flat")
    p.add_argument("--mean-level", type=float, default=10000.0)


def _add_sensor_flags(p: _Parser) -> None:
    p.add_argument("--full-well", type=int, default=50000)
    p.add_argument("--read-noise-sigma", type=float, default=0.0)
    p.add_argument("--exposure-jitter-fraction", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=1)


def _add_plan_flags(p: _Parser) -> None:
    p.add_argument("--parity-symbols", type=int, default=8)
    p.add_argument("--mixing-seed", type=int, default=1)
    p.add_argument("--block-pixels", type=int, default=1)
    p.add_argument("--full-well", type=int, default=50000,
                   help="full well used to derive the usable-pixel mask")


def build_parser() -> _Parser:
    parser = _Parser(prog="shotstego", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("capture", help="simulate a key/cover capture pair")
    _add_scene_flags(p)
    _add_sensor_flags(p)
    p.add_argument("--key-out", required=True)
    p.add_argument("--cover-out", required=True)

    p = sub.add_parser("embed", help="hide a message file in a stego image")
    p.add_argument("--key", required=True)
    p.add_argument("--cover", required=True)
    p.add_argument("--message", required=True, help="raw payload bytes")
    p.add_argument("--stego-out", required=True)
    _add_plan_flags(p)

    p = sub.add_parser("extract", help="recover the message with the key image")
    p.add_argument("--stego", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--message-out", required=True)
    _add_plan_flags(p)

    p = sub.add_parser("analyze", help="run the steganalysis battery")
    p.add_argument("--image", required=True)
    p.add_argument("--calibration", required=True)
    p.add_argument("--report-out", required=True)
    p.add_argument("--reference", default=None,
                   help="optional second capture of the same scene; enables "
                        "the pair statistics")
    p.add_argument("--fail-on-suspicious", action="store_true")

    p = sub.add_parser("demo-lsb", help="LSB-embed an image and dump paired "
                                        "histograms for comparison")
    p.add_argument("--image", required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--bin-width", type=int, default=1)

    p = sub.add_parser("calibrate", help="build battery null distributions "
                                         "from clean simulated captures")
    _add_scene_flags(p)
    _add_sensor_flags(p)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--bin-width", type=int, default=1)
    p.add_argument("--calibration-out", required=True)

    return parser


def _cmd_capture(args) -> int:
    scene = make_scene(args.width, args.height, args.pattern, args.mean_level)
    sensor = SensorConfig(full_well=args.full_well,
                          read_noise_sigma=args.read_noise_sigma,
                          exposure_jitter_fraction=args.exposure_jitter_fraction,
                          seed=args.seed)
    key, cover = capture_pair(scene, sensor)
    key_bytes, cover_bytes = write_pgm16(key), write_pgm16(cover)
    _write_atomic(args.key_out, key_bytes)
    _write_atomic(args.cover_out, cover_bytes)
    print(f"wrote {args.key_out} and {args.cover_out} "
          f"({args.width}x{args.height} {args.pattern})")
    return 0


def _cmd_embed(args) -> int:
    key = _load_image(args.key)
    cover = _load_image(args.cover)
    payload = _read_file(args.message)
    result = pipeline.embed_message(
        key, cover, payload,
        parity_symbols=args.parity_symbols, mixing_seed=args.mixing_seed,
        block_pixels=args.block_pixels, full_well=args.full_well)
    _write_atomic(args.stego_out, write_pgm16(result.stego_image))
    print(f"embedded {len(payload)} payload bytes "
          f"({result.plan.coded_length} coded) into {args.stego_out}")
    return 0


def _cmd_extract(args) -> int:
    stego_img = _load_image(args.stego)
    key = _load_image(args.key)
    payload = pipeline.extract_message(
        stego_img, key,
        parity_symbols=args.parity_symbols, mixing_seed=args.mixing_seed,
        block_pixels=args.block_pixels, full_well=args.full_well)
    _write_atomic(args.message_out, payload)
    print(f"recovered {len(payload)} bytes into {args.message_out}")
    return 0


def _cmd_analyze(args) -> int:
    img = _load_image(args.image)
    cal = statcheck.read_calibration(_read_file(args.calibration))
    reference = _load_image(args.reference) if args.reference else None
    report = statcheck.ward_test(img, cal, reference)
    _write_atomic(args.report_out, write_report(report))
    print(f"verdict: {report.verdict} (kl={report.kl_bits:.6g} bits, "
          f"chi2 p={report.chi2_pvalue:.6g})")
    if args.fail_on_suspicious and report.verdict == "suspicious":
        return 4
    return 0


def _cmd_demo_lsb(args) -> int:
    img = _load_image(args.image)
    bits = codec.keyed_filler_bits(img.pixel_count, args.seed)
    embedded = statcheck.lsb_embed(img, bits)
    region = statcheck.full_region(img)
    hist_clean = statcheck.histogram(img, region, args.bin_width)
    hist_lsb = statcheck.histogram(embedded, region, args.bin_width)
    _write_atomic(args.out_prefix + ".pgm", write_pgm16(embedded))
    _write_atomic(args.out_prefix + "-original-hist.csv",
                  statcheck.histogram_csv(hist_clean))
    _write_atomic(args.out_prefix + "-lsb-hist.csv",
                  statcheck.histogram_csv(hist_lsb))
    print(f"wrote {args.out_prefix}.pgm and paired histogram CSVs")
    return 0


def _cmd_calibrate(args) -> int:
    scene = make_scene(args.width, args.height, args.pattern, args.mean_level)
    sensor = SensorConfig(full_well=args.full_well,
                          read_noise_sigma=args.read_noise_sigma,
                          exposure_jitter_fraction=args.exposure_jitter_fraction,
                          seed=args.seed)
    cal = statcheck.build_calibration(scene, sensor, runs=args.runs,
                                      bin_width=args.bin_width)
    _write_atomic(args.calibration_out, statcheck.write_calibration(cal))
    print(f"calibrated {args.runs} runs -> {args.calibration_out}")
    return 0


_COMMANDS = {
    "capture": _cmd_capture,
    "embed": _cmd_embed,
    "extract": _cmd_extract,
    "analyze": _cmd_analyze,
    "demo-lsb": _cmd_demo_lsb,
    "calibrate": _cmd_calibrate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.subcommand](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except CodecError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (OSError, PgmFormatError, CalibrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DecodeError as exc:
        print(f"decode failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        # unsuitable inputs surfaced by the library (mismatched image
        # dimensions, region too small for a statistic, ...)
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
