"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 I/O or parse error.
"""

import argparse
import sys

import numpy as np

from .interreflect import DEFAULT_DISK_RADIUS
from .oracle import convolution_error_report, fit_error_report, format_csv, write_csv
from .renderer import RENDER_MODES, image_metrics, read_image, render, write_image
from .scene import SceneError, load_scene

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise UsageError(message)


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rectgloss", description="Rectangle-proxy glossy interreflection renderer")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("render", help="render a scene to a PPM image")
    r.add_argument("--scene", required=True)
    r.add_argument("--mode", required=True, choices=sorted(RENDER_MODES))
    r.add_argument("--out", required=True)
    r.add_argument("--disk-radius", type=float, default=DEFAULT_DISK_RADIUS)
    r.add_argument("--spp", type=int, default=4096)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--width", type=int)
    r.add_argument("--height", type=int)
    r.add_argument("--indirect-only", action="store_true")
    r.add_argument("--threads", type=int, default=1)

    c = sub.add_parser("compare", help="print error metrics between two PPM images as CSV")
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)

    s = sub.add_parser("study", help="approximation error studies (CSV output)")
    studies = s.add_subparsers(dest="study", required=True, parser_class=_Parser)
    f = studies.add_parser("fit-error", help="exact vs fitted disk integrand")
    f.add_argument("--sigma", type=float, required=True, help="light/normal angle, radians")
    f.add_argument("--roughness", type=float, required=True)
    f.add_argument("--samples", type=int, default=64)
    f.add_argument("--out", required=True)
    v = studies.add_parser("conv-error", help="SG x ASG convolution vs quadrature")
    v.add_argument("--lambdas", type=_floats, default=[10.0, 25.0, 50.0, 100.0, 200.0])
    v.add_argument("--out", required=True)
    return p


def _cmd_render(args):
    if args.spp < 1 or args.disk_radius <= 0:
        raise UsageError("--spp must be >= 1 and --disk-radius > 0")
    scene = load_scene(args.scene)
    changes = {k: getattr(args, k) for k in ("width", "height") if getattr(args, k) is not None}
    if changes:
        scene = scene.with_camera(**changes)
    img = render(scene, args.mode, disk_radius=args.disk_radius, spp=args.spp, seed=args.seed,
                 indirect_only=args.indirect_only, threads=args.threads)
    write_image(img, args.out)


def _cmd_compare(args):
    m = image_metrics(read_image(args.a), read_image(args.b))
    sys.stdout.write(format_csv(list(m), [tuple(m.values())]))


def _cmd_study(args):
    if args.study == "fit-error":
        if not (0 <= args.sigma < np.pi / 2 and 0 < args.roughness <= 1):
            raise UsageError("need 0 <= sigma < pi/2 and 0 < roughness <= 1")
        rows = fit_error_report(args.sigma, args.roughness, args.samples)
        write_csv(args.out, ["theta", "exact", "fitted"], rows)
    else:
        if any(v <= 0 for v in args.lambdas):
            raise UsageError("bandwidths must be positive")
        rows = convolution_error_report(args.lambdas)
        write_csv(args.out, ["lambda", "closed_form", "quadrature", "abs_error", "rel_error"], rows)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        {"render": _cmd_render, "compare": _cmd_compare, "study": _cmd_study}[args.command](args)
    except UsageError as exc:
        if str(exc) and not str(exc).startswith(("the following", "argument", "unrecognized")):
            print(f"rectgloss: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, SceneError, ValueError) as exc:
        print(f"rectgloss: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
