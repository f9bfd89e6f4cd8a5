"""Command-line interface: benchmarks, sample simulations, reports, fixtures.

The `markers` and `kernels` subcommands emit deterministic artifacts (PPM
images, JSON reference vectors) that external implementations can diff
against without importing this package.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__, rng
from .bench import BenchConfig, BenchMode, parse_resolution, run_benchmark
from .errors import VizError
from .markers import MarkerStyle, marker_coverage, marker_coverage_outlined, marker_sdf
from .samples import (
    CellSet,
    PottsState,
    breathe_deform,
    compute_smooth_normals,
    load_obj,
    nbody_integrate,
    NBodyState,
    asset_path,
    potts_update,
    run_mesh,
    run_nbody,
    run_potts,
    vary_angle,
)
from .samples.nbody import init_bodies
from .bench import brownian_step, init_random_positions
from .views import MarkerShape, MarkerStyleKind


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--target-fps", type=float, default=0.0)
    parser.add_argument("--headless", action="store_true",
                        help="render off-screen (also via VIZ_HEADLESS=1)")
    parser.add_argument("--snapshot", metavar="PPM",
                        help="write the final frame as a binary P6 pixmap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gpuviz",
        description="Real-time visualization of shared device buffers: "
                    "benchmarks, samples, reports and reference fixtures.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="run the Brownian point-cloud benchmark")
    p.add_argument("--mode", choices=[m.value for m in BenchMode], default="sync")
    p.add_argument("--n", type=int, default=100_000, help="number of points")
    p.add_argument("--iters", type=int, default=300)
    p.add_argument("--resolution", default="fhd", help="fhd, qhd, uhd or <W>x<H>")
    p.add_argument("--sigma", type=float, default=0.002, help="step stddev")
    p.add_argument("--out", help="CSV file to append the result row to")
    p.add_argument("--device", type=int, help="device index (or VIZ_DEVICE_INDEX)")
    p.add_argument("--dump-shaders", action="store_true",
                   help="print resolved pipeline variant keys")
    _add_common(p)

    p = sub.add_parser("sample", help="run a sample simulation")
    ssub = p.add_subparsers(dest="sample", required=True)

    sp = ssub.add_parser("potts", help="q-state lattice Monte Carlo on voxels")
    sp.add_argument("--l", type=int, default=64, help="lattice side length")
    sp.add_argument("--q", type=int, default=9, help="number of spin states")
    sp.add_argument("--t", type=float, default=1.0, help="temperature")
    sp.add_argument("--iters", type=int, default=100)
    _add_common(sp)

    sp = ssub.add_parser("nbody", help="gravitational N-body with ping-pong buffers")
    sp.add_argument("--n", type=int, default=1024)
    sp.add_argument("--iters", type=int, default=200)
    sp.add_argument("--dt", type=float, default=0.016)
    sp.add_argument("--damping", type=float, default=0.995)
    sp.add_argument("--softening", type=float, default=0.1)
    _add_common(sp)

    sp = ssub.add_parser("mesh", help="breathing mesh: point cloud + wireframe")
    sp.add_argument("--obj", help="OBJ path; defaults to the bundled icosphere")
    sp.add_argument("--amplitude", type=float, default=0.2)
    sp.add_argument("--iters", type=int, default=90)
    _add_common(sp)

    p = sub.add_parser("report", help="render figures from a benchmark CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out-dir", default="report")

    p = sub.add_parser("markers", help="rasterize one marker to a PPM fixture")
    p.add_argument("--shape", choices=[s.value for s in MarkerShape], default="disc")
    p.add_argument("--style", choices=[s.value for s in MarkerStyleKind], default="filled")
    p.add_argument("--radius", type=float, default=20.0, help="pixels")
    p.add_argument("--linewidth", type=float, default=2.0)
    p.add_argument("--resolution", default="64x64")
    p.add_argument("--out", required=True, help="output PPM path")

    p = sub.add_parser("kernels", help="dump kernel reference vectors as JSON")
    p.add_argument("--kernel", choices=["brownian", "potts", "nbody", "breathe"],
                   required=True)
    p.add_argument("--n", type=int, default=256, help="points/bodies (brownian, nbody)")
    p.add_argument("--l", type=int, default=8, help="lattice side (potts)")
    p.add_argument("--q", type=int, default=4)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--iters", type=int, default=4)
    p.add_argument("--sigma", type=float, default=0.002)
    p.add_argument("--dt", type=float, default=0.016)
    p.add_argument("--damping", type=float, default=0.995)
    p.add_argument("--softening", type=float, default=0.1)
    p.add_argument("--amplitude", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output JSON path")

    return parser


# -- subcommand implementations -----------------------------------------------

def _cmd_bench(args) -> int:
    width, height = parse_resolution(args.resolution)
    if args.device is not None:
        os.environ["VIZ_DEVICE_INDEX"] = str(args.device)
    config = BenchConfig(
        n=args.n, iterations=args.iters, mode=BenchMode(args.mode),
        width=width, height=height, target_fps=args.target_fps,
        seed=args.seed, sigma=args.sigma, out_path=args.out,
        headless=args.headless or os.environ.get("VIZ_HEADLESS") == "1",
        snapshot=args.snapshot, dump_shaders=args.dump_shaders,
    )
    record = run_benchmark(config)
    print(f"{record.mode}: n={record.n} fps={record.measured_fps:.1f} "
          f"p50={record.frame_time_p50_ms:.2f}ms p99={record.frame_time_p99_ms:.2f}ms "
          f"elapsed={record.elapsed_total_s:.2f}s")
    return 0


def _cmd_sample(args) -> int:
    headless = args.headless or os.environ.get("VIZ_HEADLESS") == "1"
    if args.sample == "potts":
        result = run_potts(args.l, args.q, args.t, args.iters, seed=args.seed,
                           headless=headless, target_fps=args.target_fps,
                           snapshot=args.snapshot)
        print(f"potts: L={args.l} q={args.q} iterations={args.iters} "
              f"frames={result.counters.frames_presented}")
    elif args.sample == "nbody":
        result = run_nbody(args.n, args.iters, dt=args.dt, damping=args.damping,
                           softening=args.softening, seed=args.seed,
                           headless=headless, target_fps=args.target_fps,
                           snapshot=args.snapshot)
        print(f"nbody: n={args.n} iterations={args.iters} "
              f"frames={result.counters.frames_presented}")
    else:
        obj = args.obj or asset_path("icosphere.obj")
        result = run_mesh(obj, amplitude=args.amplitude, iterations=args.iters,
                          seed=args.seed, headless=headless,
                          target_fps=args.target_fps, snapshot=args.snapshot)
        print(f"mesh: {obj} iterations={args.iters} "
              f"frames={result.counters.frames_presented}")
    return 0


def _cmd_report(args) -> int:
    from .report import render_report_from_csv

    paths = render_report_from_csv(args.csv, args.out_dir)
    for path in paths:
        print(path)
    return 0


def _cmd_markers(args) -> int:
    """Shade one centered marker over a pixel grid and write it as P6.

    Pixel centers sit at integer + 0.5; the marker center is the image
    center, so the output depends only on shape, style, radius, linewidth
    and resolution - a stable fixture for external renderers.
    """
    width, height = parse_resolution(args.resolution)
    style = MarkerStyle(MarkerShape(args.shape), MarkerStyleKind(args.style),
                        args.linewidth, 1.0)
    ys, xs = np.mgrid[0:height, 0:width]
    px = (xs + 0.5) - width / 2.0
    py = (ys + 0.5) - height / 2.0
    sdf = marker_sdf(style.shape, px, py, np.full_like(px, args.radius, dtype=np.float64))
    if style.style is MarkerStyleKind.OUTLINED:
        fill, stroke = marker_coverage_outlined(sdf, style)
        # white fill under a black stroke, over a black background
        value = fill * (1.0 - stroke)
    else:
        value = marker_coverage(sdf, style)
    gray = np.clip(np.rint(value * 255.0), 0, 255).astype(np.uint8)
    with open(args.out, "wb") as fh:
        fh.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
        fh.write(np.repeat(gray[:, :, None], 3, axis=2).tobytes())
    print(args.out)
    return 0


def _cmd_kernels(args) -> int:
    if args.kernel == "brownian":
        positions = init_random_positions(args.seed, args.n)
        for i in range(args.iters):
            positions = brownian_step(positions, args.n, args.sigma, i, args.seed)
        payload = {
            "kernel": "brownian", "seed": args.seed, "n": args.n,
            "iters": args.iters, "sigma": args.sigma,
            "positions": positions.astype(float).tolist(),
        }
    elif args.kernel == "potts":
        state = PottsState(args.l, args.q, args.t, args.seed)
        initial = state.grid()
        for i in range(args.iters):
            state.white = potts_update(state, CellSet.WHITE, i)
            state.black = potts_update(state, CellSet.BLACK, i)
        payload = {
            "kernel": "potts", "seed": args.seed, "l": args.l, "q": args.q,
            "t": args.t, "iters": args.iters,
            "initial_grid": initial.astype(int).tolist(),
            "grid": state.grid().astype(int).tolist(),
        }
    elif args.kernel == "nbody":
        state = NBodyState(args.n, dt=args.dt, damping=args.damping,
                           softening_sq=args.softening ** 2, seed=args.seed)
        initial = state.positions[0].copy()
        for _ in range(args.iters):
            nbody_integrate(state)
            state.swap()
        payload = {
            "kernel": "nbody", "seed": args.seed, "n": args.n,
            "iters": args.iters, "dt": args.dt, "damping": args.damping,
            "softening": args.softening,
            "initial": initial.astype(float).tolist(),
            "positions": state.positions[state.read_index].astype(float).tolist(),
            "velocities": state.velocities.astype(float).tolist(),
        }
    else:
        mesh = load_obj(asset_path("icosphere.obj"))
        normals = compute_smooth_normals(mesh)
        degrees = 0.0
        vertices = mesh.vertices
        for _ in range(args.iters):
            scale, degrees = vary_angle(degrees, args.amplitude)
            vertices = breathe_deform(mesh.vertices, normals, scale)
        payload = {
            "kernel": "breathe", "iters": args.iters, "amplitude": args.amplitude,
            "rest": mesh.vertices.astype(float).tolist(),
            "normals": normals.astype(float).tolist(),
            "triangles": mesh.triangles.astype(int).tolist(),
            "vertices": vertices.astype(float).tolist(),
            "degrees": degrees,
        }
    with open(args.out, "w") as fh:
        json.dump(payload, fh)
    print(args.out)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "sample":
            return _cmd_sample(args)
        if args.command == "report":
            return _cmd_report(args)
        if args.command == "markers":
            return _cmd_markers(args)
        return _cmd_kernels(args)
    except VizError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
