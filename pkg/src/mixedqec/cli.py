"""Command-line entry point: ``mixedqec <command> [options]``."""
from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence

import numpy as np

from mixedqec import discord, serialize, tomography
from mixedqec.core import bloch_to_density, maximally_mixed, random_density_matrix
from mixedqec.qec import ErrorChannel, roundtrip
from mixedqec.verify import run_verification


def _vector(text: str) -> np.ndarray:
    try:
        v = np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")
    if v.shape != (3,):
        raise argparse.ArgumentTypeError("expected 3 comma-separated components")
    if np.linalg.norm(v) > 1 + 1e-9:
        raise argparse.ArgumentTypeError(f"|n| = {np.linalg.norm(v):.6g} exceeds 1")
    # absorb rounding overshoot of unit vectors
    return v / max(1.0, np.linalg.norm(v))


def _probabilities(text: str) -> ErrorChannel:
    if text == "uniform":
        return ErrorChannel.uniform()
    try:
        return ErrorChannel(tuple(float(x) for x in text.split(",")))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _grid(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a grid like 64x128, got {text!r}")
    if a < 2 or b < 2:
        raise argparse.ArgumentTypeError("grid dimensions must be at least 2")
    return a, b


def _noise(text: str) -> dict:
    """``0`` or ``depol=0.05,rot=0.01``."""
    if text in ("0", "none"):
        return {}
    out = {}
    for part in text.split(","):
        key, _, val = part.partition("=")
        if key not in ("depol", "rot") or not val:
            raise argparse.ArgumentTypeError(f"bad noise term {part!r}; use depol=P,rot=SIGMA")
        out[key] = float(val)
    return out


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_verify(args) -> int:
    checks = run_verification(args.seed, args.samples, args.flip_cnots)
    ok = all(c.passed for c in checks)
    _emit(serialize.dumps({"command": "verify", "passed": ok, "seed": args.seed, "checks": checks}), args.out)
    return 0 if ok else 1


def cmd_roundtrip(args) -> int:
    rho1 = bloch_to_density(args.n)
    if args.ancilla == "mixed":
        rho2 = maximally_mixed(2)
    elif args.ancilla == "pure00":
        rho2 = np.zeros((4, 4), dtype=complex)
        rho2[0, 0] = 1
    else:
        rho2 = random_density_matrix(2, np.random.default_rng(args.seed))
    rep = roundtrip(rho1, rho2, args.p)
    ok = rep.trace_distance <= 1e-10 and rep.ancilla_error <= 1e-10
    payload = {"command": "roundtrip", "n": args.n, "ancilla": args.ancilla, "passed": ok}
    payload.update(serialize.roundtrip_dict(rep))
    _emit(serialize.dumps(payload), args.out)
    return 0 if ok else 1


def cmd_discord(args) -> int:
    n = args.n / np.linalg.norm(args.n) if args.pure else args.n
    left = discord.left_discord(n, args.grid)
    right = discord.right_discord(n)
    payload = {
        "command": "discord",
        "n": n,
        "left": serialize.discord_dict(left),
        "right": serialize.discord_dict(right),
    }
    _emit(serialize.dumps(payload), args.out)
    return 0


def _emit_dataset(ds, kind: str, args) -> int:
    if args.format == "csv":
        _emit(serialize.dataset_csv(ds), args.out)
    else:
        _emit(serialize.dumps({"command": kind, **serialize.dataset_json(ds, kind)}), args.out)
    return 0


def cmd_discord_map(args) -> int:
    if args.grid[0] < discord.MIN_MAP_GRID[0] or args.grid[1] < discord.MIN_MAP_GRID[1]:
        raise SystemExit(_usage(args, f"grid must be at least {discord.MIN_MAP_GRID[0]}x{discord.MIN_MAP_GRID[1]}"))
    return _emit_dataset(discord.discord_map(args.grid), "discord-map", args)


def cmd_discord_surface(args) -> int:
    return _emit_dataset(discord.discord_surface(args.n, args.grid), "discord-surface", args)


def _channel(args) -> ErrorChannel:
    if args.channel == "custom":
        if args.p is None:
            raise SystemExit(_usage(args, "--channel custom requires --p"))
        return args.p
    return tomography.CHANNELS[args.channel]


def _noise_model(args) -> tomography.NoiseModel:
    return tomography.NoiseModel(
        depolarizing=args.noise.get("depol", 0.0),
        rotation_error=args.noise.get("rot", 0.0),
        seed=args.seed,
    )


def cmd_tomo(args) -> int:
    if args.grid[0] < 32 or args.grid[1] < 64:
        raise SystemExit(_usage(args, "mesh grid must be at least 32x64"))
    rep = tomography.tomography_experiment(_channel(args), _noise_model(args), args.grid)
    payload = {"command": "tomo", "label": args.channel, **serialize.tomography_dict(rep)}
    if args.channel in tomography.HARDWARE_REFERENCE:
        payload["hardware_reference"] = tomography.HARDWARE_REFERENCE[args.channel]
    _emit(serialize.dumps(payload), args.out)
    if args.mesh_out:
        _emit(serialize.mesh_csv(rep.mesh), args.mesh_out)
    return 0


def cmd_sphere_map(args) -> int:
    if args.grid[0] < 32 or args.grid[1] < 64:
        raise SystemExit(_usage(args, "mesh grid must be at least 32x64"))
    r = tomography.process_ptm(_channel(args), _noise_model(args))
    _emit(serialize.mesh_csv(tomography.sphere_mapping(r, args.grid)), args.out)
    return 0


def _usage(args, message: str) -> int:
    args._parser.print_usage(sys.stderr)
    print(f"{args._parser.prog}: error: {message}", file=sys.stderr)
    return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixedqec",
        description="Three-qubit QEC with maximally mixed ancillae: checks, discord and tomography datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func, _parser=p)
        p.add_argument("--out", "-o", help="output path (default stdout)")
        return p

    p = add("verify", cmd_verify, "run the invariant suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=200, help="random round-trip samples")
    p.add_argument("--flip-cnots", action="store_true", help="debug: swap control/target of both CNOTs")

    p = add("roundtrip", cmd_roundtrip, "encode, apply a channel, recover")
    p.add_argument("--n", type=_vector, default=np.array([0.0, 0.0, 1.0]), help="data Bloch vector x,y,z")
    p.add_argument("--p", type=_probabilities, default=ErrorChannel.uniform(), help="p0,p1,p2,p3 or 'uniform'")
    p.add_argument("--ancilla", choices=("mixed", "pure00", "random"), default="mixed")
    p.add_argument("--seed", type=int, default=0)

    p = add("discord", cmd_discord, "left and right discord of one codeword")
    p.add_argument("--n", type=_vector, required=True)
    p.add_argument("--pure", action="store_true", help="rescale --n to unit length")
    p.add_argument("--grid", type=_grid, default=discord.DEFAULT_GRID)

    for name, func, default in (
        ("discord-map", cmd_discord_map, "64x128"),
        ("discord-surface", cmd_discord_surface, "32x64"),
    ):
        p = add(name, func, f"{name} dataset")
        p.add_argument("--grid", type=_grid, default=_grid(default))
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if name == "discord-surface":
            p.add_argument("--n", type=_vector, required=True)

    for name, func in (("tomo", cmd_tomo), ("sphere-map", cmd_sphere_map)):
        p = add(name, func, "process tomography report" if name == "tomo" else "Bloch-sphere mesh CSV")
        p.add_argument("--channel", choices=("a", "b", "c", "custom"), default="a")
        p.add_argument("--p", type=_probabilities, help="probabilities for --channel custom")
        p.add_argument("--noise", type=_noise, default={}, help="0 or depol=P,rot=SIGMA")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--grid", type=_grid, default=(32, 64))
        if name == "tomo":
            p.add_argument("--mesh-out", help="also write the sphere mesh CSV here")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
