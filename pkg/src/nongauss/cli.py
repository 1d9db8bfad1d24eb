"""Command-line front end: build states, apply channels, compute measures and
bounds, run the distillation protocols, and emit per-figure CSV datasets.

Exit codes: 0 success, 2 argument error, 3 numerical-validity error,
4 truncation/resource error.  With --json-errors a machine-readable error
object is printed to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import config
from .channels import ChannelSpec, apply_channel
from .distillation import (b_protocol_run, browne_state, log_negativity,
                           t_protocol_output)
from .errors import ArgumentError, NonGaussError
from .fock import DensityMatrix, FockStateVector, as_density, purity, von_neumann_entropy
from .figures import build_figure
from .gaussian import moments
from .measures import QuadratureGrid, delta_a, delta_b, delta_c
from .states import (PNESSpec, cat, coherent, diagonal_mixture, fock,
                     fock_superposition, pnes, squeezed_vacuum, thermal, vacuum)

DEFAULT_CUTOFF = 40


# ---------------------------------------------------------------------------
# state and channel mini-language
# ---------------------------------------------------------------------------

def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise ArgumentError(f"cannot parse complex number {text!r}") from None


def parse_state(spec: str, cutoff: int):
    """fock:N | coherent:A | thermal:N | squeezed:R[,PHI] | cat:A,PHI | psi:N,K |
    vacuum | poisson:LAM | pnes:FAMILY:X | browne:V:LAM | path to a state JSON."""
    if spec.startswith("@") or spec.endswith(".json"):
        path = Path(spec.lstrip("@"))
        if not path.exists():
            raise ArgumentError(f"state file {path} not found")
        return _state_from_json(path.read_text())
    name, _, rest = spec.partition(":")
    args = rest.split(",") if rest else []
    try:
        if name == "vacuum":
            return vacuum(cutoff)
        if name == "fock":
            return fock(int(args[0]), cutoff)
        if name == "coherent":
            return coherent(_parse_complex(args[0]), cutoff)
        if name == "thermal":
            return thermal(float(args[0]), cutoff)
        if name == "squeezed":
            phi = float(args[1]) if len(args) > 1 else 0.0
            return squeezed_vacuum(float(args[0]), cutoff, phi)
        if name == "cat":
            return cat(_parse_complex(args[0]), float(args[1]), cutoff)
        if name == "psi":
            return fock_superposition(int(args[0]), int(args[1]), cutoff)
        if name == "poisson":
            lam = float(args[0])
            n = np.arange(max(4 * cutoff, 256))
            from scipy.special import gammaln
            w = np.exp(n * math.log(lam) - lam - gammaln(n + 1)) if lam > 0 else None
            if w is None:
                return vacuum(cutoff).density()
            return diagonal_mixture(w / w.sum(), cutoff)
        if name == "pnes":
            family, _, param = rest.partition(":")
            return pnes(PNESSpec(family, float(param), cutoff))
        if name == "browne":
            variant, _, lam = rest.partition(":")
            return browne_state(variant, float(lam), min(cutoff, 8))
    except (IndexError, ValueError) as exc:
        raise ArgumentError(f"malformed state spec {spec!r}: {exc}") from None
    raise ArgumentError(f"unknown state family {name!r}")


def _state_from_json(text: str):
    obj = json.loads(text)
    dim = int(obj["cutoff"]) ** int(obj["modes"])
    if len(obj["re"]) == dim:
        return FockStateVector.from_json(text)
    if len(obj["re"]) == dim * dim:
        return DensityMatrix.from_json(text)
    raise ArgumentError("state JSON length matches neither a vector nor a matrix")


def parse_channel(spec: str) -> ChannelSpec:
    """loss:ETA | phasediff:DELTA | kerr:GAMMA | displace:ALPHA | squeeze:R[,PHI]
    | beamsplit:THETA[,M0,M1]"""
    name, _, rest = spec.partition(":")
    args = rest.split(",") if rest else []
    try:
        if name == "loss":
            return ChannelSpec.loss(float(args[0]))
        if name in ("phasediff", "phase_diffusion"):
            return ChannelSpec.phase_diffusion(float(args[0]))
        if name == "kerr":
            return ChannelSpec.kerr(float(args[0]))
        if name == "displace":
            return ChannelSpec.gaussian_unitary("displace", _parse_complex(args[0]))
        if name == "squeeze":
            phi = float(args[1]) if len(args) > 1 else 0.0
            return ChannelSpec.gaussian_unitary("squeeze", float(args[0]), phi)
        if name == "beamsplit":
            theta = float(args[0]) if args else math.pi / 4
            ms = (int(args[1]), int(args[2])) if len(args) > 2 else (0, 1)
            return ChannelSpec.gaussian_unitary("beamsplit", theta, ms)
    except (IndexError, ValueError) as exc:
        raise ArgumentError(f"malformed channel spec {spec!r}: {exc}") from None
    raise ArgumentError(f"unknown channel {name!r}")


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _write_text(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _format_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _csv_text(meta: dict, header: list, rows: list) -> str:
    lines = ["# " + json.dumps(meta, sort_keys=True)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_format_cell(v) for v in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_state(args) -> int:
    state = parse_state(args.state, args.cutoff)
    if args.action == "build":
        _write_text(state.to_json(), args.out)
        return 0
    dm = as_density(state)
    g = moments(state) if state.modes <= 2 else None
    info = {
        "modes": state.modes,
        "cutoff": state.cutoff,
        "pure": isinstance(state, FockStateVector),
        "purity": purity(dm),
        "entropy_nats": von_neumann_entropy(dm),
        "mean_photons": dm.energy(),
        "leakage": dm.leakage,
    }
    if g is not None:
        info["X"] = g.X.tolist()
        info["sigma"] = g.sigma.tolist()
    _write_text(json.dumps(info, indent=2), args.out)
    return 0


def cmd_measure(args) -> int:
    state = parse_state(args.state, args.cutoff)
    base = 2 if args.log_base == "2" else None
    if args.which == "deltaA":
        rep = delta_a(state)
    elif args.which == "deltaB":
        rep = delta_b(state, base=base)
    else:
        grid = None
        if args.grid_half_width:
            grid = QuadratureGrid(args.grid_half_width, args.grid_spacing)
        elif args.grid_auto == "covering":
            grid = QuadratureGrid.covering(state, spacing=args.grid_spacing)
        rep = delta_c(state, grid=grid, base=base)
    print(f"{rep.value:.6f}")
    if args.out:
        Path(args.out).write_text(rep.to_json())
    return 0


def cmd_channel(args) -> int:
    state = parse_state(args.state, args.cutoff)
    spec = parse_channel(args.channel)
    out_state = apply_channel(state, spec)
    _write_text(out_state.to_json(), args.out)
    return 0


def cmd_protocol(args) -> int:
    if args.which == "browne":
        state = browne_state(args.variant, args.lam, args.protocol_cutoff)
        budget = None if args.leak_budget in (None, "none") else float(args.leak_budget)
        trace = b_protocol_run(state, args.steps, leak_budget=budget)
        _write_text(trace.to_csv(), args.out)
        return 0
    psi = t_protocol_output(args.r, args.subtracted)
    base = 2 if args.log_base == "2" else None
    meta = {"protocol": "taka", "r": args.r, "subtracted": args.subtracted,
            "cutoff": psi.cutoff}
    rows = [[args.r, args.subtracted, delta_b(psi, base=base).value,
             log_negativity(psi)]]
    _write_text(_csv_text(meta, ["r", "subtracted", "delta_B", "E_N"], rows), args.out)
    return 0


def cmd_bound(args) -> int:
    base = 2 if args.log_base == "2" else None
    which = args.which.upper()
    if which == "A":
        if args.hist:
            rows = []
            for line in Path(args.hist).read_text().splitlines():
                line = line.strip()
                if not line or line.startswith("#") or line.lower().startswith("m,"):
                    continue
                m, c = line.split(",")
                rows.append((int(m), float(c)))
            q = bounds_mod.histogram_to_distribution(rows)
        else:
            state = parse_state(args.state, args.cutoff)
            povm = bounds_mod.PhotodetectionPOVM(args.eta, state.cutoff)
            q = bounds_mod.detection_statistics(state, povm)
        value = bounds_mod.epsilon_a(q, base=base)
    else:
        state = parse_state(args.state, args.cutoff)
        if which == "B":
            value = bounds_mod.epsilon_b(state, base=base)
        elif which == "C":
            value = bounds_mod.epsilon_c(state, args.eta, base=base)
        elif which == "D":
            value = bounds_mod.epsilon_d(state, base=base)
        elif which == "E":
            value = bounds_mod.epsilon_e(state, args.eta, base=base)
        else:
            raise ArgumentError(f"unknown bound {args.which!r}; choose A..E")
    print(f"{value:.6f}")
    if args.out:
        Path(args.out).write_text(json.dumps({"bound": which, "value": value}))
    return 0


def cmd_figure(args) -> int:
    meta, header, rows = build_figure(args.number, seed=args.seed, threads=args.threads)
    _write_text(_csv_text(meta, header, rows), args.out)
    return 0


def _parse_param(text: str):
    name, _, value = text.partition("=")
    if not value:
        raise ArgumentError(f"malformed --param {text!r}; use name=value or name=lo:hi:count")
    if ":" in value:
        lo, hi, count = value.split(":")
        return name, np.linspace(float(lo), float(hi), int(count))
    return name, [float(value)]


def cmd_sweep(args) -> int:
    """Generic grid runner: a state family, swept parameters, one measure."""
    params = dict(_parse_param(p) for p in args.param)
    names = sorted(params)
    grids = [params[n] for n in names]
    mesh = [[]]
    for grid in grids:
        mesh = [m + [float(v)] for m in mesh for v in grid]

    base = 2 if args.log_base == "2" else None

    def spec_for(values):
        assign = dict(zip(names, values))
        if args.family in ("fock", "psi"):
            parts = [str(int(assign[k])) for k in names]
        else:
            parts = [f"{assign[k]!r}".strip("'") for k in names]
        return args.family + ":" + ",".join(parts)

    def run(values):
        state = parse_state(spec_for(values), args.cutoff)
        if args.measure == "deltaA":
            return delta_a(state).value
        if args.measure == "deltaB":
            return delta_b(state, base=base).value
        return delta_c(state, base=base).value

    from .figures import _parallel_map
    results = _parallel_map(run, mesh, args.threads)
    rows = [values + [val] for values, val in zip(mesh, results)]
    meta = {"family": args.family, "measure": args.measure, "seed": args.seed,
            "grid": {n: [float(v) for v in params[n]] for n in names}}
    _write_text(_csv_text(meta, names + [args.measure], rows), args.out)
    return 0


# ---------------------------------------------------------------------------
# parser plumbing
# ---------------------------------------------------------------------------

def _read_config_file(path: str) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _common_options() -> argparse.ArgumentParser:
    # accepted both before and after the subcommand; SUPPRESS keeps a value
    # set at one position from being clobbered by the other's default
    c = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    c.add_argument("--cutoff", type=int, help="per-mode Fock cutoff")
    c.add_argument("--tolerance-profile", choices=sorted(config.PROFILES),
                   help="numerical tolerance profile")
    c.add_argument("--log-base", choices=["nat", "2"],
                   help="entropy log base (default: natural)")
    c.add_argument("--seed", type=int, help="random seed")
    c.add_argument("--out", help="output path (default: stdout)")
    c.add_argument("--threads", type=int, help="worker pool size")
    c.add_argument("--config", help="key=value config file; flags win")
    c.add_argument("--json-errors", action="store_true",
                   help="emit machine-readable errors on stderr")
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    p = argparse.ArgumentParser(
        prog="nongauss",
        parents=[common],
        description="Non-Gaussianity measures, channels, protocols and bounds "
                    "for continuous-variable states in truncated Fock space.")

    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("state", help="build or inspect a state", parents=[common])
    sp.add_argument("action", choices=["build", "inspect"])
    sp.add_argument("--state", required=True)
    sp.set_defaults(fn=cmd_state)

    sp = sub.add_parser("measure", help="compute deltaA, deltaB or deltaC", parents=[common])
    sp.add_argument("which", choices=["deltaA", "deltaB", "deltaC"])
    sp.add_argument("--state", required=True)
    sp.add_argument("--grid-half-width", type=float, default=None)
    sp.add_argument("--grid-spacing", type=float, default=0.05)
    sp.add_argument("--grid-auto", choices=["default", "covering"], default="default")
    sp.set_defaults(fn=cmd_measure)

    sp = sub.add_parser("channel", help="apply a channel to a state", parents=[common])
    sp.add_argument("apply", choices=["apply"])
    sp.add_argument("--channel", required=True)
    sp.add_argument("--state", required=True)
    sp.set_defaults(fn=cmd_channel)

    sp = sub.add_parser("protocol", help="run a distillation protocol", parents=[common])
    sp.add_argument("which", choices=["browne", "taka"])
    sp.add_argument("--variant", choices=["a", "b"], default="a")
    sp.add_argument("--lam", type=float, default=0.5)
    sp.add_argument("--steps", type=int, default=10)
    sp.add_argument("--protocol-cutoff", type=int, default=8)
    sp.add_argument("--leak-budget", default="none",
                    help="accumulated leakage budget, or 'none'")
    sp.add_argument("--r", type=float, default=0.8)
    sp.add_argument("--subtracted", choices=["one", "two"], default="one")
    sp.set_defaults(fn=cmd_protocol)

    sp = sub.add_parser("bound", help="measurable lower bounds A..E", parents=[common])
    sp.add_argument("which", choices=list("ABCDE") + list("abcde"))
    sp.add_argument("--state", default=None)
    sp.add_argument("--hist", default=None, help="CSV of m,count rows (bound A)")
    sp.add_argument("--eta", type=float, default=1.0)
    sp.set_defaults(fn=cmd_bound)

    sp = sub.add_parser("figure", help="emit a figure dataset as CSV", parents=[common])
    sp.add_argument("number", type=int)
    sp.set_defaults(fn=cmd_figure)

    sp = sub.add_parser("sweep", help="generic grid runner over a state family", parents=[common])
    sp.add_argument("--family", required=True)
    sp.add_argument("--measure", choices=["deltaA", "deltaB", "deltaC"],
                    default="deltaB")
    sp.add_argument("--param", action="append", required=True,
                    help="name=value or name=lo:hi:count (repeatable)")
    sp.set_defaults(fn=cmd_sweep)
    return p


_GLOBAL_DEFAULTS = {"cutoff": DEFAULT_CUTOFF, "log_base": "nat", "seed": 0,
                    "threads": 1, "tolerance_profile": "default", "out": None}


def _apply_config(args: argparse.Namespace) -> None:
    file_cfg = _read_config_file(args.config) if getattr(args, "config", None) else {}
    for key, hard_default in _GLOBAL_DEFAULTS.items():
        if getattr(args, key, None) is None:
            if key in file_cfg:
                raw = file_cfg[key]
                cast = type(hard_default) if hard_default is not None else str
                setattr(args, key, cast(raw) if hard_default is not None else raw)
            else:
                setattr(args, key, hard_default)
    if not hasattr(args, "json_errors"):
        args.json_errors = False


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        config.use_profile(args.tolerance_profile)
        np.random.seed(args.seed)  # legacy consumers; library code uses Generators
        return args.fn(args)
    except NonGaussError as exc:
        if getattr(args, "json_errors", False):
            sys.stderr.write(json.dumps({
                "error": type(exc).__name__, "message": str(exc),
                "exit_code": exc.exit_code}) + "\n")
        else:
            sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
