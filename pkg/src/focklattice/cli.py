"""Command-line front end.

Exit codes: 0 on success, 2 for invalid input (bad arguments, configs or
sizes beyond the cap), 1 when a computation fails or a requested check
does not hold.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .config import PRESETS, ConfigError, ScenarioConfig, load_config, preset
from .errors import FockLatticeError, ValidationError
from .evolution import ProbabilityTrace, parallel_walk, probability_trace, sector_mixture
from .fock import DEFAULT_CAP, enumerate_basis, occupation_label
from .graph import build_graph, export_graph, verify_isomorphism
from .lattice import LatticeSpec, build_hamiltonian
from .spectral import (
    benchmark_eigensystems,
    direct_diagonalize,
    multi_photon_eigensystem,
)


def fmt_float(x: float) -> str:
    return f"{float(x):.17g}"


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _emit(args, text: str) -> None:
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def trace_csv(trace: ProbabilityTrace) -> str:
    rows = [["z", *trace.labels()]]
    for z, probs in zip(trace.z, trace.probabilities):
        rows.append([fmt_float(z), *(fmt_float(p) for p in probs)])
    return _csv(rows)


def _format(args, default: str, allowed: Sequence[str]) -> str:
    fmt = args.format or default
    if fmt not in allowed:
        raise ValidationError(f"--format {fmt} is not supported by '{args.command}' (use {', '.join(allowed)})")
    return fmt


# lattice selection shared by several commands


def _broadcast(values, n: int, what: str) -> list[float]:
    values = list(values)
    if len(values) == 1:
        return values * n
    if len(values) != n:
        raise ValidationError(f"--{what} needs 1 or {n} values, got {len(values)}")
    return values


def load_lattice(args, default_modes: int | None = None) -> ScenarioConfig:
    """Scenario from --config, --preset or the inline --modes/--beta/--kappa/--random flags."""
    if args.modes is None and not (args.config or args.preset):
        args.modes = default_modes
    if args.config:
        cfg = load_config(args.config)
    elif args.preset:
        cfg = preset(args.preset)
    elif args.modes is not None:
        M = args.modes
        if M < 1:
            raise ValidationError(f"--modes must be >= 1, got {M}")
        if args.random is not None:
            rng = np.random.default_rng(args.random)
            beta = rng.uniform(-1.0, 1.0, M).tolist()
            coupling = rng.uniform(0.5, 1.5, M - 1).tolist()
        else:
            beta = _broadcast(args.beta or [0.0], M, "beta")
            coupling = _broadcast(args.kappa or [1.0], M - 1, "kappa") if M > 1 else []
        doc = {"modes": M, "beta": beta, "coupling": coupling}
        if getattr(args, "initial", None):
            doc["initial"] = list(args.initial)
        cfg = ScenarioConfig.from_dict(doc, source="command line")
    else:
        raise ValidationError("choose a lattice with --config, --preset or --modes")
    return cfg


def resolve_config(args, need_initial: bool = False) -> ScenarioConfig:
    cfg = load_lattice(args)
    if getattr(args, "photons", None) is not None:
        if cfg.initial is not None and cfg.photons != args.photons:
            raise ValidationError(f"--photons {args.photons} disagrees with the initial state ({cfg.photons} photons)")
        cfg.photons = args.photons
    if need_initial and cfg.initial is None:
        raise ConfigError("an initial state is required (config 'initial' or --initial)")
    if cfg.photons is None:
        raise ValidationError("photon number unknown; pass --photons or give an initial state")
    return cfg


# commands


def cmd_basis(args) -> int:
    basis = enumerate_basis(args.photons, args.modes, args.cap)
    fmt = _format(args, "csv", ("csv", "json"))
    if fmt == "csv":
        text = _csv([["nu", "K", "occupations"], *[[nu, K, occupation_label(s)] for nu, K, s in basis.entries()]])
    else:
        text = _json(
            {
                "photons": basis.N,
                "modes": basis.M,
                "dimension": len(basis),
                "states": [{"nu": nu, "K": K, "occupations": list(s)} for nu, K, s in basis.entries()],
            }
        )
    _emit(args, text)
    return 0


def cmd_hamiltonian(args) -> int:
    cfg = resolve_config(args)
    H = build_hamiltonian(cfg.photons, cfg.spec(), args.cap)
    fmt = _format(args, "csv", ("csv", "json"))
    keys = list(H.basis.keys)
    if args.dense:
        dense = H.dense()
        if fmt == "csv":
            text = _csv([["K", *keys], *[[K, *(fmt_float(v) for v in row)] for K, row in zip(keys, dense)]])
        else:
            text = _json({"photons": H.N, "modes": H.spec.M, "dimension": H.dim, "K": keys, "matrix": dense.tolist()})
    elif fmt == "csv":
        text = _csv([["mu", "nu", "value"], *[[mu, nu, fmt_float(v)] for mu, nu, v in H.entries]])
    else:
        text = _json(
            {
                "photons": H.N,
                "modes": H.spec.M,
                "dimension": H.dim,
                "K": keys,
                "entries": [{"mu": mu, "nu": nu, "value": v} for mu, nu, v in H.entries],
            }
        )
    _emit(args, text)
    return 0


def run_evolution(cfg: ScenarioConfig, out: str | None, cap: int | None) -> int:
    basis = enumerate_basis(cfg.photons, cfg.modes, cap)
    psi0 = cfg.initial_state(basis)
    eig = multi_photon_eigensystem(cfg.photons, cfg.spec(), cap)
    text = trace_csv(probability_trace(psi0, cfg.z_grid(), eig))
    out = out or cfg.outputs.get("trace")
    if not out:
        sys.stdout.write(text)
        return 0
    write_atomic(out, text)
    manifest_path = cfg.outputs.get("manifest") or f"{out}.manifest.json"
    manifest = {
        "version": __version__,
        "config": cfg.to_dict(),
        "photons": cfg.photons,
        "modes": cfg.modes,
        "dimension": len(basis),
        "trace": os.path.basename(out),
        "sha256": hashlib.sha256(text.encode()).hexdigest(),
    }
    write_atomic(manifest_path, _json(manifest))
    return 0


def cmd_evolve(args) -> int:
    _format(args, "csv", ("csv",))
    return run_evolution(resolve_config(args, need_initial=True), args.out, args.cap)


def cmd_scenario(args) -> int:
    _format(args, "csv", ("csv",))
    return run_evolution(preset(args.name), args.out, args.cap)


def cmd_graph(args) -> int:
    M = args.modes
    coupling = _broadcast(args.kappa or [1.0], M - 1, "kappa") if M > 1 else []
    graph = build_graph(args.photons, LatticeSpec.chain(coupling, [0.0] * M), args.cap)
    fmt = _format(args, "dot", ("dot", "json"))
    _emit(args, export_graph(graph, fmt))
    if args.check_isomorphism:
        report = verify_isomorphism(args.photons, M, args.cap)
        sys.stdout.write(_json(report.to_dict()))
        if not report.isomorphic:
            print(f"error: (N={args.photons}, M={M}) is not isomorphic to its partner", file=sys.stderr)
            return 1
    return 0


def cmd_eigen(args) -> int:
    cfg = resolve_config(args)
    spec = cfg.spec()
    N = cfg.photons
    fmt = _format(args, "csv", ("csv", "json"))
    basis = enumerate_basis(N, spec.M, args.cap)
    labels = basis.labels()
    deviation = None
    if args.method == "product":
        eig = multi_photon_eigensystem(N, spec, args.cap)
        values, vectors = eig.eigenvalues, eig.vectors
        if args.compare:
            direct, _ = direct_diagonalize(build_hamiltonian(N, spec, args.cap))
            deviation = float(np.max(np.abs(eig.sorted_spectrum() - direct)))
        rows = [
            {"nu": p + 1, "K": K, "occupations": list(occ), "eigenvalue": float(lam)}
            for p, (K, occ, lam) in enumerate(zip(eig.keys, eig.occupations, values))
        ]
    else:
        values, vectors = direct_diagonalize(build_hamiltonian(N, spec, args.cap))
        if args.compare:
            product = multi_photon_eigensystem(N, spec, args.cap)
            deviation = float(np.max(np.abs(product.sorted_spectrum() - values)))
        rows = [{"nu": p + 1, "eigenvalue": float(lam)} for p, lam in enumerate(values)]
    if args.vectors:
        for p, row in enumerate(rows):
            row["vector"] = vectors[:, p].tolist()
    if fmt == "json":
        doc = {"photons": N, "modes": spec.M, "method": args.method, "eigenstates": rows}
        if deviation is not None:
            doc["spectrum_max_abs_diff"] = deviation
        text = _json(doc)
    else:
        header = ["nu", "K", "occupations", "eigenvalue"] if args.method == "product" else ["nu", "eigenvalue"]
        if args.vectors:
            header += [f"c_{label}" for label in labels]
        table = [header]
        for row in rows:
            line = [row["nu"]]
            if args.method == "product":
                line += [row["K"], occupation_label(row["occupations"])]
            line.append(fmt_float(row["eigenvalue"]))
            if args.vectors:
                line += [fmt_float(c) for c in row["vector"]]
            table.append(line)
        if deviation is not None:
            table.append(["# spectrum_max_abs_diff", fmt_float(deviation)])
        text = _csv(table)
    _emit(args, text)
    return 0


def cmd_bench(args) -> int:
    _format(args, "json", ("json",))
    M = args.modes
    if args.seed is not None:
        rng = np.random.default_rng(args.seed)
        spec = LatticeSpec.chain(rng.uniform(0.5, 1.5, M - 1), rng.uniform(-1.0, 1.0, M))
    else:
        spec = LatticeSpec.uniform_chain(M)
    report = benchmark_eigensystems(args.photons, spec, args.repeats, args.cap)
    _emit(args, _json(report.to_dict()))
    return 0


def cmd_mixture(args) -> int:
    _format(args, "csv", ("csv",))
    spec = load_lattice(args, default_modes=2).spec()
    try:
        parameter = complex(args.param.replace(" ", ""))
    except ValueError as exc:
        raise ValidationError(f"--param must be a complex number like 0.5+0.2j, got {args.param!r}") from exc
    injection = tuple(args.inject) if args.inject else None
    mixture = sector_mixture(args.kind, parameter, args.threshold, spec.M, injection)
    z = np.linspace(0.0, args.z_max, args.steps + 1)
    walks = parallel_walk(mixture, spec, z, args.cap)
    out_dir = Path(args.out or "mixture")
    sectors = []
    for walk, sector in zip(walks, sorted(mixture.sectors, key=lambda s: s.photons)):
        entry = {
            "photons": walk.photons,
            "weight": walk.weight,
            "initial": list(sector.initial) if sector.initial else None,
            "trace": None,
        }
        if walk.trace is not None:
            name = f"sector_N{walk.photons}.csv"
            text = trace_csv(walk.trace)
            write_atomic(out_dir / name, text)
            entry["trace"] = name
            entry["sha256"] = hashlib.sha256(text.encode()).hexdigest()
        sectors.append(entry)
    manifest = {
        "version": __version__,
        "kind": mixture.kind,
        "parameter": [mixture.parameter.real, mixture.parameter.imag],
        "threshold": mixture.threshold,
        "tail": mixture.tail,
        "lattice": spec.to_dict(),
        "z_max": args.z_max,
        "steps": args.steps,
        "sectors": sectors,
    }
    write_atomic(out_dir / "weights.json", _json(manifest))
    return 0


# parser


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json", "dot"), default=argparse.SUPPRESS)
    common.add_argument("--cap", type=_positive_int, default=argparse.SUPPRESS, help="largest Fock-space dimension")

    lattice = argparse.ArgumentParser(add_help=False)
    lattice.add_argument("--config", help="JSON scenario file")
    lattice.add_argument("--preset", choices=sorted(PRESETS))
    lattice.add_argument("-M", "--modes", type=int)
    lattice.add_argument("--beta", type=float, nargs="+", help="propagation constants (1 or M values)")
    lattice.add_argument("--kappa", type=float, nargs="+", help="nearest-neighbour couplings (1 or M-1 values)")
    lattice.add_argument("--random", type=int, metavar="SEED", help="random chain with this seed")

    parser = argparse.ArgumentParser(prog="focklattice", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--out", default=None)
    parser.add_argument("--format", choices=("csv", "json", "dot"), default=None)
    parser.add_argument("--cap", type=_positive_int, default=DEFAULT_CAP)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", parents=[common], help="list the pseudo-energy ordered Fock basis")
    p.add_argument("-N", "--photons", type=int, required=True)
    p.add_argument("-M", "--modes", type=int, required=True)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("hamiltonian", parents=[common, lattice], help="effective N-photon Hamiltonian")
    p.add_argument("-N", "--photons", type=int)
    p.add_argument("--dense", action="store_true", help="dump the dense matrix instead of triplets")
    p.set_defaults(func=cmd_hamiltonian)

    p = sub.add_parser("evolve", parents=[common, lattice], help="probability trace of a propagating state")
    p.add_argument("-N", "--photons", type=int)
    p.add_argument("--initial", type=int, nargs="+", help="initial Fock state for --modes lattices")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("scenario", parents=[common], help="run a built-in figure preset")
    p.add_argument("name", choices=sorted(PRESETS))
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("graph", parents=[common], help="export a Fock graph")
    p.add_argument("-N", "--photons", type=int, required=True)
    p.add_argument("-M", "--modes", type=int, required=True)
    p.add_argument("--kappa", type=float, nargs="+", help="nearest-neighbour couplings (1 or M-1 values)")
    p.add_argument("--check-isomorphism", action="store_true", help="also verify the (M-1, N+1) partner graph")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("eigen", parents=[common, lattice], help="N-photon eigenvalues")
    p.add_argument("-N", "--photons", type=int)
    p.add_argument("--method", choices=("product", "direct"), default="product")
    p.add_argument("--compare", action="store_true", help="report the deviation from the other method")
    p.add_argument("--vectors", action="store_true", help="include coefficient vectors")
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("bench", parents=[common], help="time product construction against direct diagonalization")
    p.add_argument("-N", "--photons", type=int, required=True)
    p.add_argument("-M", "--modes", type=int, required=True)
    p.add_argument("--repeats", type=_positive_int, default=5)
    p.add_argument("--seed", type=int, help="random chain instead of the uniform kappa=1 chain")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("mixture", parents=[common, lattice], help="parallel walks of photon-number sectors")
    p.add_argument("--kind", choices=("coherent", "squeezed"), required=True)
    p.add_argument("--param", required=True, help="alpha (coherent) or xi (squeezed), e.g. 1 or 0.5+0.5j")
    p.add_argument("--threshold", type=float, default=1e-6, help="largest discarded sector weight")
    p.add_argument("--inject", type=int, nargs="+", help="injection waveguide(s), 1-based")
    p.add_argument("--z-max", type=float, default=2 * np.pi)
    p.add_argument("--steps", type=_positive_int, default=200)
    p.set_defaults(func=cmd_mixture)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FockLatticeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (np.linalg.LinAlgError, FloatingPointError, MemoryError) as exc:
        print(f"error: computation failed: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
