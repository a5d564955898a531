"""Command-line surface: model reports, Table-I reproduction, pulse sweeps.

JSON goes to stdout by default; tabular subcommands accept ``--csv PATH``
(RFC-4180 with a header row, floats at 12 significant digits). Flags win
over a ``--config`` JSON file, which wins over built-in defaults. The
environment variable ZENOFORGE_THREADS caps sweep workers.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .chain import allowed_spins, dfs_dimension, two_body
from .channels import gate_error_report
from .grape import (
    ControlSystem,
    Eps1Target,
    Eps2Target,
    PulseSchedule,
    SweepRow,
    gamma_sweep,
    optimize,
    propagate_schedule,
)
from .lie import dfs_lie_dimension, lie_closure
from .lindblad import (
    LindbladSpec,
    LindbladTerm,
    detect_dfs,
    dissipator_matrix,
    spec_from_json,
    steady_superprojector,
)
from .models import (
    HADAMARD,
    MODEL_NAMES,
    build_model,
    qubit2_reset_superop,
)
from .ops import Operator, expm, qubits
from .zeno import coherent_generator, strong_damping_error, zeno_product

__all__ = ["main"]


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _write_csv(path, header, rows):
    out = sys.stdout if path == "-" else open(path, "w", newline="")
    try:
        writer = csv.writer(out)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    finally:
        if out is not sys.stdout:
            out.close()


def _load_config(path):
    if not path:
        return {}
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ValueError("config file must hold a JSON object")
    return doc


def _merged(args, config, key, default):
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    return config.get(key, default)


def _model_from_args(name, n, gamma):
    if name == "ising-chain":
        kwargs = {}
        if n is not None:
            kwargs["n_qubits"] = n
        if gamma is not None:
            kwargs["gammas"] = (gamma, gamma, gamma)
        return build_model(name, **kwargs)
    if name == "n-level-atom":
        kwargs = {}
        if n is not None:
            kwargs["n_levels"] = n
            kwargs["gammas"] = (gamma if gamma is not None else 1.0,) * n
        elif gamma is not None:
            kwargs["gammas"] = (gamma,) * 3
        return build_model(name, **kwargs)
    kwargs = {} if gamma is None else {"gamma": gamma}
    return build_model(name, **kwargs)


def cmd_lie_dim(args) -> int:
    config = _load_config(args.config)
    name = _merged(args, config, "model", "ising-chain")
    n = _merged(args, config, "n", None)
    gamma = _merged(args, config, "gamma", None)
    desc = _model_from_args(name, n, gamma)
    report = dfs_lie_dimension(desc.spec, desc.controls)
    dim_nonoise = lie_closure(desc.controls).dim
    dim_dfs = (
        report.unital_dim
        if report.unital_dim is not None
        else sum(report.block_dims)
    )
    doc = {
        "dim_nonoise": dim_nonoise,
        "dim_dfs": dim_dfs,
        "block_dims": list(report.block_dims),
    }
    print(json.dumps(doc))
    return 0


def cmd_dfs(args) -> int:
    config = _load_config(args.config)
    name = _merged(args, config, "model", "two-qubit-amp")
    n = _merged(args, config, "n", None)
    gamma = _merged(args, config, "gamma", None)
    desc = _model_from_args(name, n, gamma)
    decomposition = detect_dfs(desc.spec.dissipative_part())
    blocks = [
        {
            "dim": b.dim,
            "lindblad_eigenvalues": [[z.real, z.imag] for z in b.lindblad_eigenvalues],
            "damping_eigenvalue": b.damping_eigenvalue,
        }
        for b in decomposition.blocks
    ]
    print(json.dumps({"model": name, "blocks": blocks}))
    return 0


def cmd_zeno_check(args) -> int:
    config = _load_config(args.config)
    name = _merged(args, config, "model", "two-qubit-amp")
    gamma = _merged(args, config, "gamma", 1.0)
    t = _merged(args, config, "t", 1.0)
    steps = _merged(args, config, "steps", "1,2,4,8,16,32,64,128,256")
    gammas = _merged(args, config, "gammas", "")
    desc = _model_from_args(name, None, gamma)
    diss = desc.spec.dissipative_part()
    projector = steady_superprojector(diss)
    generator = coherent_generator(desc.controls[0])
    target = (
        expm(projector.matrix @ generator.matrix @ projector.matrix * t)
        @ projector.matrix
    )
    zeno_rows = []
    for nstep in (int(v) for v in str(steps).split(",") if v):
        zp = zeno_product(projector, generator, t, nstep)
        zeno_rows.append([nstep, float(np.linalg.norm(zp.matrix - target, 2))])
    damping_rows = []
    for g in (float(v) for v in str(gammas).split(",") if v):
        scaled = build_model(name, gamma=g) if name.startswith("two-qubit") else None
        if scaled is None:
            raise ValueError("strong-damping check supports the two-qubit models")
        spec = LindbladSpec(desc.controls[0], scaled.spec.terms)
        damping_rows.append([g, strong_damping_error(spec, 1.0, t)])
    doc = {
        "model": name,
        "t": t,
        "zeno_error": [[n, _fmt(e)] for n, e in zeno_rows],
        "strong_damping_error": [[g, _fmt(e)] for g, e in damping_rows],
    }
    print(json.dumps(doc))
    return 0


def _chain_dfs_lie_dim(n: int) -> int:
    """dim of the projected-control Lie algebra; degenerate rows for n < 3."""
    if n == 1:
        return 0
    if n == 2:
        space = qubits(2)
        heis = Operator(space, two_body(0, 1).realize(space) / 3.0)
        return lie_closure([heis, heis]).dim
    desc = build_model("ising-chain", n_qubits=n)
    return dfs_lie_dimension(desc.spec, desc.controls).unital_dim


def cmd_reproduce_table1(args) -> int:
    config = _load_config(args.config)
    nmax = int(_merged(args, config, "nmax", 6))
    csv_path = _merged(args, config, "csv", "-")
    if nmax < 1:
        print("nmax must be at least 1", file=sys.stderr)
        return 1
    ns = list(range(1, nmax + 1))
    spins = sorted({j for n in ns for j in allowed_spins(n)})
    header = ["quantity"] + [f"N={n}" for n in ns]
    rows = []
    for j in spins:
        label = f"J={int(j)}" if j == int(j) else f"J={int(2 * j)}/2"
        row = [label]
        for n in ns:
            try:
                row.append(str(dfs_dimension(j, n)))
            except ValueError:
                row.append("")
        rows.append(row)
    dims = {n: _chain_dfs_lie_dim(n) for n in ns}
    rows.append(["dim_L_DFS"] + [str(dims[n]) for n in ns])
    rows.append(
        ["sum_dim_su"]
        + [str(sum(dfs_dimension(j, n) ** 2 - 1 for j in allowed_spins(n))) for n in ns]
    )
    rows.append(
        ["sum_dim_u"]
        + [str(sum(dfs_dimension(j, n) ** 2 for j in allowed_spins(n))) for n in ns]
    )
    _write_csv(csv_path, header, rows)
    return 0


def _sweep_system_builder(desc_name):
    def build(gamma: float) -> ControlSystem:
        desc = build_model(desc_name, gamma=gamma)
        return ControlSystem(desc.controls, desc.spec, 1.0)

    return build


def _sweep_target_builder(objective, goal_unitary, desc_name, etilde_mode):
    def build(system: ControlSystem):
        if objective == "eps2":
            return Eps2Target(goal_unitary)
        d1 = goal_unitary.shape[0]
        d2 = system.spec.space.dim // d1
        if etilde_mode == "identity":
            etilde = np.eye(d2 * d2, dtype=complex)
        else:
            etilde = qubit2_reset_superop(build_model(desc_name, gamma=1.0))
        from .channels import superop_tensor, unitary_superop

        goal = superop_tensor(unitary_superop(goal_unitary), d1, etilde, d2)
        return Eps1Target(goal, goal_unitary)

    return build


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    name = _merged(args, config, "model", "two-qubit-amp")
    gammas = [float(v) for v in str(_merged(args, config, "gammas", "0.1,1,10,100")).split(",") if v]
    target_name = _merged(args, config, "target", "hadamard")
    objective = _merged(args, config, "objective", "eps2")
    restarts = int(_merged(args, config, "restarts", 10))
    seed = int(_merged(args, config, "seed", 0))
    n_slices = int(_merged(args, config, "slices", 20))
    etilde_mode = _merged(args, config, "etilde", "projector")
    csv_path = _merged(args, config, "csv", "-")
    if target_name != "hadamard":
        print(f"unknown target {target_name!r}; only 'hadamard' is registered", file=sys.stderr)
        return 1
    if objective not in ("eps1", "eps2"):
        print("objective must be eps1 or eps2", file=sys.stderr)
        return 1
    builder = _sweep_system_builder(name)
    target_builder = _sweep_target_builder(objective, HADAMARD, name, etilde_mode)

    workers = int(os.environ.get("ZENOFORGE_THREADS", "1"))
    if workers > 1:
        def one(g):
            return gamma_sweep(
                builder, [g], target_builder, restarts=restarts, seed=seed, n_slices=n_slices
            )[0]

        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, gammas))
    else:
        rows = gamma_sweep(
            builder, gammas, target_builder, restarts=restarts, seed=seed, n_slices=n_slices
        )
    header = ["gamma", "best_eps", "reduced_error", "restarts", "iterations"]
    _write_csv(
        csv_path,
        header,
        [
            [_fmt(r.gamma), _fmt(r.best_eps), _fmt(r.reduced_error), r.restarts, r.iterations]
            for r in rows
        ],
    )
    return 0


def cmd_fidelity(args) -> int:
    with open(args.job) as fh:
        job = json.load(fh)
    sys_doc = job["system"]
    spec = spec_from_json(json.dumps(
        {"dims": sys_doc["dims"], "hamiltonian": sys_doc["hamiltonian"], "terms": sys_doc["terms"]}
    ))
    controls = tuple(
        Operator(spec.space, np.array([[complex(re, im) for re, im in row] for row in mat]))
        for mat in sys_doc["controls"]
    )
    system = ControlSystem(controls, spec, float(sys_doc.get("total_time", 1.0)))
    amplitudes = np.array(job["amplitudes"], dtype=float)
    schedule = PulseSchedule(system.total_time, amplitudes)
    target = job.get("target", "hadamard")
    if isinstance(target, str):
        if target != "hadamard":
            print(f"unknown target {target!r}", file=sys.stderr)
            return 1
        goal_unitary = HADAMARD
    else:
        goal_unitary = np.array([[complex(re, im) for re, im in row] for row in target])
    d1 = goal_unitary.shape[0]
    d2 = spec.space.dim // d1
    etilde_mode = job.get("etilde", "identity")
    if etilde_mode == "identity":
        etilde = np.eye(d2 * d2, dtype=complex)
    elif etilde_mode == "projector":
        sub = LindbladSpec(spec.hamiltonian, spec.terms)
        from .models import ModelDescriptor

        etilde = qubit2_reset_superop(
            ModelDescriptor("job", {}, sub, controls)
        )
    else:
        print("etilde must be 'identity' or 'projector'", file=sys.stderr)
        return 1
    e_total = propagate_schedule(system, schedule)
    rho2 = np.eye(d2) / d2
    report = gate_error_report(e_total, goal_unitary, etilde, rho2)
    print(report.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zenoforge",
        description="Noise-induced controllability toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON file with default flag values")

    p = sub.add_parser("lie-dim", help="Lie dimensions with and without noise")
    add_common(p)
    p.add_argument("--model", choices=MODEL_NAMES)
    p.add_argument("--n", type=int, help="chain qubits / atom levels")
    p.add_argument("--gamma", type=float)
    p.set_defaults(func=cmd_lie_dim)

    p = sub.add_parser("dfs", help="decoherence-free subspace report")
    add_common(p)
    p.add_argument("--model", choices=MODEL_NAMES)
    p.add_argument("--n", type=int)
    p.add_argument("--gamma", type=float)
    p.set_defaults(func=cmd_dfs)

    p = sub.add_parser("zeno-check", help="Zeno product and strong-damping errors")
    add_common(p)
    p.add_argument("--model", choices=MODEL_NAMES)
    p.add_argument("--gamma", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--steps", help="comma-separated step counts")
    p.add_argument("--gammas", help="comma-separated rates for the damping bound")
    p.set_defaults(func=cmd_zeno_check)

    p = sub.add_parser("reproduce-table1", help="DFS dimensions and Lie dims by chain size")
    add_common(p)
    p.add_argument("--nmax", type=int)
    p.add_argument("--csv", help="output path ('-' for stdout)")
    p.set_defaults(func=cmd_reproduce_table1)

    p = sub.add_parser("sweep", help="optimize gates across noise strengths")
    add_common(p)
    p.add_argument("--model", choices=MODEL_NAMES)
    p.add_argument("--gammas", help="comma-separated noise strengths")
    p.add_argument("--target", help="goal gate (hadamard)")
    p.add_argument("--objective", choices=["eps1", "eps2"])
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--slices", type=int)
    p.add_argument("--etilde", choices=["projector", "identity"])
    p.add_argument("--csv", help="output path ('-' for stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fidelity", help="one-shot gate-error report from a JSON job")
    p.add_argument("job", help="JSON job file")
    p.set_defaults(func=cmd_fidelity)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
