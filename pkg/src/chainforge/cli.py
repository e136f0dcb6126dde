"""Command-line interface: batch subcommands emitting JSON reports.

Exit codes: 0 success, 1 invariant-check failure (a certificate failed its
re-verification), 2 input error.  Parallelism for independent harness legs
is capped by CHAINFORGE_THREADS.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from chainforge import corpus as corpus_mod
from chainforge import ekeland as ekeland_mod
from chainforge import filling, io, systolic
from chainforge.complexes import InvariantViolation
from chainforge.flatnorm import flat_norm, flat_norm_mod_p, mass, mass_p
from chainforge.metric import build_rips, distortion, kuratowski_embed, maximal_epsilon_net
from chainforge.rationals import to_fraction
from chainforge.slicing import VertexFunction, slice_chain


def main(argv=None) -> int:
    parser = _build_parser()
    if argv is None:
        argv = sys.argv[1:]
    try:
        argv = _apply_config(list(argv))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return 2
    try:
        report = args.func(args)
    except (io.ParseError, FileNotFoundError, ValueError, filling.Infeasible) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvariantViolation, filling.SliceSearchError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(io.json_ready(report), indent=2, sort_keys=True)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _apply_config(argv):
    """Expand `--config FILE` (key=value lines) into flags placed before the
    explicit ones, so command-line flags override the file."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ValueError("--config needs a file argument")
    path = argv[i + 1]
    del argv[i : i + 2]
    flags = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            flag = "--" + key.replace("_", "-")
            if value.lower() in ("true", "yes"):
                flags.append(flag)
            else:
                flags.extend([flag, value])
    if not argv:
        raise ValueError("--config requires a subcommand")
    return argv[:1] + flags + argv[1:]


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="chainforge",
        description="Flat norms, slices, coverings, fillings and systolic checks "
        "for weighted simplicial chains mod p.",
    )
    sub = parser.add_subparsers(dest="command")

    def add(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=fn)
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        return p

    p = add("flatnorm", _cmd_flatnorm, "flat norm (or flat norm mod p) with witness")
    p.add_argument("--chain", required=True)
    p.add_argument("--complex", required=True, dest="complex_path")
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--relaxed", action="store_true")

    p = add("slice", _cmd_slice, "slice a chain along a vertex function")
    p.add_argument("--chain", required=True)
    p.add_argument("--complex", required=True, dest="complex_path")
    p.add_argument("--function", required=True)
    p.add_argument("--r", required=True)

    p = add("embed", _cmd_embed, "Kuratowski embedding coordinates over a net")
    p.add_argument("--metric", required=True)
    p.add_argument("--epsilon", default=None)

    p = add("rips", _cmd_rips, "Vietoris-Rips complex from a distance matrix")
    p.add_argument("--metric", required=True)
    p.add_argument("--scale", required=True)
    p.add_argument("--max-dim", type=int, required=True)
    p.add_argument("--budget", type=int, default=500_000)

    p = add("fillrad", _cmd_fillrad, "exact filling radius mod 2")
    p.add_argument("--cycle", required=True)
    p.add_argument("--ambient", required=True)
    p.add_argument("--profile", action="store_true")

    p = add("fillvol", _cmd_fillvol, "filling volume mod p")
    p.add_argument("--cycle", required=True)
    p.add_argument("--ambient", required=True)
    p.add_argument("--p", type=int, default=2)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true")
    group.add_argument("--greedy", action="store_true")

    p = add("decompose", _cmd_decompose, "decompose a cycle into ball-supported pieces")
    p.add_argument("--cycle", required=True)
    p.add_argument("--complex", required=True, dest="complex_path")
    p.add_argument("--p", type=int, default=2)

    p = add("systole", _cmd_systole, "shortest mod-2-nontrivial cycle of a surface mesh")
    p.add_argument("--mesh", required=True)

    p = add("verify", _cmd_verify, "systolic inequality chain harness")
    p.add_argument("--mesh", required=True)
    p.add_argument("--epsilon", default=None)
    p.add_argument("--json", dest="out_alias", default=None, help="alias for --out")
    p.add_argument("--fillvol-mode", choices=("auto", "exact", "greedy"), default="auto")

    p = add("ekeland", _cmd_ekeland, "quasi-minimize mass_p over the filling coset")
    p.add_argument("--cycle", required=True)
    p.add_argument("--ambient", required=True)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--epsilon", default="1/2")
    p.add_argument("--restarts", type=int, default=1)

    p = add("corpus", _cmd_corpus, "generate the deterministic instance corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dir", required=True)
    p.add_argument("--circle-sizes", default="12,24,48")
    p.add_argument("--torus-sizes", default="3,4,5,6")

    return parser


def _base_report(command, paths):
    return {
        "command": command,
        "inputs": {str(p): io.sha256_file(p) for p in paths},
        "constants": dict(filling.CONSTANTS_POLICY),
    }


def _timed(report, t0):
    report["elapsed_seconds"] = round(time.monotonic() - t0, 6)
    return report


def _cmd_flatnorm(args):
    t0 = time.monotonic()
    K = io.read_complex(args.complex_path)
    T = io.read_chain(args.chain, K)
    mode = "relaxed" if args.relaxed else "exact"
    if args.p:
        dec = flat_norm_mod_p(T, args.p, mode)
    else:
        dec = flat_norm(T, mode)
    report = _base_report("flatnorm", [args.complex_path, args.chain])
    report.update(
        value=dec.value,
        R=dec.R,
        S=dec.S,
        Q=dec.Q,
        relaxed=dec.relaxed,
        mass=mass(T),
    )
    if args.p:
        report["mass_p"] = mass_p(T, args.p)
    return _timed(report, t0)


def _cmd_slice(args):
    t0 = time.monotonic()
    K = io.read_complex(args.complex_path)
    T = io.read_chain(args.chain, K)
    u = VertexFunction.on(K, io.read_function(args.function))
    r = to_fraction(args.r)
    piece = slice_chain(T, u, r)
    # Anti-commutation recheck before emitting.
    if T.dim >= 2:
        lhs = piece.boundary()
        rhs = -slice_chain(T.boundary(), u, r)
        if lhs != rhs:
            raise InvariantViolation("slice boundary identity failed")
    report = _base_report("slice", [args.complex_path, args.chain, args.function])
    report.update(r=r, lip=u.lip, slice=piece)
    return _timed(report, t0)


def _cmd_embed(args):
    t0 = time.monotonic()
    space = io.read_metric_csv(args.metric)
    if args.epsilon:
        eps = to_fraction(args.epsilon)
        net = maximal_epsilon_net(space, eps)
    else:
        eps = None
        net = list(range(space.n))
    emb = kuratowski_embed(space, net)
    expansion, contraction = distortion(emb)
    report = _base_report("embed", [args.metric])
    report.update(
        epsilon=eps,
        net=list(net),
        coords={str(v): list(pt) for v, pt in sorted(emb.coords.items())},
        expansion=expansion,
        contraction=contraction,
    )
    return _timed(report, t0)


def _cmd_rips(args):
    t0 = time.monotonic()
    space = io.read_metric_csv(args.metric)
    K = build_rips(
        space,
        to_fraction(args.scale),
        args.max_dim,
        max_simplices=args.budget,
        lazy_weights=False,
    )
    report = _base_report("rips", [args.metric])
    report.update(io.complex_to_json(K))
    return _timed(report, t0)


def _cmd_fillrad(args):
    t0 = time.monotonic()
    ambient = io.read_complex(args.ambient)
    L = io.read_chain(args.cycle, ambient)
    r_star, cert = filling.filling_radius(L, ambient, profile=args.profile)
    report = _base_report("fillrad", [args.ambient, args.cycle])
    report.update(
        radius=r_star,
        filling=cert.filling,
        mass_ratio=cert.mass_ratio,
        filling_mass=mass(cert.filling),
        cycle_mass=mass_p(L.lift(), 2),
    )
    if args.profile:
        report["profile"] = cert.meta.get("profile", [])
    return _timed(report, t0)


def _cmd_fillvol(args):
    t0 = time.monotonic()
    ambient = io.read_complex(args.ambient)
    L = io.read_chain(args.cycle, ambient)
    mode = "greedy" if args.greedy else "exact"
    cert = filling.filling_volume(L, args.p, mode=mode)
    report = _base_report("fillvol", [args.ambient, args.cycle])
    report.update(
        mode=mode,
        volume=mass(cert.filling),
        filling=cert.filling,
        radius=cert.radius,
        mass_ratio=cert.mass_ratio,
    )
    return _timed(report, t0)


def _cmd_decompose(args):
    t0 = time.monotonic()
    K = io.read_complex(args.complex_path)
    L = io.read_chain(args.cycle, K)
    decomp = filling.decompose_cycle(L, args.p)
    report = _base_report("decompose", [args.complex_path, args.cycle])
    report.update(
        rounds=decomp.rounds,
        pieces=[
            {"center": pc.center, "radius": pc.radius, "chain": pc.chain,
             "mass": mass(pc.chain)}
            for pc in decomp.pieces
        ],
        remainder=decomp.remainder,
        remainder_mass=mass(decomp.remainder),
    )
    return _timed(report, t0)


def _cmd_systole(args):
    t0 = time.monotonic()
    K = io.read_complex(args.mesh)
    M = systolic.ClosedManifoldComplex(K)
    rep = systolic.systole(M)
    report = _base_report("systole", [args.mesh])
    report.update(sys=rep.sys if rep.sys is not None else "inf", witness=rep.witness)
    return _timed(report, t0)


def _cmd_verify(args):
    t0 = time.monotonic()
    K = io.read_complex(args.mesh)
    M = systolic.ClosedManifoldComplex(K)
    eps = to_fraction(args.epsilon) if args.epsilon else None
    rep = systolic.verify_chain(M, epsilon=eps, fillvol_mode=args.fillvol_mode)
    report = _base_report("verify", [args.mesh])
    report.update(
        sys=rep.sys if rep.sys is not None else "inf",
        witness=rep.witness,
        fillrad=rep.fillrad,
        fillvol=rep.fillvol,
        vol=rep.vol,
        epsilon=rep.epsilon,
        ratios=rep.ratios,
        passes=rep.passes,
        timings={k: round(v, 6) for k, v in rep.timings.items()},
        fillvol_mode=rep.meta.get("fillvol_mode"),
    )
    if args.out_alias and not args.out:
        args.out = args.out_alias
    return _timed(report, t0)


def _cmd_ekeland(args):
    t0 = time.monotonic()
    ambient = io.read_complex(args.ambient)
    L = io.read_chain(args.cycle, ambient)
    eps = to_fraction(args.epsilon)
    seed_cert = filling.filling_volume(L, args.p, mode="greedy")
    best = None
    for restart in range(max(1, args.restarts)):
        qm = ekeland_mod.quasi_minimize(
            L, ambient, args.p, eps, seed_cert.filling, order_seed=restart
        )
        if best is None or mass(qm.chain) < mass(best.chain):
            best = qm
    report = _base_report("ekeland", [args.ambient, args.cycle])
    report.update(
        epsilon=eps,
        seed_mass=mass(seed_cert.filling),
        final_mass=mass(best.chain),
        trace=best.trace,
        moves_checked=best.moves_checked,
        certificate=best.certificate,
        chain=best.chain,
        support_distance=ekeland_mod.support_distance(best.chain, L),
    )
    return _timed(report, t0)


def _cmd_corpus(args):
    t0 = time.monotonic()
    sizes = tuple(int(x) for x in args.circle_sizes.split(",") if x)
    tsizes = tuple(int(x) for x in args.torus_sizes.split(",") if x)
    manifest = corpus_mod.generate_corpus(
        args.seed, args.dir, circle_sizes=sizes, torus_sizes=tsizes
    )
    report = {"command": "corpus", **manifest}
    return _timed(report, t0)


if __name__ == "__main__":
    sys.exit(main())
