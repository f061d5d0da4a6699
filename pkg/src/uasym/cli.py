"""Command-line front end.

Commands: analyze, asymptote, spectrum, quasi, split, norm-control,
reproduce-example.  Exit codes: 0 success, 1 input error, 2 numerical
invariant violation.  Reports embed the seed and threshold set so runs are
reproducible bit for bit.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import asymptote as ay
from . import quasi as qa
from . import spectral as sp
from .errors import (
    ClusterAmbiguity,
    CriteriaDisagree,
    DecompositionFailed,
    InvarianceCheckFailed,
    IsQuasianalytic,
    NonSemisimpleUnimodular,
    NonUnique,
    NoSplittingAtom,
    ParseError,
    SeriesNotConverged,
    UasymError,
    ZeroX,
)
from .examples import reproduce_example
from .hardy import HardyToeplitzModel, ac_quasianalytic_check
from .shifts import WeightedShiftModel
from .specfile import format_report, parse_spec
from .tuples import OperatorTuple, orbit_infimum

_INVARIANT_ERRORS = (
    CriteriaDisagree,
    InvarianceCheckFailed,
    ClusterAmbiguity,
    NonSemisimpleUnimodular,
    DecompositionFailed,
    NonUnique,
    NoSplittingAtom,
    SeriesNotConverged,
)


def _build_parser():
    p = argparse.ArgumentParser(
        prog="uasym",
        description="numerical unitary asymptotes of commuting operator tuples",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, needs_input=True, help=None):
        c = sub.add_parser(name, help=help)
        if needs_input:
            c.add_argument("input", help="spec file (tuple, shift or toeplitz)")
        c.add_argument("--tol-rank", type=float, default=1e-8,
                       help="rank threshold (default 1e-8)")
        c.add_argument("--tol-cluster", type=float, default=1e-7,
                       help="joint-eigenvalue clustering tolerance (default 1e-7)")
        c.add_argument("--horizon", type=int, default=10,
                       help="orbit scan horizon (default 10)")
        c.add_argument("--seed", type=int, default=0,
                       help="seed for randomized checks (default 0)")
        c.add_argument("--format", choices=("text", "csv"), default="text")
        c.add_argument("--out", default=None, metavar="DIR",
                       help="write the report into DIR instead of stdout")
        return c

    add("analyze", help="full pipeline: classify, asymptote, spectrum, verdict")
    add("asymptote", help="limit operator and the intertwining pair (X, U)")
    add("spectrum", help="joint spectral atoms of the asymptote's unitary tuple")
    add("quasi", help="quasianalytic spectral set and three-way verdict")
    add("split", help="proper hyperinvariant subspace when homogeneity breaks")
    add("norm-control", help="optimal norm-control bounds and witness")
    ex = add("reproduce-example", needs_input=False,
             help="run a built-in worked example and print PASS/FAIL lines")
    ex.add_argument("id", type=int, help="example identifier (9 14 17 23 26 32)")
    return p


def _header(args):
    h = {
        "uasym": __version__,
        "command": args.command,
        "seed": args.seed,
        "tol_rank": args.tol_rank,
        "tol_cluster": args.tol_cluster,
        "support_tol": 1e-10,
        "horizon": args.horizon,
    }
    return h


def _emit(args, rows, name):
    text = format_report(_header(args), rows, args.format)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        ext = "csv" if args.format == "csv" else "txt"
        (out / f"{name}.{ext}").write_text(text)
    else:
        sys.stdout.write(text)


def _load(args):
    text = Path(args.input).read_text()
    return parse_spec(text)


def _fmt_atom(z):
    return "(" + ", ".join(f"{zi.real:+.6f}{zi.imag:+.6f}i" for zi in z) + ")"


def _pipeline(t, args):
    """Shared orchestration: asymptote, classification, spectrum."""
    a = ay.build_asymptote(t, rank_rtol=args.tol_rank)
    sub, label = ay.annihilating_subspace(a, rng=args.seed)
    m = sp.joint_diagonalize(a.U, args.tol_cluster) if a.dim_K else None
    return a, sub, label, m


def _analyze_tuple(t, args):
    rows = [("dim", t.dim), ("arity", t.n), ("worst_commutator", t.worst_commutator)]
    a, sub, label, m = _pipeline(t, args)
    rows += [
        ("class", label),
        ("dim_K", a.dim_K),
        ("X_norm", a.X_norm),
        ("ker_X_dim", sub.dim),
        ("intertwining_residual", a.intertwining_residual()),
    ]
    if a.is_degenerate or a.X_norm == 0.0:
        rows.append(("quasianalytic", "skipped (ZeroX: degenerate asymptote)"))
        return 0, rows
    for j, (z, mult) in enumerate(zip(m.atoms, m.multiplicities)):
        rows.append((f"atom_{j}", f"{_fmt_atom(z)} multiplicity {mult}"))
    nc = ay.norm_control(a, m, rng=args.seed)
    rows += [
        ("kappa_op", nc.kappa_op_upper),
        ("kappa_aop", nc.kappa_aop),
    ]
    verdict, ev = qa.is_quasianalytic(a, m, args.tol_rank, rng=args.seed)
    rows += [
        ("pi_T", ev.pi.indices),
        ("quasianalytic", verdict),
    ]
    if not verdict:
        try:
            M, wit = qa.split_non_quasianalytic(t, a, m, args.tol_rank)
            rows.append(("hyperinvariant_subspace_dim", M.dim))
            rows.append(("split_kind", wit["kind"]))
        except ZeroX:
            pass
    return 0, rows


def _analyze_shift(model, args):
    t = model.tuple
    horizon = min(args.horizon, model.interior_radius)
    h = model.basis_vector((1,) * model.n)
    o = orbit_infimum(t, h, horizon)
    xh = float(np.linalg.norm(model.X @ h))
    hneg = model.basis_vector((-model.interior_radius,) * model.n)
    oinv = orbit_infimum(model.inverse_on_window(), hneg, horizon)
    ratio = oinv / float(np.linalg.norm(model.X @ hneg))
    return 0, [
        ("model", "weighted shift window"),
        ("arity", model.n),
        ("window_radius", model.N),
        ("dim", model.dim),
        ("interior_loc_ratio", xh / o),
        ("inverse_loc_ratio", ratio),
    ]


def _analyze_toeplitz(model, args):
    rep = ac_quasianalytic_check(model, rng=args.seed)
    return 0, [
        ("model", "arc-symbol analytic Toeplitz"),
        ("symbols", model.n),
        ("degree_M", model.M),
        ("grid_G", model.G),
        ("eps_M", max(model.eps)),
        ("omega_measure", model.Omega.measure),
        ("pi_a_deviation_cells", rep["deviation_cells"]),
        ("pi_a_equals_omega_a", rep["within_one_cell"]),
        ("verdict_quality", "approximate (grid-resolved)"),
    ]


def _cmd_analyze(obj, args):
    if isinstance(obj, OperatorTuple):
        return _analyze_tuple(obj, args)
    if isinstance(obj, WeightedShiftModel):
        return _analyze_shift(obj, args)
    return _analyze_toeplitz(obj, args)


def _require_tuple(obj, args):
    if not isinstance(obj, OperatorTuple):
        raise ParseError(1, 1, f"the {args.command} command needs a tuple spec")
    return obj


def _cmd_asymptote(obj, args):
    t = _require_tuple(obj, args)
    a = ay.build_asymptote(t, rank_rtol=args.tol_rank)
    rows = [
        ("method", a.method),
        ("dim_K", a.dim_K),
        ("X_norm", a.X_norm),
        ("intertwining_residual", a.intertwining_residual()),
    ]
    for i, u in enumerate(a.U.mats):
        rows.append((f"U_{i}_unitarity",
                     float(np.linalg.norm(u.conj().T @ u - np.eye(a.dim_K), 2))))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        np.savetxt(out / "X.csv", a.X.view(float), delimiter=",")
        for i, u in enumerate(a.U.mats):
            np.savetxt(out / f"U_{i}.csv", u.view(float), delimiter=",")
        rows.append(("exported", str(out)))
    return 0, rows


def _cmd_spectrum(obj, args):
    t = _require_tuple(obj, args)
    a = ay.build_asymptote(t, rank_rtol=args.tol_rank)
    if a.is_degenerate:
        return 0, [("atoms", 0), ("note", "degenerate asymptote")]
    m = sp.joint_diagonalize(a.U, args.tol_cluster)
    y = sp.scalar_spectral_vector(m)
    loc = sp.localize(m, y)
    rows = [("atoms", m.n_atoms)]
    for j, (z, mult, w) in enumerate(zip(m.atoms, m.multiplicities, loc.weights)):
        rows.append((f"atom_{j}", f"{_fmt_atom(z)} multiplicity {mult} "
                                  f"scalar_vector_weight {w:.6g}"))
    return 0, rows


def _cmd_quasi(obj, args):
    t = _require_tuple(obj, args)
    a, sub, label, m = _pipeline(t, args)
    if a.is_degenerate or a.X_norm == 0.0:
        return 0, [("class", label),
                   ("quasianalytic", "skipped (ZeroX: degenerate asymptote)")]
    verdict, ev = qa.is_quasianalytic(a, m, args.tol_rank, rng=args.seed)
    rows = [
        ("class", label),
        ("atoms", m.n_atoms),
        ("pi_T", ev.pi.indices),
        ("pi_full", ev.pi_full),
        ("cyclicity", ev.cyclic_ok),
        ("non_vanishing", ev.nonvanishing_ok),
        ("ker_X_trivial", ev.kernel_ok),
        ("quasianalytic", verdict),
    ]
    for j, s in enumerate(ev.block_margins):
        rows.append((f"block_margin_{j}", s))
    return 0, rows


def _cmd_split(obj, args):
    t = _require_tuple(obj, args)
    a, sub, label, m = _pipeline(t, args)
    if a.is_degenerate or a.X_norm == 0.0:
        return 0, [("split", "skipped (ZeroX: degenerate asymptote)")]
    try:
        M, wit = qa.split_non_quasianalytic(t, a, m, args.tol_rank)
    except IsQuasianalytic:
        return 0, [("split", "none: the tuple is quasianalytic")]
    rows = [
        ("split", wit["kind"]),
        ("subspace_dim", M.dim),
        ("ambient_dim", t.dim),
    ]
    if wit["kind"] == "spectral":
        rows.append(("splitting_atom", _fmt_atom(m.atoms[wit["atom"]])))
    return 0, rows


def _cmd_norm_control(obj, args):
    t = _require_tuple(obj, args)
    a = ay.build_asymptote(t, rank_rtol=args.tol_rank)
    if a.is_degenerate or a.X_norm == 0.0:
        return 0, [("norm_control", "skipped (ZeroX: degenerate asymptote)")]
    m = sp.joint_diagonalize(a.U, args.tol_cluster)
    nc = ay.norm_control(a, m, rng=args.seed)
    rows = [
        ("kappa_op_lower", nc.kappa_op_lower),
        ("kappa_op_upper", nc.kappa_op_upper),
        ("kappa_aop", nc.kappa_aop),
        ("descent_cross_check", nc.descent_min),
    ]
    for j, s in enumerate(nc.block_margins):
        rows.append((f"block_margin_{j}", s))
    return 0, rows


def _cmd_reproduce(args):
    rep = reproduce_example(args.id)
    rows = [("example", rep["example"])]
    for label, ok, detail in rep["checks"]:
        rows.append(("PASS" if ok else "FAIL", f"{label} -- {detail}"))
    rows.append(("overall", "PASS" if rep["pass"] else "FAIL"))
    return (0 if rep["pass"] else 2), rows


def main(argv=None):
    args = _build_parser().parse_args(argv)
    np.random.seed(args.seed % (2**32))
    try:
        if args.command == "reproduce-example":
            code, rows = _cmd_reproduce(args)
            _emit(args, rows, f"example_{args.id}")
            return code
        obj = _load(args)
        handler = {
            "analyze": _cmd_analyze,
            "asymptote": _cmd_asymptote,
            "spectrum": _cmd_spectrum,
            "quasi": _cmd_quasi,
            "split": _cmd_split,
            "norm-control": _cmd_norm_control,
        }[args.command]
        code, rows = handler(obj, args)
        _emit(args, rows, args.command.replace("-", "_"))
        return code
    except ParseError as e:
        sys.stderr.write(f"error: line {e.line}, column {e.col}: {e.message}\n")
        return 1
    except _INVARIANT_ERRORS as e:
        sys.stderr.write(f"invariant violation: {type(e).__name__}: {e}\n")
        return 2
    except (UasymError, OSError) as e:
        sys.stderr.write(f"error: {type(e).__name__}: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
