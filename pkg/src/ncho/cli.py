"""Command-line front end: every computation and check as a subcommand emitting JSON lines."""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import mpmath

from . import acceptance, analytic, apery, congruence, qseries, specint

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    subcommand: str
    parameters: dict = field(default_factory=dict)
    precision: int = 256
    seed: int = 0
    format: str = "json"
    out: str | None = None


class Emitter:
    """Collects records and writes them as JSON lines, CSV or plain text."""

    def __init__(self, fmt: str, stream: TextIO) -> None:
        self.fmt = fmt
        self.stream = stream
        self.failed = False
        self._csv_rows: list[dict] = []

    def record(self, rec: dict, ok: bool | None = None, text: str | None = None) -> None:
        if ok is False:
            self.failed = True
        if self.fmt == "json":
            self.stream.write(json.dumps(rec, sort_keys=True, default=str) + "\n")
        elif self.fmt == "csv":
            self._csv_rows.append(rec)
        else:
            self.stream.write((text if text is not None else _text_line(rec)) + "\n")

    def close(self) -> None:
        if self.fmt == "csv" and self._csv_rows:
            keys = list(dict.fromkeys(k for r in self._csv_rows for k in r))
            buf = io.StringIO()
            writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
            writer.writeheader()
            for r in self._csv_rows:
                writer.writerow({k: _flat(r.get(k, "")) for k in keys})
            self.stream.write(buf.getvalue())


def _flat(v: object) -> str:
    return json.dumps(v, sort_keys=True, default=str) if isinstance(v, (dict, list, tuple)) else str(v)


def _text_line(rec: dict) -> str:
    return "  ".join(f"{k}={_flat(v)}" for k, v in rec.items())


def _mp(x: object) -> str:
    return mpmath.nstr(getattr(x, "value", x), 20)


# --------------------------------------------------------------------------- #
# Subcommands
# --------------------------------------------------------------------------- #


def cmd_apery(args: argparse.Namespace, out: Emitter) -> None:
    ks = [args.k] if args.k is not None else list(range(1, 9))
    n_max = args.n_max if args.n_max is not None else 8
    for k in ks:
        table = apery.jtilde(k, n_max)
        if args.n is not None:
            out.record({"k": k, "n": args.n, "jtilde": str(table[args.n]),
                        "J": str(apery.j_formal(k, args.n))})
            continue
        for n, v in enumerate(table.values):
            out.record({"k": k, "n": n, "value": str(v)})


def _weak_case(case: tuple[int, int, int, int]) -> dict:
    return congruence.weak_congruence(*case).to_dict()


def cmd_congruence(args: argparse.Namespace, out: Emitter) -> None:
    theorem = args.theorem
    if theorem == "weak":
        if args.p is not None:
            ms = [args.m] if args.m is not None else list(range(1, (args.p + 1) // 2))
            ss = [args.s] if args.s is not None else list(range(1, (args.s_max or 3) + 1))
            ns = [args.n] if args.n is not None else list(range(1, (args.n_max or 3) + 1))
            cases = [(args.p, m, s, n) for m in ms for s in ss for n in ns]
        else:
            cases = list(acceptance.weak_congruence_cases(args.p_max or 47, args.s_max or 3, args.n_max or 3))
        if args.threads > 1:
            with ProcessPoolExecutor(max_workers=args.threads) as pool:
                results = list(pool.map(_weak_case, cases, chunksize=8))
        else:
            results = [_weak_case(c) for c in cases]
        for r in results:
            out.record(r, r["holds"])
    elif theorem == "conjecture":
        primes = [args.p] if args.p is not None else [q for q in (3, 5, 7, 11, 13) if q <= (args.p_max or 13)]
        ms = [args.m] if args.m is not None else [1, 2]
        ss = [args.s] if args.s is not None else list(range(1, (args.s_max or 2) + 1))
        for p in primes:
            for m in ms:
                for s in ss:
                    for parity in ("even", "odd"):
                        rep = congruence.conjecture_report(p, m, s, args.n_max or 3, parity)
                        out.record(rep.to_dict(), rep.all_pass)
    elif theorem == "central-binom":
        p = args.p if args.p is not None else 3
        for row in congruence.central_binom_experiment(p, args.n_max or 60):
            rec = dataclasses.asdict(row)
            out.record(rec)
    else:
        raise ValueError(f"unknown theorem {theorem!r}")


_QCHECKS = ("tmod", "fquartic", "G1", "w2", "w4", "w6", "cprime", "theta-hypergeom", "hecke", "g1-phi1")


def cmd_qcheck(args: argparse.Namespace, out: Emitter) -> None:
    order = args.order
    names = _QCHECKS if args.check == "all" else (args.check,)
    for name in names:
        if name == "hecke":
            k = args.k or 1
            g = qseries.dG(k, 8 * 20)
            for n in range(1, (args.n_max or 20) + 1):
                lhs = qseries.hecke(g, n, -2 * k)
                a = qseries.agree(lhs, g.truncate(lhs.order).scale(qseries.sigma_div(-2 * k - 1, n)))
                out.record({"check": "hecke", "k": k, "n": n, "holds": a.holds}, a.holds)
            continue
        if name == "g1-phi1":
            diff = qseries.g1_phi1_difference(order)
            out.record({"check": "g1-phi1", "informational": True, "order": order,
                        "difference": [str(c) for c in diff.coeffs]})
            continue
        if name == "cprime":
            ks = [args.k] if args.k else [2, 3]
            agreements = {f"cprime k={k}": qseries.cprime_check(k, order) for k in ks}
        else:
            agreements = {
                "tmod": lambda: qseries.agree(qseries.tmod_theta(order), qseries.tmod_eta(order), order),
                "fquartic": lambda: qseries.agree(qseries.fquartic_theta(order),
                                                  qseries.fquartic_eisenstein(order), order),
                "G1": lambda: qseries.agree(qseries.bigG(1, order), qseries.bigG1_closed(order), order),
                "w2": lambda: qseries.verify_w2(order),
                "w4": lambda: qseries.verify_w4(order),
                "w6": lambda: qseries.verify_w6(order),
                "theta-hypergeom": lambda: qseries.theta_hypergeom_check(order),
            }
            agreements = {name: agreements[name]()}
        for label, a in agreements.items():
            rec = {"check": label, "order": order, "holds": a.holds, "compared_to": str(a.compared_to)}
            if not a.holds:
                rec.update(first_mismatch=str(a.first_mismatch), lhs=str(a.lhs), rhs=str(a.rhs))
            out.record(rec, a.holds)


def cmd_period(args: argparse.Namespace, out: Emitter) -> None:
    prec = args.precision
    k = args.k or 1
    with mpmath.workprec(prec):
        pp = analytic.period_poly(k, prec=prec)
        rec = {"check": "period_poly", "k": k, "degree_bound": pp.degree_bound,
               "coefficients": [_mp(c) for c in pp.coefficients], "residual": float(pp.residual),
               "condition": float(pp.condition)}
        ok = pp.residual <= 1e-6
        if k == 1:
            closed = analytic.r1_closed_coefficients(prec)
            rel = max(float(abs(a - b) / abs(b)) for a, b in zip(pp.coefficients, closed) if b != 0)
            rec["closed_form_max_relative_error"] = rel
            ok = ok and rel <= 1e-6
        out.record(rec, ok)
        if k <= 3:
            for t in acceptance.TAU_POINTS:
                r = analytic.dG_transform_check(k, complex(t), prec)
                out.record({"check": "dG_transform", "k": k, "tau": t, "residual": r}, r <= 1e-10)
        if k in (1, 3):
            r = analytic.ramanujan_check(k, prec)
            out.record({"check": "ramanujan", "k": k, "residual": r}, r <= 1e-12)


def _quad_config(args: argparse.Namespace) -> specint.QuadConfig:
    return specint.QuadConfig(method=args.method, nodes=args.nodes, seed=args.seed)


def cmd_zeta(args: argparse.Namespace, out: Emitter) -> None:
    k = args.k or 2
    cfg = _quad_config(args)
    if args.kappa is not None:
        quad = specint.r1_quad(k, args.kappa, cfg)
        series = specint.r1_series(k, args.kappa, prec=min(args.precision, 256))
        out.record({"quantity": "R_k1", "k": k, "kappa": args.kappa, "quadrature": quad.value,
                    "quadrature_error": quad.error, "series": series.value, "series_error": series.error,
                    "method": cfg.resolve(k), "seed": args.seed})
        return
    params = apery.SpectralParams(args.alpha, args.beta)
    est = specint.zetaQ(k, params, cfg)
    rec = {"quantity": "zetaQ", "k": k, "alpha": args.alpha, "beta": args.beta, "value": est.value,
           "error": est.error, "method": cfg.resolve(k), "seed": args.seed}
    if k == 2:
        rec["closed_form"] = specint.zetaQ2_closed(args.alpha, args.beta)
    if args.alpha == args.beta:
        rec["degenerate_value"] = specint.zetaQ_degenerate(k, args.alpha)
    out.record(rec)


def cmd_mahler(args: argparse.Namespace, out: Emitter) -> None:
    cfg = analytic.MCConfig(seed=analytic.MCConfig().seed + args.seed)
    cases = [(args.l, args.lam)] if args.l is not None else [(2, 0.1), (3, 0.05), (4, 0.05), (6, 0.02)]
    for l, lam in cases:
        est = analytic.mahler_u(l, lam, cfg)
        closed = analytic.mahler_u_closed(l, lam)
        z = abs(est.mean - closed) / est.stderr
        out.record({"l": l, "lambda": lam, "mean": est.mean, "stderr": est.stderr, "samples": est.samples,
                    "closed_form": closed, "stderr_multiple": z, "seed": cfg.seed}, z <= 3)


def cmd_verify_all(args: argparse.Namespace, out: Emitter) -> None:
    results = []
    for n in sorted(acceptance.CRITERIA):
        res = acceptance.run_criterion(n, args.order, args.seed)
        results.append(res)
        rec = res.to_dict()
        rec.pop("seconds")
        out.record(rec, res.passed or res.informational, text=res.line())
    summary = {"summary": {str(r.number): r.status for r in results},
               "failed": [r.number for r in results if r.status == "FAIL"]}
    out.record(summary, text="summary: " + " ".join(f"{r.number}:{r.status}" for r in results))


COMMANDS = {
    "apery": cmd_apery, "congruence": cmd_congruence, "qcheck": cmd_qcheck, "period": cmd_period,
    "zeta": cmd_zeta, "mahler": cmd_mahler, "verify-all": cmd_verify_all,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--n-max", type=int)
    common.add_argument("--p", type=int)
    common.add_argument("--p-max", type=int)
    common.add_argument("--m", type=int)
    common.add_argument("--s", type=int)
    common.add_argument("--s-max", type=int)
    common.add_argument("--alpha", type=float, default=2.0)
    common.add_argument("--beta", type=float, default=3.0)
    common.add_argument("--kappa", type=float)
    common.add_argument("--order", type=int, default=40)
    common.add_argument("--precision", type=int, default=256)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out")

    parser = argparse.ArgumentParser(prog="ncho", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("apery", parents=[common], help="normalized Apery-like tables")
    c = sub.add_parser("congruence", parents=[common], help="congruence sweeps")
    c.add_argument("--theorem", choices=("weak", "conjecture", "central-binom"), default="weak")
    q = sub.add_parser("qcheck", parents=[common], help="exact q-series identities")
    q.add_argument("--check", choices=_QCHECKS + ("all",), default="all")
    sub.add_parser("period", parents=[common], help="period polynomials and transformation laws")
    z = sub.add_parser("zeta", parents=[common], help="special values of the spectral zeta function")
    z.add_argument("--method", choices=("auto", "tensor", "mc", "tensor_gl", "stratified_mc"), default="auto")
    z.add_argument("--nodes", type=int, default=64)
    m = sub.add_parser("mahler", parents=[common], help="Mahler-type torus averages")
    m.add_argument("--l", type=int, choices=(2, 3, 4, 6))
    m.add_argument("--lambda", dest="lam", type=float, default=0.05)
    sub.add_parser("verify-all", parents=[common], help="the full acceptance suite")
    return parser


def main(argv: Iterable[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(None if argv is None else list(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.threads < 1 or args.precision < 53:
        parser.print_usage(sys.stderr)
        print("ncho: --threads must be >= 1 and --precision >= 53", file=sys.stderr)
        return EXIT_USAGE
    stream = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    emitter = Emitter(args.format, stream)
    try:
        COMMANDS[args.subcommand](args, emitter)
    except ValueError as exc:
        print(f"ncho: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        emitter.close()
        if args.out:
            stream.close()
    return EXIT_FAIL if emitter.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
