"""Command-line front end.

Exit codes: 0 when the run passes (or computes without a verdict), 2 when a
verification fails, 1 on usage or runtime errors.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import json
import math
import random
import sys
import time

from .backlund import INFINITY, ExtendedState, random_exact_state, random_numeric_state, s_word
from .errors import LabError
from .experiments import (coalescence_flow, coalescence_suite, isomono_suite, main_suite,
                          takano_suite, unit_path, verify_isomonodromic, verify_main)
from .fuchsian import (apparent_obstruction, build_coeff3, build_coeff4, coalesce,
                       coalesced_trace, discriminant, exponents, normalize3)
from .hamiltonians import H4, flow, h3, h_single, pvi_residual
from .heuristics import E_coefficients_claimed, heuristic_E, heuristic_solve
from .monodromy import rh_compute
from .reports import cjson, dumps, envelope
from .scalars import parse_scalar, parse_scalar_list
from .weyl import GroupWord, Kappa, apply_word, fuchs_defect, local_traces, theta_of_kappa

__all__ = ["main", "dispatch", "build_parser"]

TOL_RANGE = (1e-14, 1e-2)
EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _tol(text: str) -> float:
    v = float(text)
    if not TOL_RANGE[0] <= v <= TOL_RANGE[1]:
        raise argparse.ArgumentTypeError(f"tol must lie in [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}]")
    return v


def _common(p: argparse.ArgumentParser, *, tol: float | None = 1e-9, state: bool = False) -> None:
    if state:
        p.add_argument("--state", help="ExtendedState JSON file (random seeded state if omitted)")
    if tol is not None:
        p.add_argument("--tol", type=_tol, default=tol)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--field", choices=("exact", "approx"), default=None)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--csv", help="CSV output for plot data, where the command has any")
    p.add_argument("--reproducible", action="store_true",
                   help="omit wall time so identical runs give identical bytes")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pvi-rh-lab", description="Painleve VI verification lab")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    weyl = sub.add_parser("weyl").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = weyl.add_parser("apply", help="apply a word in the reflections to kappa")
    p.add_argument("--kappa", required=True)
    p.add_argument("--word", default="")
    _common(p, tol=None)

    p = sub.add_parser("theta", help="local traces and cubic coefficients of kappa")
    p.add_argument("--kappa", required=True)
    _common(p, tol=None)

    bk = sub.add_parser("backlund").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = bk.add_parser("apply")
    p.add_argument("--word", default="")
    _common(p, tol=None, state=True)
    p = bk.add_parser("heuristic", help="difference polynomial E for both candidate solutions")
    p.add_argument("--i", type=int, default=1, choices=(1, 2, 3))
    _common(p, tol=None, state=True)

    ham = sub.add_parser("ham").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = ham.add_parser("eval")
    _common(p, tol=None, state=True)

    fl = sub.add_parser("flow").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = fl.add_parser("run", help="isomonodromic flow along a polyline in one time")
    p.add_argument("--path", help="semicolon-separated waypoints after the start, e.g. '1+2i;2+2i'")
    p.add_argument("--length", type=float, default=1.0, help="default path: straight, away from the real axis")
    p.add_argument("--moving", type=int, default=3, choices=(1, 2, 3, 4))
    _common(p, state=True)

    fu = sub.add_parser("fuchsian").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = fu.add_parser("build")
    p.add_argument("--form", choices=("coeff3", "coeff4", "normal3"), default="coeff3")
    _common(p, tol=None, state=True)

    p = sub.add_parser("coalesce", help="limit t_k -> t_j of the Fuchsian equation")
    p.add_argument("--j", type=int, default=2, choices=(1, 2, 3))
    p.add_argument("--k", type=int, default=3, choices=(1, 2, 3))
    _common(p, tol=None, state=True)

    rh = sub.add_parser("rh").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = rh.add_parser("compute", help="monodromy, traces and cubic residual")
    _common(p, state=True)

    ver = sub.add_parser("verify").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = ver.add_parser("main", help="trace coordinates are invariant under Backlund words")
    p.add_argument("--gens", default="0,1,2,3,4", help="generators, each tested on its own")
    p.add_argument("--word", help="test this word instead of single generators")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--negative-control", action="store_true")
    _common(p, state=True)
    p = ver.add_parser("isomono", help="trace coordinates are constant along the flow")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--length", type=float, default=1.0)
    _common(p, state=True)
    p = ver.add_parser("coalesce", help="x_i against -2cos(pi sqrt Delta) as t_k -> t_j")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--j", type=int, default=2, choices=(1, 2, 3))
    p.add_argument("--k", type=int, default=3, choices=(1, 2, 3))
    p.add_argument("--ladder", default="1e-1,1e-2,1e-3")
    p.add_argument("--min-pass", type=int, default=3)
    _common(p, state=True)
    p = ver.add_parser("takano", help="table rows against |Q| < rho, |xP| < rho; the curve |Q| = mu")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--curve-points", type=int, default=200)
    _common(p, tol=None)
    return parser


# --- inputs ------------------------------------------------------------------

def _kappa(text: str, field: str | None) -> Kappa:
    vals = parse_scalar_list(text, field)
    if len(vals) != 5:
        raise UsageError("--kappa needs five comma-separated values k0,...,k4")
    return Kappa(*vals)


def _state(args, *, numeric: bool = False, t4_finite: bool = False) -> ExtendedState:
    if args.state:
        with open(args.state) as fh:
            st = ExtendedState.from_json(json.load(fh))
        if args.field == "approx":
            st = st.to_approx()
        elif args.field == "exact" and st.field != "exact":
            raise UsageError("state is not exact")
        return st
    rng = random.Random(args.seed)
    if numeric or args.field == "approx":
        return random_numeric_state(rng)
    return random_exact_state(rng, t4_finite=t4_finite)


def _cfg(args) -> dict:
    skip = {"command", "action", "out", "csv", "reproducible"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# --- commands ----------------------------------------------------------------

def _weyl_apply(args):
    kappa = _kappa(args.kappa, args.field)
    word = GroupWord.parse(args.word)
    out = apply_word(kappa, word)
    return "weyl-reflection-action", {"kappa": kappa.to_json(), "word": list(word.letters),
                                      "image": out.to_json()}, None, {
        "fuchs_defect": cjson(fuchs_defect(*out))}


def _theta(args):
    kappa = _kappa(args.kappa, args.field)
    a = local_traces(kappa)
    th = theta_of_kappa(kappa)
    return "theta-of-kappa", {"kappa": kappa.to_json(), "a": [cjson(complex(v)) for v in a],
                              "theta": [cjson(complex(v)) for v in th]}, None, {}


def _backlund_apply(args):
    st = _state(args)
    word = GroupWord.parse(args.word)
    out = s_word(st, word)
    equivariant = out.kappa == apply_word(st.kappa, word)
    return "backlund-action", {"state": st.to_json(), "word": list(word.letters),
                               "image": out.to_json()}, equivariant, {"kappa_equivariant": equivariant}


def _backlund_heuristic(args):
    st = _state(args)
    if st.field != "exact":
        raise UsageError("the difference polynomial is computed in the exact field")
    i = args.i
    j, k = sorted({1, 2, 3} - {i})
    cand = heuristic_solve()
    Q1, P1 = cand.sol1(st)
    E1 = heuristic_E(Q1, P1, st, i, j, k)
    Q2, P2 = cand.sol2(st, i)
    E2 = heuristic_E(Q2, P2, st, i, j, k)
    claimed = E_coefficients_claimed(Q2, P2, st, i, j, k)
    sol1_zero = all(v == 0 for v in E1.values())
    e12_ok = E2[(1, 2)] == claimed[(1, 2)]
    result = {
        "state": st.to_json(), "i": i, "j": j, "k": k,
        "sol1": {"Q": cjson(Q1), "P": cjson(P1), "E": {f"E{m}{n}": cjson(v) for (m, n), v in E1.items()}},
        "sol2": {"Q": cjson(Q2), "P": cjson(P2), "E": {f"E{m}{n}": cjson(v) for (m, n), v in E2.items()},
                 "e02_condition": cjson(cand.e02_condition(st.kappa, i, j, k)),
                 "ee_condition": cjson(cand.ee_condition(st.kappa, i))},
    }
    certs = {"sol1_E_identically_zero": sol1_zero, "E12_closed_form": e12_ok}
    return "heuristic-rediscovery-of-s0", result, sol1_zero and e12_ok, certs


def _ham_eval(args):
    st = _state(args)
    t, q, p, kap = st.t, st.q, st.p, st.kappa
    res = {"state": st.to_json()}
    certs = {}
    if t.t4 is INFINITY:
        hs = [h3(i, q, p, t, kap) for i in (1, 2, 3)]
        res["h3"] = [cjson(v) for v in hs]
        certs["sum_minus_p"] = cjson(sum(hs) - p)
        if t.t1 == 0 and t.t2 == 1:
            res["h_single"] = cjson(h_single(q, p, t.t3, kap))
    else:
        Hs = [H4(i, q, p, t, kap) for i in (1, 2, 3, 4)]
        res["H4"] = [cjson(v) for v in Hs]
    return "hamiltonians", res, None, certs


def _flow_run(args):
    st = _state(args, numeric=True)
    m = args.moving
    start = complex(st.t[m]) if st.t[m] is not INFINITY else None
    if start is None:
        raise UsageError(f"t{m} is infinite")
    if args.path:
        path = [start] + [complex(parse_scalar(z.strip())) for z in args.path.split(";") if z.strip()]
    elif m == 3:
        path = unit_path(st, args.length)
    else:
        path = [start, start + args.length * 1j]
    tr = flow(st, path, args.tol, moving=m)
    if args.csv:
        tr.to_csv(args.csv)
    end = tr.state_at(len(tr.samples) - 1, st.kappa)
    res = {"state": st.to_json(), "path": [cjson(z) for z in path], "end": end.to_json(),
           "trajectory": tr.meta_json()}
    certs = {}
    passed = None
    if m == 3 and st.t.t4 is INFINITY and complex(st.t.t1) == 0 and complex(st.t.t2) == 1:
        r = pvi_residual(tr, st.kappa)
        certs["pvi_residual"] = r
        passed = r < 1e-6
    return "hamiltonian-flow", res, passed, certs


def _fuchsian_build(args):
    st = _state(args, t4_finite=args.form == "coeff4")
    if args.form == "coeff4":
        coeffs = build_coeff4(st)
    else:
        coeffs = build_coeff3(st)
        if args.form == "normal3":
            coeffs = normalize3(coeffs, st)
    ex = {}
    for pole in coeffs.poles:
        c = "inf" if pole.loc is INFINITY else cjson(pole.loc)
        key = c if isinstance(c, str) else f"{c[0]!r}{c[1]:+}i"
        ex[key] = [cjson(v) for v in exponents(coeffs, pole.loc)]
    certs = {}
    passed = None
    if args.form != "normal3":
        obs = apparent_obstruction(coeffs, st.q, (0, 2))
        certs["obstruction_at_q"] = cjson(obs)
        passed = obs == 0 if st.field == "exact" else abs(complex(obs)) < 1e-9
    return "fuchsian-construction", {"state": st.to_json(), "form": args.form,
                                     "coeffs": coeffs.to_json(), "exponents": ex}, passed, certs


def _coalesce(args):
    st = _state(args)
    j, k = args.j, args.k
    if j == k:
        raise UsageError("j and k must differ")
    i = ({1, 2, 3} - {j, k}).pop()
    data = coalesce(st, i, j, k)
    delta, D = discriminant(st, i, j, k)
    tij = st.t[i] - st.t[j]
    m_ok = data.M - (data.L - st.p)
    d_ok = D + tij * delta
    exact = st.field == "exact"
    passed = (m_ok == 0 and d_ok == 0) if exact else (abs(complex(m_ok)) < 1e-9 and abs(complex(d_ok)) < 1e-9)
    res = {"state": st.to_json(), "i": i, "j": j, "k": k, "coeffs": data.coeffs.to_json(),
           "L": cjson(data.L), "M": cjson(data.M), "N": cjson(data.N),
           "Delta": cjson(delta), "D": cjson(D), "predicted_trace": cjson(coalesced_trace(delta))}
    return "coalescence-data", res, passed, {"M_minus_L_plus_p": cjson(m_ok), "D_plus_tij_Delta": cjson(d_ok)}


def _rh_compute(args):
    st = _state(args, numeric=True)
    r = rh_compute(st, args.tol)
    doc = r.to_json()
    m = r.monodromy
    k = st.kappa.to_approx()
    expect = [2 * cmath.cos(math.pi * k[n]) for n in (1, 2, 3)] + [-2 * cmath.cos(math.pi * k.k4)]
    trace_err = max(abs(a - b) for a, b in zip(r.traces, expect))
    certs = dict(doc["certificates"], trace_errors=trace_err, residual=r.residual)
    passed = (max(m.det_defects) < 1e-9 and trace_err < 1e-6 and m.product_defect < 1e-6
              and r.residual < 1e-6)
    return "riemann-hilbert-map", dict(doc, state=st.to_json()), passed, certs


def _words(args):
    if args.word is not None:
        return (tuple(GroupWord.parse(args.word).letters),)
    return tuple((g,) for g in GroupWord.parse(args.gens).letters)


def _verify_main(args):
    words = _words(args)
    if args.state:
        st = _state(args, numeric=True)
        reps = [verify_main(st, list(w), args.tol) for w in words]
        ok = all(r.passed for r in reps)
        return "backlund-invariance-of-trace-coordinates", {
            "state": st.to_json(), "reports": [r.to_json() for r in reps]}, ok, {
            "max_defect": max(r.defect for r in reps)}
    res = main_suite(args.seed, args.n, words, args.tol, negative_control=args.negative_control)
    return "backlund-invariance-of-trace-coordinates", res.to_json(), res.passed, res.summary


def _verify_isomono(args):
    if args.state:
        st = _state(args, numeric=True)
        rep = verify_isomonodromic(st, unit_path(st, args.length), args.tol)
        return "isomonodromy-of-flow", dict(rep.to_json(), state=st.to_json()), rep.passed, {
            "max_defect": rep.max_defect}
    res = isomono_suite(args.seed, args.n, args.length, args.tol)
    return "isomonodromy-of-flow", res.to_json(), res.passed, res.summary


def _ladder_csv(path, cases):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["case", "eps", "difference", "iso_defect", "re_delta", "im_delta"])
        for n, c in enumerate(cases):
            for r in c["rungs"]:
                w.writerow([n, repr(r["eps"]), repr(r["difference"]), repr(r["iso_defect"]),
                            repr(r["delta"][0]), repr(r["delta"][1])])


def _verify_coalesce(args):
    ladder = tuple(float(v) for v in args.ladder.split(","))
    if args.j == args.k:
        raise UsageError("j and k must differ")
    if args.state:
        st = _state(args, numeric=True)
        rep = coalescence_flow(st, args.j, args.k, ladder, args.tol)
        cases = [dict(rep.to_json(), state=st.to_json())]
        res, passed, summary = {"cases": cases}, rep.passed, {"slope": rep.slope, "monotone": rep.monotone}
    else:
        sr = coalescence_suite(args.seed, args.n, args.j, args.k, args.tol, ladder, args.min_pass)
        res, passed, summary = sr.to_json(), sr.passed, sr.summary
        cases = res["cases"]
    if args.csv:
        _ladder_csv(args.csv, json.loads(json.dumps(cases, default=cjson)))
    return "coalescence-trace-limit", res, passed, summary


def _verify_takano(args):
    from .takano import gamma_curve, random_takano_params

    res = takano_suite(args.seed, args.n, args.curve_points)
    if args.csv:
        rng = random.Random(args.seed)
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["case", "log_abs_x", "arg_x"])
            for case in range(1, 6):
                for x in gamma_curve(random_takano_params(rng, case), args.curve_points):
                    w.writerow([case, repr(x.log_abs), repr(x.arg)])
    return "takano-domain-geometry", res.to_json(), res.passed, res.summary


_HANDLERS = {
    ("weyl", "apply"): _weyl_apply,
    ("theta", None): _theta,
    ("backlund", "apply"): _backlund_apply,
    ("backlund", "heuristic"): _backlund_heuristic,
    ("ham", "eval"): _ham_eval,
    ("flow", "run"): _flow_run,
    ("fuchsian", "build"): _fuchsian_build,
    ("coalesce", None): _coalesce,
    ("rh", "compute"): _rh_compute,
    ("verify", "main"): _verify_main,
    ("verify", "isomono"): _verify_isomono,
    ("verify", "coalesce"): _verify_coalesce,
    ("verify", "takano"): _verify_takano,
}


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    key = (args.command, getattr(args, "action", None))
    start = time.perf_counter()
    try:
        claim, result, passed, certs = _HANDLERS[key](args)
    except UsageError as exc:
        print(f"pvi-rh-lab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (LabError, ValueError, ArithmeticError, IndexError, OSError, KeyError, TypeError) as exc:
        print(f"pvi-rh-lab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    elapsed = None if args.reproducible else time.perf_counter() - start
    report = envelope(" ".join(k for k in key if k), claim, result, passed=passed,
                      tolerances={"tol": getattr(args, "tol", None)}, certificates=certs,
                      seed=args.seed, config=_cfg(args), wall_time=elapsed)
    text = dumps(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_FAIL if passed is not None and not passed else EXIT_OK


def main(argv=None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
