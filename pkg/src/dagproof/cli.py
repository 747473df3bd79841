"""Command-line surface: prove, check, compress, encode, translate, oracle,
and batch benchmarking.

Exit codes: 0 success / verdict positive, 1 verdict negative, 2 input error,
3 resource cap.  Structured output goes to stdout (one document per
invocation); diagnostics go to stderr.
"""

import argparse
import json
import random
import sys
import time

from . import compress as compress_mod
from . import encode as encode_mod
from . import generators, hsc, nd
from .formula import (Imp, Falsum, ParseError, GraphFormatError,
                      parse_formula, parse_graph, purely_implicational,
                      to_text, weight)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_CAP = 3

CSV_HEADER = "# dagproof-v1"
RUN_COLUMNS = [
    "id", "input", "rho_weight", "proved", "h", "phi",
    "w_tree", "w_prime", "w_flat", "w_star", "coherent", "certified",
    "cleanse_method", "bounds_ok", "status",
    "t_prove_ms", "t_interp_ms", "t_compress_ms",
]


def _read_text(arg):
    if arg == "-":
        return sys.stdin.read()
    try:
        with open(arg, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError:
        return None


def _formula_arg(arg):
    """Treat the argument as a file when one exists, else as formula text."""
    if arg == "-":
        return sys.stdin.read()
    text = None
    if any(ch in arg for ch in "/.") or arg.endswith(".txt"):
        text = _read_text(arg)
    return text if text is not None else arg


def _fail_input(message):
    print(f"error: {message}", file=sys.stderr)
    return EXIT_INPUT


def _emit(doc, fmt, text_renderer=None):
    if fmt == "text" and text_renderer is not None:
        sys.stdout.write(text_renderer(doc))
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")


def cmd_prove(args):
    try:
        f = parse_formula(_formula_arg(args.formula))
    except ParseError as e:
        return _fail_input(e)
    if not purely_implicational(f):
        return _fail_input(f"not purely implicational: {to_text(f)}")
    try:
        proof = hsc.prove_lm(f, timeout=args.timeout)
    except hsc.ProofSearchTimeout as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    if proof is not None:
        doc = hsc.sc_to_document(proof)
        _emit(doc, args.format, lambda _: hsc.render_sc(proof))
        return EXIT_OK
    if args.countermodel:
        model = encode_mod.kripke_valid(f, args.max_worlds)
        doc = {"provable": False,
               "countermodel": model.to_document() if model else None,
               "max_worlds": args.max_worlds}
        _emit(doc, args.format)
    else:
        print("not provable", file=sys.stderr)
    return EXIT_NEGATIVE


def cmd_check(args):
    text = _read_text(args.proof)
    if text is None:
        return _fail_input(f"cannot read {args.proof}")
    try:
        doc = json.loads(text)
        d = nd.from_document(doc)
    except (json.JSONDecodeError, nd.DocumentError) as e:
        return _fail_input(e)
    report = nd.check_local_correctness(d)
    if not report.ok:
        out = {"certified": False,
               "violations": [list(v) for v in report.violations[:20]]}
        _emit(out, args.format)
        return EXIT_NEGATIVE
    has_sep = any(n.rule == nd.SEP for n in d.nodes.values())
    if has_sep:
        choice = nd.proves_modified(d)
        if choice is not None:
            _emit({"certified": True, "mode": "modified",
                   "choices": {str(k): v for k, v in sorted(choice.items())}},
                  args.format)
            return EXIT_OK
        _emit({"certified": False, "mode": "modified"}, args.format)
        return EXIT_NEGATIVE
    sets = nd.assumption_sets(d)
    residue = sorted(to_text(f) for f in sets[d.root])
    if not residue:
        _emit({"certified": True, "mode": "plain"}, args.format)
        return EXIT_OK
    _emit({"certified": False, "mode": "plain", "residue": residue},
          args.format)
    return EXIT_NEGATIVE


def _tree_for_input(text, timeout):
    """Formula text or proof document -> tree deduction (proving it first
    when given a formula)."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return nd.from_document(json.loads(stripped)), None
    f = parse_formula(stripped)
    proof = hsc.prove_lm(f, timeout=timeout)
    if proof is None:
        return None, f
    return hsc.sc_to_nd(proof), f


def _run_record(idx, label, f, timeout, thread_cap):
    rec = dict.fromkeys(RUN_COLUMNS, "")
    rec["id"] = idx
    rec["input"] = label
    rec["rho_weight"] = weight(f)
    t0 = time.monotonic()
    try:
        proof = hsc.prove_lm(f, timeout=timeout)
    except hsc.ProofSearchTimeout:
        rec["proved"] = ""
        rec["status"] = "prover-timeout"
        return rec, None
    t1 = time.monotonic()
    rec["proved"] = int(proof is not None)
    if proof is None:
        rec["status"] = "unprovable"
        rec["_times"] = (t1 - t0, 0.0, 0.0)
        return rec, None
    tree = hsc.sc_to_nd(proof)
    t2 = time.monotonic()
    try:
        trace = compress_mod.compress_proof(tree, thread_cap=thread_cap)
    except nd.ThreadCapExceeded:
        rec["status"] = "thread-cap"
        rec["_times"] = (t1 - t0, t2 - t1, 0.0)
        return rec, None
    except compress_mod.CompressError as e:
        rec["status"] = f"failed: {type(e).__name__}"
        rec["coherent"] = 0
        rec["certified"] = 0
        rec["_times"] = (t1 - t0, t2 - t1, 0.0)
        return rec, None
    t3 = time.monotonic()
    b = trace.bounds
    rec.update(h=b["h"], phi=b["phi"], w_tree=b["w_tree"],
               w_prime=b["w_prime"], w_flat=b["w_flat"], w_star=b["w_star"])
    rec["coherent"] = int(trace.verdicts.get("coherent", False))
    rec["certified"] = int(trace.verdicts.get("star_proved", False))
    rec["cleanse_method"] = trace.verdicts.get("cleanse_method", "")
    bounds_ok = (b["w_prime"] <= b["h"] * b["phi"]
                 and b["w_flat"] <= 2 * b["w_prime"])
    rec["bounds_ok"] = int(bounds_ok)
    rec["status"] = "ok" if (bounds_ok and rec["certified"]) else "failed"
    rec["_times"] = (t1 - t0, t2 - t1, t3 - t2)
    return rec, trace


def _write_csv(rows, out, timings):
    out.write(CSV_HEADER + "\n")
    out.write(",".join(RUN_COLUMNS) + "\n")
    for rec in rows:
        times = rec.pop("_times", None)
        if timings and times is not None:
            rec["t_prove_ms"] = f"{times[0] * 1000:.1f}"
            rec["t_interp_ms"] = f"{times[1] * 1000:.1f}"
            rec["t_compress_ms"] = f"{times[2] * 1000:.1f}"
        else:
            rec["t_prove_ms"] = rec["t_interp_ms"] = rec["t_compress_ms"] = ""
        out.write(",".join(str(rec[c]) for c in RUN_COLUMNS) + "\n")


def cmd_compress(args):
    text = _read_text(args.input) if args.input != "-" else sys.stdin.read()
    if text is None:
        text = args.input  # literal formula text
    if args.batch:
        rows = []
        ok = True
        for i, line in enumerate(ln for ln in text.splitlines() if ln.strip()):
            f = parse_formula(line.strip())
            rec, _ = _run_record(i, to_text(f), f, args.timeout,
                                 args.thread_cap)
            ok = ok and rec["status"] == "ok"
            rows.append(rec)
        out = open(args.csv, "w", encoding="utf-8") if args.csv else sys.stdout
        try:
            _write_csv(rows, out, args.timings)
        finally:
            if args.csv:
                out.close()
        return EXIT_OK if ok else EXIT_NEGATIVE
    try:
        tree, f = _tree_for_input(text, args.timeout)
    except (ParseError, nd.DocumentError, json.JSONDecodeError) as e:
        return _fail_input(e)
    except hsc.ProofSearchTimeout as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    if tree is None:
        print(f"not provable: {to_text(f)}", file=sys.stderr)
        return EXIT_NEGATIVE
    try:
        trace = compress_mod.compress_proof(tree, thread_cap=args.thread_cap)
    except nd.ThreadCapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except compress_mod.CompressError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NEGATIVE
    if args.emit == "dot":
        stages = {"tree": trace.tree, "prime": trace.prime,
                  "flat": trace.flat, "star": trace.star}
        for name, stage in stages.items():
            path = f"{args.out}/{name}.dot"
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(nd.to_dot(stage, name=name))
            print(f"wrote {path}", file=sys.stderr)
    _emit(trace.to_document(), args.format)
    return EXIT_OK


def cmd_encode(args):
    text = _read_text(args.graph)
    if text is None:
        return _fail_input(f"cannot read {args.graph}")
    try:
        g = parse_graph(text)
        f = encode_mod.encode_hamiltonian(g)
    except (GraphFormatError, encode_mod.DeskBoundError) as e:
        return _fail_input(e)
    if args.negate:
        f = Imp(f, Falsum)
    if args.translate:
        f = encode_mod.statman_translate(f)
    print(to_text(f))
    if args.oracle:
        verdict = encode_mod.hamiltonian_oracle(g)
        print("hamiltonian" if verdict else "non-hamiltonian")
    return EXIT_OK


def cmd_translate(args):
    try:
        f = parse_formula(_formula_arg(args.formula))
    except ParseError as e:
        return _fail_input(e)
    print(to_text(encode_mod.statman_translate(f)))
    return EXIT_OK


def cmd_oracle(args):
    text = _read_text(args.graph)
    if text is None:
        return _fail_input(f"cannot read {args.graph}")
    try:
        g = parse_graph(text)
    except GraphFormatError as e:
        return _fail_input(e)
    try:
        ham = encode_mod.hamiltonian_oracle(g)
        sat = encode_mod.classical_sat(encode_mod.encode_hamiltonian(g))
    except encode_mod.DeskBoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    _emit({"hamiltonian": ham, "alpha_satisfiable": sat,
           "agree": ham == sat}, args.format)
    return EXIT_OK if ham else EXIT_NEGATIVE


def cmd_bench(args):
    rows = []
    summary_ratios = []
    star_ratios = []
    agree_all = True
    if args.generator == "random-imp":
        rng = random.Random(args.seed)
        items = []
        seen = set()
        while len(items) < args.count:
            f = generators.random_implicational(rng, args.max_weight)
            if f not in seen:
                seen.add(f)
                items.append(f)
        for i, f in enumerate(items):
            rec, trace = _run_record(i, to_text(f), f, args.timeout,
                                     args.thread_cap)
            rows.append(rec)
            if trace is not None:
                proof_height = hsc.sc_height(hsc.prove_lm(f))
                summary_ratios.append(proof_height / weight(f))
                star_ratios.append(trace.bounds["w_star"] / weight(f))
    elif args.generator == "exhaustive-imp":
        variables = tuple("pqrstu"[: args.vars])
        for i, f in enumerate(
                generators.implicational_formulas(variables, args.max_weight)):
            rec, trace = _run_record(i, to_text(f), f, args.timeout,
                                     args.thread_cap)
            model = encode_mod.kripke_valid(f, args.max_worlds)
            agree = (rec["proved"] == 1) == (model is None)
            agree_all = agree_all and agree
            rec["status"] += ";kripke-agree" if agree else ";KRIPKE-DISAGREE"
            rows.append(rec)
            if trace is not None:
                proof_height = hsc.sc_height(hsc.prove_lm(f))
                summary_ratios.append(proof_height / weight(f))
                star_ratios.append(trace.bounds["w_star"] / weight(f))
    elif args.generator == "all-graphs":
        for i, g in enumerate(generators.all_digraphs(args.n)):
            f = encode_mod.encode_hamiltonian(g)
            ham = encode_mod.hamiltonian_oracle(g)
            sat = encode_mod.classical_sat(f)
            agree = ham == sat
            agree_all = agree_all and agree
            rec = dict.fromkeys(RUN_COLUMNS, "")
            rec["id"] = i
            rec["input"] = f"graph-{args.n}-{i}"
            rec["rho_weight"] = weight(f)
            rec["proved"] = int(sat)
            rec["status"] = "sat-oracle-agree" if agree else "SAT-ORACLE-DISAGREE"
            rows.append(rec)
    else:
        return _fail_input(f"unknown generator {args.generator!r}")
    out = open(args.csv, "w", encoding="utf-8") if args.csv else sys.stdout
    try:
        _write_csv(rows, out, args.timings)
        if summary_ratios:
            out.write(f"# summary max_height_ratio="
                      f"{max(summary_ratios):.4f} max_star_ratio="
                      f"{max(star_ratios):.4f}\n")
        if args.generator in ("all-graphs", "exhaustive-imp"):
            out.write(f"# summary agreement={'all' if agree_all else 'BROKEN'}\n")
    finally:
        if args.csv:
            out.close()
    return EXIT_OK if agree_all else EXIT_NEGATIVE


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dagproof",
        description="prove, check, compress, and encode deductions in the "
                    "implicational fragment of minimal logic")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "text", "dot"),
                       default="json")
        p.add_argument("--max-worlds", type=int, default=6)
        p.add_argument("--thread-cap", type=int,
                       default=compress_mod.DEFAULT_THREAD_CAP)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--timeout", type=float, default=None,
                       help="proof search timeout in seconds")

    p = sub.add_parser("prove", help="decide a purely implicational formula")
    p.add_argument("formula")
    p.add_argument("--countermodel", action="store_true")
    common(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check", help="certify a proof document")
    p.add_argument("proof")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("compress", help="run the compression pipeline")
    p.add_argument("input", help="formula text, proof document file, or -")
    p.add_argument("--emit", choices=("dot",))
    p.add_argument("--out", default=".")
    p.add_argument("--batch", action="store_true",
                   help="input is one formula per line")
    p.add_argument("--csv")
    p.add_argument("--timings", action="store_true")
    common(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("encode", help="Hamiltonian-path formula for a graph")
    p.add_argument("graph")
    p.add_argument("--negate", action="store_true")
    p.add_argument("--translate", action="store_true")
    p.add_argument("--oracle", action="store_true")
    common(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("translate",
                       help="translate into the implicational fragment")
    p.add_argument("formula")
    common(p)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("oracle", help="brute-force Hamiltonicity verdict")
    p.add_argument("graph")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="batch pipeline benchmarking to CSV")
    p.add_argument("generator",
                   choices=("random-imp", "exhaustive-imp", "all-graphs"))
    p.add_argument("--max-weight", type=int, default=12)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--vars", type=int, default=2)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--csv")
    p.add_argument("--timings", action="store_true")
    common(p)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
