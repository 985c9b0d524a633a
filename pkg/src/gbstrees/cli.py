"""Command-line front end: ``gbstrees <command> ...`` prints one JSON report.

Exit codes: 0 computed / passed, 1 a property violation was found (the
report carries a certificate), 2 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import corpus
from .arith import (
    compat_falsify, compat_verify, const1_evaluator, gcd_handles, lcm_cleanup, lcm_handles, prime_factors,
    tree_evaluator, verify_certificate,
)
from .ball import DEFAULT_MAX_VERTICES, BallLimitError, expand_ball
from .britton import britton_reduce, is_elliptic, translation_length
from .cylinders import (
    CylinderError, build_tree_of_cylinders, check_acylindricity, check_admissibility, check_idempotence,
    collapse_star, compute_cylinders, path_stabilizer_order, quotient_pattern,
)
from .io import DocumentError, ball_from, dumps, from_data, move_from, to_data, validate, word_body
from .model import INF, GbsGraph, ModelError, TreeHandle
from .moves import (
    MarkingError, MoveError, TranslatorError, apply_move, dominates, is_reduced, onto_witness_holds,
    same_deformation_space, verify_marking, verify_small_domination,
)
from .sampling import word_set

OK, VIOLATION, INPUT_ERROR = 0, 1, 2


class InputError(Exception):
    pass


# -- inputs -----------------------------------------------------------------

class Inputs:
    """Reads input files, remembering a content hash per flag."""

    def __init__(self):
        self.hashes: dict = {}

    def raw(self, flag: str, ref: str) -> bytes:
        if ref.startswith("corpus:"):
            data = corpus.text(ref[len("corpus:"):]).encode("utf-8")
        else:
            try:
                data = Path(ref).read_bytes()
            except OSError as exc:
                raise InputError(f"--{flag}: cannot read {ref}: {exc.strerror}") from None
        self.hashes[flag] = hashlib.sha256(data).hexdigest()
        return data

    def json(self, flag: str, ref: str):
        try:
            return json.loads(self.raw(flag, ref).decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise InputError(f"--{flag}: malformed JSON: {exc}") from None

    def doc(self, flag: str, ref: str, kind: str = None):
        return from_data(self.json(flag, ref), kind)

    def handle(self, flag: str, ref: str) -> TreeHandle:
        d = self.doc(flag, ref)
        if isinstance(d, GbsGraph):
            return TreeHandle.full(d)
        if not isinstance(d, TreeHandle):
            raise InputError(f"--{flag}: expected a handle or gbs document")
        return d

    def ball(self, args):
        data = self.json("ball", args.ball)
        table = self.doc("table", args.table, "table") if args.table else None
        if "table" not in data and table is None and args.ball.startswith("corpus:") and "_ball" in args.ball:
            table = self.doc("table", args.ball.replace("_ball", "_table"), "table")
        return ball_from(data, "ball", table)

    def words(self, args, graph: GbsGraph) -> list:
        out = []
        if getattr(args, "word", None):
            out.append(self.doc("word", args.word, "word"))
        spec = getattr(args, "words", None)
        if spec:
            if spec.startswith("sample:"):
                out.extend(word_set(graph, int(spec[len("sample:"):]), args.seed))
            else:
                data = self.json("words", spec)
                items = data.get("words", []) if isinstance(data, dict) else data
                out.extend(from_data(w, "word") for w in items)
        if not out:
            raise InputError("no words given (use --word or --words)")
        for i, w in enumerate(out):
            errs = w.problems(graph)
            if errs:
                raise InputError(f"word {i}: {'; '.join(errs)}")
        return out


def _evaluator(inputs: Inputs, flag: str, ref: str):
    data = inputs.json(flag, ref)
    if isinstance(data, dict) and data.get("kind") == "evaluator":
        if data.get("evaluator") != "const1":
            raise InputError(f"--{flag}: unknown evaluator {data.get('evaluator')!r}")
        return ("const1", data)
    d = from_data(data)
    T = TreeHandle.full(d) if isinstance(d, GbsGraph) else d
    if not isinstance(T, TreeHandle):
        raise InputError(f"--{flag}: expected a handle, gbs or evaluator document")
    return ("tree", T)


def _make_evaluator(spec, graph: GbsGraph):
    kind, val = spec
    return const1_evaluator(graph) if kind == "const1" else tree_evaluator(val)


def _eval_doc(spec) -> dict:
    kind, val = spec
    return dict(val) if kind == "const1" else to_data(val)


# -- report -----------------------------------------------------------------

class Report:
    def __init__(self, command: str, args, inputs: Inputs):
        self.command = command
        self.args = args
        self.inputs = inputs
        self.verdicts: dict = {}
        self.certificates: list = []
        self.result: dict = {}
        self.code = OK

    def violation(self, cert: dict):
        self.certificates.append(cert)
        self.code = VIOLATION

    def data(self, elapsed=None) -> dict:
        out = dict(self.result)
        out.update(command=self.command, inputs=dict(sorted(self.inputs.hashes.items())), seed=self.args.seed,
                   verdicts=self.verdicts, certificates=self.certificates)
        if elapsed is not None:
            out["timing"] = {"seconds": round(elapsed, 6)}
        return out


def _order(o):
    return "inf" if o == INF else o


# -- commands ---------------------------------------------------------------

def cmd_validate(args, inputs, rep):
    data = inputs.json("doc", args.doc)
    graph = inputs.doc("graph", args.graph, "gbs") if args.graph else None
    r = validate(data, graph)
    rep.result["validation"] = r.to_data()
    rep.verdicts["valid"] = r.valid
    if not r.valid:
        rep.violation({"type": "invalid-document", "document": data, "errors": list(r.errors),
                       **({"graph": to_data(graph)} if graph else {})})


def cmd_lengths(args, inputs, rep):
    T = inputs.handle("tree", args.tree)
    ws = inputs.words(args, T.master)
    if args.threads > 1:
        with ThreadPoolExecutor(args.threads) as ex:
            ls = list(ex.map(lambda w: translation_length(w, T), ws))
    else:
        ls = [translation_length(w, T) for w in ws]
    if args.words:
        rep.result["lengths"] = ls
        rep.verdicts["elliptic"] = [x == 0 for x in ls]
    else:
        rep.result["length"] = ls[0]
        rep.verdicts["elliptic"] = ls[0] == 0


def cmd_reduce(args, inputs, rep):
    g = inputs.handle("tree", args.tree).master
    (w,) = inputs.words(args, g)
    r = britton_reduce(w, g, cyclic=args.cyclic)
    rep.result["reduced"] = {"word": word_body(r.word), "vertex": r.vertex,
                             "is_cyclically_reduced": r.is_cyclically_reduced,
                             "conjugator": word_body(r.conjugator), "syllables": r.length}


def cmd_moves(args, inputs, rep):
    T = inputs.handle("tree", args.tree)
    op = args.op
    if op == "apply":
        if not args.move:
            raise InputError("--move is required for --op apply")
        mv = move_from(inputs.json("move", args.move))
        H = apply_move(T, mv)
        rep.result["handle"] = to_data(H)
        rep.verdicts["translator_verified"] = True
    elif op == "reduced":
        r = is_reduced(T)
        rep.result["reduced"] = r.to_data()
        rep.verdicts["reduced"] = r.reduced
        if not r.reduced:
            rep.certificates.append({"type": "not-reduced", "handle": to_data(T), "witness": list(r.witness)})
    elif op in ("dominates", "same-space", "small-domination"):
        if not args.other:
            raise InputError(f"--other is required for --op {op}")
        T2 = inputs.handle("other", args.other)
        if op == "dominates":
            r = dominates(T, T2)
            rep.verdicts["dominates"] = r.dominates
            if not r.dominates:
                rep.certificates.append({"type": "not-dominated", "t1": to_data(T), "t2": to_data(T2),
                                         "witness": word_body(r.witness), "component": list(r.component)})
        elif op == "same-space":
            rep.verdicts["same_deformation_space"] = same_deformation_space(T, T2)
        else:
            flags = inputs.json("small-flags", args.small_flags) if args.small_flags else {}
            r = verify_small_domination(T, T2, flags)
            rep.result["small_domination"] = {
                "dominates": r.dominates, "edge_groups_elliptic": r.edge_groups_elliptic,
                "not_elliptic": [list(c) for c in r.new_elliptic], "unflagged": [list(c) for c in r.unflagged],
                "note": r.note}
            rep.verdicts["holds"] = r.holds
    elif op == "marking":
        if not (args.other and args.images):
            raise InputError("--other and --images are required for --op marking")
        A, B = T.master, inputs.handle("other", args.other).master
        images = {k: from_data(v, "word") for k, v in inputs.json("images", args.images).items()}
        r = verify_marking(images, A, B)
        rep.result["marking"] = {"valid": r.valid, "failures": list(r.failures), "note": r.note}
        rep.verdicts["marking_valid"] = r.valid
        if not r.valid:
            rep.violation({"type": "marking", "a": to_data(A), "b": to_data(B),
                           "images": {k: word_body(v) for k, v in sorted(images.items())},
                           "failures": list(r.failures)})


def cmd_primes(args, inputs, rep):
    T = inputs.handle("tree", args.tree)
    rep.result["factors"] = [{"edge": p.source_edge, "handle": to_data(p.handle),
                              "trivial_splitting": p.trivial_splitting} for p in prime_factors(T)]


def cmd_gcd(args, inputs, rep):
    rep.result["handle"] = to_data(gcd_handles(inputs.handle("t1", args.t1), inputs.handle("t2", args.t2)))


def cmd_lcm(args, inputs, rep):
    H = lcm_handles(inputs.handle("t1", args.t1), inputs.handle("t2", args.t2))
    c = lcm_cleanup(H)
    rep.result["handle"] = to_data(H)
    rep.result["cleanup"] = {"redundant_vertices": [list(v) for v in c.redundant_vertices], "note": c.note}


def cmd_compat_verify(args, inputs, rep):
    T1, T2 = inputs.handle("t1", args.t1), inputs.handle("t2", args.t2)
    r = compat_verify(T1, T2, inputs.handle("that", args.that))
    rep.verdicts["compat"] = r.verdict
    rep.result["explanation"] = r.explanation
    if r.verdict == "compatible":
        rep.certificates.append({"type": "refinement", "t1": to_data(T1), "t2": to_data(T2),
                                 "that": to_data(r.certificate["refinement"])})


def cmd_compat_falsify(args, inputs, rep):
    if args.verify_certificate:
        report = inputs.json("verify-certificate", args.verify_certificate)
        ok = _verify_all(report)
        rep.verdicts["certificates_valid"] = ok
        if not all(ok):
            rep.code = VIOLATION
        return
    if not (args.l1 and args.l2):
        raise InputError("--l1 and --l2 are required")
    graph = inputs.doc("graph", args.graph, "gbs") if args.graph else None
    s1, s2 = _evaluator(inputs, "l1", args.l1), _evaluator(inputs, "l2", args.l2)
    for kind, val in (s1, s2):
        if kind == "tree":
            if graph is not None and val.master != graph:
                raise InputError("evaluators are over different presentations")
            graph = val.master
    if graph is None:
        raise InputError("no presentation: give --graph when both evaluators are synthetic")
    l1, l2 = _make_evaluator(s1, graph), _make_evaluator(s2, graph)
    r = compat_falsify(l1, l2, args.budget, args.seed, args.threads)
    rep.result["params"] = {"budget": args.budget}
    rep.result["samples_used"] = r.samples_used
    rep.result["explanation"] = r.explanation
    rep.verdicts["compat"] = r.verdict
    if r.verdict == "incompatible":
        c = r.certificate
        rep.violation({"type": "compat-falsify", "graph": to_data(graph), "l1": _eval_doc(s1), "l2": _eval_doc(s2),
                       "g": word_body(c["g"]), "h": word_body(c["h"]), "values": c["values"]})


def cmd_ball(args, inputs, rep):
    T = inputs.handle("tree", args.tree)
    b = expand_ball(T, args.radius, max_vertices=args.max_ball_vertices, interior_margin=args.interior_margin)
    rep.result["ball"] = to_data(b.tree)
    rep.result["vertices"] = len(b)
    rep.result["params"] = {"radius": args.radius, "interior_margin": args.interior_margin}


def cmd_cylinders(args, inputs, rep):
    ball = inputs.ball(args)
    adm = check_admissibility(ball)
    rep.result["admissibility"] = {"violations": list(adm.violations), "unchecked": list(adm.unchecked),
                                   "interior": list(adm.interior)}
    rep.verdicts["admissible"] = adm.passed
    if not adm.passed:
        rep.violation({"type": "admissibility", "ball": to_data(ball), "violations": list(adm.violations)})
        return
    try:
        dec = compute_cylinders(ball)
    except CylinderError as exc:
        rep.verdicts["cylinders"] = False
        rep.violation({"type": "cylinders", "ball": to_data(ball), "error": str(exc)})
        return
    rep.verdicts["cylinders"] = True
    rep.result["cylinders"] = [{"id": c.id, "class": c.cls, "stab": c.stab, "edges": list(c.edges),
                                "vertices": list(c.vertices), "subtree": c.is_subtree} for c in dec.cylinders]


def cmd_tc(args, inputs, rep):
    ball = inputs.ball(args)
    tc = build_tree_of_cylinders(ball)
    if not args.no_collapse:
        tc = collapse_star(tc)
    q = quotient_pattern(tc)
    rep.result["tree"] = to_data(tc.to_ball())
    rep.result["collapsed"] = tc.collapsed
    rep.result["degenerate"] = tc.degenerate
    rep.result["quotient"] = {"nodes": list(q.nodes), "edges": [list(e) for e in q.edges], "star_center": q.star_center()}
    rep.result["qh"] = list(tc.qh)


def cmd_acyl(args, inputs, rep):
    ball = inputs.ball(args)
    r = check_acylindricity(ball, args.k, args.C)
    rep.result["params"] = {"k": args.k, "C": args.C}
    rep.result["paths_checked"] = r.paths_checked
    rep.result["interior"] = list(r.interior)
    rep.verdicts["acylindrical"] = r.passed
    if not r.passed:
        path, order = r.witness
        rep.violation({"type": "acyl", "ball": to_data(ball), "k": args.k, "C": args.C,
                       "path": list(path), "order": _order(order)})


def cmd_idem(args, inputs, rep):
    ball = inputs.ball(args)
    r = check_idempotence(ball)
    rep.result["interior_nodes"] = r.interior_nodes
    rep.result["detail"] = r.detail
    rep.verdicts["idempotent"] = r.passed
    if not r.passed:
        rep.violation({"type": "idem", "ball": to_data(ball), "detail": r.detail})


def cmd_report_verify(args, inputs, rep):
    report = inputs.json("report", args.report)
    ok = _verify_all(report)
    rep.verdicts["certificates_valid"] = ok
    if not all(ok):
        rep.code = VIOLATION


# -- certificate checks -----------------------------------------------------

def _verify_all(report) -> list:
    if not isinstance(report, dict) or "certificates" not in report:
        raise InputError("not a report: missing certificates")
    return [bool(verify_one(c)) for c in report["certificates"]]


def verify_one(c: dict) -> bool:
    """Recheck one certificate from its embedded documents."""
    kind = c.get("type")
    if kind == "compat-falsify":
        graph = from_data(c["graph"], "gbs")

        def ev(d):
            if d.get("kind") == "evaluator":
                return const1_evaluator(graph)
            x = from_data(d)
            return tree_evaluator(TreeHandle.full(x) if isinstance(x, GbsGraph) else x)
        cert = {"g": from_data(c["g"], "word"), "h": from_data(c["h"], "word"), "values": c["values"]}
        return verify_certificate(ev(c["l1"]), ev(c["l2"]), cert)
    if kind == "acyl":
        ball = from_data(c["ball"], "ball")
        path, inner = c["path"], ball.interior_vertices()
        if len(path) != c["k"] + 2 or len(set(path)) != len(path) or not set(path) <= inner:
            return False
        edges = []
        for a, b in zip(path, path[1:]):
            e = ball.path(a, b)
            if len(e) != 1:
                return False
            edges.append(e[0].stab)
        return path_stabilizer_order(ball.table, edges) > c["C"]
    if kind == "idem":
        return not check_idempotence(from_data(c["ball"], "ball")).passed
    if kind == "admissibility":
        return bool(check_admissibility(from_data(c["ball"], "ball")).violations)
    if kind == "cylinders":
        try:
            compute_cylinders(from_data(c["ball"], "ball"))
        except CylinderError:
            return True
        return False
    if kind == "invalid-document":
        graph = from_data(c["graph"], "gbs") if "graph" in c else None
        return not validate(c["document"], graph).valid
    if kind == "marking":
        A, B = from_data(c["a"], "gbs"), from_data(c["b"], "gbs")
        images = {k: from_data(v, "word") for k, v in c["images"].items()}
        return not verify_marking(images, A, B).valid
    if kind == "not-reduced":
        return onto_witness_holds(from_data(c["handle"], "handle"), tuple(c["witness"]))
    if kind == "not-dominated":
        T1, T2 = from_data(c["t1"], "handle"), from_data(c["t2"], "handle")
        w = from_data(c["witness"], "word")
        return is_elliptic(w, T1) and not is_elliptic(w, T2)
    if kind == "refinement":
        T1, T2, H = (from_data(c[k], "handle") for k in ("t1", "t2", "that"))
        return compat_verify(T1, T2, H).verdict == "compatible"
    return False


# -- parser -----------------------------------------------------------------

COMMANDS = {
    "validate": cmd_validate, "lengths": cmd_lengths, "reduce": cmd_reduce, "moves": cmd_moves,
    "primes": cmd_primes, "gcd": cmd_gcd, "lcm": cmd_lcm, "compat-verify": cmd_compat_verify,
    "compat-falsify": cmd_compat_falsify, "ball": cmd_ball, "cylinders": cmd_cylinders, "tc": cmd_tc,
    "acyl": cmd_acyl, "idem": cmd_idem, "report-verify": cmd_report_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--max-ball-vertices", type=int, default=DEFAULT_MAX_VERTICES)
    common.add_argument("--interior-margin", type=int, default=1)
    common.add_argument("--words", help="JSON list of word documents, or sample:N for N seeded words")
    common.add_argument("--timing", action="store_true", help="add wall-clock timing (breaks byte-identity)")

    p = argparse.ArgumentParser(prog="gbstrees", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    s = add("validate", "check a document against its invariants")
    s.add_argument("--doc", required=True)
    s.add_argument("--graph", help="graph for word documents")

    s = add("lengths", "translation lengths of words in a tree")
    s.add_argument("--tree", required=True)
    s.add_argument("--word")

    s = add("reduce", "Britton-reduce a word")
    s.add_argument("--tree", required=True, help="gbs or handle document")
    s.add_argument("--word", required=True)
    s.add_argument("--cyclic", action="store_true")

    s = add("moves", "apply moves; reducedness, domination, markings")
    s.add_argument("--tree", required=True)
    s.add_argument("--op", choices=["apply", "reduced", "dominates", "same-space", "small-domination", "marking"],
                   default="apply")
    s.add_argument("--move", help="move JSON (as in a handle lineage)")
    s.add_argument("--other", help="second handle (or target graph for --op marking)")
    s.add_argument("--images", help="marking: JSON object generator -> word")
    s.add_argument("--small-flags", help="small-domination: JSON object vertex -> bool")

    s = add("primes", "prime factors of a tree")
    s.add_argument("--tree", required=True)
    for name in ("gcd", "lcm"):
        s = add(name, f"{name} of two collapses of one master")
        s.add_argument("--t1", required=True)
        s.add_argument("--t2", required=True)
    s = add("compat-verify", "check a candidate common refinement")
    s.add_argument("--t1", required=True)
    s.add_argument("--t2", required=True)
    s.add_argument("--that", required=True)

    s = add("compat-falsify", "search for a violation of the axis dichotomy by l1 + l2")
    s.add_argument("--l1")
    s.add_argument("--l2")
    s.add_argument("--graph", help="presentation for synthetic evaluators")
    s.add_argument("--budget", type=int, default=5000)
    s.add_argument("--verify-certificate", help="recheck the certificates of a saved report instead")

    s = add("ball", "expand a ball of the master Bass-Serre tree")
    s.add_argument("--tree", required=True)
    s.add_argument("--radius", type=int, required=True)

    for name, help_ in (("cylinders", "admissibility and cylinders of a ball"),
                        ("tc", "tree of cylinders (collapsed unless --no-collapse)"),
                        ("acyl", "(k,C)-acylindricity on the interior"),
                        ("idem", "idempotence of the collapsed tree of cylinders")):
        s = add(name, help_)
        s.add_argument("--ball", required=True)
        s.add_argument("--table", help="table document when the ball does not embed one")
        if name == "tc":
            s.add_argument("--no-collapse", action="store_true")
        if name == "acyl":
            s.add_argument("--k", type=int, required=True)
            s.add_argument("--C", type=int, required=True)

    s = add("report-verify", "recheck the certificates shipped in a report")
    s.add_argument("--report", required=True)
    return p


def run(argv=None) -> tuple:
    """``(exit code, report text)``; never raises on bad input."""
    args = build_parser().parse_args(argv)
    inputs = Inputs()
    rep = Report(args.command, args, inputs)
    t0 = time.perf_counter()
    try:
        COMMANDS[args.command](args, inputs, rep)
    except (InputError, DocumentError, ModelError, MoveError, MarkingError, CylinderError, BallLimitError,
            ValueError) as exc:
        err = {"command": args.command, "error": str(exc), "inputs": dict(sorted(inputs.hashes.items())),
               "seed": args.seed}
        return INPUT_ERROR, dumps(err)
    except TranslatorError as exc:  # internal bug sentinel
        return INPUT_ERROR, dumps({"command": args.command, "error": f"internal: {exc}"})
    elapsed = time.perf_counter() - t0 if args.timing else None
    return rep.code, dumps(rep.data(elapsed))


def main(argv=None) -> int:
    code, text = run(argv)
    sys.stdout.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
