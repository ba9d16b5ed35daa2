"""Command-line front end.

Kernels travel as JSON documents:

    {"kind": "stoch", "dom": ["a"], "cod": ["x", "y"],
     "matrix": [["1/2"], ["1/2"]]}

Rows are indexed by the codomain and columns by the domain, so a column
is the distribution at one input.  Entries are integers or reduced
fraction strings "n/d"; multi kernels instead carry "images", one array
of codomain labels per domain element.

Exit codes: 0 analysis completed (and positive where boolean), 1 a
property or equation failed (e.g. abscont false, non-idempotent input to
split), 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any

from . import golden
from .asrel import UnsupportedKind, abs_cont, ase_kernels, refute_abs_cont
from .envelopes import Flavor, NotBalanced, env_cell, env_check_markov_laws
from .functors import conditional, io_relation
from .idempotents import (
    NoSplitUpTo,
    NotEndo,
    NotIdempotent,
    SplitData,
    blackwell_split,
    cauchy_schwarz,
    classify,
    search_split,
)
from .kernel import (
    FinMarkovError,
    FinObject,
    Kernel,
    Kind,
    ShapeMismatch,
    kernel_equal,
    validate,
)
from .supports import EmptySupport, SupportData, split_support, support

DEFAULT_SEED = 20240801


class ParseError(FinMarkovError):
    """Malformed kernel document."""


def _parse_entry(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ParseError(f"{where}: entries must be integers or 'n/d' strings, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{where}: bad fraction {value!r}") from exc
    raise ParseError(f"{where}: bad entry {value!r}")


def parse_kernel(text: str) -> Kernel:
    """Parse a kernel document; fractions are re-reduced, the column law
    is enforced."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return kernel_from_doc(doc)


def kernel_from_doc(doc: Any) -> Kernel:
    if not isinstance(doc, dict):
        raise ParseError("kernel document must be a JSON object")
    for field in ("kind", "dom", "cod"):
        if field not in doc:
            raise ParseError(f"missing field {field!r}")
    try:
        kind = Kind(doc["kind"])
    except ValueError:
        raise ParseError(f"unknown kind {doc['kind']!r}") from None
    for field in ("dom", "cod"):
        labels = doc[field]
        if not isinstance(labels, list) or not all(isinstance(l, str) for l in labels):
            raise ParseError(f"field {field!r} must be an array of strings")
    try:
        dom = FinObject(tuple(doc["dom"]))
        cod = FinObject(tuple(doc["cod"]))
    except FinMarkovError as exc:
        raise ParseError(str(exc)) from exc

    if kind is Kind.MULTI:
        images = doc.get("images")
        if images is None:
            raise ParseError("multi kernels carry 'images'")
        if not isinstance(images, list) or len(images) != dom.size:
            raise ParseError("'images' must list one array per domain element")
        rows = [[False] * dom.size for _ in range(cod.size)]
        for j, image in enumerate(images):
            if not isinstance(image, list):
                raise ParseError(f"images[{j}] must be an array of labels")
            for lbl in image:
                if not isinstance(lbl, str) or lbl not in cod.labels:
                    raise ParseError(f"images[{j}]: unknown codomain label {lbl!r}")
                rows[cod.index(lbl)][j] = True
        k = Kernel(kind, dom, cod, tuple(tuple(r) for r in rows))
    else:
        matrix = doc.get("matrix")
        if matrix is None:
            raise ParseError("stoch/signed kernels carry 'matrix'")
        if not isinstance(matrix, list) or len(matrix) != cod.size:
            raise ParseError(f"'matrix' must have {cod.size} rows")
        rows = []
        for i, row in enumerate(matrix):
            if not isinstance(row, list) or len(row) != dom.size:
                raise ParseError(f"matrix row {i} must have {dom.size} entries")
            rows.append(tuple(_parse_entry(v, f"matrix[{i}][{j}]") for j, v in enumerate(row)))
        k = Kernel(kind, dom, cod, tuple(rows))
    bad = validate(k)
    if bad is not None:
        raise ParseError(f"validation failed: {bad.message}")
    return k


def _emit_entry(v: Fraction) -> Any:
    if v.denominator == 1:
        return int(v)
    return f"{v.numerator}/{v.denominator}"


def kernel_to_doc(k: Kernel) -> dict:
    doc: dict[str, Any] = {
        "kind": k.kind.value,
        "dom": list(k.dom.labels),
        "cod": list(k.cod.labels),
    }
    if k.kind is Kind.MULTI:
        doc["images"] = [
            [k.cod.labels[i] for i in range(k.cod.size) if k.matrix[i][j]]
            for j in range(k.dom.size)
        ]
    else:
        doc["matrix"] = [[_emit_entry(v) for v in row] for row in k.matrix]
    return doc


def emit_kernel(k: Kernel, pretty: bool = False) -> str:
    return json.dumps(kernel_to_doc(k), indent=2 if pretty else None)


def _read_kernel(path: str) -> Kernel:
    if path == "-":
        return parse_kernel(sys.stdin.read())
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_kernel(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _support_doc(sd: SupportData) -> dict:
    doc = {
        "support": list(sd.supp_object.labels),
        "inclusion": kernel_to_doc(sd.inclusion),
        "factorization": kernel_to_doc(sd.factorization),
    }
    if sd.projection is not None:
        doc["projection"] = kernel_to_doc(sd.projection)
    return doc


def _split_doc(sd: SplitData) -> dict:
    return {
        "middle": list(sd.middle.labels),
        "classes": [list(c) for c in sd.classes],
        "transient": list(sd.transient),
        "projection": kernel_to_doc(sd.projection),
        "inclusion": kernel_to_doc(sd.inclusion),
    }


# ---------------------------------------------------------------------------
# subcommands: each returns (exit_code, payload)
# ---------------------------------------------------------------------------


def _cmd_validate(args) -> tuple[int, dict]:
    try:
        k = _read_kernel(args.kernel)
    except ParseError as exc:
        msg = str(exc)
        if msg.startswith("validation failed"):
            return 1, {"valid": False, "error": msg}
        raise
    return 0, {"valid": True, "kind": k.kind.value, "dom": list(k.dom.labels), "cod": list(k.cod.labels)}


def _cmd_classify(args) -> tuple[int, dict]:
    e = _read_kernel(args.kernel)
    report = classify(e)
    payload = report.flags()
    payload["witnesses"] = {k: list(v) for k, v in report.witnesses.items()}
    return (0 if report.idempotent else 1), payload


def _cmd_split(args) -> tuple[int, dict]:
    e = _read_kernel(args.kernel)
    if e.kind is Kind.MULTI:
        result = search_split(e, args.max_size)
        if isinstance(result, NoSplitUpTo):
            return 1, {"split": None, "no_split_up_to": result.max_size}
        return 0, {"split": _split_doc(result)}
    try:
        sd = blackwell_split(e)
    except NotIdempotent:
        return 1, {"split": None, "error": "kernel is not idempotent"}
    return 0, {"split": _split_doc(sd)}


def _cmd_support(args) -> tuple[int, dict]:
    p = _read_kernel(args.kernel)
    return 0, _support_doc(support(p))


def _cmd_split_support(args) -> tuple[int, dict]:
    p = _read_kernel(args.kernel)
    try:
        sd = split_support(p)
    except EmptySupport:
        return 1, {"error": "empty support has no projection"}
    return 0, _support_doc(sd)


def _cmd_abscont(args) -> tuple[int, dict]:
    q = _read_kernel(args.dominating)
    p = _read_kernel(args.dominated)
    verdict = abs_cont(q, p)
    payload: dict[str, Any] = {"abs_cont": verdict}
    if not verdict:
        witness = refute_abs_cont(q, p)
        assert witness is not None
        payload["witness"] = {
            "element": witness.element,
            "low": kernel_to_doc(witness.low),
            "high": kernel_to_doc(witness.high),
        }
    return (0 if verdict else 1), payload


def _cmd_ase(args) -> tuple[int, dict]:
    p = _read_kernel(args.reference)
    f = _read_kernel(args.left)
    g = _read_kernel(args.right)
    verdict = ase_kernels(p, f, g, args.w_size)
    return (0 if verdict else 1), {"almost_surely_equal": verdict}


def _cmd_upsilon(args) -> tuple[int, dict]:
    p = _read_kernel(args.kernel)
    return 0, kernel_to_doc(io_relation(p))


def _cmd_conditional(args) -> tuple[int, dict]:
    f = _read_kernel(args.kernel)
    return 0, kernel_to_doc(conditional(f, args.split))


def _cmd_envelope_check(args) -> tuple[int, dict]:
    e = _read_kernel(args.kernel)
    flavor = Flavor(args.flavor)
    try:
        cell = env_cell(e.dom, e, flavor)
    except (NotIdempotent, NotBalanced) as exc:
        return 1, {"accepted": False, "error": str(exc)}
    report = env_check_markov_laws(cell, seed=args.seed)
    payload = {
        "accepted": True,
        "counit_left": report.counit_left,
        "counit_right": report.counit_right,
        "coassociative": report.coassociative,
        "cocommutative": report.cocommutative,
        "discard_natural": report.discard_natural,
    }
    return (0 if report.all_pass else 1), payload


def _cmd_cauchy_schwarz(args) -> tuple[int, dict]:
    f = _read_kernel(args.first)
    g = _read_kernel(args.second)
    h = _read_kernel(args.third)
    inst = cauchy_schwarz(f, g, h)
    payload = {
        "antecedent": inst.antecedent,
        "consequent": inst.consequent,
        "implication_ok": inst.implication_ok,
    }
    return (0 if inst.implication_ok else 1), payload


# ---------------------------------------------------------------------------
# golden verification suite
# ---------------------------------------------------------------------------


def _fixture_kernel(name: str) -> Kernel:
    from importlib.resources import files

    text = files("finmarkov").joinpath("fixtures").joinpath(name).read_text(encoding="utf-8")
    return parse_kernel(text)


def _golden_checks() -> list[tuple[str, bool]]:
    checks: list[tuple[str, bool]] = []

    def run(name: str, fn) -> None:
        try:
            checks.append((name, bool(fn())))
        except FinMarkovError:
            checks.append((name, False))

    strong = _fixture_kernel("e_strong.json")
    static = _fixture_kernel("e_static.json")
    balanced = _fixture_kernel("e_balanced4.json")
    multi = _fixture_kernel("e_multi_upset.json")
    chain = _fixture_kernel("e_multi_chain3.json")
    signed = _fixture_kernel("e_signed3.json")
    q = _fixture_kernel("remark_q.json")
    p = _fixture_kernel("remark_p.json")

    run("fixtures match built-ins", lambda: all(
        kernel_equal(a, b)
        for a, b in [
            (strong, golden.strong_idempotent()),
            (static, golden.static_idempotent()),
            (balanced, golden.balanced_idempotent()),
            (multi, golden.multi_upset_idempotent()),
            (chain, golden.multi_chain3_idempotent()),
            (signed, golden.signed_idempotent()),
        ]
    ))

    def flags(e, det, st, sg, bal):
        r = classify(e)
        return (r.idempotent, r.deterministic, r.static, r.strong, r.balanced) == (
            True, det, st, sg, bal,
        )

    run("strong example flags", lambda: flags(strong, False, False, True, True))
    run("static example flags", lambda: flags(static, False, True, False, True))
    run("balanced example flags", lambda: flags(balanced, False, False, False, True))

    def splits(e, expected_iota, expected_pi, classes, transient):
        sd = blackwell_split(e)
        from .kernel import compose, identity

        ok = kernel_equal(compose(sd.projection, sd.inclusion), identity(sd.middle, Kind.STOCH))
        ok = ok and kernel_equal(compose(sd.inclusion, sd.projection), e)
        ok = ok and sd.inclusion.matrix == expected_iota.matrix
        ok = ok and sd.projection.matrix == expected_pi.matrix
        ok = ok and set(map(frozenset, sd.classes)) == set(map(frozenset, classes))
        ok = ok and set(sd.transient) == set(transient)
        return ok

    run(
        "strong example splitting",
        lambda: splits(strong, *golden.strong_split(), [("0", "1")], []),
    )
    run(
        "static example splitting",
        lambda: splits(static, *golden.static_split(), [("1",), ("2",)], ["3"]),
    )
    run(
        "balanced example splitting",
        lambda: splits(balanced, *golden.balanced_split(), [("1", "2"), ("3",)], ["4"]),
    )

    run("multi upset not balanced", lambda: not classify(multi).balanced and classify(multi).idempotent)
    run("3-chain pattern not balanced", lambda: not classify(chain).balanced and classify(chain).idempotent)
    run("signed example not balanced", lambda: not classify(signed).balanced and classify(signed).idempotent)
    run(
        "multi upset does not split",
        lambda: isinstance(search_split(multi, 2), NoSplitUpTo),
    )
    run("domination holds", lambda: abs_cont(q, p))
    run(
        "domination breaks after the point",
        lambda: not abs_cont(
            _push_delta(q, "0"),
            _push_delta(p, "0"),
        ),
    )
    return checks


def _push_delta(k: Kernel, label: str) -> Kernel:
    from .kernel import compose, delta_kernel

    return compose(k, delta_kernel(k.dom, label, k.kind))


def _cmd_verify_paper(args) -> tuple[int, dict]:
    checks = _golden_checks()
    ok = all(passed for _, passed in checks)
    payload = {
        "checks": [{"name": name, "pass": passed} for name, passed in checks],
        "all_pass": ok,
    }
    return (0 if ok else 1), payload


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finmarkov",
        description="Exact analysis of finite stochastic, signed, and multivalued kernels.",
    )
    parser.add_argument("--format", choices=["json", "pretty"], default="json")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for sampled checks")
    parser.add_argument("--max-size", dest="max_size", type=int, default=2,
                        help="middle-object bound for exhaustive splitting search")
    sub = parser.add_subparsers(dest="command", required=True)

    def kernel_cmd(name, fn, help_text):
        s = sub.add_parser(name, help=help_text)
        s.add_argument("kernel", help="kernel document path ('-' for stdin)")
        s.set_defaults(fn=fn)
        return s

    kernel_cmd("validate", _cmd_validate, "check the column law")
    kernel_cmd("classify", _cmd_classify, "idempotent taxonomy flags")
    kernel_cmd("split", _cmd_split, "class decomposition (stoch) or exhaustive search (multi)")
    kernel_cmd("support", _cmd_support, "support object, inclusion, factorization")
    kernel_cmd("split-support", _cmd_split_support, "support with projection")
    kernel_cmd("upsilon", _cmd_upsilon, "input-output relation of a stochastic kernel")

    s = sub.add_parser("abscont", help="does the first kernel dominate the second?")
    s.add_argument("dominating")
    s.add_argument("dominated")
    s.set_defaults(fn=_cmd_abscont)

    s = sub.add_parser("ase", help="almost-sure equality of two kernels w.r.t. a reference")
    s.add_argument("reference")
    s.add_argument("left")
    s.add_argument("right")
    s.add_argument("--w-size", dest="w_size", type=int, default=1)
    s.set_defaults(fn=_cmd_ase)

    s = sub.add_parser("conditional", help="conditional of a joint kernel given its first factor")
    s.add_argument("kernel")
    s.add_argument("--split", type=int, required=True, help="size of the first output factor")
    s.set_defaults(fn=_cmd_conditional)

    s = sub.add_parser("envelope-check", help="comonoid laws of an envelope cell")
    s.add_argument("kernel")
    s.add_argument("--flavor", choices=["karoubi", "blackwell"], default="blackwell")
    s.set_defaults(fn=_cmd_envelope_check)

    s = sub.add_parser("cauchy-schwarz", help="one instance of the Cauchy-Schwarz implication")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("third")
    s.set_defaults(fn=_cmd_cauchy_schwarz)

    s = sub.add_parser("verify-paper", help="run the golden example suite")
    s.set_defaults(fn=_cmd_verify_paper)
    return parser


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        code, payload = args.fn(args)
    except ParseError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2
    except (UnsupportedKind, ShapeMismatch, NotEndo, FinMarkovError) as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}), file=sys.stderr)
        return 2
    if args.format == "pretty" and args.command == "verify-paper":
        width = max(len(c["name"]) for c in payload["checks"])
        for check in payload["checks"]:
            print(f"{'PASS' if check['pass'] else 'FAIL'}  {check['name']:<{width}}")
        print(f"{'PASS' if payload['all_pass'] else 'FAIL'}  overall")
    else:
        print(json.dumps(payload, indent=2 if args.format == "pretty" else None))
    return code


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
