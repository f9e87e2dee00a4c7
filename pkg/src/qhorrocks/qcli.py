"""Command line front end.

Subcommands mirror the library pipeline:

    cohomology   table of h0, h1, h2 over the diagonal and spinor strips
    invariants   extract the triple of a bundle file (prints a triple file)
    synthesize   build a monad bundle file from a triple file
    roundtrip    synthesize, re-extract and compare against the input triple
    strip-acm    remove split ACM line bundle summands from a gamma bundle
    iso          compare the triples of two bundle or triple files
    stability    section-vanishing test and jumping determinants
    random-module / random-triple   seeded generators for property testing
    examples     list the built-in fixture names

Files may be paths or `example:<name>` references to the built-in corpus.
Exit codes: 0 success, 1 property failure, 2 parse or validation error,
3 precondition violation.
"""

from __future__ import annotations

import argparse
import random
import sys

from .exactla import DEFAULT_PRIME, Matrix, get_field, quotient_data, span_basis
from .bipoly import BiForm, ParseError
from .linecoh import h0_mult_on_split, split_dims
from .presheaf import (
    MonadPresentation,
    NotSurjective,
    PrereqVanishingFailed,
    VerificationFailed,
    strip_acm,
)
from .flmod import FinLengthModule, InvalidModule, minimal_presentation, sigma_modules, socle_subspace
from .horrocks import (
    HorrocksTriple,
    NotGammaForm,
    NotMinimalGamma,
    extract_invariants,
    roundtrip,
    synthesize,
    triple_iso,
)
from .stability import ShapeMismatch, le_potier_check
from . import fixtures, textio


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _read_source(token: str, field) -> str:
    if token.startswith("example:") or token in fixtures.fixture_names():
        name = token.split(":", 1)[1] if ":" in token else token
        try:
            rep = fixtures.load_fixture(name, field)
        except KeyError as exc:
            raise CliError(str(exc), 2) from exc
        return textio.format_bundle_text(rep)
    try:
        with open(token, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {token}: {exc}", 2) from exc


def _load_bundle(token: str, args):
    text = _read_source(token, get_field(args.field))
    try:
        return textio.parse_bundle_text(text)
    except (ParseError, NotSurjective, ValueError) as exc:
        raise CliError(f"bundle load failed: {exc}", 2) from exc


def _load_triple(token: str, args) -> HorrocksTriple:
    text = _read_source(token, get_field(args.field))
    try:
        return textio.parse_triple_text(text)
    except (ParseError, InvalidModule, ValueError) as exc:
        raise CliError(f"triple load failed: {exc}", 2) from exc


def _load_any(token: str, args):
    text = _read_source(token, get_field(args.field))
    lines = [l for l in text.splitlines() if l.strip()]
    if len(lines) < 2:
        raise CliError(f"{token}: not a module, bundle or triple file", 2)
    try:
        if lines[1].strip() == "triple":
            return textio.parse_triple_text(text)
        return textio.parse_bundle_text(text)
    except (ParseError, InvalidModule, NotSurjective, ValueError) as exc:
        raise CliError(f"load failed: {exc}", 2) from exc


def _parse_window(spec: str) -> tuple[int, int]:
    lo, hi = spec.split("..")
    return int(lo), int(hi)


def _emit(records: bool, pairs, text_lines):
    if records:
        for k, v in pairs:
            print(f"{k}={v}")
    else:
        for line in text_lines:
            print(line)


# ---------------------------------------------------------------------------
# commands


def cmd_cohomology(args) -> int:
    rep = _load_bundle(args.bundle, args)
    lo, hi = _parse_window(args.window)
    table = rep.table(lo, hi)
    pairs = []
    lines = [f"{'d':>4} | {'O(d)':^11} | {'S1(d)':^11} | {'S2(d)':^11}", "-" * 48]
    for d in range(lo, hi + 1):
        cells = []
        for kind in ("o", "s1", "s2"):
            h = table[(kind, d)]
            cells.append(f"{h[0]:>3} {h[1]:>3} {h[2]:>3}")
            for i in (0, 1, 2):
                pairs.append((f"h{i}.{kind}.{d}", h[i]))
        lines.append(f"{d:>4} | {cells[0]} | {cells[1]} | {cells[2]}")
    _emit(args.format == "records", pairs, ["cohomology (h0 h1 h2 per column)"] + lines)
    return 0


def cmd_invariants(args) -> int:
    rep = _load_bundle(args.bundle, args)
    ext = extract_invariants(rep)
    if args.format == "records":
        t = ext.triple
        pairs = [("module.dims", " ".join(f"{d}:{t.module.dim(d)}" for d in t.module.support()))]
        for d in sorted(t.W):
            pairs.append((f"W.dim.{d}", t.W[d].cols))
        for d in sorted(t.V):
            pairs.append((f"V.dim.{d}", t.V[d].cols))
        _emit(True, pairs, [])
    else:
        sys.stdout.write(textio.format_triple_text(ext.triple))
    return 0


def cmd_synthesize(args) -> int:
    triple = _load_triple(args.triple, args)
    monad = synthesize(triple, rng=random.Random(args.seed))
    sys.stdout.write(textio.format_bundle_text(monad))
    return 0


def cmd_roundtrip(args) -> int:
    triple = _load_triple(args.triple, args)
    report = roundtrip(triple, trials=args.trials, rng=random.Random(args.seed))
    pairs = [("ok", int(report.ok))]
    lines = []
    for note in report.notes:
        lines.append(note)
    lines.append("roundtrip: " + ("pass" if report.ok else "FAIL"))
    _emit(args.format == "records", pairs, lines)
    return 0 if report.ok else 1


def cmd_strip_acm(args) -> int:
    rep = _load_bundle(args.bundle, args)
    if isinstance(rep, MonadPresentation):
        raise CliError("summand stripping applies to gamma-form bundle files", 3)
    stripped, removed = strip_acm(rep)
    for t in removed:
        print(f"# removed O{t}", file=sys.stderr)
    sys.stdout.write(textio.format_bundle_text(stripped))
    return 0


def cmd_iso(args) -> int:
    left = _load_any(args.left, args)
    right = _load_any(args.right, args)
    t1 = left if isinstance(left, HorrocksTriple) else extract_invariants(left).triple
    t2 = right if isinstance(right, HorrocksTriple) else extract_invariants(right).triple
    witness = triple_iso(t1, t2, trials=args.trials, rng=random.Random(args.seed))
    if witness is None:
        _emit(args.format == "records", [("isomorphic", 0), ("trials", args.trials)],
              [f"no isomorphism found in {args.trials} trials (not a disproof)"])
        return 1
    _emit(args.format == "records", [("isomorphic", 1), ("trials", witness.trials_used)],
          [f"isomorphic (found at trial {witness.trials_used})"])
    return 0


def cmd_stability(args) -> int:
    rep = _load_bundle(args.bundle, args)
    if isinstance(rep, MonadPresentation):
        raise CliError("stability report needs a gamma-form bundle file", 3)
    report = le_potier_check(rep)
    pairs = [
        ("h0", report.h0),
        ("h0.right", report.h0_right),
        ("h0.left", report.h0_left),
        ("stable", int(report.stable)),
    ]
    lines = [
        f"h0(E) = {report.h0}, h0(E(1,-1)) = {report.h0_right}, h0(E(-1,1)) = {report.h0_left}",
        "le Potier stable" if report.stable else "not le Potier stable",
    ]
    if report.det_st is not None:
        pairs.append(("det.st.repeated", int(report.det_st.has_repeated_root)))
        pairs.append(("det.uv.repeated", int(report.det_uv.has_repeated_root)))
        lines.append(f"det(st block): {report.det_st.describe()}")
        lines.append(f"det(uv block): {report.det_uv.describe()}")
    _emit(args.format == "records", pairs, lines)
    return 0


def _parse_dims(spec: str) -> dict[int, int]:
    out = {}
    for chunk in spec.split(","):
        n, d = chunk.strip().split("@")
        if int(n):
            out[int(d)] = int(n)
    if not out:
        raise CliError("empty dimension specification", 2)
    return out


def random_module(field, rng, dims: dict[int, int]) -> FinLengthModule:
    """A random module with the requested piece dimensions.

    Built as a random quotient of a free module with one generator block per
    requested degree: degreewise, a random complement of the carried
    relations is killed until the piece has the requested dimension.
    """
    lo, hi = min(dims), max(dims)
    gens = tuple((-d, -d) for d in sorted(dims) for _ in range(dims[d]))
    kill: dict[int, Matrix] = {}
    reps: dict[int, Matrix] = {}
    proj: dict[int, Matrix] = {}
    got: dict[int, int] = {}
    for d in range(lo, hi + 2):
        amb = sum(split_dims(0, gens, (d, d)))
        want = dims.get(d, 0) if d <= hi else 0
        killed = []
        if d - 1 in kill and kill[d - 1].cols:
            for name in ("x0", "x1", "x2", "x3"):
                mul = h0_mult_on_split(gens, BiForm.variable(field, name), (d - 1, d - 1))
                killed.extend(list((mul @ kill[d - 1]).columns()))
        killed = list(span_basis(field, killed, amb).columns())
        guard = 0
        while amb - span_basis(field, killed, amb).cols > want:
            v = field.zeros(amb, 1)[:, 0]
            for i in range(amb):
                v[i] = field.random_scalar(rng)
            killed.append(v)
            guard += 1
            if guard > 500:
                raise CliError("random module generation stalled", 2)
        kill[d] = span_basis(field, killed, amb)
        r, p = quotient_data(field, amb, list(kill[d].columns()))
        reps[d], proj[d] = r, p
        got[d] = r.cols
    for d, n in dims.items():
        if got.get(d, 0) != n:
            raise CliError(f"requested dimension {n} at degree {d} is not attainable", 2)
    ops = {}
    for d in range(lo, hi + 1):
        for k, name in enumerate(("x0", "x1", "x2", "x3")):
            mul = h0_mult_on_split(gens, BiForm.variable(field, name), (d, d))
            ops[(k, d)] = proj[d + 1] @ (mul @ reps[d])
    m = FinLengthModule(field, {d: n for d, n in got.items() if d <= hi and n}, ops)
    return m.validate()


def random_triple(field, rng, dims: dict[int, int]) -> HorrocksTriple:
    """A random module with random admissible socle subspaces on both sides."""
    m = random_module(field, rng, dims)
    pres = minimal_presentation(m)
    t = sigma_modules(pres)
    w_vecs: dict[int, list] = {}
    v_vecs: dict[int, list] = {}
    for which, store in (("m10", w_vecs), ("m01", v_vecs)):
        soc = socle_subspace(t, which)
        fam = t.m10 if which == "m10" else t.m01
        for d, basis in soc.items():
            take = rng.randrange(0, basis.cols + 1)
            if take == 0:
                continue
            vecs = []
            for _ in range(take):
                v = field.zeros(fam[d].dim, 1)[:, 0]
                coeff = [field.random_scalar(rng) for _ in range(basis.cols)]
                for cidx in range(basis.cols):
                    v = field.reduce(v + basis.col(cidx) * coeff[cidx])
                vecs.append(v)
            span = span_basis(field, vecs, fam[d].dim)
            if span.cols:
                store[d] = list(span.columns())
    return HorrocksTriple.build(m, w_vecs, v_vecs)


def cmd_random_module(args) -> int:
    field = get_field(args.field if args.prime is None else args.prime)
    m = random_module(field, random.Random(args.seed), _parse_dims(args.dims))
    sys.stdout.write(textio.format_module_text(m))
    return 0


def cmd_random_triple(args) -> int:
    field = get_field(args.field if args.prime is None else args.prime)
    t = random_triple(field, random.Random(args.seed), _parse_dims(args.dims))
    sys.stdout.write(textio.format_triple_text(t))
    return 0


def cmd_examples(args) -> int:
    for name in fixtures.fixture_names():
        print(name)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qhorrocks", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--field", default=str(DEFAULT_PRIME),
                       help="field for built-in examples: a prime or 'rationals'")
        p.add_argument("--format", choices=("text", "records"), default="text")
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--trials", type=int, default=200)

    p = sub.add_parser("cohomology", help="h0/h1/h2 table over diagonal and spinor strips")
    p.add_argument("bundle")
    p.add_argument("--window", default="-4..4")
    common(p)
    p.set_defaults(fn=cmd_cohomology)

    p = sub.add_parser("invariants", help="extract the classifying triple")
    p.add_argument("bundle")
    common(p)
    p.set_defaults(fn=cmd_invariants)

    p = sub.add_parser("synthesize", help="build a monad from a triple file")
    p.add_argument("triple")
    common(p)
    p.set_defaults(fn=cmd_synthesize)

    p = sub.add_parser("roundtrip", help="synthesize then re-extract and compare")
    p.add_argument("triple")
    common(p)
    p.set_defaults(fn=cmd_roundtrip)

    p = sub.add_parser("strip-acm", help="remove split ACM line bundle summands")
    p.add_argument("bundle")
    common(p)
    p.set_defaults(fn=cmd_strip_acm)

    p = sub.add_parser("iso", help="decide isomorphism of two bundles or triples")
    p.add_argument("left")
    p.add_argument("right")
    common(p)
    p.set_defaults(fn=cmd_iso)

    p = sub.add_parser("stability", help="section vanishing and jumping determinants")
    p.add_argument("bundle")
    common(p)
    p.set_defaults(fn=cmd_stability)

    p = sub.add_parser("random-module", help="seeded random module, e.g. --dims 1@0")
    p.add_argument("--prime", type=int, default=None)
    p.add_argument("--dims", required=True, help="dimension spec n@d[,n@d...]")
    p.add_argument("--degrees", default=None, help="accepted for compatibility; dims fix the window")
    common(p)
    p.set_defaults(fn=cmd_random_module)

    p = sub.add_parser("random-triple", help="seeded random triple with admissible subspaces")
    p.add_argument("--prime", type=int, default=None)
    p.add_argument("--dims", required=True)
    p.add_argument("--degrees", default=None)
    common(p)
    p.set_defaults(fn=cmd_random_triple)

    p = sub.add_parser("examples", help="list built-in example names")
    common(p)
    p.set_defaults(fn=cmd_examples)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (NotMinimalGamma, NotGammaForm, ShapeMismatch, PrereqVanishingFailed) as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return 3
    except (ParseError, InvalidModule, NotSurjective, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
