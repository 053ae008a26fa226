"""Command-line surface: validate, classify, strictify, pullback, induce.

Every command prints one canonical JSON report to stdout and uses exit
codes 0 (all checks pass), 1 (a check fails, or is undecided under
--strict), 2 (usage or parse errors).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Dict, List, Optional

from .core import (
    AInftyError,
    CheckReport,
    check_F1,
    check_isofibration,
    check_quasi_equivalence,
    kernel_acyclicity,
)
from .documents import (
    DocumentError,
    RawCertificates,
    load_category,
    load_certificates,
    load_functor,
    serialize_category,
    serialize_functor,
)
from .pullback import build_pullback, certify_fibration_closure, induce_functor
from .strictify import strictify


def _report_json(command: str, checks: Dict[str, CheckReport],
                 extra: Optional[dict] = None) -> dict:
    payload = {
        "command": command,
        "checks": {
            name: {
                "verdict": rep.verdict,
                "witnesses": list(rep.witnesses),
                "details": rep.details,
            }
            for name, rep in checks.items()
        },
    }
    verdicts = [rep.verdict for rep in checks.values()]
    if any(v == "fail" for v in verdicts):
        payload["overall"] = "fail"
    elif any(v == "undecided" for v in verdicts):
        payload["overall"] = "undecided"
    else:
        payload["overall"] = "pass"
    if extra:
        payload.update(extra)
    return payload


def _finish(payload: dict, strict: bool) -> int:
    print(json.dumps(payload, sort_keys=True, indent=2, default=str))
    if payload["overall"] == "fail":
        return 1
    if payload["overall"] == "undecided" and strict:
        return 1
    return 0


def _load_any(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        head = fh.readline().strip()
    if head == "acat":
        return "category", load_category(path)
    if head == "afun":
        return "functor", load_functor(path).functor
    raise DocumentError(path, 1, f"unknown document header {head!r}")


def _expected_field(args):
    from .fields import Field
    name = getattr(args, "field", None)
    if name is None:
        return None
    if name == "Q":
        return Field.rationals()
    if getattr(args, "p", None) is None:
        raise DocumentError("<args>", 0, "--field Fp needs --p <prime>")
    return Field.prime(args.p)


def _check_field(args, path: str, fld) -> None:
    want = _expected_field(args)
    if want is not None and fld != want:
        raise DocumentError(path, 1,
                            f"document field {fld.kind} does not match --field")


def cmd_validate(args) -> int:
    checks: Dict[str, CheckReport] = {}
    for path in args.paths:
        try:
            kind, value = _load_any(path)
            fld = value.fld if kind == "category" else value.source.fld
            _check_field(args, path, fld)
            details = {"kind": kind, "arity_bound": value.arity_bound,
                       "total": value.total}
            checks[path] = CheckReport("pass", [], details)
        except (DocumentError, AInftyError, OSError) as exc:
            checks[path] = CheckReport("fail", [str(exc)])
    return _finish(_report_json("validate", checks), args.strict)


def _certs(args) -> RawCertificates:
    if getattr(args, "certificates", None):
        return load_certificates(args.certificates)
    return RawCertificates()


def cmd_classify(args) -> int:
    doc = load_functor(args.functor)
    functor = doc.functor
    _check_field(args, args.functor, functor.source.fld)
    certs = _certs(args)
    tags = set(certs.isolifts) | set(certs.essentials) or {"self"}
    tag = "self" if "self" in tags else (sorted(tags)[0] if tags else "self")
    checks: Dict[str, CheckReport] = {}
    f1 = check_F1(functor)
    checks["f1"] = CheckReport(
        "pass" if f1.passed else "fail",
        [] if f1.passed else [f"pair {f1.failure[0]}, degree {f1.failure[1]}"],
        {"kernel_dims": {f"{x},{y}": s.kernel.dim
                         for (x, y), s in f1.splits.items()}},
    )
    unital = functor.source.units is not None and functor.target.units is not None
    if unital:
        checks["f2_isofibration"] = check_isofibration(
            functor, certs.resolve_isolifts(tag, functor))
        qe = check_quasi_equivalence(
            functor, certs.resolve_essentials(tag, functor))
        checks["quasi_equivalence"] = CheckReport(
            qe.verdict, qe.hom_level.witnesses + qe.essential.witnesses,
            {"hom_level": qe.hom_level.verdict,
             "essential_surjectivity": qe.essential.verdict})
    else:
        checks["f2_isofibration"] = CheckReport("undecided", ["units required"])
        qe = check_quasi_equivalence(functor)
        checks["quasi_equivalence"] = CheckReport(
            qe.verdict, qe.hom_level.witnesses + qe.essential.witnesses,
            {"hom_level": qe.hom_level.verdict,
             "essential_surjectivity": qe.essential.verdict})
    if f1.passed:
        checks["kernel_acyclicity"] = kernel_acyclicity(functor, f1)
    extra = {"arity_bound": functor.arity_bound, "total": functor.total}
    return _finish(_report_json("classify", checks, extra), args.strict)


def cmd_strictify(args) -> int:
    doc = load_functor(args.functor)
    functor = doc.functor
    _check_field(args, args.functor, functor.source.fld)
    s = strictify(functor, max_arity=args.max_arity)
    os.makedirs(args.out, exist_ok=True)
    model_path = os.path.join(args.out, "model.acat")
    with open(model_path, "w", encoding="utf-8") as fh:
        fh.write(serialize_category(s.transported))
    target_abs = os.path.abspath(
        doc.target_path if os.path.isabs(doc.target_path)
        else os.path.join(os.path.dirname(args.functor), doc.target_path))
    source_abs = os.path.abspath(
        doc.source_path if os.path.isabs(doc.source_path)
        else os.path.join(os.path.dirname(args.functor), doc.source_path))
    with open(os.path.join(args.out, "projection.afun"), "w", encoding="utf-8") as fh:
        fh.write(serialize_functor(s.projection, "model.acat", target_abs))
    with open(os.path.join(args.out, "phi.afun"), "w", encoding="utf-8") as fh:
        fh.write(serialize_functor(s.phi_functor, source_abs, "model.acat"))
    with open(os.path.join(args.out, "psi.afun"), "w", encoding="utf-8") as fh:
        fh.write(serialize_functor(s.psi_functor, "model.acat", source_abs))
    checks = {
        "strictification": CheckReport(
            "pass", [],
            {"arity_bound": s.arity_bound, "total": s.total,
             "outputs": ["model.acat", "projection.afun", "phi.afun",
                         "psi.afun"]}),
    }
    return _finish(_report_json("strictify", checks), args.strict)


def cmd_pullback(args) -> int:
    fdoc = load_functor(args.f)
    gdoc = load_functor(args.g)
    f, g = fdoc.functor, gdoc.functor
    _check_field(args, args.f, f.source.fld)
    _check_field(args, args.g, g.source.fld)
    certs = _certs(args)
    f1 = check_F1(f)
    checks: Dict[str, CheckReport] = {}
    if not f1.passed:
        checks["f1"] = CheckReport(
            "fail", [f"pair {f1.failure[0]}, degree {f1.failure[1]}"])
        return _finish(_report_json("pullback", checks), args.strict)
    checks["f1"] = CheckReport("pass")
    p = build_pullback(f, g, max_arity=args.max_arity, f1=f1)
    checks["structure_squares_to_zero"] = CheckReport("pass")
    checks["square_commutativity"] = CheckReport("pass")
    if p.category.units is not None:
        from .core import check_strict_units
        checks["unit_closure"] = check_strict_units(p.category)
    fib = certify_fibration_closure(
        p,
        f_isolifts=certs.resolve_isolifts("F", f),
        f_essentials=certs.resolve_essentials("F", f),
        alpha_isolifts=certs.resolve_isolifts("alpha", p.alpha),
        alpha_essentials=certs.resolve_essentials("alpha", p.alpha),
    )
    checks.update(fib.sections)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "pullback.acat"), "w", encoding="utf-8") as fh:
        fh.write(serialize_category(p.category))
    gsrc_abs = os.path.abspath(
        gdoc.source_path if os.path.isabs(gdoc.source_path)
        else os.path.join(os.path.dirname(args.g), gdoc.source_path))
    fsrc_abs = os.path.abspath(
        fdoc.source_path if os.path.isabs(fdoc.source_path)
        else os.path.join(os.path.dirname(args.f), fdoc.source_path))
    with open(os.path.join(args.out, "alpha.afun"), "w", encoding="utf-8") as fh:
        fh.write(serialize_functor(p.alpha, "pullback.acat", gsrc_abs))
    with open(os.path.join(args.out, "beta.afun"), "w", encoding="utf-8") as fh:
        fh.write(serialize_functor(p.beta, "pullback.acat", fsrc_abs))
    extra = {"arity_bound": p.arity_bound, "total": p.total,
             "objects": list(p.category.objects)}
    return _finish(_report_json("pullback", checks, extra), args.strict)


def cmd_induce(args) -> int:
    fdoc = load_functor(args.f)
    gdoc = load_functor(args.g)
    idoc = load_functor(args.cone_i)
    ldoc = load_functor(args.cone_l)
    _check_field(args, args.f, fdoc.functor.source.fld)
    p = build_pullback(fdoc.functor, gdoc.functor, max_arity=args.max_arity)
    rep = induce_functor(p, idoc.functor, ldoc.functor,
                         max_arity=args.max_arity)
    checks = {
        "cone_commutes": CheckReport("pass"),
        "a_infinity": CheckReport("pass"),
        "triangles": CheckReport("pass" if rep.triangles else "fail"),
        "uniqueness": CheckReport("pass" if rep.uniqueness else "fail"),
    }
    os.makedirs(args.out, exist_ok=True)
    isrc_abs = os.path.abspath(
        idoc.source_path if os.path.isabs(idoc.source_path)
        else os.path.join(os.path.dirname(args.cone_i), idoc.source_path))
    with open(os.path.join(args.out, "induced.afun"), "w", encoding="utf-8") as fh:
        fh.write(serialize_functor(rep.functor, isrc_abs, "pullback.acat"))
    with open(os.path.join(args.out, "pullback.acat"), "w", encoding="utf-8") as fh:
        fh.write(serialize_category(p.category))
    extra = {"arity_bound": rep.functor.arity_bound, "total": rep.functor.total}
    return _finish(_report_json("induce", checks, extra), args.strict)


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="ainfty",
        description="Exact pullbacks of A-infinity categories along "
                    "graded-split surjective functors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("validate", help="validate category/functor documents")
    pv.add_argument("paths", nargs="+")
    pv.add_argument("--max-arity", type=int, default=None)
    pv.add_argument("--field", choices=["Q", "Fp"], default=None)
    pv.add_argument("--p", type=int, default=None)
    pv.add_argument("--strict", action="store_true")
    pv.set_defaults(fn=cmd_validate)

    pc = sub.add_parser("classify", help="F1/F2/quasi-equivalence classifiers")
    pc.add_argument("functor")
    pc.add_argument("--certificates", default=None)
    pc.add_argument("--max-arity", type=int, default=None)
    pc.add_argument("--field", choices=["Q", "Fp"], default=None)
    pc.add_argument("--p", type=int, default=None)
    pc.add_argument("--strict", action="store_true")
    pc.set_defaults(fn=cmd_classify)

    ps = sub.add_parser("strictify", help="split model, phi/psi, projection")
    ps.add_argument("functor")
    ps.add_argument("--out", required=True)
    ps.add_argument("--max-arity", type=int, default=None)
    ps.add_argument("--field", choices=["Q", "Fp"], default=None)
    ps.add_argument("--p", type=int, default=None)
    ps.add_argument("--strict", action="store_true")
    ps.set_defaults(fn=cmd_strictify)

    pp = sub.add_parser("pullback", help="build and certify the pullback")
    pp.add_argument("f", help="functor document satisfying F1")
    pp.add_argument("g", help="functor document with the same target")
    pp.add_argument("--out", required=True)
    pp.add_argument("--certificates", default=None)
    pp.add_argument("--max-arity", type=int, default=None)
    pp.add_argument("--field", choices=["Q", "Fp"], default=None)
    pp.add_argument("--p", type=int, default=None)
    pp.add_argument("--strict", action="store_true")
    pp.set_defaults(fn=cmd_pullback)

    pi = sub.add_parser("induce", help="universal functor from a cone")
    pi.add_argument("f")
    pi.add_argument("g")
    pi.add_argument("cone_i", help="cone leg into the source of F")
    pi.add_argument("cone_l", help="cone leg into the source of G")
    pi.add_argument("--out", required=True)
    pi.add_argument("--max-arity", type=int, default=None)
    pi.add_argument("--field", choices=["Q", "Fp"], default=None)
    pi.add_argument("--p", type=int, default=None)
    pi.add_argument("--strict", action="store_true")
    pi.set_defaults(fn=cmd_induce)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (DocumentError, OSError) as exc:
        print(json.dumps({"command": args.command, "error": str(exc),
                          "overall": "error"}, sort_keys=True, indent=2))
        return 2
    except AInftyError as exc:
        print(json.dumps({"command": args.command, "error": str(exc),
                          "overall": "fail"}, sort_keys=True, indent=2))
        return 1


if __name__ == "__main__":
    sys.exit(main())
