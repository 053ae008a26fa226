"""Line-delimited interchange documents and machine-readable reports.

Three document kinds, distinguished by their first record:

* ``acat``: a category document (field, objects, based homs, optional units
  and arity bound, structure components as sparse entries).
* ``afun``: a functor document referencing its source and target category
  documents by path (resolved relative to the functor document).
* ``acert``: certificate records for rational-field isomorphism searches.

Serialization is canonical: records in a fixed order, components sorted,
rationals as ``p/q`` in lowest terms with positive denominator, prime-field
scalars as residues.  ``parse(serialize(x))`` reproduces ``x`` and
``serialize(parse(text))`` reproduces canonical ``text`` byte for byte.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .fields import Field, FieldError
from .linear import GradedSpace, Vec
from .core import (
    AInftyCategory,
    AInftyError,
    AInftyFunctor,
    EssentialCertificate,
    IsoLiftCertificate,
)
from .quiver import Components, FormalMorphism, GradedQuiver


class DocumentError(ValueError):
    def __init__(self, path: str, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


_IDENT_BAD = set(" \t;,")


def _check_ident(path: str, line: int, token: str) -> str:
    if not token or any(c in _IDENT_BAD for c in token):
        raise DocumentError(path, line, f"invalid identifier {token!r}")
    return token


def _parse_field_record(path: str, ln: int, parts: List[str]) -> Field:
    try:
        if parts == ["Q"]:
            return Field.rationals()
        if len(parts) == 2 and parts[0] == "Fp":
            return Field.prime(int(parts[1]))
    except (ValueError, FieldError) as exc:
        raise DocumentError(path, ln, str(exc)) from exc
    raise DocumentError(path, ln, "field record must be 'Q' or 'Fp <prime>'")


def _format_field(fld: Field) -> str:
    if fld.characteristic == 0:
        return "field Q"
    return f"field Fp {fld.characteristic}"


def _parse_vec(path: str, ln: int, fld: Field, space: GradedSpace,
               tokens: List[str]) -> Vec:
    if len(tokens) % 2 != 0 or not tokens:
        raise DocumentError(path, ln, "vector needs 'name scalar' pairs")
    vec: Vec = {}
    for name, sc in zip(tokens[::2], tokens[1::2]):
        try:
            idx = space.index(name)
        except ValueError as exc:
            raise DocumentError(path, ln, str(exc)) from exc
        try:
            val = fld.parse(sc)
        except FieldError as exc:
            raise DocumentError(path, ln, str(exc)) from exc
        if not fld.is_zero(val):
            vec[idx] = val
    return vec


def _format_vec(fld: Field, space: GradedSpace, vec: Vec) -> str:
    return " ".join(
        f"{space.name(i)} {fld.format(vec[i])}" for i in sorted(vec)
    )


# -- category documents -----------------------------------------------------

def parse_category(text: str, path: str = "<category>") -> AInftyCategory:
    fld: Optional[Field] = None
    max_arity: Optional[int] = None
    objects: List[str] = []
    basis: Dict[Tuple[str, str], List[Tuple[str, int]]] = {}
    unit_lines: List[Tuple[int, str, List[str]]] = []
    mu_lines: List[Tuple[int, List[str]]] = []
    lines = text.splitlines()
    if not lines or lines[0].strip() != "acat":
        raise DocumentError(path, 1, "category documents start with 'acat'")
    for ln, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "field":
            fld = _parse_field_record(path, ln, parts[1:])
        elif kind == "maxarity":
            try:
                max_arity = int(parts[1])
            except (IndexError, ValueError) as exc:
                raise DocumentError(path, ln, "maxarity needs an integer") from exc
        elif kind == "object":
            if len(parts) != 2:
                raise DocumentError(path, ln, "object record needs one name")
            objects.append(_check_ident(path, ln, parts[1]))
        elif kind == "basis":
            if len(parts) != 5:
                raise DocumentError(path, ln, "basis record: basis x y name deg")
            x, y, name = (_check_ident(path, ln, p) for p in parts[1:4])
            try:
                deg = int(parts[4])
            except ValueError as exc:
                raise DocumentError(path, ln, "basis degree must be an integer") from exc
            basis.setdefault((x, y), []).append((name, deg))
        elif kind == "unit":
            fields = [f.strip() for f in line.split(";")]
            head = fields[0].split()
            if len(head) != 2 or len(fields) != 2:
                raise DocumentError(path, ln, "unit record: unit x ; name scalar ...")
            unit_lines.append((ln, head[1], fields[1].split()))
        elif kind == "mu":
            mu_lines.append((ln, [f.strip() for f in line.split(";")]))
        else:
            raise DocumentError(path, ln, f"unknown record {kind!r}")
    if fld is None:
        raise DocumentError(path, 1, "missing field record")
    for (x, y) in basis:
        if x not in objects or y not in objects:
            raise DocumentError(path, 1, f"basis pair ({x},{y}) names unknown objects")
    try:
        hom = {pair: GradedSpace(tuple(b)) for pair, b in basis.items()}
        quiver = GradedQuiver(fld, tuple(objects), hom)
    except ValueError as exc:
        raise DocumentError(path, 1, str(exc)) from exc
    comps: Components = {}
    for ln, fields in mu_lines:
        head = fields[0].split()
        if len(fields) != 4:
            raise DocumentError(path, ln,
                                "mu record: mu n ; objects ; inputs ; output")
        try:
            n = int(head[1])
        except (IndexError, ValueError) as exc:
            raise DocumentError(path, ln, "mu arity must be an integer") from exc
        objs = tuple(fields[1].split())
        if len(objs) != n + 1:
            raise DocumentError(path, ln, f"mu arity {n} needs {n + 1} objects")
        in_names = fields[2].split()
        if len(in_names) != n:
            raise DocumentError(path, ln, f"mu arity {n} needs {n} inputs")
        in_t = []
        for i, name in enumerate(in_names):
            sp = quiver.space(objs[n - 1 - i], objs[n - i])
            try:
                in_t.append(sp.index(name))
            except ValueError as exc:
                raise DocumentError(path, ln, str(exc)) from exc
        out_space = quiver.space(objs[0], objs[-1])
        vec = _parse_vec(path, ln, fld, out_space, fields[3].split())
        if vec:
            comps.setdefault((n, objs), {})[tuple(in_t)] = vec
    units = None
    if unit_lines:
        units = {}
        for ln, x, tokens in unit_lines:
            if x not in objects:
                raise DocumentError(path, ln, f"unit names unknown object {x!r}")
            units[x] = _parse_vec(path, ln, fld, quiver.space(x, x), tokens)
        missing = [x for x in objects if x not in units]
        if missing:
            raise DocumentError(path, 1, f"units missing for {missing}")
    try:
        return AInftyCategory.build(quiver, comps, units=units,
                                    max_arity=max_arity)
    except AInftyError as exc:
        raise DocumentError(path, 1, str(exc)) from exc


def serialize_category(cat: AInftyCategory) -> str:
    fld = cat.fld
    out = ["acat", _format_field(fld), f"maxarity {cat.arity_bound}"]
    for x in cat.objects:
        out.append(f"object {x}")
    for x in cat.objects:
        for y in cat.objects:
            sp = cat.quiver.space(x, y)
            for name, deg in sp.basis:
                out.append(f"basis {x} {y} {name} {deg}")
    if cat.units is not None:
        for x in cat.objects:
            vec = cat.units[x]
            out.append(f"unit {x} ; {_format_vec(fld, cat.quiver.space(x, x), vec)}")
    mu_records = []
    for (n, objs), table in cat.structure.components.items():
        for in_t, vec in table.items():
            if not vec:
                continue
            names = [
                cat.quiver.space(objs[n - 1 - i], objs[n - i]).name(b)
                for i, b in enumerate(in_t)
            ]
            out_space = cat.quiver.space(objs[0], objs[-1])
            mu_records.append(
                f"mu {n} ; {' '.join(objs)} ; {' '.join(names)} ; "
                f"{_format_vec(fld, out_space, vec)}"
            )
    out.extend(sorted(mu_records))
    return "\n".join(out) + "\n"


def load_category(path: str) -> AInftyCategory:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_category(fh.read(), path)


# -- functor documents ------------------------------------------------------

@dataclass
class FunctorDocument:
    functor: AInftyFunctor
    source_path: str
    target_path: str


def parse_functor(text: str, path: str = "<functor>",
                  base_dir: Optional[str] = None) -> FunctorDocument:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "afun":
        raise DocumentError(path, 1, "functor documents start with 'afun'")
    base_dir = base_dir if base_dir is not None else os.path.dirname(path)
    source_path = target_path = None
    max_arity: Optional[int] = None
    objmap: Dict[str, str] = {}
    comp_lines: List[Tuple[int, List[str]]] = []
    for ln, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "source":
            source_path = line.split(None, 1)[1].strip()
        elif kind == "target":
            target_path = line.split(None, 1)[1].strip()
        elif kind == "maxarity":
            try:
                max_arity = int(parts[1])
            except (IndexError, ValueError) as exc:
                raise DocumentError(path, ln, "maxarity needs an integer") from exc
        elif kind == "objmap":
            if len(parts) != 3:
                raise DocumentError(path, ln, "objmap record: objmap x Fx")
            objmap[parts[1]] = parts[2]
        elif kind == "comp":
            comp_lines.append((ln, [f.strip() for f in line.split(";")]))
        else:
            raise DocumentError(path, ln, f"unknown record {kind!r}")
    if source_path is None or target_path is None:
        raise DocumentError(path, 1, "functor documents need source and target")
    source = load_category(os.path.join(base_dir, source_path)
                           if not os.path.isabs(source_path) else source_path)
    target = load_category(os.path.join(base_dir, target_path)
                           if not os.path.isabs(target_path) else target_path)
    for x in source.objects:
        if x not in objmap:
            raise DocumentError(path, 1, f"objmap missing for {x!r}")
    comps: Components = {}
    fld = source.fld
    if fld != target.fld:
        raise DocumentError(path, 1, "source and target fields differ")
    for ln, fields in comp_lines:
        head = fields[0].split()
        if len(fields) != 4:
            raise DocumentError(path, ln,
                                "comp record: comp n ; objects ; inputs ; output")
        try:
            n = int(head[1])
        except (IndexError, ValueError) as exc:
            raise DocumentError(path, ln, "comp arity must be an integer") from exc
        objs = tuple(fields[1].split())
        if len(objs) != n + 1:
            raise DocumentError(path, ln, f"comp arity {n} needs {n + 1} objects")
        in_names = fields[2].split()
        if len(in_names) != n:
            raise DocumentError(path, ln, f"comp arity {n} needs {n} inputs")
        in_t = []
        for i, name in enumerate(in_names):
            sp = source.quiver.space(objs[n - 1 - i], objs[n - i])
            try:
                in_t.append(sp.index(name))
            except ValueError as exc:
                raise DocumentError(path, ln, str(exc)) from exc
        out_space = target.quiver.space(objmap[objs[0]], objmap[objs[-1]])
        vec = _parse_vec(path, ln, fld, out_space, fields[3].split())
        if vec:
            comps.setdefault((n, objs), {})[tuple(in_t)] = vec
    morphism = FormalMorphism(source.quiver, target.quiver, objmap, comps)
    try:
        functor = AInftyFunctor.build(morphism, source, target,
                                      max_arity=max_arity)
    except AInftyError as exc:
        raise DocumentError(path, 1, str(exc)) from exc
    return FunctorDocument(functor, source_path, target_path)


def serialize_functor(functor: AInftyFunctor, source_path: str,
                      target_path: str) -> str:
    fld = functor.source.fld
    out = ["afun", f"source {source_path}", f"target {target_path}",
           f"maxarity {functor.arity_bound}"]
    for x in functor.source.objects:
        out.append(f"objmap {x} {functor.object_map[x]}")
    records = []
    src_q = functor.source.quiver
    tgt_q = functor.target.quiver
    for (n, objs), table in functor.morphism.components.items():
        for in_t, vec in table.items():
            if not vec:
                continue
            names = [
                src_q.space(objs[n - 1 - i], objs[n - i]).name(b)
                for i, b in enumerate(in_t)
            ]
            out_space = tgt_q.space(functor.object_map[objs[0]],
                                    functor.object_map[objs[-1]])
            records.append(
                f"comp {n} ; {' '.join(objs)} ; {' '.join(names)} ; "
                f"{_format_vec(fld, out_space, vec)}"
            )
    out.extend(sorted(records))
    return "\n".join(out) + "\n"


def load_functor(path: str) -> FunctorDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_functor(fh.read(), path)


# -- certificates -----------------------------------------------------------

@dataclass
class RawCertificates:
    """Certificate records with unresolved basis names, grouped by tag."""

    isolifts: Dict[str, List[Tuple[str, str, List[str], str, List[str]]]] = field(
        default_factory=dict)
    essentials: Dict[str, List[Tuple[str, str, List[str]]]] = field(
        default_factory=dict)

    def resolve_isolifts(self, tag: str, functor: AInftyFunctor
                         ) -> List[IsoLiftCertificate]:
        out = []
        fld = functor.source.fld
        for (x, b, iso_tokens, a, lift_tokens) in self.isolifts.get(tag, []):
            px = functor.object_map.get(x)
            if px is None:
                raise AInftyError(f"certificate names unknown object {x!r}")
            iso = _parse_vec("<certificates>", 0, fld,
                             functor.target.quiver.space(px, b), iso_tokens)
            lift = _parse_vec("<certificates>", 0, fld,
                              functor.source.quiver.space(x, a), lift_tokens)
            out.append(IsoLiftCertificate(x, b, iso, a, lift))
        return out

    def resolve_essentials(self, tag: str, functor: AInftyFunctor
                           ) -> List[EssentialCertificate]:
        out = []
        fld = functor.source.fld
        for (b, a, iso_tokens) in self.essentials.get(tag, []):
            fa = functor.object_map.get(a)
            if fa is None:
                raise AInftyError(f"certificate names unknown object {a!r}")
            iso = _parse_vec("<certificates>", 0, fld,
                             functor.target.quiver.space(fa, b), iso_tokens)
            out.append(EssentialCertificate(b, a, iso))
        return out


def parse_certificates(text: str, path: str = "<certificates>") -> RawCertificates:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "acert":
        raise DocumentError(path, 1, "certificate documents start with 'acert'")
    raw = RawCertificates()
    for ln, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(";")]
        head = fields[0].split()
        if head[0] == "isolift":
            # isolift tag ; x ; b ; iso-vec ; a ; lift-vec
            if len(head) != 2 or len(fields) != 6:
                raise DocumentError(
                    path, ln,
                    "isolift record: isolift tag ; x ; b ; iso-vec ; a ; lift-vec")
            tag = head[1]
            x, b, a = fields[1], fields[2], fields[4]
            raw.isolifts.setdefault(tag, []).append(
                (x, b, fields[3].split(), a, fields[5].split()))
        elif head[0] == "essential":
            if len(head) != 2 or len(fields) != 4:
                raise DocumentError(
                    path, ln, "essential record: essential tag ; b ; a ; iso-vec")
            tag = head[1]
            raw.essentials.setdefault(tag, []).append(
                (fields[1], fields[2], fields[3].split()))
        else:
            raise DocumentError(path, ln, f"unknown record {head[0]!r}")
    return raw


def load_certificates(path: str) -> RawCertificates:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_certificates(fh.read(), path)
