"""Graded quivers, formal morphisms, prenatural transformations.

Conventions, fixed once for the whole package:

* An arity-n input tuple is written left to right as (f_n, ..., f_1); f_1 is
  the first-applied input.  The object tuple is (x_0, ..., x_n) with
  f_j in hom(x_{j-1}, x_j), so tuple position i holds f_{n-i}.
* A formal morphism component of arity n has degree shift 1-n; a prenatural
  of degree g has arity-n shift g-n (arity 0 included: an element of
  hom(F0 x, G0 x) of degree g).
* Reduced degree of a basis element is deg - 1.  Inserting a prenatural of
  degree g past inputs of total reduced degree R contributes the Koszul sign
  (-1)**((g-1) * R).  Compositions of formal morphisms carry no signs.

Components are stored sparsely: {(arity, object tuple): {input tuple: output
vector}} with all zero coefficients dropped.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .fields import Field, Scalar
from .linear import EMPTY_SPACE, GradedSpace, Vec, vec_add, vec_scale

Components = Dict[Tuple[int, Tuple[str, ...]], Dict[Tuple[int, ...], Vec]]


class QuiverError(ValueError):
    """Structural errors: endpoint mismatches, degree violations."""


@dataclass(frozen=True)
class GradedQuiver:
    """Objects plus a graded hom space for every ordered pair."""

    fld: Field
    objects: Tuple[str, ...]
    hom: Dict[Tuple[str, str], GradedSpace] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(set(self.objects)) != len(self.objects):
            raise QuiverError("duplicate object names")
        for (x, y) in self.hom:
            if x not in self.objects or y not in self.objects:
                raise QuiverError(f"hom pair ({x},{y}) outside the object set")

    def space(self, x: str, y: str) -> GradedSpace:
        return self.hom.get((x, y), EMPTY_SPACE)

    def degree_interval(self) -> Optional[Tuple[int, int]]:
        degs = [d for sp in self.hom.values() for _, d in sp.basis]
        if not degs:
            return None
        return min(degs), max(degs)

    def paths(self, n: int) -> Iterator[Tuple[str, ...]]:
        """Object tuples (x_0..x_n) whose consecutive homs are all nonzero."""
        if n == 0:
            for x in self.objects:
                yield (x,)
            return
        def extend(path: Tuple[str, ...]) -> Iterator[Tuple[str, ...]]:
            if len(path) == n + 1:
                yield path
                return
            for y in self.objects:
                if self.space(path[-1], y).dim > 0:
                    yield from extend(path + (y,))
        for x in self.objects:
            yield from extend((x,))

    def basis_tuples(self, objs: Tuple[str, ...]) -> Iterator[Tuple[int, ...]]:
        """All input index tuples for the object tuple, in (f_n..f_1) order."""
        n = len(objs) - 1
        dims = [self.space(objs[n - 1 - i], objs[n - i]).dim for i in range(n)]
        def rec(i: int, acc: Tuple[int, ...]) -> Iterator[Tuple[int, ...]]:
            if i == n:
                yield acc
                return
            for b in range(dims[i]):
                yield from rec(i + 1, acc + (b,))
        yield from rec(0, ())

    def input_degrees(self, objs: Tuple[str, ...], in_t: Tuple[int, ...]) -> List[int]:
        n = len(objs) - 1
        return [
            self.space(objs[n - 1 - i], objs[n - i]).degree(b)
            for i, b in enumerate(in_t)
        ]


def normalize_components(fld: Field, comps: Components) -> Components:
    out: Components = {}
    for key, table in comps.items():
        clean = {it: v for it, v in table.items() if v}
        if clean:
            out[key] = clean
    return out


@dataclass
class FormalMorphism:
    """Object map plus arity-indexed multilinear components of shift 1-n."""

    source: GradedQuiver
    target: GradedQuiver
    object_map: Dict[str, str]
    components: Components = field(default_factory=dict)

    def out_pair(self, objs: Tuple[str, ...]) -> Tuple[str, str]:
        return (self.object_map[objs[0]], self.object_map[objs[-1]])

    def shift(self, n: int) -> int:
        return 1 - n

    def is_strict(self) -> bool:
        return all(n <= 1 for (n, _) in self.components)

    def component(self, n: int, objs: Tuple[str, ...]) -> Dict[Tuple[int, ...], Vec]:
        return self.components.get((n, objs), {})

    def max_arity_support(self) -> int:
        return max((n for (n, _) in self.components), default=0)

    def validate(self) -> None:
        _validate_family(self, allow_arity0=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalMorphism):
            return NotImplemented
        return (
            self.object_map == other.object_map
            and normalize_components(self.source.fld, self.components)
            == normalize_components(other.source.fld, other.components)
        )


@dataclass
class Prenatural:
    """Degree-g arity-indexed family between two formal morphisms."""

    frm: FormalMorphism
    to: FormalMorphism
    degree: int
    components: Components = field(default_factory=dict)

    @property
    def source(self) -> GradedQuiver:
        return self.frm.source

    @property
    def target(self) -> GradedQuiver:
        return self.frm.target

    def out_pair(self, objs: Tuple[str, ...]) -> Tuple[str, str]:
        return (self.frm.object_map[objs[0]], self.to.object_map[objs[-1]])

    def shift(self, n: int) -> int:
        return self.degree - n

    def component(self, n: int, objs: Tuple[str, ...]) -> Dict[Tuple[int, ...], Vec]:
        return self.components.get((n, objs), {})

    def is_flat(self) -> bool:
        return not any(n == 0 for (n, _) in self.components)

    def is_zero(self) -> bool:
        return not normalize_components(self.source.fld, self.components)

    def max_arity_support(self) -> int:
        return max((n for (n, _) in self.components), default=0)

    def validate(self) -> None:
        _validate_family(self, allow_arity0=True)

    def add(self, other: "Prenatural") -> "Prenatural":
        if self.degree != other.degree:
            raise QuiverError("cannot add prenaturals of different degrees")
        fld = self.source.fld
        comps: Components = {k: dict(t) for k, t in self.components.items()}
        for key, table in other.components.items():
            mine = comps.setdefault(key, {})
            for it, v in table.items():
                mine[it] = vec_add(fld, mine.get(it, {}), v)
        return Prenatural(self.frm, self.to, self.degree,
                          normalize_components(fld, comps))

    def scale(self, c: Scalar) -> "Prenatural":
        fld = self.source.fld
        comps = {
            key: {it: vec_scale(fld, c, v) for it, v in table.items()}
            for key, table in self.components.items()
        }
        return Prenatural(self.frm, self.to, self.degree,
                          normalize_components(fld, comps))

    def sub(self, other: "Prenatural") -> "Prenatural":
        return self.add(other.scale(self.source.fld.from_int(-1)))

    def arity_part(self, n: int) -> "Prenatural":
        comps = {k: dict(t) for k, t in self.components.items() if k[0] == n}
        return Prenatural(self.frm, self.to, self.degree, comps)

    def first_nonzero(self) -> Optional[Tuple[int, Tuple[str, ...], Tuple[int, ...]]]:
        for (n, objs) in sorted(self.components, key=lambda k: (k[0], k[1])):
            table = self.components[(n, objs)]
            for it in sorted(table):
                if table[it]:
                    return (n, objs, it)
        return None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Prenatural):
            return NotImplemented
        fld = self.source.fld
        return (
            self.degree == other.degree
            and normalize_components(fld, self.components)
            == normalize_components(fld, other.components)
        )


def _validate_family(fam, allow_arity0: bool) -> None:
    src, tgt = fam.source, fam.target
    for (n, objs), table in fam.components.items():
        if n == 0 and not allow_arity0:
            raise QuiverError("formal morphisms have no arity-0 linear part")
        if len(objs) != n + 1 and not (n == 0 and len(objs) == 1):
            raise QuiverError(f"object tuple {objs} has wrong length for arity {n}")
        for x in objs:
            if x not in src.objects:
                raise QuiverError(f"object {x!r} not in the source quiver")
        out_space = tgt.space(*fam.out_pair(objs))
        for in_t, vec in table.items():
            if len(in_t) != n:
                raise QuiverError(f"input tuple {in_t} has wrong arity")
            degs = src.input_degrees(objs, in_t)
            want = sum(degs) + fam.shift(n)
            for oi, c in vec.items():
                if src.fld.is_zero(c):
                    continue
                if not 0 <= oi < out_space.dim:
                    raise QuiverError("output index outside the target hom space")
                if out_space.degree(oi) != want:
                    raise QuiverError(
                        f"degree violation at arity {n}, objects {objs}: "
                        f"output {out_space.name(oi)} has degree "
                        f"{out_space.degree(oi)}, expected {want}"
                    )


def identity_formal(q: GradedQuiver) -> FormalMorphism:
    comps: Components = {}
    for (x, y), sp in q.hom.items():
        if sp.dim == 0:
            continue
        comps[(1, (x, y))] = {(i,): {i: q.fld.one} for i in range(sp.dim)}
    return FormalMorphism(q, q, {x: x for x in q.objects}, comps)


# -- sparse contraction engine ----------------------------------------------

# inverted index: (target pair, output basis index) -> start object -> entries
_Entry = Tuple[Tuple[str, ...], Tuple[int, ...], Scalar, int]
_Inv = Dict[Tuple[Tuple[str, str], int], Dict[str, List[_Entry]]]


def _invert(fam) -> _Inv:
    src = fam.source
    inv: _Inv = {}
    for (n, objs), table in fam.components.items():
        pair = fam.out_pair(objs)
        for in_t, vec in table.items():
            red = sum(src.input_degrees(objs, in_t)) - n
            for oi, c in vec.items():
                inv.setdefault((pair, oi), {}).setdefault(objs[0], []).append(
                    (objs, in_t, c, red)
                )
    return inv


def _outer_items(fam):
    """((r, Y), in_t, out_vec) over components of arity >= 1."""
    for (r, Y), table in fam.components.items():
        if r == 0:
            continue
        for in_t, vec in table.items():
            if vec:
                yield (r, Y), in_t, vec


def _accumulate(fld: Field, comps: Components, key, in_t, vec) -> None:
    table = comps.setdefault(key, {})
    table[in_t] = vec_add(fld, table.get(in_t, {}), vec)


def _expand(
    fld: Field,
    outer,
    invs_for,          # (r, insert_slot) -> list of r inverted indexes
    insert_slots,      # callable r -> iterable of insert positions (or [None])
    bar_sign: int,     # reduced degree of the inserted operator (0 if none)
    max_arity: int,
) -> Components:
    result: Components = {}
    for (r, Y), in_t, out_vec in _outer_items(outer):
        for k in insert_slots(r):
            invs = invs_for(r, k)

            def rec(j: int, start: Optional[str], path: Tuple[str, ...],
                    acc_in: Tuple[int, ...], coeff: Scalar, red_below: int) -> None:
                if j > r:
                    sign_neg = bar_sign % 2 == 1 and red_below % 2 == 1 and k is not None
                    c = fld.neg(coeff) if sign_neg else coeff
                    _accumulate(fld, result, (len(acc_in), path), acc_in,
                                vec_scale(fld, c, out_vec))
                    return
                need = ((Y[j - 1], Y[j]), in_t[r - j])
                buckets = invs[j - 1].get(need)
                if not buckets:
                    return
                cand = (
                    [e for lst in buckets.values() for e in lst]
                    if start is None
                    else buckets.get(start, [])
                )
                remaining_min = sum(
                    1 for jj in range(j + 1, r + 1) if jj != k
                )
                for (epath, ein, ec, ered) in cand:
                    total = len(acc_in) + len(ein)
                    if total + remaining_min > max_arity:
                        continue
                    new_path = epath if start is None else path + epath[1:]
                    rec(
                        j + 1,
                        epath[-1],
                        new_path,
                        ein + acc_in,
                        fld.mul(coeff, ec),
                        red_below + (ered if (k is not None and j < k) else 0),
                    )

            rec(1, None, (), (), fld.one, 0)
    return normalize_components(fld, result)


def compose_formal(g: FormalMorphism, f: FormalMorphism, max_arity: int) -> FormalMorphism:
    """Composition (g . f)^n as the partition sum over blocks of f."""
    if f.target.objects != g.source.objects:
        raise QuiverError("compose_formal: target(f) must be source(g)")
    fld = f.source.fld
    blocks = _invert(f)
    comps = _expand(
        fld, g,
        invs_for=lambda r, k: [blocks] * r,
        insert_slots=lambda r: [None],
        bar_sign=0,
        max_arity=max_arity,
    )
    obj_map = {x: g.object_map[f.object_map[x]] for x in f.source.objects}
    return FormalMorphism(f.source, g.target, obj_map, comps)


def r_compose(f: FormalMorphism, t: Prenatural, max_arity: int) -> Prenatural:
    """Precompose a prenatural with a formal morphism: t^r over f-blocks."""
    if f.target.objects != t.source.objects:
        raise QuiverError("r_compose: target(f) must be the prenatural's source")
    fld = f.source.fld
    blocks = _invert(f)
    comps = _expand(
        fld, t,
        invs_for=lambda r, k: [blocks] * r,
        insert_slots=lambda r: [None],
        bar_sign=0,
        max_arity=max_arity,
    )
    for x in f.source.objects:
        key = (0, (f.object_map[x],))
        table = t.components.get(key)
        if table:
            vec = table.get((), {})
            if vec:
                comps[(0, (x,))] = {(): dict(vec)}
    frm = compose_formal(t.frm, f, max_arity)
    to = compose_formal(t.to, f, max_arity)
    return Prenatural(frm, to, t.degree, normalize_components(fld, comps))


def l_compose(f: FormalMorphism, t: Prenatural, max_arity: int) -> Prenatural:
    """Postcompose: f^j over words with one t-block among endpoint blocks.

    Blocks left of the insertion come from t's codomain morphism, blocks
    right of it from t's domain morphism; the insertion carries the Koszul
    sign (-1)**((deg t - 1) * reduced degree of the inputs to its right).
    """
    if t.target.objects != f.source.objects:
        raise QuiverError("l_compose: the prenatural must land in source(f)")
    fld = t.source.fld
    left = _invert(t.to)
    right = _invert(t.frm)
    ins = _invert(t)
    comps = _expand(
        fld, f,
        invs_for=lambda r, k: [right] * (k - 1) + [ins] + [left] * (r - k),
        insert_slots=lambda r: range(1, r + 1),
        bar_sign=(t.degree - 1) % 2,
        max_arity=max_arity,
    )
    frm = compose_formal(f, t.frm, max_arity)
    to = compose_formal(f, t.to, max_arity)
    return Prenatural(frm, to, t.degree, comps)


def compose_prenatural(d: Prenatural, d_prime: Prenatural, max_arity: int) -> Prenatural:
    """The coderivation composite: d^r over blocks with one d'-insertion.

    The result has degree deg(d) + deg(d') - 1 (bar degrees add).
    """
    if d_prime.target.objects != d.source.objects:
        raise QuiverError("compose_prenatural: endpoint mismatch")
    fld = d_prime.source.fld
    left = _invert(d_prime.to)
    right = _invert(d_prime.frm)
    ins = _invert(d_prime)
    comps = _expand(
        fld, d,
        invs_for=lambda r, k: [right] * (k - 1) + [ins] + [left] * (r - k),
        insert_slots=lambda r: range(1, r + 1),
        bar_sign=(d_prime.degree - 1) % 2,
        max_arity=max_arity,
    )
    frm = compose_formal(d.frm, d_prime.frm, max_arity)
    to = compose_formal(d.to, d_prime.to, max_arity)
    return Prenatural(frm, to, d.degree + d_prime.degree - 1, comps)


# -- evaluation --------------------------------------------------------------

def eval_basis(fam, n: int, objs: Tuple[str, ...], in_t: Tuple[int, ...]) -> Vec:
    return dict(fam.components.get((n, objs), {}).get(in_t, {}))


def eval_multilinear(fam, n: int, objs: Tuple[str, ...], vecs: Sequence[Vec]) -> Vec:
    """Evaluate on a tuple of vectors by multilinear expansion."""
    fld = fam.source.fld
    table = fam.components.get((n, objs), {})
    out: Vec = {}
    if len(vecs) != n:
        raise QuiverError("wrong number of inputs")
    for in_t, vec in table.items():
        coeff = fld.one
        ok = True
        for i, b in enumerate(in_t):
            x = vecs[i].get(b)
            if x is None:
                ok = False
                break
            coeff = fld.mul(coeff, x)
        if ok and not fld.is_zero(coeff):
            out = vec_add(fld, out, vec_scale(fld, coeff, vec))
    return out
