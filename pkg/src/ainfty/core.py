"""A-infinity categories, functors, strict units, and homotopy classifiers.

A structure is a flat degree-2 prenatural endotransformation of the identity
whose self-composition vanishes; a functor is a formal morphism F with
l_compose(F, D_source) = r_compose(F, D_target).  Category and functor
values are only constructed through the validating builders, so holding one
certifies the defining equations up to the recorded arity bound.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .fields import Field, Scalar
from .linear import (
    Cohomology,
    GradedMap,
    NotSurjectiveError,
    SplitData,
    Vec,
    cohomology,
    nullspace_dense,
    rref,
    solve_dense,
    split_surjection,
    vec_add,
    vec_is_zero,
    vec_scale,
)
from .quiver import (
    Components,
    FormalMorphism,
    GradedQuiver,
    Prenatural,
    compose_formal,
    eval_multilinear,
    identity_formal,
    l_compose,
    normalize_components,
    r_compose,
    compose_prenatural,
)

DEFAULT_ARITY_BOUND = 6

Pair = Tuple[str, str]


class AInftyError(ValueError):
    pass


class StructureDefectError(AInftyError):
    def __init__(self, witness):
        n, objs, in_t = witness
        super().__init__(
            f"structure defect nonzero at arity {n}, objects {objs}, inputs {in_t}"
        )
        self.witness = witness


class FunctorDefectError(AInftyError):
    def __init__(self, witness):
        n, objs, in_t = witness
        super().__init__(
            f"functor defect nonzero at arity {n}, objects {objs}, inputs {in_t}"
        )
        self.witness = witness


class UnitAxiomError(AInftyError):
    def __init__(self, violations: List[str]):
        super().__init__("unit axioms violated: " + "; ".join(violations[:3]))
        self.violations = violations


@dataclass
class CheckReport:
    verdict: str                       # pass | fail | undecided
    witnesses: List[str] = field(default_factory=list)
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


# -- arity bounds from degree feasibility ------------------------------------

def arity_feasibility_bound(
    src_interval: Optional[Tuple[int, int]],
    tgt_interval: Optional[Tuple[int, int]],
    degree: int,
) -> Optional[int]:
    """Largest arity a degree-`degree` prenatural component can have, or None.

    Arity n is feasible when some total input degree t in [n*lo, n*hi]
    satisfies t + degree - n in [lo', hi'].  Returns 0 when no arity is
    feasible, None when arities are unbounded.
    """
    if src_interval is None or tgt_interval is None:
        return 0
    lo, hi = src_interval
    lo2, hi2 = tgt_interval
    a, b = lo - 1, hi - 1

    def feasible(n: int) -> bool:
        return n * a <= hi2 - degree and n * b >= lo2 - degree

    grows_ok = (a < 0 or (a == 0 and hi2 - degree >= 0)) and (
        b > 0 or (b == 0 and lo2 - degree <= 0)
    )
    if grows_ok:
        return None
    if a > 0:
        stop = max(1, (hi2 - degree) // a + 1)
    else:
        stop = max(1, (lo2 - degree) // b + 1) if b < 0 else 1
    best = 0
    for n in range(1, stop + 2):
        if feasible(n):
            best = n
    return best


def structure_verify_bound(quiver: GradedQuiver) -> Optional[int]:
    """Arity past which both structure components and defects vanish."""
    iv = quiver.degree_interval()
    comp = arity_feasibility_bound(iv, iv, 2)
    defect = arity_feasibility_bound(iv, iv, 3)
    if comp is None or defect is None:
        return None
    return max(comp, defect)


def functor_verify_bound(src: GradedQuiver, tgt: GradedQuiver) -> Optional[int]:
    comp = arity_feasibility_bound(src.degree_interval(), tgt.degree_interval(), 1)
    defect = arity_feasibility_bound(src.degree_interval(), tgt.degree_interval(), 2)
    if comp is None or defect is None:
        return None
    return max(comp, defect)


def _choose_bound(max_arity: Optional[int], full: Optional[int]) -> Tuple[int, bool]:
    if max_arity is None:
        if full is not None:
            return full, True
        return DEFAULT_ARITY_BOUND, False
    if full is not None and max_arity >= full:
        return max_arity, True
    return max_arity, False


# -- categories ---------------------------------------------------------------

def structure_defect(quiver: GradedQuiver, structure: Prenatural, max_arity: int) -> Prenatural:
    """Self-composition of the candidate structure; zero certifies it."""
    structure.validate()
    return compose_prenatural(structure, structure, max_arity)


@dataclass
class AInftyCategory:
    quiver: GradedQuiver
    structure: Prenatural
    units: Optional[Dict[str, Vec]]
    arity_bound: int
    total: bool
    _h0: Optional["H0Category"] = field(default=None, repr=False)

    @property
    def fld(self) -> Field:
        return self.quiver.fld

    @property
    def objects(self) -> Tuple[str, ...]:
        return self.quiver.objects

    @staticmethod
    def build(
        quiver: GradedQuiver,
        components: Components,
        units: Optional[Dict[str, Vec]] = None,
        max_arity: Optional[int] = None,
    ) -> "AInftyCategory":
        ident = identity_formal(quiver)
        structure = Prenatural(ident, ident, 2,
                               normalize_components(quiver.fld, components))
        if not structure.is_flat():
            raise AInftyError("structures must be flat: arity-0 part must vanish")
        bound, total = _choose_bound(max_arity, structure_verify_bound(quiver))
        defect = structure_defect(quiver, structure, bound)
        bad = defect.first_nonzero()
        if bad is not None:
            raise StructureDefectError(bad)
        cat = AInftyCategory(quiver, structure, units, bound, total)
        if units is not None:
            report = check_strict_units(cat)
            if not report.passed:
                raise UnitAxiomError(report.witnesses)
        return cat

    def unit_vec(self, x: str) -> Vec:
        if self.units is None:
            raise AInftyError("units required")
        return self.units[x]

    def m1_map(self, x: str, y: str) -> GradedMap:
        sp = self.quiver.space(x, y)
        entries: Dict[Tuple[int, int], Scalar] = {}
        for in_t, vec in self.structure.component(1, (x, y)).items():
            for oi, c in vec.items():
                entries[(oi, in_t[0])] = c
        return GradedMap(self.fld, sp, sp, 1, entries)

    def h0(self) -> "H0Category":
        if self._h0 is None:
            self._h0 = build_h0(self)
        return self._h0

    def pair_cohomology(self, x: str, y: str) -> Cohomology:
        return cohomology(self.quiver.space(x, y), self.m1_map(x, y))


def check_strict_units(cat: AInftyCategory) -> CheckReport:
    """Verify u1 on every stored component and the signed u2 on every basis.

    u2 reads m2(f, 1_src) = f and m2(1_tgt, f) = (-1)**deg(f) f, the unique
    unit normalization compatible with the structure-relation signs.
    """
    if cat.units is None:
        raise AInftyError("units required")
    fld = cat.fld
    violations: List[str] = []
    for x, u in cat.units.items():
        sp = cat.quiver.space(x, x)
        for oi, c in u.items():
            if not fld.is_zero(c) and sp.degree(oi) != 0:
                violations.append(f"unit of {x} is not concentrated in degree 0")
                break
    # u1: any component of arity != 2 vanishes once a unit occupies a slot
    for (n, objs), table in sorted(cat.structure.components.items()):
        if n == 2:
            continue
        for slot in range(n):
            xa, xb = objs[n - 1 - slot], objs[n - slot]
            if xa != xb or xa not in cat.units:
                continue
            unit = cat.units[xa]
            groups: Dict[Tuple[int, ...], Vec] = {}
            for in_t, vec in table.items():
                w = unit.get(in_t[slot])
                if w is None:
                    continue
                red = in_t[:slot] + in_t[slot + 1:]
                groups[red] = vec_add(fld, groups.get(red, {}), vec_scale(fld, w, vec))
            for red, vec in groups.items():
                if not vec_is_zero(vec):
                    violations.append(
                        f"u1 fails: arity {n} at {objs}, unit in slot {slot}, "
                        f"other inputs {red}"
                    )
    # u2 on every basis morphism
    for (x, y), sp in sorted(cat.quiver.hom.items()):
        if x not in cat.units or y not in cat.units:
            continue
        for i in range(sp.dim):
            f: Vec = {i: fld.one}
            right = eval_multilinear(cat.structure, 2, (x, x, y), [f, cat.units[x]])
            if right != f:
                violations.append(f"u2 fails: m2({sp.name(i)}, 1_{x}) != {sp.name(i)}")
            left = eval_multilinear(cat.structure, 2, (x, y, y), [cat.units[y], f])
            want = f if sp.degree(i) % 2 == 0 else vec_scale(fld, fld.from_int(-1), f)
            if left != want:
                violations.append(
                    f"u2 fails: m2(1_{y}, {sp.name(i)}) != (-1)^deg {sp.name(i)}"
                )
    verdict = "pass" if not violations else "fail"
    return CheckReport(verdict, violations)


# -- functors -----------------------------------------------------------------

def functor_defect(
    morphism: FormalMorphism,
    source: AInftyCategory,
    target: AInftyCategory,
    max_arity: int,
) -> Prenatural:
    left = l_compose(morphism, source.structure, max_arity)
    right = r_compose(morphism, target.structure, max_arity)
    return left.sub(right)


@dataclass
class AInftyFunctor:
    morphism: FormalMorphism
    source: AInftyCategory
    target: AInftyCategory
    arity_bound: int
    total: bool
    strictly_unital: bool = False

    @property
    def object_map(self) -> Dict[str, str]:
        return self.morphism.object_map

    @staticmethod
    def build(
        morphism: FormalMorphism,
        source: AInftyCategory,
        target: AInftyCategory,
        max_arity: Optional[int] = None,
        strictly_unital: Optional[bool] = None,
    ) -> "AInftyFunctor":
        for x in source.objects:
            if morphism.object_map.get(x) not in target.objects:
                raise AInftyError(f"object map image of {x!r} is not in the target")
        morphism.validate()
        bound, total = _choose_bound(
            max_arity, functor_verify_bound(source.quiver, target.quiver)
        )
        defect = functor_defect(morphism, source, target, bound)
        bad = defect.first_nonzero()
        if bad is not None:
            raise FunctorDefectError(bad)
        unital = False
        if source.units is not None and target.units is not None:
            ok = _strictly_unital(morphism, source, target)
            if strictly_unital and not ok:
                raise UnitAxiomError(["declared strictly unital but fu1/fu2 fail"])
            unital = ok
        elif strictly_unital:
            raise AInftyError("strict unitality needs units on both categories")
        return AInftyFunctor(morphism, source, target, bound, total, unital)

    @staticmethod
    def identity(cat: AInftyCategory) -> "AInftyFunctor":
        return AInftyFunctor.build(identity_formal(cat.quiver), cat, cat)

    def compose(self, other: "AInftyFunctor") -> "AInftyFunctor":
        """self . other (other applied first)."""
        bound = min(self.arity_bound, other.arity_bound)
        morphism = compose_formal(self.morphism, other.morphism, bound)
        return AInftyFunctor.build(morphism, other.source, self.target, bound)

    def arity1_map(self, x: str, y: str) -> GradedMap:
        src = self.source.quiver.space(x, y)
        tgt = self.target.quiver.space(self.object_map[x], self.object_map[y])
        entries: Dict[Tuple[int, int], Scalar] = {}
        for in_t, vec in self.morphism.component(1, (x, y)).items():
            for oi, c in vec.items():
                entries[(oi, in_t[0])] = c
        return GradedMap(self.source.fld, src, tgt, 0, entries)


def _strictly_unital(morphism: FormalMorphism, source: AInftyCategory,
                     target: AInftyCategory) -> bool:
    fld = source.fld
    for x, u in source.units.items():
        fx = morphism.object_map[x]
        img = eval_multilinear(morphism, 1, (x, x), [u])
        if img != target.units[fx]:
            return False
    for (n, objs), table in morphism.components.items():
        if n < 2:
            continue
        for slot in range(n):
            xa, xb = objs[n - 1 - slot], objs[n - slot]
            if xa != xb:
                continue
            unit = source.units[xa]
            groups: Dict[Tuple[int, ...], Vec] = {}
            for in_t, vec in table.items():
                w = unit.get(in_t[slot])
                if w is None:
                    continue
                red = in_t[:slot] + in_t[slot + 1:]
                groups[red] = vec_add(fld, groups.get(red, {}), vec_scale(fld, w, vec))
            if any(not vec_is_zero(v) for v in groups.values()):
                return False
    return True


# -- condition F1 -------------------------------------------------------------

@dataclass
class F1Result:
    passed: bool
    splits: Dict[Pair, SplitData]
    failure: Optional[Tuple[Pair, int]] = None


def check_F1(functor: AInftyFunctor) -> F1Result:
    """Split every arity-1 component, or report the first failing pair."""
    splits: Dict[Pair, SplitData] = {}
    for x in functor.source.objects:
        for y in functor.source.objects:
            m = functor.arity1_map(x, y)
            try:
                splits[(x, y)] = split_surjection(m)
            except NotSurjectiveError as exc:
                return F1Result(False, splits, ((x, y), exc.degree))
    return F1Result(True, splits)


# -- H0 and isomorphism testing ------------------------------------------------

@dataclass
class H0Category:
    cat: AInftyCategory
    coh: Dict[Pair, Cohomology]
    unit_coords: Dict[str, List[Scalar]]

    def dim(self, x: str, y: str) -> int:
        return self.coh[(x, y)].dims.get(0, 0)

    def class_vec(self, x: str, y: str, coords: Sequence[Scalar]) -> Vec:
        fld = self.cat.fld
        out: Vec = {}
        for c, rep in zip(coords, self.coh[(x, y)].reps.get(0, [])):
            out = vec_add(fld, out, vec_scale(fld, c, rep))
        return out

    def coords_of(self, x: str, y: str, vec: Vec) -> Optional[List[Scalar]]:
        return self.coh[(x, y)].coords(vec, 0)

    def compose(self, x: str, y: str, z: str,
                g: Sequence[Scalar], f: Sequence[Scalar]) -> List[Scalar]:
        """Class coordinates of [m2(g, f)] for f: x->y, g: y->z."""
        gv = self.class_vec(y, z, g)
        fv = self.class_vec(x, y, f)
        prod = eval_multilinear(self.cat.structure, 2, (x, y, z), [gv, fv])
        coords = self.coords_of(x, z, prod)
        assert coords is not None
        return coords

    def is_iso(self, x: str, y: str, f: Sequence[Scalar]) -> bool:
        """Two-sided invertibility of a degree-0 class, by one linear solve."""
        fld = self.cat.fld
        n = self.dim(y, x)
        rows_len = self.dim(x, x) + self.dim(y, y)
        cols: List[List[Scalar]] = []
        for i in range(n):
            e = [fld.one if j == i else fld.zero for j in range(n)]
            gf = self.compose(x, y, x, e, f)
            fg = self.compose(y, x, y, f, e)
            cols.append(list(gf) + list(fg))
        rows = [[cols[j][i] for j in range(n)] for i in range(rows_len)]
        rhs = list(self.unit_coords[x]) + list(self.unit_coords[y])
        return solve_dense(fld, rows, rhs) is not None

    def all_classes(self, x: str, y: str):
        """All H0 coordinate tuples; prime fields only."""
        fld = self.cat.fld
        return itertools.product(list(fld.elements()), repeat=self.dim(x, y))

    def verify(self) -> None:
        """Associativity and unitality on basis classes, exactly."""
        objs = self.cat.objects
        fld = self.cat.fld
        for x in objs:
            for y in objs:
                dxy = self.dim(x, y)
                basis = [
                    [fld.one if j == i else fld.zero for j in range(dxy)]
                    for i in range(dxy)
                ]
                for e in basis:
                    if self.compose(x, x, y, e, self.unit_coords[x]) != list(e):
                        raise AInftyError("H0 right unit law fails")
                    if self.compose(x, y, y, self.unit_coords[y], e) != list(e):
                        raise AInftyError("H0 left unit law fails")
                for z in objs:
                    for w in objs:
                        for i in range(dxy):
                            f1 = [fld.one if j == i else fld.zero for j in range(dxy)]
                            for i2 in range(self.dim(y, z)):
                                f2 = [fld.one if j == i2 else fld.zero
                                      for j in range(self.dim(y, z))]
                                for i3 in range(self.dim(z, w)):
                                    f3 = [fld.one if j == i3 else fld.zero
                                          for j in range(self.dim(z, w))]
                                    lhs = self.compose(
                                        x, z, w, f3, self.compose(x, y, z, f2, f1))
                                    rhs = self.compose(
                                        x, y, w, self.compose(y, z, w, f3, f2), f1)
                                    if lhs != rhs:
                                        raise AInftyError("H0 associativity fails")


def build_h0(cat: AInftyCategory) -> H0Category:
    """Degree-0 cohomology category; requires strict units."""
    if cat.units is None:
        raise AInftyError("units required")
    coh: Dict[Pair, Cohomology] = {}
    for x in cat.objects:
        for y in cat.objects:
            coh[(x, y)] = cat.pair_cohomology(x, y)
    unit_coords: Dict[str, List[Scalar]] = {}
    for x in cat.objects:
        coords = coh[(x, x)].coords(cat.unit_vec(x), 0)
        if coords is None:
            raise AInftyError(f"unit of {x} is not a degree-0 cocycle class")
        unit_coords[x] = coords
    h0 = H0Category(cat, coh, unit_coords)
    h0.verify()
    return h0


def h0_functor_matrix(functor: AInftyFunctor, h0s: H0Category, h0t: H0Category,
                      x: str, y: str) -> List[List[Scalar]]:
    """Matrix of [F]: H0(x,y) -> H0(F x, F y), columns over source classes."""
    fld = functor.source.fld
    fx, fy = functor.object_map[x], functor.object_map[y]
    cols = []
    for rep in h0s.coh[(x, y)].reps.get(0, []):
        img = eval_multilinear(functor.morphism, 1, (x, y), [rep])
        coords = h0t.coords_of(fx, fy, img)
        assert coords is not None
        cols.append(coords)
    n_rows = h0t.dim(fx, fy)
    return [[cols[j][i] for j in range(len(cols))] for i in range(n_rows)]


# -- classifiers ----------------------------------------------------------------

def _arity1_iso_everywhere(functor: AInftyFunctor) -> bool:
    om = functor.object_map
    src_objs, tgt_objs = functor.source.objects, functor.target.objects
    if sorted(om[x] for x in src_objs) != sorted(tgt_objs):
        return False
    fld = functor.source.fld
    for x in src_objs:
        for y in src_objs:
            m = functor.arity1_map(x, y)
            if m.source.dim != m.target.dim:
                return False
            rows = [
                [m.entries.get((ti, si), fld.zero) for si in range(m.source.dim)]
                for ti in range(m.target.dim)
            ]
            if rows and len(rref(fld, rows)[1]) != m.source.dim:
                return False
    return True


@dataclass
class IsoLiftCertificate:
    source_object: str
    target_object: str
    iso: Vec             # degree-0 cocycle in target hom(F0 x, b)
    lift_object: str
    lift: Vec            # degree-0 cocycle in source hom(x, a)


@dataclass
class EssentialCertificate:
    target_object: str
    source_object: str
    iso: Vec             # degree-0 cocycle in target hom(F0 a, b)


def check_isofibration(
    functor: AInftyFunctor,
    certificates: Optional[List[IsoLiftCertificate]] = None,
) -> CheckReport:
    """Condition F2: every H0 isomorphism out of an image object lifts.

    Decided by enumeration over a prime field; over the rationals the verdict
    is certificate-based, with "undecided" when no certificates are given.
    """
    src, tgt = functor.source, functor.target
    if src.units is None or tgt.units is None:
        raise AInftyError("units required")
    if _arity1_iso_everywhere(functor):
        return CheckReport("pass", [], {"method": "arity-1 isomorphism"})
    fld = src.fld
    h0s, h0t = src.h0(), tgt.h0()
    if fld.characteristic == 0:
        if not certificates:
            return CheckReport("undecided", [],
                               {"method": "certificates", "entries": 0})
        for cert in certificates:
            err = _verify_iso_lift(functor, h0s, h0t, cert)
            if err:
                return CheckReport("fail", [err], {"method": "certificates"})
        return CheckReport("pass", [],
                           {"method": "certificates", "entries": len(certificates)})
    fibers: Dict[str, List[str]] = {}
    for a in src.objects:
        fibers.setdefault(functor.object_map[a], []).append(a)
    for x in src.objects:
        px = functor.object_map[x]
        for b in tgt.objects:
            for coords in h0t.all_classes(px, b):
                if not h0t.is_iso(px, b, list(coords)):
                    continue
                if not _find_lift(functor, h0s, h0t, x, b, list(coords),
                                  fibers.get(b, [])):
                    return CheckReport(
                        "fail",
                        [f"iso at H0({px},{b}) with coords {list(coords)} "
                         f"has no lift from {x}"],
                        {"method": "enumeration"},
                    )
    return CheckReport("pass", [], {"method": "enumeration"})


def _find_lift(functor, h0s, h0t, x, b, coords, fiber) -> bool:
    fld = functor.source.fld
    px = functor.object_map[x]
    for a in fiber:
        mat = h0_functor_matrix(functor, h0s, h0t, x, a)
        part = solve_dense(fld, mat, coords) if mat else (None if any(
            not fld.is_zero(c) for c in coords) else [])
        if part is None:
            continue
        null = nullspace_dense(fld, mat) if mat else []
        for combo in itertools.product(list(fld.elements()), repeat=len(null)):
            cand = list(part)
            for c, nv in zip(combo, null):
                cand = [fld.add(u, fld.mul(c, v)) for u, v in zip(cand, nv)]
            if h0s.is_iso(x, a, cand):
                return True
    return False


def _verify_iso_lift(functor, h0s, h0t, cert: IsoLiftCertificate) -> Optional[str]:
    src, tgt = functor.source, functor.target
    x, b, a = cert.source_object, cert.target_object, cert.lift_object
    px = functor.object_map.get(x)
    if px is None or b not in tgt.objects or a not in src.objects:
        return f"certificate names unknown objects ({x}, {b}, {a})"
    if functor.object_map[a] != b:
        return f"lift object {a} does not map to {b}"
    phi_coords = h0t.coords_of(px, b, cert.iso)
    if phi_coords is None:
        return f"certificate iso at ({px},{b}) is not a cocycle class"
    if not h0t.is_iso(px, b, phi_coords):
        return f"certificate iso at ({px},{b}) is not invertible in H0"
    psi_coords = h0s.coords_of(x, a, cert.lift)
    if psi_coords is None:
        return f"certificate lift at ({x},{a}) is not a cocycle class"
    if not h0s.is_iso(x, a, psi_coords):
        return f"certificate lift at ({x},{a}) is not invertible in H0"
    img = eval_multilinear(functor.morphism, 1, (x, a), [cert.lift])
    img_coords = h0t.coords_of(px, b, img)
    if img_coords != phi_coords:
        return f"certificate lift at ({x},{a}) does not map to the iso"
    return None


def kernel_acyclicity(functor: AInftyFunctor,
                      f1: Optional[F1Result] = None) -> CheckReport:
    """Per pair, cohomology of (Ker F1, m1 restricted); pass iff all vanish."""
    if f1 is None:
        f1 = check_F1(functor)
    if not f1.passed:
        raise AInftyError("F1 not established; kernels are not defined")
    fld = functor.source.fld
    witnesses: List[str] = []
    dims_out: Dict[str, Dict[int, int]] = {}
    for x in functor.source.objects:
        for y in functor.source.objects:
            split = f1.splits[(x, y)]
            kernel = split.kernel
            entries: Dict[Tuple[int, int], Scalar] = {}
            for ki in range(kernel.dim):
                v = split.include.column(ki)
                w = eval_multilinear(functor.source.structure, 1, (x, y), [v])
                img = eval_multilinear(functor.morphism, 1, (x, y), [w])
                if not vec_is_zero(img):
                    raise AInftyError(
                        f"m1 does not preserve Ker F1 at ({x},{y})"
                    )
                for oi, c in split.retract.apply(w).items():
                    entries[(oi, ki)] = c
            dmap = GradedMap(fld, kernel, kernel, 1, entries)
            coh = cohomology(kernel, dmap)
            nonzero = {d: k for d, k in coh.dims.items() if k}
            if nonzero:
                dims_out[f"{x},{y}"] = nonzero
                d0 = sorted(nonzero)[0]
                witnesses.append(
                    f"Ker F1({x},{y}) has H^{d0} of dimension {nonzero[d0]}"
                )
    verdict = "pass" if not witnesses else "fail"
    return CheckReport(verdict, witnesses, {"nonacyclic": dims_out})


@dataclass
class QEReport:
    verdict: str
    hom_level: CheckReport
    essential: CheckReport

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def check_quasi_equivalence(
    functor: AInftyFunctor,
    certificates: Optional[List[EssentialCertificate]] = None,
) -> QEReport:
    """Hom-level quasi-isomorphisms plus essential surjectivity of H0."""
    hom = _hom_level_quasi_iso(functor)
    ess = _essential_surjectivity(functor, certificates)
    if hom.verdict == "fail" or ess.verdict == "fail":
        verdict = "fail"
    elif hom.verdict == "pass" and ess.verdict == "pass":
        verdict = "pass"
    else:
        verdict = "undecided"
    return QEReport(verdict, hom, ess)


def _hom_level_quasi_iso(functor: AInftyFunctor) -> CheckReport:
    fld = functor.source.fld
    witnesses: List[str] = []
    for x in functor.source.objects:
        for y in functor.source.objects:
            fx, fy = functor.object_map[x], functor.object_map[y]
            cs = functor.source.pair_cohomology(x, y)
            ct = functor.target.pair_cohomology(fx, fy)
            degrees = sorted(set(cs.dims) | set(ct.dims))
            for d in degrees:
                ds, dt = cs.dims.get(d, 0), ct.dims.get(d, 0)
                if ds != dt:
                    witnesses.append(
                        f"H^{d}({x},{y}): source dim {ds} vs target dim {dt}"
                    )
                    continue
                if ds == 0:
                    continue
                cols = []
                for rep in cs.reps[d]:
                    img = eval_multilinear(functor.morphism, 1, (x, y), [rep])
                    coords = ct.coords(img, d)
                    assert coords is not None
                    cols.append(coords)
                rows = [[cols[j][i] for j in range(ds)] for i in range(dt)]
                if len(rref(fld, rows)[1]) != ds:
                    witnesses.append(
                        f"H^{d}({x},{y}): induced map is not an isomorphism"
                    )
    verdict = "pass" if not witnesses else "fail"
    return CheckReport(verdict, witnesses)


def _essential_surjectivity(
    functor: AInftyFunctor,
    certificates: Optional[List[EssentialCertificate]],
) -> CheckReport:
    src, tgt = functor.source, functor.target
    if src.units is None or tgt.units is None:
        return CheckReport("undecided", ["units required for essential surjectivity"])
    fld = src.fld
    image = {functor.object_map[a] for a in src.objects}
    missing = [b for b in tgt.objects if b not in image]
    if not missing:
        return CheckReport("pass", [], {"method": "object image"})
    h0t = tgt.h0()
    still: List[str] = []
    for b in missing:
        found = False
        if fld.characteristic != 0:
            for a in src.objects:
                fa = functor.object_map[a]
                for coords in h0t.all_classes(fa, b):
                    if h0t.is_iso(fa, b, list(coords)):
                        found = True
                        break
                if found:
                    break
        elif certificates:
            for cert in certificates:
                if cert.target_object != b:
                    continue
                fa = functor.object_map.get(cert.source_object)
                if fa is None:
                    continue
                coords = h0t.coords_of(fa, b, cert.iso)
                if coords is not None and h0t.is_iso(fa, b, coords):
                    found = True
                    break
        if not found:
            still.append(b)
    if not still:
        return CheckReport("pass", [], {"method": "enumeration/certificates"})
    if fld.characteristic != 0:
        return CheckReport("fail",
                           [f"no H0 isomorphism onto {b}" for b in still])
    return CheckReport("undecided",
                       [f"object {b} not covered by certificates" for b in still])
