"""Pullback of an F1 functor along an arbitrary functor.

The pullback quiver has objects (x, y) with F0 x = G0 y and homs
Ker(F1)(x1, x2) (+) A''(y1, y2).  Its structure is solved arity by arity:
the A''-component is forced to be the A''-structure, and the kernel
component is read off from the defect of the product-morphism equation with
the unknown set to zero, the unknown entering through the identity kernel
block of the product morphism's arity-1 part.  Both defining equations are
re-verified exactly after every substitution, and the finished structure is
certified by a vanishing self-composition.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .linear import GradedSpace, Vec
from .core import (
    AInftyCategory,
    AInftyError,
    AInftyFunctor,
    CheckReport,
    EssentialCertificate,
    F1Result,
    IsoLiftCertificate,
    Pair,
    _choose_bound,
    arity_feasibility_bound,
    check_F1,
    check_isofibration,
    check_quasi_equivalence,
    _essential_surjectivity,
    _hom_level_quasi_iso,
    kernel_acyclicity,
)
from .quiver import (
    Components,
    FormalMorphism,
    GradedQuiver,
    Prenatural,
    compose_formal,
    identity_formal,
    l_compose,
    normalize_components,
    r_compose,
)
from .strictify import Strictification, strictify, sum_space

PAIR_SEP = "&"


class F1Error(AInftyError):
    def __init__(self, failure):
        pair, degree = failure
        super().__init__(f"F1 fails at {pair}: not surjective in degree {degree}")
        self.failure = failure


class ConeError(AInftyError):
    def __init__(self, arity, objs, in_t):
        super().__init__(
            f"cone does not commute at arity {arity}, objects {objs}, inputs {in_t}"
        )
        self.arity, self.objs, self.in_t = arity, objs, in_t


class InternalConsistencyError(AInftyError):
    pass


def pair_name(x: str, y: str) -> str:
    return f"{x}{PAIR_SEP}{y}"


@dataclass
class PullbackCategory:
    category: AInftyCategory
    alpha: AInftyFunctor                  # strict projection onto A''
    beta: AInftyFunctor                   # psi . recompose . (Id_K x G)
    product_morphism: FormalMorphism      # (Id_K x G): P -> model
    object_pairs: Dict[str, Tuple[str, str]]
    strictification: Strictification
    f: AInftyFunctor
    g: AInftyFunctor
    f1: F1Result
    arity_bound: int
    total: bool


def build_pullback_quiver(
    strict: Strictification, g: AInftyFunctor
) -> Tuple[GradedQuiver, FormalMorphism, Dict[str, Tuple[str, str]]]:
    """Objects, homs and the product morphism Id_K x G into the split model."""
    model = strict.model
    f = model.functor
    fld = model.base.fld
    pairs: Dict[str, Tuple[str, str]] = {}
    for x in model.base.objects:
        for y in g.source.objects:
            if f.object_map[x] == g.object_map[y]:
                pairs[pair_name(x, y)] = (x, y)
    objects = tuple(sorted(pairs))
    hom: Dict[Pair, GradedSpace] = {}
    for p1 in objects:
        for p2 in objects:
            (x1, y1), (x2, y2) = pairs[p1], pairs[p2]
            sp = sum_space(model.splits[(x1, x2)].kernel,
                           g.source.quiver.space(y1, y2))
            if sp.dim:
                hom[(p1, p2)] = sp
    quiver = GradedQuiver(fld, objects, hom)

    # Lemma: the product morphism lands in the model's object set
    for (x, y) in pairs.values():
        assert f.object_map[x] == g.object_map[y]

    comps: Components = {}
    # arity 1: (k, a'') |-> (k, G1 a'')
    for p1 in objects:
        for p2 in objects:
            (x1, y1), (x2, y2) = pairs[p1], pairs[p2]
            src = quiver.space(p1, p2)
            tgt = strict.model.quiver.space(x1, x2)
            kdim = model.splits[(x1, x2)].kernel.dim
            tgt_kdim = kdim  # model kernel block uses the same split
            table: Dict[Tuple[int, ...], Vec] = {}
            for i in range(kdim):
                table[(i,)] = {i: fld.one}
            g1 = g.morphism.component(1, (y1, y2))
            for (bi,), vec in g1.items():
                out = {tgt_kdim + oi: c for oi, c in vec.items()}
                if out:
                    table[(kdim + bi,)] = out
            if table:
                comps[(1, (p1, p2))] = table
    # arity n >= 2: all-A'' tuples |-> (0, G^n)
    for (n, yobjs), table in g.morphism.components.items():
        if n < 2:
            continue
        for pobjs in _pullback_paths(pairs, objects, yobjs):
            ptable: Dict[Tuple[int, ...], Vec] = {}
            xs = [pairs[p][0] for p in pobjs]
            out_kdim = model.splits[(xs[0], xs[-1])].kernel.dim
            for in_t, vec in table.items():
                shifted = tuple(
                    model.splits[(pairs[pobjs[n - 1 - i]][0],
                                  pairs[pobjs[n - i]][0])].kernel.dim + b
                    for i, b in enumerate(in_t)
                )
                out = {out_kdim + oi: c for oi, c in vec.items()}
                if out:
                    ptable[shifted] = out
            if ptable:
                comps[(n, pobjs)] = ptable
    object_map = {p: pairs[p][0] for p in objects}
    product = FormalMorphism(quiver, strict.model.quiver, object_map, comps)
    return quiver, product, pairs


def _pullback_paths(pairs, objects, yobjs):
    """All object tuples of the pullback whose second components match yobjs."""
    n = len(yobjs) - 1
    by_y: Dict[str, List[str]] = {}
    for p, (_, y) in pairs.items():
        by_y.setdefault(y, []).append(p)
    def rec(i, acc):
        if i > n:
            yield tuple(acc)
            return
        for p in sorted(by_y.get(yobjs[i], [])):
            yield from rec(i + 1, acc + [p])
    yield from rec(0, [])


def _a_projection_morphism(quiver: GradedQuiver, pairs, g: AInftyFunctor,
                           splits) -> FormalMorphism:
    """Strict projection of the pullback quiver onto the A''-summand."""
    fld = quiver.fld
    comps: Components = {}
    for (p1, p2), sp in quiver.hom.items():
        (x1, y1), (x2, y2) = pairs[p1], pairs[p2]
        kdim = splits[(x1, x2)].kernel.dim
        table = {
            (kdim + bi,): {bi: fld.one}
            for bi in range(g.source.quiver.space(y1, y2).dim)
        }
        if table:
            comps[(1, (p1, p2))] = table
    return FormalMorphism(quiver, g.source.quiver,
                          {p: pairs[p][1] for p in quiver.objects}, comps)


def solve_pullback_arity(
    quiver: GradedQuiver,
    pairs: Dict[str, Tuple[str, str]],
    product: FormalMorphism,
    m_model: Prenatural,
    g: AInftyFunctor,
    splits,
    partial: Prenatural,
    n: int,
) -> Prenatural:
    """Extend the structure to arity n; the two defining equations hold
    exactly afterwards (re-verified by the caller)."""
    fld = quiver.fld
    ident = identity_formal(quiver)
    comps = {k: {it: dict(v) for it, v in t.items()}
             for k, t in partial.components.items()}
    # forced A''-component: m''^n of the A''-parts
    for (m, yobjs), table in g.source.structure.components.items():
        if m != n:
            continue
        for pobjs in _pullback_paths(pairs, quiver.objects, yobjs):
            xs = [pairs[p][0] for p in pobjs]
            out_kdim = splits[(xs[0], xs[-1])].kernel.dim
            ptable: Dict[Tuple[int, ...], Vec] = {}
            for in_t, vec in table.items():
                shifted = tuple(
                    splits[(pairs[pobjs[n - 1 - i]][0],
                            pairs[pobjs[n - i]][0])].kernel.dim + b
                    for i, b in enumerate(in_t)
                )
                out = {out_kdim + oi: c for oi, c in vec.items()}
                if out:
                    ptable[shifted] = out
            if ptable:
                comps.setdefault((n, pobjs), {}).update(ptable)
    trial = Prenatural(ident, ident, 2, normalize_components(fld, comps))
    # defect of the product-morphism equation with the kernel unknown at zero
    defect = l_compose(product, trial, n).sub(
        r_compose(product, m_model, n)).arity_part(n)
    for (m, pobjs), table in defect.components.items():
        x1 = pairs[pobjs[0]][0]
        x2 = pairs[pobjs[-1]][0]
        kdim = splits[(x1, x2)].kernel.dim
        for in_t, vec in table.items():
            kpart = {i: c for i, c in vec.items() if i < kdim}
            rest = {i: c for i, c in vec.items() if i >= kdim}
            if rest:
                raise InternalConsistencyError(
                    f"split-off component of the arity-{n} defect is nonzero "
                    f"at {pobjs}, inputs {in_t}"
                )
            if kpart:
                tbl = comps.setdefault((n, pobjs), {})
                cur = dict(tbl.get(in_t, {}))
                for i, c in kpart.items():
                    s = fld.sub(cur.get(i, fld.zero), c)
                    if fld.is_zero(s):
                        cur.pop(i, None)
                    else:
                        cur[i] = s
                tbl[in_t] = cur
    return Prenatural(ident, ident, 2, normalize_components(fld, comps))


def build_pullback_structure(
    quiver: GradedQuiver,
    pairs: Dict[str, Tuple[str, str]],
    product: FormalMorphism,
    m_model: Prenatural,
    g: AInftyFunctor,
    splits,
    max_arity: int,
) -> Prenatural:
    """Iterate the arity recursion and re-verify both defining equations.

    After every substitution the product-morphism equation and the
    projection equation are evaluated from scratch at that arity (the
    definitional oracle, independent of the solving path); the caller
    certifies the self-composition through the category builder.
    """
    ident = identity_formal(quiver)
    structure = Prenatural(ident, ident, 2, {})
    pr_a = _a_projection_morphism(quiver, pairs, g, splits)
    for n in range(1, max_arity + 1):
        structure = solve_pullback_arity(
            quiver, pairs, product, m_model, g, splits, structure, n)
        eq1 = l_compose(product, structure, n).sub(
            r_compose(product, m_model, n)).arity_part(n)
        if not eq1.is_zero():
            raise InternalConsistencyError(
                f"product-morphism equation nonzero at arity {n}")
        eq2 = l_compose(pr_a, structure, n).sub(
            r_compose(pr_a, g.source.structure, n)).arity_part(n)
        if not eq2.is_zero():
            raise InternalConsistencyError(
                f"projection equation nonzero at arity {n}")
    return structure


def build_pullback(
    f: AInftyFunctor,
    g: AInftyFunctor,
    max_arity: Optional[int] = None,
    strict: Optional[Strictification] = None,
    f1: Optional[F1Result] = None,
) -> PullbackCategory:
    """The pullback category with both projections, fully certified."""
    if g.target.quiver != f.target.quiver:
        raise AInftyError("the two functors must share their target")
    if f1 is None:
        f1 = check_F1(f)
    if not f1.passed:
        raise F1Error(f1.failure)
    full = _total_bound_pullback(f, g)
    bound, total = _choose_bound(max_arity, full)
    if strict is None:
        strict = strictify(f, f1, max_arity=bound)
    quiver, product, pairs = build_pullback_quiver(strict, g)
    splits = strict.model.splits
    m_model = strict.transported.structure
    structure = build_pullback_structure(quiver, pairs, product, m_model, g,
                                         splits, bound)
    pr_a = _a_projection_morphism(quiver, pairs, g, splits)

    units = None
    if (f.source.units is not None and g.source.units is not None
            and f.strictly_unital and g.strictly_unital):
        units = {}
        for p, (x, y) in pairs.items():
            kpart = splits[(x, x)].retract.apply(f.source.unit_vec(x))
            kdim = splits[(x, x)].kernel.dim
            vec = dict(kpart)
            for i, c in g.source.unit_vec(y).items():
                vec[kdim + i] = c
            units[p] = vec
    category = AInftyCategory.build(quiver, structure.components, units,
                                    max_arity=bound)
    alpha = AInftyFunctor.build(pr_a, category, g.source, max_arity=bound)
    beta_m = compose_formal(
        strict.psi, compose_formal(strict.model.recompose, product, bound), bound)
    beta = AInftyFunctor.build(beta_m, category, f.source, max_arity=bound)

    # square commutativity, exact at the formal-morphism level
    model_pr = strict.projection.morphism
    lhs = compose_formal(model_pr, product, bound)
    rhs = compose_formal(g.morphism, alpha.morphism, bound)
    if lhs != rhs:
        raise InternalConsistencyError("projection square does not commute")
    if compose_formal(f.morphism, beta.morphism, bound) != rhs:
        raise InternalConsistencyError("pullback square does not commute")
    return PullbackCategory(category, alpha, beta, product, pairs, strict,
                            f, g, f1, bound, total)


def _total_bound_pullback(f: AInftyFunctor, g: AInftyFunctor) -> Optional[int]:
    src_q = f.source.quiver
    gsrc_q = g.source.quiver
    tgt_q = f.target.quiver
    degs = [d for q in (src_q, gsrc_q, tgt_q)
            for sp in q.hom.values() for _, d in sp.basis]
    if not degs:
        return 0
    iv = (min(degs), max(degs))
    comp = arity_feasibility_bound(iv, iv, 1)
    structure = arity_feasibility_bound(iv, iv, 2)
    defect = arity_feasibility_bound(iv, iv, 3)
    if comp is None or structure is None or defect is None:
        return None
    return max(comp, structure, defect)


# -- universal property --------------------------------------------------------

@dataclass
class UniversalReport:
    functor: AInftyFunctor
    triangles: bool
    uniqueness: bool


def induce_functor(
    p: PullbackCategory,
    cone_i: AInftyFunctor,
    cone_l: AInftyFunctor,
    max_arity: Optional[int] = None,
) -> UniversalReport:
    """The unique functor into the pullback induced by a commuting cone.

    cone_i lands in the original source of F (it is carried into the split
    model through phi and decompose); cone_l lands in the source of G.
    Commutation of F . cone_i = G . cone_l is checked exactly first.
    """
    bound = min(p.arity_bound, max_arity) if max_arity else p.arity_bound
    if cone_i.source.quiver.objects != cone_l.source.quiver.objects:
        raise AInftyError("cone legs must share their source category")
    lhs = compose_formal(p.f.morphism, cone_i.morphism, bound)
    rhs = compose_formal(p.g.morphism, cone_l.morphism, bound)
    if lhs != rhs:
        diff_keys = set(lhs.components) | set(rhs.components)
        for key in sorted(diff_keys):
            a = lhs.components.get(key, {})
            b = rhs.components.get(key, {})
            if a != b:
                bad = sorted(set(a) | set(b))[0]
                raise ConeError(key[0], key[1], bad)
    fld = p.category.fld
    strict = p.strictification
    i_model = compose_formal(strict.phi_functor.morphism, cone_i.morphism, bound)

    c_objects = cone_i.source.quiver.objects
    object_map = {}
    for c in c_objects:
        px = cone_i.object_map[c]
        py = cone_l.object_map[c]
        name = pair_name(px, py)
        if name not in p.object_pairs:
            raise ConeError(0, (c,), ())
        object_map[c] = name
    comps: Components = {}
    keys = set(i_model.components) | set(cone_l.morphism.components)
    for (n, cobjs) in keys:
        ptable: Dict[Tuple[int, ...], Vec] = {}
        pobjs = tuple(object_map[c] for c in cobjs)
        xs = [p.object_pairs[q][0] for q in pobjs]
        kdim_model = p.strictification.model.splits[(xs[0], xs[-1])].kernel.dim
        im_table = i_model.components.get((n, cobjs), {})
        l_table = cone_l.morphism.components.get((n, cobjs), {})
        for in_t in set(im_table) | set(l_table):
            vec: Vec = {}
            for oi, c in im_table.get(in_t, {}).items():
                if oi < kdim_model:
                    vec[oi] = c
            for oi, c in l_table.get(in_t, {}).items():
                vec[kdim_model + oi] = c
            if vec:
                ptable[in_t] = vec
        if ptable:
            comps[(n, cobjs)] = ptable
    morphism = FormalMorphism(cone_i.source.quiver, p.category.quiver,
                              object_map, comps)
    functor = AInftyFunctor.build(morphism, cone_i.source, p.category,
                                  max_arity=bound)
    tri1 = compose_formal(p.alpha.morphism, morphism, bound) == cone_l.morphism
    tri2 = compose_formal(p.beta.morphism, morphism, bound) == cone_i.morphism
    tri3 = compose_formal(p.product_morphism, morphism, bound) == i_model
    uniq = _rederive_components(p, functor, i_model, cone_l, bound)
    return UniversalReport(functor, tri1 and tri2 and tri3, uniq)


def _rederive_components(p: PullbackCategory, functor: AInftyFunctor,
                         i_model: FormalMorphism, cone_l: AInftyFunctor,
                         bound: int) -> bool:
    """Force each component from the two projections alone (uniqueness)."""
    fld = p.category.fld
    src_q = functor.morphism.source
    partial = FormalMorphism(src_q, p.category.quiver,
                             dict(functor.object_map), {})
    for n in range(1, bound + 1):
        lower = compose_formal(p.product_morphism, partial, n)
        keys = {k for k in set(i_model.components) | set(lower.components)
                if k[0] == n}
        keys |= {k for k in cone_l.morphism.components if k[0] == n}
        forced: Components = {}
        for (m, cobjs) in keys:
            pobjs = tuple(functor.object_map[c] for c in cobjs)
            xs = [p.object_pairs[q][0] for q in pobjs]
            kdim = p.strictification.model.splits[(xs[0], xs[-1])].kernel.dim
            table: Dict[Tuple[int, ...], Vec] = {}
            im_t = i_model.components.get((m, cobjs), {})
            lo_t = lower.components.get((m, cobjs), {})
            l_t = cone_l.morphism.components.get((m, cobjs), {})
            for in_t in set(im_t) | set(lo_t) | set(l_t):
                vec: Vec = {}
                for oi, c in im_t.get(in_t, {}).items():
                    if oi < kdim:
                        vec[oi] = c
                for oi, c in lo_t.get(in_t, {}).items():
                    if oi < kdim:
                        s = fld.sub(vec.get(oi, fld.zero), c)
                        if fld.is_zero(s):
                            vec.pop(oi, None)
                        else:
                            vec[oi] = s
                for oi, c in l_t.get(in_t, {}).items():
                    vec[kdim + oi] = c
                if vec:
                    table[in_t] = vec
            if table:
                forced[(n, cobjs)] = table
        got = {k: t for k, t in functor.morphism.components.items() if k[0] == n}
        if normalize_components(fld, forced) != normalize_components(fld, got):
            return False
        comps = dict(partial.components)
        comps.update(got)
        partial = FormalMorphism(src_q, p.category.quiver,
                                 dict(functor.object_map), comps)
    return True


# -- fibration closure ----------------------------------------------------------

@dataclass
class FibrationReport:
    sections: Dict[str, CheckReport]

    @property
    def acyclic_fibration(self) -> str:
        return self.sections.get("alpha_acyclic_fibration",
                                 CheckReport("undecided")).verdict


def certify_fibration_closure(
    p: PullbackCategory,
    f_isolifts: Optional[List[IsoLiftCertificate]] = None,
    f_essentials: Optional[List[EssentialCertificate]] = None,
    alpha_isolifts: Optional[List[IsoLiftCertificate]] = None,
    alpha_essentials: Optional[List[EssentialCertificate]] = None,
) -> FibrationReport:
    """F1 closure unconditionally; F2 and acyclicity clause by clause."""
    sections: Dict[str, CheckReport] = {}
    alpha_f1 = check_F1(p.alpha)
    sections["alpha_f1"] = CheckReport(
        "pass" if alpha_f1.passed else "fail",
        [] if alpha_f1.passed else [str(alpha_f1.failure)],
    )
    unital = (p.f.source.units is not None and p.f.target.units is not None
              and p.g.source.units is not None
              and p.category.units is not None)
    if not unital:
        sections["f_isofibration"] = CheckReport(
            "undecided", ["units required for the F2 clauses"])
        return FibrationReport(sections)
    f_iso = check_isofibration(p.f, f_isolifts)
    sections["f_isofibration"] = f_iso
    if f_iso.passed:
        sections["alpha_isofibration_isofib"] = check_isofibration(
            p.alpha, alpha_isolifts)
    f_qe = check_quasi_equivalence(p.f, f_essentials)
    sections["f_quasi_equivalence"] = CheckReport(
        f_qe.verdict, f_qe.hom_level.witnesses + f_qe.essential.witnesses)
    if f_iso.passed and f_qe.passed:
        sections["alpha_kernel_acyclicity_ff"] = kernel_acyclicity(p.alpha)
        sections["alpha_hom_level_ff"] = _hom_level_quasi_iso(p.alpha)
        sections["alpha_essential_surjectivity_exsurj"] = _essential_surjectivity(
            p.alpha, alpha_essentials)
        clause_keys = [
            "alpha_f1", "alpha_isofibration_isofib", "alpha_kernel_acyclicity_ff",
            "alpha_hom_level_ff", "alpha_essential_surjectivity_exsurj",
        ]
        verdicts = [sections[k].verdict for k in clause_keys]
        if all(v == "pass" for v in verdicts):
            overall = "pass"
        elif any(v == "fail" for v in verdicts):
            overall = "fail"
        else:
            overall = "undecided"
        sections["alpha_acyclic_fibration"] = CheckReport(overall)
    return FibrationReport(sections)
