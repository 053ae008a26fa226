"""Strictification of a graded-split surjective functor.

Given F: A ->> A' with split arity-1 components, build the split model
quiver with homs Ker(F1) (+) A'-hom, the automorphism phi = Id + gamma of
the underlying formal calculus (phi^1 = id, phi^n = s1 . F^n for n >= 2),
its inverse psi, the transported structure that makes phi an A-infinity
functor from the original category to the model, and the strict projection
onto the A'-summand.

Basis names in model homs carry a "k:" prefix for the kernel part and an
"a:" prefix for the split-off part.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .linear import GradedSpace, SplitData, Vec, vec_scale
from .core import (
    AInftyCategory,
    AInftyError,
    AInftyFunctor,
    F1Result,
    Pair,
    _choose_bound,
    check_F1,
    functor_verify_bound,
    structure_verify_bound,
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
)

KER_PREFIX = "k:"
SUM_PREFIX = "a:"


class StrictifyError(AInftyError):
    pass


def sum_space(left: GradedSpace, right: GradedSpace) -> GradedSpace:
    """K (+) M with prefixed basis names; left block first."""
    basis = [(KER_PREFIX + n, d) for n, d in left.basis]
    basis += [(SUM_PREFIX + n, d) for n, d in right.basis]
    return GradedSpace(tuple(basis))


def sum_vec(fld, left: Vec, right: Vec, left_dim: int) -> Vec:
    out: Vec = dict(left)
    for i, c in right.items():
        out[left_dim + i] = c
    return {i: c for i, c in out.items() if not fld.is_zero(c)}


def split_parts(vec: Vec, left_dim: int) -> Tuple[Vec, Vec]:
    left = {i: c for i, c in vec.items() if i < left_dim}
    right = {i - left_dim: c for i, c in vec.items() if i >= left_dim}
    return left, right


@dataclass
class SplitModel:
    base: AInftyCategory
    functor: AInftyFunctor
    splits: Dict[Pair, SplitData]
    quiver: GradedQuiver
    decompose: FormalMorphism     # strict: A -> model, f |-> (r1 f, F1 f)
    recompose: FormalMorphism     # strict: model -> A, (g, h) |-> i1 g + s1 h

    def kernel_dim(self, x: str, y: str) -> int:
        return self.splits[(x, y)].kernel.dim


def build_split_model(functor: AInftyFunctor, f1: F1Result) -> SplitModel:
    """The split model quiver with its exact decompose/recompose pair."""
    if not f1.passed:
        raise StrictifyError("condition F1 failed; no split model exists")
    base = functor.source
    fld = base.fld
    hom: Dict[Pair, GradedSpace] = {}
    for x in base.objects:
        for y in base.objects:
            split = f1.splits[(x, y)]
            sp = sum_space(split.kernel, split.surjection.target)
            if sp.dim:
                hom[(x, y)] = sp
    quiver = GradedQuiver(fld, base.objects, hom)
    dec: Components = {}
    rec: Components = {}
    for x in base.objects:
        for y in base.objects:
            split = f1.splits[(x, y)]
            kdim = split.kernel.dim
            src = base.quiver.space(x, y)
            dtable: Dict[Tuple[int, ...], Vec] = {}
            for i in range(src.dim):
                v = sum_vec(fld, split.retract.apply({i: fld.one}),
                            split.surjection.apply({i: fld.one}), kdim)
                if v:
                    dtable[(i,)] = v
            if dtable:
                dec[(1, (x, y))] = dtable
            rtable: Dict[Tuple[int, ...], Vec] = {}
            for ki in range(kdim):
                v = split.include.column(ki)
                if v:
                    rtable[(ki,)] = v
            for bi in range(split.surjection.target.dim):
                v = split.section.apply({bi: fld.one})
                if v:
                    rtable[(kdim + bi,)] = v
            if rtable:
                rec[(1, (x, y))] = rtable
    ident = {x: x for x in base.objects}
    decompose = FormalMorphism(base.quiver, quiver, dict(ident), dec)
    recompose = FormalMorphism(quiver, base.quiver, dict(ident), rec)
    model = SplitModel(base, functor, f1.splits, quiver, decompose, recompose)
    bound = max(functor.morphism.max_arity_support(), 1)
    if compose_formal(recompose, decompose, bound) != identity_formal(base.quiver):
        raise StrictifyError("recompose . decompose is not the identity")
    if compose_formal(decompose, recompose, bound) != identity_formal(quiver):
        raise StrictifyError("decompose . recompose is not the identity")
    return model


def build_phi_psi(model: SplitModel, max_arity: int
                  ) -> Tuple[FormalMorphism, FormalMorphism, FormalMorphism]:
    """gamma, phi = Id + gamma, and the two-sided inverse psi.

    phi^n = s1 . F^n for n >= 2 (sections indexed by the block endpoints),
    phi^1 = id; psi is solved arity by arity from phi . psi = Id, which the
    arity filtration makes finite.
    """
    base = model.base
    fld = base.fld
    gamma_comps: Components = {}
    for (n, objs), table in model.functor.morphism.components.items():
        if n < 2:
            continue
        section = model.splits[(objs[0], objs[-1])].section
        gtable: Dict[Tuple[int, ...], Vec] = {}
        for in_t, vec in table.items():
            img = section.apply(vec)
            if img:
                gtable[in_t] = img
        if gtable:
            gamma_comps[(n, objs)] = gtable
    ident_map = {x: x for x in base.objects}
    gamma = FormalMorphism(base.quiver, base.quiver, dict(ident_map), gamma_comps)
    ident = identity_formal(base.quiver)
    phi_comps: Components = {k: {it: dict(v) for it, v in t.items()}
                             for k, t in ident.components.items()}
    for key, table in gamma_comps.items():
        if key[0] <= max_arity:
            phi_comps[key] = {it: dict(v) for it, v in table.items()}
    phi = FormalMorphism(base.quiver, base.quiver, dict(ident_map), phi_comps)
    psi_comps: Components = {k: {it: dict(v) for it, v in t.items()}
                             for k, t in ident.components.items()}
    for n in range(2, max_arity + 1):
        psi = FormalMorphism(base.quiver, base.quiver, dict(ident_map), psi_comps)
        resid = compose_formal(phi, psi, n)
        for (m, objs), table in resid.components.items():
            if m != n:
                continue
            neg = {
                it: vec_scale(fld, fld.from_int(-1), v)
                for it, v in table.items() if v
            }
            if neg:
                psi_comps[(n, objs)] = neg
    psi = FormalMorphism(base.quiver, base.quiver, dict(ident_map),
                         normalize_components(fld, psi_comps))
    if compose_formal(phi, psi, max_arity) != ident:
        raise StrictifyError("phi . psi is not the identity")
    if compose_formal(psi, phi, max_arity) != ident:
        raise StrictifyError("psi . phi is not the identity")
    return gamma, phi, psi


def transport_structure(model: SplitModel, phi: FormalMorphism,
                        max_arity: int) -> Prenatural:
    """The structure on the base quiver making phi an A-infinity functor
    from the original category to the transported one.

    Since phi^1 = id, the arity-n functor equation determines the arity-n
    component uniquely from lower data: the unknown enters only through the
    all-ones partition of the right-hand block sum.
    """
    base = model.base
    fld = base.fld
    ident = identity_formal(base.quiver)
    m_hat = Prenatural(ident, ident, 2, {})
    lhs = l_compose(phi, base.structure, max_arity)
    for n in range(1, max_arity + 1):
        rhs_lower = r_compose(phi, m_hat, n).arity_part(n)
        top = lhs.arity_part(n).sub(rhs_lower)
        comps = dict(m_hat.components)
        for key, table in top.components.items():
            if key[0] == n and table:
                comps[key] = table
        m_hat = Prenatural(ident, ident, 2, comps)
    if l_compose(phi, base.structure, max_arity) != r_compose(phi, m_hat, max_arity):
        raise StrictifyError("transport recursion failed to close")
    return m_hat


def strict_projection(model: SplitModel, transported: AInftyCategory,
                      max_arity: int) -> AInftyFunctor:
    """The strict functor (k, a') |-> a' out of the transported category.

    Building it certifies the functor equation, which is exactly the
    statement that the split-off component of every transported operation
    is the target operation of the split-off parts.
    """
    fld = model.base.fld
    functor = model.functor
    comps: Components = {}
    for x in model.base.objects:
        for y in model.base.objects:
            split = model.splits[(x, y)]
            kdim = split.kernel.dim
            table = {
                (kdim + bi,): {bi: fld.one}
                for bi in range(split.surjection.target.dim)
            }
            if table:
                comps[(1, (x, y))] = table
    morphism = FormalMorphism(
        model.quiver, functor.target.quiver,
        {x: functor.object_map[x] for x in model.base.objects}, comps,
    )
    return AInftyFunctor.build(morphism, transported, functor.target,
                               max_arity=max_arity)


@dataclass
class Strictification:
    model: SplitModel
    gamma: FormalMorphism
    phi: FormalMorphism
    psi: FormalMorphism
    m_hat: Prenatural                 # transported structure on the base quiver
    transported: AInftyCategory       # the same structure on the model quiver
    projection: AInftyFunctor         # strict: (model, m_hat) -> A'
    phi_functor: AInftyFunctor        # (A, m) -> (model, m_hat)
    psi_functor: AInftyFunctor        # (model, m_hat) -> (A, m)
    arity_bound: int
    total: bool

    @property
    def f1_strict(self) -> FormalMorphism:
        """The formal morphism {F0, F1, 0, ...}."""
        f = self.model.functor.morphism
        comps = {k: {it: dict(v) for it, v in t.items()}
                 for k, t in f.components.items() if k[0] == 1}
        return FormalMorphism(f.source, f.target, dict(f.object_map), comps)


def strictify(functor: AInftyFunctor, f1: Optional[F1Result] = None,
              max_arity: Optional[int] = None) -> Strictification:
    """Full strictification bundle for an F1 functor."""
    if f1 is None:
        f1 = check_F1(functor)
    model = build_split_model(functor, f1)
    full = _total_bound(model)
    bound, total = _choose_bound(max_arity, full)
    gamma, phi, psi = build_phi_psi(model, bound)
    m_hat = transport_structure(model, phi, bound)

    base = model.base
    conj = l_compose(model.decompose, r_compose(model.recompose, m_hat, bound), bound)
    units_model = None
    if base.units is not None:
        units_model = {
            x: eval_multilinear(model.decompose, 1, (x, x), [base.unit_vec(x)])
            for x in base.objects
        }
    transported = AInftyCategory.build(model.quiver, conj.components,
                                       units_model, max_arity=bound)
    projection = strict_projection(model, transported, bound)
    phi_functor = AInftyFunctor.build(
        compose_formal(model.decompose, phi, bound), base, transported,
        max_arity=bound)
    psi_functor = AInftyFunctor.build(
        compose_formal(psi, model.recompose, bound), transported, base,
        max_arity=bound)

    s = Strictification(model, gamma, phi, psi, m_hat, transported,
                        projection, phi_functor, psi_functor, bound, total)
    # commuting square (the formal-morphism reading of the bar-level diagrams)
    if compose_formal(s.f1_strict, phi, bound) != functor.morphism:
        raise StrictifyError("F1-strict . phi differs from F")
    if compose_formal(functor.morphism, psi, bound) != s.f1_strict:
        raise StrictifyError("F . psi differs from the strict part of F")
    return s


def _total_bound(model: SplitModel) -> Optional[int]:
    base_q = model.base.quiver
    tgt_q = model.functor.target.quiver
    candidates = [
        structure_verify_bound(base_q),
        structure_verify_bound(model.quiver),
        functor_verify_bound(base_q, tgt_q),
        functor_verify_bound(model.quiver, tgt_q),
        functor_verify_bound(base_q, model.quiver),
        functor_verify_bound(model.quiver, base_q),
    ]
    if any(c is None for c in candidates):
        return None
    return max(candidates)
