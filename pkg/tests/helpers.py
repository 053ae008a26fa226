"""Shared fixture builders and independent oracles for the test suite.

Valid structures are built from honest differential graded data (complexes,
compositions) through the sign dictionary

    m1(f) = (-1)**deg(f) d.f - f.d        m2(g, f) = (-1)**deg(f) g.f

and randomness enters through formal diffeomorphisms with identity arity-1
part, which transport valid structures to valid structures with higher
components.  The double-sum defect oracle below is written densely and
independently of the package's partition engine.
"""
from __future__ import annotations

import itertools
import random
from typing import Dict, List, Optional, Tuple

from ainfty.fields import Field, Scalar
from ainfty.linear import GradedSpace, Vec, vec_add, vec_scale
from ainfty.core import AInftyCategory, AInftyFunctor
from ainfty.quiver import (
    Components,
    FormalMorphism,
    GradedQuiver,
    Prenatural,
    compose_formal,
    eval_basis,
    eval_multilinear,
    identity_formal,
    l_compose,
    normalize_components,
    r_compose,
)

Pair = Tuple[str, str]


# -- independent dense double-sum defect oracle -------------------------------

def double_sum_defect(quiver: GradedQuiver, structure: Prenatural,
                      max_arity: int) -> Dict[tuple, Vec]:
    """The explicit two-index defect sum, evaluated densely per basis tuple.

    Entirely independent of the sparse partition engine: iterates object
    paths and input tuples directly and applies the (-1)**(deg sum - d)
    sign to each inner placement.
    """
    fld = quiver.fld
    out: Dict[tuple, Vec] = {}
    for n in range(1, max_arity + 1):
        for objs in quiver.paths(n):
            for in_t in quiver.basis_tuples(objs):
                degs = quiver.input_degrees(objs, in_t)
                acc: Vec = {}
                for m in range(1, n + 1):
                    for d in range(0, n - m + 1):
                        # the inner block consumes f_{d+m}..f_{d+1}: tuple
                        # positions n-d-m..n-d-1, objects x_d..x_{d+m}
                        lo = n - d - m
                        hi = n - d
                        inner = eval_basis(structure, m,
                                           tuple(objs[d:d + m + 1]), in_t[lo:hi])
                        if not inner:
                            continue
                        sign = sum(degs[n - 1 - j] for j in range(d)) - d
                        outer_objs = tuple(objs[:d + 1]) + tuple(objs[d + m:])
                        vecs = [{b: fld.one} for b in in_t[:lo]] + [inner] + \
                               [{b: fld.one} for b in in_t[hi:]]
                        val = eval_multilinear(structure, n - m + 1, outer_objs, vecs)
                        if sign % 2:
                            val = vec_scale(fld, fld.from_int(-1), val)
                        acc = vec_add(fld, acc, val)
                if acc:
                    out[(n, objs, in_t)] = acc
    return out


def engine_defect_map(defect: Prenatural) -> Dict[tuple, Vec]:
    out: Dict[tuple, Vec] = {}
    for (n, objs), table in defect.components.items():
        for in_t, v in table.items():
            if v:
                out[(n, objs, in_t)] = v
    return out


# -- DG data ------------------------------------------------------------------

def dg_structure(quiver: GradedQuiver, d_entries: Dict[Pair, Dict[int, Vec]],
                 comp_entries: Dict[Tuple[str, str, str], Dict[Tuple[int, int], Vec]]
                 ) -> Components:
    """Structure components from raw DG data through the sign dictionary.

    d_entries[(x, y)][i] is d of the i-th basis element of hom(x, y);
    comp_entries[(x, y, z)][(j, i)] is the plain composite g_j . f_i for
    f_i in hom(x, y), g_j in hom(y, z).
    """
    fld = quiver.fld
    comps: Components = {}
    for (x, y), table in d_entries.items():
        sp = quiver.space(x, y)
        t = {(i,): dict(v) for i, v in table.items() if v}
        if t:
            comps[(1, (x, y))] = t
    for (x, y, z), table in comp_entries.items():
        src1 = quiver.space(x, y)
        t: Dict[Tuple[int, ...], Vec] = {}
        for (j, i), v in table.items():
            if not v:
                continue
            signed = v if src1.degree(i) % 2 == 0 else vec_scale(
                fld, fld.from_int(-1), v)
            t[(j, i)] = signed
        if t:
            comps[(2, (x, y, z))] = t
    return normalize_components(fld, comps)


def endo_complex_category(fld: Field, complexes: Dict[str, Tuple[Tuple[str, int], ...]],
                          d_of: Dict[str, Dict[int, int]]) -> AInftyCategory:
    """DG category of based complexes: hom = graded maps, composition honest.

    complexes[x] is the basis of the complex at object x; d_of[x] maps basis
    positions to their differential images (single basis element, coefficient
    one; positions absent are cycles).  The hom basis element "i>j" sends
    source position i to target position j.
    """
    objects = tuple(sorted(complexes))
    hom: Dict[Pair, GradedSpace] = {}
    index: Dict[Pair, List[Tuple[int, int]]] = {}
    for x in objects:
        for y in objects:
            basis = []
            idx = []
            for i, (_, di) in enumerate(complexes[x]):
                for j, (_, dj) in enumerate(complexes[y]):
                    basis.append((f"{i}>{j}", dj - di))
                    idx.append((i, j))
            hom[(x, y)] = GradedSpace(tuple(basis))
            index[(x, y)] = idx
    quiver = GradedQuiver(fld, objects, hom)

    def d_matrix(x: str) -> Dict[int, Vec]:
        return {i: {j: fld.one} for i, j in d_of.get(x, {}).items()}

    d_entries: Dict[Pair, Dict[int, Vec]] = {}
    comp_entries: Dict[Tuple[str, str, str], Dict[Tuple[int, int], Vec]] = {}
    for x in objects:
        for y in objects:
            dx, dy = d_matrix(x), d_matrix(y)
            table: Dict[int, Vec] = {}
            for k, (i, j) in enumerate(index[(x, y)]):
                deg = hom[(x, y)].degree(k)
                out: Vec = {}
                # (-1)**deg d.f : apply d_y after
                img = dy.get(j)
                if img is not None:
                    (j2, c), = img.items()
                    k2 = index[(x, y)].index((i, j2))
                    sgn = fld.one if deg % 2 == 0 else fld.from_int(-1)
                    out = vec_add(fld, out, {k2: fld.mul(sgn, c)})
                # - f.d : precompose with d_x, i.e. sum over i2 with d(i2) = i
                for i2, img2 in dx.items():
                    (i3, c), = img2.items()
                    if i3 != i:
                        continue
                    k2 = index[(x, y)].index((i2, j))
                    out = vec_add(fld, out, {k2: fld.neg(c)})
                if out:
                    table[k] = out
            if table:
                d_entries[(x, y)] = table
    for x in objects:
        for y in objects:
            for z in objects:
                table: Dict[Tuple[int, int], Vec] = {}
                for kf, (i, j) in enumerate(index[(x, y)]):
                    for kg, (j2, l) in enumerate(index[(y, z)]):
                        if j2 != j:
                            continue
                        k_out = index[(x, z)].index((i, l))
                        table[(kg, kf)] = {k_out: fld.one}
                if table:
                    comp_entries[(x, y, z)] = table
    comps = dg_structure(quiver, d_entries, comp_entries)
    units = {}
    for x in objects:
        sp = hom[(x, x)]
        vec: Vec = {}
        for k, (i, j) in enumerate(index[(x, x)]):
            if i == j:
                vec[k] = fld.one
        units[x] = vec
    return AInftyCategory.build(quiver, comps, units=units)


def raw_from_category(base: AInftyCategory):
    """Recover raw DG data (D = m1, g.f = (-1)**deg(f) m2(g, f)) from a
    dictionary-built DG category (no components above arity 2)."""
    fld = base.fld
    assert all(n <= 2 for (n, _) in base.structure.components)
    d_entries: Dict[Pair, Dict[int, Vec]] = {}
    comp_entries: Dict[Tuple[str, str, str], Dict[Tuple[int, int], Vec]] = {}
    for (n, objs), table in base.structure.components.items():
        if n == 1:
            d_entries[(objs[0], objs[1])] = {
                in_t[0]: dict(v) for in_t, v in table.items()
            }
        else:
            sp1 = base.quiver.space(objs[0], objs[1])
            raw = {}
            for (j, i), v in table.items():
                raw[(j, i)] = v if sp1.degree(i) % 2 == 0 else vec_scale(
                    fld, fld.from_int(-1), v)
            comp_entries[tuple(objs)] = raw
    return d_entries, comp_entries


def square_zero_extension(fld: Field, base: AInftyCategory, acyclic: bool
                          ) -> Tuple[AInftyCategory, AInftyFunctor]:
    """A = base tensor C with C = k.1 + k.v (+ k.u), all products of v, u
    zero; F = the projection setting v, u to zero.

    Raw tensor signs: D(h.c) = (Dh).c + (-1)**deg(h) h.(dc) and
    g.(h.c) = (-1)**(deg(c) deg(g)) (g o h).c, while (g.c).h = (g o h).c.
    With acyclic=True, deg u = -1 and d(u) = v makes the kernel the cone of
    the identity, hence acyclic; otherwise the kernel is base-hom.v with the
    base differential.
    """
    steps = (("v", 0), ("u", -1)) if acyclic else (("v", 0),)
    objects = base.objects
    base_d, base_comp = raw_from_category(base)
    hom: Dict[Pair, GradedSpace] = {}
    for (x, y), sp in base.quiver.hom.items():
        basis = [(n, d) for n, d in sp.basis]
        for tag, shift in steps:
            basis += [(f"{n}.{tag}", d + shift) for n, d in sp.basis]
        hom[(x, y)] = GradedSpace(tuple(basis))
    quiver = GradedQuiver(fld, objects, hom)

    def block(pair: Pair, tag: str, i: int) -> int:
        base_dim = base.quiver.space(*pair).dim
        off = {"": 0, "v": base_dim, "u": 2 * base_dim}
        return off[tag] + i

    def relayer(pair: Pair, tag: str, vec: Vec) -> Vec:
        return {block(pair, tag, oi): c for oi, c in vec.items()}

    d_entries: Dict[Pair, Dict[int, Vec]] = {}
    for x in objects:
        for y in objects:
            sp = base.quiver.space(x, y)
            raw = base_d.get((x, y), {})
            table: Dict[int, Vec] = {}
            for tag, _ in ("", 0), *steps:
                for i, vec in raw.items():
                    table[block((x, y), tag, i)] = relayer((x, y), tag, vec)
            if acyclic:
                for i in range(sp.dim):
                    key = block((x, y), "u", i)
                    sgn = fld.one if sp.degree(i) % 2 == 0 else fld.from_int(-1)
                    table[key] = vec_add(fld, table.get(key, {}),
                                         {block((x, y), "v", i): sgn})
            if table:
                d_entries[(x, y)] = {k: v for k, v in table.items() if v}
    comp_entries: Dict[Tuple[str, str, str], Dict[Tuple[int, int], Vec]] = {}
    for (x, y, z), raw in base_comp.items():
        sp1 = base.quiver.space(x, y)
        sp2 = base.quiver.space(y, z)
        table: Dict[Tuple[int, int], Vec] = {}
        for (j, i), vec in raw.items():
            table[(j, i)] = relayer((x, z), "", vec)
            for tag, shift in steps:
                # left factor in M: (g.c).h = (g o h).c
                table[(block((y, z), tag, j), i)] = relayer((x, z), tag, vec)
                # right factor in M: g.(h.c) = (-1)**(deg c * deg g) (g o h).c
                sgn = fld.one
                if shift % 2 and sp2.degree(j) % 2:
                    sgn = fld.from_int(-1)
                table[(j, block((x, y), tag, i))] = vec_scale(
                    fld, sgn, relayer((x, z), tag, vec))
        if table:
            comp_entries[(x, y, z)] = {k: v for k, v in table.items() if v}
    comps = dg_structure(quiver, d_entries, comp_entries)
    units = {x: dict(base.unit_vec(x)) for x in objects} if base.units else None
    ext = AInftyCategory.build(quiver, comps, units=units)
    proj_comps: Components = {}
    for (x, y), sp in base.quiver.hom.items():
        proj_comps[(1, (x, y))] = {(i,): {i: fld.one} for i in range(sp.dim)}
    morphism = FormalMorphism(quiver, base.quiver, {x: x for x in objects},
                              proj_comps)
    functor = AInftyFunctor.build(morphism, ext, base)
    return ext, functor


# -- random generators ----------------------------------------------------------

def random_diffeo(rng: random.Random, quiver: GradedQuiver, max_arity: int = 3,
                  density: float = 0.5, unital_for: Optional[Dict[str, Vec]] = None
                  ) -> FormalMorphism:
    """Formal diffeomorphism: arity-1 identity plus random higher terms.

    With unital_for given, higher components vanish on tuples meeting the
    unit vectors (kept by only using non-unit basis indices), so twisting
    preserves strict unitality.
    """
    fld = quiver.fld
    comps = {k: {it: dict(v) for it, v in t.items()}
             for k, t in identity_formal(quiver).components.items()}
    for n in range(2, max_arity + 1):
        for objs in quiver.paths(n):
            sp_out = quiver.space(objs[0], objs[-1])
            if sp_out.dim == 0:
                continue
            table: Dict[Tuple[int, ...], Vec] = {}
            for in_t in quiver.basis_tuples(objs):
                if unital_for is not None and _meets_unit(quiver, unital_for,
                                                          objs, in_t):
                    continue
                if rng.random() > density:
                    continue
                want = sum(quiver.input_degrees(objs, in_t)) + 1 - n
                outs = [o for o in range(sp_out.dim) if sp_out.degree(o) == want]
                if not outs:
                    continue
                o = rng.choice(outs)
                c = fld.from_int(rng.choice([-2, -1, 1, 2]))
                table[in_t] = {o: c}
            if table:
                key = (n, objs)
                comps[key] = table
    return FormalMorphism(quiver, quiver, {x: x for x in quiver.objects}, comps)


def _meets_unit(quiver, units, objs, in_t) -> bool:
    n = len(in_t)
    for i, b in enumerate(in_t):
        xa, xb = objs[n - 1 - i], objs[n - i]
        if xa == xb and xa in units and b in units[xa]:
            return True
    return False


def formal_inverse(u: FormalMorphism, max_arity: int) -> FormalMorphism:
    """Compositional inverse of an arity-1-identity formal diffeomorphism."""
    fld = u.source.fld
    ident = identity_formal(u.source)
    inv_comps = {k: {it: dict(v) for it, v in t.items()}
                 for k, t in ident.components.items()}
    for n in range(2, max_arity + 1):
        inv = FormalMorphism(u.source, u.source, dict(u.object_map), inv_comps)
        resid = compose_formal(u, inv, n)
        for (m, objs), table in resid.components.items():
            if m != n:
                continue
            neg = {it: vec_scale(fld, fld.from_int(-1), v)
                   for it, v in table.items() if v}
            if neg:
                inv_comps[(n, objs)] = neg
    return FormalMorphism(u.source, u.source, dict(u.object_map),
                          normalize_components(fld, inv_comps))


def twist_structure(cat: AInftyCategory, u: FormalMorphism, max_arity: int
                    ) -> AInftyCategory:
    """Transport the structure along u so u: (A, m) -> (A, m') is a functor."""
    fld = cat.fld
    ident = identity_formal(cat.quiver)
    m_new = Prenatural(ident, ident, 2, {})
    lhs = l_compose(u, cat.structure, max_arity)
    for n in range(1, max_arity + 1):
        rhs_lower = r_compose(u, m_new, n).arity_part(n)
        top = lhs.arity_part(n).sub(rhs_lower)
        comps = dict(m_new.components)
        for key, table in top.components.items():
            if key[0] == n and table:
                comps[key] = table
        m_new = Prenatural(ident, ident, 2, comps)
    units = {x: dict(cat.unit_vec(x)) for x in cat.objects} if cat.units else None
    return AInftyCategory.build(cat.quiver, m_new.components, units=units,
                                max_arity=max_arity)


def twisted_functor(strict_f: AInftyFunctor, rng: random.Random,
                    max_arity: int = 4, density: float = 0.5
                    ) -> AInftyFunctor:
    """Replace a strict functor by one with nonzero higher components.

    Twist the source by a random diffeomorphism u and precompose with its
    inverse: the new source category is the transported one and the functor
    F . u^{-1} acquires components F^1 . (u^{-1})^n while keeping the same
    arity-1 part (hence the same F1 status).
    """
    src = strict_f.source
    units = src.units if strict_f.strictly_unital else None
    u = random_diffeo(rng, src.quiver, max_arity=max_arity, density=density,
                      unital_for=units)
    twisted_src = twist_structure(src, u, max_arity=max(
        max_arity, src.arity_bound))
    uinv = formal_inverse(u, max(max_arity, src.arity_bound))
    morphism = compose_formal(strict_f.morphism, uinv,
                              max(max_arity, strict_f.arity_bound))
    return AInftyFunctor.build(morphism, twisted_src, strict_f.target)


def random_complexes(rng: random.Random, n_objects: int,
                     max_dim: int = 2) -> Tuple[Dict, Dict]:
    complexes = {}
    d_of = {}
    for k in range(n_objects):
        name = f"c{k}"
        dim = rng.randint(1, max_dim)
        basis = tuple((f"v{i}", rng.randint(-1, 1)) for i in range(dim))
        complexes[name] = basis
        dmap = {}
        used = set()
        for i in range(dim):
            for j in range(dim):
                if i == j or i in dmap or j in used or j in dmap:
                    continue
                if basis[j][1] == basis[i][1] + 1 and rng.random() < 0.5:
                    dmap[i] = j
                    used.add(j)
        d_of[name] = dmap
    return complexes, d_of


def random_dg_category(rng: random.Random, fld: Field, n_objects: int = 1,
                       max_dim: int = 2) -> AInftyCategory:
    complexes, d_of = random_complexes(rng, n_objects, max_dim)
    return endo_complex_category(fld, complexes, d_of)


def random_flat_prenatural(rng: random.Random, quiver: GradedQuiver,
                           degree: int, max_arity: int,
                           density: float = 0.4) -> Prenatural:
    """Unconstrained degree-g flat prenatural over the identity."""
    fld = quiver.fld
    ident = identity_formal(quiver)
    comps: Components = {}
    for n in range(1, max_arity + 1):
        for objs in quiver.paths(n):
            sp_out = quiver.space(objs[0], objs[-1])
            table: Dict[Tuple[int, ...], Vec] = {}
            for in_t in quiver.basis_tuples(objs):
                if rng.random() > density:
                    continue
                want = sum(quiver.input_degrees(objs, in_t)) + degree - n
                outs = [o for o in range(sp_out.dim) if sp_out.degree(o) == want]
                if not outs:
                    continue
                table[in_t] = {rng.choice(outs): fld.from_int(rng.choice(
                    [-2, -1, 1, 2, 3]))}
            if table:
                comps[(n, objs)] = table
    return Prenatural(ident, ident, degree, comps)


def random_formal_morphism(rng: random.Random, src: GradedQuiver,
                           tgt: GradedQuiver, max_arity: int,
                           density: float = 0.4) -> FormalMorphism:
    """Unconstrained formal morphism with a random object map."""
    fld = src.fld
    object_map = {x: rng.choice(list(tgt.objects)) for x in src.objects}
    comps: Components = {}
    for n in range(1, max_arity + 1):
        for objs in src.paths(n):
            sp_out = tgt.space(object_map[objs[0]], object_map[objs[-1]])
            if sp_out.dim == 0:
                continue
            table: Dict[Tuple[int, ...], Vec] = {}
            for in_t in src.basis_tuples(objs):
                if rng.random() > density:
                    continue
                want = sum(src.input_degrees(objs, in_t)) + 1 - n
                outs = [o for o in range(sp_out.dim) if sp_out.degree(o) == want]
                if not outs:
                    continue
                table[in_t] = {rng.choice(outs): fld.from_int(rng.choice(
                    [-2, -1, 1, 2]))}
            if table:
                comps[(n, objs)] = table
    return FormalMorphism(src, tgt, object_map, comps)


def perturb_structure(rng: random.Random, cat: AInftyCategory,
                      max_arity: int = 3) -> Optional[Components]:
    """A random degree-legal perturbation of one component, or None."""
    quiver = cat.quiver
    fld = quiver.fld
    for _ in range(60):
        n = rng.randint(1, max_arity)
        paths = list(quiver.paths(n))
        if not paths:
            continue
        objs = rng.choice(paths)
        sp_out = quiver.space(objs[0], objs[-1])
        tuples = list(quiver.basis_tuples(objs))
        if not tuples or sp_out.dim == 0:
            continue
        in_t = rng.choice(tuples)
        want = sum(quiver.input_degrees(objs, in_t)) + 2 - n
        outs = [o for o in range(sp_out.dim) if sp_out.degree(o) == want]
        if not outs:
            continue
        o = rng.choice(outs)
        comps = {k: {it: dict(v) for it, v in t.items()}
                 for k, t in cat.structure.components.items()}
        table = comps.setdefault((n, objs), {})
        vec = dict(table.get(in_t, {}))
        vec[o] = fld.add(vec.get(o, fld.zero), fld.from_int(rng.choice([1, 2])))
        if fld.is_zero(vec[o]):
            vec[o] = fld.one
        table[in_t] = vec
        return normalize_components(fld, comps)
    return None


# -- word-level bar calculus (for strictification cross-checks) -----------------

# a word is (objects tuple x_0..x_n, letters tuple in f_n..f_1 order);
# linear combinations of words are dicts word -> coefficient.

Word = Tuple[Tuple[str, ...], Tuple[int, ...]]


def _word_add(fld, acc: Dict[Word, Scalar], word: Word, c: Scalar) -> None:
    s = fld.add(acc.get(word, fld.zero), c)
    if fld.is_zero(s):
        acc.pop(word, None)
    else:
        acc[word] = s


def bar_expand_word(formal: FormalMorphism, word: Word) -> Dict[Word, Scalar]:
    """Image of a basis word under the bar-level extension of a formal
    morphism: sum over partitions into blocks mapped by its components.
    No signs arise: every block has reduced degree zero."""
    fld = formal.source.fld
    objs, letters = word
    n = len(letters)
    out: Dict[Word, Scalar] = {}
    if n == 0:
        return {((formal.object_map[objs[0]],), ()): fld.one}

    def rec(pos: int, acc_letters: Tuple[int, ...], acc_starts,
            coeff: Scalar) -> None:
        # pos letters consumed from the left (the f_n side)
        if pos == n:
            bounds = [n] + acc_starts        # descending block boundaries
            word_objs = tuple(formal.object_map[objs[i]]
                              for i in reversed(bounds))
            _word_add(fld, out, (word_objs, acc_letters), coeff)
            return
        for size in range(1, n - pos + 1):
            start = n - pos - size
            block_objs = tuple(objs[start:n - pos + 1])
            block_in = letters[pos:pos + size]
            vec = eval_basis(formal, size, block_objs, block_in)
            for oi, c in vec.items():
                rec(pos + size, acc_letters + (oi,), acc_starts + [start],
                    fld.mul(coeff, c))

    rec(0, (), [], fld.one)
    return out


def bar_expand_combo(formal: FormalMorphism,
                     combo: Dict[Word, Scalar]) -> Dict[Word, Scalar]:
    fld = formal.source.fld
    out: Dict[Word, Scalar] = {}
    for word, c in combo.items():
        for w2, c2 in bar_expand_word(formal, word).items():
            _word_add(fld, out, w2, fld.mul(c, c2))
    return out


def coderivation_expand_word(pren: Prenatural, word: Word) -> Dict[Word, Scalar]:
    """Bar-level coderivation of an identity-endpoint prenatural on a word:
    one insertion per summand with the Koszul sign (-1)**((g-1)*red right)."""
    fld = pren.source.fld
    quiver = pren.source
    objs, letters = word
    n = len(letters)
    bar = (pren.degree - 1) % 2
    out: Dict[Word, Scalar] = {}
    degs = quiver.input_degrees(objs, letters)
    for d in range(0, n + 1):              # letters strictly right of the block
        red_right = sum(degs[n - 1 - j] - 1 for j in range(d))
        for m in range(0, n - d + 1):       # block size (arity 0 allowed)
            block_objs = tuple(objs[d:d + m + 1]) if m else (objs[d],)
            lo = n - d - m
            hi = n - d
            vec = eval_basis(pren, m, block_objs, letters[lo:hi])
            if not vec:
                continue
            sign = fld.one if (bar * red_right) % 2 == 0 else fld.from_int(-1)
            for oi, c in vec.items():
                new_letters = letters[:lo] + (oi,) + letters[hi:]
                new_objs = tuple(objs[:d + 1]) + tuple(objs[d + m:])
                _word_add(fld, out, (new_objs, new_letters),
                          fld.mul(sign, c))
    return out


def coderivation_expand_combo(pren: Prenatural,
                              combo: Dict[Word, Scalar]) -> Dict[Word, Scalar]:
    fld = pren.source.fld
    out: Dict[Word, Scalar] = {}
    for word, c in combo.items():
        for w2, c2 in coderivation_expand_word(pren, word).items():
            _word_add(fld, out, w2, fld.mul(c, c2))
    return out


def nilpotent_category(fld: Field, gens: Tuple[Tuple[str, int], ...],
                       d_of: Optional[Dict[str, str]] = None,
                       n_objects: int = 1) -> AInftyCategory:
    """Strictly unital DG category: units plus generators with zero products.

    Every hom space is the span of the unit (on diagonals) and the named
    generators; all products not involving a unit vanish, and any
    square-zero degree-one differential on the generators is admissible.
    With several objects, every hom space carries the same generator set.
    """
    d_of = d_of or {}
    objects = tuple(f"o{i}" for i in range(n_objects))
    hom = {}
    for x in objects:
        for y in objects:
            basis = ((("1", 0),) if x == y else ()) + tuple(gens)
            hom[(x, y)] = GradedSpace(basis)
    quiver = GradedQuiver(fld, objects, hom)
    names = {(x, y): [n for n, _ in hom[(x, y)].basis] for x in objects
             for y in objects}
    d_entries: Dict[Pair, Dict[int, Vec]] = {}
    comp_entries: Dict[Tuple[str, str, str], Dict[Tuple[int, int], Vec]] = {}
    for (x, y), sp in hom.items():
        table = {}
        for src, tgt in d_of.items():
            table[names[(x, y)].index(src)] = {names[(x, y)].index(tgt): fld.one}
        if table:
            d_entries[(x, y)] = table
    for x in objects:
        for y in objects:
            for z in objects:
                table: Dict[Tuple[int, int], Vec] = {}
                for j, nj in enumerate(names[(y, z)]):
                    for i, ni in enumerate(names[(x, y)]):
                        if nj == "1" and y == z:
                            table[(j, i)] = {i: fld.one}
                        elif ni == "1" and x == y:
                            table[(j, i)] = {j: fld.one}
                if table:
                    comp_entries[(x, y, z)] = table
    comps = dg_structure(quiver, d_entries, comp_entries)
    units = {x: {0: fld.one} for x in objects}
    return AInftyCategory.build(quiver, comps, units=units)


def point_category(fld: Field) -> AInftyCategory:
    return nilpotent_category(fld, ())


GEN_POOLS = (
    (("a", -1),),
    (("a", -1), ("b", 0)),
    (("a", 0), ("b", -1)),
    (("a", -1), ("b", -2)),
)


def random_f1_functor(rng: random.Random, fld: Field, require_f2: bool = True,
                      acyclic: bool = True, density: float = 0.45
                      ) -> AInftyFunctor:
    """Square-zero projection twisted until it has a nonzero arity-2 part."""
    for _ in range(40):
        gens = rng.choice(GEN_POOLS)
        d_of = {}
        if rng.random() < 0.5 and len(gens) == 2:
            a, b = gens
            if b[1] == a[1] + 1:
                d_of = {a[0]: b[0]}
            elif a[1] == b[1] + 1:
                d_of = {b[0]: a[0]}
        base = nilpotent_category(fld, gens, d_of=d_of)
        ext, f_strict = square_zero_extension(fld, base, acyclic=acyclic)
        f = twisted_functor(f_strict, rng, max_arity=2, density=density)
        if not require_f2 or any(n >= 2 for (n, _) in f.morphism.components):
            return f
    raise RuntimeError("could not generate an F1 functor with F^2 != 0")


def inclusion_functor(point: AInftyCategory, target: AInftyCategory,
                      obj: str) -> AInftyFunctor:
    """The unit inclusion of the point category onto one object."""
    fld = point.fld
    o = point.objects[0]
    tgt_unit = target.unit_vec(obj)
    morphism = FormalMorphism(point.quiver, target.quiver, {o: obj}, {
        (1, (o, o)): {(0,): dict(tgt_unit)},
    })
    return AInftyFunctor.build(morphism, point, target)


def random_g_functor(rng: random.Random, target: AInftyCategory
                     ) -> AInftyFunctor:
    """An arbitrary functor into the given category: identity, point
    inclusion, or a doubled collapse, each possibly twisted."""
    fld = target.fld
    kind = rng.randrange(3)
    if kind == 2 and len(target.objects) != 1:
        kind = 0
    if kind == 0:
        g = AInftyFunctor.identity(target)
    elif kind == 1:
        g = inclusion_functor(point_category(fld), target,
                              rng.choice(list(target.objects)))
    else:
        g = doubled_object_functor(target)
    if rng.random() < 0.7:
        g = twisted_functor(g, rng, max_arity=2, density=0.4)
    return g


# -- named fixtures --------------------------------------------------------------

def sq_source(fld: Field) -> AInftyCategory:
    """One object; basis 1 (deg 0), e (deg 0), t (deg -1); m1(t) = e."""
    one, neg = fld.one, fld.from_int(-1)
    sp = GradedSpace((("1", 0), ("e", 0), ("t", -1)))
    q = GradedQuiver(fld, ("o",), {("o", "o"): sp})
    I, E, T = 0, 1, 2
    comps = {
        (1, ("o", "o")): {(T,): {E: one}},
        (2, ("o", "o", "o")): {
            (I, I): {I: one}, (I, E): {E: one}, (E, I): {E: one},
            (I, T): {T: neg}, (T, I): {T: one},
        },
    }
    return AInftyCategory.build(q, comps, units={"o": {I: one}})


def sq_target(fld: Field) -> AInftyCategory:
    sp = GradedSpace((("1'", 0),))
    q = GradedQuiver(fld, ("p",), {("p", "p"): sp})
    comps = {(2, ("p", "p", "p")): {(0, 0): {0: fld.one}}}
    return AInftyCategory.build(q, comps, units={"p": {0: fld.one}})


def sq_functor(fld: Field) -> AInftyFunctor:
    a, ap = sq_source(fld), sq_target(fld)
    m = FormalMorphism(a.quiver, ap.quiver, {"o": "p"},
                       {(1, ("o", "o")): {(0,): {0: fld.one}}})
    return AInftyFunctor.build(m, a, ap)


def m3_category(fld: Field) -> AInftyCategory:
    """One object; a (deg 1), b (deg 2); the only operation sends (a,a,a) to b."""
    sp = GradedSpace((("a", 1), ("b", 2)))
    q = GradedQuiver(fld, ("o",), {("o", "o"): sp})
    comps = {(3, ("o",) * 4): {(0, 0, 0): {1: fld.one}}}
    return AInftyCategory.build(q, comps, max_arity=5)


def doubled_object_functor(base: AInftyCategory) -> AInftyFunctor:
    """Collapse a two-copy doubling of a one-object category onto it."""
    fld = base.fld
    o = base.objects[0]
    sp = base.quiver.space(o, o)
    objs = ("y1", "y2")
    hom = {(a, b): sp for a in objs for b in objs}
    quiver = GradedQuiver(fld, objs, hom)
    comps: Components = {}
    for (n, oo), table in base.structure.components.items():
        for path in itertools.product(objs, repeat=n + 1):
            comps[(n, path)] = {it: dict(v) for it, v in table.items()}
    units = None
    if base.units is not None:
        units = {a: dict(base.unit_vec(o)) for a in objs}
    doubled = AInftyCategory.build(quiver, comps, units=units)
    m_comps: Components = {}
    for a in objs:
        for b in objs:
            m_comps[(1, (a, b))] = {(i,): {i: fld.one} for i in range(sp.dim)}
    morphism = FormalMorphism(quiver, base.quiver, {a: o for a in objs}, m_comps)
    return AInftyFunctor.build(morphism, doubled, base)
