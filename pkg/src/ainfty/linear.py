"""Based graded linear algebra over an exact field.

Vectors are sparse ``{basis index: scalar}`` dictionaries.  Maps between
graded spaces carry a degree shift and are stored sparsely; elimination is
done densely per degree block with deterministic pivoting (leftmost nonzero
column, first nonzero row), so kernels, sections and cohomology
representatives are reproducible across runs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .fields import Field, Scalar

Vec = Dict[int, Scalar]


class LinearError(ValueError):
    """Structural errors: dimension mismatches, shift violations."""


class NotSurjectiveError(LinearError):
    """A map expected to be degreewise surjective fails in some degree."""

    def __init__(self, degree: int):
        super().__init__(f"not surjective in degree {degree}")
        self.degree = degree


class NotSquareZeroError(LinearError):
    """d ∘ d is nonzero; carries a witness basis element."""

    def __init__(self, witness: str):
        super().__init__(f"differential does not square to zero on {witness}")
        self.witness = witness


# -- vector helpers ---------------------------------------------------------

def vec_add(fld: Field, u: Vec, v: Vec) -> Vec:
    out = dict(u)
    for i, c in v.items():
        s = fld.add(out.get(i, fld.zero), c)
        if fld.is_zero(s):
            out.pop(i, None)
        else:
            out[i] = s
    return out


def vec_scale(fld: Field, c: Scalar, v: Vec) -> Vec:
    if fld.is_zero(c):
        return {}
    return {i: fld.mul(c, x) for i, x in v.items()}


def vec_sub(fld: Field, u: Vec, v: Vec) -> Vec:
    return vec_add(fld, u, vec_scale(fld, fld.from_int(-1), v))


def vec_is_zero(v: Vec) -> bool:
    return not v


def vec_eq(u: Vec, v: Vec) -> bool:
    return u == v


@dataclass(frozen=True)
class GradedSpace:
    """Finite based Z-graded space: an ordered basis of (name, degree)."""

    basis: Tuple[Tuple[str, int], ...]

    def __post_init__(self) -> None:
        names = [n for n, _ in self.basis]
        if len(set(names)) != len(names):
            raise LinearError("basis names must be unique within a space")

    @property
    def dim(self) -> int:
        return len(self.basis)

    def degree(self, i: int) -> int:
        return self.basis[i][1]

    def name(self, i: int) -> str:
        return self.basis[i][0]

    def index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.basis):
            if n == name:
                return i
        raise LinearError(f"no basis element named {name!r}")

    def indices_of_degree(self, d: int) -> List[int]:
        return [i for i, (_, deg) in enumerate(self.basis) if deg == d]

    def degrees(self) -> List[int]:
        return sorted({deg for _, deg in self.basis})

    def dims_by_degree(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for _, deg in self.basis:
            out[deg] = out.get(deg, 0) + 1
        return out


EMPTY_SPACE = GradedSpace(())


@dataclass
class GradedMap:
    """Degree-homogeneous linear map, sparse over (target idx, source idx)."""

    fld: Field
    source: GradedSpace
    target: GradedSpace
    shift: int
    entries: Dict[Tuple[int, int], Scalar] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean: Dict[Tuple[int, int], Scalar] = {}
        for (ti, si), c in self.entries.items():
            if self.fld.is_zero(c):
                continue
            if self.target.degree(ti) != self.source.degree(si) + self.shift:
                raise LinearError(
                    f"entry {self.target.name(ti)}<-{self.source.name(si)} "
                    f"violates shift {self.shift}"
                )
            clean[(ti, si)] = c
        self.entries = clean

    @staticmethod
    def identity(fld: Field, space: GradedSpace) -> "GradedMap":
        return GradedMap(fld, space, space, 0, {(i, i): fld.one for i in range(space.dim)})

    @staticmethod
    def zero(fld: Field, source: GradedSpace, target: GradedSpace, shift: int = 0) -> "GradedMap":
        return GradedMap(fld, source, target, shift, {})

    def apply(self, v: Vec) -> Vec:
        out: Vec = {}
        for (ti, si), c in self.entries.items():
            x = v.get(si)
            if x is None:
                continue
            s = self.fld.add(out.get(ti, self.fld.zero), self.fld.mul(c, x))
            if self.fld.is_zero(s):
                out.pop(ti, None)
            else:
                out[ti] = s
        return out

    def column(self, si: int) -> Vec:
        return {ti: c for (ti, s), c in self.entries.items() if s == si}

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self ∘ other."""
        if other.target is not self.source and other.target != self.source:
            raise LinearError("composition mismatch")
        entries: Dict[Tuple[int, int], Scalar] = {}
        for (mi, si), c in other.entries.items():
            for (ti, mj), d in self.entries.items():
                if mj != mi:
                    continue
                key = (ti, si)
                s = self.fld.add(entries.get(key, self.fld.zero), self.fld.mul(d, c))
                if self.fld.is_zero(s):
                    entries.pop(key, None)
                else:
                    entries[key] = s
        return GradedMap(self.fld, other.source, self.target, self.shift + other.shift, entries)

    def add(self, other: "GradedMap") -> "GradedMap":
        entries = dict(self.entries)
        for key, c in other.entries.items():
            s = self.fld.add(entries.get(key, self.fld.zero), c)
            if self.fld.is_zero(s):
                entries.pop(key, None)
            else:
                entries[key] = s
        return GradedMap(self.fld, self.source, self.target, self.shift, entries)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.shift == other.shift
            and self.entries == other.entries
        )


# -- dense elimination ------------------------------------------------------

def rref(fld: Field, rows: List[List[Scalar]]) -> Tuple[List[List[Scalar]], List[int]]:
    """Reduced row echelon form; returns (rows, pivot columns)."""
    mat = [list(r) for r in rows]
    nrows = len(mat)
    ncols = len(mat[0]) if mat else 0
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if not fld.is_zero(mat[i][c])), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = fld.inv(mat[r][c])
        mat[r] = [fld.mul(inv, x) for x in mat[r]]
        for i in range(nrows):
            if i != r and not fld.is_zero(mat[i][c]):
                f = mat[i][c]
                mat[i] = [fld.sub(x, fld.mul(f, y)) for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return mat, pivots


def solve_dense(fld: Field, rows: List[List[Scalar]], rhs: List[Scalar]) -> Optional[List[Scalar]]:
    """One solution of rows * x = rhs (free variables set to zero)."""
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    if not aug:
        return [] if ncols == 0 else [fld.zero] * ncols
    mat, pivots = rref(fld, aug)
    for row in mat:
        if all(fld.is_zero(x) for x in row[:ncols]) and not fld.is_zero(row[ncols]):
            return None
    x = [fld.zero] * ncols
    for r, c in enumerate(pivots):
        if c == ncols:
            return None
        x[c] = mat[r][ncols]
    return x


def nullspace_dense(fld: Field, rows: List[List[Scalar]]) -> List[List[Scalar]]:
    """Canonical nullspace basis from the RREF (one vector per free column)."""
    ncols = len(rows[0]) if rows else 0
    if not rows:
        return []
    mat, pivots = rref(fld, rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [fld.zero] * ncols
        v[fc] = fld.one
        for r, pc in enumerate(pivots):
            v[pc] = fld.neg(mat[r][fc])
        basis.append(v)
    return basis


# -- graded operations ------------------------------------------------------

def _degree_block(m: GradedMap, d: int) -> Tuple[List[int], List[int], List[List[Scalar]]]:
    """Rows/cols indices and the dense block of m in source degree d."""
    cols = m.source.indices_of_degree(d)
    rows = m.target.indices_of_degree(d + m.shift)
    block = [[m.entries.get((ti, si), m.fld.zero) for si in cols] for ti in rows]
    return rows, cols, block


def solve_linear(m: GradedMap, target: Vec) -> Optional[Vec]:
    """A preimage of `target` under m, or None; exact, degreewise."""
    for ti in target:
        if not 0 <= ti < m.target.dim:
            raise LinearError("target vector does not lie in the map's target space")
    degrees = sorted({m.target.degree(ti) - m.shift for ti in target} | set(m.source.degrees()))
    out: Vec = {}
    for d in degrees:
        rows, cols, block = _degree_block(m, d)
        rhs = [target.get(ti, m.fld.zero) for ti in rows]
        stray = [
            ti for ti in target
            if m.target.degree(ti) == d + m.shift and ti not in rows
        ]
        if stray:  # cannot happen: rows covers the degree
            return None
        if not rows:
            continue
        sol = solve_dense(m.fld, block, rhs)
        if sol is None:
            return None
        for si, x in zip(cols, sol):
            if not m.fld.is_zero(x):
                out[si] = x
    # degrees of target with no source columns at all
    for ti, c in target.items():
        d = m.target.degree(ti) - m.shift
        if not m.source.indices_of_degree(d) and not m.fld.is_zero(c):
            return None
    return out


@dataclass
class SplitData:
    """A graded splitting of a degreewise surjection.

    surjection ∘ section = id, retract ∘ include = id,
    surjection ∘ include = 0, retract ∘ section = 0,
    include ∘ retract + section ∘ surjection = id.
    """

    surjection: GradedMap
    kernel: GradedSpace
    include: GradedMap
    retract: GradedMap
    section: GradedMap

    def verify(self) -> None:
        fld = self.surjection.fld
        src, tgt = self.surjection.source, self.surjection.target
        checks = [
            (self.surjection.compose(self.section), GradedMap.identity(fld, tgt)),
            (self.retract.compose(self.include), GradedMap.identity(fld, self.kernel)),
            (self.surjection.compose(self.include), GradedMap.zero(fld, self.kernel, tgt)),
            (self.retract.compose(self.section), GradedMap.zero(fld, tgt, self.kernel)),
            (
                self.include.compose(self.retract).add(self.section.compose(self.surjection)),
                GradedMap.identity(fld, src),
            ),
        ]
        for got, want in checks:
            if got != want:
                raise LinearError("splitting identities violated")


def split_surjection(m: GradedMap) -> SplitData:
    """Split a degreewise surjection of shift 0.

    Raises NotSurjectiveError naming the first offending degree.  The kernel
    basis is the echelon nullspace basis, ordered by (degree, column).
    """
    if m.shift != 0:
        raise LinearError("only shift-0 maps can satisfy the splitting condition")
    fld = m.fld
    degrees = sorted(set(m.source.degrees()) | set(m.target.degrees()))
    kernel_basis: List[Tuple[str, int]] = []
    kernel_cols: List[Vec] = []
    section_entries: Dict[Tuple[int, int], Scalar] = {}
    for d in degrees:
        rows, cols, block = _degree_block(m, d)
        if rows and not cols:
            raise NotSurjectiveError(d)
        if rows:
            _, pivots = rref(fld, block)
            if len(pivots) < len(rows):
                raise NotSurjectiveError(d)
            for r, ti in enumerate(rows):
                rhs = [fld.one if i == r else fld.zero for i in range(len(rows))]
                sol = solve_dense(fld, block, rhs)
                assert sol is not None
                for si, x in zip(cols, sol):
                    if not fld.is_zero(x):
                        section_entries[(si, ti)] = x
        if cols:
            for nv in nullspace_dense(fld, block) if rows else [
                [fld.one if j == i else fld.zero for j in range(len(cols))]
                for i in range(len(cols))
            ]:
                k = len(kernel_basis)
                kernel_basis.append((f"ker{k}", d))
                kernel_cols.append({
                    cols[j]: x for j, x in enumerate(nv) if not fld.is_zero(x)
                })
    kernel = GradedSpace(tuple(kernel_basis))
    include = GradedMap(fld, kernel, m.source, 0, {
        (si, ki): c for ki, col in enumerate(kernel_cols) for si, c in col.items()
    })
    section = GradedMap(fld, m.target, m.source, 0, section_entries)
    # retract: express (id - section*m) in the kernel basis, degreewise
    proj = GradedMap.identity(fld, m.source).add(
        GradedMap(fld, m.source, m.source, 0, {
            key: fld.neg(c) for key, c in section.compose(m).entries.items()
        })
    )
    retract_entries: Dict[Tuple[int, int], Scalar] = {}
    for d in degrees:
        src_idx = m.source.indices_of_degree(d)
        ker_idx = kernel.indices_of_degree(d)
        if not src_idx:
            continue
        kmat = [[kernel_cols[ki].get(si, fld.zero) for ki in ker_idx] for si in src_idx]
        for si in src_idx:
            pv = proj.column(si)
            rhs = [pv.get(sj, fld.zero) for sj in src_idx]
            sol = solve_dense(fld, kmat, rhs)
            if sol is None:
                raise LinearError("kernel basis does not span the complement")
            for kpos, x in zip(ker_idx, sol):
                if not fld.is_zero(x):
                    retract_entries[(kpos, si)] = x
    retract = GradedMap(fld, m.source, kernel, 0, retract_entries)
    data = SplitData(m, kernel, include, retract, section)
    data.verify()
    return data


@dataclass
class Cohomology:
    """Degreewise cohomology of (space, d) with chosen representatives."""

    space: GradedSpace
    d: GradedMap
    dims: Dict[int, int]
    reps: Dict[int, List[Vec]]
    _image: Dict[int, List[Vec]]

    def coords(self, v: Vec, degree: int) -> Optional[List[Scalar]]:
        """Class coordinates of a degree-homogeneous cocycle, or None."""
        fld = self.d.fld
        idx = self.space.indices_of_degree(degree)
        reps = self.reps.get(degree, [])
        img = self._image.get(degree, [])
        cols = reps + img
        rows = [[col.get(si, fld.zero) for col in cols] for si in idx]
        rhs = [v.get(si, fld.zero) for si in idx]
        for si, c in v.items():
            if self.space.degree(si) != degree and not fld.is_zero(c):
                raise LinearError("vector is not homogeneous of the stated degree")
        sol = solve_dense(fld, rows, rhs) if idx else ([] if not v else None)
        if sol is None:
            return None
        return sol[: len(reps)]

    def total_dim(self) -> int:
        return sum(self.dims.values())


def cohomology(space: GradedSpace, d: GradedMap) -> Cohomology:
    """ker/im of a square-zero shift-1 differential, per degree."""
    if d.shift != 1:
        raise LinearError("a differential must have shift +1")
    if d.source != space or d.target != space:
        raise LinearError("differential endpoints must both be the given space")
    dd = d.compose(d)
    if not dd.is_zero():
        si = sorted(dd.entries)[0][1]
        raise NotSquareZeroError(space.name(si))
    fld = d.fld
    dims: Dict[int, int] = {}
    reps: Dict[int, List[Vec]] = {}
    image: Dict[int, List[Vec]] = {}
    for deg in space.degrees():
        idx = space.indices_of_degree(deg)
        # cocycles in this degree
        rows_out = space.indices_of_degree(deg + 1)
        block = [[d.entries.get((ti, si), fld.zero) for si in idx] for ti in rows_out]
        if rows_out:
            null = nullspace_dense(fld, block)
        else:
            null = [[fld.one if j == i else fld.zero for j in range(len(idx))]
                    for i in range(len(idx))]
        cocycles = [{idx[j]: x for j, x in enumerate(v) if not fld.is_zero(x)} for v in null]
        # boundaries from one degree below
        below = space.indices_of_degree(deg - 1)
        bnd = [d.apply({si: fld.one}) for si in below]
        bnd = [v for v in bnd if v]
        image[deg] = bnd
        # representatives: cocycles adding new pivots past the boundary span
        chosen: List[Vec] = []
        pool = bnd + cocycles
        rows = [[col.get(si, fld.zero) for col in pool] for si in idx]
        _, pivots = rref(fld, rows) if idx else ([], [])
        for p in pivots:
            if p >= len(bnd):
                chosen.append(cocycles[p - len(bnd)])
        reps[deg] = chosen
        dims[deg] = len(chosen)
    return Cohomology(space, d, dims, reps, image)
