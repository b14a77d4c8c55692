"""Finite-dimensional associative unital algebras as structure constants."""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .linalg import Matrix, check_prime, matmul_mod, rank_array, solve_array


class AlgebraError(ValueError):
    pass


class Algebra:
    """Algebra with basis b_0..b_{d-1}; b_i b_j = sum_k mul[i, j, k] b_k.

    ``factors`` is set by :func:`direct_product` and records the block
    decomposition; ``origin`` is free-form metadata (used by the ring
    builders to remember how the algebra was assembled).
    """

    def __init__(self, p: int, mul, unit, labels: Sequence[str] | None = None,
                 factors: tuple = (), origin=None):
        self.p = check_prime(p)
        mul = np.array(mul, dtype=np.int64)
        d = len(unit)
        mul = mul.reshape(d, d, d) % self.p
        mul.flags.writeable = False
        self.mul = mul
        unit = np.array(unit, dtype=np.int64).reshape(d) % self.p
        unit.flags.writeable = False
        self.unit = unit
        self.dim = d
        self.labels = tuple(labels) if labels is not None else tuple(f"b{i}" for i in range(d))
        if len(self.labels) != d:
            raise AlgebraError("label count does not match dimension")
        self.factors = tuple(factors)
        self.origin = origin
        self._op: Optional[Algebra] = None

    @cached_property
    def key(self) -> str:
        h = hashlib.sha256()
        h.update(str((self.p, self.dim)).encode())
        h.update(self.mul.tobytes())
        h.update(self.unit.tobytes())
        return h.hexdigest()

    def __eq__(self, other) -> bool:
        return isinstance(other, Algebra) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Algebra(dim={self.dim}, p={self.p}, basis={list(self.labels)})"

    def product(self, u, v) -> np.ndarray:
        """Product of two coefficient vectors."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        return np.einsum("i,j,ijk->k", u, v, self.mul) % self.p

    def basis_vector(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim, dtype=np.int64)
        e[i] = 1
        return e

    def left_mult(self, i: int) -> Matrix:
        """Matrix of v -> b_i v."""
        return Matrix._wrap(np.ascontiguousarray(self.mul[i].T), self.p)

    def right_mult(self, j: int) -> Matrix:
        """Matrix of v -> v b_j."""
        return Matrix._wrap(np.ascontiguousarray(self.mul[:, j, :].T), self.p)

    @cached_property
    def left_regular(self) -> np.ndarray:
        # stack L_i, shape (d, d, d)
        return np.ascontiguousarray(np.transpose(self.mul, (0, 2, 1)))

    @cached_property
    def right_regular(self) -> np.ndarray:
        return np.ascontiguousarray(np.transpose(self.mul, (1, 2, 0)))

    @cached_property
    def generation(self) -> "Generation":
        return _generation(self)

    @property
    def op(self) -> "Algebra":
        return opposite(self)

    def factor_offsets(self) -> list[int]:
        offs, o = [], 0
        for f in self.factors:
            offs.append(o)
            o += f.dim
        return offs


@dataclass
class ValidationReport:
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok


def validate(a: Algebra) -> ValidationReport:
    """List every violated associativity triple and unit law."""
    rep = ValidationReport()
    c, p, d = a.mul, a.p, a.dim
    if d == 0:
        return rep
    lhs = np.einsum("ijk,klm->ijlm", c, c) % p
    rhs = np.einsum("jlk,ikm->ijlm", c, c) % p
    bad = np.argwhere((lhs != rhs).any(axis=3))
    for i, j, l in bad:
        rep.failures.append(("associativity", (int(i), int(j), int(l)),
                             f"({a.labels[i]}*{a.labels[j]})*{a.labels[l]} != "
                             f"{a.labels[i]}*({a.labels[j]}*{a.labels[l]})"))
    left = np.einsum("i,ijk->jk", a.unit, c) % p
    right = np.einsum("j,ijk->ik", a.unit, c) % p
    eye = np.eye(d, dtype=np.int64)
    for j in np.flatnonzero((left != eye).any(axis=1)):
        rep.failures.append(("left unit", (int(j),), f"1*{a.labels[j]} != {a.labels[j]}"))
    for i in np.flatnonzero((right != eye).any(axis=1)):
        rep.failures.append(("right unit", (int(i),), f"{a.labels[i]}*1 != {a.labels[i]}"))
    return rep


def field_algebra(p: int) -> Algebra:
    return Algebra(p, [[[1]]], [1], ["1"])


def zero_algebra(p: int) -> Algebra:
    return Algebra(p, np.zeros((0, 0, 0)), [], [])


def dual_numbers(p: int) -> Algebra:
    return from_quiver(QuiverPresentation(1, [(1, 1, "x")], [("x", "x")], 1), p)


# ---------------------------------------------------------------------------
# quivers


@dataclass(frozen=True)
class QuiverPresentation:
    """Quiver with vertices 1..n, arrows (source, target, label).

    Relations are monomial paths listed in traversal order (first arrow
    first). ``bound`` is the maximal length of a surviving path.
    """
    vertices: int
    arrows: Sequence[tuple[int, int, str]]
    relations: Sequence[Sequence[str]] = ()
    bound: int = 1


def _paths(q: QuiverPresentation, length: int, rels: set) -> list[tuple[int, ...]]:
    # paths as tuples of arrow indices, avoiding any relation as a subpath
    arrows = list(q.arrows)
    out: list[tuple[int, ...]] = [()]
    cur = [(i,) for i in range(len(arrows))]
    if length >= 1:
        cur = [w for w in cur if not _contains_rel(w, rels)]
    layers = [cur]
    for _ in range(1, length):
        nxt = []
        for w in layers[-1]:
            last = arrows[w[-1]]
            for i, (s, _, _) in enumerate(arrows):
                if s == last[1]:
                    cand = w + (i,)
                    if not _contains_rel(cand, rels):
                        nxt.append(cand)
        layers.append(nxt)
    for layer in layers[:length]:
        out.extend(layer)
    return out


def _contains_rel(w: tuple[int, ...], rels: set) -> bool:
    n = len(w)
    for i in range(n):
        for j in range(i + 1, n + 1):
            if w[i:j] in rels:
                return True
    return False


def from_quiver(q: QuiverPresentation, p: int) -> Algebra:
    """Path algebra modulo monomial relations; basis = surviving paths.

    A path a1 then a2 is the algebra element a2*a1, so that left modules
    are representations of the quiver.
    """
    p = check_prime(p)
    n = q.vertices
    arrows = list(q.arrows)
    label_idx = {lab: i for i, (_, _, lab) in enumerate(arrows)}
    if len(label_idx) != len(arrows):
        raise AlgebraError("arrow labels must be distinct")
    for s, t, lab in arrows:
        if not (1 <= s <= n and 1 <= t <= n):
            raise AlgebraError(f"arrow {lab} has an endpoint outside 1..{n}")
    rels = set()
    for r in q.relations:
        try:
            w = tuple(label_idx[x] for x in r)
        except KeyError as exc:
            raise AlgebraError(f"relation {list(r)} uses unknown arrow {exc}") from None
        for u, v in zip(w, w[1:]):
            if arrows[u][1] != arrows[v][0]:
                raise AlgebraError(f"relation {list(r)} is not a composable path")
        if not w:
            raise AlgebraError("empty relation")
        rels.add(w)
    nontrivial = _paths(q, q.bound, rels)[1:]
    # admissibility: nothing of length bound+1 survives
    longer = _paths(q, q.bound + 1, rels)
    for w in longer:
        if len(w) == q.bound + 1:
            names = [arrows[i][2] for i in w]
            raise AlgebraError(f"non-admissible presentation: path {names} survives beyond bound {q.bound}")
    nontrivial.sort(key=lambda w: (len(w), w))
    # basis: trivial paths then nontrivial paths
    basis: list[tuple] = [("e", v) for v in range(1, n + 1)] + [("p", w) for w in nontrivial]
    index = {b: i for i, b in enumerate(basis)}
    d = len(basis)

    def src(b):
        return b[1] if b[0] == "e" else arrows[b[1][0]][0]

    def tgt(b):
        return b[1] if b[0] == "e" else arrows[b[1][-1]][1]

    mul = np.zeros((d, d, d), dtype=np.int64)
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            # bi * bj = "bj then bi"
            if tgt(bj) != src(bi):
                continue
            if bi[0] == "e":
                mul[i, j, j] = 1
            elif bj[0] == "e":
                mul[i, j, i] = 1
            else:
                w = bj[1] + bi[1]
                k = index.get(("p", w))
                if k is not None:
                    mul[i, j, k] = 1
    labels = [f"e{v}" for v in range(1, n + 1)] + [
        "*".join(arrows[k][2] for k in reversed(w)) for w in nontrivial]
    unit = [1] * n + [0] * len(nontrivial)
    a = Algebra(p, mul, unit, labels)
    return a


# ---------------------------------------------------------------------------
# builders


def opposite(a: Algebra) -> Algebra:
    if a._op is None:
        op = Algebra(a.p, np.transpose(a.mul, (1, 0, 2)), a.unit, a.labels,
                     factors=tuple(opposite(f) for f in a.factors))
        op._op = a
        a._op = op
    return a._op


def direct_product(*algs: Algebra) -> Algebra:
    """Block-diagonal product; factors are recorded for enumeration."""
    if not algs:
        raise AlgebraError("direct_product needs at least one factor")
    p = algs[0].p
    for b in algs:
        if b.p != p:
            raise AlgebraError("direct_product of algebras over different fields")
    nonzero = [b for b in algs if b.dim > 0]
    if len(nonzero) == 1 and len(algs) > 1:
        return nonzero[0]
    d = sum(b.dim for b in algs)
    mul = np.zeros((d, d, d), dtype=np.int64)
    unit = np.zeros(d, dtype=np.int64)
    labels = []
    o = 0
    for idx, b in enumerate(algs):
        s = slice(o, o + b.dim)
        mul[s, s, s] = b.mul
        unit[s] = b.unit
        labels += [f"{lab}.{idx + 1}" for lab in b.labels]
        o += b.dim
    return Algebra(p, mul, unit, labels, factors=tuple(algs))


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class Generation:
    """A generating set and a word expression for every basis element.

    ``words`` are tuples of generator indices whose products form a basis;
    ``coeff[w, k]`` expresses b_k = sum_w coeff[w, k] * word_w.
    """
    gens: tuple[int, ...]
    words: tuple[tuple[int, ...], ...]
    coeff: np.ndarray


def _closure(a: Algebra, gens: list[int]):
    p = a.p
    vecs = [a.unit.copy()]
    words: list[tuple[int, ...]] = [()]
    mat = a.unit.reshape(-1, 1).copy()
    r = rank_array(mat, p)
    i = 0
    while i < len(vecs):
        for g in gens:
            v = a.product(vecs[i], a.basis_vector(g))
            cand = np.concatenate([mat, v.reshape(-1, 1)], axis=1)
            rc = rank_array(cand, p)
            if rc > r:
                mat, r = cand, rc
                vecs.append(v)
                words.append(words[i] + (g,))
        i += 1
    return words, mat, r


def _generation(a: Algebra) -> Generation:
    d, p = a.dim, a.p
    if d == 0:
        return Generation((), (), np.zeros((0, 0), dtype=np.int64))
    gens: list[int] = []
    words, mat, r = _closure(a, gens)
    for i in range(d):
        if r == d:
            break
        cand = np.concatenate([mat, a.basis_vector(i).reshape(-1, 1)], axis=1)
        if rank_array(cand, p) > r:
            gens.append(i)
            words, mat, r = _closure(a, gens)
    # prune redundant generators (reverse order)
    for g in list(reversed(gens)):
        trial = [x for x in gens if x != g]
        _, _, rt = _closure(a, trial)
        if rt == d:
            gens = trial
    words, mat, r = _closure(a, gens)
    coeff = solve_array(mat, np.eye(d, dtype=np.int64), p)
    return Generation(tuple(gens), tuple(words), coeff)


def find_algebra_isomorphism(a: Algebra, b: Algebra, cap: int = 1 << 20) -> Optional[Matrix]:
    """Search an algebra isomorphism a -> b by guessing generator images.

    Returns the matrix (columns = images of the basis of a) or None.
    """
    if a.p != b.p or a.dim != b.dim:
        return None
    p, d = a.p, a.dim
    gen = a.generation
    r = len(gen.gens)
    if p ** (d * r) > cap:
        raise AlgebraError(f"algebra isomorphism search needs {p}**{d * r} candidates")
    for flat in itertools.product(range(p), repeat=d * r):
        imgs = np.array(flat, dtype=np.int64).reshape(r, d)
        gpos = {g: t for t, g in enumerate(gen.gens)}
        wv = []
        for w in gen.words:
            v = b.unit.copy()
            for g in w:
                v = b.product(v, imgs[gpos[g]])
            wv.append(v)
        wmat = np.array(wv, dtype=np.int64).T if wv else np.zeros((d, 0), dtype=np.int64)
        phi = matmul_mod(wmat, gen.coeff, p)
        if rank_array(phi, p) < d:
            continue
        if not np.array_equal(phi @ a.unit % p, b.unit):
            continue
        # multiplicativity on basis
        lhs = np.einsum("ijk,mk->ijm", a.mul, phi) % p
        rhs = np.einsum("mi,nj,mnk->ijk", phi, phi, b.mul) % p
        if np.array_equal(lhs, rhs):
            return Matrix._wrap(phi, p)
    return None
