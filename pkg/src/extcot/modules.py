"""Finite-dimensional left modules: morphisms, resolutions, Ext, Tor, enumeration."""

from __future__ import annotations

import hashlib
import itertools
import os
import threading
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .algebra import Algebra, opposite
from .linalg import (Matrix, column_basis, kernel_array, left_inverse,
                     matmul_mod, nonzero_det_batch, quotient_maps, rank,
                     rank_array, rref_array, solve_array)

DEFAULT_ENUM_CAP = 10 ** 7
ITER_EXHAUSTIVE = 1 << 16


class EnumerationBudgetExceeded(RuntimeError):
    """Raised when an enumeration would exceed the candidate cap."""


def default_cap() -> int:
    val = os.environ.get("EXTCOT_ENUM_CAP")
    return int(val) if val else DEFAULT_ENUM_CAP


class Module:
    """A left module: one n x n action matrix per algebra basis element."""

    def __init__(self, algebra: Algebra, action, dim: int | None = None, check: bool = True):
        self.algebra = algebra
        p = algebra.p
        act = np.array(action, dtype=np.int64)
        if act.size == 0:
            n = dim if dim is not None else 0
            act = np.zeros((algebra.dim, n, n), dtype=np.int64)
        act %= p
        if act.ndim != 3 or act.shape[0] != algebra.dim or act.shape[1] != act.shape[2]:
            raise ValueError(f"action has shape {act.shape}, algebra dim {algebra.dim}")
        act.flags.writeable = False
        self.act = act
        self.dim = act.shape[1]
        if check:
            bad = module_axiom_failures(algebra, act)
            if bad:
                raise ValueError(f"not a module: {bad[0]}")

    @property
    def p(self) -> int:
        return self.algebra.p

    def rho(self, i: int) -> Matrix:
        return Matrix._wrap(self.act[i].copy(), self.p)

    def act_by(self, v) -> np.ndarray:
        """Action matrix of an algebra element given by coefficients."""
        return np.einsum("k,kab->ab", np.asarray(v, dtype=np.int64), self.act) % self.p

    @cached_property
    def key(self) -> str:
        h = hashlib.sha256()
        h.update(self.algebra.key.encode())
        h.update(str(self.act.shape).encode())
        h.update(self.act.tobytes())
        return h.hexdigest()

    def __eq__(self, other) -> bool:
        return isinstance(other, Module) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Module(dim={self.dim}, algebra_dim={self.algebra.dim})"

    def identity(self) -> "ModuleMap":
        return ModuleMap(self, self, Matrix.identity(self.dim, self.p), check=False)

    def zero_to(self, other: "Module") -> "ModuleMap":
        return ModuleMap(self, other, Matrix.zeros(other.dim, self.dim, self.p), check=False)


def module_axiom_failures(a: Algebra, act: np.ndarray) -> list[str]:
    p, n = a.p, act.shape[1]
    out = []
    unit = np.einsum("k,kab->ab", a.unit, act) % p
    if not np.array_equal(unit, np.eye(n, dtype=np.int64)):
        out.append("unit does not act as identity")
    if a.dim and n:
        lhs = np.einsum("iab,jbc->ijac", act, act) % p
        rhs = np.einsum("ijk,kac->ijac", a.mul, act) % p
        bad = np.argwhere((lhs != rhs).any(axis=(2, 3)))
        for i, j in bad[:5]:
            out.append(f"rho({a.labels[i]})rho({a.labels[j]}) != rho({a.labels[i]}*{a.labels[j]})")
    return out


class ModuleMap:
    """A module homomorphism; mat is target.dim x source.dim."""

    def __init__(self, source: Module, target: Module, mat, check: bool = True):
        if source.algebra != target.algebra:
            raise ValueError("modules over different algebras")
        self.source = source
        self.target = target
        m = mat if isinstance(mat, Matrix) else Matrix(np.array(mat, dtype=np.int64).reshape(target.dim, source.dim), source.p)
        if m.shape != (target.dim, source.dim):
            raise ValueError(f"map matrix shape {m.shape}, expected {(target.dim, source.dim)}")
        self.mat = m
        if check and not self.is_homomorphism():
            raise ValueError("matrix does not intertwine the actions")

    def is_homomorphism(self) -> bool:
        p = self.source.p
        t = self.mat.a
        lhs = np.einsum("ab,kbc->kac", t, self.source.act) % p
        rhs = np.einsum("kab,bc->kac", self.target.act, t) % p
        return bool(np.array_equal(lhs, rhs))

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        if other.target != self.source:
            raise ValueError("composition of incompatible maps")
        return ModuleMap(other.source, self.target, self.mat @ other.mat, check=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.mat + other.mat, check=False)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.mat - other.mat, check=False)

    def scale(self, c: int) -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.mat.scale(c), check=False)

    def rank(self) -> int:
        return rank(self.mat)

    def is_mono(self) -> bool:
        return self.rank() == self.source.dim

    def is_epi(self) -> bool:
        return self.rank() == self.target.dim

    def is_iso(self) -> bool:
        return self.source.dim == self.target.dim and self.is_mono()

    def is_zero(self) -> bool:
        return self.mat.is_zero()


@dataclass
class Complex:
    """Modules with differentials.

    Chain (default): d_i : modules[i] -> modules[i-1], index 0 unused.
    Cochain: d_i : modules[i] -> modules[i+1].
    """
    modules: list
    differentials: list
    start: int = 0
    cochain: bool = False

    def is_complex(self) -> bool:
        ds = self.differentials if self.cochain else self.differentials[1:]
        for d1, d2 in zip(ds, ds[1:]):
            if d1 is None or d2 is None:
                continue
            later = d2 if self.cochain else d1
            earlier = d1 if self.cochain else d2
            if not (later @ earlier).is_zero():
                return False
        return True


# ---------------------------------------------------------------------------
# hom spaces and basic constructions


def _check_same(x: Module, y: Module) -> None:
    if x.algebra != y.algebra:
        raise ValueError("algebra mismatch")


def hom_constraint(x: Module, y: Module) -> np.ndarray:
    """Linear system whose kernel is Hom(x, y), phi vectorized row-major."""
    p = x.p
    gens = x.algebra.generation.gens
    rows = []
    ix = np.eye(x.dim, dtype=np.int64)
    iy = np.eye(y.dim, dtype=np.int64)
    for g in gens:
        rows.append(np.kron(iy, x.act[g].T) - np.kron(y.act[g], ix))
    if not rows:
        return np.zeros((0, x.dim * y.dim), dtype=np.int64)
    return np.concatenate(rows, axis=0) % p


def hom_basis_array(x: Module, y: Module) -> np.ndarray:
    """Kernel basis (columns) of the intertwiner system."""
    _check_same(x, y)
    if x.dim == 0 or y.dim == 0:
        return np.zeros((x.dim * y.dim, 0), dtype=np.int64)
    return kernel_array(hom_constraint(x, y), x.p)


def hom_space(x: Module, y: Module) -> list[ModuleMap]:
    k = hom_basis_array(x, y)
    return [ModuleMap(x, y, Matrix._wrap(k[:, j].reshape(y.dim, x.dim).copy(), x.p), check=False)
            for j in range(k.shape[1])]


def hom_dim(x: Module, y: Module) -> int:
    return hom_basis_array(x, y).shape[1]


def submodule_from_basis(x: Module, basis: Matrix) -> tuple[Module, ModuleMap]:
    """Submodule spanned by independent columns (assumed invariant)."""
    linv = left_inverse(basis)
    act = (linv.a @ x.act % x.p @ basis.a) % x.p if basis.cols else None
    sub = Module(x.algebra, act if act is not None else [], dim=basis.cols, check=False)
    return sub, ModuleMap(sub, x, basis, check=False)


def quotient_module(x: Module, sub: Matrix) -> tuple[Module, ModuleMap, Matrix]:
    """x / span(sub); returns (quotient, projection map, section matrix)."""
    proj, sec = quotient_maps(sub)
    act = (proj.a @ x.act % x.p @ sec.a) % x.p
    q = Module(x.algebra, act, dim=proj.rows, check=False)
    return q, ModuleMap(x, q, proj, check=False), sec


def kernel(f: ModuleMap) -> tuple[Module, ModuleMap]:
    k = Matrix._wrap(kernel_array(f.mat.a, f.source.p), f.source.p)
    return submodule_from_basis(f.source, k)


def cokernel(f: ModuleMap) -> tuple[Module, ModuleMap]:
    q, pi, _ = quotient_module(f.target, f.mat)
    return q, pi


def image(f: ModuleMap) -> tuple[Module, ModuleMap]:
    _, piv = rref_array(f.mat.a, f.source.p)
    basis = Matrix._wrap(f.mat.a[:, piv].copy(), f.source.p)
    return submodule_from_basis(f.target, basis)


@dataclass
class DirectSum:
    module: Module
    injections: list
    projections: list


def direct_sum(*mods: Module, algebra: Algebra | None = None) -> DirectSum:
    if not mods:
        if algebra is None:
            raise ValueError("empty direct sum needs an algebra")
        z = Module(algebra, [], dim=0, check=False)
        return DirectSum(z, [], [])
    a = mods[0].algebra
    p = a.p
    n = sum(m.dim for m in mods)
    act = np.zeros((a.dim, n, n), dtype=np.int64)
    o = 0
    for m in mods:
        _check_same(mods[0], m)
        act[:, o:o + m.dim, o:o + m.dim] = m.act
        o += m.dim
    s = Module(a, act, check=False)
    inj, prj = [], []
    o = 0
    for m in mods:
        e = np.zeros((n, m.dim), dtype=np.int64)
        e[o:o + m.dim, :] = np.eye(m.dim, dtype=np.int64)
        inj.append(ModuleMap(m, s, Matrix._wrap(e, p), check=False))
        prj.append(ModuleMap(s, m, Matrix._wrap(e.T.copy(), p), check=False))
        o += m.dim
    return DirectSum(s, inj, prj)


def zero_module(a: Algebra) -> Module:
    return Module(a, [], dim=0, check=False)


def regular_module(a: Algebra) -> Module:
    return Module(a, a.left_regular, check=False)


def free_module(a: Algebra, g: int) -> Module:
    """A^g with basis index j*d + k (component j, basis element k)."""
    d = a.dim
    act = np.zeros((d, g * d, g * d), dtype=np.int64)
    for j in range(g):
        act[:, j * d:(j + 1) * d, j * d:(j + 1) * d] = a.left_regular
    return Module(a, act, check=False)


def free_map_matrix(x: Module, vectors: np.ndarray) -> np.ndarray:
    """Matrix of A^g -> x sending generator j to column j of vectors."""
    # column (j, k) = rho(b_k) v_j
    cols = np.einsum("kab,bj->ajk", x.act, vectors) % x.p
    return cols.reshape(x.dim, vectors.shape[1] * x.algebra.dim)


def generator_coords(a: Algebra, g: int) -> np.ndarray:
    """Columns = coordinates of the free generators of A^g."""
    d = a.dim
    out = np.zeros((g * d, g), dtype=np.int64)
    for j in range(g):
        out[j * d:(j + 1) * d, j] = a.unit
    return out


def free_cover(x: Module, generators: np.ndarray | None = None) -> ModuleMap:
    """Epi A^(n) -> x; by default generator i goes to basis vector i."""
    if generators is None:
        generators = np.eye(x.dim, dtype=np.int64)
    g = generators.shape[1]
    src = free_module(x.algebra, g)
    return ModuleMap(src, x, Matrix._wrap(free_map_matrix(x, generators), x.p), check=False)


def submodule_span(x: Module, vectors: np.ndarray) -> np.ndarray:
    """A-span of the given columns (as an array of columns)."""
    if vectors.shape[1] == 0:
        return np.zeros((x.dim, 0), dtype=np.int64)
    return free_map_matrix(x, vectors)


def generating_vectors(x: Module) -> np.ndarray:
    """An irredundant generating set, picked greedily from the standard basis."""
    p, n = x.p, x.dim
    chosen: list[int] = []
    span = np.zeros((n, 0), dtype=np.int64)
    r = 0
    eye = np.eye(n, dtype=np.int64)
    for t in range(n):
        if r == n:
            break
        cand = np.concatenate([span, eye[:, [t]]], axis=1)
        if rank_array(cand, p) > r:
            chosen.append(t)
            span = submodule_span(x, eye[:, chosen])
            r = rank_array(span, p)
    for t in list(reversed(chosen)):
        trial = [c for c in chosen if c != t]
        if rank_array(submodule_span(x, eye[:, trial]), p) == n:
            chosen = trial
    return eye[:, chosen]


# ---------------------------------------------------------------------------
# resolutions and Ext


@dataclass
class FreeResolution:
    """P_i = A^{ranks[i]}; images[i] (g_i x ... ) give d_i on generators.

    covers[i] : P_i -> K_{i-1} with K_{-1} = x; kernels[i] = (K_i, incl into P_i).
    gen_images[i] for i >= 1 is the array (ranks[i], ranks[i-1], d) of the
    coefficients of d_i(generator j) in A^{ranks[i-1]}.
    """
    x: Module
    ranks: list[int]
    covers: list
    kernels: list
    gen_images: list

    def length(self) -> int:
        return len(self.ranks) - 1

    def truncated(self, length: int) -> "FreeResolution":
        if length >= self.length():
            return self
        n = length + 1
        return FreeResolution(self.x, self.ranks[:n], self.covers[:n], self.kernels[:n], self.gen_images[:n])

    def differential(self, i: int) -> ModuleMap:
        """d_i : P_i -> P_{i-1} as a ModuleMap (i >= 1)."""
        incl = self.kernels[i - 1][1]
        return incl @ self.covers[i]

    def as_complex(self) -> Complex:
        mods = [c.source for c in self.covers]
        diffs = [self.covers[0]] + [self.differential(i) for i in range(1, len(mods))]
        return Complex(mods, diffs)


_RES_CACHE: dict = {}
_RES_LOCK = threading.Lock()


def projective_resolution(x: Module, length: int, trim: bool = True) -> FreeResolution:
    """Free resolution out to P_length by iterated free covers of kernels.

    With trim=False each kernel vector basis element gets its own generator
    (the literal free_cover); trim=True uses an irredundant generating set.
    """
    key = (x.key, trim)
    with _RES_LOCK:
        res = _RES_CACHE.get(key)
    if res is not None and res.length() >= length:
        return res.truncated(length)
    a = x.algebra
    d = a.dim
    ranks, covers, kernels, gimgs = [], [], [], []
    cur = x
    incl_prev: Optional[ModuleMap] = None
    for i in range(length + 1):
        gens = generating_vectors(cur) if trim else np.eye(cur.dim, dtype=np.int64)
        cov = free_cover(cur, gens)
        ranks.append(gens.shape[1])
        covers.append(cov)
        if i >= 1:
            # coordinates of d_i(gen_j) in P_{i-1} = A^{ranks[i-1]}
            v = incl_prev.mat.a @ gens % a.p
            gimgs.append(v.T.reshape(gens.shape[1], ranks[i - 1], d))
        else:
            gimgs.append(None)
        k, inc = kernel(cov)
        kernels.append((k, inc))
        cur, incl_prev = k, inc
    res = FreeResolution(x, ranks, covers, kernels, gimgs)
    with _RES_LOCK:
        _RES_CACHE[key] = res
    return res


def _dual_differential(y: Module, gimg: np.ndarray) -> np.ndarray:
    """Matrix of Hom(d, Y): Y^{g_prev} -> Y^{g} for d given on generators."""
    g, gp, _ = gimg.shape
    blk = np.einsum("jlk,kab->jalb", gimg, y.act) % y.p
    return blk.reshape(g * y.dim, gp * y.dim)


def ext_dims(x: Module, y: Module, top: int) -> list[int]:
    """[dim Ext^0(x,y), ..., dim Ext^top(x,y)]."""
    _check_same(x, y)
    res = projective_resolution(x, top + 1)
    n = y.dim
    ranks_star = [0]
    for i in range(1, top + 2):
        ranks_star.append(rank_array(_dual_differential(y, res.gen_images[i]), y.p))
    # rank of d_i^* : Hom(P_{i-1}) -> Hom(P_i)
    out = []
    for i in range(top + 1):
        ker = res.ranks[i] * n - ranks_star[i + 1]
        out.append(ker - ranks_star[i])
    return out


def ext_dim(i: int, x: Module, y: Module) -> int:
    if i < 0:
        raise ValueError("negative degree")
    return ext_dims(x, y, i)[i]


def ext_dim_hom_complex(i: int, x: Module, y: Module, trim: bool = False) -> int:
    """Ext via explicit hom_space complexes of the resolution (slow oracle)."""
    res = projective_resolution(x, i + 1, trim=trim)
    mods = [c.source for c in res.covers]

    def dstar(j):
        # Hom(P_{j-1}, y) -> Hom(P_j, y), composition with d_j
        if j == 0:
            return None
        dj = res.differential(j)
        src_b = hom_basis_array(mods[j - 1], y)
        tgt_b = hom_basis_array(mods[j], y)
        if src_b.shape[1] == 0 or tgt_b.shape[1] == 0:
            return np.zeros((tgt_b.shape[1], src_b.shape[1]), dtype=np.int64)
        imgs = []
        for c in range(src_b.shape[1]):
            phi = src_b[:, c].reshape(y.dim, mods[j - 1].dim)
            imgs.append((phi @ dj.mat.a % y.p).reshape(-1))
        imgs = np.array(imgs, dtype=np.int64).T
        return solve_array(tgt_b, imgs, y.p)

    dim_i = hom_basis_array(mods[i], y).shape[1]
    nxt = dstar(i + 1)
    prv = dstar(i)
    r_next = rank_array(nxt, y.p) if nxt is not None else 0
    r_prev = rank_array(prv, y.p) if prv is not None else 0
    return dim_i - r_next - r_prev


def tor_dims(m, x: Module, top: int) -> list[int]:
    """dim Tor_i^A(m, x) for i = 0..top; m a bimodule with right algebra A."""
    if m.right != x.algebra:
        raise ValueError("bimodule right algebra does not match the module")
    res = projective_resolution(x, top + 1)
    md = m.dim
    p = x.p
    ranks = [0]
    for i in range(1, top + 2):
        gimg = res.gen_images[i]
        g, gp, _ = gimg.shape
        # block (l, j) = R(u_{j l}) acting on m
        blk = np.einsum("jlk,kab->lajb", gimg, m.right_act) % p
        ranks.append(rank_array(blk.reshape(gp * md, g * md), p))
    out = []
    for i in range(top + 1):
        out.append(res.ranks[i] * md - ranks[i] - ranks[i + 1])
    return out


def tor_dim(i: int, m, x: Module) -> int:
    return tor_dims(m, x, i)[i]


# ---------------------------------------------------------------------------
# duality and injectives


def dual_module(x: Module) -> Module:
    return Module(opposite(x.algebra), np.transpose(x.act, (0, 2, 1)), dim=x.dim, check=False)


def dual_map(f: ModuleMap) -> ModuleMap:
    return ModuleMap(dual_module(f.target), dual_module(f.source), f.mat.T, check=False)


# ---------------------------------------------------------------------------
# primitive idempotents, projective covers, injective envelopes

_IDEM_CACHE: dict = {}
_IDEM_SEARCH_LIMIT = 1 << 16


def _idempotent_power(a: Algebra, v: np.ndarray) -> np.ndarray:
    # some power of any element of a finite ring is idempotent
    seen = {}
    cur = v % a.p
    n = 1
    while True:
        k = cur.tobytes()
        if k in seen:
            break
        seen[k] = n
        cur = a.product(cur, v)
        n += 1
    # cur = v^n repeats an earlier power; walk to an idempotent in the cycle
    w = cur
    for _ in range(len(seen) + 1):
        if np.array_equal(a.product(w, w), w):
            return w
        w = a.product(w, cur)
    return w


def _corner_elements(a: Algebra, e: np.ndarray, seed: int = 0):
    """Elements of eAe: exhaustive when small, else a seeded sample."""
    p = a.p
    lm = a.left_regular
    rm = a.right_regular
    proj = np.einsum("k,kab->ab", e, lm) @ np.einsum("k,kab->ab", e, rm) % p
    basis = column_basis(Matrix._wrap(proj, p)).a
    r = basis.shape[1]
    if p ** r <= _IDEM_SEARCH_LIMIT:
        for c in itertools.product(range(p), repeat=r):
            yield basis @ np.array(c, dtype=np.int64) % p
    else:
        for t in range(r):
            yield basis[:, t]
        rng = np.random.default_rng(seed)
        for _ in range(4096):
            yield basis @ rng.integers(0, p, size=r) % p


def primitive_idempotents(a: Algebra) -> list[np.ndarray]:
    """A complete set of primitive orthogonal idempotents summing to 1."""
    if a.key in _IDEM_CACHE:
        return _IDEM_CACHE[a.key]
    if a.dim == 0:
        return []
    todo = [a.unit.copy()]
    done = []
    while todo:
        e = todo.pop()
        split = None
        for v in _corner_elements(a, e):
            f = _idempotent_power(a, v)
            if f.any() and not np.array_equal(f, e):
                split = f
                break
        if split is None:
            done.append(e)
        else:
            todo.extend([split, (e - split) % a.p])
    done.sort(key=lambda v: tuple(-v))
    _IDEM_CACHE[a.key] = done
    return done


def indecomposable_projective(a: Algebra, e: np.ndarray) -> tuple[Module, np.ndarray]:
    """(Ae, basis of Ae as algebra coordinates)."""
    rm = np.einsum("k,kab->ab", e, a.right_regular) % a.p
    basis = column_basis(Matrix._wrap(rm, a.p)).a
    sub, _ = submodule_from_basis(regular_module(a), Matrix._wrap(basis, a.p))
    return sub, basis


def projective_cover(x: Module) -> ModuleMap:
    """Minimal epi from a sum of indecomposable projectives Ae."""
    a, p = x.algebra, x.p
    idems = primitive_idempotents(a)
    cands = []  # (idempotent index, vector in e x)
    for i, e in enumerate(idems):
        ex_ = x.act_by(e)
        _, piv = rref_array(ex_, p)
        for c in piv:
            cands.append((i, ex_[:, c]))
    chosen = list(cands)
    t = 0
    while t < len(chosen):
        trial = chosen[:t] + chosen[t + 1:]
        vec = np.array([v for _, v in trial], dtype=np.int64).T if trial else np.zeros((x.dim, 0), dtype=np.int64)
        if rank_array(submodule_span(x, vec), p) == x.dim:
            chosen = trial
        else:
            t += 1
    parts, cols = [], []
    for i, v in chosen:
        pe, basis = indecomposable_projective(a, idems[i])
        parts.append(pe)
        # basis vector w of Ae (an algebra element) goes to w . v
        cols.append(np.einsum("kb,kij,j->ib", basis, x.act, v) % p)
    if not parts:
        z = zero_module(a)
        return ModuleMap(z, x, Matrix.zeros(x.dim, 0, p), check=False)
    src = direct_sum(*parts).module
    return ModuleMap(src, x, Matrix._wrap(np.concatenate(cols, axis=1), p), check=False)


def injective_envelope(x: Module) -> ModuleMap:
    """Minimal mono into a sum of indecomposable injectives D(eA)."""
    cov = projective_cover(dual_module(x))
    env = Module(x.algebra, np.transpose(cov.source.act, (0, 2, 1)), dim=cov.source.dim, check=False)
    return ModuleMap(x, env, cov.mat.T, check=False)


def injective_coresolution(x: Module, length: int) -> Complex:
    """0 -> x -> I^0 -> ... -> I^length by iterated injective envelopes."""
    objs = [x]
    maps = []
    env = injective_envelope(x)
    objs.append(env.target)
    maps.append(env)
    for _ in range(length):
        c, q = cokernel(maps[-1])
        env = injective_envelope(c)
        objs.append(env.target)
        maps.append(ModuleMap(objs[-2], env.target, env.mat @ q.mat, check=False))
    return Complex(objs, maps, cochain=True)


def projdim(x: Module, window: int) -> Optional[int]:
    """Projective dimension if at most window, else None."""
    res = projective_resolution(x, window)
    cur = x
    for i in range(window + 1):
        if is_projective(cur):
            return i
        cur = res.kernels[i][0]
    return None


def injdim(x: Module, window: int) -> Optional[int]:
    return projdim(dual_module(x), window)


def split_section(epi: ModuleMap) -> Optional[ModuleMap]:
    """A module map s with epi @ s = id, or None."""
    tgt, src = epi.target, epi.source
    if tgt.dim == 0:
        return ModuleMap(tgt, src, Matrix.zeros(src.dim, 0, src.p), check=False)
    hb = hom_basis_array(tgt, src)
    if hb.shape[1] == 0:
        return None
    p = src.p
    # epi.mat @ s over the basis, vectorized
    cols = []
    for c in range(hb.shape[1]):
        s = hb[:, c].reshape(src.dim, tgt.dim)
        cols.append((epi.mat.a @ s % p).reshape(-1))
    a = np.array(cols, dtype=np.int64).T
    sol = solve_array(a, np.eye(tgt.dim, dtype=np.int64).reshape(-1, 1), p)
    if sol is None:
        return None
    s = (hb @ sol[:, 0] % p).reshape(src.dim, tgt.dim)
    return ModuleMap(tgt, src, Matrix._wrap(s, p), check=False)


def is_projective(x: Module) -> bool:
    if x.dim == 0:
        return True
    return split_section(free_cover(x, generating_vectors(x))) is not None


def is_injective(x: Module) -> bool:
    return is_projective(dual_module(x))


# ---------------------------------------------------------------------------
# isomorphism


def find_invertible(basis: np.ndarray, n: int, p: int, seed: int = 0) -> Optional[np.ndarray]:
    """An invertible n x n combination of hom basis columns, or None."""
    h = basis.shape[1]
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if h == 0:
        return None
    total = p ** h
    mats = basis.T.reshape(h, n, n)

    def scan():
        chunk = max(1, min(total, 1 << 14))
        combos = itertools.product(range(p), repeat=h)
        while True:
            block = list(itertools.islice(combos, chunk))
            if not block:
                return None
            c = np.array(block, dtype=np.int64)
            cand = np.einsum("nh,hab->nab", c, mats) % p
            ok = nonzero_det_batch(cand, p)
            if ok.any():
                return cand[int(np.argmax(ok))]

    if total <= ITER_EXHAUSTIVE:
        return scan()
    rng = np.random.default_rng(seed)
    for _ in range(64):
        c = rng.integers(0, p, size=(256, h))
        cand = np.einsum("nh,hab->nab", c, mats) % p
        ok = nonzero_det_batch(cand, p)
        if ok.any():
            return cand[int(np.argmax(ok))]
    return scan()


def signature(x: Module) -> tuple:
    """Cheap isomorphism invariants."""
    p = x.p
    ranks = tuple(rank_array(x.act[k], p) for k in range(x.algebra.dim))
    sq = tuple(rank_array(matmul_mod(x.act[k], x.act[k], p), p) for k in range(x.algebra.dim))
    return (x.dim, ranks, sq)


def find_isomorphism(x: Module, y: Module) -> Optional[ModuleMap]:
    _check_same(x, y)
    if x.dim != y.dim:
        return None
    if x.dim == 0:
        return ModuleMap(x, y, Matrix.zeros(0, 0, x.p), check=False)
    if signature(x) != signature(y):
        return None
    m = find_invertible(hom_basis_array(x, y), x.dim, x.p)
    if m is None:
        return None
    return ModuleMap(x, y, Matrix._wrap(m, x.p), check=False)


def is_isomorphic(x: Module, y: Module) -> bool:
    return find_isomorphism(x, y) is not None


# ---------------------------------------------------------------------------
# enumeration


def count_candidates(a: Algebra, max_dim: int) -> int:
    r = len(a.generation.gens)
    return sum(a.p ** (n * n * r) for n in range(max_dim + 1))


def _word_actions(a: Algebra, gens_act: np.ndarray) -> np.ndarray:
    """From generator matrices (N, r, n, n) build basis actions (N, d, n, n)."""
    gen = a.generation
    p = a.p
    nb, _, n, _ = gens_act.shape
    pos = {g: t for t, g in enumerate(gen.gens)}
    cache: dict = {(): np.broadcast_to(np.eye(n, dtype=np.int64), (nb, n, n))}
    mats = []
    for w in gen.words:
        if w not in cache:
            cache[w] = np.matmul(cache[w[:-1]], gens_act[:, pos[w[-1]]]) % p
        mats.append(cache[w])
    words = np.stack(mats, axis=1)  # (N, d, n, n)
    return np.einsum("wk,Nwab->Nkab", gen.coeff, words) % p


def _valid_batch(a: Algebra, act: np.ndarray) -> np.ndarray:
    p, n = a.p, act.shape[2]
    unit = np.einsum("k,Nkab->Nab", a.unit, act) % p
    ok = (unit == np.eye(n, dtype=np.int64)).all(axis=(1, 2))
    lhs = np.einsum("Niab,Njbc->Nijac", act, act) % p
    rhs = np.einsum("ijk,Nkac->Nijac", a.mul, act) % p
    ok &= (lhs == rhs).all(axis=(1, 2, 3, 4))
    return ok


def _enumerate_dim(a: Algebra, n: int, cap: int) -> list[Module]:
    p = a.p
    gen = a.generation
    r = len(gen.gens)
    if n == 0:
        return [zero_module(a)]
    total = p ** (n * n * r)
    if total > cap:
        raise EnumerationBudgetExceeded(
            f"enumerating {a.dim}-dimensional algebra modules of dim {n}: "
            f"{p}**({n}*{n}*{r}) = {total} candidates exceeds cap {cap}")
    width = n * n * r
    found: list[Module] = []
    chunk = 1 << 15
    combos = itertools.product(range(p), repeat=width)
    while True:
        block = list(itertools.islice(combos, chunk))
        if not block:
            break
        g = np.array(block, dtype=np.int64).reshape(len(block), r, n, n)
        act = _word_actions(a, g)
        ok = _valid_batch(a, act)
        for idx in np.flatnonzero(ok):
            found.append(Module(a, act[idx], check=False))
    return dedupe(found)


def dedupe(mods: Sequence[Module]) -> list[Module]:
    """Keep the first module of each isomorphism class (order preserved)."""
    buckets: dict = {}
    reps: list[Module] = []
    for m in mods:
        sig = signature(m)
        bucket = buckets.setdefault(sig, [])
        if any(find_isomorphism(r, m) is not None for r in bucket):
            continue
        bucket.append(m)
        reps.append(m)
    return reps


def product_module(a: Algebra, parts: Sequence[Module]) -> Module:
    """Module over a product algebra from one module per factor."""
    n = sum(m.dim for m in parts)
    act = np.zeros((a.dim, n, n), dtype=np.int64)
    o_mod = 0
    for off, fac, m in zip(a.factor_offsets(), a.factors, parts):
        act[off:off + fac.dim, o_mod:o_mod + m.dim, o_mod:o_mod + m.dim] = m.act
        o_mod += m.dim
    return Module(a, act, check=False)


def split_product_module(x: Module) -> list[Module]:
    """Components e_i x over the factors of a product algebra."""
    a = x.algebra
    out = []
    p = x.p
    for off, fac in zip(a.factor_offsets(), a.factors):
        e = np.zeros(a.dim, dtype=np.int64)
        e[off:off + fac.dim] = fac.unit
        idem = x.act_by(e)
        _, piv = rref_array(idem, p)
        basis = Matrix._wrap(idem[:, piv].copy(), p)
        linv = left_inverse(basis)
        act = (linv.a @ x.act[off:off + fac.dim] % p @ basis.a) % p
        out.append(Module(fac, act, dim=basis.cols, check=False))
    return out


def enumerate_modules(a: Algebra, max_dim: int, cap: int | None = None,
                      component_max: int | None = None) -> list[Module]:
    """Isomorphism-class representatives of modules of dim <= max_dim.

    Product algebras are enumerated factorwise; component_max then bounds
    each component's dimension.
    """
    cap = default_cap() if cap is None else cap
    if a.factors:
        cmax = max_dim if component_max is None else component_max
        per = [enumerate_modules(f, cmax, cap) for f in a.factors]
        out = []
        for combo in itertools.product(*per):
            if sum(m.dim for m in combo) <= max_dim:
                out.append(product_module(a, combo))
        out.sort(key=lambda m: (m.dim, tuple(c.dim for c in split_product_module(m))))
        return out
    if count_candidates(a, max_dim) > cap:
        r = len(a.generation.gens)
        raise EnumerationBudgetExceeded(
            f"enumeration up to dim {max_dim} needs sum_n {a.p}**(n*n*{r}) = "
            f"{count_candidates(a, max_dim)} candidates, cap {cap}")
    out = []
    for n in range(max_dim + 1):
        out.extend(_enumerate_dim(a, n, cap))
    return out
