"""The extension category B |x_eta F and the coextension category G x|_zeta B.

An object (X, f) stores f : F(X) -> X against the computed tensor basis and
also its lift ftil = f . proj : k^m (x) X -> X.  Morphism, kernel and
gluing conditions are linear in the lifted form, which avoids quotients.
Coextension objects [X, g] similarly keep ghat = basis . g : X -> Hom_k(M, X).
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .functors import (Bimodule, BimoduleMul, adjunction_phi, adjunction_psi,
                       apply_eta, hom_data, hom_on_map, tensor_data, tensor_on_map,
                       zeta_component, f_squared_zero)
from .linalg import (Matrix, kernel_array, left_inverse, nonzero_det_batch,
                     quotient_maps, rank_array, rref_array, solve_array)
from .modules import (EnumerationBudgetExceeded, Module, ModuleMap, cokernel,
                      default_cap, direct_sum, find_invertible, free_map_matrix,
                      free_module, generator_coords, hom_constraint, hom_basis_array,
                      is_injective, is_projective, kernel)


class HypothesisError(ValueError):
    """A precondition of a construction fails; the message names the witness."""


class ExtensionCategory:
    def __init__(self, bimodule: Bimodule, mul: Optional[BimoduleMul] = None, name: str = ""):
        if bimodule.left != bimodule.right:
            raise ValueError("extension category needs an A-A bimodule")
        self.M = bimodule
        self.base = bimodule.left
        self.mul = None if (mul is None or mul.is_zero()) else mul
        self.name = name

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def m(self) -> int:
        return self.M.dim

    @cached_property
    def key(self) -> str:
        h = hashlib.sha256(self.M.key.encode())
        if self.mul is not None:
            h.update(self.mul.tilde.a.tobytes())
        return h.hexdigest()

    @cached_property
    def f2zero(self) -> bool:
        return f_squared_zero(self.M)

    @property
    def eta_zero(self) -> bool:
        return self.mul is None

    @cached_property
    def mu_tilde(self) -> np.ndarray:
        if self.mul is None:
            return np.zeros((self.m, self.m * self.m), dtype=np.int64)
        return self.mul.tilde.a

    def F(self, x: Module):
        return tensor_data(self.M, x)

    def Fmap(self, f: ModuleMap) -> ModuleMap:
        return tensor_on_map(self.M, f)

    def eta(self, x: Module) -> ModuleMap:
        return apply_eta(self.M, self.mul, x)

    def G(self, x: Module):
        return hom_data(self.M, x)

    def Gmap(self, g: ModuleMap) -> ModuleMap:
        return hom_on_map(self.M, g)

    def zeta(self, x: Module) -> ModuleMap:
        return zeta_component(self.M, self.mul, x)

    def __repr__(self) -> str:
        return f"ExtensionCategory({self.name or self.key[:8]})"


# ---------------------------------------------------------------------------
# objects and maps


def _kron_eye_left(m: int, a: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(m, dtype=np.int64), a)


class ExtObject:
    """Object (X, f) of the extension category."""

    def __init__(self, cat: ExtensionCategory, x: Module, f, check: bool = True):
        self.cat = cat
        self.x = x
        td = cat.F(x)
        fm = f if isinstance(f, Matrix) else Matrix(np.array(f, dtype=np.int64).reshape(x.dim, td.module.dim), x.p)
        if fm.shape != (x.dim, td.module.dim):
            raise ValueError(f"structure map shape {fm.shape}, expected {(x.dim, td.module.dim)}")
        self.f = fm
        self.ftil = (fm @ td.proj).a
        if check:
            bad = self.failures()
            if bad:
                raise ValueError(f"not an object of the extension category: {bad[0]}")

    @classmethod
    def from_tilde(cls, cat: ExtensionCategory, x: Module, ftil: np.ndarray, check: bool = False) -> "ExtObject":
        td = cat.F(x)
        f = Matrix._wrap(ftil @ td.section.a % x.p, x.p)
        obj = cls(cat, x, f, check=False)
        if check:
            w = _relations(cat, x)
            if w.size and (ftil @ w % x.p).any():
                raise ValueError("lifted structure map is not balanced")
            bad = obj.failures()
            if bad:
                raise ValueError(f"not an object of the extension category: {bad[0]}")
        return obj

    def failures(self) -> list[str]:
        cat, x, p = self.cat, self.x, self.x.p
        out = []
        fx = cat.F(x).module
        fa = self.f.a
        for g in x.algebra.generation.gens:
            if not np.array_equal(fa @ fx.act[g] % p, x.act[g] @ fa % p):
                out.append(f"f is not linear for {x.algebra.labels[g]}")
                break
        m = cat.m
        lhs = self.ftil @ _kron_eye_left(m, self.ftil) % p
        rhs = self.ftil @ np.kron(cat.mu_tilde, np.eye(x.dim, dtype=np.int64)) % p
        if not np.array_equal(lhs, rhs):
            out.append("f . F(f) != f . eta_X")
        return out

    @property
    def dim(self) -> int:
        return self.x.dim

    @property
    def p(self) -> int:
        return self.x.p

    @cached_property
    def key(self) -> str:
        h = hashlib.sha256(self.cat.key.encode())
        h.update(self.x.key.encode())
        h.update(self.f.a.tobytes())
        return h.hexdigest()

    def __eq__(self, other) -> bool:
        return isinstance(other, ExtObject) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"ExtObject(dim={self.dim}, rank f={rank_array(self.f.a, self.p)})"

    def f_map(self) -> ModuleMap:
        return ModuleMap(self.cat.F(self.x).module, self.x, self.f, check=False)

    def identity(self) -> "ExtMap":
        return ExtMap(self, self, Matrix.identity(self.dim, self.p), check=False)


def _relations(cat: ExtensionCategory, x: Module) -> np.ndarray:
    from .functors import relation_span
    return relation_span(cat.M, x)


class ExtMap:
    def __init__(self, source: ExtObject, target: ExtObject, mat, check: bool = True):
        self.source = source
        self.target = target
        m = mat if isinstance(mat, Matrix) else Matrix(np.array(mat, dtype=np.int64).reshape(target.dim, source.dim), source.p)
        self.mat = m
        if check and not self.is_morphism():
            raise ValueError("matrix is not a morphism of the extension category")

    def is_morphism(self) -> bool:
        if not ModuleMap(self.source.x, self.target.x, self.mat, check=False).is_homomorphism():
            return False
        p = self.source.p
        a = self.mat.a
        lhs = a @ self.source.ftil % p
        rhs = self.target.ftil @ _kron_eye_left(self.source.cat.m, a) % p
        return bool(np.array_equal(lhs, rhs))

    def module_map(self) -> ModuleMap:
        return ModuleMap(self.source.x, self.target.x, self.mat, check=False)

    def __matmul__(self, other: "ExtMap") -> "ExtMap":
        return ExtMap(other.source, self.target, self.mat @ other.mat, check=False)

    def rank(self) -> int:
        return rank_array(self.mat.a, self.source.p)

    def is_mono(self) -> bool:
        return self.rank() == self.source.dim

    def is_epi(self) -> bool:
        return self.rank() == self.target.dim


def zero_object(cat: ExtensionCategory) -> ExtObject:
    z = Module(cat.base, [], dim=0, check=False)
    return ExtObject(cat, z, Matrix.zeros(0, 0, cat.p), check=False)


# ---------------------------------------------------------------------------
# functors U, Z, T, C


def functor_U(e: ExtObject) -> Module:
    return e.x


def functor_Z(cat: ExtensionCategory, x: Module) -> ExtObject:
    q = cat.F(x).module.dim
    return ExtObject(cat, x, Matrix.zeros(x.dim, q, x.p), check=False)


def functor_T(cat: ExtensionCategory, x: Module) -> ExtObject:
    """(X + F X, t_X) with t_X = [[0, 0], [1, eta_X]]."""
    p, m, n = x.p, cat.m, x.dim
    fx = cat.F(x)
    q = fx.module.dim
    s = direct_sum(x, fx.module).module
    nn = n + q
    til = np.zeros((nn, m, nn), dtype=np.int64)
    til[n:, :, :n] = fx.proj.a.reshape(q, m, n)
    if not cat.eta_zero and q:
        ffx = cat.F(fx.module)
        part = cat.eta(x).mat.a @ ffx.proj.a % p          # q x (m*q)
        til[n:, :, n:] = part.reshape(q, m, q)
    return ExtObject.from_tilde(cat, s, til.reshape(nn, m * nn))


def functor_T_map(cat: ExtensionCategory, f: ModuleMap) -> ExtMap:
    src, tgt = functor_T(cat, f.source), functor_T(cat, f.target)
    ff = cat.Fmap(f)
    n1, n2 = f.source.dim, f.target.dim
    mat = np.zeros((tgt.dim, src.dim), dtype=np.int64)
    mat[:n2, :n1] = f.mat.a
    mat[n2:, n1:] = ff.mat.a
    return ExtMap(src, tgt, Matrix._wrap(mat, f.source.p), check=False)


def functor_C(e: ExtObject) -> Module:
    return cokernel(e.f_map())[0]


def functor_C_map(a: ExtMap) -> ModuleMap:
    c1, q1 = cokernel(a.source.f_map())
    c2, q2 = cokernel(a.target.f_map())
    sec = solve_array(q1.mat.a, np.eye(c1.dim, dtype=np.int64), a.source.p)
    mat = q2.mat.a @ a.mat.a @ sec % a.source.p
    return ModuleMap(c1, c2, Matrix._wrap(mat, a.source.p), check=False)


def counit(e: ExtObject) -> ExtMap:
    """(1, f) : T(U e) -> e."""
    t = functor_T(e.cat, e.x)
    return ExtMap(t, e, Matrix._wrap(np.concatenate([np.eye(e.dim, dtype=np.int64), e.f.a], axis=1), e.p),
                  check=False)


_FREE_T: dict = {}


def _free_T(cat: ExtensionCategory, g: int):
    k = (cat.key, g)
    hit = _FREE_T.get(k)
    if hit is None:
        fr = free_module(cat.base, g)
        hit = _FREE_T[k] = (functor_T(cat, fr), cat.F(fr))
    return hit


def cover_map(e: ExtObject, vectors: np.ndarray) -> ExtMap:
    """T(A^g) -> e induced by A^g -> X sending generators to the given vectors."""
    cat, x, p = e.cat, e.x, e.p
    g = vectors.shape[1]
    pmat = free_map_matrix(x, vectors)
    t, fp = _free_T(cat, g)
    # f F(p) = ftil (I (x) p) section
    second = e.ftil @ _kron_eye_left(cat.m, pmat) % p @ fp.section.a % p
    return ExtMap(t, e, Matrix._wrap(np.concatenate([pmat, second], axis=1), p), check=False)


# ---------------------------------------------------------------------------
# kernels, cokernels, sums


def subobject(e: ExtObject, basis: np.ndarray) -> tuple[ExtObject, ExtMap]:
    """Sub-object on the span of independent invariant columns."""
    p = e.p
    b = Matrix._wrap(basis, p)
    linv = left_inverse(b).a
    k = basis.shape[1]
    act = (linv @ e.x.act % p @ basis) % p
    sub = Module(e.x.algebra, act, dim=k, check=False)
    til = linv @ e.ftil % p @ _kron_eye_left(e.cat.m, basis) % p
    obj = ExtObject.from_tilde(e.cat, sub, til)
    return obj, ExtMap(obj, e, b, check=False)


def quotient_object(e: ExtObject, sub: np.ndarray) -> tuple[ExtObject, ExtMap]:
    p = e.p
    proj, sec = quotient_maps(Matrix._wrap(sub, p))
    act = (proj.a @ e.x.act % p @ sec.a) % p
    q = Module(e.x.algebra, act, dim=proj.rows, check=False)
    til = proj.a @ e.ftil % p @ _kron_eye_left(e.cat.m, sec.a) % p
    obj = ExtObject.from_tilde(e.cat, q, til)
    return obj, ExtMap(e, obj, proj, check=False)


def kernel_ext(a: ExtMap) -> tuple[ExtObject, ExtMap]:
    return subobject(a.source, kernel_array(a.mat.a, a.source.p))


def cokernel_ext(a: ExtMap) -> tuple[ExtObject, ExtMap]:
    return quotient_object(a.target, a.mat.a)


def image_ext(a: ExtMap) -> tuple[ExtObject, ExtMap]:
    _, piv = rref_array(a.mat.a, a.source.p)
    return subobject(a.target, a.mat.a[:, piv].copy())


def direct_sum_ext(*objs: ExtObject, cat: ExtensionCategory | None = None) -> tuple[ExtObject, list, list]:
    if not objs:
        return zero_object(cat), [], []
    cat = objs[0].cat
    m, p = cat.m, cat.p
    ds = direct_sum(*[o.x for o in objs])
    nn = ds.module.dim
    til = np.zeros((nn, m, nn), dtype=np.int64)
    o = 0
    for ob in objs:
        n = ob.dim
        til[o:o + n, :, o:o + n] = ob.ftil.reshape(n, m, n)
        o += n
    s = ExtObject.from_tilde(cat, ds.module, til.reshape(nn, m * nn))
    inj = [ExtMap(ob, s, i.mat, check=False) for ob, i in zip(objs, ds.injections)]
    prj = [ExtMap(s, ob, q.mat, check=False) for ob, q in zip(objs, ds.projections)]
    return s, inj, prj


# ---------------------------------------------------------------------------
# hom spaces and isomorphism


def hom_ext_constraint(e1: ExtObject, e2: ExtObject) -> np.ndarray:
    p, m = e1.p, e1.cat.m
    n1, n2 = e1.dim, e2.dim
    rows = [hom_constraint(e1.x, e2.x)]
    # alpha ftil1 - ftil2 (I (x) alpha) = 0
    e1part = np.einsum("ab,xsv->asvbx", np.eye(n2, dtype=np.int64), e1.ftil.reshape(n1, m, n1))
    e1part = e1part.reshape(n2 * m * n1, n2 * n1)
    f2 = e2.ftil.reshape(n2, m, n2)
    e2part = np.einsum("asy,vx->asvyx", f2, np.eye(n1, dtype=np.int64)).reshape(n2 * m * n1, n2 * n1)
    rows.append((e1part - e2part) % p)
    return np.concatenate(rows, axis=0) % p


def hom_ext_basis(e1: ExtObject, e2: ExtObject) -> np.ndarray:
    if e1.dim == 0 or e2.dim == 0:
        return np.zeros((e1.dim * e2.dim, 0), dtype=np.int64)
    return kernel_array(hom_ext_constraint(e1, e2), e1.p)


def hom_ext(e1: ExtObject, e2: ExtObject) -> list[ExtMap]:
    k = hom_ext_basis(e1, e2)
    return [ExtMap(e1, e2, Matrix._wrap(k[:, j].reshape(e2.dim, e1.dim).copy(), e1.p), check=False)
            for j in range(k.shape[1])]


def ext_signature(e: ExtObject) -> tuple:
    from .modules import signature
    p = e.p
    return (signature(e.x), rank_array(e.f.a, p))


def find_isomorphism_ext(e1: ExtObject, e2: ExtObject) -> Optional[ExtMap]:
    if e1.dim != e2.dim:
        return None
    if e1.dim == 0:
        return ExtMap(e1, e2, Matrix.zeros(0, 0, e1.p), check=False)
    if ext_signature(e1) != ext_signature(e2):
        return None
    m = find_invertible(hom_ext_basis(e1, e2), e1.dim, e1.p)
    if m is None:
        return None
    return ExtMap(e1, e2, Matrix._wrap(m, e1.p), check=False)


def is_isomorphic_ext(e1: ExtObject, e2: ExtObject) -> bool:
    return find_isomorphism_ext(e1, e2) is not None


# ---------------------------------------------------------------------------
# projectivity, Com, canonical sequences


@dataclass
class Witness:
    ok: bool
    reason: str
    data: object = None

    def __bool__(self) -> bool:
        return self.ok


def is_projective_ext(e: ExtObject) -> Witness:
    c = functor_C(e)
    if not is_projective(c):
        return Witness(False, "Coker(f) is not projective", c)
    iso = find_isomorphism_ext(functor_T(e.cat, c), e)
    if iso is None:
        return Witness(False, "T(Coker f) is not isomorphic to (X, f)", c)
    return Witness(True, "Coker(f) projective and T(Coker f) isomorphic to (X, f)", iso)


@dataclass
class ComSequence:
    first: ModuleMap    # F(f) - eta_X : F^2 X -> F X
    second: ModuleMap   # f : F X -> X
    is_exact: bool
    homology: int


def com_sequence(e: ExtObject) -> ComSequence:
    cat = e.cat
    fm = e.f_map()
    d1 = cat.Fmap(fm) - cat.eta(e.x)
    p = e.p
    r1 = rank_array(d1.mat.a, p)
    r2 = rank_array(fm.mat.a, p)
    comp_zero = not (fm.mat.a @ d1.mat.a % p).any() if d1.source.dim else True
    homology = fm.source.dim - r2 - r1
    return ComSequence(d1, fm, comp_zero and homology == 0, homology)


@dataclass
class ShortExact:
    """0 -> a -> b -> c -> 0 with maps i : a -> b and q : b -> c."""
    a: object
    b: object
    c: object
    i: object
    q: object

    def is_exact(self) -> bool:
        p = self.b.p if hasattr(self.b, "p") else self.b.x.p
        im, qm = self.i.mat.a, self.q.mat.a
        na, nb = im.shape[1], im.shape[0]
        ri = rank_array(im, p)
        rq = rank_array(qm, p)
        zero = not (qm @ im % p).any() if na and nb else True
        return ri == na and rq == qm.shape[0] and zero and na + qm.shape[0] == nb


def canonical_sequence(e: ExtObject) -> ShortExact:
    """0 -> (Im f, g) -> (X, f) -> (Coker f, 0) -> 0."""
    fm = e.f.a
    p = e.p
    _, piv = rref_array(fm, p)
    im_obj, incl = subobject(e, fm[:, piv].copy())
    co_obj, proj = quotient_object(e, fm)
    if co_obj.ftil.any():
        raise AssertionError("structure map on Coker(f) is not zero")
    if e.cat.eta_zero and im_obj.ftil.any():
        raise AssertionError("eta = 0 but the induced structure on Im(f) is nonzero")
    seq = ShortExact(im_obj, e, co_obj, incl, proj)
    if not seq.is_exact():
        raise AssertionError("canonical sequence is not exact")
    return seq


def com_factorization(e: ExtObject):
    """gamma : Coker(F(f) - eta) -> X with f = gamma . pi, and Coker(gamma)."""
    com = com_sequence(e)
    c, pi = cokernel(com.first)
    p = e.p
    sec = solve_array(pi.mat.a, np.eye(c.dim, dtype=np.int64), p)
    gamma = ModuleMap(c, e.x, Matrix._wrap(e.f.a @ sec % p, p), check=False)
    return gamma, pi, cokernel(gamma)[0]


def short_proj_resolution(e: ExtObject) -> ShortExact:
    """0 -> (F P, 0) -> T(P) -> (P, f) -> 0 for projective P, F^2 = 0."""
    cat = e.cat
    if not cat.f2zero:
        raise HypothesisError("short_proj_resolution needs F^2 = 0 (M (x) M != 0)")
    if not is_projective(e.x):
        raise HypothesisError("underlying module is not projective")
    fx = cat.F(e.x).module
    if not is_projective(fx):
        raise HypothesisError("F does not preserve projectives at this P")
    p = e.p
    t = functor_T(cat, e.x)
    left = functor_Z(cat, fx)
    n, q = e.dim, fx.dim
    i = np.concatenate([(-e.f.a) % p, np.eye(q, dtype=np.int64)], axis=0)
    qm = np.concatenate([np.eye(n, dtype=np.int64), e.f.a], axis=1)
    seq = ShortExact(left, t, e, ExtMap(left, t, Matrix._wrap(i, p), check=False),
                     ExtMap(t, e, Matrix._wrap(qm, p), check=False))
    if not (seq.i.is_morphism() and seq.q.is_morphism() and seq.is_exact()):
        raise AssertionError("length-one resolution failed verification")
    return seq


# ---------------------------------------------------------------------------
# Ext in the extension category


@dataclass
class ExtResolution:
    e: ExtObject
    ranks: list
    covers: list
    kernels: list
    gen_images: list   # arrays (g_i, dim T(A^{g_{i-1}})) of generator images


def ext_generators(e: ExtObject) -> np.ndarray:
    """Irredundant standard vectors whose T-cover is onto."""
    n, p = e.dim, e.p
    eye = np.eye(n, dtype=np.int64)
    chosen: list[int] = []
    r = 0

    # the image of a cover is the sum of the images of the one-generator covers
    single = [cover_map(e, eye[:, [t]]).mat.a for t in range(n)]

    def span_rank(idx):
        if not idx:
            return 0
        return rank_array(np.concatenate([single[t] for t in idx], axis=1), p)

    for t in range(n):
        if r == n:
            break
        rr = span_rank(chosen + [t])
        if rr > r:
            chosen.append(t)
            r = rr
    for t in list(reversed(chosen)):
        trial = [c for c in chosen if c != t]
        if span_rank(trial) == n:
            chosen = trial
    return eye[:, chosen]


_EXT_RES: dict = {}


def ext_resolution(e: ExtObject, length: int) -> ExtResolution:
    key = e.key
    res = _EXT_RES.get(key)
    if res is not None and len(res.ranks) > length:
        return res
    ranks, covers, kernels, gimgs = [], [], [], []
    cur = e
    prev_incl = None
    p = e.p
    for i in range(length + 1):
        gens = ext_generators(cur)
        cov = cover_map(cur, gens)
        ranks.append(gens.shape[1])
        covers.append(cov)
        if i >= 1:
            gimgs.append((prev_incl.mat.a @ gens % p).T.copy())
        else:
            gimgs.append(None)
        k, inc = kernel_ext(cov)
        kernels.append((k, inc))
        cur, prev_incl = k, inc
    res = ExtResolution(e, ranks, covers, kernels, gimgs)
    _EXT_RES[key] = res
    return res


def _ext_dual_differential(cat: ExtensionCategory, y: ExtObject, gprev: int, gimg: np.ndarray) -> np.ndarray:
    """Hom(d, (Y, f_Y)) : Y^{gprev} -> Y^{g} using Hom(T(A^g), e) = Y^g."""
    a = cat.base
    d, p, m = a.dim, cat.p, cat.m
    fr = free_module(a, gprev)
    fp = cat.F(fr)
    g = gimg.shape[0]
    apart = gimg[:, :gprev * d].reshape(g, gprev, d)
    wpart = gimg[:, gprev * d:]
    wt = (fp.section.a @ wpart.T % p).T.reshape(g, m, gprev, d) if fp.module.dim else np.zeros((g, m, gprev, d), dtype=np.int64)
    n = y.dim
    ract = y.x.act
    blk = np.einsum("jlk,kab->jalb", apart, ract) % p
    inner = np.einsum("jslk,kab->jsalb", wt, ract) % p
    ft = y.ftil.reshape(n, m, n)
    blk = (blk + np.einsum("csa,jsalb->jclb", ft, inner)) % p
    return blk.reshape(g * n, gprev * n)


def ext_dims_ext(e1: ExtObject, e2: ExtObject, top: int) -> list[int]:
    cat = e1.cat
    res = ext_resolution(e1, top + 1)
    n = e2.dim
    rs = [0]
    for i in range(1, top + 2):
        rs.append(rank_array(_ext_dual_differential(cat, e2, res.ranks[i - 1], res.gen_images[i]), cat.p))
    out = []
    for i in range(top + 1):
        out.append(res.ranks[i] * n - rs[i + 1] - rs[i])
    return out


def ext_dim_ext(i: int, e1: ExtObject, e2: ExtObject) -> int:
    return ext_dims_ext(e1, e2, i)[i]


def ext_dim_ext_hom_complex(i: int, e1: ExtObject, e2: ExtObject) -> int:
    """Ext via explicit ExtMap hom spaces of the resolution (slow oracle)."""
    res = ext_resolution(e1, i + 1)
    p = e1.p
    srcs = [c.source for c in res.covers]

    def diff(j):
        return res.kernels[j - 1][1].mat.a @ res.covers[j].mat.a % p

    def dstar(j):
        if j == 0:
            return None
        a = hom_ext_basis(srcs[j - 1], e2)
        b = hom_ext_basis(srcs[j], e2)
        if a.shape[1] == 0 or b.shape[1] == 0:
            return np.zeros((b.shape[1], a.shape[1]), dtype=np.int64)
        dj = diff(j)
        imgs = np.array([(a[:, c].reshape(e2.dim, srcs[j - 1].dim) @ dj % p).reshape(-1)
                         for c in range(a.shape[1])], dtype=np.int64).T
        return solve_array(b, imgs, p)

    dim_i = hom_ext_basis(srcs[i], e2).shape[1]
    nx, pv = dstar(i + 1), dstar(i)
    return dim_i - (rank_array(nx, p) if nx is not None else 0) - (rank_array(pv, p) if pv is not None else 0)


def left_derived_T_dims(cat: ExtensionCategory, x: Module, top: int) -> list[int]:
    """dim U L_i T(X): homology of T applied to a free resolution of X."""
    from .modules import projective_resolution
    res = projective_resolution(x, top + 1)
    p = cat.p
    ranks = [0]
    dims = []
    for i in range(top + 2):
        dims.append(functor_T(cat, res.covers[i].source).dim)
    for i in range(1, top + 2):
        ranks.append(rank_array(functor_T_map(cat, res.differential(i)).mat.a, p))
    return [dims[i] - ranks[i] - ranks[i + 1] for i in range(top + 1)]


# ---------------------------------------------------------------------------
# coextension category


class CoextObject:
    """Object [X, g] with g : X -> G(X) and G(g) g = zeta_X g."""

    def __init__(self, cat: ExtensionCategory, x: Module, g, check: bool = True):
        self.cat = cat
        self.x = x
        hd = cat.G(x)
        gm = g if isinstance(g, Matrix) else Matrix(np.array(g, dtype=np.int64).reshape(hd.module.dim, x.dim), x.p)
        if gm.shape != (hd.module.dim, x.dim):
            raise ValueError(f"costructure shape {gm.shape}, expected {(hd.module.dim, x.dim)}")
        self.g = gm
        self.ghat = (hd.basis @ gm).a
        if check:
            bad = self.failures()
            if bad:
                raise ValueError(f"not an object of the coextension category: {bad[0]}")

    @classmethod
    def from_hat(cls, cat: ExtensionCategory, x: Module, ghat: np.ndarray) -> "CoextObject":
        hd = cat.G(x)
        g = Matrix._wrap(hd.coords.a @ ghat % x.p, x.p)
        return cls(cat, x, g, check=False)

    def g_map(self) -> ModuleMap:
        return ModuleMap(self.x, self.cat.G(self.x).module, self.g, check=False)

    def failures(self) -> list[str]:
        out = []
        gm = self.g_map()
        if not gm.is_homomorphism():
            out.append("g is not a module map")
            return out
        lhs = self.cat.Gmap(gm) @ gm
        rhs = self.cat.zeta(self.x) @ gm
        if lhs.mat != rhs.mat:
            out.append("G(g) . g != zeta_X . g")
        return out

    @property
    def dim(self) -> int:
        return self.x.dim

    @property
    def p(self) -> int:
        return self.x.p

    @cached_property
    def key(self) -> str:
        h = hashlib.sha256(b"coext" + self.cat.key.encode())
        h.update(self.x.key.encode())
        h.update(self.g.a.tobytes())
        return h.hexdigest()

    def __eq__(self, other) -> bool:
        return isinstance(other, CoextObject) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"CoextObject(dim={self.dim})"


class CoextMap:
    def __init__(self, source: CoextObject, target: CoextObject, mat, check: bool = True):
        self.source, self.target = source, target
        self.mat = mat if isinstance(mat, Matrix) else Matrix(mat, source.p)
        if check and not self.is_morphism():
            raise ValueError("matrix is not a morphism of the coextension category")

    def is_morphism(self) -> bool:
        if not ModuleMap(self.source.x, self.target.x, self.mat, check=False).is_homomorphism():
            return False
        p, m = self.source.p, self.source.cat.m
        a = self.mat.a
        lhs = np.kron(a, np.eye(m, dtype=np.int64)) @ self.source.ghat % p
        rhs = self.target.ghat @ a % p
        return bool(np.array_equal(lhs, rhs))


def hom_coext_basis(c1: CoextObject, c2: CoextObject) -> np.ndarray:
    p, m = c1.p, c1.cat.m
    n1, n2 = c1.dim, c2.dim
    if n1 == 0 or n2 == 0:
        return np.zeros((n1 * n2, 0), dtype=np.int64)
    g1 = c1.ghat.reshape(n1, m, n1)
    g2 = c2.ghat.reshape(n2, m, n2)
    e1 = np.einsum("ya,bsx->ysxab", np.eye(n2, dtype=np.int64), g1).reshape(n2 * m * n1, n2 * n1)
    e2 = np.einsum("ysa,bx->ysxab", g2, np.eye(n1, dtype=np.int64)).reshape(n2 * m * n1, n2 * n1)
    rows = np.concatenate([hom_constraint(c1.x, c2.x), (e1 - e2) % p], axis=0) % p
    return kernel_array(rows, p)


def find_isomorphism_coext(c1: CoextObject, c2: CoextObject) -> Optional[CoextMap]:
    if c1.dim != c2.dim:
        return None
    if c1.dim == 0:
        return CoextMap(c1, c2, Matrix.zeros(0, 0, c1.p), check=False)
    m = find_invertible(hom_coext_basis(c1, c2), c1.dim, c1.p)
    if m is None:
        return None
    return CoextMap(c1, c2, Matrix._wrap(m, c1.p), check=False)


def functor_H(cat: ExtensionCategory, x: Module) -> CoextObject:
    """[G X + X, s_X] with s_X = [[zeta_X, 0], [1, 0]]."""
    p, m = x.p, cat.m
    gx = cat.G(x)
    h, n = gx.module.dim, x.dim
    s = direct_sum(gx.module, x).module
    nn = h + n
    hat = np.zeros((nn, m, nn), dtype=np.int64)
    if h:
        ggx = cat.G(gx.module)
        z = ggx.basis.a @ cat.zeta(x).mat.a % p           # (h*m) x h
        hat[:h, :, :h] = z.reshape(h, m, h)
        hat[h:, :, :h] = gx.basis.a.reshape(n, m, h)
    return CoextObject.from_hat(cat, s, hat.reshape(nn * m, nn))


def functor_K(c: CoextObject) -> Module:
    return kernel(c.g_map())[0]


def coext_zero(cat: ExtensionCategory, x: Module) -> CoextObject:
    return CoextObject(cat, x, Matrix.zeros(cat.G(x).module.dim, x.dim, x.p), check=False)


def is_injective_coext(c: CoextObject) -> Witness:
    k = functor_K(c)
    if not is_injective(k):
        return Witness(False, "Ker(g) is not injective", k)
    iso = find_isomorphism_coext(functor_H(c.cat, k), c)
    if iso is None:
        return Witness(False, "H(Ker g) is not isomorphic to [X, g]", k)
    return Witness(True, "Ker(g) injective and H(Ker g) isomorphic to [X, g]", iso)


def phi_isomorphism(e: ExtObject) -> CoextObject:
    g = adjunction_phi(e.cat.M, e.f_map(), x=e.x)
    return CoextObject(e.cat, e.x, g.mat, check=False)


def phi_inverse(c: CoextObject) -> ExtObject:
    f = adjunction_psi(c.cat.M, c.g_map(), c.x)
    return ExtObject(c.cat, c.x, f.mat, check=False)


def ext_dims_coext(c1: CoextObject, c2: CoextObject, top: int) -> list[int]:
    """Ext in the coextension category, transported through the inverse of Phi."""
    return ext_dims_ext(phi_inverse(c1), phi_inverse(c2), top)


def short_inj_coresolution(c: CoextObject) -> ShortExact:
    """0 -> [I, g] -> H(I) -> [G I, 0] -> 0 for injective I, G^2 = 0."""
    cat = c.cat
    if not cat.f2zero:
        raise HypothesisError("short_inj_coresolution needs G^2 = 0 (M (x) M != 0)")
    if not is_injective(c.x):
        raise HypothesisError("underlying module is not injective")
    gi = cat.G(c.x).module
    if not is_injective(gi):
        raise HypothesisError("G does not preserve injectives at this I")
    p = c.p
    h = functor_H(cat, c.x)
    right = coext_zero(cat, gi)
    n, k = c.dim, gi.dim
    i = np.concatenate([c.g.a, np.eye(n, dtype=np.int64)], axis=0)
    q = np.concatenate([np.eye(k, dtype=np.int64), (-c.g.a) % p], axis=1)
    seq = ShortExact(c, h, right, CoextMap(c, h, Matrix._wrap(i, p), check=False),
                     CoextMap(h, right, Matrix._wrap(q, p), check=False))
    if not (seq.i.is_morphism() and seq.q.is_morphism() and seq.is_exact()):
        raise AssertionError("length-one coresolution failed verification")
    return seq


# ---------------------------------------------------------------------------
# enumeration


def structure_candidates(cat: ExtensionCategory, x: Module, cap: int) -> list[ExtObject]:
    """All f in Hom(F X, X) satisfying the object axiom (not deduplicated)."""
    fx = cat.F(x).module
    hb = hom_basis_array(fx, x)
    h = hb.shape[1]
    p = x.p
    if h == 0:
        return [functor_Z(cat, x)]
    total = p ** h
    if total > cap:
        raise EnumerationBudgetExceeded(
            f"structure maps on a dim {x.dim} module: {p}**{h} = {total} candidates exceeds cap {cap}")
    need_check = not (cat.F(fx).module.dim == 0)
    out = []
    for combo in itertools.product(range(p), repeat=h):
        f = hb @ np.array(combo, dtype=np.int64) % p
        obj = ExtObject(cat, x, Matrix._wrap(f.reshape(x.dim, fx.dim), p), check=False)
        if need_check and obj.failures():
            continue
        out.append(obj)
    return out


def dedupe_ext(objs: Sequence[ExtObject]) -> list[ExtObject]:
    buckets: dict = {}
    reps = []
    for o in objs:
        sig = ext_signature(o)
        b = buckets.setdefault(sig, [])
        if any(find_isomorphism_ext(r, o) is not None for r in b):
            continue
        b.append(o)
        reps.append(o)
    return reps


def enumerate_ext_objects(cat: ExtensionCategory, base: Sequence[Module], cap: int | None = None) -> list[ExtObject]:
    """Iso classes of extension objects whose underlying module is in base.

    Base must already be a list of pairwise non-isomorphic modules.
    """
    cap = default_cap() if cap is None else cap
    out = []
    for x in base:
        out.extend(dedupe_ext(structure_candidates(cat, x, cap)))
    return out
