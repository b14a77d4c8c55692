"""Trivial extension rings, Morita context rings with zero maps, comma categories.

Each ring builder remembers the extension category it came from, so that
Lambda-modules can be moved across to pairs (X, f) and back.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import Algebra, direct_product
from .extension import ExtObject, ExtensionCategory, dedupe_ext
from .families import Family
from .functors import Bimodule, BimoduleMul, bimodule_sum, embed_bimodule, tensor_data
from .linalg import Matrix, left_inverse, rank_array, rref_array
from .modules import (EnumerationBudgetExceeded, Module, default_cap, hom_basis_array,
                      product_module, split_product_module)


class RingShapeError(ValueError):
    """The algebra was not produced by one of the ring builders here."""


@dataclass(frozen=True)
class TrivialExtensionOrigin:
    base: Algebra
    bimodule: Bimodule
    mul: Optional[BimoduleMul]
    category: ExtensionCategory


def trivial_extension_ring(r: Algebra, m: Bimodule, mu: Optional[BimoduleMul] = None) -> Algebra:
    """R x M with (r1, m1)(r2, m2) = (r1 r2, r1 m2 + m1 r2 + mu(m1, m2))."""
    if m.left != r or m.right != r:
        raise ValueError("bimodule must be over (r, r)")
    if mu is not None:
        bad = mu.failures()
        if bad:
            raise ValueError(f"invalid multiplication: {bad[0]}")
    d, n = r.dim, m.dim
    tot = d + n
    c = np.zeros((tot, tot, tot), dtype=np.int64)
    c[:d, :d, :d] = r.mul
    for i in range(d):
        # b_i * m_s = L_i e_s ; m_s * b_i = R_i e_s
        c[i, d:, d:] = m.left_act[i].T
        c[d:, i, d:] = m.right_act[i].T
    if mu is not None:
        c[d:, d:, d:] = mu.tilde.a.reshape(n, n, n).transpose(1, 2, 0)
    unit = np.concatenate([r.unit, np.zeros(n, dtype=np.int64)])
    labels = list(r.labels) + [f"m{s + 1}" for s in range(n)]
    cat = ExtensionCategory(m, mu)
    origin = TrivialExtensionOrigin(r, m, mu, cat)
    return Algebra(r.p, c, unit, labels, origin=origin)


@dataclass(frozen=True)
class MoritaContextSpec:
    """Lambda = [[A, N], [M, B]] with M a B-A and N an A-B bimodule."""
    a: Algebra
    b: Algebra
    m: Bimodule
    n: Bimodule
    zero_maps: bool = True


def morita_bimodule(spec: MoritaContextSpec) -> tuple[Algebra, Bimodule]:
    """(A x B, M + N) with F(X, Y) = (N (x) Y, M (x) X)."""
    if not spec.zero_maps:
        raise ValueError("only Morita contexts with zero bimodule maps are supported")
    a, b = spec.a, spec.b
    if spec.m.left != b or spec.m.right != a:
        raise ValueError("M must be a B-A bimodule")
    if spec.n.left != a or spec.n.right != b:
        raise ValueError("N must be an A-B bimodule")
    prod = direct_product(a, b)
    if prod is a or prod is b:
        # a zero-dimensional factor collapses the product; keep the shape explicit
        prod = Algebra(a.p, _block_mul(a, b), np.concatenate([a.unit, b.unit]),
                       [f"{x}.1" for x in a.labels] + [f"{x}.2" for x in b.labels], factors=(a, b))
    m_e = embed_bimodule(spec.m, prod, 1, prod, 0)
    n_e = embed_bimodule(spec.n, prod, 0, prod, 1)
    return prod, bimodule_sum(m_e, n_e)


def _block_mul(a: Algebra, b: Algebra) -> np.ndarray:
    d = a.dim + b.dim
    c = np.zeros((d, d, d), dtype=np.int64)
    c[:a.dim, :a.dim, :a.dim] = a.mul
    c[a.dim:, a.dim:, a.dim:] = b.mul
    return c


def morita_context_ring(spec: MoritaContextSpec) -> Algebra:
    prod, mn = morita_bimodule(spec)
    lam = trivial_extension_ring(prod, mn)
    return lam


def _origin(lam: Algebra) -> TrivialExtensionOrigin:
    org = lam.origin
    if not isinstance(org, TrivialExtensionOrigin):
        raise RingShapeError("algebra was not built by trivial_extension_ring or morita_context_ring")
    return org


def lambda_category(lam: Algebra) -> ExtensionCategory:
    return _origin(lam).category


def lambda_to_pair(x: Module) -> ExtObject:
    """Restrict to the base ring and read f from the action of M."""
    org = _origin(x.algebra)
    cat = org.category
    d, n = org.base.dim, org.bimodule.dim
    p = x.p
    base_mod = Module(org.base, x.act[:d], dim=x.dim, check=False)
    til = np.transpose(x.act[d:d + n], (1, 0, 2)).reshape(x.dim, n * x.dim) if n else \
        np.zeros((x.dim, 0), dtype=np.int64)
    return ExtObject.from_tilde(cat, base_mod, til % p)


def pair_to_lambda(e: ExtObject, lam: Algebra) -> Module:
    org = _origin(lam)
    if org.category.key != e.cat.key:
        raise RingShapeError("extension object lives over a different category")
    d, n = org.base.dim, org.bimodule.dim
    nx = e.dim
    act = np.zeros((d + n, nx, nx), dtype=np.int64)
    act[:d] = e.x.act
    if n:
        act[d:] = np.transpose(e.ftil.reshape(nx, n, nx), (1, 0, 2))
    return Module(lam, act, dim=nx, check=False)


# ---------------------------------------------------------------------------
# comma categories


@dataclass(frozen=True)
class CommaSpec:
    """G = N (x)_C - : C-Mod -> D-Mod, with N a D-C bimodule."""
    c: Algebra
    d: Algebra
    g: Bimodule


@dataclass
class CommaObject:
    x: Module
    y: Module
    f: Matrix  # G X -> Y

    @property
    def dim(self) -> int:
        return self.x.dim + self.y.dim


@dataclass
class CommaBridge:
    spec: CommaSpec
    product: Algebra
    bimodule: Bimodule
    category: ExtensionCategory

    def G(self, x: Module):
        return tensor_data(self.spec.g, x)

    def to_ext(self, c: CommaObject) -> ExtObject:
        """((X, Y), (0, f))."""
        p = self.product.p
        u = product_module(self.product, [c.x, c.y])
        nx, ny = c.x.dim, c.y.dim
        m = self.bimodule.dim
        nn = nx + ny
        til = np.zeros((nn, m, nn), dtype=np.int64)
        if nx and ny and m:
            fg = c.f.a @ self.G(c.x).proj.a % p
            til[nx:, :, :nx] = fg.reshape(ny, m, nx)
        return ExtObject.from_tilde(self.category, u, til.reshape(nn, m * nn))

    def from_ext(self, e: ExtObject) -> CommaObject:
        p = e.p
        a = self.product
        bases = []
        for off, fac in zip(a.factor_offsets(), a.factors):
            idem = np.zeros(a.dim, dtype=np.int64)
            idem[off:off + fac.dim] = fac.unit
            im = e.x.act_by(idem)
            _, piv = rref_array(im, p)
            bases.append(im[:, piv])
        s = np.concatenate(bases, axis=1)
        sinv = left_inverse(Matrix._wrap(s, p)).a
        xs, ys = split_product_module(e.x)
        nx, ny, m = xs.dim, ys.dim, self.bimodule.dim
        # ftil in the adapted basis
        til = sinv @ e.ftil % p @ np.kron(np.eye(m, dtype=np.int64), s) % p
        til = til.reshape(nx + ny, m, nx + ny)
        fg = til[nx:, :, :nx].reshape(ny, m * nx)
        f = fg @ self.G(xs).section.a % p
        return CommaObject(xs, ys, Matrix._wrap(f, p))

    def enumerate(self, c_mods: Sequence[Module], d_mods: Sequence[Module], cap: int | None = None) -> list[CommaObject]:
        cap = default_cap() if cap is None else cap
        out = []
        for x in c_mods:
            gx = self.G(x).module
            for y in d_mods:
                hb = hom_basis_array(gx, y)
                h = hb.shape[1]
                if x.dim * y.dim and h and x.p ** h > cap:
                    raise EnumerationBudgetExceeded(f"comma maps: {x.p}**{h} candidates exceeds cap {cap}")
                cands = []
                for combo in itertools.product(range(x.p), repeat=h):
                    f = (hb @ np.array(combo, dtype=np.int64) % x.p).reshape(y.dim, gx.dim) if h else \
                        np.zeros((y.dim, gx.dim), dtype=np.int64)
                    cands.append(CommaObject(x, y, Matrix._wrap(f, x.p)))
                exts = dedupe_ext([self.to_ext(c) for c in cands])
                keys = {e.key for e in exts}
                seen = set()
                for c in cands:
                    k = self.to_ext(c).key
                    if k in keys and k not in seen:
                        seen.add(k)
                        out.append(c)
        return out

    def pair_family(self, fx: Family, fy: Family) -> "CommaPairFamily":
        return CommaPairFamily(fx, fy)

    def r_family(self, fx: Family, fy: Family) -> "CommaRFamily":
        return CommaRFamily(self, fx, fy)


class CommaPairFamily(Family):
    """Comma objects (X; Y)_f with X in fx and Y in fy."""

    def __init__(self, fx: Family, fy: Family):
        self.fx, self.fy = fx, fy

    @property
    def name(self):
        return f"({self.fx.describe()}; {self.fy.describe()})"

    def contains(self, obj: CommaObject) -> bool:
        return self.fx.contains(obj.x) and self.fy.contains(obj.y)


class CommaRFamily(Family):
    """Comma objects with X in fx, f mono and Coker(f) in fy."""

    def __init__(self, bridge: CommaBridge, fx: Family, fy: Family):
        self.bridge, self.fx, self.fy = bridge, fx, fy

    @property
    def name(self):
        return f"R({self.fx.describe()}, {self.fy.describe()})"

    def contains(self, obj: CommaObject) -> bool:
        from .modules import quotient_module
        if not self.fx.contains(obj.x):
            return False
        if rank_array(obj.f.a, obj.x.p) != obj.f.cols:
            return False
        q, _, _ = quotient_module(obj.y, obj.f)
        return self.fy.contains(q)


def comma_bridge(spec: CommaSpec) -> CommaBridge:
    """B = C x D and the bimodule with F(X, Y) = (0, G X)."""
    g = spec.g
    if g.left != spec.d or g.right != spec.c:
        raise ValueError("G must be given by a D-C bimodule")
    prod = direct_product(spec.c, spec.d)
    if prod is spec.c or prod is spec.d:
        prod = Algebra(spec.c.p, _block_mul(spec.c, spec.d), np.concatenate([spec.c.unit, spec.d.unit]),
                       [f"{x}.1" for x in spec.c.labels] + [f"{x}.2" for x in spec.d.labels],
                       factors=(spec.c, spec.d))
    emb = embed_bimodule(g, prod, 1, prod, 0)
    return CommaBridge(spec, prod, emb, ExtensionCategory(emb))
