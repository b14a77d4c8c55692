"""Bimodules, the functors F = M (x) - and G = Hom(M, -), and the adjunction.

Tensor products are quotients of the k-tensor space k^m (x) k^n (index
s*n + t) by the balancing relations; each computed tensor keeps its
projection and section so that natural maps are concrete matrices.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .algebra import Algebra
from .linalg import Matrix, kernel_array, left_inverse, matmul_mod, quotient_maps
from .modules import Module, ModuleMap, module_axiom_failures


class Bimodule:
    """A left-``left``, right-``right`` bimodule of dimension ``dim``.

    ``left_act[i]`` is the matrix of m -> a_i m and ``right_act[j]`` the
    matrix of m -> m b_j, so right_act composes contravariantly.
    """

    def __init__(self, left: Algebra, right: Algebra, left_act, right_act, dim: int | None = None,
                 check: bool = True):
        self.left = left
        self.right = right
        p = left.p
        if right.p != p:
            raise ValueError("bimodule over different fields")
        la = np.array(left_act, dtype=np.int64)
        ra = np.array(right_act, dtype=np.int64)
        n = dim if dim is not None else (la.shape[1] if la.ndim == 3 else 0)
        if la.size == 0:
            la = np.zeros((left.dim, n, n), dtype=np.int64)
        if ra.size == 0:
            ra = np.zeros((right.dim, n, n), dtype=np.int64)
        la %= p
        ra %= p
        la.flags.writeable = False
        ra.flags.writeable = False
        self.left_act = la
        self.right_act = ra
        self.dim = la.shape[1]
        if la.shape != (left.dim, self.dim, self.dim) or ra.shape != (right.dim, self.dim, self.dim):
            raise ValueError("bimodule action shapes do not match")
        if check:
            bad = self.failures()
            if bad:
                raise ValueError(f"not a bimodule: {bad[0]}")

    @property
    def p(self) -> int:
        return self.left.p

    def failures(self) -> list[str]:
        p = self.p
        out = list(module_axiom_failures(self.left, self.left_act))
        # right action is a left action of the opposite algebra
        rop = np.transpose(self.right.mul, (1, 0, 2))
        ropalg = Algebra(p, rop, self.right.unit)
        out += [f"right: {s}" for s in module_axiom_failures(ropalg, self.right_act)]
        if self.dim:
            lr = np.einsum("iab,jbc->ijac", self.left_act, self.right_act) % p
            rl = np.einsum("jab,ibc->ijac", self.right_act, self.left_act) % p
            if not np.array_equal(lr, rl):
                out.append("left and right actions do not commute")
        return out

    @cached_property
    def key(self) -> str:
        h = hashlib.sha256()
        h.update(self.left.key.encode())
        h.update(self.right.key.encode())
        h.update(self.left_act.tobytes())
        h.update(self.right_act.tobytes())
        return h.hexdigest()

    def __eq__(self, other) -> bool:
        return isinstance(other, Bimodule) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def as_left_module(self) -> Module:
        return Module(self.left, self.left_act, dim=self.dim, check=False)

    def __repr__(self) -> str:
        return f"Bimodule(dim={self.dim})"


def regular_bimodule(a: Algebra) -> Bimodule:
    return Bimodule(a, a, a.left_regular, a.right_regular, check=False)


def zero_bimodule(a: Algebra, b: Algebra | None = None) -> Bimodule:
    b = a if b is None else b
    return Bimodule(a, b, [], [], dim=0, check=False)


def tensor_k_bimodule(a: Algebra, b: Algebra) -> Bimodule:
    """The free bimodule A (x)_k B."""
    ia = np.eye(a.dim, dtype=np.int64)
    ib = np.eye(b.dim, dtype=np.int64)
    la = np.stack([np.kron(a.left_regular[i], ib) for i in range(a.dim)]) if a.dim else []
    ra = np.stack([np.kron(ia, b.right_regular[j]) for j in range(b.dim)]) if b.dim else []
    return Bimodule(a, b, la, ra, dim=a.dim * b.dim, check=False)


def bimodule_sum(*ms: Bimodule) -> Bimodule:
    left, right = ms[0].left, ms[0].right
    n = sum(m.dim for m in ms)
    la = np.zeros((left.dim, n, n), dtype=np.int64)
    ra = np.zeros((right.dim, n, n), dtype=np.int64)
    o = 0
    for m in ms:
        if m.left != left or m.right != right:
            raise ValueError("bimodule_sum over different algebras")
        la[:, o:o + m.dim, o:o + m.dim] = m.left_act
        ra[:, o:o + m.dim, o:o + m.dim] = m.right_act
        o += m.dim
    return Bimodule(left, right, la, ra, dim=n, check=False)


def embed_bimodule(m: Bimodule, left_prod: Algebra, left_index: int,
                   right_prod: Algebra, right_index: int) -> Bimodule:
    """View m as a bimodule over product algebras, through one factor on each side."""
    if left_prod.factors[left_index] != m.left or right_prod.factors[right_index] != m.right:
        raise ValueError("factor algebras do not match the bimodule")
    n = m.dim
    la = np.zeros((left_prod.dim, n, n), dtype=np.int64)
    ra = np.zeros((right_prod.dim, n, n), dtype=np.int64)
    lo = left_prod.factor_offsets()[left_index]
    ro = right_prod.factor_offsets()[right_index]
    la[lo:lo + m.left.dim] = m.left_act
    ra[ro:ro + m.right.dim] = m.right_act
    return Bimodule(left_prod, right_prod, la, ra, dim=n, check=False)


# ---------------------------------------------------------------------------
# memo table


class _Memo:
    def __init__(self):
        self._lock = threading.Lock()
        self._data: dict = {}

    def get(self, key, build: Callable):
        with self._lock:
            if key in self._data:
                return self._data[key]
        val = build()
        with self._lock:
            return self._data.setdefault(key, val)

    def clear(self):
        with self._lock:
            self._data.clear()


MEMO = _Memo()


# ---------------------------------------------------------------------------
# tensor


@dataclass(frozen=True)
class TensorData:
    module: Module
    proj: Matrix      # q x (m*n)
    section: Matrix   # (m*n) x q


def relation_span(m: Bimodule, x: Module) -> np.ndarray:
    p = m.p
    gens = m.right.generation.gens
    im = np.eye(m.dim, dtype=np.int64)
    ix = np.eye(x.dim, dtype=np.int64)
    cols = [np.kron(m.right_act[g], ix) - np.kron(im, x.act[g]) for g in gens]
    if not cols:
        return np.zeros((m.dim * x.dim, 0), dtype=np.int64)
    return np.concatenate(cols, axis=1) % p


def tensor_data(m: Bimodule, x: Module) -> TensorData:
    if m.right != x.algebra:
        raise ValueError("tensor: right algebra of bimodule does not act on module")

    def build():
        p = m.p
        w = relation_span(m, x)
        proj, sec = quotient_maps(Matrix._wrap(w, p))
        ix = np.eye(x.dim, dtype=np.int64)
        act = np.stack([proj.a @ np.kron(m.left_act[i], ix) % p @ sec.a % p
                        for i in range(m.left.dim)]) if m.left.dim else []
        mod = Module(m.left, act, dim=proj.rows, check=False)
        return TensorData(mod, proj, sec)

    return MEMO.get(("tensor", m.key, x.key), build)


def tensor_apply(m: Bimodule, x: Module) -> Module:
    return tensor_data(m, x).module


def tensor_on_map(m: Bimodule, f: ModuleMap) -> ModuleMap:
    tx = tensor_data(m, f.source)
    ty = tensor_data(m, f.target)
    p = m.p
    big = np.kron(np.eye(m.dim, dtype=np.int64), f.mat.a)
    mat = ty.proj.a @ big % p @ tx.section.a % p
    return ModuleMap(tx.module, ty.module, Matrix._wrap(mat, p), check=False)


# ---------------------------------------------------------------------------
# hom


@dataclass(frozen=True)
class HomData:
    module: Module
    basis: Matrix    # (n_y*m) x h, columns = vec(phi) row-major
    coords: Matrix   # h x (n_y*m), left inverse of basis


def hom_data(m: Bimodule, y: Module) -> HomData:
    if m.left != y.algebra:
        raise ValueError("hom: left algebra of bimodule does not act on module")

    def build():
        p = m.p
        ny, md = y.dim, m.dim
        gens = m.left.generation.gens
        iy = np.eye(ny, dtype=np.int64)
        im = np.eye(md, dtype=np.int64)
        rows = [np.kron(iy, m.left_act[g].T) - np.kron(y.act[g], im) for g in gens]
        if ny * md == 0:
            k = np.zeros((ny * md, 0), dtype=np.int64)
        elif rows:
            k = kernel_array(np.concatenate(rows, axis=0) % p, p)
        else:
            k = np.eye(ny * md, dtype=np.int64)
        basis = Matrix._wrap(k, p)
        coords = left_inverse(basis)
        act = np.stack([coords.a @ np.kron(iy, m.right_act[j].T) % p @ k % p
                        for j in range(m.right.dim)]) if m.right.dim else []
        mod = Module(m.right, act, dim=k.shape[1], check=False)
        return HomData(mod, basis, coords)

    return MEMO.get(("hom", m.key, y.key), build)


def hom_apply(m: Bimodule, y: Module) -> Module:
    return hom_data(m, y).module


def hom_on_map(m: Bimodule, g: ModuleMap) -> ModuleMap:
    hx = hom_data(m, g.source)
    hy = hom_data(m, g.target)
    p = m.p
    big = np.kron(g.mat.a, np.eye(m.dim, dtype=np.int64))
    mat = hy.coords.a @ big % p @ hx.basis.a % p
    return ModuleMap(hx.module, hy.module, Matrix._wrap(mat, p), check=False)


# ---------------------------------------------------------------------------
# adjunction


def adjunction_phi(m: Bimodule, f: ModuleMap, x: Module | None = None) -> ModuleMap:
    """phi: Hom(M (x) X, Y) -> Hom(X, Hom(M, Y))."""
    td = _tensor_source(m, f, x)
    x = td[1]
    y = f.target
    p = m.p
    hy = hom_data(m, y)
    fp = f.mat.a @ td[0].proj.a % p                  # n_y x (m*n_x)
    phis = fp.reshape(y.dim, m.dim, x.dim)           # [y, s, t]
    vecs = phis.reshape(y.dim * m.dim, x.dim)
    mat = hy.coords.a @ vecs % p
    return ModuleMap(x, hy.module, Matrix._wrap(mat, p), check=False)


def _tensor_source(m: Bimodule, f: ModuleMap, x: Module | None):
    if x is None:
        raise ValueError("the module X must be given (tensor source is not recoverable)")
    td = tensor_data(m, x)
    if td.module != f.source:
        raise ValueError("map source is not M (x) X")
    return td, x


def adjunction_psi(m: Bimodule, h: ModuleMap, y: Module) -> ModuleMap:
    """psi: Hom(X, Hom(M, Y)) -> Hom(M (x) X, Y)."""
    x = h.source
    p = m.p
    hy = hom_data(m, y)
    td = tensor_data(m, x)
    phi = hy.basis.a @ h.mat.a % p                   # (n_y*m) x n_x
    full = phi.reshape(y.dim, m.dim * x.dim)         # column s*n_x + t
    mat = full @ td.section.a % p
    return ModuleMap(td.module, y, Matrix._wrap(mat, p), check=False)


# ---------------------------------------------------------------------------
# multiplication and natural transformations


class BimoduleMul:
    """An associative bimodule map mu: M (x)_A M -> M.

    Given as ``tilde``: the m x m^2 matrix on the k-tensor space, which must
    vanish on the balancing relations.
    """

    def __init__(self, m: Bimodule, tilde, check: bool = True):
        if m.left != m.right:
            raise ValueError("multiplication needs an A-A bimodule")
        self.bimodule = m
        self.tilde = Matrix(np.array(tilde, dtype=np.int64).reshape(m.dim, m.dim * m.dim), m.p)
        if check:
            bad = self.failures()
            if bad:
                raise ValueError(f"invalid bimodule multiplication: {bad[0]}")

    @classmethod
    def zero(cls, m: Bimodule) -> "BimoduleMul":
        return cls(m, np.zeros((m.dim, m.dim * m.dim), dtype=np.int64), check=False)

    def is_zero(self) -> bool:
        return self.tilde.is_zero()

    @property
    def tensor(self) -> TensorData:
        return tensor_data(self.bimodule, self.bimodule.as_left_module())

    @property
    def mu(self) -> Matrix:
        return self.tilde @ self.tensor.section

    def failures(self) -> list:
        m = self.bimodule
        p = m.p
        md = m.dim
        t = self.tilde.a
        out = []
        rel = relation_span(m, m.as_left_module())
        if rel.size and (t @ rel % p).any():
            out.append(("balanced", None, "mu does not kill m.a (x) m' - m (x) a.m'"))
        im = np.eye(md, dtype=np.int64)
        for i in range(m.left.dim):
            if not np.array_equal(t @ np.kron(m.left_act[i], im) % p, m.left_act[i] @ t % p):
                out.append(("left linear", (i,), f"mu not left linear at {m.left.labels[i]}"))
        for j in range(m.right.dim):
            if not np.array_equal(t @ np.kron(im, m.right_act[j]) % p, m.right_act[j] @ t % p):
                out.append(("right linear", (j,), f"mu not right linear at {m.right.labels[j]}"))
        lhs = t @ np.kron(t, im) % p
        rhs = t @ np.kron(im, t) % p
        diff = np.flatnonzero((lhs != rhs).any(axis=0))
        for c in diff[:5]:
            s1, rest = divmod(int(c), md * md)
            s2, s3 = divmod(rest, md)
            out.append(("associativity", (s1, s2, s3), f"mu(mu(m{s1},m{s2}),m{s3}) != mu(m{s1},mu(m{s2},m{s3}))"))
        return out


@dataclass
class NaturalTransformation:
    """Components given by a rule; domain/codomain are descriptive tags."""
    component: Callable[[Module], ModuleMap]
    domain: str
    codomain: str

    def __call__(self, x: Module) -> ModuleMap:
        return self.component(x)

    def is_natural_at(self, f: ModuleMap, dom_map: Callable, cod_map: Callable) -> bool:
        lhs = self.component(f.target) @ dom_map(f)
        rhs = cod_map(f) @ self.component(f.source)
        return lhs.mat == rhs.mat


def eta_component(mul: BimoduleMul, x: Module) -> ModuleMap:
    """eta_X : F^2 X -> F X induced by mu (x) id_X."""
    m = mul.bimodule
    p = m.p

    def build():
        fx = tensor_data(m, x)
        ffx = tensor_data(m, fx.module)
        mx = np.kron(np.eye(m.dim, dtype=np.int64), fx.section.a)
        mt = np.kron(mul.tilde.a, np.eye(x.dim, dtype=np.int64))
        mat = fx.proj.a @ mt % p @ mx % p @ ffx.section.a % p
        return ModuleMap(ffx.module, fx.module, Matrix._wrap(mat, p), check=False)

    return MEMO.get(("eta", m.key, mul.tilde.a.tobytes(), x.key), build)


def eta_from_mul(mul: BimoduleMul) -> NaturalTransformation:
    bad = [f for f in mul.failures() if f[0] == "associativity"]
    if bad:
        raise ValueError(f"non-associative multiplication, witness triple {bad[0][1]}")
    return NaturalTransformation(lambda x: eta_component(mul, x), "F^2", "F")


def apply_eta(m: Bimodule, mul: Optional[BimoduleMul], x: Module) -> ModuleMap:
    if mul is None or mul.is_zero():
        ffx = tensor_apply(m, tensor_apply(m, x))
        return ffx.zero_to(tensor_apply(m, x))
    return eta_component(mul, x)


def zeta_component(m: Bimodule, mul: Optional[BimoduleMul], x: Module) -> ModuleMap:
    """zeta_X = G^2(eps_X) . phi(phi(eta_{GX})) : G X -> G^2 X."""
    y = hom_apply(m, x)
    fy_td = tensor_data(m, y)
    fy = fy_td.module
    eta_y = apply_eta(m, mul, y)                       # F^2 Y -> F Y
    step1 = adjunction_phi(m, eta_y, x=fy)            # F Y -> G F Y
    step2 = adjunction_phi(m, step1, x=y)             # Y -> G G F Y
    eps = adjunction_psi(m, y.identity(), x)          # F G X -> X
    g2eps = hom_on_map(m, hom_on_map(m, eps))         # G G F Y -> G G X
    return g2eps @ step2


def zeta_from_eta(m: Bimodule, mul: Optional[BimoduleMul]) -> NaturalTransformation:
    return NaturalTransformation(lambda x: zeta_component(m, mul, x), "G", "G^2")


def f_squared_zero(m: Bimodule) -> bool:
    """Whether M (x)_A M = 0, so that F^2 = 0 on every module."""
    return tensor_apply(m, m.as_left_module()).dim == 0
