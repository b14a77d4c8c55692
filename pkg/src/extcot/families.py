"""Object families (decidable classes) and category-generic helpers.

The generic helpers dispatch on the object type, so the same cotorsion
checkers run over plain modules, extension objects and coextension objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import singledispatch
from typing import Callable, Optional, Sequence

import numpy as np

from . import extension as ex
from .extension import CoextObject, ExtObject
from .linalg import Matrix, kernel_array, quotient_maps, rank_array, solve_array
from .modules import (Module, direct_sum, ext_dims, find_isomorphism,
                      hom_basis_array, is_injective, is_projective, split_product_module)


class PerpRefused(ValueError):
    """A perp family was asked to test against an unbounded class."""


# ---------------------------------------------------------------------------
# generic operations


@singledispatch
def ext_dims_any(a, b, top: int) -> list[int]:
    raise TypeError(f"no Ext for {type(a).__name__}")


@ext_dims_any.register
def _(a: Module, b, top: int) -> list[int]:
    return ext_dims(a, b, top)


@ext_dims_any.register
def _(a: ExtObject, b, top: int) -> list[int]:
    return ex.ext_dims_ext(a, b, top)


@ext_dims_any.register
def _(a: CoextObject, b, top: int) -> list[int]:
    return ex.ext_dims_coext(a, b, top)


_EXT_CACHE: dict = {}
_EXT_CACHE_LIMIT = 200_000


def ext_dims_cached(a, b, top: int) -> list[int]:
    """ext_dims_any memoized on (a.key, b.key); longer windows are reused."""
    k = (a.key, b.key)
    hit = _EXT_CACHE.get(k)
    if hit is not None and len(hit) > top:
        return hit[:top + 1]
    dims = ext_dims_any(a, b, top)
    if len(_EXT_CACHE) >= _EXT_CACHE_LIMIT:
        _EXT_CACHE.clear()
    _EXT_CACHE[k] = list(dims)
    return list(dims)


def clear_ext_cache() -> None:
    _EXT_CACHE.clear()


@singledispatch
def hom_basis_any(a, b) -> np.ndarray:
    raise TypeError(type(a).__name__)


@hom_basis_any.register
def _(a: Module, b) -> np.ndarray:
    return hom_basis_array(a, b)


@hom_basis_any.register
def _(a: ExtObject, b) -> np.ndarray:
    return ex.hom_ext_basis(a, b)


@hom_basis_any.register
def _(a: CoextObject, b) -> np.ndarray:
    return ex.hom_coext_basis(a, b)


@singledispatch
def is_projective_any(a) -> bool:
    raise TypeError(type(a).__name__)


@is_projective_any.register
def _(a: Module) -> bool:
    return is_projective(a)


@is_projective_any.register
def _(a: ExtObject) -> bool:
    return bool(ex.is_projective_ext(a))


@is_projective_any.register
def _(a: CoextObject) -> bool:
    return bool(ex.is_projective_ext(ex.phi_inverse(a)))


@singledispatch
def is_injective_any(a) -> bool:
    raise TypeError(type(a).__name__)


@is_injective_any.register
def _(a: Module) -> bool:
    return is_injective(a)


@is_injective_any.register
def _(a: ExtObject) -> bool:
    return bool(ex.is_injective_coext(ex.phi_isomorphism(a)))


@is_injective_any.register
def _(a: CoextObject) -> bool:
    return bool(ex.is_injective_coext(a))


@singledispatch
def isomorphic_any(a, b) -> bool:
    raise TypeError(type(a).__name__)


@isomorphic_any.register
def _(a: Module, b) -> bool:
    return find_isomorphism(a, b) is not None


@isomorphic_any.register
def _(a: ExtObject, b) -> bool:
    return ex.find_isomorphism_ext(a, b) is not None


@isomorphic_any.register
def _(a: CoextObject, b) -> bool:
    return ex.find_isomorphism_coext(a, b) is not None


@singledispatch
def cokernel_any(target, mat: np.ndarray):
    """Cokernel object of a map given by its matrix into target."""
    raise TypeError(type(target).__name__)


@cokernel_any.register
def _(target: Module, mat: np.ndarray):
    proj, sec = quotient_maps(Matrix._wrap(mat, target.p))
    act = (proj.a @ target.act % target.p @ sec.a) % target.p
    return Module(target.algebra, act, dim=proj.rows, check=False), proj.a


@cokernel_any.register
def _(target: ExtObject, mat: np.ndarray):
    obj, q = ex.quotient_object(target, mat)
    return obj, q.mat.a


@cokernel_any.register
def _(target: CoextObject, mat: np.ndarray):
    # cokernels computed on the extension side then transported
    obj, q = ex.quotient_object(ex.phi_inverse(target), mat)
    return ex.phi_isomorphism(obj), q.mat.a


@singledispatch
def kernel_any(source, mat: np.ndarray):
    raise TypeError(type(source).__name__)


@kernel_any.register
def _(source: Module, mat: np.ndarray):
    from .modules import submodule_from_basis
    k = kernel_array(mat, source.p)
    sub, inc = submodule_from_basis(source, Matrix._wrap(k, source.p))
    return sub, k


@kernel_any.register
def _(source: ExtObject, mat: np.ndarray):
    k = kernel_array(mat, source.p)
    obj, _ = ex.subobject(source, k)
    return obj, k


@kernel_any.register
def _(source: CoextObject, mat: np.ndarray):
    k = kernel_array(mat, source.p)
    obj, _ = ex.subobject(ex.phi_inverse(source), k)
    return ex.phi_isomorphism(obj), k


@singledispatch
def direct_sum_any(a, b):
    raise TypeError(type(a).__name__)


@direct_sum_any.register
def _(a: Module, b):
    return direct_sum(a, b).module


@direct_sum_any.register
def _(a: ExtObject, b):
    return ex.direct_sum_ext(a, b)[0]


@direct_sum_any.register
def _(a: CoextObject, b):
    return ex.phi_isomorphism(ex.direct_sum_ext(ex.phi_inverse(a), ex.phi_inverse(b))[0])


def underlying(obj) -> Module:
    return obj if isinstance(obj, Module) else obj.x


def obj_dim(obj) -> int:
    return obj.dim


# ---------------------------------------------------------------------------
# families


class Family:
    name = "family"

    def contains(self, obj) -> bool:
        raise NotImplementedError

    def __contains__(self, obj) -> bool:
        return self.contains(obj)

    def describe(self) -> str:
        return self.name


def membership(fam: Family, obj) -> bool:
    return fam.contains(obj)


@dataclass(eq=False)
class All(Family):
    name = "All"

    def contains(self, obj) -> bool:
        return True


@dataclass(eq=False)
class Projectives(Family):
    name = "Proj"

    def contains(self, obj) -> bool:
        return is_projective_any(obj)


@dataclass(eq=False)
class Injectives(Family):
    name = "Inj"

    def contains(self, obj) -> bool:
        return is_injective_any(obj)


@dataclass(eq=False)
class AddClosure(Family):
    """Direct summands of finite sums of the generators."""
    generators: Sequence
    label: str = "add"

    @property
    def name(self):
        return f"{self.label}({len(self.generators)} generators)"

    def contains(self, obj) -> bool:
        return in_add_closure(obj, self.generators)


def in_add_closure(obj, gens: Sequence) -> bool:
    """obj is in add(gens) iff the universal map from sums of gens splits."""
    if obj.dim == 0:
        return True
    p = obj.p
    n = obj.dim
    # maps into obj: phi_j^t : G_j -> obj; maps out: psi : obj -> G_j
    into, outof = [], []
    for g in gens:
        a = hom_basis_any(g, obj)
        b = hom_basis_any(obj, g)
        for c in range(a.shape[1]):
            into.append((g, a[:, c].reshape(n, g.dim)))
        outs = [b[:, c].reshape(g.dim, n) for c in range(b.shape[1])]
        outof.append(outs)
    if not into:
        return False
    # identity = sum_{t, u} c_{t,u} phi_t psi_u with psi through the same generator
    cols = []
    gi = {id(g): i for i, g in enumerate(gens)}
    for g, phi in into:
        for psi in outof[gi[id(g)]]:
            cols.append((phi @ psi % p).reshape(-1))
    if not cols:
        return False
    a = np.array(cols, dtype=np.int64).T
    return solve_array(a, np.eye(n, dtype=np.int64).reshape(-1, 1), p) is not None


@dataclass(eq=False)
class FiniteSample:
    """A finite list of objects standing in for a (possibly infinite) class."""
    objects: Sequence
    label: str = "sample"


@dataclass(eq=False)
class LeftPerpOf(Family):
    """Objects X with Ext^i(X, s) = 0 for i in degrees and s in the sample.

    The sample is fam's generators when fam is an AddClosure; otherwise an
    explicit finite sample must be given.
    """
    fam: Family
    sample: Optional[Sequence] = None
    window: int = 1
    start: int = 1

    @property
    def name(self):
        return f"perp-left({self.fam.describe()}, window {self.start}..{self.window})"

    def targets(self) -> Sequence:
        if isinstance(self.fam, AddClosure):
            return self.fam.generators
        if self.sample is None:
            raise PerpRefused(f"left perp of {self.fam.describe()} needs an explicit finite sample")
        return [s for s in self.sample if self.fam.contains(s)]

    def contains(self, obj) -> bool:
        for s in self.targets():
            dims = ext_dims_cached(obj, s, self.window)
            if any(dims[i] for i in range(self.start, self.window + 1)):
                return False
        return True


@dataclass(eq=False)
class RightPerpOf(Family):
    fam: Family
    sample: Optional[Sequence] = None
    window: int = 1
    start: int = 1

    @property
    def name(self):
        return f"perp-right({self.fam.describe()}, window {self.start}..{self.window})"

    def sources(self) -> Sequence:
        if isinstance(self.fam, AddClosure):
            return self.fam.generators
        if self.sample is None:
            raise PerpRefused(f"right perp of {self.fam.describe()} needs an explicit finite sample")
        return [s for s in self.sample if self.fam.contains(s)]

    def contains(self, obj) -> bool:
        for s in self.sources():
            dims = ext_dims_cached(s, obj, self.window)
            if any(dims[i] for i in range(self.start, self.window + 1)):
                return False
        return True


@dataclass(eq=False)
class UInvOf(Family):
    base: Family

    @property
    def name(self):
        return f"U^-1({self.base.describe()})"

    def contains(self, obj) -> bool:
        return self.base.contains(obj.x)


@dataclass(eq=False)
class DeltaOf(Family):
    """(X, f) with Com(X, f) exact and Coker(f) in base."""
    base: Family

    @property
    def name(self):
        return f"Delta({self.base.describe()})"

    def contains(self, obj) -> bool:
        if isinstance(obj, CoextObject):
            obj = ex.phi_inverse(obj)
        if not ex.com_sequence(obj).is_exact:
            return False
        return self.base.contains(ex.functor_C(obj))


@dataclass(eq=False)
class NablaOf(Family):
    """[X, g] with X -> G X -> G^2 X exact and Ker(g) in base."""
    base: Family

    @property
    def name(self):
        return f"Nabla({self.base.describe()})"

    def contains(self, obj) -> bool:
        if isinstance(obj, ExtObject):
            obj = ex.phi_isomorphism(obj)
        cat = obj.cat
        gm = obj.g_map()
        d = cat.Gmap(gm) - cat.zeta(obj.x)
        p = obj.p
        rg = rank_array(gm.mat.a, p)
        rd = rank_array(d.mat.a, p)
        comp = not (d.mat.a @ gm.mat.a % p).any() if gm.target.dim and d.target.dim else True
        if not (comp and gm.target.dim - rd == rg):
            return False
        return self.base.contains(ex.functor_K(obj))


@dataclass(eq=False)
class TImageOf(Family):
    """Objects isomorphic to T(X) with X in base."""
    base: Family

    @property
    def name(self):
        return f"T({self.base.describe()})"

    def contains(self, obj) -> bool:
        if isinstance(obj, CoextObject):
            obj = ex.phi_inverse(obj)
        c = ex.functor_C(obj)
        if not self.base.contains(c):
            return False
        return ex.find_isomorphism_ext(ex.functor_T(obj.cat, c), obj) is not None


@dataclass(eq=False)
class HImageOf(Family):
    """Coextension objects isomorphic to H(X) with X in base."""
    base: Family

    @property
    def name(self):
        return f"H({self.base.describe()})"

    def contains(self, obj) -> bool:
        if isinstance(obj, ExtObject):
            obj = ex.phi_isomorphism(obj)
        k = ex.functor_K(obj)
        if not self.base.contains(k):
            return False
        return ex.find_isomorphism_coext(ex.functor_H(obj.cat, k), obj) is not None


@dataclass(eq=False)
class ProductOf(Family):
    """Modules over a product algebra whose components lie in the given families."""
    parts: Sequence[Family]

    @property
    def name(self):
        return "(" + ", ".join(f.describe() for f in self.parts) + ")"

    def contains(self, obj) -> bool:
        comps = split_product_module(underlying(obj))
        return all(f.contains(c) for f, c in zip(self.parts, comps))


@dataclass(eq=False)
class Intersection(Family):
    parts: Sequence[Family]

    @property
    def name(self):
        return " & ".join(f.describe() for f in self.parts)

    def contains(self, obj) -> bool:
        return all(f.contains(obj) for f in self.parts)


@dataclass(eq=False)
class Predicate(Family):
    label: str
    fn: Callable

    @property
    def name(self):
        return self.label

    def contains(self, obj) -> bool:
        return bool(self.fn(obj))


class Memo(Family):
    """Caches membership by object content key."""

    def __init__(self, fam: Family):
        self.fam = fam
        self._seen: dict = {}

    @property
    def name(self):
        return self.fam.describe()

    def contains(self, obj) -> bool:
        k = obj.key
        if k not in self._seen:
            self._seen[k] = self.fam.contains(obj)
        return self._seen[k]
