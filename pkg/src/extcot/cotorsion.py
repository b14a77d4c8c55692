"""Cotorsion pairs over finite universes: checks, approximations, transport.

Everything here is relative to an enumerated universe of objects (modules,
extension objects or coextension objects). Perp classes are taken against
finite samples, and the reports say so.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import extension as ex
from .extension import CoextObject, ExtObject, ExtensionCategory, HypothesisError
from .families import (All, DeltaOf, Family, Injectives, Intersection, LeftPerpOf, Memo, Projectives, RightPerpOf, TImageOf, UInvOf, cokernel_any,
                       direct_sum_any, ext_dims_cached, hom_basis_any, is_injective_any,
                       is_projective_any, isomorphic_any)
from .linalg import Matrix, rank_array, solve_array
from .modules import (Module, ModuleMap, direct_sum, free_cover, generating_vectors, hom_basis_array,
                      injective_coresolution, kernel, signature, tor_dims)


# ---------------------------------------------------------------------------
# universe bookkeeping


def _sig(obj) -> tuple:
    if isinstance(obj, Module):
        return ("m",) + signature(obj)
    if isinstance(obj, CoextObject):
        obj = ex.phi_inverse(obj)
    return ("e",) + ex.ext_signature(obj)


def _zero_like(obj):
    if isinstance(obj, Module):
        return Module(obj.algebra, [], dim=0, check=False)
    if isinstance(obj, ExtObject):
        return ex.zero_object(obj.cat)
    return ex.phi_isomorphism(ex.zero_object(obj.cat))


def _is_map(src, tgt, mat: np.ndarray) -> bool:
    if isinstance(src, Module):
        return ModuleMap(src, tgt, Matrix._wrap(mat, src.p), check=False).is_homomorphism()
    if isinstance(src, CoextObject):
        src, tgt = ex.phi_inverse(src), ex.phi_inverse(tgt)
    return ex.ExtMap(src, tgt, Matrix._wrap(mat, src.p), check=False).is_morphism()


@dataclass(frozen=True)
class SES:
    """Indices (a, b, c) of a short exact sequence inside a universe."""
    a: int
    b: int
    c: int


class UniverseIndex:
    """A finite list of pairwise non-isomorphic objects with lookup and caches."""

    def __init__(self, objects: Sequence):
        self.objects = list(objects)
        self._buckets: dict = {}
        for i, o in enumerate(self.objects):
            self._buckets.setdefault(_sig(o), []).append(i)
        self._members: dict = {}
        self._ses: dict = {}

    def __len__(self) -> int:
        return len(self.objects)

    def locate(self, obj) -> Optional[int]:
        for i in self._buckets.get(_sig(obj), []):
            if isomorphic_any(self.objects[i], obj):
                return i
        return None

    def ext(self, i: int, j: int, top: int) -> list[int]:
        return ext_dims_cached(self.objects[i], self.objects[j], top)

    def members(self, fam: Family) -> list[bool]:
        k = id(fam)
        if k not in self._members:
            self._members[k] = (fam, [bool(fam.contains(o)) for o in self.objects])
        return self._members[k][1]

    def short_exact(self, per_pair: int = 16, middle_cap: int | None = None, seed: int = 0) -> list[SES]:
        """Short exact sequences 0 -> a -> b -> c -> 0 with all terms in the universe.

        For each (a, b), all monos from the hom space are tried when it has at
        most per_pair elements, otherwise a seeded sample of that size.
        """
        key = (per_pair, middle_cap, seed)
        if key in self._ses:
            return self._ses[key]
        rng = np.random.default_rng(seed)
        found: set = set()
        for ib, b in enumerate(self.objects):
            if b.dim == 0 or (middle_cap is not None and b.dim > middle_cap):
                continue
            for ia, a in enumerate(self.objects):
                if a.dim == 0 or a.dim >= b.dim:
                    continue
                hb = hom_basis_any(a, b)
                h = hb.shape[1]
                if h == 0:
                    continue
                p = b.p
                if p ** h <= per_pair:
                    combos = [np.array(c, dtype=np.int64) for c in itertools.product(range(p), repeat=h)]
                else:
                    combos = [np.eye(h, dtype=np.int64)[t] for t in range(h)]
                    while len(combos) < per_pair:
                        combos.append(rng.integers(0, p, size=h))
                for c in combos:
                    if not c.any():
                        continue
                    mat = (hb @ c % p).reshape(b.dim, a.dim)
                    if rank_array(mat, p) != a.dim:
                        continue
                    co, _ = cokernel_any(b, mat)
                    ic = self.locate(co)
                    if ic is not None:
                        found.add(SES(ia, ib, ic))
        out = sorted(found, key=lambda s: (s.b, s.a, s.c))
        self._ses[key] = out
        return out


def as_index(universe) -> UniverseIndex:
    return universe if isinstance(universe, UniverseIndex) else UniverseIndex(universe)


# ---------------------------------------------------------------------------
# pair reports


@dataclass
class PairReport:
    left: str
    right: str
    universe_size: int
    orthogonality: list = field(default_factory=list)   # (i, j, ext1)
    maximality: list = field(default_factory=list)      # ("left" | "right", i)
    heredity_ext: list = field(default_factory=list)    # (i, j, degree, dim)
    heredity_closure: list = field(default_factory=list)  # (kind, a, b, c)
    completeness: list = field(default_factory=list)    # (i, failure text)
    left_members: list = field(default_factory=list)
    right_members: list = field(default_factory=list)
    window: int = 4
    ses_checked: int = 0

    @property
    def is_cotorsion(self) -> bool:
        return not self.orthogonality and not self.maximality

    @property
    def hereditary(self) -> bool:
        return not self.heredity_ext and not self.heredity_closure

    @property
    def ok(self) -> bool:
        return self.is_cotorsion and not self.completeness

    def to_dict(self) -> dict:
        return {
            "left": self.left, "right": self.right, "universe": self.universe_size,
            "window": self.window, "cotorsion": self.is_cotorsion, "hereditary": self.hereditary,
            "orthogonality": [list(t) for t in self.orthogonality],
            "maximality": [list(t) for t in self.maximality],
            "heredity_ext": [list(t) for t in self.heredity_ext],
            "heredity_closure": [list(t) for t in self.heredity_closure],
            "completeness": [list(t) for t in self.completeness],
            "left_members": self.left_members, "right_members": self.right_members,
            "ses_checked": self.ses_checked,
        }


def check_pair(left: Family, right: Family, universe, window: int = 4, per_pair: int = 16,
               middle_cap: int | None = None,
               approximations: Optional[Callable] = None) -> PairReport:
    """Orthogonality, maximality spot check and heredity on a finite universe.

    Maximality: every universe object Ext^1-orthogonal to all right members
    must be a left member, and dually. approximations, if given, maps a
    universe object to a list of failure strings (empty when it has its
    approximation sequences).
    """
    idx = as_index(universe)
    n = len(idx)
    lm = idx.members(left)
    rm = idx.members(right)
    L = [i for i in range(n) if lm[i]]
    R = [j for j in range(n) if rm[j]]
    rep = PairReport(left.describe(), right.describe(), n, left_members=L, right_members=R, window=window)
    for i in L:
        for j in R:
            d = idx.ext(i, j, window)
            if d[1]:
                rep.orthogonality.append((i, j, d[1]))
            for deg in range(2, window + 1):
                if d[deg]:
                    rep.heredity_ext.append((i, j, deg, d[deg]))
    for u in range(n):
        if not lm[u] and all(idx.ext(u, j, 1)[1] == 0 for j in R):
            rep.maximality.append(("left", u))
        if not rm[u] and all(idx.ext(i, u, 1)[1] == 0 for i in L):
            rep.maximality.append(("right", u))
    seqs = idx.short_exact(per_pair, middle_cap)
    rep.ses_checked = len(seqs)
    for s in seqs:
        if lm[s.b] and lm[s.c] and not lm[s.a]:
            rep.heredity_closure.append(("left not closed under kernels of epis", s.a, s.b, s.c))
        if rm[s.a] and rm[s.b] and not rm[s.c]:
            rep.heredity_closure.append(("right not closed under cokernels of monos", s.a, s.b, s.c))
    if approximations is not None:
        for u in range(n):
            for msg in approximations(idx.objects[u]):
                rep.completeness.append((u, msg))
    return rep


# ---------------------------------------------------------------------------
# approximation sequences


@dataclass
class ApproxSequence:
    """0 -> a -> b -> c -> 0 with i : a -> b and q : b -> c (matrices).

    side "left": a is the object being approximated, b the middle (right
    family), c the end (left family). side "right": c is approximated, b is
    in the left family and the end is a.
    """
    a: object
    b: object
    c: object
    i: np.ndarray
    q: np.ndarray
    side: str
    middle_family: str = ""
    end_family: str = ""

    @property
    def end(self):
        return self.c if self.side == "left" else self.a

    def exactness_failures(self) -> list[str]:
        p = self.b.p
        out = []
        if not _is_map(self.a, self.b, self.i):
            out.append("i is not a morphism")
        if not _is_map(self.b, self.c, self.q):
            out.append("q is not a morphism")
        if self.a.dim and rank_array(self.i, p) != self.a.dim:
            out.append("i is not mono")
        if self.c.dim and rank_array(self.q, p) != self.c.dim:
            out.append("q is not epi")
        if self.a.dim and self.c.dim and (self.q @ self.i % p).any():
            out.append("q . i != 0")
        if self.a.dim + self.c.dim != self.b.dim:
            out.append("dimensions do not add up")
        return out

    def failures(self, middle: Family | None = None, end: Family | None = None,
                 perp_sample: Sequence = (), window: int = 1) -> list[str]:
        out = self.exactness_failures()
        if middle is not None and not middle.contains(self.b):
            out.append(f"middle term not in {middle.describe()}")
        if end is not None and not end.contains(self.end):
            out.append(f"end term not in {end.describe()}")
        for s in perp_sample:
            if self.side == "left":
                d = ext_dims_cached(self.c, s, window)
            else:
                d = ext_dims_cached(s, self.a, window)
            if any(d[1:window + 1]):
                out.append("end term not Ext-orthogonal to the sample")
                break
        return out


def _identity_left(x) -> ApproxSequence:
    z = _zero_like(x)
    return ApproxSequence(x, x, z, np.eye(x.dim, dtype=np.int64), np.zeros((0, x.dim), dtype=np.int64), "left")


def _identity_right(x) -> ApproxSequence:
    z = _zero_like(x)
    return ApproxSequence(z, x, x, np.zeros((x.dim, 0), dtype=np.int64), np.eye(x.dim, dtype=np.int64), "right")


BASE_PAIRS = ("proj_all", "all_inj", "frobenius")


def special_left_approx_base(x: Module, pair: str) -> ApproxSequence:
    """0 -> x -> Y -> X' -> 0 with Y in the right class of a built-in pair."""
    if pair not in BASE_PAIRS:
        raise ValueError(f"unknown built-in pair {pair!r}")
    if pair == "proj_all":
        s = _identity_left(x)
        s.middle_family, s.end_family = "All", "Proj"
        return s
    if pair == "frobenius":
        from .modules import regular_module
        if not is_injective_any(regular_module(x.algebra)):
            raise HypothesisError("frobenius pair needs a self-injective algebra")
    right = "Proj" if pair == "frobenius" else "Inj"
    if is_injective_any(x):
        s = _identity_left(x)
    else:
        co = injective_coresolution(x, 0)
        j = co.differentials[0].mat.a
        inj = co.modules[1]
        c, q = cokernel_any(inj, j)
        s = ApproxSequence(x, inj, c, j, q, "left")
    s.middle_family, s.end_family = right, "All"
    return s


def special_right_approx_base(x: Module, pair: str) -> ApproxSequence:
    """0 -> Y' -> X' -> x -> 0 with X' in the left class of a built-in pair."""
    if pair not in BASE_PAIRS:
        raise ValueError(f"unknown built-in pair {pair!r}")
    if pair == "frobenius":
        from .modules import regular_module
        if not is_injective_any(regular_module(x.algebra)):
            raise HypothesisError("frobenius pair needs a self-injective algebra")
    if pair in ("all_inj", "frobenius"):
        s = _identity_right(x)
        s.middle_family, s.end_family = "All", "Inj" if pair == "all_inj" else "Proj"
        return s
    if is_projective_any(x):
        s = _identity_right(x)
    else:
        cov = free_cover(x, generating_vectors(x))
        k, inc = kernel(cov)
        s = ApproxSequence(k, cov.source, x, inc.mat.a, cov.mat.a, "right")
    s.middle_family, s.end_family = "Proj", "All"
    return s


# ---------------------------------------------------------------------------
# gluing left approximations along 0 -> A -> B -> C -> 0


class AssemblyError(RuntimeError):
    """Gluing failed although the preconditions were claimed."""


def _struct(obj):
    """(action stack, lifted structure map or None) of a module or extension object."""
    if isinstance(obj, Module):
        return obj.act, None
    return obj.x.act, obj.ftil


def glue_left_approximations(seq, approx_a: ApproxSequence, approx_c: ApproxSequence,
                             check_window: int = 2, right_sample: Sequence = ()) -> ApproxSequence:
    """Special left approximation of B from those of A and C.

    seq has attributes a, b, c and maps i : a -> b, q : b -> c (matrices or
    maps with .mat). The middle term is Y_A + Y_C with upper triangular
    structure, found by solving one linear system; the end term is then an
    extension of the two end terms.
    """
    a, b, c = seq.a, seq.b, seq.c
    ib = seq.i.mat.a if hasattr(seq.i, "mat") else np.asarray(seq.i)
    qb = seq.q.mat.a if hasattr(seq.q, "mat") else np.asarray(seq.q)
    if a.dim == 0:
        return _compose_left(approx_c, b, qb)
    if c.dim == 0:
        return _compose_left(approx_a, b, np.asarray(solve_array(ib, np.eye(b.dim, dtype=np.int64), b.p)))
    p = b.p
    # heredity re-check on the ends against the middles' sample
    for s in right_sample:
        for end in (approx_a.c, approx_c.c):
            d = ext_dims_cached(end, s, check_window)
            if any(d[2:check_window + 1]):
                raise HypothesisError("pair is not hereditary on the sample (Ext^2 of an end term)")
    ya, yc = approx_a.b, approx_c.b
    ja, jc = approx_a.i, approx_c.i
    na, nc, nb = ya.dim, yc.dim, b.dim
    nq = na + nc
    alg = (b.algebra if isinstance(b, Module) else b.x.algebra)
    d = alg.dim
    act_a, ft_a = _struct(ya)
    act_c, ft_c = _struct(yc)
    act_b, ft_b = _struct(b)
    is_ext = ft_b is not None
    cat = b.cat if is_ext else None
    m = cat.m if is_ext else 0
    sizes = [d * na * nc, na * m * nc, na * nb]
    offs = np.cumsum([0] + sizes)
    jcq = jc @ qb % p

    def assemble(z):
        dl = z[offs[0]:offs[1]].reshape(d, na, nc)
        ep = z[offs[1]:offs[2]].reshape(na, m, nc)
        u = z[offs[2]:offs[3]].reshape(na, nb)
        act = np.zeros((d, nq, nq), dtype=np.int64)
        act[:, :na, :na] = act_a
        act[:, na:, na:] = act_c
        act[:, :na, na:] = dl
        ft = None
        if is_ext:
            t = np.zeros((nq, m, nq), dtype=np.int64)
            t[:na, :, :na] = ft_a.reshape(na, m, na)
            t[na:, :, na:] = ft_c.reshape(nc, m, nc)
            t[:na, :, na:] = ep
            ft = t.reshape(nq, m * nq)
        phi = np.concatenate([u, jcq], axis=0)
        return act, ft, phi

    mul = alg.mul
    eye_q = np.eye(nq, dtype=np.int64)

    def residual(z):
        act, ft, phi = assemble(z)
        parts = []
        prod = np.einsum("iab,jbc->ijac", act, act)
        lin = np.einsum("ijk,kac->ijac", mul, act)
        parts.append((prod - lin).reshape(-1))
        parts.append((np.einsum("k,kab->ab", alg.unit, act) - eye_q).reshape(-1))
        parts.append(np.einsum("kab,kbc->kac", np.broadcast_to(phi, (d,) + phi.shape), act_b).reshape(-1)
                     - np.einsum("kab,bc->kac", act, phi).reshape(-1))
        parts.append((phi[:na] @ ib - ja).reshape(-1))
        if is_ext:
            bm = cat.M
            im = np.eye(m, dtype=np.int64)
            for k in range(d):
                parts.append((ft @ np.kron(bm.right_act[k], eye_q) - ft @ np.kron(im, act[k])).reshape(-1))
                parts.append((ft @ np.kron(bm.left_act[k], eye_q) - act[k] @ ft).reshape(-1))
            parts.append((ft @ np.kron(im, ft) - ft @ np.kron(cat.mu_tilde, eye_q)).reshape(-1))
            parts.append((phi @ ft_b - ft @ np.kron(im, phi)).reshape(-1))
        return np.concatenate(parts) % p

    nz = int(offs[-1])
    r0 = residual(np.zeros(nz, dtype=np.int64))
    jac = np.zeros((r0.size, nz), dtype=np.int64)
    for t in range(nz):
        e = np.zeros(nz, dtype=np.int64)
        e[t] = 1
        jac[:, t] = (residual(e) - r0) % p
    sol = solve_array(jac, (-r0 % p).reshape(-1, 1), p)
    if sol is None:
        raise AssemblyError("no upper triangular middle term glues the two approximations")
    z = sol.reshape(-1) % p
    if residual(z).any():
        raise AssemblyError("gluing system is not affine on this input")
    act, ft, phi = assemble(z)
    qmod = Module(alg, act, dim=nq, check=False)
    mid = qmod if not is_ext else ExtObject.from_tilde(cat, qmod, ft)
    end, q = cokernel_any(mid, phi)
    out = ApproxSequence(b, mid, end, phi, q, "left", approx_a.middle_family, approx_a.end_family)
    bad = out.exactness_failures()
    if bad:
        raise AssemblyError(f"glued sequence fails: {bad[0]}")
    return out


def _compose_left(ap: ApproxSequence, b, iso: np.ndarray) -> ApproxSequence:
    """Re-base an approximation of an object isomorphic to b (iso : b -> ap.a)."""
    p = b.p
    return ApproxSequence(b, ap.b, ap.c, ap.i @ iso % p, ap.q, "left", ap.middle_family, ap.end_family)


# ---------------------------------------------------------------------------
# constructive completeness in the extension category


@dataclass
class ExtApproximation:
    """Special left approximation of an extension object, with its pieces."""
    sequence: ApproxSequence
    canonical: object           # 0 -> Z(Im f) -> e -> Z(Coker f) -> 0
    pieces: list                # the two beta-block approximations
    beta_checks: list           # beta . F(beta) == 0 for each piece

    def failures(self, **kw) -> list[str]:
        out = self.sequence.failures(**kw)
        if not all(self.beta_checks):
            out.append("beta . F(beta) != 0")
        return out


def beta_block_approx(cat: ExtensionCategory, y: Module, base: ApproxSequence) -> tuple[ApproxSequence, bool]:
    """0 -> Z(Y) -> (Y1 + F(X1), beta) -> T(X1) -> 0 from 0 -> Y -> Y1 -> X1 -> 0."""
    p = cat.p
    y1, x1 = base.b, base.c
    pi1 = ModuleMap(y1, x1, Matrix._wrap(base.q, p), check=False)
    fx1 = cat.F(x1)
    n1, q1, m = y1.dim, fx1.module.dim, cat.m
    mid_mod = direct_sum(y1, fx1.module).module
    nn = n1 + q1
    # beta = [[0, 0], [F(pi1), 0]] lifted to k^m (x) (Y1 + F X1)
    til = np.zeros((nn, m, nn), dtype=np.int64)
    if q1 and n1:
        til[n1:, :, :n1] = (fx1.proj.a @ np.kron(np.eye(m, dtype=np.int64), base.q) % p).reshape(q1, m, n1)
    mid = ExtObject.from_tilde(cat, mid_mod, til.reshape(nn, m * nn))
    # beta . F(beta) = 0 is the object axiom for the middle term
    lhs = mid.ftil @ np.kron(np.eye(m, dtype=np.int64), mid.ftil) % p
    beta_ok = not lhs.any()
    zy = ex.functor_Z(cat, y)
    i = np.concatenate([base.i, np.zeros((q1, y.dim), dtype=np.int64)], axis=0)
    t = ex.functor_T(cat, x1)
    q = np.zeros((t.dim, nn), dtype=np.int64)
    q[:x1.dim, :n1] = base.q
    q[x1.dim:, n1:] = np.eye(q1, dtype=np.int64)
    seq = ApproxSequence(zy, mid, t, i, q, "left", f"U^-1({base.middle_family})", f"T({base.end_family})")
    _ = pi1
    return seq, beta_ok


def check_transport_hypotheses(cat: ExtensionCategory, x_members: Sequence[Module], y_family: Family | None,
                               window: int = 2) -> list[str]:
    """Named failures of L_1 F(X) = 0 (up to window) and F(X) in Y."""
    out = []
    for n, x in enumerate(x_members):
        t = tor_dims(cat.M, x, window)
        if any(t[1:]):
            out.append(f"L_iF(X) != 0 for member {n} (Tor dims {t})")
        if y_family is not None and not y_family.contains(cat.F(x).module):
            out.append(f"F(X) not in {y_family.describe()} for member {n}")
    return out


def special_left_approx_in_ext(e: ExtObject, base_pair: str, right_sample: Sequence = (),
                               window: int = 2, check_hypotheses: bool = True) -> ExtApproximation:
    """Special left U^-1(Y)-approximation of (X, f) glued from the canonical sequence."""
    cat = e.cat
    if not cat.eta_zero:
        raise HypothesisError("constructive completeness is for trivial extensions (eta = 0)")
    can = ex.canonical_sequence(e)
    im_mod, co_mod = can.a.x, can.c.x
    approx_im = special_left_approx_base(im_mod, base_pair)
    approx_co = special_left_approx_base(co_mod, base_pair)
    if check_hypotheses:
        yfam = Projectives() if base_pair == "frobenius" else (All() if base_pair == "proj_all" else Injectives())
        bad = check_transport_hypotheses(cat, [approx_im.c, approx_co.c], yfam, window)
        if bad:
            raise HypothesisError(bad[0])
    piece_a, ok_a = beta_block_approx(cat, im_mod, approx_im)
    piece_c, ok_c = beta_block_approx(cat, co_mod, approx_co)
    glued = glue_left_approximations(can, piece_a, piece_c, check_window=max(2, window), right_sample=right_sample)
    glued.middle_family, glued.end_family = piece_a.middle_family, piece_a.end_family
    return ExtApproximation(glued, can, [piece_a, piece_c], [ok_a, ok_c])


# ---------------------------------------------------------------------------
# Hovey triples


@dataclass
class HoveyTripleReport:
    c: str
    f: str
    w: str
    trivially_cofibrant: PairReport
    trivially_fibrant: PairReport
    thickness: list = field(default_factory=list)
    summands: list = field(default_factory=list)
    identities: dict = field(default_factory=dict)
    refusal: str = ""

    @property
    def ok(self) -> bool:
        return (not self.refusal and self.trivially_cofibrant.is_cotorsion and self.trivially_fibrant.is_cotorsion
                and not self.thickness and not self.summands and all(v == [] for v in self.identities.values()))

    @property
    def hereditary(self) -> bool:
        return self.trivially_cofibrant.hereditary and self.trivially_fibrant.hereditary

    def to_dict(self) -> dict:
        return {
            "C": self.c, "F": self.f, "W": self.w, "ok": self.ok, "hereditary": self.hereditary,
            "refusal": self.refusal,
            "pair_CW_F": self.trivially_cofibrant.to_dict(), "pair_C_FW": self.trivially_fibrant.to_dict(),
            "thickness": [list(t) for t in self.thickness], "summands": [list(t) for t in self.summands],
            "identities": self.identities,
        }


def _thickness(idx: UniverseIndex, w: Family, per_pair: int, middle_cap: int | None) -> tuple[list, list]:
    wm = idx.members(w)
    thick = []
    for s in idx.short_exact(per_pair, middle_cap):
        ins = (wm[s.a], wm[s.b], wm[s.c])
        if sum(ins) == 2:
            thick.append(("two of three in W", s.a, s.b, s.c))
    summ = []
    n = len(idx)
    for i in range(n):
        for j in range(i, n):
            a, b = idx.objects[i], idx.objects[j]
            if a.dim == 0 or b.dim == 0:
                continue
            k = idx.locate(direct_sum_any(a, b))
            if k is not None and wm[k] and not (wm[i] and wm[j]):
                summ.append(("summand of W member not in W", i, j, k))
    return thick, summ


def check_hovey_triple(c: Family, f: Family, w: Family, universe, window: int = 4, per_pair: int = 16,
                       middle_cap: int | None = None) -> HoveyTripleReport:
    idx = as_index(universe)
    cw = Intersection([c, w])
    fw = Intersection([f, w])
    p1 = check_pair(cw, f, idx, window, per_pair, middle_cap)
    p2 = check_pair(c, fw, idx, window, per_pair, middle_cap)
    thick, summ = _thickness(idx, w, per_pair, middle_cap)
    return HoveyTripleReport(c.describe(), f.describe(), w.describe(), p1, p2, thick, summ)


def _disagreements(idx: UniverseIndex, f1: Family, f2: Family) -> list[int]:
    a, b = idx.members(f1), idx.members(f2)
    return [i for i in range(len(idx)) if a[i] != b[i]]


# ---------------------------------------------------------------------------
# transport along the extension


@dataclass
class TransportReport:
    base: PairReport
    perp_u: PairReport                   # (perp U^-1(Y), U^-1(Y))
    delta: Optional[PairReport]          # (Delta(X), Delta(X) perp), F^2 = 0
    t_pair: Optional[PairReport]         # (T(X), U^-1(Y)) when Ext^1(X, F X) = 0
    hypotheses: dict
    containment: list = field(default_factory=list)   # objects of Delta(X) perp outside U^-1(Y)
    delta_vs_t: Optional[list] = None                 # disagreements of Delta(X) and T(X)
    lemma_t_perp: list = field(default_factory=list)  # T(X) perp vs U^-1(X perp)
    families: dict = field(default_factory=dict)

    @property
    def heredity_agrees(self) -> bool:
        ok = self.base.hereditary == self.perp_u.hereditary
        if self.delta is not None and self.hypotheses.get("tor_vanishes"):
            ok = ok and self.base.hereditary == self.delta.hereditary
        return ok

    @property
    def ok(self) -> bool:
        parts = [self.base.is_cotorsion, self.perp_u.is_cotorsion, self.heredity_agrees, not self.containment,
                 not self.lemma_t_perp]
        if self.delta is not None:
            parts.append(self.delta.is_cotorsion)
        if self.t_pair is not None:
            parts.append(self.t_pair.is_cotorsion)
            parts.append(not self.delta_vs_t)
        return all(parts)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok, "heredity_agrees": self.heredity_agrees, "hypotheses": self.hypotheses,
            "base": self.base.to_dict(), "perp_u": self.perp_u.to_dict(),
            "delta": None if self.delta is None else self.delta.to_dict(),
            "t_pair": None if self.t_pair is None else self.t_pair.to_dict(),
            "containment": self.containment, "delta_vs_t": self.delta_vs_t,
            "lemma_t_perp": self.lemma_t_perp,
        }


def transport_pair(cat: ExtensionCategory, x: Family, y: Family, universe, base_universe,
                   window: int = 4, tor_window: int = 2, per_pair: int = 16,
                   middle_cap: int | None = None, require_tor: bool = True) -> TransportReport:
    """Check the transported pairs of a base pair (x, y) on an enumerated universe."""
    idx = as_index(universe)
    bidx = as_index(base_universe)
    xs = [o for o, inx in zip(bidx.objects, bidx.members(x)) if inx]
    tor_bad = check_transport_hypotheses(cat, xs, None, tor_window)
    if tor_bad and require_tor:
        raise HypothesisError(f"L_1F(X) = 0 fails: {tor_bad[0]}")
    ext_fx = all(ext_dims_cached(o, cat.F(o).module, 1)[1] == 0 for o in xs)
    fx_in_y = all(y.contains(cat.F(o).module) for o in xs)
    hyp = {"tor_vanishes": not tor_bad, "ext1_x_fx_zero": ext_fx, "f_x_in_y": fx_in_y,
           "f_squared_zero": bool(cat.f2zero), "eta_zero": bool(cat.eta_zero)}
    base = check_pair(x, y, bidx, window, per_pair, middle_cap)
    uy = Memo(UInvOf(y))
    left_u = Memo(LeftPerpOf(uy, sample=idx.objects, window=1))
    perp_u = check_pair(left_u, uy, idx, window, per_pair, middle_cap)
    fams = {"U^-1(Y)": uy, "perp U^-1(Y)": left_u}
    delta_rep = t_rep = None
    containment: list = []
    dvt = None
    if cat.f2zero and cat.eta_zero:
        dx = Memo(DeltaOf(x))
        dperp = Memo(RightPerpOf(dx, sample=idx.objects, window=1))
        delta_rep = check_pair(dx, dperp, idx, window, per_pair, middle_cap)
        fams.update({"Delta(X)": dx, "Delta(X) perp": dperp})
        if not tor_bad:
            dm, um = idx.members(dperp), idx.members(uy)
            containment = [i for i in range(len(idx)) if dm[i] and not um[i]]
        if ext_fx:
            tx = Memo(TImageOf(x))
            fams["T(X)"] = tx
            dvt = _disagreements(idx, dx, tx)
            if not tor_bad:
                t_rep = check_pair(tx, uy, idx, window, per_pair, middle_cap)
    lemma = []
    if not tor_bad:
        tx = fams.get("T(X)") or Memo(TImageOf(x))
        tperp = RightPerpOf(tx, sample=idx.objects, window=1)
        lemma = _disagreements(idx, tperp, uy)
    return TransportReport(base, perp_u, delta_rep, t_rep, hyp, containment, dvt, lemma, fams)


def transport_hovey_triple(cat: ExtensionCategory, c: Family, f: Family, w: Family, universe, base_universe,
                           window: int = 4, tor_window: int = 2, per_pair: int = 16,
                           middle_cap: int | None = None) -> HoveyTripleReport:
    """(T(C), U^-1(F), U^-1(W)) with the two identities from the proof."""
    idx = as_index(universe)
    bidx = as_index(base_universe)
    tc, uf, uw = Memo(TImageOf(c)), Memo(UInvOf(f)), Memo(UInvOf(w))
    cs = [o for o, inc in zip(bidx.objects, bidx.members(c)) if inc]
    fw = Intersection([f, w])
    bad = check_transport_hypotheses(cat, cs, fw, tor_window)
    if bad or not (cat.f2zero and cat.eta_zero):
        why = bad[0] if bad else "needs F^2 = 0 and eta = 0"
        empty = PairReport(tc.describe(), uf.describe(), len(idx))
        return HoveyTripleReport(tc.describe(), uf.describe(), uw.describe(), empty, empty,
                                 refusal=f"hypothesis violated: {why}")
    rep = check_hovey_triple(tc, uf, uw, idx, window, per_pair, middle_cap)
    rep.identities = {
        "T(C) & U^-1(W) = T(C & W)": _disagreements(idx, Intersection([tc, uw]), TImageOf(Intersection([c, w]))),
        "U^-1(F) & U^-1(W) = U^-1(F & W)": _disagreements(idx, Intersection([uf, uw]), UInvOf(fw)),
    }
    return rep


# ---------------------------------------------------------------------------
# contravariant finiteness


@dataclass
class FinitenessWitness:
    target: int
    x0_dim: int
    is_morphism: bool
    factorization_failures: list

    @property
    def ok(self) -> bool:
        return self.is_morphism and not self.factorization_failures


def right_omega_approx(gens: Sequence[Module], a: Module) -> tuple[Module, ModuleMap]:
    """Universal map from a sum of generator copies, one per hom basis vector."""
    parts, cols = [], []
    for g in gens:
        hb = hom_basis_array(g, a)
        for t in range(hb.shape[1]):
            parts.append(g)
            cols.append(hb[:, t].reshape(a.dim, g.dim))
    if not parts:
        z = Module(a.algebra, [], dim=0, check=False)
        return z, ModuleMap(z, a, Matrix.zeros(a.dim, 0, a.p), check=False)
    x0 = direct_sum(*parts).module
    mat = np.concatenate(cols, axis=1) % a.p
    return x0, ModuleMap(x0, a, Matrix._wrap(mat, a.p), check=False)


def transport_contravariant_finiteness(cat: ExtensionCategory, omega_gens: Sequence[Module], universe,
                                       omega_prime: Family) -> tuple[list[FinitenessWitness], dict]:
    """For each target (A, alpha): (f0, alpha F(f0)) : T(X0) -> (A, alpha) and its factorization check."""
    idx = as_index(universe)
    om = idx.members(omega_prime)
    sources = [idx.objects[i] for i in range(len(idx)) if om[i]]
    out = []
    p = cat.p
    for t, e in enumerate(idx.objects):
        x0, f0 = right_omega_approx(omega_gens, e.x)
        tx0 = ex.functor_T(cat, x0)
        fxo = cat.F(x0)
        second = e.ftil @ np.kron(np.eye(cat.m, dtype=np.int64), f0.mat.a) % p @ fxo.section.a % p
        mat = np.concatenate([f0.mat.a, second], axis=1) % p
        phi = ex.ExtMap(tx0, e, Matrix._wrap(mat, p), check=False)
        fails = []
        for si, w in zip([i for i in range(len(idx)) if om[i]], sources):
            target_basis = ex.hom_ext_basis(w, e)
            if target_basis.shape[1] == 0:
                continue
            through = ex.hom_ext_basis(w, tx0)
            img = [(mat @ through[:, c].reshape(tx0.dim, w.dim) % p).reshape(-1) for c in range(through.shape[1])]
            img_arr = np.array(img, dtype=np.int64).T if img else np.zeros((target_basis.shape[0], 0), dtype=np.int64)
            if rank_array(np.concatenate([img_arr, target_basis], axis=1), p) != rank_array(img_arr, p):
                fails.append(si)
        out.append(FinitenessWitness(t, x0.dim, phi.is_morphism(), fails))
    return out, {}


# ---------------------------------------------------------------------------
# Gorenstein window report


@dataclass
class GorensteinReport:
    window: int
    projdims: list           # per object, None means >= window
    injdims: list
    gp: list                 # indices
    gp_reasons: dict
    projectives: list
    injectives: list
    spli: Optional[int]
    silp: Optional[int]
    delta: Optional[list] = None
    six_way: dict = field(default_factory=dict)
    inconclusive: bool = False

    @property
    def six_way_agree(self) -> bool:
        vals = list(self.six_way.values())
        return all(v == vals[0] for v in vals) if vals else True

    @property
    def gp_equals_delta(self) -> Optional[bool]:
        return None if self.delta is None else self.gp == self.delta

    def to_dict(self) -> dict:
        return {
            "criterion": f"window-{self.window}", "projdims": self.projdims, "injdims": self.injdims,
            "gp": self.gp, "delta_all": self.delta, "projectives": self.projectives,
            "injectives": self.injectives, "spli": self.spli, "silp": self.silp,
            "six_way": self.six_way, "six_way_agree": self.six_way_agree,
            "gp_equals_delta": self.gp_equals_delta, "inconclusive": self.inconclusive,
            "gp_reasons": {str(k): v for k, v in sorted(self.gp_reasons.items())},
        }


def _is_simple_module(x: Module) -> bool:
    from .modules import submodule_span
    if x.dim == 0:
        return False
    p = x.p
    for v in itertools.product(range(p), repeat=x.dim):
        va = np.array(v, dtype=np.int64).reshape(-1, 1)
        if va.any() and rank_array(submodule_span(x, va), p) < x.dim:
            return False
    return True


def simple_objects(universe) -> list:
    """Simple members: simple modules, or Z(S) for extension objects with F^2 = 0."""
    idx = as_index(universe)
    out = []
    for o in idx.objects:
        base = o if isinstance(o, Module) else (o.x if isinstance(o, ExtObject) else ex.phi_inverse(o).x)
        if not _is_simple_module(base):
            continue
        if isinstance(o, Module):
            out.append(o)
        else:
            e = o if isinstance(o, ExtObject) else ex.phi_inverse(o)
            if not e.cat.f2zero:
                raise HypothesisError("simples of the extension category are only read off when F^2 = 0")
            if not e.ftil.any():
                out.append(o)
    return out


def category_projectives(obj) -> list:
    """Indecomposable projectives of the category an object lives in: Ae, or T(Ae)."""
    from .modules import indecomposable_projective, primitive_idempotents
    if isinstance(obj, Module):
        a = obj.algebra
        return [indecomposable_projective(a, e)[0] for e in primitive_idempotents(a)]
    e0 = obj if isinstance(obj, ExtObject) else ex.phi_inverse(obj)
    cat = e0.cat
    out = [ex.functor_T(cat, pm) for pm in category_projectives(Module(cat.base, [], dim=0, check=False))]
    return out if isinstance(obj, ExtObject) else [ex.phi_isomorphism(o) for o in out]


def category_injectives(obj) -> list:
    """Indecomposable injectives: D(eA), or H(D(eA)) read back through Phi."""
    from .modules import dual_module, indecomposable_projective, primitive_idempotents
    if isinstance(obj, Module):
        a = obj.algebra
        out = []
        for e in primitive_idempotents(a.op):
            pe = indecomposable_projective(a.op, e)[0]
            d = dual_module(pe)
            out.append(Module(a, d.act, dim=d.dim, check=False))
        return out
    e0 = obj if isinstance(obj, ExtObject) else ex.phi_inverse(obj)
    cat = e0.cat
    hs = [ex.functor_H(cat, i) for i in category_injectives(Module(cat.base, [], dim=0, check=False))]
    return hs if isinstance(obj, CoextObject) else [ex.phi_inverse(h) for h in hs]


def _dim_bound(ext_rows: list[list[int]], window: int) -> Optional[int]:
    # smallest d < window with Ext^{d+1}(-, simples) = 0
    for d in range(window):
        if all(r[d + 1] == 0 for r in ext_rows):
            return d
    return None


def _min_left_approx(obj, gens: Sequence) -> tuple[list, list]:
    """(generator index, map matrix) list for a small left add(gens)-approximation of obj."""
    p = obj.p
    maps = []
    for gi, g in enumerate(gens):
        hb = hom_basis_any(obj, g)
        for c in range(hb.shape[1]):
            maps.append((gi, hb[:, c].reshape(g.dim, obj.dim)))
    ends = {(a, b): hom_basis_any(gens[a], gens[b]) for a in range(len(gens)) for b in range(len(gens))}

    def span_rank(sel):
        blocks = []
        for tgt in range(len(gens)):
            cols = []
            for gi, mp in sel:
                hb = ends[(gi, tgt)]
                for c in range(hb.shape[1]):
                    psi = hb[:, c].reshape(gens[tgt].dim, gens[gi].dim)
                    cols.append((psi @ mp % p).reshape(-1))
            blocks.append(rank_array(np.array(cols, dtype=np.int64).T, p) if cols else 0)
        return tuple(blocks)

    full = span_rank(maps)
    sel = list(maps)
    t = 0
    while t < len(sel):
        trial = sel[:t] + sel[t + 1:]
        if span_rank(trial) == full:
            sel = trial
        else:
            t += 1
    return sel, gens


def gp_window_test(obj, gens: Sequence, window: int) -> tuple[bool, str]:
    """Gorenstein projective test, window-N: Ext vanishing plus N canonical cosyzygy steps."""
    for g in gens:
        d = ext_dims_cached(obj, g, window)
        if any(d[1:window + 1]):
            return False, "Ext^i(-, projective) != 0 in the window"
    cur = obj
    for step in range(window):
        if cur.dim == 0:
            return True, f"cosyzygy vanished at step {step}"
        sel, _ = _min_left_approx(cur, gens)
        if not sel:
            return False, f"no maps to projectives at step {step}"
        target = gens[sel[0][0]]
        for gi, _mp in sel[1:]:
            target = direct_sum_any(target, gens[gi])
        mat = np.concatenate([mp for _, mp in sel], axis=0) % cur.p
        if rank_array(mat, cur.p) != cur.dim:
            return False, f"left approximation by projectives is not mono at step {step}"
        cur, _ = cokernel_any(target, mat)
    return True, f"window-{window} coresolution by projectives found"


def gorenstein_window_report(universe, window: int = 4, projective_gens: Sequence | None = None,
                             simples: Sequence | None = None) -> GorensteinReport:
    if window < 2:
        raise ValueError("window must be at least 2")
    idx = as_index(universe)
    objs = idx.objects
    if not objs:
        raise ValueError("empty universe")
    simples = simple_objects(idx) if simples is None else list(simples)
    gens = category_projectives(objs[0]) if projective_gens is None else list(projective_gens)
    inconclusive = not simples or not gens

    def pd(o):
        return _dim_bound([ext_dims_cached(o, s, window) for s in simples], window)

    def idim(o):
        return _dim_bound([ext_dims_cached(s, o, window) for s in simples], window)

    pds = [pd(o) for o in objs]
    ids = [idim(o) for o in objs]
    projs = [i for i, o in enumerate(objs) if is_projective_any(o)]
    injs = [i for i, o in enumerate(objs) if is_injective_any(o)]
    # spli / silp over the indecomposable injectives / projectives of the whole category
    inj_pd = [pd(o) for o in category_injectives(objs[0])]
    proj_id = [idim(o) for o in gens]
    spli = None if any(v is None for v in inj_pd) else max(inj_pd, default=0)
    silp = None if any(v is None for v in proj_id) else max(proj_id, default=0)
    gp, reasons = [], {}
    for i, o in enumerate(objs):
        ok, why = gp_window_test(o, gens, window)
        reasons[i] = why
        if ok:
            gp.append(i)
    rep = GorensteinReport(window, pds, ids, gp, reasons, projs, injs, spli, silp, inconclusive=inconclusive)
    if objs and isinstance(objs[0], ExtObject):
        rep.delta = [i for i, inx in enumerate(idx.members(DeltaOf(All()))) if inx]
        up = idx.members(UInvOf(Projectives()))
        ui = idx.members(UInvOf(Injectives()))
        rep.six_way = {
            "P<inf": [i for i in range(len(objs)) if pds[i] is not None],
            "P<=1": [i for i in range(len(objs)) if pds[i] is not None and pds[i] <= 1],
            "U^-1(P_B)": [i for i in range(len(objs)) if up[i]],
            "U^-1(I_B)": [i for i in range(len(objs)) if ui[i]],
            "I<=1": [i for i in range(len(objs)) if ids[i] is not None and ids[i] <= 1],
            "I<inf": [i for i in range(len(objs)) if ids[i] is not None],
        }
    return rep
