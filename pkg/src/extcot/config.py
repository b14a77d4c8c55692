"""Config files: a TOML document naming algebras, bimodules, universes, families and tasks.

The schema is documented in docs/config.md. Everything is resolved lazily
by name, so a config only pays for what its tasks use.
"""

from __future__ import annotations

import hashlib
import re
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

from . import extension as ex
from .algebra import Algebra, QuiverPresentation, direct_product, dual_numbers, field_algebra, from_quiver, opposite
from .extension import ExtensionCategory, ExtObject
from .families import (AddClosure, All, DeltaOf, Family, Injectives, Intersection, LeftPerpOf, NablaOf,
                       Predicate, Projectives, RightPerpOf, TImageOf, UInvOf)
from .functors import (Bimodule, BimoduleMul, bimodule_sum, embed_bimodule, regular_bimodule,
                       tensor_k_bimodule, zero_bimodule)
from .linalg import rank_array
from .modules import Module, enumerate_modules, regular_module
from .rings import MoritaContextSpec, morita_context_ring, trivial_extension_ring


class ConfigError(ValueError):
    """Malformed or unresolvable config; carries a line/column when known."""

    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(msg + where)


_POS = re.compile(r"\(at line (\d+), column (\d+)\)")


def _locate(text: str, needle: str) -> tuple[int | None, int | None]:
    for n, line in enumerate(text.splitlines(), 1):
        c = line.find(needle)
        if c >= 0:
            return n, c + 1
    return None, None


BUNDLED = ("a2_transport", "t2_lambda0", "frobenius_swap", "frobenius_free")


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("extcot") / "configs" / f"{name}.toml"))


def resolve_path(arg: str) -> Path:
    p = Path(arg)
    if p.exists():
        return p
    if arg in BUNDLED or bundled_path(arg).exists():
        return bundled_path(arg)
    raise ConfigError(f"no config file or bundled config named {arg!r}")


@dataclass
class Config:
    text: str
    data: dict
    path: str = "<string>"
    window_override: int | None = None
    cap_override: int | None = None
    _cache: dict = field(default_factory=dict)

    # -- basics

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.text.encode()).hexdigest()

    @property
    def meta(self) -> dict:
        return self.data.get("meta", {})

    @property
    def name(self) -> str:
        return str(self.meta.get("name", Path(self.path).stem))

    @property
    def p(self) -> int:
        if "field" not in self.meta:
            raise self.error("meta.field (the prime modulus) is required", "field")
        return int(self.meta["field"])

    @property
    def window(self) -> int:
        return self.window_override or int(self.meta.get("ext_window", 4))

    @property
    def cap(self) -> int | None:
        if self.cap_override is not None:
            return self.cap_override
        c = self.meta.get("cap")
        return None if c is None else int(c)

    @property
    def tasks(self) -> list[dict]:
        t = self.data.get("tasks", [])
        if not isinstance(t, list):
            raise self.error("tasks must be an array of tables", "tasks")
        return t

    def error(self, msg: str, needle: str | None = None) -> ConfigError:
        line, col = _locate(self.text, needle) if needle else (None, None)
        return ConfigError(msg, line, col)

    def _section(self, sec: str, name: str) -> dict:
        tbl = self.data.get(sec, {})
        if name not in tbl:
            raise self.error(f"unresolved name {name!r} in [{sec}]", name)
        return tbl[name]

    def _cached(self, kind: str, name: str, build):
        k = (kind, name)
        if k not in self._cache:
            self._cache[k] = build()
        return self._cache[k]

    # -- algebras

    def algebra(self, name: str) -> Algebra:
        return self._cached("algebra", name, lambda: self._build_algebra(name, self._section("algebras", name)))

    def _build_algebra(self, name: str, spec: dict) -> Algebra:
        kind = spec.get("kind")
        p = self.p
        if kind == "field":
            return field_algebra(p)
        if kind == "dual_numbers":
            return dual_numbers(p)
        if kind == "quiver":
            arrows = [(int(a[0]), int(a[1]), str(a[2])) for a in spec.get("arrows", [])]
            rels = [list(r) for r in spec.get("relations", [])]
            q = QuiverPresentation(int(spec["vertices"]), arrows, rels, int(spec.get("bound", 1)))
            return from_quiver(q, p)
        if kind == "structure":
            mul = np.array(spec["mul"], dtype=np.int64)
            unit = spec["unit"]
            return Algebra(p, mul, unit, spec.get("labels"))
        if kind == "product":
            return direct_product(*[self.algebra(f) for f in spec["factors"]])
        if kind == "opposite":
            return opposite(self.algebra(spec["of"]))
        if kind == "trivial_extension":
            m = self.bimodule(spec["bimodule"])
            mu = self._mul(m, spec.get("mul_tilde"))
            return trivial_extension_ring(self.algebra(spec["base"]), m, mu)
        if kind == "morita":
            ms = MoritaContextSpec(self.algebra(spec["a"]), self.algebra(spec["b"]),
                                   self.bimodule(spec["m"]), self.bimodule(spec["n"]))
            return morita_context_ring(ms)
        if kind == "ring_of":
            cat = self.category(spec["category"])
            return trivial_extension_ring(cat.base, cat.M, cat.mul)
        raise self.error(f"algebra {name!r}: unknown kind {kind!r}", name)

    # -- bimodules and categories

    def bimodule(self, name: str) -> Bimodule:
        return self._cached("bimodule", name, lambda: self._build_bimodule(name, self._section("bimodules", name)))

    def _build_bimodule(self, name: str, spec: dict) -> Bimodule:
        kind = spec.get("kind")
        if kind == "regular":
            return regular_bimodule(self.algebra(spec["algebra"]))
        if kind == "zero":
            return zero_bimodule(self.algebra(spec["left"]), self.algebra(spec.get("right", spec["left"])))
        if kind == "tensor_k":
            return tensor_k_bimodule(self.algebra(spec["left"]), self.algebra(spec["right"]))
        if kind == "embed":
            lp = self.algebra(spec["left_into"])
            rp = self.algebra(spec.get("right_into", spec["left_into"]))
            return embed_bimodule(self.bimodule(spec["of"]), lp, int(spec["left_index"]), rp, int(spec["right_index"]))
        if kind == "sum":
            return bimodule_sum(*[self.bimodule(b) for b in spec["parts"]])
        if kind == "explicit":
            return Bimodule(self.algebra(spec["left"]), self.algebra(spec["right"]),
                            spec.get("left_act", []), spec.get("right_act", []), dim=spec.get("dim"))
        raise self.error(f"bimodule {name!r}: unknown kind {kind!r}", name)

    def _mul(self, m: Bimodule, tilde) -> Optional[BimoduleMul]:
        if tilde is None:
            return None
        return BimoduleMul(m, np.array(tilde, dtype=np.int64))

    def category(self, name: str) -> ExtensionCategory:
        def build():
            spec = self._section("categories", name)
            m = self.bimodule(spec["bimodule"])
            return ExtensionCategory(m, self._mul(m, spec.get("mul_tilde")), name=name)
        return self._cached("category", name, build)

    # -- universes and named objects

    def universe(self, name: str) -> list:
        return self._cached("universe", name, lambda: self._build_universe(name, self._section("universes", name)))

    def _build_universe(self, name: str, spec: dict) -> list:
        kind = spec.get("kind", "modules")
        if kind == "modules":
            return enumerate_modules(self.algebra(spec["algebra"]), int(spec["max_dim"]), cap=self.cap,
                                     component_max=spec.get("component_max"))
        if kind == "ext":
            return ex.enumerate_ext_objects(self.category(spec["category"]), self.universe(spec["base"]), cap=self.cap)
        if kind == "list":
            return [self.obj(o) for o in spec["objects"]]
        raise self.error(f"universe {name!r}: unknown kind {kind!r}", name)

    def obj(self, ref) -> Any:
        """A module or extension object given by name or inline table."""
        if isinstance(ref, str):
            if ref in self.data.get("modules", {}):
                return self._cached("module", ref, lambda: self._build_obj(self.data["modules"][ref], ref))
            if ref in self.data.get("objects", {}):
                return self._cached("object", ref, lambda: self._build_obj(self.data["objects"][ref], ref))
            raise self.error(f"unresolved module or object {ref!r}", ref)
        if isinstance(ref, dict):
            return self._build_obj(ref, "<inline>")
        raise self.error(f"bad object reference {ref!r}")

    def _build_obj(self, spec: dict, name: str):
        if "universe" in spec:
            u = self.universe(spec["universe"])
            i = int(spec["index"])
            if not 0 <= i < len(u):
                raise self.error(f"{name}: index {i} outside universe {spec['universe']!r} (size {len(u)})", name)
            return u[i]
        kind = spec.get("kind", "action")
        if kind == "regular":
            return regular_module(self.algebra(spec["algebra"]))
        if kind == "action":
            a = self.algebra(spec["algebra"])
            return Module(a, spec.get("action", []), dim=spec.get("dim"))
        if kind in ("pair", "T", "Z"):
            cat = self.category(spec["category"])
            x = self.obj(spec["module"])
            if kind == "T":
                return ex.functor_T(cat, x)
            if kind == "Z":
                return ex.functor_Z(cat, x)
            return ExtObject(cat, x, np.array(spec["f"], dtype=np.int64).reshape(x.dim, -1) if x.dim else
                             np.zeros((0, cat.F(x).module.dim), dtype=np.int64))
        raise self.error(f"object {name!r}: unknown kind {kind!r}", name)

    # -- families

    def family(self, ref) -> Family:
        if isinstance(ref, str):
            low = ref.lower()
            if low == "all":
                return All()
            if low in ("proj", "projectives"):
                return Projectives()
            if low in ("inj", "injectives"):
                return Injectives()
            return self._cached("family", ref, lambda: self._build_family(self._section("families", ref), ref))
        if isinstance(ref, dict):
            return self._build_family(ref, "<inline>")
        raise self.error(f"bad family reference {ref!r}")

    def _build_family(self, spec: dict, name: str) -> Family:
        kind = spec.get("kind")
        if kind in ("all", "projectives", "injectives"):
            return self.family(kind)
        if kind == "add":
            return AddClosure([self.obj(g) for g in spec["generators"]])
        if kind == "uinv":
            return UInvOf(self.family(spec["of"]))
        if kind == "delta":
            return DeltaOf(self.family(spec["of"]))
        if kind == "nabla":
            return NablaOf(self.family(spec["of"]))
        if kind == "t_image":
            return TImageOf(self.family(spec["of"]))
        if kind == "intersection":
            return Intersection([self.family(f) for f in spec["parts"]])
        if kind in ("left_perp", "right_perp"):
            cls = LeftPerpOf if kind == "left_perp" else RightPerpOf
            sample = self.universe(spec["sample"]) if "sample" in spec else None
            return cls(self.family(spec["of"]), sample=sample, window=int(spec.get("window", 1)),
                       start=int(spec.get("start", 1)))
        if kind == "f_mono":
            return Predicate("f mono", lambda e: rank_array(e.f.a, e.p) == e.f.cols)
        raise self.error(f"family {name!r}: unknown kind {kind!r}", name)


def loads(text: str, path: str = "<string>") -> Config:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        m = _POS.search(str(err))
        msg = _POS.sub("", str(err)).strip()
        if m:
            raise ConfigError(f"parse error: {msg}", int(m.group(1)), int(m.group(2))) from None
        raise ConfigError(f"parse error: {msg}") from None
    cfg = Config(text, data, path)
    if "meta" not in data:
        raise ConfigError("missing [meta] table")
    _ = cfg.p
    for n, t in enumerate(cfg.tasks):
        if not isinstance(t, dict) or "type" not in t:
            raise cfg.error(f"task {n + 1} has no type", "[[tasks]]")
    return cfg


def load(path: str | Path) -> Config:
    p = resolve_path(str(path))
    return loads(p.read_text(encoding="utf-8"), str(p))
