"""Task execution and report assembly for config files."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from . import __version__
from . import extension as ex
from .algebra import validate
from .config import Config, ConfigError, load
from .cotorsion import (BASE_PAIRS, UniverseIndex, gorenstein_window_report, special_left_approx_base,
                        special_left_approx_in_ext, special_right_approx_base, transport_hovey_triple,
                        transport_pair)
from .extension import ExtObject, HypothesisError
from .families import All, Injectives, Projectives, TImageOf, UInvOf, ext_dims_cached
from .modules import EnumerationBudgetExceeded, Module, ext_dim_hom_complex, tor_dims
from .rings import lambda_to_pair, pair_to_lambda, trivial_extension_ring

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
MAX_WITNESSES = 20


@dataclass
class Outcome:
    status: str
    summary: str
    details: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)


def _ref(universe: str, i: int) -> dict:
    return {"universe": universe, "index": int(i)}


def _ext_recheck(uname: str, i: int, j: int, degree: int, expect: int) -> dict:
    return {"type": "ext", "from": _ref(uname, i), "to": _ref(uname, j), "degree": degree, "expect": expect}


def _plain(obj):
    """JSON-safe copy (numpy scalars and tuples to plain values)."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return obj.item()
    return obj


# ---------------------------------------------------------------------------
# task implementations


def task_validate(cfg: Config, t: dict) -> Outcome:
    if "algebra" in t:
        rep = validate(cfg.algebra(t["algebra"]))
        wit = [{"kind": k, "indices": list(idx), "text": txt, "recheck": {"type": "validate", "algebra": t["algebra"]}}
               for k, idx, txt in rep.failures[:MAX_WITNESSES]]
        if rep.ok:
            return Outcome(PASS, f"algebra {t['algebra']} is associative and unital")
        return Outcome(FAIL, f"algebra {t['algebra']}: {len(rep.failures)} violated laws", {"violations": len(rep.failures)}, wit)
    if "bimodule" in t:
        bad = cfg.bimodule(t["bimodule"]).failures()
        if not bad:
            return Outcome(PASS, f"bimodule {t['bimodule']} satisfies the bimodule axioms")
        return Outcome(FAIL, f"bimodule {t['bimodule']}: {bad[0]}", {}, [{"text": b} for b in bad[:MAX_WITNESSES]])
    if "category" in t:
        cat = cfg.category(t["category"])
        bad = [] if cat.mul is None else cat.mul.failures()
        if bad:
            return Outcome(FAIL, f"category {t['category']}: {bad[0]}", {}, [{"text": b} for b in bad[:MAX_WITNESSES]])
        return Outcome(PASS, f"category {t['category']} is well defined",
                       {"f_squared_zero": bool(cat.f2zero), "eta_zero": bool(cat.eta_zero)})
    raise ConfigError("validate task needs algebra, bimodule or category")


def task_ext(cfg: Config, t: dict) -> Outcome:
    a, b = cfg.obj(t["from"]), cfg.obj(t["to"])
    deg = int(t.get("degree", 1))
    dims = ext_dims_cached(a, b, deg)
    val = dims[deg]
    det = {"dims": dims, "value": val}
    ok = True
    if t.get("oracle", False):
        if isinstance(a, Module):
            orc = ext_dim_hom_complex(deg, a, b)
        else:
            orc = ex.ext_dim_ext_hom_complex(deg, a, b)
        det["oracle"] = orc
        ok = ok and orc == val
    if "expect" in t:
        det["expect"] = int(t["expect"])
        ok = ok and val == int(t["expect"])
    summary = f"Ext^{deg} has dimension {val}"
    if ok:
        return Outcome(PASS, summary, det)
    return Outcome(FAIL, summary + " (mismatch)", det, [{"recheck": dict(t)}])


def task_tor(cfg: Config, t: dict) -> Outcome:
    top = int(t.get("top", 4))
    dims = tor_dims(cfg.bimodule(t["bimodule"]), cfg.obj(t["module"]), top)
    det = {"dims": dims}
    if "expect" in t and list(t["expect"]) != dims:
        det["expect"] = list(t["expect"])
        return Outcome(FAIL, f"Tor dims {dims} differ from expected", det, [{"recheck": dict(t)}])
    return Outcome(PASS, f"Tor dims {dims}", det)


def _pair_summary(rep) -> dict:
    d = rep.to_dict()
    for k in ("orthogonality", "maximality", "heredity_ext", "heredity_closure", "completeness"):
        d[k] = d[k][:MAX_WITNESSES]
    return d


def _pair_witnesses(rep, uname: str, label: str) -> list:
    wit = []
    for i, j, dim in rep.orthogonality[:MAX_WITNESSES]:
        wit.append({"pair": label, "failure": "Ext^1 between classes", "objects": [i, j], "ext1": dim,
                    "recheck": _ext_recheck(uname, i, j, 1, 0)})
    for side, u in rep.maximality[:MAX_WITNESSES]:
        wit.append({"pair": label, "failure": f"maximality ({side})", "objects": [u]})
    for i, j, deg, dim in rep.heredity_ext[:MAX_WITNESSES]:
        wit.append({"pair": label, "failure": f"Ext^{deg} between classes", "objects": [i, j], "dim": dim,
                    "recheck": _ext_recheck(uname, i, j, deg, 0)})
    return wit


def task_transport_pair(cfg: Config, t: dict) -> Outcome:
    cat = cfg.category(t["category"])
    uname, bname = t["universe"], t["base_universe"]
    idx = UniverseIndex(cfg.universe(uname))
    bidx = UniverseIndex(cfg.universe(bname))
    x, y = cfg.family(t["left"]), cfg.family(t["right"])
    try:
        rep = transport_pair(cat, x, y, idx, bidx, window=int(t.get("window", cfg.window)),
                             tor_window=int(t.get("tor_window", 2)))
    except HypothesisError as err:
        return Outcome(FAIL, f"hypothesis refused: {err}", {}, [{"refusal": str(err)}])
    det = {"hypotheses": rep.hypotheses, "heredity_agrees": rep.heredity_agrees, "containment": rep.containment,
           "delta_vs_t": rep.delta_vs_t, "lemma_t_perp": rep.lemma_t_perp,
           "base": _pair_summary(rep.base), "perp_u": _pair_summary(rep.perp_u),
           "delta": None if rep.delta is None else _pair_summary(rep.delta),
           "t_pair": None if rep.t_pair is None else _pair_summary(rep.t_pair), "universe_size": len(idx)}
    wit = _pair_witnesses(rep.perp_u, uname, "perp U^-1(Y)")
    if rep.delta is not None:
        wit += _pair_witnesses(rep.delta, uname, "Delta(X)")
    if rep.t_pair is not None:
        wit += _pair_witnesses(rep.t_pair, uname, "T(X)")
    for u in rep.containment[:MAX_WITNESSES]:
        wit.append({"failure": "in Delta(X) perp but not in U^-1(Y)", "objects": [u]})
    for u in (rep.delta_vs_t or [])[:MAX_WITNESSES]:
        wit.append({"failure": "Delta(X) and T(X) disagree", "objects": [u]})
    desc = f"({x.describe()}, {y.describe()}) over {len(idx)} objects"
    if rep.ok:
        return Outcome(PASS, f"transported pairs of {desc} pass", det)
    return Outcome(FAIL, f"transported pairs of {desc} fail", det, wit[:MAX_WITNESSES])


def task_transport_hovey(cfg: Config, t: dict) -> Outcome:
    cat = cfg.category(t["category"])
    uname = t["universe"]
    idx = UniverseIndex(cfg.universe(uname))
    bidx = UniverseIndex(cfg.universe(t["base_universe"]))
    c, f, w = cfg.family(t["c"]), cfg.family(t["f"]), cfg.family(t["w"])
    rep = transport_hovey_triple(cat, c, f, w, idx, bidx, window=int(t.get("window", cfg.window)))
    expect = t.get("expect", "pass")
    det = {"refusal": rep.refusal, "ok": rep.ok, "hereditary": rep.hereditary, "identities": rep.identities,
           "thickness": rep.thickness[:MAX_WITNESSES], "summands": rep.summands[:MAX_WITNESSES]}
    if not rep.refusal:
        det["pair_CW_F"] = _pair_summary(rep.trivially_cofibrant)
        det["pair_C_FW"] = _pair_summary(rep.trivially_fibrant)
    if expect == "refused":
        if rep.refusal:
            return Outcome(PASS, f"refused as expected: {rep.refusal}", det)
        return Outcome(FAIL, "expected a hypothesis refusal, but the hypotheses hold", det)
    if rep.ok:
        return Outcome(PASS, f"transported triple is a {'hereditary ' if rep.hereditary else ''}Hovey triple", det)
    wit = []
    if rep.refusal:
        wit.append({"refusal": rep.refusal})
    else:
        wit += _pair_witnesses(rep.trivially_cofibrant, uname, "(C & W, F)")
        wit += _pair_witnesses(rep.trivially_fibrant, uname, "(C, F & W)")
        wit += [{"failure": s[0], "objects": list(s[1:])} for s in rep.thickness + rep.summands]
    return Outcome(FAIL, rep.refusal or "transported triple fails", det, wit[:MAX_WITNESSES])


def task_approx(cfg: Config, t: dict) -> Outcome:
    uname = t["universe"]
    objs = cfg.universe(uname)
    pair = t.get("pair", "proj_all")
    if pair not in BASE_PAIRS:
        raise ConfigError(f"approx: unknown pair {pair!r}; use one of {', '.join(BASE_PAIRS)}")
    right = {"proj_all": All(), "all_inj": Injectives(), "frobenius": Projectives()}[pair]
    left = {"proj_all": Projectives(), "all_inj": All(), "frobenius": All()}[pair]
    fails = []
    checked = 0
    if objs and isinstance(objs[0], ExtObject):
        mid, end = UInvOf(right), TImageOf(left)
        sample = [o for o in objs if mid.contains(o)]
        for i, e in enumerate(objs):
            try:
                ap = special_left_approx_in_ext(e, pair, right_sample=sample)
            except HypothesisError as err:
                fails.append({"object": i, "failure": f"refused: {err}"})
                continue
            bad = ap.failures(middle=mid, end=end, perp_sample=sample, window=1)
            checked += 1
            if bad:
                fails.append({"object": i, "failure": bad[0]})
    else:
        for i, x in enumerate(objs):
            for side, fn, fam in (("left", special_left_approx_base, right), ("right", special_right_approx_base, left)):
                s = fn(x, pair)
                bad = s.failures(middle=fam)
                checked += 1
                if bad:
                    fails.append({"object": i, "side": side, "failure": bad[0]})
    det = {"pair": pair, "checked": checked, "failures": len(fails)}
    if not fails:
        return Outcome(PASS, f"{checked} special approximation sequences verified", det)
    for f in fails:
        f["recheck"] = {"type": "approx", "universe": "<list>", "objects": [_ref(uname, f["object"])], "pair": pair}
    return Outcome(FAIL, f"{len(fails)} approximations failed", det, fails[:MAX_WITNESSES])


def task_gorenstein(cfg: Config, t: dict) -> Outcome:
    objs = cfg.universe(t["universe"])
    idx = UniverseIndex(objs)
    n = int(t.get("window", cfg.window))
    rep = gorenstein_window_report(idx, n)
    det = _plain(rep.to_dict())
    problems = []
    if rep.inconclusive:
        return Outcome(INCONCLUSIVE, "no simples or projectives found in the universe", det)
    expect = t.get("expect_gp", "delta" if rep.delta is not None else None)
    if expect == "delta" and not rep.gp_equals_delta:
        problems.append("GP members differ from Delta(All)")
    if expect == "projectives" and rep.gp != rep.projectives:
        problems.append("GP members differ from the projectives")
    if rep.delta is not None and t.get("six_way", True) and not rep.six_way_agree:
        problems.append("six displayed classes disagree")
    for key, val in (("max_spli", rep.spli), ("max_silp", rep.silp)):
        if key in t and (val is None or val > int(t[key])):
            problems.append(f"{key[4:]} = {'>=window' if val is None else val} exceeds {t[key]}")
    summary = f"window-{n}: {len(rep.gp)} GP objects, spli {rep.spli}, silp {rep.silp}"
    if problems:
        return Outcome(FAIL, summary + "; " + "; ".join(problems), det, [{"failure": p} for p in problems])
    return Outcome(PASS, summary, det)


def task_bridge_roundtrip(cfg: Config, t: dict) -> Outcome:
    cat = cfg.category(t["category"])
    objs = cfg.universe(t["universe"])
    ring = cfg.algebra(t["ring"]) if "ring" in t else trivial_extension_ring(cat.base, cat.M, cat.mul)
    deg = int(t.get("degree", 2))
    fails = []
    for i, e in enumerate(objs):
        c = ex.phi_isomorphism(e)
        if c.failures() or ex.phi_inverse(c).f != e.f:
            fails.append({"object": i, "failure": "Phi does not round-trip"})
        if cat.eta_zero and not cat.zeta(e.x).is_zero():
            fails.append({"object": i, "failure": "zeta != 0 although eta = 0"})
        lam = pair_to_lambda(e, ring)
        back = lambda_to_pair(lam)
        if back.f != e.f or back.x != e.x:
            fails.append({"object": i, "failure": "ring round trip changes the object"})
    pairs = 0
    if deg >= 0:
        lams = [pair_to_lambda(e, ring) for e in objs]
        for i, a in enumerate(objs):
            for j, b in enumerate(objs):
                d1 = ext_dims_cached(a, b, deg)
                d2 = ext_dims_cached(lams[i], lams[j], deg)
                pairs += 1
                if d1 != d2:
                    fails.append({"objects": [i, j], "failure": f"Ext over the ring {d2} != Ext in the category {d1}",
                                  "recheck": _ext_recheck(t["universe"], i, j, deg, d2[deg])})
    det = {"objects": len(objs), "ext_pairs": pairs, "degree": deg, "failures": len(fails)}
    if fails:
        return Outcome(FAIL, f"{len(fails)} bridge mismatches", det, fails[:MAX_WITNESSES])
    return Outcome(PASS, f"Phi, zeta and ring bridge agree on {len(objs)} objects", det)


def task_enumerate(cfg: Config, t: dict) -> Outcome:
    u = cfg.universe(t["universe"])
    det = {"size": len(u), "dims": sorted(o.dim for o in u)}
    if "expect_size" in t and len(u) != int(t["expect_size"]):
        return Outcome(FAIL, f"{len(u)} classes, expected {t['expect_size']}", det)
    return Outcome(PASS, f"{len(u)} isomorphism classes", det)


TASKS: dict[str, Callable[[Config, dict], Outcome]] = {
    "validate": task_validate,
    "ext": task_ext,
    "tor": task_tor,
    "transport_pair": task_transport_pair,
    "transport_hovey": task_transport_hovey,
    "approx": task_approx,
    "gorenstein": task_gorenstein,
    "bridge_roundtrip": task_bridge_roundtrip,
    "enumerate": task_enumerate,
}


def _universe_from_refs(cfg: Config, t: dict) -> dict:
    # approx rechecks carry their objects inline
    if t.get("universe") == "<list>":
        cfg.data.setdefault("universes", {})["<list>"] = {"kind": "list", "objects": t["objects"]}
    return t


def run_task(cfg: Config, n: int, t: dict) -> dict:
    kind = t.get("type")
    start = time.perf_counter()
    label = t.get("name", f"{kind}")
    if kind not in TASKS:
        out = Outcome(FAIL, f"unknown task type {kind!r}")
    else:
        try:
            out = TASKS[kind](cfg, _universe_from_refs(cfg, t))
        except EnumerationBudgetExceeded as err:
            out = Outcome(INCONCLUSIVE, f"enumeration budget exceeded: {err}")
        except HypothesisError as err:
            out = Outcome(FAIL, f"hypothesis refused: {err}", {}, [{"refusal": str(err)}])
        except ConfigError as err:
            out = Outcome(FAIL, f"config error: {err}")
        except KeyError as err:
            out = Outcome(FAIL, f"config error: task is missing field {err}")
        except ValueError as err:
            out = Outcome(FAIL, f"invalid input: {err}")
    return {"id": n + 1, "name": label, "type": kind, "status": out.status, "summary": out.summary,
            "details": _plain(out.details), "witnesses": _plain(out.witnesses),
            "seconds": round(time.perf_counter() - start, 3)}


def _select(cfg: Config, only: list[str] | None) -> list[int]:
    idx = list(range(len(cfg.tasks)))
    if not only:
        return idx
    keep = []
    for i in idx:
        t = cfg.tasks[i]
        if str(i + 1) in only or t.get("type") in only or t.get("name") in only:
            keep.append(i)
    return keep


def _worker(path: str, text: str, window: int | None, cap: int | None, i: int) -> dict:
    from .config import loads
    cfg = loads(text, path)
    cfg.window_override, cfg.cap_override = window, cap
    return run_task(cfg, i, cfg.tasks[i])


def run_config(cfg: Config, only: list[str] | None = None, jobs: int = 1) -> dict:
    sel = _select(cfg, only)
    if jobs > 1 and len(sel) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [pool.submit(_worker, cfg.path, cfg.text, cfg.window_override, cfg.cap_override, i) for i in sel]
            results = [f.result() for f in futs]
    else:
        results = [run_task(cfg, i, cfg.tasks[i]) for i in sel]
    results.sort(key=lambda r: r["id"])
    counts = {s: sum(r["status"] == s for r in results) for s in (PASS, FAIL, INCONCLUSIVE)}
    overall = FAIL if counts[FAIL] else (INCONCLUSIVE if counts[INCONCLUSIVE] else PASS)
    return {
        "engine": "extcot", "version": __version__, "config": cfg.name, "config_sha256": cfg.sha256,
        "settings": {"ext_window": cfg.window, "cap": cfg.cap, "tasks": [i + 1 for i in sel]},
        "status": overall, "counts": counts, "tasks": results,
    }


def exit_code(report: dict) -> int:
    return {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}[report["status"]]


def structured(report: dict) -> str:
    """Canonical machine report: sorted keys, no timings."""
    clean = dict(report)
    clean["tasks"] = [{k: v for k, v in r.items() if k != "seconds"} for r in report["tasks"]]
    return json.dumps(clean, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def text(report: dict, verbose: int = 0) -> str:
    lines = [f"extcot {report['version']}  config {report['config']}  sha256 {report['config_sha256'][:16]}"]
    for r in report["tasks"]:
        lines.append(f"[{r['status'].upper():>12}] #{r['id']} {r['name']}: {r['summary']}  ({r['seconds']:.2f}s)")
        show = r["witnesses"] if verbose or r["status"] != PASS else []
        for w in show[: (MAX_WITNESSES if verbose else 5)]:
            lines.append(f"      witness: {json.dumps(w, sort_keys=True)}")
        if verbose > 1 and r["details"]:
            lines.append(f"      details: {json.dumps(r['details'], sort_keys=True)}")
    c = report["counts"]
    lines.append(f"overall: {report['status']}  ({c['pass']} pass, {c['fail']} fail, {c['inconclusive']} inconclusive)")
    return "\n".join(lines) + "\n"


def verify_path(path: str, **kw) -> dict:
    cfg = load(path)
    return run_config(cfg, **kw)
