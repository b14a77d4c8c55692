"""Command line front end: ``extcot verify|ext|report|configs``.

Exit codes: 0 all tasks pass, 1 any failure (including config errors),
2 inconclusive (an enumeration budget was hit).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import runner
from .config import BUNDLED, ConfigError, load

log = logging.getLogger("extcot")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", help="config file, or the name of a bundled config")
    p.add_argument("--tasks", help="comma separated task ids, types or names to run")
    p.add_argument("--window", type=int, help="override the Ext window")
    p.add_argument("--cap", type=int, help="override the enumeration budget (candidates per enumeration)")
    p.add_argument("--jobs", type=int, default=1, help="run tasks in parallel worker processes")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="extcot", description="Verify cotorsion pairs in trivial extensions")
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("verify", help="run every task of a config")
    _common(v)
    v.add_argument("--report-dir", help="write report.txt and report.json here")

    r = sub.add_parser("report", help="run a config and print one report format")
    _common(r)
    r.add_argument("--format", choices=("text", "structured"), default="text")

    e = sub.add_parser("ext", help="dimension of Ext^i between two named objects")
    e.add_argument("config")
    e.add_argument("--from", dest="src", required=True)
    e.add_argument("--to", dest="tgt", required=True)
    e.add_argument("--degree", type=int, default=1)
    e.add_argument("--cap", type=int)

    sub.add_parser("configs", help="list bundled configs")
    return ap


def _load(args):
    cfg = load(args.config)
    cfg.window_override = getattr(args, "window", None)
    cfg.cap_override = getattr(args, "cap", None)
    return cfg


def _object_ref(s: str):
    # "name" or "universe:index"
    if ":" in s:
        u, i = s.rsplit(":", 1)
        return {"universe": u, "index": int(i)}
    return s


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * getattr(args, "verbose", 0), format="%(message)s")
    if args.cmd == "configs":
        for name in BUNDLED:
            print(name)
        return 0
    try:
        cfg = _load(args)
        if args.cmd == "ext":
            t = {"type": "ext", "from": _object_ref(args.src), "to": _object_ref(args.tgt), "degree": args.degree}
            res = runner.run_task(cfg, 0, t)
            print(res["summary"] if res["status"] != runner.FAIL else f"error: {res['summary']}")
            return 0 if res["status"] == runner.PASS else 1
        only = [s.strip() for s in args.tasks.split(",")] if args.tasks else None
        rep = runner.run_config(cfg, only=only, jobs=max(1, args.jobs))
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    if args.cmd == "report":
        sys.stdout.write(runner.structured(rep) if args.format == "structured" else runner.text(rep, args.verbose))
        return runner.exit_code(rep)
    sys.stdout.write(runner.text(rep, args.verbose))
    if args.report_dir:
        d = Path(args.report_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / "report.json").write_text(runner.structured(rep), encoding="utf-8")
        (d / "report.txt").write_text(runner.text(rep, 1), encoding="utf-8")
        log.info("reports written to %s", d)
    return runner.exit_code(rep)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
