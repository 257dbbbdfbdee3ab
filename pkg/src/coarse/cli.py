"""``coarse run <config>``: execute a job file and emit a deterministic report."""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from . import coarse_logic as cl
from .cohomology import (
    constant_sections,
    cover_cohomology,
    mayer_vietoris_report,
    refinement_comparison,
)
from .config import parse_config
from .ends import EndsParams, ends
from .errors import CoarseError, ConfigError

FORMAT_VERSION = 1

EXIT_OK, EXIT_ERROR, EXIT_FAILS, EXIT_INCONCLUSIVE = 0, 1, 2, 3


def fmt_point(p):
    if isinstance(p, str):
        return '"' + p + '"'
    if isinstance(p, tuple):
        return "(" + ", ".join(fmt_point(c) for c in p) + ")"
    return str(int(p)) if isinstance(p, (int, np.integer)) else str(p)


def fmt_value(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return " ".join(fmt_value(x) for x in v)
    return str(v)


@dataclass
class CommandResult:
    index: int
    label: str
    verb: str
    status: str
    entries: list = field(default_factory=list)
    summary: str = ""


@dataclass
class Report:
    space: str
    window: int
    results: list

    def lines(self):
        out = [f"format.version = {FORMAT_VERSION}", f"space = {self.space}", f"params.window = {self.window}"]
        for res in self.results:
            prefix = f"cmd.{res.index}"
            out.append(f"{prefix}.label = {res.label}")
            out.append(f"{prefix}.command = {res.verb}")
            out.append(f"{prefix}.status = {res.status}")
            out += [f"{prefix}.{k} = {fmt_value(v)}" for k, v in res.entries]
        return out

    def text(self):
        return "\n".join(self.lines()) + "\n"

    def table(self):
        rows = [("#", "label", "command", "status", "result")]
        rows += [(str(r.index), r.label, r.verb, r.status, r.summary) for r in self.results]
        widths = [max(len(row[c]) for row in rows) for c in range(4)]
        out = [f"space {self.space}, window {self.window}"]
        for row in rows:
            out.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)) + "  " + row[4])
        return "\n".join(line.rstrip() for line in out) + "\n"

    def exit_code(self):
        statuses = {r.status for r in self.results}
        if "Error" in statuses:
            return EXIT_ERROR
        if "Fails" in statuses:
            return EXIT_FAILS
        if "Inconclusive" in statuses:
            return EXIT_INCONCLUSIVE
        return EXIT_OK


def _verdict_entries(v, key="verdict"):
    out = [
        (f"{key}.status", v.status.value),
        (f"{key}.R", v.R),
        (f"{key}.W", v.W),
        (f"{key}.bound", v.bound),
        (f"{key}.witness", [f"{fmt_point(x)}~{fmt_point(y)}" for x, y in v.witness] or None),
    ]
    for k in sorted(v.details, key=str):
        val = v.details[k]
        if isinstance(val, (str, int, bool)) or val is None:
            out.append((f"{key}.details.{k}", val))
    return out


def _verdict_summary(v):
    s = f"{v.status.value} (R={v.R}, W={v.W}"
    if v.bound is not None:
        s += f", bound {v.bound}"
    if v.witness:
        x, y = v.witness[0]
        s += f", witness {fmt_point(x)}~{fmt_point(y)}"
    return s + ")"


def _cohomology_entries(H, key="cohomology"):
    out = [(f"{key}.coeff", str(H.coeff)), (f"{key}.dims", list(H.dims))]
    for k, G in enumerate(H.groups):
        out.append((f"{key}.H{k}.rank", G.rank))
        out.append((f"{key}.H{k}.torsion", list(G.torsion) or None))
    return out


def _cohomology_summary(H):
    return ", ".join(f"H{k}={G}" for k, G in enumerate(H.groups))


class Runner:
    def __init__(self, cfg, seed=0):
        self.cfg = cfg
        self.space = cfg.space
        self.p = cfg.params
        self.W = cfg.params.window
        self.sched = cl.ScaleSchedule(cfg.params.scales)
        self.seed = seed

    def ends_params(self):
        p = self.p
        return EndsParams(self.W, p.r_range, p.n_range, p.cap)

    def run(self):
        results = []
        for cmd in self.cfg.commands:
            try:
                status, entries, summary = getattr(self, "_" + cmd.verb.replace("-", "_"))(**cmd.args)
            except CoarseError as exc:
                status, entries, summary = "Error", [("error", f"{type(exc).__name__}: {exc}")], f"{type(exc).__name__}: {exc}"
            results.append(CommandResult(cmd.index, cmd.label, cmd.verb, status, entries, summary))
        return Report(self.cfg.space_text, self.W, results)

    def _verdict(self, v):
        return v.status.value, _verdict_entries(v), _verdict_summary(v)

    def _ends(self, U):
        rep = ends(self.space, U, self.ends_params())
        entries = [("ends.count", str(rep.count))]
        entries += [(f"ends.trace.r{r}.n{n}", c) for (r, n), c in sorted(rep.trace.items())]
        for comp in rep.components:
            entries.append((f"ends.component.{comp.component_id}.size", comp.size))
            entries.append((f"ends.component.{comp.component_id}.representatives", [fmt_point(x) for x in comp.representatives]))
        return "Holds", entries, f"ends = {rep.count}"

    def _bounded(self, U):
        return self._verdict(cl.is_bounded_subset(self.space, U, self.W))

    def _coentourage(self, C):
        return self._verdict(cl.coentourage_verdict(self.space, C, self.sched, self.W))

    def _cover(self, target, family):
        return self._verdict(cl.cover_verdict(self.space, target, family, self.sched, self.W))

    def _shift_cover(self, r, target, family):
        fam, Y = cl.shift_cover(r, family, target)
        return self._verdict(cl.cover_verdict(self.space, Y, fam, self.sched, self.W))

    def _refine(self, fine, coarse):
        sigma = cl.is_refinement(self.space, fine, coarse, self.W)
        if sigma is None:
            return "Fails", [("refine.assignment", None)], "not a refinement"
        return "Holds", [("refine.assignment", sigma)], "assignment " + " ".join(map(str, sigma))

    def _close(self, f, g):
        return self._verdict(cl.closeness_verdict(f, g, self.sched, self.W))

    def _coarse_map(self, f):
        return self._verdict(cl.coarse_map_verdict(f, self.sched, self.W))

    def _surjective(self, f):
        return self._verdict(cl.coarsely_surjective_verdict(f, self.sched, self.W))

    def _flasque(self, f):
        v = cl.flasque_verdict(self.space, f, self.sched, self.W, self.p.horizon)
        status, entries, summary = self._verdict(v)
        entries.append(("flasque.N", self.p.horizon))
        return status, entries, summary + " [" + ", ".join(f"{k}: {v.details[k]}" for k in ("i", "ii", "iii")) + "]"

    def _sections(self, U):
        G = constant_sections(self.space, U, self.p.coeff, self.ends_params())
        return "Holds", [("sections.group", str(G)), ("sections.rank", G.rank), ("sections.torsion", list(G.torsion) or None)], str(G)

    def _cohomology(self, target, family):
        H = cover_cohomology(self.space, target, family, self.p.coeff, self.ends_params(), sched=self.sched)
        return "Holds", _cohomology_entries(H), _cohomology_summary(H)

    def _mayer_vietoris(self, target, A, B, cover):
        rep = mayer_vietoris_report(self.space, target, A, B, self.p.coeff, self.ends_params(), sched=self.sched, target_cover=cover)
        entries = [("mv.exact", rep.exact), ("mv.composite_zero", rep.composite_zero)]
        for k, node in enumerate(rep.nodes):
            entries += [
                (f"mv.node.{k}.name", node.name),
                (f"mv.node.{k}.dim", node.dim),
                (f"mv.node.{k}.rank_in", node.rank_in),
                (f"mv.node.{k}.kernel_out", node.kernel_out),
            ]
        entries += _cohomology_entries(rep.H_X)
        return ("Holds" if rep.exact else "Fails"), entries, ("exact" if rep.exact else "not exact") + "; " + _cohomology_summary(rep.H_X)

    def _compare(self, target, fine, coarse):
        rc = refinement_comparison(self.space, target, fine, coarse, self.p.coeff, self.ends_params(), sched=self.sched)
        entries = [
            ("compare.stabilized", rc.stabilized),
            ("compare.assignment", list(rc.assignment)),
            ("compare.induced_ranks", list(rc.induced_ranks)),
            ("compare.chain_map", rc.chain_map_ok),
        ]
        entries += _cohomology_entries(rc.coarse, "compare.coarse")
        entries += _cohomology_entries(rc.fine, "compare.fine")
        status = "Holds" if rc.stabilized else "Inconclusive"
        summary = ("stabilized" if rc.stabilized else "not stabilized") + f"; coarse {_cohomology_summary(rc.coarse)}; fine {_cohomology_summary(rc.fine)}"
        return status, entries, summary

    def _metric_check(self):
        """Symmetry and the triangle inequality on seeded random triples."""
        win = self.space.window(self.W)
        rng = np.random.default_rng(self.seed)
        n = self.p.samples
        idx = rng.integers(0, len(win), size=(n, 3))
        pts = [[win.points[i] for i in col] for col in idx.T.tolist()]
        dxy = self.space.distances(pts[0], pts[1])
        dyx = self.space.distances(pts[1], pts[0])
        dyz = self.space.distances(pts[1], pts[2])
        dxz = self.space.distances(pts[0], pts[2])
        bad = np.flatnonzero((dxy != dyx) | (dxz > dxy + dyz) | ((dxy == 0) != (idx[:, 0] == idx[:, 1])))
        entries = [("metric.samples", n), ("metric.seed", self.seed), ("metric.violations", int(len(bad)))]
        if len(bad):
            i = int(bad[0])
            entries.append(("metric.witness", [fmt_point(pts[k][i]) for k in range(3)]))
            return "Fails", entries, f"{len(bad)} violations in {n} triples"
        return "Holds", entries, f"{n} triples ok"


def run(cfg, seed=0):
    return Runner(cfg, seed).run()


def main(argv=None):
    parser = argparse.ArgumentParser(prog="coarse", description="Coarse geometry verdicts, ends and cohomology.")
    sub = parser.add_subparsers(dest="cmd", required=True)
    p_run = sub.add_parser("run", help="execute a job configuration")
    p_run.add_argument("config", help="path to the job file")
    p_run.add_argument("--out", help="write the flat key = value report here")
    p_run.add_argument("--window", type=int, help="override params.window")
    p_run.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    args = parser.parse_args(argv)

    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        cfg = parse_config(text, window=args.window)
    except (OSError, ConfigError, CoarseError) as exc:
        print(f"coarse: {args.config}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    report = run(cfg, seed=args.seed)
    sys.stdout.write(report.table())
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.text())
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
