"""Experiment suites behind the command line: each writes CSV/JSON artifacts and reports pass/fail."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import ExperimentConfig, parse_family
from .counterexamples import (CubicHeight, approx_obstruction, axis_weak_directedness, axis_weak_directedness_c3,
                              cubic_tangency_check, default_candidates, non_directedness_witness,
                              obstruction_csv)
from .currents import (DirectedCurrent, Disintegration, Quadrature, bump_battery_01, bump_battery_11,
                       closedness_residual, disintegrate, reconstruct_and_compare, residual_csv,
                       riesz_samples, tilted_closedness_oracle, wedge_defect)
from .errors import ConfigurationError
from .estimates import (compute_t0, two_leaf_battery, delta0_search, schwarz_battery, separation_check)
from .lamination import verify_disjointness
from .smoothing import (ZERO_FLOOR, convergence_sweep, kinked_composite, smooth_composite)

GRID_FILE = "grid_constants.json"
MANIFEST = "manifest.json"


@dataclass
class SuiteResult:
    name: str
    passed: bool
    artifacts: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9.]+", "_", label).strip("_")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def write_csv(path, header, rows):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([_fmt(v) for v in r])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())
    return os.path.basename(path)


def _pmap(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# -- estimates ------------------------------------------------------------------

def _estimates_family(args):
    cfg, desc = args
    fam = parse_family(desc, cfg.R)
    rows = []
    cor = two_leaf_battery(fam, cfg.two_leaf_samples, seed=cfg.seed)
    rows.append(("two_leaf_slope", fam.label, f"n={cfg.two_leaf_samples}", cor["violations"], cor["violations"] == 0))
    disj = verify_disjointness(fam, 2000, seed=cfg.seed)
    rows.append(("disjointness", fam.label, "min_gap", disj.min_gap, disj.passed))
    d0 = delta0_search(fam, cfg.R, n_samples=cfg.delta0_samples, seed=cfg.seed)
    rows.append(("delta0", fam.label, "largest 2^-k", d0, True))
    t0 = compute_t0(fam, cfg.separation_deltas, cfg.N, cfg.R)
    rows.append(("t0", fam.label, "drift<0.1", t0, t0 <= 0.25 * math.log(2) + 1e-15))
    for d in cfg.separation_deltas:
        sep = separation_check(fam, d, t0, cfg.R)
        rows.append(("separation", fam.label, f"delta={d:g}", sep.min_ratio, sep.passed))
    return fam.label, {"delta0": d0, "t0": t0, "R": cfg.R, "N": cfg.N}, rows


def run_estimates(cfg: ExperimentConfig, out: str) -> SuiteResult:
    rows = []
    sch = schwarz_battery(cfg.schwarz_samples, seed=cfg.seed)
    rows.append(("schwarz_log", "all", f"n={cfg.schwarz_samples}", sch["violations"], sch["violations"] == 0))
    descs = [d for d in cfg.families if parse_family(d, cfg.R) != "cubic"]
    grid = {}
    for label, consts, frows in _pmap(_estimates_family, [(cfg, d) for d in descs], cfg.jobs):
        grid[label] = consts
        rows.extend(frows)
    arts = [write_csv(os.path.join(out, "estimates.csv"), ["check", "family", "param", "value", "pass"], rows)]
    with open(os.path.join(out, GRID_FILE), "w") as fh:
        json.dump(grid, fh, indent=2, sort_keys=True)
        fh.write("\n")
    arts.append(GRID_FILE)
    return SuiteResult("estimates", all(r[4] for r in rows), arts, {"violations": sch["violations"]})


# -- smoothing ------------------------------------------------------------------

def _target_for(fam, name):
    if name in ("re", "im"):
        return name
    if name == "composite":
        return smooth_composite(fam)
    return kinked_composite(fam)


def _smooth_family(args):
    cfg, desc, consts = args
    fam = parse_family(desc, cfg.R)
    results = []
    for target in cfg.targets:
        for ci, center in enumerate(cfg.chart_centers):
            sw = convergence_sweep(fam, _target_for(fam, target), cfg.delta_list, consts["t0"], cfg.R,
                                   n_samples=cfg.error_samples, seed=cfg.seed, center=center)
            results.append((target, ci, center, sw))
    return fam.label, results


def _floored(v):
    return 0.0 if v < ZERO_FLOOR else v


def run_smoothing(cfg: ExperimentConfig, out: str) -> SuiteResult:
    path = os.path.join(out, GRID_FILE)
    if not os.path.exists(path):
        raise ConfigurationError(f"{path} not found: run `laminar estimates` with the same --out first")
    with open(path) as fh:
        grid = json.load(fh)
    arts, summary_rows, plot_rows = [], [], []
    ok = True
    jobs = []
    for desc in cfg.families:
        fam = parse_family(desc, cfg.R)
        if fam == "cubic":
            reps = [approx_obstruction(CubicHeight(d), name=f"heights_delta={d:g}") for d in cfg.cubic_deltas]
            obstruction_csv(reps, os.path.join(out, "obstruction_smooth.csv"))
            arts.append("obstruction_smooth.csv")
            ok &= all(r.passed for r in reps)
            continue
        consts = grid.get(fam.label)
        if consts is None:
            raise ConfigurationError(f"no certified grid constants for {fam.label}: rerun `laminar estimates`")
        if max(cfg.delta_list) >= consts["delta0"]:
            raise ConfigurationError(f"delta_list must stay below delta0 = {consts['delta0']} for {fam.label}")
        jobs.append((cfg, desc, consts))
    for label, results in _pmap(_smooth_family, jobs, cfg.jobs):
        for target, ci, center, sw in results:
            name = f"convergence_{slug(label)}_{target}" + (f"_c{ci}" if len(cfg.chart_centers) > 1 else "") + ".csv"
            sw.to_csv(os.path.join(out, name))
            arts.append(name)
            sup = np.array([r.sup_err for r in sw.reports])
            leaf = np.array([_floored(r.leaf_c1_err) for r in sw.reports])
            ratios = sup[1:] / sup[:-1]
            passed = bool(np.all(ratios <= 0.7) and sup[-1] < 0.05 and leaf[-1] < 0.05
                          and np.all(np.diff(leaf) <= 0))
            ok &= passed
            summary_rows.append((label, target, center, sw.fit_constant, sw.residual, float(np.max(ratios)),
                                 sup[-1], leaf[-1], passed))
            for r, lv in zip(sw.reports, leaf):
                plot_rows.append((label, target, center, r.delta, math.log10(r.delta), math.log10(r.sup_err),
                                  math.log10(max(lv, ZERO_FLOOR))))
    arts.append(write_csv(os.path.join(out, "smoothing_summary.csv"),
                          ["family", "target", "center", "fit_constant", "fit_residual", "max_sup_ratio",
                           "sup_err_min_delta", "leaf_c1_min_delta", "pass"], summary_rows))
    arts.append(write_csv(os.path.join(out, "convergence_plot.csv"),
                          ["family", "target", "center", "delta", "log10_delta", "log10_sup_err",
                           "log10_leaf_c1_err"], plot_rows))
    return SuiteResult("smooth", ok, arts)


# -- currents -------------------------------------------------------------------

def _currents_family(args):
    cfg, desc = args
    fam = parse_family(desc, cfg.R)
    quad = Quadrature(cfg.quad_order)
    forms = bump_battery_01(cfg.n_forms, seed=cfg.seed)
    currents = [(f"T{i}", DirectedCurrent.random(cfg.atoms_per_current, seed=cfg.seed + i))
                for i in range(cfg.n_currents) if cfg.atoms_per_current > 0]
    if cfg.atoms:
        currents.append(("Tcfg", DirectedCurrent([(complex(a, b), m) for a, b, m in cfg.atoms])))
    rows = []
    for cid, T in currents:
        for f in forms:
            d = wedge_defect(T, f, fam, quad)
            rows.append((fam.label, cid, f.name, "lambda", d, int(d > cfg.defect_tol)))
    if currents:
        ctrl = DirectedCurrent([(1.0, 1.0)])
        for f in forms:
            d = wedge_defect(ctrl, f, fam, quad, control=True)
            rows.append((fam.label, "Gamma1", f.name, "dw_control", d, int(d > cfg.control_threshold)))
    return fam.label, rows


def run_currents(cfg: ExperimentConfig, out: str) -> SuiteResult:
    descs = [d for d in cfg.families if parse_family(d, cfg.R) != "cubic"]
    rows = []
    for _, frows in _pmap(_currents_family, [(cfg, d) for d in descs], cfg.jobs):
        rows.extend(frows)
    arts = [write_csv(os.path.join(out, "wedge_defect.csv"),
                      ["family", "current_id", "form_id", "kind", "defect", "flag_nonzero"], rows)]
    ok = all(r[5] == 0 for r in rows if r[3] == "lambda")
    control_label = parse_family(cfg.control_family, cfg.R).label
    ctrl = [r for r in rows if r[3] == "dw_control" and r[0] == control_label]
    ok &= all(r[5] == 1 for r in ctrl)

    fam = parse_family(cfg.recon_family, cfg.R)
    quad = Quadrature(cfg.quad_order)
    T = DirectedCurrent.random(cfg.recon_atoms, seed=cfg.seed)
    forms = bump_battery_11(cfg.recon_forms, seed=cfg.seed)
    dis_rows = []
    dis = None
    if len(T):
        dis = disintegrate(fam, riesz_samples(T, fam, cfg.mc_samples, quad, seed=cfg.seed), cfg.bins)
        for b in range(len(dis.masses)):
            dis_rows.append((b, dis.labels[b].real, dis.labels[b].imag, dis.masses[b], len(dis.conditionals[b].z)))
    arts.append(write_csv(os.path.join(out, "disintegration.csv"),
                          ["bin", "label_re", "label_im", "mass", "count"], dis_rows))
    recon = reconstruct_and_compare(T, dis, forms, fam, quad)
    residual_csv(recon, os.path.join(out, "reconstruction.csv"))
    arts.append("reconstruction.csv")
    ok &= all(r.residual <= cfg.recon_tol for r in recon)

    closed_rows = []
    if len(T):
        forms01 = bump_battery_01(cfg.n_forms or 1, seed=cfg.seed, z_radius=0.45)
        g = lambda c: 1 + np.real(c)  # noqa: E731
        uni = closedness_residual(Disintegration.from_current(T, quad), fam, forms01, g)
        tilted = closedness_residual(Disintegration.from_current(T, quad, lambda z: 1 + cfg.tilt * z.real),
                                     fam, forms01, g)
        oracle = tilted_closedness_oracle(T, fam, forms01, quad, cfg.tilt, g)
        closed_rows = [("uniform", uni, uni <= cfg.closedness_tol),
                       ("tilted", tilted, tilted > 10 * cfg.closedness_tol),
                       ("tilted_oracle", oracle, abs(tilted - oracle) <= 1e-3 * oracle + cfg.closedness_tol)]
        ok &= all(r[2] for r in closed_rows)
    arts.append(write_csv(os.path.join(out, "closedness.csv"), ["sigma", "residual", "pass"], closed_rows))
    return SuiteResult("currents", bool(ok), arts)


# -- counterexample -------------------------------------------------------------

def run_counterexample(cfg: ExperimentConfig, out: str) -> SuiteResult:
    tang = cubic_tangency_check(cfg.tangency_ts, np.asarray(cfg.tangency_ts) * (1 + 1j))
    axis = axis_weak_directedness()
    axis_ctrl = axis_weak_directedness(control=True)
    c3 = axis_weak_directedness_c3()
    c3_ctrl = axis_weak_directedness_c3(control=True)
    wit = non_directedness_witness(cfg.mass_bound, cfg.eps_list)
    wit.to_csv(os.path.join(out, "witness.csv"))
    cands = default_candidates(cfg.cubic_deltas, cfg.mollifier_radii, cfg.poly_degrees)
    reps = [approx_obstruction(c) for c in cands]
    obstruction_csv(reps, os.path.join(out, "obstruction.csv"))
    checks = [
        ("tangency", max(tang.max_value, tang.max_slope, tang.max_c3_deviation), tang.passed),
        ("axis_defect_R2", axis, axis <= 1e-12),
        ("axis_control_R2", axis_ctrl, axis_ctrl > 1e-3),
        ("axis_defect_C3", c3, c3 <= 1e-10),
        ("axis_control_C3", c3_ctrl, c3_ctrl > 1e-3),
        ("witness_exponent", wit.exponent, abs(wit.exponent - 1 / 3) <= 0.05),
        ("axis_pairing_spread", wit.axis_ratio_spread, wit.axis_ratio_spread <= 1e-10),
        ("mass_bound_eps_threshold", wit.eps_threshold, wit.contradiction),
        ("obstruction_min_combined", min(r.combined for r in reps), all(r.passed for r in reps)),
    ]
    arts = ["witness.csv", "obstruction.csv",
            write_csv(os.path.join(out, "counterexample_checks.csv"), ["check", "value", "pass"], checks)]
    return SuiteResult("counterexample", all(c[2] for c in checks), arts)


SUITES = {
    "estimates": run_estimates,
    "smooth": run_smoothing,
    "currents": run_currents,
    "counterexample": run_counterexample,
}


# -- manifest -------------------------------------------------------------------

def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(cfg: ExperimentConfig, out: str, results: list) -> dict:
    """Merge suite results into ``manifest.json`` and list every file in ``out`` (itself included)."""
    path = os.path.join(out, MANIFEST)
    suites = {}
    if os.path.exists(path):
        try:
            with open(path) as fh:
                old = json.load(fh)
            if old.get("config_hash") == cfg.digest():
                suites = old.get("suites", {})
        except (OSError, ValueError):
            suites = {}
    for r in results:
        suites[r.name] = {"pass": bool(r.passed), "artifacts": sorted(r.artifacts)}
    files = sorted(set(os.listdir(out)) | {MANIFEST})
    manifest = {
        "config_hash": cfg.digest(),
        "version": __version__,
        "seed": cfg.seed,
        "suites": dict(sorted(suites.items())),
        "files": files,
        "sha256": {f: _sha256(os.path.join(out, f)) for f in files if f != MANIFEST},
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def run_suites(cfg: ExperimentConfig, names: list, out: str) -> tuple[bool, list]:
    os.makedirs(out, exist_ok=True)
    results = [SUITES[n](cfg, out) for n in names]
    write_manifest(cfg, out, results)
    return all(r.passed for r in results), results
