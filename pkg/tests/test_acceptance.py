"""Acceptance suite: end-to-end checks with pinned tolerances and budgets.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion with the measured numbers.
"""

import json
import time

import numpy as np
import pytest
from click.testing import CliRunner
from conftest import grid_values, random_trig_family

from jetspectra.cerf import FamilyPath, check_positive_family, viterbo_trajectory
from jetspectra.cli import main as cli_main
from jetspectra.exprs import EvalError, differentiate, evaluate, free_variables
from jetspectra.families import GeneratingFamily, legendrian_from_family
from jetspectra.hodograph import (
    ContactElement,
    check_legendrian_st,
    hodograph_fwd,
    hodograph_inv,
    map_loop,
)
from jetspectra.jets import JetPoint, check_embedded, check_legendrian, check_positive_isotopy
from jetspectra.experiments import build_positive_loop, fiber_line_experiment, lambda_scan, pencil_intersections
from jetspectra.spectra import viterbo_numbers

TWO_PI = 2 * np.pi


def report(num, label, passed, detail):
    print(f"criterion {num:02d} [{label}]: {'PASS' if passed else 'FAIL'} ({detail})")
    assert passed, f"criterion {num}: {detail}"


def test_criterion_01_spectrum_of_linear_height(tmp_path):
    tol = 2 * (TWO_PI / 4096) * 5.0
    runner = CliRunner()
    t0 = time.perf_counter()
    result = runner.invoke(cli_main, [
        "--out-dir", str(tmp_path), "spectrum",
        "--g", "3*cos(q)+4*sin(q)", "--K", "0", "--n-q", "4096"])
    elapsed = time.perf_counter() - t0
    assert result.exit_code == 0, result.output
    body = json.loads(result.output)
    err = max(abs(body["values"][0] + 5.0), abs(body["values"][1] - 5.0))
    report(1, "height +-5", err <= tol and elapsed < 1.0,
           f"error {err:.2e} <= {tol:.3f}, runtime {elapsed:.2f}s < 1s")


def test_criterion_02_zero_family_exact():
    sp = viterbo_numbers(GeneratingFamily(0, [], "0"), n_q=64)
    report(2, "zero fiber", sp.values == [0.0, 0.0], f"values {sp.values}")


def test_criterion_03_k0_oracle_equivalence():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    exact = 0
    for _ in range(50):
        fam = random_trig_family(rng, degree=5)
        n_q = 256
        sp = viterbo_numbers(fam, n_q=n_q)
        vals = grid_values(fam, n_q)
        if sp.values[0] == float(vals.min()) and sp.values[1] == float(vals.max()):
            exact += 1
    elapsed = time.perf_counter() - t0
    report(3, "grid min/max", exact == 50 and elapsed < 5.0,
           f"{exact}/50 exact, runtime {elapsed:.2f}s < 5s")


def test_criterion_04_stabilization():
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(10):
        fam = random_trig_family(rng, degree=5)
        ref = viterbo_numbers(fam, n_q=64).values
        for sign in (+1, -1):
            got = viterbo_numbers(fam.stabilized(sign), n_q=64, n_w=129).values
            worst = max(worst, max(abs(a - b) for a, b in zip(ref, got)))
    elapsed = time.perf_counter() - t0
    report(4, "fiber stabilization", worst <= 0.02 and elapsed < 60.0,
           f"max deviation {worst:.2e} <= 0.02, runtime {elapsed:.1f}s < 60s")


def test_criterion_05_monotonicity():
    fam = GeneratingFamily(0, [], "cos(q) + t*(2 + sin(q))", extra_vars=("t",))
    path = FamilyPath(fam, 0.0, 1.0, 64)
    speed = check_positive_family(path, n_q=256)
    traj = viterbo_trajectory(path, n_q=256)
    gains = traj.curves[-1] - traj.curves[0]
    ok = (speed.passed and abs(speed.min_speed - 1.0) < 1e-12
          and traj.strict_steps
          and np.all(gains >= 1.0 - 1e-9) and np.all(gains <= 3.0 + 1e-9))
    report(5, "monotone values", ok,
           f"min_speed {speed.min_speed}, strict steps {traj.strict_steps}, "
           f"gains {np.round(gains, 4).tolist()} in [1, 3]")


def test_criterion_06_positive_loop():
    t0 = time.perf_counter()
    iso = build_positive_loop(0.1)
    alpha = check_positive_isotopy(iso)
    max_defect = max(check_legendrian(fr, tol_leg=1e-6).max_defect for fr in iso.frames)
    embedded = all(check_embedded(fr, tol=1e-6) for fr in iso.frames)
    first, last = iso.frames[0], iso.frames[-1]
    closure = max(float(np.max(np.abs(first.q - last.q))),
                  float(np.max(np.abs(first.p - last.p))),
                  float(np.max(np.abs(first.u - last.u))))
    elapsed = time.perf_counter() - t0
    ok = (alpha.min_alpha >= 0.1 and embedded and max_defect < 1e-6
          and closure < 1e-12 and elapsed < 5.0)
    report(6, "closed positive loop", ok,
           f"min_alpha {alpha.min_alpha:.3f} >= 0.1, defect {max_defect:.2e} < 1e-6, "
           f"embedded {embedded}, closure {closure:.1e}, runtime {elapsed:.2f}s < 5s")


def test_criterion_07_pencil_counts():
    fam = GeneratingFamily(0, [], "1")
    loop = legendrian_from_family(fam, n_q=2048)[0]
    ok = True
    details = []
    for k in range(1, 6):
        res = pencil_intersections(loop, k)
        worst = max((pt.residual for pt in res.points), default=0.0)
        details.append(f"k={k}: {res.count}")
        ok = ok and res.count == 2 * k and worst < 1e-8
    report(7, "pencil counts 2k", ok, ", ".join(details))


def test_criterion_08_lambda_scan_three_arcs():
    t0 = time.perf_counter()
    fam = GeneratingFamily(0, [], "2 + 0.3*sin(q)")
    scan = lambda_scan(fam, "cos(3*q)", lambda_max=10.0, n_lambda=2000, n_q=384)
    elapsed = time.perf_counter() - t0
    oracles = all(c.residual_value < 1e-6 and c.residual_grad < 1e-6 and c.interior
                  for c in scan.crossings)
    positive_start = np.all(scan.curves[0] > 0)
    negative_end = np.all(scan.final_values < 0)
    ok = (scan.b == 3 and len(scan.distinct_lambdas) == 3
          and all(lam > 0 for lam in scan.distinct_lambdas)
          and oracles and positive_start and negative_end and elapsed < 30.0)
    report(8, "three-arc scan", ok,
           f"b=3, distinct positive {np.round(scan.distinct_lambdas, 4).tolist()}, "
           f"oracle residuals pass {oracles}, start>0 {positive_start}, "
           f"end<0 {negative_end}, runtime {elapsed:.1f}s < 30s")


def test_criterion_09_two_sided_experiment():
    fam = GeneratingFamily(0, [], "t", extra_vars=("t",))
    path = FamilyPath(fam, 0.0, 1.0, 33)
    result = fiber_line_experiment((0.0, 0.0), (1.0, 0.0), path)
    sides = sorted(side for side, _ in result.points)
    ok = result.count == 2 and sides == [-1, 1]
    report(9, "two-sided count", ok,
           f"count {result.count} == 2, sides {sides}")


def test_criterion_10_hodograph_round_trip():
    rng = np.random.default_rng(4242)
    worst = 0.0
    for _ in range(1000):
        pt = JetPoint(rng.uniform(0, TWO_PI), rng.uniform(-5, 5), rng.uniform(-5, 5))
        back = hodograph_inv(hodograph_fwd(pt))
        worst = max(worst, abs(back.q - pt.q), abs(back.p - pt.p), abs(back.u - pt.u))
        el = ContactElement((rng.uniform(-5, 5), rng.uniform(-5, 5)),
                            rng.uniform(0, TWO_PI))
        el2 = hodograph_fwd(hodograph_inv(el))
        worst = max(worst, abs(el2.x[0] - el.x[0]), abs(el2.x[1] - el.x[1]),
                    abs(el2.theta - el.theta))
    images_ok = True
    for _ in range(10):
        fam = random_trig_family(rng, degree=3)
        loop = legendrian_from_family(fam, n_q=512)[0]
        images_ok = images_ok and check_legendrian_st(map_loop(loop)).passed
    ok = worst < 1e-12 and images_ok
    report(10, "round trip", ok,
           f"max round-trip error {worst:.2e} < 1e-12, loop images pass {images_ok}")


def test_criterion_11_derivative_soundness():
    from test_exprs import _random_expr

    rng = np.random.default_rng(20240817)
    h = 1e-5
    checked = 0
    worst = 0.0
    while checked < 100:
        e = _random_expr(rng, 2, depth=4)
        names = sorted(free_variables(e))
        if not names:
            continue
        point = {n: float(rng.uniform(-1.2, 1.2)) for n in names}
        try:
            val = evaluate(e, point)
        except EvalError:
            continue
        if not np.isfinite(val) or abs(val) > 1e3:
            continue
        ok_expr = True
        errs = []
        for n in names:
            d_sym = evaluate(differentiate(e, n), point)
            if not np.isfinite(d_sym) or abs(d_sym) > 1e3:
                ok_expr = False
                break
            up, dn = dict(point), dict(point)
            up[n] += h
            dn[n] -= h
            d_fd = (evaluate(e, up) - evaluate(e, dn)) / (2 * h)
            errs.append(abs(d_sym - d_fd) / max(1.0, abs(d_sym)))
        if not ok_expr:
            continue
        worst = max(worst, max(errs))
        checked += 1
    report(11, "exact derivatives", checked == 100 and worst < 1e-6,
           f"{checked}/100 expressions, worst relative error {worst:.2e} < 1e-6")
