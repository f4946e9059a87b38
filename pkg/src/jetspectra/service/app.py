"""HTTP service wrapping the core package.

Every endpoint is stateless: the request carries the whole configuration,
the response carries the numbers plus rendered artifacts (CSV/SVG/JSON
strings keyed by file name), and identical requests produce identical
responses byte for byte.  Expression and precondition failures map to 400,
computation failures (lost branches, misplaced homology rank) to 422.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, emit
from ..cerf import FamilyPath, cerf_diagram, check_positive_family, slope_check, viterbo_trajectory
from ..exprs import ExprError
from ..experiments import (
    build_positive_loop,
    fiber_line_experiment,
    lambda_scan,
    pencil_intersections,
)
from ..families import ContinuationError, GeneratingFamily, legendrian_from_family
from ..hodograph import ContactElement, check_legendrian_st, fiber_as_jet, hodograph_fwd, hodograph_inv, map_loop
from ..jets import JetPoint, check_embedded, check_legendrian, check_positive_isotopy, front_projection
from ..spectra import SpectrumError, viterbo_numbers, viterbo_numbers_with_boundary
from . import models as m


def create_app() -> FastAPI:
    app = FastAPI(
        title="jetspectra",
        version=__version__,
        description="Legendrian loops over the circle: generating families, "
                    "min-max spectral values, critical-value diagrams, pencils, "
                    "and the plane contact-element picture.",
    )

    @app.exception_handler(ExprError)
    async def _expr_error(request: Request, exc: ExprError):
        detail = {"detail": str(exc)}
        offset = getattr(exc, "offset", None)
        if offset is not None:
            detail["offset"] = offset
        return JSONResponse(status_code=400, content=detail)

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(SpectrumError)
    async def _spectrum_error(request: Request, exc: SpectrumError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(ContinuationError)
    async def _continuation_error(request: Request, exc: ContinuationError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health", response_model=m.HealthResponse)
    def health():
        return m.HealthResponse(status="ok", version=__version__)

    @app.post("/spectrum", response_model=m.SpectrumResponse)
    def spectrum(req: m.SpectrumRequest):
        family = req.family.build()
        if req.region_f is None:
            sp = viterbo_numbers(family, n_q=req.grid.n_q, n_w=req.grid.n_w)
        else:
            sp = viterbo_numbers_with_boundary(family, req.region_f,
                                               n_q=req.grid.n_q, n_w=req.grid.n_w)
        return m.SpectrumResponse(
            values=sp.values, degrees=sp.degrees,
            boundary_attained=sp.boundary_attained, index_shift=sp.index_shift,
            b=sp.b, files={"spectrum.csv": emit.spectrum_csv(sp)})

    @app.post("/cerf", response_model=m.CerfResponse)
    def cerf(req: m.CerfRequest):
        family = req.family.build(extra_vars=("t",))
        path = FamilyPath(family, req.t0, req.t1, req.n_t)
        speed = check_positive_family(path, n_q=req.grid.n_q)
        diagram = cerf_diagram(path, region_f=req.region_f, n_q=req.grid.n_q,
                               threads=req.threads)
        traj = viterbo_trajectory(path, region_f=req.region_f, n_q=req.grid.n_q,
                                  n_w=req.grid.n_w, threads=req.threads)
        slopes = slope_check(diagram, positive=speed.passed)
        passed = bool((not speed.passed) or (traj.strict_end_to_end and traj.weak_steps
                                             and (slopes.passed is not False)))
        files = {
            "cerf.csv": emit.cerf_csv(diagram),
            "cerf.svg": emit.cerf_svg(diagram, curves=traj.curves, times=traj.times),
            "trajectory.csv": emit.csv_text(
                ["t"] + [f"c_{k + 1}" for k in range(traj.b)],
                [(t, *row) for t, row in zip(traj.times, traj.curves)]),
        }
        return m.CerfResponse(
            n_branches=len(diagram.branches),
            events=[m.EventOut(t=e.t, z=e.z, kind=e.kind, q=e.q) for e in diagram.events],
            warnings=diagram.warnings,
            min_speed=speed.min_speed, positive=speed.passed,
            strict_end_to_end=traj.strict_end_to_end, strict_steps=traj.strict_steps,
            min_slope=slopes.min_slope, max_slope=slopes.max_slope,
            slope_pass=slopes.passed, passed=passed, files=files)

    @app.post("/positivity", response_model=m.PositivityResponse)
    def positivity(req: m.PositivityRequest):
        family = req.family.build(extra_vars=("t",))
        path = FamilyPath(family, req.t0, req.t1, req.n_t)
        speed = check_positive_family(path, n_q=req.n_q)
        loop_alpha = None
        loop_passed = None
        if req.loop_check:
            if family.fiber_dim != 0:
                raise ValueError("loop-level cross-validation supports only K = 0")
            from ..jets import Isotopy

            times = path.times()
            frames = [legendrian_from_family(path.slice_at(t), n_q=req.n_q)[0]
                      for t in times]
            rep = check_positive_isotopy(Isotopy(frames, times))
            loop_alpha, loop_passed = rep.min_alpha, rep.passed
        return m.PositivityResponse(
            min_speed=speed.min_speed, passed=speed.passed,
            argmin_t=speed.argmin_t, argmin_q=speed.argmin_q,
            loop_min_alpha=loop_alpha, loop_passed=loop_passed)

    @app.post("/loop", response_model=m.LoopResponse)
    def loop(req: m.LoopRequest):
        margin = req.margin if req.margin is not None else req.eps
        from ..experiments import build_high_p_loop

        base = build_high_p_loop(req.eps, margin, n=req.n_samples)
        iso = build_positive_loop(req.eps, n_samples=req.n_samples,
                                  n_flow=req.n_flow, n_raise=req.n_raise)
        alpha = check_positive_isotopy(iso)
        max_defect = max(check_legendrian(fr, tol_leg=req.leg_tol).max_defect
                         for fr in iso.frames)
        all_embedded = all(check_embedded(fr, tol=req.embed_tol) for fr in iso.frames)
        first, last = iso.frames[0], iso.frames[-1]
        closure = max(float(np.max(np.abs(first.q - last.q))),
                      float(np.max(np.abs(first.p - last.p))),
                      float(np.max(np.abs(first.u - last.u))))
        cusps = int(front_projection(base).cusp_indices.size)
        passed = bool(alpha.passed and all_embedded and max_defect <= req.leg_tol
                      and closure < 1e-12)
        files = {"loop.csv": emit.loop_csv(base)}
        files.update(emit.isotopy_front_frames(iso, count=req.frame_count))
        return m.LoopResponse(
            passed=passed, min_alpha=alpha.min_alpha, max_defect=max_defect,
            all_embedded=all_embedded, closure_error=closure,
            n_frames=len(iso.frames), min_p=float(base.p.min()), cusps=cusps,
            files=files)

    @app.post("/lambda-scan", response_model=m.LambdaScanResponse)
    def lambda_scan_endpoint(req: m.LambdaScanRequest):
        family = req.family.build()
        scan = lambda_scan(family, req.f, lambda_max=req.lambda_max,
                           n_lambda=req.n_lambda, n_q=req.grid.n_q,
                           n_w=req.grid.n_w, threads=req.threads)
        distinct_positive = sum(1 for lam in scan.distinct_lambdas if lam > 0)
        passed = bool(
            distinct_positive >= scan.b
            and all(c.interior for c in scan.crossings)
            and all(c.residual_value < req.oracle_tol
                    and c.residual_grad < req.oracle_tol for c in scan.crossings))
        files = {
            "lambda_scan.csv": emit.lambda_scan_csv(scan),
            "crossings.csv": emit.crossings_csv(scan),
        }
        return m.LambdaScanResponse(
            b=scan.b,
            crossings=[m.CrossingOut(k=c.k, lam=c.lam, q=c.q, w=list(c.w),
                                     residual_value=c.residual_value,
                                     residual_grad=c.residual_grad,
                                     interior=c.interior) for c in scan.crossings],
            distinct_positive=distinct_positive,
            final_values=[float(v) for v in scan.final_values],
            passed=passed, files=files)

    @app.post("/lambda-k", response_model=m.LambdaKResponse)
    def lambda_k(req: m.LambdaKRequest):
        family = GeneratingFamily(0, [], req.g)
        loop = legendrian_from_family(family, n_q=req.n_samples)[0]
        res = pencil_intersections(loop, req.k)
        return m.LambdaKResponse(
            count=res.count, degenerate=res.degenerate,
            points=[m.PencilPointOut(s=pt.s, q=pt.q, lam=pt.lam, residual=pt.residual)
                    for pt in res.points],
            n_tangencies=len(res.tangencies),
            files={"intersections.csv": emit.pencil_csv(res)})

    @app.post("/hodograph", response_model=m.HodographResponse)
    def hodograph(req: m.HodographRequest):
        if req.mode == "fwd":
            q, p, u = req.point
            el = hodograph_fwd(JetPoint(q, p, u))
            return m.HodographResponse(element=(el.x[0], el.x[1], el.theta))
        if req.mode == "inv":
            x1, x2, theta = req.element
            pt = hodograph_inv(ContactElement((x1, x2), theta))
            return m.HodographResponse(point=(pt.q, pt.p, pt.u))
        loop = fiber_as_jet(req.x, n=req.n)
        curve = map_loop(loop)
        rep = check_legendrian_st(curve)
        files = {
            "fiber_jet.csv": emit.loop_csv(loop),
            "contact_curve.csv": emit.contact_curve_csv(curve),
            "contact_curve.svg": emit.contact_curve_svg(curve),
        }
        return m.HodographResponse(legendrian_pass=rep.passed, files=files)

    @app.post("/front", response_model=m.FrontResponse)
    def front(req: m.FrontRequest):
        family = req.family.build()
        loops = legendrian_from_family(family, n_q=req.n_q)
        fronts = [front_projection(lp) for lp in loops]
        max_defect = max(check_legendrian(lp).max_defect for lp in loops)
        files = {"front.csv": emit.loop_csv(loops[0]),
                 "front.svg": emit.front_svg(fronts[0])}
        for i, (lp, fr) in enumerate(zip(loops[1:], fronts[1:]), start=1):
            files[f"front_{i}.csv"] = emit.loop_csv(lp)
            files[f"front_{i}.svg"] = emit.front_svg(fr)
        return m.FrontResponse(
            n_loops=len(loops), cusps=sum(fr.cusp_indices.size for fr in fronts),
            winding=loops[0].winding, max_defect=max_defect, files=files)

    @app.post("/thm5", response_model=m.Thm5Response)
    def thm5(req: m.Thm5Request):
        x = req.x_fiber
        start = f"{float(x[0])!r}*cos(q) + {float(x[1])!r}*sin(q)"
        g = f"{start} + {req.deformation_g}" if (x[0] or x[1]) else req.deformation_g
        family = GeneratingFamily(0, [], g, extra_vars=("t",))
        path = FamilyPath(family, 0.0, req.t1, req.n_t)
        result = fiber_line_experiment(
            req.x_fiber, req.direction, path, n_q=req.n_q,
            lambda_max=req.lambda_max, n_lambda=req.n_lambda)
        points = [
            {"side": side, "lambda": cr.lam, "q": cr.q,
             "residual_value": cr.residual_value, "residual_grad": cr.residual_grad,
             "interior": cr.interior}
            for side, cr in result.points
        ]
        return m.Thm5Response(count=result.count, passed=result.passed,
                              min_speed=result.min_speed, points=points,
                              files={"experiment.json": emit.json_text(
                                  {"count": result.count, "passed": result.passed,
                                   "points": points})})

    return app
