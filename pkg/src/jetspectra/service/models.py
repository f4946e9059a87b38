"""Request and response schemas of the compute service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from ..families import GeneratingFamily


class FamilySpec(BaseModel):
    """Generating family F = Q + g; signs are the +-1 diagonal of Q."""

    g: str
    k: int = Field(0, ge=0, le=4)
    q_signs: list[int] = Field(default_factory=list)
    bound_radius: Optional[float] = Field(None, gt=0)

    @model_validator(mode="after")
    def _check_signs(self):
        if len(self.q_signs) != self.k:
            raise ValueError("q_signs must list one +-1 entry per fiber coordinate")
        if any(s not in (-1, 1) for s in self.q_signs):
            raise ValueError("q_signs entries must be +1 or -1")
        return self

    def build(self, extra_vars=()) -> GeneratingFamily:
        return GeneratingFamily(self.k, self.q_signs, self.g,
                                bound_radius=self.bound_radius, extra_vars=extra_vars)


class GridSpec(BaseModel):
    n_q: int = Field(256, ge=64, le=65536)
    n_w: int = Field(65, ge=33, le=1025)


class SpectrumRequest(BaseModel):
    family: FamilySpec
    grid: GridSpec = GridSpec()
    region_f: Optional[str] = None


class SpectrumResponse(BaseModel):
    values: list[float]
    degrees: list[int]
    boundary_attained: list[bool]
    index_shift: int
    b: int
    files: dict[str, str]


class CerfRequest(BaseModel):
    family: FamilySpec  # g may contain t
    t0: float = 0.0
    t1: float = 1.0
    n_t: int = Field(64, ge=32, le=4096)
    grid: GridSpec = GridSpec()
    region_f: Optional[str] = None
    threads: int = Field(1, ge=1, le=64)


class EventOut(BaseModel):
    t: float
    z: float
    kind: str
    q: float


class CerfResponse(BaseModel):
    n_branches: int
    events: list[EventOut]
    warnings: list[str]
    min_speed: float
    positive: bool
    strict_end_to_end: bool
    strict_steps: bool
    min_slope: float
    max_slope: float
    slope_pass: Optional[bool]
    passed: bool
    files: dict[str, str]


class PositivityRequest(BaseModel):
    family: FamilySpec
    t0: float = 0.0
    t1: float = 1.0
    n_t: int = Field(64, ge=2, le=4096)
    n_q: int = Field(256, ge=64, le=65536)
    loop_check: bool = False


class PositivityResponse(BaseModel):
    min_speed: float
    passed: bool
    argmin_t: float
    argmin_q: float
    loop_min_alpha: Optional[float] = None
    loop_passed: Optional[bool] = None
    files: dict[str, str] = {}


class LoopRequest(BaseModel):
    eps: float = Field(..., gt=0)
    margin: Optional[float] = Field(None, gt=0)
    n_samples: int = Field(1024, ge=64, le=16384)
    n_flow: int = Field(64, ge=8, le=1024)
    n_raise: int = Field(16, ge=2, le=1024)
    frame_count: int = Field(12, ge=2, le=64)
    embed_tol: float = Field(1e-6, gt=0)
    leg_tol: float = Field(1e-6, gt=0)


class LoopResponse(BaseModel):
    passed: bool
    min_alpha: float
    max_defect: float
    all_embedded: bool
    closure_error: float
    n_frames: int
    min_p: float
    cusps: int
    files: dict[str, str]


class LambdaScanRequest(BaseModel):
    family: FamilySpec
    f: str
    lambda_max: float = Field(..., gt=0)
    n_lambda: int = Field(512, ge=16, le=65536)
    grid: GridSpec = GridSpec()
    threads: int = Field(1, ge=1, le=64)
    oracle_tol: float = Field(1e-6, gt=0)


class CrossingOut(BaseModel):
    k: int
    lam: float
    q: float
    w: list[float]
    residual_value: float
    residual_grad: float
    interior: bool


class LambdaScanResponse(BaseModel):
    b: int
    crossings: list[CrossingOut]
    distinct_positive: int
    final_values: list[float]
    passed: bool
    files: dict[str, str]


class LambdaKRequest(BaseModel):
    g: str = "1"
    k: int = Field(..., ge=1, le=64)
    n_samples: int = Field(2048, ge=64, le=65536)


class PencilPointOut(BaseModel):
    s: float
    q: float
    lam: float
    residual: float


class LambdaKResponse(BaseModel):
    count: int
    degenerate: bool
    points: list[PencilPointOut]
    n_tangencies: int
    files: dict[str, str]


class HodographRequest(BaseModel):
    mode: Literal["fwd", "inv", "fiber"]
    point: Optional[tuple[float, float, float]] = None     # (q, p, u)
    element: Optional[tuple[float, float, float]] = None   # (x1, x2, theta)
    x: Optional[tuple[float, float]] = None
    n: int = Field(256, ge=16, le=65536)

    @model_validator(mode="after")
    def _check_payload(self):
        need = {"fwd": self.point, "inv": self.element, "fiber": self.x}[self.mode]
        if need is None:
            raise ValueError(f"mode '{self.mode}' needs its input field set")
        return self


class HodographResponse(BaseModel):
    point: Optional[tuple[float, float, float]] = None
    element: Optional[tuple[float, float, float]] = None
    legendrian_pass: Optional[bool] = None
    files: dict[str, str] = {}


class FrontRequest(BaseModel):
    family: FamilySpec
    n_q: int = Field(512, ge=64, le=65536)


class FrontResponse(BaseModel):
    n_loops: int
    cusps: int
    winding: int
    max_defect: float
    files: dict[str, str]


class Thm5Request(BaseModel):
    x_fiber: tuple[float, float] = (0.0, 0.0)
    direction: tuple[float, float] = (1.0, 0.0)
    deformation_g: str = "t"   # expression in q and t; t in [0, t1]
    t1: float = Field(1.0, gt=0)
    n_t: int = Field(33, ge=2, le=1024)
    n_q: int = Field(256, ge=64, le=65536)
    n_lambda: int = Field(512, ge=16, le=65536)
    lambda_max: Optional[float] = Field(None, gt=0)


class Thm5Response(BaseModel):
    count: int
    passed: bool
    min_speed: float
    points: list[dict]
    files: dict[str, str] = {}


class HealthResponse(BaseModel):
    status: str
    version: str
