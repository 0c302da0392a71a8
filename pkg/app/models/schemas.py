"""Run configuration and output records (JSON in, JSON/CSV out)."""
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.config import get_settings
from app.core.model_library import check_parameters

ModelName = Literal["jaynes_cummings", "jc_dephasing", "tavis_cummings_2", "spin_chain", "spins_oscillator"]


def _settings_default(name: str):
    return lambda: getattr(get_settings(), name)


class ToleranceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    degeneracy: float = Field(default_factory=_settings_default("degeneracy_tolerance"), gt=0,
                              description="Relative eigenvalue gap below which a block counts as degenerate")
    resonance: float = Field(default_factory=_settings_default("resonance_tolerance"), gt=0,
                             description="Relative recursion denominator below which the construction aborts")
    residual: float = Field(default_factory=_settings_default("residual_tolerance"), gt=0,
                            description="Verify: spectrum, residual, biorthonormality and completeness bound")
    evolution: float = Field(default_factory=_settings_default("evolution_tolerance"), gt=0,
                             description="Verify: trace distance allowed against dense propagation")


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    path: str | None = Field(None, description="Output file; the --out flag overrides it")
    format: Literal["json", "csv"] = Field("json", description="Eigenvalue file format for solve")


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    model: ModelName = Field(..., description="Model family to build")
    params: dict[str, float] = Field(default_factory=dict, description="Model parameters by name")
    cutoff: int | None = Field(None, ge=0, description="Excitation cutoff N (spin_chain uses N = M)")
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    probe: str | None = Field(None, description="Lowering operator probed by spectrum (default: first atom)")

    @model_validator(mode="after")
    def _known_parameters(self) -> "RunConfig":
        check_parameters(self.model, self.params, self.cutoff)
        return self


class EigenvalueRecord(BaseModel):
    l: int = Field(..., description="Diagonal index (row minus column excitation)")
    m: int = Field(..., description="Sector where the recursion starts")
    j: int = Field(..., description="Row index inside block m+l")
    k: int = Field(..., description="Column index inside block m")
    lambda_re: float
    lambda_im: float
    adjoint_flag: bool = Field(..., description="True for the Hermitian-adjoint partner with eigenvalue λ*")
