from typing import Optional

from pydantic import Field, SerializeAsAny

from src.schema.base import BaseSchema
from src.schema.kernel import GridRect


class RunConfig(BaseSchema):
    """Fully resolved parameters of one command invocation"""
    command: str
    inputs: tuple[str, ...] = ()
    function_class: Optional[str] = Field(default=None, alias="class")
    p: Optional[float] = None
    tol: Optional[float] = None
    grid: Optional[GridRect] = None
    resolution: Optional[int] = None
    near_field: Optional[float] = None
    output: Optional[str] = None
    seed: Optional[int] = None
    threads: int = 0


class RunRecord(BaseSchema):
    """Report envelope: tool version, resolved config and the command's report"""
    version: str
    config: RunConfig
    report: SerializeAsAny[BaseSchema]


class CriterionResult(BaseSchema):
    """Outcome of one acceptance criterion"""
    id: int
    name: str
    passed: bool
    metrics: dict[str, float] = Field(default_factory=dict)
    notes: tuple[str, ...] = ()


class SuiteSummary(BaseSchema):
    version: str
    seed: int
    config: Optional[RunConfig] = None
    criteria: tuple[CriterionResult, ...]
    passed: bool
