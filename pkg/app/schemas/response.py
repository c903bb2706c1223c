from typing import Dict, List, Literal, Optional
from pydantic import BaseModel, Field
from app.config import settings
from app.schemas.request import ParamSpec

CheckStatus = Literal["pass", "fail", "skipped", "error"]


class CheckResult(BaseModel):
    """单项检查结果"""
    name: str
    status: CheckStatus
    residual: Optional[float] = None
    tolerance: Optional[float] = None
    witness: Optional[float] = None          # “非零”断言的实测幅度
    witness_min: Optional[float] = None      # “非零”断言的下限
    points: int = 0                          # 实际参与计算的点数
    worst_component: Optional[List[int]] = None
    worst_point: Optional[List[float]] = None
    errors: List[str] = Field(default_factory=list)
    detail: str = ""


class VerificationReport(BaseModel):
    """验证报告（generated_at 不属于确定性约定）"""
    schema_version: int = settings.REPORT_SCHEMA_VERSION
    generated_at: str
    family: str
    instance_id: str
    params: Dict[str, str] = Field(default_factory=dict)
    lam: Optional[str] = None
    classification: Optional[str] = None
    ode_fed: bool = False
    points: int
    seed: int
    box: List[List[float]]
    checks: List[CheckResult]
    passed: bool

    def check(self, name: str) -> Optional[CheckResult]:
        return next((c for c in self.checks if c.name == name), None)


class ReportRow(BaseModel):
    """合并汇总中的一行（一份报告）"""
    source: str
    family: str
    instance_id: str
    passed: bool
    checks: Dict[str, CheckStatus]


class MergedSummary(BaseModel):
    """多份报告的合并汇总：每个族一行、每项检查一列"""
    schema_version: int = settings.REPORT_SCHEMA_VERSION
    check_names: List[str]
    rows: List[ReportRow]
    errors: List[str] = Field(default_factory=list)
    passed: bool


class FamilyInfo(BaseModel):
    """族列表条目"""
    name: str
    kind: Literal["soliton", "structure"]
    summary: str
    source: str
    params: List[ParamSpec]
