import os
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    APP_NAME: str = "洛伦兹梯度 Ricci 孤立子验证系统"
    APP_VERSION: str = "1.0.0"
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # 容差阶梯（纯符号流水线 / ODE 驱动流水线）
    TOL_SYMBOLIC: float = 1e-8
    TOL_ODE: float = 1e-6
    TOL_WEYL: float = 1e-9
    TOL_CLOSED_FORM: float = 1e-10
    TOL_SCALAR_ZERO: float = 1e-10

    # 判定阈值
    NULL_DEAD_BAND: float = 1e-10       # 因果类型判定死区
    DET_MIN: float = 1e-12              # |det g| 下限
    SYMMETRY_TOL: float = 1e-12
    RECURRENCE_REL_TOL: float = 1e-6
    PARALLEL_TOL: float = 1e-8
    SIGMA_MIN: float = 1e-8
    ZERO_TENSOR_TOL: float = 1e-12
    NONVANISHING_MIN: float = 0.1       # “∇R≠0”、“W≠0” 的最小幅度
    NON_LCF_MIN: float = 1e-3           # 非局部共形平坦的 Weyl 下限

    # 采样配置
    BOX_HALF_WIDTH: float = 2.0
    BOX_MARGIN: float = 0.1
    DEFAULT_POINTS: int = int(os.getenv("DEFAULT_POINTS", "100"))
    DEFAULT_SEED: int = int(os.getenv("DEFAULT_SEED", "0"))
    MAX_RESAMPLE: int = 3

    # ODE 求解配置
    RK_STEP: float = 1e-3
    EXACT_POLY_MAX_DEGREE: int = 6
    ODE_GRID_PADDING: float = 0.25      # 网格在采样盒外额外覆盖的长度

    # 完备性积分配置
    QUAD_TOL: float = 1e-10
    DIVERGENCE_THRESHOLD: float = 1e3
    DIVERGENCE_DOUBLINGS: int = 3
    TAIL_TOL: float = 1e-9
    MAX_DOUBLINGS: int = 40

    # 报告配置
    REPORT_SCHEMA_VERSION: int = 1

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"

    def soliton_tolerance(self, ode_fed: bool) -> float:
        """按是否依赖数值 ODE 解返回孤立子残差容差"""
        return self.TOL_ODE if ode_fed else self.TOL_SYMBOLIC


settings = Settings()
