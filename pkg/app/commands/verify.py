import argparse
import json
import logging
from pydantic import ValidationError
from app.config import settings
from app.errors import ConfigError
from app.schemas.request import RunConfig
from app.services import verify_service
from app.services.report_service import render_report, write_output
from app.utils.response import exit_code_for
from app.utils.validation import OUTPUT_FORMATS, parse_check_list, parse_key_values, parse_tolerances

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "verify",
        help="在采样点上验证一个族实例",
        description="构造族实例（或读取度量描述文件），运行检查并输出报告。"
                    "退出码：0 全部通过，1 有检查失败，2 配置错误",
    )
    parser.add_argument("family", nargs="?", help="族 id（见 list）")
    parser.add_argument("--metric", dest="metric_path", help="度量描述文件（JSON），代替族 id")
    parser.add_argument("--param", action="append", help="族参数 k=v,…（可重复）")
    parser.add_argument("--points", type=int, help=f"采样点数（缺省 {settings.DEFAULT_POINTS}）")
    parser.add_argument("--seed", type=int, help=f"随机种子（缺省 {settings.DEFAULT_SEED}）")
    parser.add_argument("--tol", help="按检查覆盖容差 name=ε,…")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, help="输出格式（缺省 json）")
    parser.add_argument("--checks", help="只运行这些检查 a,b,…")
    parser.add_argument("--out", help="报告输出路径（缺省标准输出）")
    parser.add_argument("--lambda", dest="lam", help="覆盖孤立子常数 λ")
    parser.add_argument("--config", help="RunConfig JSON 文件；命令行选项覆盖其中的同名字段")
    parser.set_defaults(handler=handle)


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise ConfigError(f"无法读取配置文件 {path}: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"配置文件 {path} 不是合法 JSON: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"配置文件 {path} 必须是 JSON 对象")
    return data


def build_config(args: argparse.Namespace) -> RunConfig:
    """
    合并 --config 文件与命令行选项得到 RunConfig

    异常：
    - ConfigError: 参数串、检查名、容差或配置文件不合法
    """
    data = _load_config_file(args.config) if args.config else {}
    if args.family is not None:
        data["family"] = args.family
        data.pop("metric_path", None)
    if args.metric_path is not None:
        data["metric_path"] = args.metric_path
        if args.family is None:
            data.pop("family", None)
    if args.param:
        params = dict(data.get("params", {}))
        for text in args.param:
            params.update(parse_key_values(text, option="--param"))
        data["params"] = params
    if args.tol is not None:
        data["tolerances"] = {**data.get("tolerances", {}), **parse_tolerances(args.tol)}
    if args.checks is not None:
        data["checks"] = parse_check_list(args.checks)
    for key in ("points", "seed", "format", "out", "lam"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    try:
        return RunConfig(**data)
    except ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(f"运行配置无效: {first['msg']}")


def handle(args: argparse.Namespace) -> int:
    config = build_config(args)
    report = verify_service.run_verification(config)
    write_output(render_report(report, config.format), config.out)
    failed = [c.name for c in report.checks if c.status in ("fail", "error")]
    if failed:
        logger.warning(f"{report.instance_id}: 未通过的检查 {', '.join(failed)}")
    else:
        logger.info(f"{report.instance_id}: 全部 {len(report.checks)} 项检查通过")
    return exit_code_for(report.passed)
