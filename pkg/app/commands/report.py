import argparse
import logging
from app.services.report_service import merge_reports, render_summary, write_output
from app.utils.response import EXIT_CONFIG, exit_code_for
from app.utils.validation import OUTPUT_FORMATS

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "report",
        help="合并多份 JSON 报告",
        description="合并 verify 生成的 JSON 报告为逐族的通过矩阵。"
                    "退出码：0 全部通过，1 有报告未通过，2 有文件无法解析",
    )
    parser.add_argument("paths", nargs="+", help="JSON 报告文件")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, default="text", help="输出格式（缺省 text）")
    parser.add_argument("--out", help="输出路径（缺省标准输出）")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    summary, failures = merge_reports(args.paths)
    write_output(render_summary(summary, args.format), args.out)
    if failures:
        logger.error(f"{len(failures)} 份报告无法解析")
        return EXIT_CONFIG
    return exit_code_for(summary.passed)
