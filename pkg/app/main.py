"""
命令行入口：list / verify / report

退出码：0 成功且全部通过，1 有检查未通过，2 配置或构造错误
"""
import argparse
import json
import logging
import sys
from typing import List, Optional
from app.commands import COMMANDS
from app.config import settings
from app.errors import SolitonVerifyError
from app.extensions import console, setup_logging
from app.utils.response import EXIT_CONFIG, exception_response

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soliton-verify",
        description=f"{settings.APP_NAME} {settings.APP_VERSION}",
    )
    parser.add_argument("--log-level", default=None, help=f"日志级别（缺省 {settings.LOG_LEVEL}）")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level.upper() if args.log_level else None)
    try:
        return args.handler(args)
    except SolitonVerifyError as e:
        logger.error(f"{e.msg}: {e.detail}")
        console.print(json.dumps(exception_response(e), ensure_ascii=False), markup=False, highlight=False, soft_wrap=True)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
