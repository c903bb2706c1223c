import argparse
import io
import json
import logging
from rich.console import Console
from rich.table import Table
from app.services import registry_service as registry
from app.services.report_service import write_output
from app.utils.response import EXIT_OK, success_response

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "list",
        help="列出目录中的族",
        description="列出所有族及其参数签名与来源；--family 只显示一个族的参数说明",
    )
    parser.add_argument("--json", action="store_true", help="以 JSON 输出")
    parser.add_argument("--family", help="只显示该族的参数说明")
    parser.set_defaults(handler=handle)


def _family_table(descriptors) -> Table:
    table = Table(title="族目录")
    table.add_column("族")
    table.add_column("类型")
    table.add_column("参数")
    table.add_column("说明")
    for d in descriptors:
        table.add_row(d.name, d.kind, d.signature, f"{d.summary}（{d.source}）")
    return table


def _param_table(descriptor) -> Table:
    table = Table(title=f"{descriptor.name} 的参数")
    table.add_column("参数")
    table.add_column("类型")
    table.add_column("缺省值")
    table.add_column("下标")
    table.add_column("含义")
    for spec in descriptor.params:
        kind = spec.kind if not spec.choices else f"{spec.kind}: {'|'.join(spec.choices)}"
        table.add_row(spec.name, kind, spec.default, spec.indexed or "", spec.description)
    return table


def handle(args: argparse.Namespace) -> int:
    if args.family:
        descriptors = [registry.get_family(args.family)]
    else:
        descriptors = registry.list_families()

    if args.json:
        data = [d.to_info().model_dump() for d in descriptors]
        write_output(json.dumps(success_response(data=data), ensure_ascii=False, indent=2))
        return EXIT_OK

    console = Console(record=True, width=160, file=io.StringIO(), color_system=None)
    console.print(_param_table(descriptors[0]) if args.family else _family_table(descriptors))
    write_output(console.export_text())
    logger.debug(f"列出 {len(descriptors)} 个族")
    return EXIT_OK
