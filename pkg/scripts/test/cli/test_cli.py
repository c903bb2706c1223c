"""
命令行端到端测试：list / verify / report 与退出码约定

退出码：0 全部通过，1 有检查未通过，2 配置 / 构造错误或报告无法解析

使用方法:
    pytest scripts/test/cli/test_cli.py
    python scripts/test/cli/test_cli.py
"""

import json
import sys
from pathlib import Path

import pytest

project_root = Path(__file__).parent.parent.parent.parent
sys.path.insert(0, str(project_root))
sys.path.insert(0, str(Path(__file__).parent.parent))
from test_utils import *

from app.main import main
from app.schemas.request import MetricDescriptor
from app.services import catalog_service as catalog
from app.utils.response import EXIT_CONFIG, EXIT_FAILED, EXIT_OK


def run_verify(tmp_path, name, *args):
    out = tmp_path / f"{name}.json"
    code = main(["verify", *args, "--out", str(out)])
    report = json.loads(out.read_text(encoding="utf-8")) if out.exists() else None
    return code, report


def statuses(report):
    return {c["name"]: c["status"] for c in report["checks"]}


def test_verify_passing_instance(tmp_path):
    log_test_start("verify：局部共形平坦 pp-wave 全部通过")
    code, report = run_verify(tmp_path, "cflat", "cflat_pp_wave", "--param", "a=1", "--points", "100", "--seed", "7")
    assert code == EXIT_OK, f"退出码 {code}，检查状态 {statuses(report)}"
    assert report["passed"] is True
    assert report["schema_version"] == 1
    assert report["family"] == "cflat_pp_wave"
    assert report["points"] == 100 and report["seed"] == 7
    found = statuses(report)
    for name in ("metric", "soliton", "trace", "lemma", "geodesic", "wave_structure", "closed_form"):
        assert found.get(name) == "pass", f"{name} 应通过: {found.get(name)}"
    log_success("全部检查通过")


def test_wrong_lambda_fails(tmp_path):
    log_test_start("verify：覆盖 λ 后不再是孤立子")
    code, report = run_verify(tmp_path, "wrong", "cflat_pp_wave", "--param", "a=1", "--points", "30", "--lambda", "1")
    assert code == EXIT_FAILED
    assert report["passed"] is False
    assert statuses(report)["soliton"] == "fail"
    assert report["lam"] == "1"


def test_selected_checks_only(tmp_path):
    log_test_start("verify：只运行指定检查")
    code, report = run_verify(
        tmp_path, "two", "two_symmetric", "--param", "a11=1,a22=2",
        "--checks", "two_symmetric,soliton", "--points", "30",
    )
    assert code == EXIT_OK
    assert set(statuses(report)) == {"two_symmetric", "soliton"}
    assert all(status == "pass" for status in statuses(report).values())


def test_report_is_deterministic(tmp_path):
    log_test_start("同一配置与种子给出相同报告")
    args = ("minkowski_gaussian", "--param", "dim=3,lam=-1", "--points", "25", "--seed", "3")
    _, first = run_verify(tmp_path, "first", *args)
    _, second = run_verify(tmp_path, "second", *args)
    first.pop("generated_at")
    second.pop("generated_at")
    assert first == second, "除 generated_at 外报告应完全相同"


def test_metric_descriptor_file(tmp_path):
    log_test_start("verify：度量描述文件")
    descriptor = MetricDescriptor.from_instance(catalog.minkowski_gaussian(dim=3, lam=2))
    path = tmp_path / "gaussian.json"
    path.write_text(descriptor.model_dump_json(), encoding="utf-8")
    code, report = run_verify(tmp_path, "described", "--metric", str(path), "--points", "20")
    assert code == EXIT_OK, f"检查状态 {statuses(report)}"
    assert statuses(report)["soliton"] == "pass"


@pytest.mark.parametrize("args", [
    ["verify", "no_such_family"],
    ["verify", "pp_wave", "--param", "zeta=1"],
    ["verify", "pp_wave", "--param", "H"],
    ["verify", "pp_wave", "--checks", "soliton,nonsense"],
    ["verify", "pp_wave", "--tol", "soliton=-1"],
    ["verify", "pp_wave", "--lambda", "1"],
    ["verify", "two_symmetric", "--param", "a11=2,a22=1"],
    ["verify", "cflat_pp_wave", "--param", "n=abc,b1=1"],
    ["verify", "--metric", "/nonexistent/metric.json"],
    ["verify"],
])
def test_configuration_errors_exit_two(args):
    log_test_start(f"配置错误: {' '.join(args)}")
    assert main(args) == EXIT_CONFIG


def test_error_envelope_is_single_json_line(capsys):
    log_test_start("错误响应是一行完整的 JSON")
    value = "abc" * 40
    assert main(["verify", "cflat_pp_wave", "--param", f"n={value}"]) == EXIT_CONFIG
    err = capsys.readouterr().err
    line = next(line for line in err.splitlines() if line.startswith("{"))
    payload = json.loads(line)
    assert payload["code"] == 400
    assert value in payload["data"]["detail"], "detail 不应被折行截断"


@pytest.mark.parametrize("family", ["pp_wave", "space_form"])
def test_structure_only_families(tmp_path, family):
    log_test_start(f"verify：只做结构检查的族 {family}")
    code, report = run_verify(tmp_path, family, family, "--points", "10")
    assert code == EXIT_OK, f"检查状态 {statuses(report)}"
    found = statuses(report)
    assert found["wave_structure"] == "pass"
    assert "soliton" not in found, "度量实例不运行孤立子检查"


def test_weyl_in_dimension_three(tmp_path):
    log_test_start("三维实例总是给出 Weyl 检查")
    code, report = run_verify(tmp_path, "space3", "space_form", "--param", "dim=3", "--points", "10")
    assert code == EXIT_OK
    weyl = next(c for c in report["checks"] if c["name"] == "weyl")
    assert weyl["status"] == "pass" and weyl["residual"] <= 1e-9


def test_cflat_recurrence_check(tmp_path):
    log_test_start("verify：a = e^u 的 Ricci 递归")
    code, report = run_verify(tmp_path, "recurrent", "cflat_pp_wave", "--param", "a=exp(u)",
                              "--checks", "recurrence", "--points", "20")
    assert code == EXIT_OK, f"检查状态 {statuses(report)}"
    assert statuses(report) == {"recurrence": "pass"}


def test_output_formats(tmp_path):
    log_test_start("csv 与 text 输出")
    csv_out = tmp_path / "report.csv"
    assert main(["verify", "space_form", "--points", "10", "--format", "csv", "--out", str(csv_out)]) == EXIT_OK
    lines = csv_out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("name,status,residual,tolerance")
    assert any(line.startswith("closed_form,pass") for line in lines[1:])

    text_out = tmp_path / "report.txt"
    assert main(["verify", "space_form", "--points", "10", "--format", "text", "--out", str(text_out)]) == EXIT_OK
    text = text_out.read_text(encoding="utf-8")
    assert "space_form" in text and "结论：通过" in text


def test_report_merge_exit_codes(tmp_path):
    log_test_start("report：合并与退出码")
    main(["verify", "minkowski_gaussian", "--points", "10", "--out", str(tmp_path / "a.json")])
    main(["verify", "space_form", "--points", "10", "--out", str(tmp_path / "b.json")])
    main(["verify", "minkowski_gaussian", "--points", "10", "--lambda", "3", "--out", str(tmp_path / "c.json")])
    (tmp_path / "broken.json").write_text("{not json", encoding="utf-8")

    merged = tmp_path / "merged.json"
    good = [str(tmp_path / "a.json"), str(tmp_path / "b.json")]
    assert main(["report", *good, "--format", "json", "--out", str(merged)]) == EXIT_OK
    summary = json.loads(merged.read_text(encoding="utf-8"))
    assert summary["passed"] is True and len(summary["rows"]) == 2
    assert summary["check_names"][0] == "metric", "列按检查目录顺序排列"

    assert main(["report", *good, str(tmp_path / "c.json"), "--out", str(merged)]) == EXIT_FAILED
    assert main(["report", *good, str(tmp_path / "broken.json"), "--out", str(merged)]) == EXIT_CONFIG
    log_success("合并退出码正确")


def test_list_families_json(capsys):
    log_test_start("list --json")
    assert main(["list", "--json"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["code"] == 200
    names = [item["name"] for item in payload["data"]]
    assert len(names) == 15 and "cigar_2d" in names
    cigar = next(item for item in payload["data"] if item["name"] == "cigar_2d")
    assert cigar["params"][0]["choices"] == ["flat", "tan", "tanh"]


def test_list_single_family(capsys):
    assert main(["list", "--family", "recurrent_type2"]) == EXIT_OK
    assert "kappa" in capsys.readouterr().out
    assert main(["list", "--family", "nope"]) == EXIT_CONFIG


if __name__ == "__main__":
    run_as_script(__file__)
