"""
运行洛伦兹 Ricci 孤立子验证命令行

使用方法:
    python scripts/run/verify.py list
    python scripts/run/verify.py verify cflat_pp_wave --param a=1 --points 100 --seed 7
    python scripts/run/verify.py report out/*.json --format csv
"""
import sys
import os

# 添加项目根目录到 Python 路径
project_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

try:
    from app.main import main
except ImportError as e:
    print("=" * 50)
    print("❌ 错误：无法导入 app.main")
    print("=" * 50)
    print(f"详情: {e}")
    print("请先安装依赖: pip install -r requirements.txt")
    sys.exit(2)

if __name__ == "__main__":
    sys.exit(main())
