"""
命令行子命令（每个模块提供 register(subparsers)，并把处理函数挂到 handler 上）
"""
from app.commands import families, report, verify

COMMANDS = (families, verify, report)
