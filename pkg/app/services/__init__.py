"""
服务层模块
提供验证逻辑服务，与命令层分离
"""
