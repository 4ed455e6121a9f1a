"""
描述: CLI 包初始化
主要功能:
    - 提供 CLI 模块命名空间
依赖: 无
"""
