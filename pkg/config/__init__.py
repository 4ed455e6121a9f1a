"""
描述: 配置模块初始化
主要功能:
    - 暴露配置读取入口
依赖: 无
"""
