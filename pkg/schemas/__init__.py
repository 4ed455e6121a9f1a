"""
描述: Pydantic Schema 初始化
主要功能:
    - 分布参数、模型设定、拟合结果与报告数据模型
依赖: pydantic
"""
