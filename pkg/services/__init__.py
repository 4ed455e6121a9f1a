"""
描述: 服务层初始化
主要功能:
    - 特殊函数、更新过程计数分布、矩、抽样
    - 分布族注册、最大似然估计、数据读写与报告渲染
依赖: numpy, scipy, pandas
"""
