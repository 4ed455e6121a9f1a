"""
描述: CLI 子命令 (pmf / moments / simulate / fit)
"""
