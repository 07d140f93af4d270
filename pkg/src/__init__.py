# animat-bg - 基底节动作选择动物仿真器
__version__ = "0.1.0"
