"""基底节模型包：GPR环路、选择读出与双环路耦合"""
