"""实验包：控制器、试验运行、统计检验、批量实验与验收"""
