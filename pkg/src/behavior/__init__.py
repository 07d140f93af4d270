"""行为包：感知、动机与显著性"""
