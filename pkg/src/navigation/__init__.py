"""导航包：拓扑地图、自定位、规划与资源学习"""
