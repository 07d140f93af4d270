"""仿真世界包：场景、传感器、运动学与代谢"""
