"""Solver and simulator workflows built on the game model and the Cesàro methods"""
