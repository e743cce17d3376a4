"""
Plane models, canonical curves and their first-order deformations.
"""
