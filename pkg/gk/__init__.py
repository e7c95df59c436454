"""
gk - exact (g, K)-modules over ZZ, QQ, ZZ[1/n] and ZZ[i]

Integral forms of pairs and modules, the functors ind, pro, Gamma and I,
relative Lie algebra cohomology with torsion, and flat base change
certificates, driven by declarative scenario files.
"""

__version__ = "0.1.0"

from .gk import gk, run_scenario

__all__ = ["gk", "run_scenario", "__version__"]
