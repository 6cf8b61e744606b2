"""HUBO solvers built on a Z2 lattice gauge theory mapping."""

from ._z2hubo import *  # noqa: F401,F403
from ._z2hubo import __doc__  # noqa: F401


def solve(poly, solver="glqa", params=None, k_m=6):
    """Map a HuboPolynomial and return the best of one annealing run."""
    g = map_instance(poly, k_m)  # noqa: F405
    params = params or AnnealerParams()  # noqa: F405
    run = {"lqa": lqa_run, "glqa": glqa_run}[solver]  # noqa: F405
    return run(g, params)
