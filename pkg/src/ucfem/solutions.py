"""Manufactured solutions for the unit-square experiments.

The workhorse family is u_N(x, y) = (e^y - y) cos(N pi x); its Neumann
trace is supported on the top edge and proportional to the N-th cosine
mode, so it lies in the span of the configured trace basis whenever the
trace dimension is at least N.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ExactSolution:
    name: str
    u: object          # u(x, y)
    grad: object       # grad(x, y) -> (ux, uy)
    hess: object       # hess(x, y) -> (uxx, uxy, uyy)

    def f(self, x, y):
        uxx, _, uyy = self.hess(x, y)
        return -(uxx + uyy)

    def normal_flux(self, x, y, nx, ny):
        ux, uy = self.grad(x, y)
        return nx * ux + ny * uy

    @property
    def beta(self):
        # every catalogued solution has zero-mean source over the square
        return 0.0


def cosine_solution(N):
    """(e^y - y) cos(N pi x); Neumann trace (e - 1) cos(N pi x) on the top edge."""
    w = N * np.pi

    def u(x, y):
        return (np.exp(y) - y) * np.cos(w * x)

    def grad(x, y):
        return (-w * (np.exp(y) - y) * np.sin(w * x),
                (np.exp(y) - 1.0) * np.cos(w * x))

    def hess(x, y):
        return (-w * w * (np.exp(y) - y) * np.cos(w * x),
                -w * (np.exp(y) - 1.0) * np.sin(w * x),
                np.exp(y) * np.cos(w * x))

    return ExactSolution(name="cosine_%d" % N, u=u, grad=grad, hess=hess)


def combined_solution(name, parts):
    """Linear combination sum_i c_i * sol_i of catalogued solutions."""

    def u(x, y):
        return sum(c * s.u(x, y) for c, s in parts)

    def grad(x, y):
        gs = [(c, s.grad(x, y)) for c, s in parts]
        return (sum(c * g[0] for c, g in gs), sum(c * g[1] for c, g in gs))

    def hess(x, y):
        hs = [(c, s.hess(x, y)) for c, s in parts]
        return tuple(sum(c * h[k] for c, h in hs) for k in range(3))

    return ExactSolution(name=name, u=u, grad=grad, hess=hess)


def constant_solution(c):
    return ExactSolution(
        name="constant_%g" % c,
        u=lambda x, y: c + 0.0 * x,
        grad=lambda x, y: (0.0 * x, 0.0 * y),
        hess=lambda x, y: (0.0 * x, 0.0 * x, 0.0 * x),
    )


def by_name(name):
    """Solution catalogue used by presets and the CLI."""
    if name.startswith("cosine_"):
        return cosine_solution(int(name.split("_")[1]))
    if name == "example_1":
        return cosine_solution(1)
    if name == "perturbed":
        return combined_solution(
            "perturbed", [(1.0, cosine_solution(1)), (0.025, cosine_solution(2))])
    if name.startswith("constant_"):
        return constant_solution(float(name.split("_")[1]))
    raise KeyError("unknown solution %r" % (name,))
