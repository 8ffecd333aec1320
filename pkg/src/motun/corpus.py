"""Benchmark problems with analytic gradients, and start-point generators.

Definitions follow the usual published forms (Deb-Thiele-Laumanns-Zitzler
for DTLZ, Zitzler-Deb-Thiele for ZDT, Fonseca-Fleming, Van Veldhuizen's MOP
collection, Hwang-Masud for ex005). The two-variable DTLZ variants put the
position variable in ``x_1`` and a single distance variable in ``x_2``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import UnknownProblem, UnsupportedProblem
from .problem import ProblemSpec

HALF_PI = 0.5 * np.pi


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    factory: Callable[[], ProblemSpec]
    reference_dims: tuple[int, int]
    source: str = ""

    @property
    def spec(self) -> ProblemSpec:
        return self.factory()


def _box(n, lo=0.0, hi=1.0):
    return np.full(n, float(lo)), np.full(n, float(hi))


# -- DTLZ distance functions (one distance variable) ---------------------------

def _rastrigin_g(x2):
    # 100 [1 + (x2 - 0.5)^2 - cos(20 pi (x2 - 0.5))], used by DTLZ1 and DTLZ3
    u = x2 - 0.5
    g = 100.0 * (1.0 + u * u - np.cos(20.0 * np.pi * u))
    dg = 100.0 * (2.0 * u + 20.0 * np.pi * np.sin(20.0 * np.pi * u))
    return g, dg


def _sphere_g(x2):
    u = x2 - 0.5
    return u * u, 2.0 * u


def _root_g(x2):
    # DTLZ6: g = x2^0.1, gradient unbounded at x2 = 0
    return x2 ** 0.1, 0.1 * x2 ** -0.9


def _linear_front(gfun, name):
    def f(x):
        g, _ = gfun(x[1])
        return np.array([0.5 * (1 + g) * x[0], 0.5 * (1 + g) * (1 - x[0])])

    def jac(x):
        g, dg = gfun(x[1])
        return np.array([
            [0.5 * (1 + g), 0.5 * dg * x[0]],
            [-0.5 * (1 + g), 0.5 * dg * (1 - x[0])],
        ])

    lo, hi = _box(2)
    return ProblemSpec(name=name, n=2, m=2, objectives=f, objective_jac=jac, lower=lo, upper=hi)


def _spherical_front(gfun, name, alpha=1.0):
    # f1 = (1+g) cos(pi/2 x1^alpha), f2 = (1+g) sin(pi/2 x1^alpha)
    def f(x):
        g, _ = gfun(x[1])
        ang = HALF_PI * x[0] ** alpha
        return np.array([(1 + g) * np.cos(ang), (1 + g) * np.sin(ang)])

    def jac(x):
        g, dg = gfun(x[1])
        ang = HALF_PI * x[0] ** alpha
        dang = HALF_PI * alpha * x[0] ** (alpha - 1) if alpha != 1.0 else HALF_PI
        c, s = np.cos(ang), np.sin(ang)
        return np.array([
            [-(1 + g) * s * dang, dg * c],
            [(1 + g) * c * dang, dg * s],
        ])

    lo, hi = _box(2)
    return ProblemSpec(name=name, n=2, m=2, objectives=f, objective_jac=jac, lower=lo, upper=hi)


def dtlz1n2():
    return _linear_front(_rastrigin_g, "DTLZ1n2")


def dtlz2n2():
    return _spherical_front(_sphere_g, "DTLZ2n2")


def dtlz3n2():
    return _spherical_front(_rastrigin_g, "DTLZ3n2")


def dtlz4n2():
    return _spherical_front(_sphere_g, "DTLZ4n2", alpha=100.0)


def dtlz5n2():
    # With two objectives the DTLZ5 angle mapping leaves theta_1 = x1 pi/2,
    # so the problem coincides with DTLZ2n2.
    return _spherical_front(_sphere_g, "DTLZ5n2")


def dtlz6n2():
    return _spherical_front(_root_g, "DTLZ6n2")


# -- ZDT (n = 10) ---------------------------------------------------------------

def _zdt(name, n, f2_parts, f1_parts=None, g_parts=None):
    """Assemble a ZDT problem from ``f1``, ``g`` and ``f2 = F(f1, g, x1)``.

    ``f2_parts(f1, g, x1)`` returns ``(f2, d f2/d f1, d f2/d g, explicit d f2/d x1)``.
    """
    def default_f1(x1):
        return x1, 1.0

    def default_g(rest):
        return 1.0 + 9.0 * np.sum(rest) / (n - 1), np.full(rest.size, 9.0 / (n - 1))

    f1_parts = f1_parts or default_f1
    g_parts = g_parts or default_g

    def f(x):
        f1, _ = f1_parts(x[0])
        g, _ = g_parts(x[1:])
        return np.array([f1, f2_parts(f1, g, x[0])[0]])

    def jac(x):
        f1, df1 = f1_parts(x[0])
        g, dg = g_parts(x[1:])
        _, d_f1, d_g, d_x1 = f2_parts(f1, g, x[0])
        J = np.zeros((2, n))
        J[0, 0] = df1
        J[1, 0] = d_f1 * df1 + d_x1
        J[1, 1:] = d_g * dg
        return J

    lo, hi = _box(n)
    return ProblemSpec(name=name, n=n, m=2, objectives=f, objective_jac=jac, lower=lo, upper=hi)


def zdt1(n=10):
    def f2(f1, g, x1):
        r = np.sqrt(f1 * g)
        return g - r, -0.5 * np.sqrt(g / f1), 1.0 - 0.5 * np.sqrt(f1 / g), 0.0
    return _zdt("ZDT1", n, f2)


def zdt2(n=10):
    def f2(f1, g, x1):
        return g - f1 * f1 / g, -2.0 * f1 / g, 1.0 + (f1 / g) ** 2, 0.0
    return _zdt("ZDT2", n, f2)


def zdt3(n=10):
    def f2(f1, g, x1):
        w = 10.0 * np.pi
        val = g - np.sqrt(f1 * g) - f1 * np.sin(w * f1)
        d_f1 = -0.5 * np.sqrt(g / f1) - np.sin(w * f1) - w * f1 * np.cos(w * f1)
        return val, d_f1, 1.0 - 0.5 * np.sqrt(f1 / g), 0.0
    return _zdt("ZDT3", n, f2)


def zdt6(n=10):
    def f1_parts(x1):
        e = np.exp(-4.0 * x1)
        s = np.sin(6.0 * np.pi * x1)
        c = np.cos(6.0 * np.pi * x1)
        return 1.0 - e * s ** 6, 4.0 * e * s ** 6 - 36.0 * np.pi * e * s ** 5 * c

    def g_parts(rest):
        mean = np.sum(rest) / (n - 1)
        return 1.0 + 9.0 * mean ** 0.25, np.full(rest.size, 2.25 * mean ** -0.75 / (n - 1))

    def f2(f1, g, x1):
        return g - f1 * f1 / g, -2.0 * f1 / g, 1.0 + (f1 / g) ** 2, 0.0

    return _zdt("ZDT6", n, f2, f1_parts=f1_parts, g_parts=g_parts)


# -- Small classical problems ------------------------------------------------------

def _two_gaussians(name, c1, c2, lo, hi):
    # f_k = 1 - exp(-||x - c_k||^2)
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)

    def f(x):
        return np.array([1.0 - np.exp(-np.sum((x - c1) ** 2)),
                         1.0 - np.exp(-np.sum((x - c2) ** 2))])

    def jac(x):
        e1 = np.exp(-np.sum((x - c1) ** 2))
        e2 = np.exp(-np.sum((x - c2) ** 2))
        return np.vstack([2.0 * e1 * (x - c1), 2.0 * e2 * (x - c2)])

    lower, upper = _box(c1.size, lo, hi)
    return ProblemSpec(name=name, n=c1.size, m=2, objectives=f, objective_jac=jac,
                       lower=lower, upper=upper)


def fonseca():
    # Fonseca & Fleming (1995): centres (1, -1) and (-1, 1), box [-4, 4]^2
    return _two_gaussians("Fonseca", [1.0, -1.0], [-1.0, 1.0], -4.0, 4.0)


def mop2(n=2):
    # Van Veldhuizen MOP2: centres +-(1/sqrt(n)) (1, ..., 1), box [-4, 4]^n
    c = np.full(n, 1.0 / np.sqrt(n))
    return _two_gaussians("MOP2", c, -c, -4.0, 4.0)


def ex005():
    # Hwang & Masud: f1 = x1^2 - x2^2, f2 = x1 / x2 on [-1, 1] x [1, 2]
    def f(x):
        return np.array([x[0] ** 2 - x[1] ** 2, x[0] / x[1]])

    def jac(x):
        return np.array([[2.0 * x[0], -2.0 * x[1]],
                         [1.0 / x[1], -x[0] / x[1] ** 2]])

    return ProblemSpec(name="ex005", n=2, m=2, objectives=f, objective_jac=jac,
                       lower=np.array([-1.0, 1.0]), upper=np.array([1.0, 2.0]))


_REGISTRY: dict[str, CorpusEntry] = {}


def register(entry: CorpusEntry) -> None:
    _REGISTRY[entry.name] = entry


for _name, _factory, _dims, _src in [
    ("DTLZ1n2", dtlz1n2, (2, 2), "DTLZ1, n=2, k=1"),
    ("DTLZ2n2", dtlz2n2, (2, 2), "DTLZ2, n=2, k=1"),
    ("DTLZ3n2", dtlz3n2, (2, 2), "DTLZ3, n=2, k=1"),
    ("DTLZ4n2", dtlz4n2, (2, 2), "DTLZ4, n=2, alpha=100"),
    ("DTLZ5n2", dtlz5n2, (2, 2), "DTLZ5, n=2"),
    ("DTLZ6n2", dtlz6n2, (2, 2), "DTLZ6, n=2, g = x2^0.1"),
    ("ZDT1", zdt1, (2, 10), "ZDT1, n=10"),
    ("ZDT2", zdt2, (2, 10), "ZDT2, n=10"),
    ("ZDT3", zdt3, (2, 10), "ZDT3, n=10"),
    ("ZDT6", zdt6, (2, 10), "ZDT6, n=10"),
    ("Fonseca", fonseca, (2, 2), "Fonseca-Fleming, n=2"),
    ("MOP2", mop2, (2, 2), "Van Veldhuizen MOP2, n=2"),
    ("ex005", ex005, (2, 2), "Hwang-Masud"),
]:
    register(CorpusEntry(_name, _factory, _dims, _src))

MANDATORY = ("DTLZ1n2", "DTLZ2n2", "DTLZ3n2", "DTLZ4n2", "DTLZ5n2", "DTLZ6n2",
             "ZDT1", "ZDT2", "ZDT3", "ZDT6", "Fonseca", "MOP2", "ex005")


def list_problems() -> list[str]:
    return sorted(_REGISTRY, key=lambda s: (s.lower(), s))


def get_entry(name: str) -> CorpusEntry:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownProblem(f"unknown problem {name!r}; known: {', '.join(list_problems())}") from None


def get_problem(name: str) -> ProblemSpec:
    return get_entry(name).spec


def _axis_count(N: int, n: int) -> int:
    k = 1
    while k ** n < N:
        k += 1
    return k


def uniform_starts(problem: ProblemSpec, N: int, mode: str = "lattice", seed: int = 0) -> list[np.ndarray]:
    """``N`` start points spread over the problem's box.

    ``lattice`` takes the smallest per-axis grid with at least ``N`` nodes and
    keeps the first ``N`` in row-major order (last coordinate fastest).
    ``random`` draws i.i.d. uniform points from ``default_rng(seed)``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if not problem.has_box:
        raise UnsupportedProblem(f"{problem.name} has no box to sample starts from")
    lo, hi = problem.lower, problem.upper
    if mode == "random":
        rng = np.random.default_rng(seed)
        return list(rng.uniform(lo, hi, size=(N, problem.n)))
    if mode != "lattice":
        raise ValueError(f"unknown start mode {mode!r}")
    k = _axis_count(N, problem.n)
    if k == 1:
        axes = [[0.5 * (a + b)] for a, b in zip(lo, hi)]
    else:
        axes = [np.linspace(a, b, k) for a, b in zip(lo, hi)]
    points = itertools.islice(itertools.product(*axes), N)
    return [np.array(p, dtype=float) for p in points]
