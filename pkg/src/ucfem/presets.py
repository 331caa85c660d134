"""Named experiment presets reproducing the published figures, together
with their pass/fail expectations.

Expected-slope tolerances live here (single source of truth); the
acceptance tests import them rather than restating numbers.
"""

from dataclasses import dataclass, field

from .analysis import convergence_study

STANDARD_LEVELS = (21, 41, 81, 161)
P2_LEVELS = (21, 41, 81)


@dataclass(frozen=True)
class Series:
    label: str
    solution: str
    ns: tuple
    method: str = "two_field"
    degree: int = 1
    gamma: float = 1.0
    trace_n: int = 8
    eps: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class Preset:
    name: str
    anchor: str               # figure / proposition identifier
    series: tuple
    checker: object = None    # callable(tables) -> list of (name, ok, detail)

    def run(self, parallel=False):
        def one(s):
            return s.label, convergence_study(
                s.solution, s.ns, method=s.method, degree=s.degree,
                gamma=s.gamma, trace_n=s.trace_n, eps=s.eps, seed=s.seed)

        if parallel:
            from concurrent.futures import ThreadPoolExecutor
            with ThreadPoolExecutor() as pool:
                pairs = list(pool.map(one, self.series))
        else:
            pairs = [one(s) for s in self.series]
        return dict(pairs)

    def check(self, tables):
        if self.checker is None:
            return []
        return self.checker(tables)


def _in_range(x, lo, hi):
    return lo <= x <= hi


def _final(table):
    return table.rows[-1].err_h1


def _check_gamma(tables):
    out = []
    s1 = tables["gamma_1"].slope()
    out.append(("gamma=1 slope in [0.85,1.15]", _in_range(s1, 0.85, 1.15),
                "slope=%.3f" % s1))
    for label in ("gamma_0.1", "gamma_0.01", "gamma_0"):
        s = tables[label].slope()
        out.append(("%s slope in [0.85,1.2]" % label, _in_range(s, 0.85, 1.2),
                    "slope=%.3f" % s))
    e1 = [r.err_h1 for r in tables["gamma_1"].rows]
    e0 = [r.err_h1 for r in tables["gamma_0"].rows]
    mono = all(b <= 1.10 * a for a, b in zip(e1, e0))
    out.append(("gamma=0 errors <= gamma=1 errors (10% slack)", mono,
                "gamma0=%s gamma1=%s" % (["%.2e" % e for e in e0],
                                         ["%.2e" % e for e in e1])))
    return out


def _check_dimension(tables):
    finals = {label: _final(tables[label]) for label in tables}
    big = [finals["N_8"], finals["N_16"], finals["N_64"]]
    within = max(big) <= 1.25 * min(big)
    out = [("N in {8,16,64} final errors within 25%", within,
            "finals=%s" % ["%.3e" % e for e in big]),
           ("N=1 final error > N=8 final error", finals["N_1"] > finals["N_8"],
            "N1=%.3e N8=%.3e" % (finals["N_1"], finals["N_8"]))]
    return out


def _check_perturbation(tables):
    s2 = tables["N_2"].slope()
    last_rates = tables["N_1"].rates()
    r1 = last_rates[-1]
    return [("N=2 slope in [0.85,1.15]", _in_range(s2, 0.85, 1.15),
             "slope=%.3f" % s2),
            ("N=1 last-pair rate < 0.3 (stagnation)", r1 < 0.3,
             "rate=%.3f" % r1)]


def _check_noise(tables):
    s0 = tables["eps_0"].slope()
    e0 = _final(tables["eps_0"])
    e12 = _final(tables["eps_0.12"])
    return [("eps=0 slope in [0.85,1.15]", _in_range(s0, 0.85, 1.15),
             "slope=%.3f" % s0),
            ("eps=0.12 final error >= 3x eps=0 final error", e12 >= 3.0 * e0,
             "e12=%.3e e0=%.3e" % (e12, e0))]


def _check_first_order(tables):
    out = []
    for label, table in tables.items():
        s = table.slope()
        out.append(("%s slope in [0.8,1.2]" % label, _in_range(s, 0.8, 1.2),
                    "slope=%.3f" % s))
    return out


def _check_second_order(tables):
    out = []
    for label, table in tables.items():
        s = table.slope()
        out.append(("%s slope in [1.8,2.2]" % label, _in_range(s, 1.8, 2.2),
                    "slope=%.3f" % s))
    return out


def _check_ratio(tables):
    ratios = [tables["u_%d" % N].rows[-1].c_ratio for N in (1, 2, 3, 4)]
    increasing = all(a < b for a, b in zip(ratios, ratios[1:]))
    return [("C(u_N) strictly increasing over N=1..4", increasing,
             "ratios=%s" % ["%.4f" % r for r in ratios])]


PRESETS = (
    Preset("fig-gamma", "figure:gamma-sweep",
           tuple(Series("gamma_%g" % g, "example_1", STANDARD_LEVELS, gamma=g)
                 for g in (1.0, 0.1, 0.01, 0.0)),
           _check_gamma),
    Preset("fig-dimension", "figure:trace-dimension-sweep",
           tuple(Series("N_%d" % N, "example_1", STANDARD_LEVELS, trace_n=N)
                 for N in (1, 8, 16, 64)),
           _check_dimension),
    Preset("fig-perturbation", "figure:perturbed-solution",
           tuple(Series("N_%d" % N, "perturbed", STANDARD_LEVELS, trace_n=N)
                 for N in (1, 2)),
           _check_perturbation),
    Preset("fig-noise", "figure:random-noise",
           tuple(Series("eps_%g" % e, "example_1", STANDARD_LEVELS, eps=e, seed=7)
                 for e in (0.12, 0.06, 0.0)),
           _check_noise),
    Preset("fig-first-order", "figure:first-order-family",
           tuple(Series("u_%d" % N, "cosine_%d" % N, STANDARD_LEVELS, gamma=0.0)
                 for N in (1, 2, 3, 4)),
           _check_first_order),
    Preset("fig-second-order", "figure:second-order-family",
           tuple(Series("u_%d" % N, "cosine_%d" % N, P2_LEVELS, degree=2)
                 for N in (1, 2)),
           _check_second_order),
    Preset("fig-ratio", "figure:stability-ratio",
           tuple(Series("u_%d" % N, "cosine_%d" % N, (81,), gamma=0.0)
                 for N in (1, 2, 3, 4)),
           _check_ratio),
    Preset("necessity", "proposition:naive-fit-nonuniqueness", ()),
)


def by_name(name):
    for p in PRESETS:
        if p.name == name:
            return p
    raise KeyError("unknown preset %r" % (name,))
