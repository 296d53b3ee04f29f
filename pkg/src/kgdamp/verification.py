"""Self-checks surfaced by ``kgdamp verify``.

Each suite returns ``(passed, lines)``. The semigroup suite compares the
closed-form propagator with a generic scaling-and-squaring Taylor
exponential, which shares no code with it.
"""
import math

import numpy as np

from .diagnostics import discrete_energy, discrete_quadratic_energy
from .integrators import SimParams, run, run_mild
from .semigroup import generator, mode_eigenvalues, propagator_entries, measure_decay_constant
from .spectral_core import Field, make_grid, sobolev_norm

ORACLE_TIMES = (0.01, 0.1, 1.0, 10.0)


def expm_taylor(m, terms=30):
    """Matrix exponential by scaling and squaring with a truncated Taylor series."""
    m = np.asarray(m, dtype=np.complex128)
    norm = np.abs(m).sum(axis=-1).max()
    squarings = max(0, int(math.ceil(math.log2(norm / 0.25)))) if norm > 0.25 else 0
    a = m / 2.0**squarings
    out = np.eye(m.shape[0], dtype=np.complex128)
    term = out.copy()
    for j in range(1, terms):
        term = term @ a / j
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def oracle_deviation(k2_max=1024, times=ORACLE_TIMES):
    worst = 0.0
    for k2 in range(k2_max + 1):
        closed = propagator_entries(np.full(len(times), float(k2)), np.asarray(times))
        for i, t in enumerate(times):
            ref = expm_taylor(t * generator(k2))
            worst = max(worst, float(np.abs(closed[i] - ref).max()))
    return worst


def check_semigroup(k2_max=1024, t_max=20.0, n_t=2001):
    t = np.linspace(0.0, t_max, n_t)
    c1 = measure_decay_constant(k2_max, t)
    c2 = measure_decay_constant(2 * k2_max, t)
    rel = abs(c2 - c1) / c1
    dev = oracle_deviation(k2_max)
    re_max = max(max(mode_eigenvalues(k2).lambda_plus.real, mode_eigenvalues(k2).lambda_minus.real)
                 for k2 in range(1, k2_max + 1))
    ok = dev < 1e-9 and math.isfinite(c1) and rel < 0.01 and re_max <= -0.5
    lines = [
        f"decay constant C(k2<={k2_max}) = {c1:.12g}",
        f"decay constant C(k2<={2 * k2_max}) = {c2:.12g} (relative change {rel:.3e}, need < 1e-2)",
        f"max |closed form - expm oracle| = {dev:.3e} (need < 1e-9)",
        f"max Re(lambda) over nonzero modes = {re_max:.17g} (need <= -0.5)",
    ]
    return ok, lines


def _smooth_real_field(grid, rng, kmax=5):
    c = np.zeros(grid.shape, dtype=np.complex128)
    for k in range(-kmax, kmax + 1):
        c[grid.index_of((k,) * 1 + (0,) * (grid.dim - 1))] = rng.normal() / (1 + k * k)
    f = Field(grid, coeffs=c)
    return Field(grid, values=f.values.real)


def linear_conservation_drift(n=32, dt=0.01, steps=10_000, seed=0):
    grid = make_grid(1, n)
    psi0 = _smooth_real_field(grid, np.random.default_rng(seed))
    params = SimParams(dt=dt, t_final=steps * dt, damped=False, nonlinear=False)
    energies = []
    run(psi0, Field.zeros(grid), params, lambda _i, s: energies.append(discrete_quadratic_energy(s, dt)))
    e = np.asarray(energies)
    return float(np.abs(e - e[0]).max() / e[0]), len(e)


def nonlinear_drift(dt, n=32, t_final=10.0):
    grid = make_grid(1, n)
    psi0 = Field.from_function(grid, lambda x: 1 + 3 * np.cos(x))
    params = SimParams(dt=dt, t_final=t_final, damped=False)
    energies = []
    run(psi0, Field.zeros(grid), params, lambda _i, s: energies.append(discrete_energy(s, dt, 2.0)))
    e = np.asarray(energies)
    return float(np.abs(e - e[0]).max() / e[0])


def check_conservation():
    drift, levels = linear_conservation_drift()
    d1, d2 = nonlinear_drift(0.01), nonlinear_drift(0.005)
    ratio = d1 / d2
    ok = drift < 1e-12 and 3.0 <= ratio <= 5.0
    lines = [
        f"linear undamped quadratic-energy drift over {levels - 1} steps = {drift:.3e} (need < 1e-12)",
        f"nonlinear undamped E_n drift: dt=0.01 -> {d1:.3e}, dt=0.005 -> {d2:.3e}, ratio {ratio:.3f} (need 3..5)",
    ]
    return ok, lines


def self_convergence_slope(solver, dts, norm=lambda f: sobolev_norm(f, 0)):
    """``log2`` ratio of successive differences ``u(dt) - u(dt/2)``."""
    sols = [solver(dt) for dt in dts]
    diffs = [norm(a - b) for a, b in zip(sols, sols[1:])]
    slopes = [math.log(d1 / d2) / math.log(h1 / h2) for d1, d2, h1, h2 in zip(diffs, diffs[1:], dts, dts[1:])]
    return slopes, diffs


def _fig1_data(n=32):
    grid = make_grid(1, n)
    return Field.from_function(grid, lambda x: 1 + 3 * np.cos(x)), Field.zeros(grid)


def check_convergence(dts=(0.01, 0.005, 0.0025, 0.00125), t_final=1.0):
    psi0, v0 = _fig1_data()

    def scheme(dt):
        return run(psi0, v0, SimParams(dt=dt, t_final=t_final)).curr

    def mild(dt):
        return run_mild(psi0, v0, SimParams(dt=dt, t_final=t_final))[0]

    s_scheme, _ = self_convergence_slope(scheme, dts)
    s_mild, _ = self_convergence_slope(mild, dts)
    ok = min(s_scheme) >= 0.9 and min(s_mild) >= 0.9
    lines = [
        "damped scheme self-convergence slopes: " + ", ".join(f"{s:.3f}" for s in s_scheme) + " (need >= 0.9)",
        "exponential integrator slopes: " + ", ".join(f"{s:.3f}" for s in s_mild) + " (need >= 0.9)",
    ]
    return ok, lines


SUITES = {
    "semigroup": check_semigroup,
    "conservation": check_conservation,
    "convergence": check_convergence,
}


def verify(subcommand):
    if subcommand not in SUITES:
        raise ValueError(f"unknown verify subcommand {subcommand!r}; choose from {sorted(SUITES)}")
    ok, lines = SUITES[subcommand]()
    report = "\n".join([f"[{subcommand}]"] + [f"  {ln}" for ln in lines] + [f"  {'PASS' if ok else 'FAIL'}"])
    return ok, report
