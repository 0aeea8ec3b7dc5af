"""Acceptance suite: one test per criterion, printing a pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.  Every
tolerance is pinned here; nothing is deferred to later calibration.
"""

import io
import json
import math
import time
from contextlib import contextmanager

import numpy as np

import entcat as ec
from entcat.simulate import result_record

import oracles

ALPHA_GRID = [round(0.55 + 0.05 * i, 2) for i in range(9)]  # 0.55 .. 0.95
SWEEP_GRID = [float(a) for a in np.linspace(0.55, 1.0 - 1e-6, 200)]


@contextmanager
def criterion(number, description):
    start = time.time()
    try:
        yield
    except BaseException:
        print(f"[FAIL] criterion {number}: {description} ({time.time() - start:.1f}s)")
        raise
    print(f"[PASS] criterion {number}: {description} ({time.time() - start:.1f}s)")


def in_window_problems():
    for n in (2, 3):
        for alpha in ALPHA_GRID:
            if 2 <= n <= ec.n_star(alpha) - 1:
                yield ec.ConcentrationProblem(n, alpha)


def test_criterion_01_closed_form_vs_search():
    with criterion(1, "searched 2x2 catalyst matches the closed form"):
        start = time.time()
        for problem in in_window_problems():
            closed = ec.optimal_two_qubit_catalyst(problem)
            found = ec.search_catalyst(problem, 2)
            c_err = abs(
                found.spectrum.coefficients[0] - closed.spectrum.coefficients[0]
            )
            p_err = abs(found.success_probability - closed.success_probability)
            assert c_err <= 1e-4, (problem, c_err)
            assert p_err <= 1e-6, (problem, p_err)
        assert time.time() - start < 60.0


def test_criterion_02_formula_consistency():
    with criterion(2, "closed forms equal the monotone-ratio evaluation"):
        for problem in in_window_problems():
            an = problem.alpha**problem.n
            closed = ec.optimal_two_qubit_catalyst(problem)
            c0 = float(closed.spectrum.coefficients[0])
            evaluated = ec.catalysis_probability(problem, closed.spectrum)
            assert abs((1 - an) / (1 - c0) - evaluated) <= 1e-9, problem
            plain = ec.conversion_probability(
                ec.initial_spectrum(problem), ec.target_spectrum(problem.n)
            )
            assert abs(2 * (1 - an) - plain) <= 1e-12, problem


def test_criterion_03_catalysis_advantage():
    with criterion(3, "strict catalytic advantage and the reference gain"):
        for problem in in_window_problems():
            closed = ec.optimal_two_qubit_catalyst(problem)
            assert closed.success_probability > ec.locc_probability(problem), problem
        reference = ec.ConcentrationProblem(2, 0.8)
        spec = ec.optimal_two_qubit_catalyst(reference)
        eta = spec.success_probability / ec.locc_probability(reference)
        assert abs(eta - 1.2254) <= 1e-3


def test_criterion_04_gain_asymptotics():
    with criterion(4, "probability gain scales as the inverse root near alpha=1"):
        alpha = 1.0 - 1e-6
        for n in (2, 3):
            problem = ec.ConcentrationProblem(n, alpha)
            spec = ec.optimal_two_qubit_catalyst(problem)
            eta = spec.success_probability / ec.locc_probability(problem)
            scaled = eta * math.sqrt(n * (1.0 - alpha))
            assert 0.693 <= scaled <= 0.721, (n, scaled)


def test_criterion_05_waiting_factor():
    with criterion(5, "waiting factor exact value and Monte Carlo agreement"):
        start = time.time()
        assert abs(ec.waiting_factor(2, 0.5) - 8.0 / 3.0) <= 1e-12
        seed = 1000
        for n_edges in (2, 8, 32):
            for p in (0.1, 0.5, 0.9):
                seed += 1
                check = ec.validate_waiting_factor(n_edges, p, 100_000, seed)
                assert check.passed, (n_edges, p, check.deviation_sigmas)
        assert time.time() - start < 120.0


def test_criterion_06_small_p_expansion():
    with criterion(6, "harmonic small-p limit; footnote reported, not asserted"):
        p = 1e-4
        for n_edges in (2, 8, 32):
            exact = ec.waiting_factor(n_edges, p)
            assert abs(exact * p / oracles.harmonic(n_edges) - 1.0) <= 1e-3, n_edges
        # The quoted small-p approximation grows geometrically in N while the
        # exact factor grows harmonically; report the divergence rather than
        # asserting the approximation.
        exact_32 = ec.waiting_factor(32, p)
        approx_32 = ec.waiting_factor_small_p(32, p)
        print(
            f"\n  footnote approximation at N=32, P=1e-4: {approx_32:.6g} "
            f"vs exact {exact_32:.6g} (ratio {approx_32 / exact_32:.3g})"
        )
        assert approx_32 / exact_32 > 1e3  # documented divergence


def test_criterion_07_rate_ratio_curves():
    with criterion(7, "rate-ratio curves: asymptotics, dominance, jumps"):
        start = time.time()
        rich2 = ec.sweep_rates(2, 32, SWEEP_GRID, [ec.AUX_RICH], [2])
        rich4 = ec.sweep_rates(2, 32, SWEEP_GRID, [ec.AUX_RICH], [4])
        none2 = ec.sweep_rates(2, 32, SWEEP_GRID, [ec.NO_AUX], [2])

        # (a) aux-rich 2x2 divergence and agreement with the probability gain
        top = rich2[-1]
        assert top.alpha == SWEEP_GRID[-1]
        scaled = top.eta_r * math.sqrt(2.0 * (1.0 - top.alpha))
        assert 0.67 <= scaled <= 0.75, scaled
        assert abs(top.eta_r / top.eta_p - 1.0) <= 0.05

        # (b) the 4x4 curve dominates the 2x2 curve pointwise
        for r2, r4 in zip(rich2, rich4):
            if r2.window_flag == ec.network.WINDOW_OK:
                assert r4.eta_r >= r2.eta_r - 1e-9, r2.alpha

        # (c) no-aux value near alpha = 1
        assert 0.7 <= none2[-1].eta_r <= 1.3, none2[-1].eta_r

        # (d) discontinuities coincide with increments of the copy requirement.
        # Every analytic ingredient of the no-aux ratio is continuous in alpha
        # except the integer n_cat, so jumps can only occur at its increments;
        # here every unit increment is verified to produce a downward jump that
        # disappears when the old copy count is substituted back in.
        in_window = [r for r in none2 if r.window_flag == ec.network.WINDOW_OK]
        t0_over_p0 = 2.0 * 25.0 / 2.0e5 / 0.5

        def eta_with_copies(row, n_cat):
            t_pri = 2 * t0_over_p0
            t_cycle = row.p_cat * t_pri + (1 - row.p_cat) * (2 + n_cat) * t0_over_p0
            return (t_pri * row.z_locc) / (t_cycle * row.z_cat)

        unit_steps = 0
        for r0, r1 in zip(in_window[:-1], in_window[1:]):
            dn = r1.n_cat - r0.n_cat
            assert dn >= 0  # copy requirement is non-decreasing
            assert abs(eta_with_copies(r1, r1.n_cat) - r1.eta_r) <= 1e-9
            if dn == 1:
                unit_steps += 1
                assert r1.eta_r < r0.eta_r, (r0.alpha, r1.alpha)
                assert eta_with_copies(r1, r0.n_cat) > r1.eta_r
            elif dn > 1:
                # grid under-resolves the copy count only at the extreme end
                assert r0.alpha > 0.99, r0.alpha
        assert unit_steps >= 5
        assert time.time() - start < 60.0


def test_criterion_08_known_catalysis_instance():
    with criterion(8, "catalyst unlocks the classic blocked conversion"):
        initial = ec.make_schmidt([0.4, 0.4, 0.1, 0.1])
        final = ec.make_schmidt([0.5, 0.25, 0.25])
        catalyst = ec.make_schmidt([0.6, 0.4])
        assert not ec.can_convert_deterministically(initial, final)
        assert ec.can_convert_deterministically(
            ec.tensor_product(initial, catalyst), ec.tensor_product(final, catalyst)
        )


def test_criterion_09a_abstract_simulator_matches_analytics():
    with criterion(9, "abstract simulator matches the analytic completion time"):
        start = time.time()
        problem = ec.ConcentrationProblem(2, 0.8)
        p_cat = ec.optimal_two_qubit_catalyst(problem).success_probability
        cfg = ec.SimConfig(
            n_edges=32, mode="abstract", trials=100_000, seed=2024,
            p_cat_override=p_cat, cycle_time_override_s=1e-3,
        )
        res = ec.simulate_abstract(cfg)
        expected = 1e-3 * ec.waiting_factor(32, p_cat)
        assert abs(res.mean_completion_s - expected) <= 3 * res.std_error_s
        assert time.time() - start < 300.0


def test_criterion_09b_detailed_simulator_within_5pct_of_analytics():
    # Known-failing criterion: the analytic rate composes fixed-length edge
    # cycles, while the slot-level loader is geometric per pair as specified.
    # At n=2, alpha=0.8, N=4, P0=0.5 the expected chain completion is 7.386
    # slots (Markov survival oracle, reproduced by the simulator to three
    # standard errors) against 5.823 analytic slots, a 21% rate gap, so the
    # stated 5% tolerance cannot hold.  See the decisions ledger.
    with criterion(9, "detailed simulator rate within 5% of the analytic rate"):
        edge = ec.EdgeParams(alpha=0.8, copies=2, length_km=25.0,
                             fiber_speed_km_s=2.0e5, herald_probability=0.5)
        aux = ec.AuxConfig(ec.AUX_RICH)
        analytic = ec.rate_catalytic(edge, aux, 4).rate_cat_hz
        cfg = ec.SimConfig(n_edges=4, mode="detailed", edge=edge, aux=aux,
                           max_slots=100_000, seed=31, trials=1)
        res = ec.simulate_detailed(cfg)
        deviation = abs(res.rate_hz - analytic) / analytic
        print(f"\n  detailed rate {res.rate_hz:.1f}/s vs analytic {analytic:.1f}/s "
              f"(deviation {deviation:.1%})")
        assert deviation <= 0.05, deviation


def test_criterion_10_intermediate_state_contract():
    with criterion(10, "intermediate state contract on randomized problems"):
        rng = np.random.default_rng(99)
        for _ in range(1000):
            d_i = int(rng.integers(2, 17))
            d_f = int(rng.integers(2, 17))
            initial = ec.make_schmidt(rng.random(d_i) + 1e-6)
            final = ec.make_schmidt(rng.random(d_f) + 1e-6)
            p = ec.conversion_probability(initial, final)
            gamma = ec.intermediate_state(initial, final)
            assert ec.can_convert_deterministically(initial, gamma)
            assert abs(ec.conversion_probability(gamma, final) - p) <= 1e-10


def test_criterion_11_deterministic_outputs():
    with criterion(11, "identical config and seed give byte-identical outputs"):
        grid = [float(a) for a in np.linspace(0.72, 0.95, 25)]

        def sweep_bytes():
            buf = io.StringIO()
            rows = ec.sweep_rates(2, 8, grid, [ec.AUX_RICH, ec.NO_AUX], [2])
            ec.write_sweep_csv(rows, buf)
            return buf.getvalue().encode()

        assert sweep_bytes() == sweep_bytes()

        edge = ec.EdgeParams(alpha=0.8, copies=2)
        aux = ec.AuxConfig(ec.FINITE_AUX, (ec.AuxPath(0.8, 0.9, 2.5e-4),))

        def sim_bytes():
            cfg = ec.SimConfig(n_edges=2, mode="detailed", edge=edge, aux=aux,
                               initial_stock=1, stock_capacity=4,
                               max_slots=20_000, seed=7)
            rec = result_record(cfg, ec.simulate_detailed(cfg))
            return (json.dumps(rec) + "\n").encode()

        assert sim_bytes() == sim_bytes()
