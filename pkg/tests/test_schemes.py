import pytest

from src.oracle.enumerator import arrival_model_for
from src.schemes.analytic import cascade_prob_correct, chain_prob_m1
from src.schemes.builders import (
    CascadeConfig, ChainConfig, TdmConfig,
    build_chain_detector, build_tdm_chain, build_tree_nport, uniform_tdm_couplings
)
from src.schemes.simulators import (
    cascade_table, chain_distribution, simulate_cascade, simulate_chain, simulate_tdm,
    suppression_grid
)
from src.utils.config import Settings
from src.utils.exceptions import ConfigurationError, ConstructionError, DomainError


def test_tree_nport_layout():
    """Test an 8-port tree has 7 beamsplitters and uniform arrival"""
    circuit = build_tree_nport(8)
    model   = arrival_model_for(circuit)

    assert circuit.mode_count == 8
    assert len(circuit.beamsplitters) == 7
    assert len(circuit.detectors) == 8
    assert list(model.arrival_probs) == pytest.approx([1 / 8] * 8, abs=1e-15)


def test_tree_nport_needs_power_of_two():
    """Test non power-of-two port counts are rejected"""
    with pytest.raises(ConstructionError):
        build_tree_nport(6)
    with pytest.raises(ConstructionError):
        CascadeConfig(1)


def test_cascade_simulation_matches_closed_form():
    """Test simulated cascade P(m=n) against the product formula"""
    for N in (2, 4, 8):
        for eta in (0.9, 1.0):
            for n in range(min(N, 3) + 1):
                simulated = simulate_cascade(n, CascadeConfig(N, eta))
                expected  = cascade_prob_correct(n, N, eta)
                assert simulated.correct == pytest.approx(expected, abs=1e-12)
                assert simulated.total() == pytest.approx(1.0, abs=1e-12)

    with pytest.raises(DomainError):
        cascade_prob_correct(3, 2, 0.9)


def test_cascade_two_photons_on_eight_ports():
    """Test the full perceived-count distribution for two photons"""
    distribution = simulate_cascade(2, CascadeConfig(8))

    assert distribution.p(0) == pytest.approx(0.0, abs=1e-15)
    assert distribution.p(1) == pytest.approx(0.125, abs=1e-12)
    assert distribution.p(2) == pytest.approx(0.875, abs=1e-12)
    assert distribution.p(3) == 0.0


def test_negative_photon_number():
    """Test simulators reject negative photon numbers"""
    with pytest.raises(DomainError):
        simulate_cascade(-1, CascadeConfig(2))
    with pytest.raises(DomainError):
        simulate_chain(-1, ChainConfig(1, 0.1))


def test_tdm_single_photon():
    """Test one photon over two round trips"""
    distribution = simulate_tdm(1, TdmConfig(0.5, round_trips=2))

    assert distribution.p(0) == pytest.approx(0.25, abs=1e-12)
    assert distribution.p(1) == pytest.approx(0.75, abs=1e-12)
    assert distribution.remainder == pytest.approx(0.25, abs=1e-12)


def test_tdm_two_photons():
    """Test same-bin photons register a single click"""
    distribution = simulate_tdm(2, TdmConfig(0.5, round_trips=2))

    assert distribution.p(2) == pytest.approx(0.25, abs=1e-12)
    assert distribution.p(1) == pytest.approx(0.6875, abs=1e-12)
    assert distribution.p(0) == pytest.approx(0.0625, abs=1e-12)
    assert distribution.total() == pytest.approx(1.0, abs=1e-12)


def test_tdm_full_coupling_empties_loop():
    """Test coupling 1 sends every photon into the first bin"""
    distribution = simulate_tdm(2, TdmConfig(1.0, round_trips=3))

    assert distribution.p(1) == pytest.approx(1.0, abs=1e-12)
    assert distribution.remainder == pytest.approx(0.0, abs=1e-12)


def test_tdm_loop_loss():
    """Test a lossy loop lowers later bins"""
    lossless    = simulate_tdm(1, TdmConfig(0.5, round_trips=2))
    lossy       = simulate_tdm(1, TdmConfig(0.5, loop_transmission=0.8, round_trips=2))

    assert lossy.p(1) == pytest.approx(0.5 + 0.5 * 0.8 * 0.5, abs=1e-12)
    assert lossy.p(1) < lossless.p(1)


def test_tdm_layout():
    """Test the unrolled loop carries a remainder mode without detector"""
    circuit = build_tdm_chain(TdmConfig(0.3, round_trips=4))

    assert circuit.mode_count == 5
    assert circuit.detector_modes == [0, 1, 2, 3]


def test_tdm_coupling_schedule_length():
    """Test per-trip couplings must match the round trips"""
    with pytest.raises(ConfigurationError):
        TdmConfig(0.5, round_trips=3, couplings=(0.5, 0.5))


def test_uniform_tdm_equals_cascade():
    """Test a uniformly filled loop behaves like a cascade of the same width"""
    for R in (2, 4):
        tdm = TdmConfig(1.0 / R, round_trips=R, couplings=uniform_tdm_couplings(R))
        for n in range(4):
            timed   = simulate_tdm(n, tdm)
            spatial = simulate_cascade(n, CascadeConfig(R))
            for m in range(n + 1):
                assert timed.p(m) == pytest.approx(spatial.p(m), abs=1e-12)


def test_chain_layout():
    """Test a k-chain has k click detectors and a silent terminal detector"""
    circuit = build_chain_detector(ChainConfig(3, 0.2, 0.9))

    assert circuit.mode_count == 4
    assert [bs.reflectivity for bs in circuit.beamsplitters] == pytest.approx([0.2, 0.25, 1 / 3])
    assert [d.condition.value for d in circuit.detectors] == ["click", "click", "click", "no_click"]


def test_chain_simulation_examples():
    """Test simulated chain acceptance values"""
    assert simulate_chain(1, ChainConfig(1, 0.1, 0.9)) == pytest.approx(0.09, abs=1e-12)
    assert simulate_chain(2, ChainConfig(1, 0.1, 0.9)) == pytest.approx(0.0261, abs=1e-12)
    assert simulate_chain(2, ChainConfig(2, 0.1, 1.0)) == pytest.approx(0.02, abs=1e-12)
    assert simulate_chain(0, ChainConfig(1, 0.1, 0.9)) == pytest.approx(0.0, abs=1e-15)


def test_chain_distribution_posterior():
    """Test the posterior over photon numbers sums to one"""
    rows = chain_distribution(5, ChainConfig(1, 0.1, 0.9))

    assert [r.n for r in rows] == list(range(6))
    assert sum(r.posterior for r in rows) == pytest.approx(1.0, abs=1e-12)
    for row in rows:
        assert row.accept_simulated == pytest.approx(row.accept_analytic, abs=1e-12)
    assert max(rows, key=lambda r: r.posterior).n == 1


def test_suppression_grid_cells():
    """Test grid cells against closed forms"""
    grid = suppression_grid([0.9, 1.0], [0.1, 0.3], n_max=3, settings=Settings(threads=2))

    assert len(grid.rows) == 2 * 2 * 4
    assert grid.cell(1.0, 0.3)[1] == pytest.approx(0.3, abs=1e-15)
    assert grid.cell(0.9, 0.1)[0] == 0.0
    assert grid.cell(0.9, 0.1)[2] == pytest.approx(0.0261, abs=1e-15)


def test_suppression_grid_skips_infeasible():
    """Test k * eta_ref > 1 cells are skipped for multi-stage chains"""
    grid = suppression_grid([0.9], [0.2, 0.6], n_max=3, k=2)

    assert grid.skipped == [(0.9, 0.6)]
    assert grid.cell(0.9, 0.6) == []
    assert len(grid.cell(0.9, 0.2)) == 4


def test_suppression_grid_empty_lists():
    """Test empty parameter lists are rejected"""
    with pytest.raises(ConfigurationError):
        suppression_grid([], [0.1], n_max=3)
    with pytest.raises(ConfigurationError):
        suppression_grid([0.9], [], n_max=3)


def test_multi_photon_suppression():
    """Test acceptance falls with photon number at high efficiency"""
    values = [chain_prob_m1(n, 0.011, 0.99) for n in range(1, 7)]

    assert values == sorted(values, reverse=True)
    assert values[0] == pytest.approx(0.01089, abs=1e-15)
    assert values[0] / values[1] > 10


def test_suppression_degrades_with_efficiency():
    """Test the n=1 to multi-photon acceptance ratio shrinks as efficiency drops"""
    grid = suppression_grid([0.99, 0.9, 0.8], [0.011], n_max=6)

    ratios = {
        n: [
            grid.cell(eta_eff, 0.011)[1] / grid.cell(eta_eff, 0.011)[n]
            for eta_eff in (0.99, 0.9, 0.8)
        ]
        for n in range(2, 7)
    }

    assert ratios[2][0] > 10
    for n, values in ratios.items():
        assert values == sorted(values, reverse=True), n
        assert values[0] > values[-1]


def test_cascade_table_rows():
    """Test cascade table carries the closed form only where m = n"""
    rows = cascade_table([2], [1.0], n_max=2)

    assert len(rows) == 1 + 2 + 3
    analytic = [r for r in rows if r['p_analytic'] is not None]
    assert [(r['n'], r['m']) for r in analytic] == [(0, 0), (1, 1), (2, 2)]
    for row in analytic:
        assert row['p_simulated'] == pytest.approx(row['p_analytic'], abs=1e-12)
