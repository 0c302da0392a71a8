import math

import numpy as np
import pytest

from app.core.errors import ConfigurationError, ShapeError
from app.core.graded_space import grading_operator
from app.core.model_library import (
    BlockOperator,
    OperatorKind,
    SpinCouplings,
    SpinRates,
    build_jc,
    build_jc_dephasing,
    build_model,
    build_spin_models,
    build_tc2,
    check_parameters,
    default_probe,
    spin_block_dimension,
)

from tests.conftest import TC_PARAMS


def test_jc_blocks():
    model = build_jc(g=0.8, delta=0.3, kappa=0.5, gamma=0.2, N=3)
    assert model.basis.dims == (1, 2, 2, 2)
    assert model.basis.labels[2] == ("2g", "1e")
    np.testing.assert_allclose(model.hamiltonian.block(0), [[0]])
    for n in range(1, 4):
        c = 0.8 * math.sqrt(n)
        np.testing.assert_allclose(model.hamiltonian.block(n), [[0, c], [c, 0.3]])


def test_jc_lowering_operators_dense():
    model = build_jc(g=1, delta=0, kappa=1, gamma=1, N=2)
    sm = model.operators["sigma_minus"].to_dense(model.basis)
    a = model.operators["a"].to_dense(model.basis)
    # |1,e> = |0>|e> -> |0>|g>
    assert sm[0, 2] == 1
    # |2,e> = |1>|e> -> |1>|g>
    assert sm[1, 4] == 1
    assert np.count_nonzero(sm) == 2
    # a|1>|g> = |0>|g>, a|2>|g> = sqrt2 |1>|g>, a|1>|e> = |0>|e>
    assert a[0, 1] == 1
    assert a[1, 3] == pytest.approx(math.sqrt(2))
    assert a[2, 4] == 1


def test_jc_rejects_bad_input():
    with pytest.raises(ConfigurationError):
        build_jc(1, 0, 1, 1, N=0)
    with pytest.raises(ConfigurationError):
        build_jc(1, 0, -0.1, 1, N=2)


def test_jc_dephasing_channel_rate_is_gamma_z():
    model = build_jc_dephasing(1, 0.2, 0.5, 0.3, gamma_z=0.15, N=2)
    assert model.has_dephasing
    (channel,) = model.dephasing_channels
    assert channel.rate == 0.15
    np.testing.assert_allclose(channel.operator.block(1), np.diag([-1, 1]))


def test_jc_dephasing_zero_rate_is_plain_jc():
    model = build_jc_dephasing(1, 0.2, 0.5, 0.3, gamma_z=0.0, N=2)
    assert not model.has_dephasing
    assert model.dephasing_channels == ()


def test_tc_basis_and_first_block():
    model = build_tc2(g1=1.0, g2=0.7, delta1=0.3, delta2=-0.2, gamma1=0.2, gamma2=0.35, kappa=0.5, N=3)
    assert model.basis.dims == (1, 3, 4, 4)
    assert model.basis.labels[1] == ("1gg", "0ge", "0eg")
    assert model.basis.labels[2] == ("2gg", "1ge", "1eg", "0ee")
    np.testing.assert_allclose(
        model.hamiltonian.block(1), [[0, 0.7, 1.0], [0.7, -0.2, 0], [1.0, 0, 0.3]]
    )


def test_tc_lowering_blocks():
    model = build_tc2(1, 0.7, 0.3, -0.2, 0.2, 0.35, 0.5, N=3)
    s1 = model.operators["sigma_minus_1"]
    np.testing.assert_allclose(s1.block(1), [[0, 0, 1]])
    np.testing.assert_allclose(s1.block(2), [[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0]])
    np.testing.assert_allclose(s1.block(3), [[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]])


def test_tc_block_n_couplings_stay_inside_cutoff():
    model = build_tc2(1.0, 0.7, 0.3, -0.2, 0.2, 0.35, 0.5, N=3)
    h3 = model.hamiltonian.block(3)
    s3, s2 = math.sqrt(3), math.sqrt(2)
    expected = np.array(
        [
            [0, 0.7 * s3, 1.0 * s3, 0],
            [0.7 * s3, -0.2, 0, 1.0 * s2],
            [1.0 * s3, 0, 0.3, 0.7 * s2],
            [0, 1.0 * s2, 0.7 * s2, 0.1],
        ]
    )
    np.testing.assert_allclose(h3, expected, atol=1e-14)


def test_tc_xxz_terms():
    model = build_tc2(1.0, 0.7, 0.3, -0.2, 0.2, 0.35, 0.5, N=2, J=0.1, eta=0.05)
    h1 = model.hamiltonian.block(1)
    # σ1z σ2z: +1 on gg, -1 on ge and eg; exchange couples ge <-> eg
    np.testing.assert_allclose(np.diag(h1).real, [0.1, -0.2 - 0.1, 0.3 - 0.1])
    assert h1[1, 2] == pytest.approx(0.05)


def test_tc_needs_cutoff_two():
    with pytest.raises(ConfigurationError):
        build_tc2(1, 1, 0, 0, 1, 1, 1, N=1)


@pytest.mark.parametrize("M", [1, 2, 3, 4])
def test_spin_chain_dimensions(M):
    model = build_spin_models(M, SpinCouplings(detunings=(0.1,) * M), SpinRates(loss=(0.2,) * M))
    assert model.basis.dims == tuple(spin_block_dimension(M, n, False) for n in range(M + 1))
    assert model.basis.dims == tuple(math.comb(M, n) for n in range(M + 1))


@pytest.mark.parametrize("M,N", [(1, 3), (2, 4), (3, 2)])
def test_spins_with_oscillator_dimensions(M, N):
    model = build_spin_models(M, SpinCouplings(oscillator=(0.5,) * M), SpinRates(cavity=1.0), cutoff=N)
    assert model.basis.dims == tuple(spin_block_dimension(M, n, True) for n in range(N + 1))
    assert "a" in model.operators


def test_spin_models_reject_bad_sizes():
    with pytest.raises(ConfigurationError):
        build_spin_models(7, SpinCouplings(), SpinRates())
    with pytest.raises(ConfigurationError):
        build_spin_models(2, SpinCouplings(zz={(1, 1): 0.3}), SpinRates())
    with pytest.raises(ConfigurationError):
        build_spin_models(2, SpinCouplings(oscillator=(1.0, 1.0)), SpinRates())


def test_spin_hamiltonian_is_hermitian_and_excitation_preserving():
    model = build_spin_models(
        3,
        SpinCouplings(detunings=(0.1, -0.2, 0.3), zz={(1, 2): 0.2}, exchange={(2, 3): 0.4, (1, 3): 0.1}),
        SpinRates(loss=(0.1, 0.2, 0.3), dephasing=(0.05, 0, 0)),
    )
    H = model.hamiltonian.to_dense(model.basis)
    np.testing.assert_allclose(H, H.conj().T)
    assert len(model.dephasing_channels) == 1


def test_block_operator_shape_validation():
    model = build_jc(1, 0, 1, 1, N=2)
    bad = BlockOperator(OperatorKind.LOWERING, {1: [[0, 1]], 2: [[0, 1]]})
    with pytest.raises(ShapeError):
        bad.validate(model.basis)


def test_blocks_are_read_only():
    model = build_jc(1, 0, 1, 1, N=1)
    with pytest.raises(ValueError):
        model.hamiltonian.blocks[1][0, 0] = 5


def test_check_parameters():
    check_parameters("jaynes_cummings", {"g": 1, "delta": 0, "kappa": 1, "gamma": 1}, 2)
    with pytest.raises(ConfigurationError, match="missing"):
        check_parameters("jaynes_cummings", {"g": 1, "delta": 0, "kappa": 1}, 2)
    with pytest.raises(ConfigurationError, match="unknown"):
        check_parameters("jaynes_cummings", {"g": 1, "delta": 0, "kappa": 1, "gamma": 1, "gama": 1}, 2)
    with pytest.raises(ConfigurationError):
        check_parameters("spin_chain", {"M": 2, "g_1": 0.5}, None)
    with pytest.raises(ConfigurationError):
        check_parameters("spin_chain", {"M": 2, "J_1_3": 0.5}, None)
    check_parameters("spins_oscillator", {"M": 2, "g_1": 0.5, "kappa": 1.0, "J_1_2": 0.1}, 3)


def test_build_model_dispatch():
    model = build_model("spin_chain", {"M": 2, "delta_1": 0.3, "gamma_1": 0.2, "gamma_2": 0.1, "eta_1_2": 0.4}, None)
    assert model.basis.dims == (1, 2, 1)
    assert default_probe(model) == "sigma_minus_1"
    jc = build_model("jaynes_cummings", {"g": 1, "delta": 0, "kappa": 1, "gamma": 1}, 2)
    assert default_probe(jc) == "sigma_minus"


GRADED_MODELS = {
    "jc_dephasing": lambda: build_jc_dephasing(1.0, 0.3, 0.5, 0.2, gamma_z=0.15, N=3),
    "tc2": lambda: build_tc2(**TC_PARAMS, N=3, J=0.1, eta=0.05),
    "spins_oscillator": lambda: build_spin_models(
        2,
        SpinCouplings(detunings=(0.3, -0.1), exchange={(1, 2): 0.2}, oscillator=(0.5, 0.7)),
        SpinRates(loss=(0.2, 0.1), dephasing=(0.1, 0.05), cavity=1.0),
        cutoff=3,
    ),
}


@pytest.mark.parametrize("name", sorted(GRADED_MODELS))
def test_operators_respect_excitation_grading(name):
    model = GRADED_MODELS[name]()
    grading = grading_operator(model.basis)
    assert bool(model.dephasing_channels) == (name != "tc2")
    H = model.hamiltonian.to_dense(model.basis)
    np.testing.assert_allclose(H @ grading - grading @ H, 0, atol=1e-12)
    assert model.loss_channels
    for channel in model.loss_channels:
        A = channel.operator.to_dense(model.basis)
        assert np.any(A)
        np.testing.assert_allclose(A @ grading - grading @ A, A, atol=1e-12)
    for channel in model.dephasing_channels:
        C = channel.operator.to_dense(model.basis)
        np.testing.assert_allclose(C @ grading - grading @ C, 0, atol=1e-12)


def test_single_spin_with_oscillator_is_jaynes_cummings():
    spin = build_spin_models(
        1, SpinCouplings(detunings=(0.3,), oscillator=(0.8,)), SpinRates(loss=(0.2,), cavity=0.5), cutoff=4
    )
    jc = build_jc(g=0.8, delta=0.3, kappa=0.5, gamma=0.2, N=4)
    assert spin.basis.dims == jc.basis.dims
    assert spin.basis.labels == jc.basis.labels
    for n in range(5):
        np.testing.assert_allclose(spin.hamiltonian.block(n), jc.hamiltonian.block(n), atol=1e-14)
    for n in range(1, 5):
        np.testing.assert_allclose(
            spin.operators["sigma_minus_1"].block(n), jc.operators["sigma_minus"].block(n), atol=1e-14
        )
        np.testing.assert_allclose(spin.operators["a"].block(n), jc.operators["a"].block(n), atol=1e-14)
    assert [c.rate for c in spin.loss_channels] == [c.rate for c in jc.loss_channels]
