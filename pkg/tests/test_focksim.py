"""Tests for the truncated-Fock-space oracle: state construction, matrix-free
generator application, RK4 propagation and moment extraction."""

import math
import warnings

import numpy as np
import pytest

from nlcoupler import (
    CoherentInput,
    CouplerParams,
    CutoffTooTight,
    FockCutoffs,
    OperatorWord,
    StateVector,
    StepTooCoarse,
    WordTooLong,
    coherent_product_state,
    default_step_count,
    evolution_coefficients,
    evolve,
    generator_action,
    moment,
    overlap,
)

P_FIG = CouplerParams(k=0.1 + 0j, gamma_nl=0.001 + 0j, delta_k=1e-4)
INP3 = CoherentInput(0.5, 0.2, 0.1)
CUT = FockCutoffs(8, 6, 4)

N_A = OperatorWord.from_counts(a=(1, 1))
N_B1 = OperatorWord.from_counts(b1=(1, 1))
N_B2 = OperatorWord.from_counts(b2=(1, 1))


def basis_state(cutoffs, idx):
    amps = np.zeros(cutoffs.shape, dtype=complex)
    amps[idx] = 1.0
    return StateVector(cutoffs=cutoffs, amplitudes=amps, truncation_deficit=0.0)


def manley_rowe(state):
    return (
        moment(state, N_A).real
        + moment(state, N_B1).real
        + 2.0 * moment(state, N_B2).real
    )


class TestFockCutoffs:
    def test_shape_and_dim(self):
        assert CUT.shape == (9, 7, 5)
        assert CUT.dim == 9 * 7 * 5

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            FockCutoffs(-1, 2, 2)

    def test_dimension_ceiling(self):
        with pytest.raises(ValueError, match="ceiling"):
            FockCutoffs(200, 200, 200)


class TestOperatorWord:
    def test_counts_and_adjoint(self):
        w = OperatorWord.from_counts(a=(2, 1), b2=(0, 3))
        assert w.counts() == {"a": (2, 1), "b1": (0, 0), "b2": (0, 3)}
        assert w.adjoint().counts() == {"a": (1, 2), "b1": (0, 0), "b2": (3, 0)}

    def test_normal_order_enforced(self):
        with pytest.raises(ValueError, match="normally ordered"):
            OperatorWord((("a", False), ("a", True)))
        # daggers of a different mode to the right are fine
        OperatorWord((("a", False), ("b1", True)))

    def test_word_too_long(self):
        with pytest.raises(WordTooLong):
            OperatorWord.from_counts(a=(3, 3), b1=(2, 1))


class TestCoherentProductState:
    def test_vacuum(self):
        st = coherent_product_state(CoherentInput(0, 0, 0), FockCutoffs(2, 2, 2))
        assert st.amplitudes[0, 0, 0] == 1.0
        assert np.count_nonzero(st.amplitudes) == 1
        assert st.truncation_deficit == 0.0

    def test_unit_norm(self):
        st = coherent_product_state(CoherentInput(0.9 + 0.3j, -0.4, 0.2j), FockCutoffs(12, 8, 6))
        assert abs(st.norm() - 1.0) < 1e-12

    def test_deficit_matches_poisson_tails(self):
        # independent oracle: upward partial sums of the Poisson weights
        def tail(lam, n_max):
            log_terms = []
            for n in range(n_max + 1, n_max + 60):
                log_terms.append(n * math.log(lam) - math.lgamma(n + 1) if lam > 0 else -math.inf)
            return math.exp(-lam) * sum(math.exp(t) for t in log_terms) if lam > 0 else 0.0

        st = coherent_product_state(INP3, CUT)
        kept = (1 - tail(0.25, 8)) * (1 - tail(0.04, 6)) * (1 - tail(0.01, 4))
        expected = 1.0 - kept
        # 40-digit reference evaluation of the same quantity: 9.2542078e-12
        assert st.truncation_deficit == pytest.approx(9.2542078185e-12, rel=1e-6)
        assert st.truncation_deficit == pytest.approx(expected, rel=1e-6)
        assert st.truncation_deficit < 1e-10

    def test_cutoff_too_tight(self):
        with pytest.raises(CutoffTooTight):
            coherent_product_state(CoherentInput(3.0, 0, 0), FockCutoffs(4, 2, 2))


class TestMoment:
    def test_coherent_eigenvalue(self):
        # tolerance sits at the truncation floor of the (8,6,4) box
        st = coherent_product_state(INP3, CUT)
        assert moment(st, OperatorWord.from_counts(a=(0, 1))) == pytest.approx(0.5, abs=1e-9)

    def test_fock_number(self):
        st = basis_state(FockCutoffs(4, 2, 2), (3, 0, 0))
        assert moment(st, N_A) == pytest.approx(3.0, abs=1e-14)

    def test_coherent_normal_ordered_factorization(self):
        st = coherent_product_state(CoherentInput(0.7, 0.0, 0.0), FockCutoffs(14, 2, 2))
        assert moment(st, OperatorWord.from_counts(a=(2, 2))) == pytest.approx(0.7**4, abs=1e-10)

    def test_hermiticity(self):
        rng = np.random.default_rng(11)
        cut = FockCutoffs(3, 3, 3)
        amps = rng.standard_normal(cut.shape) + 1j * rng.standard_normal(cut.shape)
        amps /= np.linalg.norm(amps)
        st = StateVector(cutoffs=cut, amplitudes=amps, truncation_deficit=0.0)
        for word in (
            OperatorWord.from_counts(a=(0, 2)),
            OperatorWord.from_counts(a=(1, 0), b1=(0, 1)),
            OperatorWord.from_counts(a=(2, 1), b1=(1, 1), b2=(0, 1)),
        ):
            assert moment(st, word) == pytest.approx(moment(st, word.adjoint()).conjugate(), abs=1e-12)

    def test_against_dense_matrices(self):
        # independent path: dense kron ladders in a larger box
        rng = np.random.default_rng(5)
        cut = FockCutoffs(3, 3, 3)
        amps = rng.standard_normal(cut.shape) + 1j * rng.standard_normal(cut.shape)
        amps /= np.linalg.norm(amps)
        st = StateVector(cutoffs=cut, amplitudes=amps, truncation_deficit=0.0)

        big = 8
        emb = np.zeros((big, big, big), dtype=complex)
        emb[:4, :4, :4] = amps
        ann = np.diag(np.sqrt(np.arange(1, big)), 1)
        eye = np.eye(big)
        ops = {
            "a": np.kron(np.kron(ann, eye), eye),
            "b1": np.kron(np.kron(eye, ann), eye),
            "b2": np.kron(np.kron(eye, eye), ann),
        }
        psi = emb.ravel()
        for word in (
            OperatorWord.from_counts(a=(2, 2)),
            OperatorWord.from_counts(a=(1, 1), b1=(1, 1), b2=(1, 1)),
            OperatorWord.from_counts(a=(0, 1), b1=(2, 0), b2=(0, 2)),
        ):
            mat = np.eye(big**3, dtype=complex)
            for mode, dagger in word.letters:
                mat = mat @ (ops[mode].conj().T if dagger else ops[mode])
            dense = np.vdot(psi, mat @ psi)
            assert moment(st, word) == pytest.approx(dense, abs=1e-12)


class TestGeneratorAction:
    def test_annihilates_vacuum(self):
        st = basis_state(CUT, (0, 0, 0))
        out = generator_action(st, P_FIG, z=0.0)
        assert np.all(out.amplitudes == 0)

    def test_exchange_term(self):
        st = basis_state(CUT, (1, 0, 0))
        out = generator_action(st, P_FIG, z=0.0)
        expected = np.zeros(CUT.shape, dtype=complex)
        expected[0, 1, 0] = -P_FIG.k
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)

    def test_shg_term(self):
        st = basis_state(CUT, (0, 0, 1))
        out = generator_action(st, P_FIG, z=0.0)
        expected = np.zeros(CUT.shape, dtype=complex)
        expected[0, 2, 0] = -P_FIG.gamma_nl.conjugate() * math.sqrt(2.0)
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)

    def test_hermitian_on_box(self):
        rng = np.random.default_rng(3)
        cut = FockCutoffs(4, 4, 3)

        def rand_state():
            a = rng.standard_normal(cut.shape) + 1j * rng.standard_normal(cut.shape)
            return StateVector(cutoffs=cut, amplitudes=a / np.linalg.norm(a), truncation_deficit=0.0)

        for z in (0.0, 13.7):
            phi, psi = rand_state(), rand_state()
            g_psi = generator_action(psi, P_FIG, z)
            g_phi = generator_action(phi, P_FIG, z)
            lhs = np.vdot(phi.amplitudes, g_psi.amplitudes)
            rhs = np.vdot(g_phi.amplitudes, psi.amplitudes)
            assert lhs == pytest.approx(rhs, abs=1e-12)


class TestEvolve:
    def test_beam_splitter_anchor(self):
        # Gamma=0 must reproduce the linear-block coefficients: the output is
        # the coherent product with rotated amplitudes (sign convention anchor)
        p = CouplerParams(0.1 + 0j, 0j, 1e-4)
        inp = CoherentInput(0.5, 0.2, 0.0)
        cut = FockCutoffs(10, 10, 2)  # cutoffs generous: full a<->b1 exchange
        s0 = coherent_product_state(inp, cut)
        for z in (5.0, 25.0, 60.0):
            st = evolve(s0, p, z)
            cf = evolution_coefficients(p, z)
            out = CoherentInput(cf.f1 * inp.alpha + cf.f2 * inp.beta,
                                cf.g1 * inp.alpha + cf.g2 * inp.beta, 0.0)
            ref = coherent_product_state(out, cut)
            assert abs(overlap(ref, st)) > 1.0 - 1e-8

    def test_shg_only_conservation(self):
        # isolate the quadratic terms: vanishing linear coupling, empty a mode
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            p = CouplerParams(k=0j, gamma_nl=0.01 + 0j, delta_k=1e-4)
        s0 = coherent_product_state(CoherentInput(0.0, 1.0, 0.0), FockCutoffs(1, 12, 8))
        w0 = moment(s0, N_B1).real + 2 * moment(s0, N_B2).real
        st = evolve(s0, p, 30.0, steps=600)
        w1 = moment(st, N_B1).real + 2 * moment(st, N_B2).real
        assert abs(w1 - w0) < 1e-8
        # photons actually moved to the harmonic
        assert moment(st, N_B2).real > 1e-4

    def test_norm_drift_and_manley_rowe(self):
        s0 = coherent_product_state(INP3, CUT)
        w0 = manley_rowe(s0)
        st = evolve(s0, P_FIG, 100.0)
        assert st.norm_drift < 1e-8
        assert abs(st.norm() - 1.0) < 1e-14
        assert abs(manley_rowe(st) - w0) < 1e-8

    def test_default_steps_rule(self):
        assert default_step_count(P_FIG, 100.0) == 1000
        assert default_step_count(P_FIG, 0.0) == 1

    def test_step_convergence_at_default(self):
        s0 = coherent_product_state(INP3, CUT)
        st = evolve(s0, P_FIG, 100.0, check_convergence=True)
        assert st.step_error is not None and st.step_error < 1e-6

    def test_step_too_coarse(self):
        s0 = coherent_product_state(INP3, CUT)
        with pytest.raises(StepTooCoarse):
            evolve(s0, P_FIG, 100.0, steps=8, check_convergence=True)

    def test_cutoff_convergence(self):
        base = FockCutoffs(12, 10, 6)
        sA = evolve(coherent_product_state(INP3, base), P_FIG, 60.0)
        sB = evolve(coherent_product_state(INP3, base.bumped(2)), P_FIG, 60.0)
        for w in (N_A, N_B1, N_B2):
            va, vb = moment(sA, w).real, moment(sB, w).real
            assert abs(va - vb) <= 1e-8 * abs(vb)

    def test_rk4_observed_order(self):
        s0 = coherent_product_state(INP3, CUT)
        psis = [
            evolve(s0, P_FIG, 60.0, steps=n, renormalize=False).amplitudes
            for n in (25, 50, 100)
        ]
        d1 = np.linalg.norm(psis[0] - psis[1])
        d2 = np.linalg.norm(psis[1] - psis[2])
        order = math.log2(d1 / d2)
        assert 3.5 < order < 4.5

    def test_zero_span_is_identity(self):
        s0 = coherent_product_state(INP3, CUT)
        st = evolve(s0, P_FIG, 0.0)
        np.testing.assert_array_equal(st.amplitudes, s0.amplitudes)

    def test_backwards_span_rejected(self):
        with pytest.raises(ValueError):
            evolve(coherent_product_state(INP3, CUT), P_FIG, 5.0, z_start=10.0)


class TestOverlap:
    def test_cutoff_mismatch(self):
        a = coherent_product_state(INP3, CUT)
        b = coherent_product_state(INP3, FockCutoffs(8, 6, 5))
        with pytest.raises(ValueError):
            overlap(a, b)
