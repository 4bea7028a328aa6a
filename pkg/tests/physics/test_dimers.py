"""Tests for triangle-block inversion and the dimer hexamer."""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import linalg

from quasispin.physics import (
    HexamerCouplings,
    LatticeError,
    TriangleBlock,
    block_unitary,
    c3_permutation,
    degeneracy_pattern,
    exponential_overlap_curve,
    hexamer_hamiltonian,
    level_table_csv,
    spectrum_sweep,
    symmetry_sectors,
    triangle_spectrum,
)
from quasispin.physics.dimers import analytic_levels, crossing_gap, linear_coupling_curve, triangle_matrix


class TestTriangleBlock:
    """Tests for level inversion in three-site blocks."""

    def test_validation(self):
        """Test delta must be positive and sign must be +/-1."""
        with pytest.raises(LatticeError):
            TriangleBlock(e0=0.0, delta=0.0)
        with pytest.raises(LatticeError):
            TriangleBlock(e0=0.0, delta=1.0, sign=2)

    def test_inversion_identity(self):
        """Test U H- U^dagger = 2 e0 - H+."""
        e0, delta = 0.4, 1.3
        plus = triangle_matrix(TriangleBlock(e0, delta, 1)).entries
        minus = triangle_matrix(TriangleBlock(e0, delta, -1)).entries
        u = block_unitary().entries
        assert_allclose(u @ minus @ u.conj().T, 2 * e0 * np.eye(3) - plus, atol=1e-14)

    def test_spectra_mirror(self):
        """Test H+ has a doublet below a singlet and H- the reverse."""
        plus = triangle_spectrum(TriangleBlock(0.0, 1.0, 1))
        minus = triangle_spectrum(TriangleBlock(0.0, 1.0, -1))
        assert_allclose(plus, [-1.0, -1.0, 2.0], atol=1e-12)
        assert_allclose(minus, [-2.0, 1.0, 1.0], atol=1e-12)
        assert degeneracy_pattern(plus, 1e-9) == [2, 1]
        assert degeneracy_pattern(minus, 1e-9) == [1, 2]


class TestHexamer:
    """Tests for the six-site dimer ring."""

    @pytest.fixture
    def couplings(self):
        """Strong-dimer couplings."""
        return HexamerCouplings(d=1.0, f=0.1, g=0.3)

    def test_structure(self, couplings):
        """Test the Hamiltonian is real symmetric with the three bond families."""
        h = hexamer_hamiltonian(couplings).entries.real
        assert_allclose(h, h.T)
        assert h[0, 1] == 1.0 and h[0, 2] == 0.1 and h[1, 2] == 0.3
        assert h[0, 3] == 0.0
        assert couplings.strong_dimer

    def test_c3_symmetry(self, couplings):
        """Test the cyclic relabeling commutes with H."""
        h = hexamer_hamiltonian(couplings).entries
        p = c3_permutation().entries
        assert_allclose(h @ p, p @ h, atol=1e-14)
        assert_allclose(p @ p @ p, np.eye(6), atol=1e-14)

    def test_sectors_match_closed_forms(self, couplings):
        """Test singlet and doublet sector levels against the closed forms."""
        singlets, doublets = symmetry_sectors(hexamer_hamiltonian(couplings))
        exact_singlets, exact_doublets = analytic_levels(couplings)
        assert_allclose(singlets, exact_singlets, atol=1e-12)
        assert_allclose(doublets, np.repeat(exact_doublets, 2), atol=1e-12)

    def test_full_spectrum_pattern(self, couplings):
        """Test the six levels split as singlets and doubly degenerate pairs."""
        eigenvalues = linalg.eigvalsh(hexamer_hamiltonian(couplings).entries.real)
        assert sorted(degeneracy_pattern(eigenvalues, 1e-9)) == [1, 1, 2, 2]

    @pytest.mark.parametrize(("g", "expected"), [(0.3, -0.264), (-0.3, 0.623)])
    def test_crossing_gap(self, g, expected):
        """Test the lowest singlet minus lowest doublet changes sign with g."""
        assert crossing_gap(HexamerCouplings(d=1.0, f=0.1, g=g)) == pytest.approx(expected, abs=1e-3)


class TestSpectrumSweep:
    """Tests for parameter sweeps and crossing detection."""

    def test_linear_curve_crosses(self):
        """Test one crossing between g = 0.3 and g = -0.3."""
        curve = linear_coupling_curve(HexamerCouplings(1.0, 0.1, 0.3), HexamerCouplings(1.0, 0.1, -0.3))
        sweep = spectrum_sweep(curve, np.linspace(0.0, 1.0, 21))
        assert len(sweep.crossings) == 1
        assert 0.0 < sweep.crossings[0] < 1.0
        assert sweep.levels.shape == (21, 6)
        assert np.all(np.diff(sweep.levels, axis=1) >= 0)

    def test_no_crossing_is_reported(self, caplog):
        """Test a sweep without sign change returns an empty list and warns."""
        curve = linear_coupling_curve(HexamerCouplings(1.0, 0.1, 0.3), HexamerCouplings(1.0, 0.1, 0.2))
        sweep = spectrum_sweep(curve, np.linspace(0.0, 1.0, 5))
        assert sweep.crossings == []
        assert "No level crossing" in caplog.text

    def test_tilted_ring_crosses(self):
        """Test the exponential-overlap ring inverts between radial and tangential dimers."""
        sweep = spectrum_sweep(exponential_overlap_curve(xi=0.3), np.linspace(0.0, 90.0, 91))
        assert sweep.gaps[0] > 0
        assert sweep.gaps[-1] < 0
        assert len(sweep.crossings) >= 1
        assert all(0.0 < theta < 90.0 for theta in sweep.crossings)

    def test_labels(self):
        """Test degeneracy labels mark the doublets."""
        curve = linear_coupling_curve(HexamerCouplings(1.0, 0.1, 0.3), HexamerCouplings(1.0, 0.1, 0.3))
        sweep = spectrum_sweep(curve, [0.0])
        assert sorted(sweep.labels[0]) == ["D", "D", "D", "D", "S", "S"]

    def test_level_table(self):
        """Test the CSV has a header and one row per theta."""
        sweep = spectrum_sweep(exponential_overlap_curve(xi=0.3), np.linspace(0.0, 90.0, 4))
        lines = level_table_csv(sweep).splitlines()
        assert lines[0] == "theta,E1,E2,E3,E4,E5,E6,labels"
        assert len(lines) == 5

    def test_xi_must_be_positive(self):
        """Test the overlap length must be positive."""
        with pytest.raises(LatticeError):
            exponential_overlap_curve(xi=0.0)
