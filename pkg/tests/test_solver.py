import math

import numpy as np
import pytest

import cfdim.solver as solver
from cfdim.assembly import Correction, OperatorSpec, SparseRowMatrix, WeightFamily, assemble
from cfdim.errors import CertificateFailure, NoBracket
from cfdim.maps import Alphabet
from cfdim.mesh import build_mesh_domain
from cfdim.solver import SolveConfig, bracket_dimension, quantize, radius_bounds, solve_uncorrected
from cfdim.spectral import Direction, power_method, verify_certificate


def test_radius_below_one_above_the_coarse_bracket():
    ra, rb = radius_bounds(SolveConfig(Alphabet.i3(), n=50), 1.538)
    assert ra <= rb <= 1


def test_radius_decays_for_single_digit():
    cfg = SolveConfig(Alphabet.custom([1]), n=32)
    radii = [radius_bounds(cfg, s) for s in (1, 2, 4, 8)]
    for (a1, b1), (a2, b2) in zip(radii, radii[1:]):
        assert a2 < a1 and b2 < b1
    assert radii[-1][1] < 0.01


def test_sandwich_radii_ordered_for_i1():
    ra, rb = radius_bounds(SolveConfig(Alphabet.i1(), n=16, R=30), 1.8558)
    assert ra <= rb


def log_radius(alphabet, s, n=16, R=math.inf, correction=Correction.NONE):
    m = build_mesh_domain(n)
    eta, delta = solver.alphas(alphabet, s, R)
    alpha = {Correction.LOWER: eta, Correction.UPPER: delta, Correction.NONE: 0.0}[correction]
    M = assemble(OperatorSpec(alphabet, s, m, R, alpha, correction))
    return math.log(power_method(M, 1e-12).eigenvalue)


@pytest.mark.parametrize(
    "alphabet,R,s_star",
    [(Alphabet.i3(), math.inf, 1.5377), (Alphabet.i1(), 20, 1.85), (Alphabet.i2(), 20, 1.49)],
)
@pytest.mark.parametrize("correction", list(Correction))
def test_log_radius_decreasing_and_convex(alphabet, R, s_star, correction):
    grid = [s_star + d for d in (-0.2, -0.1, 0.0, 0.1, 0.2)]
    vals = [log_radius(alphabet, s, R=R, correction=correction) for s in grid]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    rng = np.random.default_rng(11)
    for _ in range(10):
        s1, s2 = sorted(rng.uniform(s_star - 0.25, s_star + 0.25, 2))
        mid = log_radius(alphabet, 0.5 * (s1 + s2), R=R, correction=correction)
        ends = 0.5 * (log_radius(alphabet, s1, R=R, correction=correction) + log_radius(alphabet, s2, R=R, correction=correction))
        assert mid <= ends + 1e-9


def test_bracket_is_certified_and_reverifiable(tmp_path):
    cfg = SolveConfig(Alphabet.i3(), n=24)
    br = bracket_dimension(cfg)
    assert br.s_lower <= br.s_upper
    assert br.r_at_upper <= 1 <= br.r_at_lower
    assert 0 <= 1 - br.r_at_upper <= 2e-5 and 0 <= br.r_at_lower - 1 <= 2e-5
    assert np.array_equal(br.certificate_upper, quantize(br.certificate_upper))
    mesh = cfg.mesh()
    # independent pass over dumped matrices
    for name, s, corr, vec, direction in (
        ("upper", br.s_upper, Correction.UPPER, br.certificate_upper, Direction.UPPER_DOMINATES),
        ("lower", br.s_lower, Correction.LOWER, br.certificate_lower, Direction.LOWER_DOMINATES),
    ):
        path = tmp_path / f"{name}.txt"
        assemble(OperatorSpec(cfg.alphabet, s, mesh, correction=corr)).dump(path)
        M = SparseRowMatrix.load(path)
        mv = np.zeros(M.n)
        coo = M.csr.tocoo()
        for r, c, v in zip(coo.row, coo.col, coo.data):
            mv[r] += v * vec[c]
        if direction is Direction.UPPER_DOMINATES:
            assert (mv <= vec).all()
        else:
            assert (mv >= vec).all()


def test_bracket_width_shrinks_with_h_for_infinite_sets():
    for alphabet in (Alphabet.i1(), Alphabet.i2()):
        coarse = bracket_dimension(SolveConfig(alphabet, n=24, R=20))
        fine = bracket_dimension(SolveConfig(alphabet, n=48, R=20))
        assert fine.width < coarse.width
        assert coarse.s_lower <= fine.s_lower and fine.s_upper <= coarse.s_upper + 1e-5


def test_finite_alphabet_uses_no_tail():
    assert solver.alphas(Alphabet.i3(), 1.5, 100) == (0.0, 0.0)


def test_no_bracket_when_iterations_exhausted():
    cfg = SolveConfig(Alphabet.i3(), n=16, max_secant=1, s_init=(0.5, 0.6))
    with pytest.raises(NoBracket):
        bracket_dimension(cfg)


def test_certificate_failure_after_nudges(monkeypatch):
    monkeypatch.setattr(solver, "verify_certificate", lambda *a, **k: False)
    with pytest.raises(CertificateFailure):
        bracket_dimension(SolveConfig(Alphabet.i3(), n=8))


def test_config_validation():
    with pytest.raises(ValueError):
        SolveConfig(Alphabet.i1(), s_init=(0.9, 1.5))
    with pytest.raises(ValueError):
        SolveConfig(Alphabet.i3(), tol_root=0)


def test_uncorrected_solve_matches_bracket_and_special_root():
    cfg = SolveConfig(Alphabet.i3(), n=24)
    br = bracket_dimension(cfg)
    s_hat = solve_uncorrected(cfg)
    assert br.s_lower <= s_hat <= br.s_upper
    s_special = solve_uncorrected(SolveConfig(Alphabet.special(), n=16), 2, WeightFamily.SPECIAL)
    assert abs(s_special - 1) < 1e-5


def test_certificates_survive_quantization():
    v = np.array([1.0, 0.123456789012345678, 3.3e-7])
    q = quantize(v)
    assert np.allclose(q, v, rtol=1e-14)
    assert [float(f"{x:.15g}") for x in v] == q.tolist()
    assert verify_certificate(np.eye(3), q, Direction.UPPER_DOMINATES)
