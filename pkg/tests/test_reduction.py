import math

import numpy as np

from exactsdp.certify import check_structural
from exactsdp.model import GeoCop, constraint_set, normalize
from exactsdp.reduction import facial_reduce, find_max_rank_point, remove_redundant
from exactsdp.sdp import relaxation_problem, solve
from exactsdp.symmat import SymMat, eig_sym, gram, inner, is_psd
from exactsdp.gallery import ex61_matrices, ex61_reduced_matrices, fig2_members

TOL = 1e-8
SQRT3_OVER_2 = math.sqrt(3.0) / 2.0


def ex61_problem():
    a, b, c = ex61_matrices()
    return GeoCop(n=4, Q=SymMat.diag([1.0, -1.0, 0.0, 0.0]), H=SymMat.identity(4),
                  bset=constraint_set(4, [a, b, c]))


def test_max_rank_trivial_cone():
    x, t = find_max_rank_point(constraint_set(3, [SymMat.zeros(3)]), TOL)
    assert abs(t - 1.0 / 3.0) <= 1e-6
    assert np.allclose(x.to_dense(), np.eye(3) / 3.0, atol=1e-6)


def test_max_rank_on_flat_cone():
    a, b, c = ex61_matrices()
    x, t = find_max_rank_point(constraint_set(4, [a, b, c]), TOL)
    assert t <= TOL
    ed = eig_sym(x)
    keep = ed.values > 1e-7 * ed.values[0]
    assert int(keep.sum()) == 2
    # the detected range must be the first two coordinates
    v = ed.vectors[:, keep]
    proj = v @ v.T
    assert np.allclose(proj, np.diag([1.0, 1.0, 0.0, 0.0]), atol=1e-3)


def test_max_rank_infeasible():
    x, t = find_max_rank_point(constraint_set(2, [SymMat.identity(2).scale(-1.0)]), TOL)
    assert x is None and t == -math.inf


def test_facial_reduce_worked_example_exact():
    rr = facial_reduce(ex61_problem(), TOL)
    assert rr.reduced_n == 2
    assert rr.rounds == 1
    pa, pb, pc = [m.to_dense() for m in rr.reduced.bset.members]
    assert np.array_equal(pa, [[2, 1], [1, 1]])
    assert np.array_equal(pb, [[-1, -2], [-2, -1]])
    assert np.array_equal(pc, [[1, 2], [2, 1]])
    assert np.array_equal(rr.reduced.Q.to_dense(), [[1, 0], [0, -1]])
    assert np.array_equal(rr.basis, np.eye(4)[:, :2])
    assert rr.slater_margin > TOL


def test_facial_reduce_exposing_matches_displayed_combination():
    # the displayed nonnegative combination B' + C' exposes the same face
    rr = facial_reduce(ex61_problem(), TOL)
    f = rr.exposing
    assert f is not None and is_psd(f, TOL)
    _, b, c = ex61_matrices()
    disp = b.add(c).scale(-1.0)  # -(B'+C') is psd and exposes the face
    assert is_psd(disp, TOL)
    ed_f = eig_sym(f)
    ed_d = eig_sym(disp)
    rf = ed_f.vectors[:, ed_f.values > 1e-9]
    rd = ed_d.vectors[:, ed_d.values > 1e-9]
    # equal ranges: projectors agree
    assert np.allclose(rf @ rf.T, rd @ rd.T, atol=1e-8)


def test_facial_reduce_identity_when_slater_holds():
    prob = GeoCop(n=3, Q=SymMat.diag([1.0, -1.0, 0.0]), H=SymMat.identity(3),
                  bset=normalize(constraint_set(3, fig2_members())))
    rr = facial_reduce(prob, TOL)
    assert rr.reduced_n == 3
    assert rr.exposing is None
    assert rr.slater_margin > TOL


def test_facial_reduce_collapse_to_zero():
    prob = GeoCop(n=2, Q=SymMat.identity(2), H=SymMat.identity(2),
                  bset=constraint_set(2, [SymMat.identity(2).scale(-1.0)]))
    rr = facial_reduce(prob, TOL)
    assert rr.reduced_n == 0 and rr.reduced is None


def test_value_preserved_by_reduction():
    prob = ex61_problem()
    # the unreduced problem has no Slater point: 1e-8 is its attainable accuracy
    direct = solve(relaxation_problem(prob), tol=1e-8)
    rr = facial_reduce(prob, TOL)
    red = solve(relaxation_problem(rr.reduced), tol=1e-9)
    assert direct.status == "optimal" and red.status == "optimal"
    assert abs(direct.value - red.value) <= 1e-6 * (1.0 + abs(red.value))
    assert abs(red.value + SQRT3_OVER_2) <= 1e-6


def test_feasibility_transport_and_lifting():
    rr = facial_reduce(ex61_problem(), TOL)
    a, b, c = ex61_matrices()
    # rank-one feasible points of the original cone: x = (cos t, sin t, 0, 0)
    # with sin 2t = -1/2
    base = math.asin(-0.5) / 2.0
    angles = [base, base + math.pi / 2.0 + math.pi / 4.0 - base / 1.0]
    angles = [base, math.pi / 2 - base + math.pi / 2, base + math.pi, 3 * math.pi / 2 - base + math.pi / 2]
    rng = np.random.default_rng(0)
    count = 0
    for _ in range(200):
        t = float(rng.choice(angles)) if angles else 0.0
        r = float(rng.uniform(0.2, 2.0))
        x = r * np.array([math.cos(t), math.sin(t), 0.0, 0.0])
        g = gram(x)
        if not (inner(a, g) >= -1e-9 and inner(b, g) >= -1e-9 and inner(c, g) >= -1e-9):
            continue
        count += 1
        xr = rr.basis.T @ x
        gr = gram(xr)
        for m in rr.reduced.bset.members:
            assert inner(m, gr) >= -1e-8
        lifted = rr.lift_vector(xr)
        gl = gram(lifted)
        for m in (a, b, c):
            assert inner(m, gl) >= -1e-8
    assert count >= 100  # plenty of transported samples actually checked


def test_post_reduction_structure():
    rr = facial_reduce(ex61_problem(), TOL)
    pruned, _ = remove_redundant(rr.reduced.bset, TOL)
    rep = check_structural(pruned, TOL)
    assert rep.a3 and rep.a4 and rep.a5


def test_remove_redundant_drops_psd_member():
    rr = facial_reduce(ex61_problem(), TOL)
    pruned, removed = remove_redundant(rr.reduced.bset, TOL)
    assert removed == (0,)
    kept = [m.to_dense().tolist() for m in pruned.members]
    assert [[-1, -2], [-2, -1]] in kept and [[1, 2], [2, 1]] in kept


def test_remove_redundant_scale_class():
    b, _ = ex61_reduced_matrices()
    s, removed = remove_redundant(constraint_set(2, [b, b.scale(2.0)]), TOL)
    assert len(s.members) == 1 and len(removed) == 1


def test_remove_redundant_zero_set():
    s, removed = remove_redundant(constraint_set(2, [SymMat.zeros(2)]), TOL)
    assert len(s.members) == 1 and s.members[0].data == (0.0, 0.0, 0.0)


def test_pruning_preserves_relaxation_value():
    prob = ex61_problem()
    rr = facial_reduce(prob, TOL)
    pruned, _ = remove_redundant(rr.reduced.bset, TOL)
    full = solve(relaxation_problem(rr.reduced), tol=1e-9)
    less = solve(relaxation_problem(
        GeoCop(n=rr.reduced_n, Q=rr.reduced.Q, H=rr.reduced.H, bset=pruned)), tol=1e-9)
    assert abs(full.value - less.value) <= 1e-6 * (1.0 + abs(full.value))
