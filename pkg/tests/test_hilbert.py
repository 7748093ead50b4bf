import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nvphonon.errors import InvalidQuantumNumber
from nvphonon.hilbert import (HilbertSpace, OperatorMatrix, TRIPLET_LABELS,
                              three_level_space, triplet_space,
                              two_level_space)


def test_space_shapes():
    sp = three_level_space(n_centers=2, fock_dim=8)
    assert sp.dims == (3, 3, 8)
    assert sp.dim == 72
    assert sp.n_max == 7
    assert sp.nv_labels == ("e", "g+1", "g-1")
    assert two_level_space().nv_labels == ("g+1", "g-1")
    assert triplet_space().nv_labels == TRIPLET_LABELS


@pytest.mark.parametrize("kwargs", [
    dict(nv_levels=4),
    dict(nv_levels=1),
    dict(n_centers=0),
    dict(n_centers=3),
    dict(fock_dim=3),
    dict(nv_levels=2, nv_labels=("a", "b", "c")),
])
def test_space_validation(kwargs):
    with pytest.raises(InvalidQuantumNumber):
        HilbertSpace(**kwargs)


def test_index_label_roundtrip():
    sp = three_level_space(n_centers=2, fock_dim=6)
    flat = sp.index("g+1", "g-1", n=4)
    assert sp.label_of(flat) == ("g+1", "g-1", 4)
    ket = sp.ket("g+1", "g-1", n=4)
    assert ket[flat] == 1.0 and np.sum(np.abs(ket)) == 1.0


@settings(max_examples=30)
@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 5))
def test_every_index_roundtrips(i, j, n):
    sp = three_level_space(n_centers=2, fock_dim=6)
    labels = sp.nv_labels
    flat = sp.index(labels[i], labels[j], n=n)
    assert sp.label_of(flat) == (labels[i], labels[j], n)


def test_index_validation():
    sp = three_level_space(n_centers=1, fock_dim=4)
    with pytest.raises(InvalidQuantumNumber):
        sp.index("g+1", "g-1", n=0)
    with pytest.raises(InvalidQuantumNumber):
        sp.index("g+1", n=4)
    with pytest.raises(InvalidQuantumNumber):
        sp.index("g0", n=0)
    with pytest.raises(InvalidQuantumNumber):
        sp.nv_operator(np.eye(3), center=1)


def test_ladder_commutator():
    sp = two_level_space(fock_dim=12)
    a = sp.destroy()
    comm = a @ a.conj().T - a.conj().T @ a
    # canonical except on the truncation edge n = n_max
    keep = [i for i in range(sp.dim) if sp.label_of(i)[-1] < sp.n_max]
    diff = (comm - sp.identity())[np.ix_(keep, keep)]
    assert np.allclose(diff, 0, atol=1e-13)
    assert np.allclose(a.conj().T @ a, sp.number(), atol=1e-13)


def test_pauli_algebra_on_qubit_manifold():
    sp = three_level_space(n_centers=1, fock_dim=4)
    sx, sy, sz = sp.sigma_x(0), sp.sigma_y(0), sp.sigma_z(0)
    pm = sp.pm_identity(0)
    assert np.allclose(sx @ sx, pm)
    assert np.allclose(sx @ sy - sy @ sx, 2j * sz, atol=1e-14)
    assert np.allclose(sp.sigma_plus(0) + sp.sigma_plus(0).conj().T, sx)
    # the excited level is outside the qubit manifold
    e_ket = sp.ket("e", n=0)
    assert np.allclose(sx @ e_ket, 0)
    assert np.allclose(pm @ e_ket, 0)


def test_lift_ordering():
    sp = two_level_space(n_centers=2, fock_dim=4)
    sz0 = sp.sigma_z(0)
    sz1 = sp.sigma_z(1)
    assert not np.allclose(sz0, sz1)
    assert np.allclose(sz0 @ sz1, sz1 @ sz0)
    ket = sp.ket("g+1", "g-1", n=0)
    assert np.allclose(sz0 @ ket, ket)
    assert np.allclose(sz1 @ ket, -ket)


def test_spin1_sx_requires_triplet_labels():
    trip = triplet_space(n_centers=1, fock_dim=4)
    sx = trip.spin1_sx(0)
    eigs = np.linalg.eigvalsh(sx[::4, ::4])
    assert np.allclose(sorted(eigs), [-1.0, 0.0, 1.0], atol=1e-12)
    with pytest.raises(InvalidQuantumNumber):
        three_level_space(fock_dim=4).spin1_sx(0)


def test_projector_completeness():
    sp = three_level_space(n_centers=1, fock_dim=5)
    total = sum(sp.projector(0, lab) for lab in sp.nv_labels)
    assert np.allclose(total, sp.identity())


def test_operator_matrix_time_dependence():
    sp = two_level_space(fock_dim=4).descriptor()
    dim = sp.dim
    rng = np.random.default_rng(0)
    static = rng.normal(size=(dim, dim))
    static = static + static.T
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    op = OperatorMatrix(sp, static, [(m, 3.0)])
    t = 0.37
    want = static + m * np.exp(3j * t) + m.conj().T * np.exp(-3j * t)
    assert np.allclose(op.at(t), want)
    assert op.hermiticity_defect(t) < 1e-14
    assert not op.is_static
    assert OperatorMatrix(sp, static).is_static


def test_jump_form_skips_conjugate():
    sp = two_level_space(fock_dim=4).descriptor()
    m = np.eye(sp.dim)
    op = OperatorMatrix(sp, np.zeros((sp.dim, sp.dim)), [(m, 2.0)],
                        hermitian=False)
    assert np.allclose(op.at(0.5), m * np.exp(1j))


def test_operator_matrix_addition_rules():
    spa = two_level_space(fock_dim=4).descriptor()
    spb = two_level_space(fock_dim=5).descriptor()
    za = np.zeros((spa.dim, spa.dim))
    op = OperatorMatrix(spa, za, [(np.eye(spa.dim), 1.0)])
    both = op + OperatorMatrix(spa, np.eye(spa.dim))
    assert len(both.terms) == 1
    assert np.allclose(both.static, np.eye(spa.dim))
    with pytest.raises(InvalidQuantumNumber):
        op + OperatorMatrix(spb, np.zeros((spb.dim, spb.dim)))
    with pytest.raises(InvalidQuantumNumber):
        op + OperatorMatrix(spa, za, hermitian=False)


def test_operator_matrix_shape_checks():
    sp = two_level_space(fock_dim=4).descriptor()
    with pytest.raises(InvalidQuantumNumber):
        OperatorMatrix(sp, np.eye(3))
    with pytest.raises(InvalidQuantumNumber):
        OperatorMatrix(sp, np.eye(sp.dim), [(np.eye(3), 1.0)])


def test_operator_matrix_is_defensive():
    sp = two_level_space(fock_dim=4).descriptor()
    src = np.eye(sp.dim)
    op = OperatorMatrix(sp, src)
    src[0, 0] = 99.0
    assert op.static[0, 0] == 1.0
    with pytest.raises(ValueError):
        op.static[0, 0] = 5.0
