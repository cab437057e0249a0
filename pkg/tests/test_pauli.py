"""Phase-free Pauli algebra: products, the symplectic form, support."""

import pytest

from stabscape.lattice import LatticeGeometry, QubitIndex
from stabscape.pauli import PauliOperator, commutes, pauli_mul, weight_and_support

GEO = LatticeGeometry(2, 4, 1)


def op(*terms):
    return PauliOperator.from_terms(GEO, [(QubitIndex(site), p) for site, p in terms])


def random_pauli(rng, geometry=GEO):
    n = geometry.n_qubits
    terms = []
    for j in range(n):
        p = "IXYZ"[int(rng.integers(0, 4))]
        if p != "I":
            terms.append((geometry.qubit_at(j), p))
    return PauliOperator.from_terms(geometry, terms)


def test_x_times_z_is_y():
    u = (1, 2)
    assert op((u, "X")) * op((u, "Z")) == op((u, "Y"))


def test_self_inverse_random(rng):
    for _ in range(1000):
        e = random_pauli(rng)
        assert (e * e).is_identity()


def test_componentwise_product():
    u, v = (0, 0), (2, 1)
    lhs = op((u, "X"), (v, "Z")) * op((u, "Z"))
    assert lhs == op((u, "Y"), (v, "Z"))


def test_mul_associative_commutative_cancelling(rng):
    for _ in range(1000):
        a, b, c = (random_pauli(rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (a * b) == b


def test_mismatched_qubit_sets_rejected():
    other = LatticeGeometry(2, 5, 1)
    with pytest.raises(ValueError):
        PauliOperator.identity(GEO) * PauliOperator.identity(other)
    with pytest.raises(ValueError):
        commutes(PauliOperator.identity(GEO), PauliOperator.identity(other))


def test_commutes_basics():
    u, v = (0, 0), (1, 3)
    assert not commutes(op((u, "X")), op((u, "Z")))
    assert commutes(op((u, "X")), op((v, "Z")))
    assert commutes(op((u, "Y")), op((u, "Y")))


def test_commutes_symmetric_and_bilinear(rng):
    # commutes(a, bc) must equal XNOR of commutes(a, b), commutes(a, c)
    for _ in range(300):
        a, b, c = (random_pauli(rng) for _ in range(3))
        assert commutes(a, b) == commutes(b, a)
        assert commutes(a, b * c) == (commutes(a, b) == commutes(a, c))


def test_weight_and_support():
    w, s = weight_and_support(PauliOperator.identity(GEO))
    assert w == 0 and s == ()
    e = op(((0, 0), "X"), ((1, 1), "Y"), ((3, 2), "Z"))
    w, s = weight_and_support(e)
    assert w == 3
    assert set(s) == {QubitIndex((0, 0)), QubitIndex((1, 1)), QubitIndex((3, 2))}
    assert e.pauli_at(QubitIndex((1, 1))) == "Y"


def test_from_terms_cancels_repeats():
    u = (2, 2)
    assert PauliOperator.from_terms(GEO, [(QubitIndex(u), "X"), (QubitIndex(u), "X")]).is_identity()
    y = PauliOperator.from_terms(GEO, [(QubitIndex(u), "X"), (QubitIndex(u), "Z")])
    assert y == op((u, "Y"))


def test_translate_identity_and_period(rng):
    e = random_pauli(rng)
    assert e.translate((0, 0)) == e
    assert e.translate((GEO.L, 0)) == e
    shifted = e.translate((1, 2))
    assert shifted.weight == e.weight
    assert e.translate((1, 2)).translate((-1, -2)) == e


def test_symplectic_roundtrip(rng):
    e = random_pauli(rng)
    assert PauliOperator.from_symplectic(GEO, e.symplectic()) == e


def test_restricted_to():
    e = op(((0, 0), "X"), ((1, 1), "Y"))
    keep = [GEO.qubit_index(QubitIndex((1, 1)))]
    assert e.restricted_to(keep) == op(((1, 1), "Y"))


def test_pauli_mul_alias(rng):
    a, b = random_pauli(rng), random_pauli(rng)
    assert pauli_mul(a, b) == a * b
