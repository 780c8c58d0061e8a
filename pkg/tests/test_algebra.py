from __future__ import annotations

import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paraholo.algebra import (
    BlockPatternError,
    Certificate,
    ComplexMatrix,
    Outcome,
    algebra_center,
    find_central_complex_structure,
    generate_algebra,
    irreducibility_verdict,
    is_block_F,
    phi,
    phi_inv,
)
from paraholo.exact import ExactMatrix, Scalar, is_invariant
from paraholo.paper import (
    complex_structure,
    g_matrix,
    generated_h_generators,
    in_stabilizer_h,
    k_form,
    l_form,
    s_matrix,
)
from strategies import rand_matrix

I4 = ExactMatrix.identity(4)
PAPER_GENS = generated_h_generators()
# a cyclic shift and a diagonal with distinct entries generate all of M_4
SHIFT = ExactMatrix([[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]])
FULL_GENS = [SHIFT, ExactMatrix.diag(1, 2, 3, 4)]


def cm(rows) -> ComplexMatrix:
    """Complex matrix from rows of ``(re, im)`` pairs."""
    return ComplexMatrix(ExactMatrix([[re for re, _ in r] for r in rows]),
                         ExactMatrix([[im for _, im in r] for r in rows]))


def test_phi_of_g():
    assert phi(g_matrix()) == cm([[(Scalar(0, 1), 0), (0, 1)], [(0, 1), (Scalar(0, -1), 0)]])
    assert str(phi(g_matrix())) == "[√2, i]\n[i, -√2]"


def test_phi_of_s():
    assert phi(s_matrix(2, 3)) == cm([[(0, 0), (2, 3)], [(-2, -3), (0, 0)]])
    assert phi(I4) == ComplexMatrix.identity(2)
    assert phi(complex_structure()) == cm([[(0, 1), (0, 0)], [(0, 0), (0, 1)]])


def test_block_pattern_examples():
    assert is_block_F(g_matrix()) and is_block_F(I4) and is_block_F(s_matrix(1, 1))
    assert not is_block_F(k_form())
    assert not is_block_F(l_form())
    with pytest.raises(BlockPatternError):
        phi(k_form())
    with pytest.raises(ValueError):
        is_block_F(ExactMatrix.identity(3))


def test_generate_algebra_examples():
    alg = generate_algebra(PAPER_GENS)
    assert alg.dim == 8 and alg.exact and alg.mode == "exact"
    for a, b in itertools.product(range(2), repeat=2):
        for unit in ((1, 0), (0, 1)):
            e = [[(0, 0), (0, 0)], [(0, 0), (0, 0)]]
            e[a][b] = unit
            assert alg.contains(phi_inv(cm(e)))
    assert not alg.contains(k_form())
    assert generate_algebra([I4]).dim == 1
    assert generate_algebra([complex_structure()]).dim == 2
    # S(1,0)^2 = -I
    assert generate_algebra([s_matrix(1, 0)]).dim == 2
    # K and L generate a copy of M_2(R) acting on both halves
    assert generate_algebra([k_form(), l_form()]).dim == 4
    assert generate_algebra(FULL_GENS).dim == 16


def test_generate_algebra_errors():
    with pytest.raises(ValueError):
        generate_algebra([])
    with pytest.raises(ValueError):
        generate_algebra([I4, ExactMatrix.identity(3)])
    with pytest.raises(ValueError):
        generate_algebra([np.zeros((2, 3))])


def test_numeric_generation_agrees():
    alg = generate_algebra([m.to_numpy() for m in PAPER_GENS])
    assert alg.dim == 8 and alg.mode == "numeric"


def test_center_and_complex_structure():
    alg = generate_algebra(PAPER_GENS)
    assert len(algebra_center(alg)) == 2
    cs = find_central_complex_structure(alg)
    assert cs is not None and cs.c == 1
    j = cs.matrix
    assert j @ j == -I4
    assert all(j @ g == g @ j for g in PAPER_GENS)
    assert find_central_complex_structure(generate_algebra(FULL_GENS)) is None


def test_paper_verdict():
    v = irreducibility_verdict(PAPER_GENS)
    assert v.outcome is Outcome.IRREDUCIBLE
    assert v.certificate is Certificate.CENTRAL_COMPLEX_STRUCTURE
    assert v.algebra_dim == 8 and v.irreducible and not v.reducible


def test_full_algebra_verdict():
    v = irreducibility_verdict(FULL_GENS)
    assert v.outcome is Outcome.IRREDUCIBLE and v.certificate is Certificate.FULL_ALGEBRA


def test_block_diagonal_control_is_reducible():
    gens = [ExactMatrix.block([[ExactMatrix([[1, 2], [3, 4]]), ExactMatrix.zeros(2)],
                               [ExactMatrix.zeros(2), ExactMatrix([[0, 1], [-1, 0]])]]),
            ExactMatrix.diag(1, 2, 3, 4)]
    v = irreducibility_verdict(gens)
    assert v.reducible and v.certificate is None
    assert 0 < len(v.witness) < 4
    assert all(is_invariant(g, v.witness) for g in gens)


def test_rotation_blocks_and_identity_are_reducible():
    z = ExactMatrix.zeros(2)
    rot = ExactMatrix([[0, -1], [1, 0]])
    v = irreducibility_verdict([ExactMatrix.block([[rot, z], [z, -rot]])])
    e = [tuple(Scalar(int(i == j)) for j in range(4)) for i in range(4)]
    assert v.reducible and v.witness == [e[0], e[1]]
    v = irreducibility_verdict([I4])
    assert v.reducible and v.witness == [e[0]]


def test_generated_h_and_stabilizer_h():
    g, s10, s01 = PAPER_GENS
    # S(1, 0) is a quarter turn; S(0, 1) swaps the sign of K, so only its exponentials qualify
    assert in_stabilizer_h(g) and in_stabilizer_h(s10)
    assert not in_stabilizer_h(s01)
    assert s01.T @ k_form() @ s01 == -k_form()
    for x in (s10, s01):
        for c in (k_form(), l_form()):
            assert x.T @ c + c @ x == ExactMatrix.zeros(4)
    assert in_stabilizer_h(I4) and not in_stabilizer_h(k_form())
    assert not in_stabilizer_h(ExactMatrix.zeros(4))


def test_numeric_verdicts():
    v = irreducibility_verdict([m.to_numpy() for m in PAPER_GENS])
    assert v.irreducible and v.mode == "numeric"
    v = irreducibility_verdict([np.diag([1.0, 2.0, 3.0, 4.0])])
    assert v.reducible


def test_verdict_errors():
    with pytest.raises(ValueError):
        irreducibility_verdict([])
    with pytest.raises(ValueError):
        irreducibility_verdict([I4, ExactMatrix.identity(2)])


# -- random block matrices ---------------------------------------------------------


def rand_block(rng: random.Random) -> ExactMatrix:
    return ExactMatrix.block([[a := rand_matrix(rng, 2), b := rand_matrix(rng, 2)], [-b, a]])


@given(st.integers(0, 2 ** 32))
@settings(max_examples=200)
def test_phi_is_multiplicative(seed):
    rng = random.Random(seed)
    x, y = rand_block(rng), rand_block(rng)
    assert is_block_F(x @ y)
    assert phi(x @ y) == phi(x) @ phi(y)
    assert phi(x + y) == phi(x) + phi(y)
    assert phi_inv(phi(x)) == x


# -- the complex-side oracle ---------------------------------------------------------


def _rank(vectors, tol=1e-9) -> int:
    if not vectors:
        return 0
    s = np.linalg.svd(np.array(vectors), compute_uv=False)
    return int((s > tol * max(1.0, s[0])).sum())


def _closure(gens, field):
    """Basis of the unital algebra over ``field`` ('R' or 'C') generated by complex 2x2 matrices."""
    def vec(m):
        return np.concatenate([m.real.ravel(), m.imag.ravel()]) if field == "R" else m.ravel()

    basis = [np.eye(2, dtype=complex)]
    for g in gens:
        if _rank([vec(b) for b in basis + [g]]) > len(basis):
            basis.append(g)
    grew = True
    while grew:
        grew = False
        for a, b in itertools.product(list(basis), repeat=2):
            p = a @ b
            if _rank([vec(x) for x in basis + [p]]) > len(basis):
                basis.append(p)
                grew = True
    return basis


def oracle(cgens: list[np.ndarray]) -> Outcome:
    """Irreducibility of the real algebra on C^2 = R^4, decided on the complex side."""
    if len(_closure(cgens, "C")) < 4:
        return Outcome.REDUCIBLE
    real = _closure(cgens, "R")
    if len(real) == 8:
        return Outcome.IRREDUCIBLE
    assert len(real) == 4
    # a real form of M_2(C): quaternions (definite det) or split (indefinite det)
    dets = lambda m: np.linalg.det(m)
    gram = np.array([[(dets(a + b) - dets(a) - dets(b)).real / 2 for b in real] for a in real])
    ev = np.linalg.eigvalsh(gram)
    return Outcome.IRREDUCIBLE if (ev > 1e-9).all() or (ev < -1e-9).all() else Outcome.REDUCIBLE


def _rand_c(rng, lo=-2, hi=2) -> tuple[int, int]:
    return (rng.randint(lo, hi), rng.randint(lo, hi))


def _conj_pair(rng):
    """``P`` and ``P^-1`` for a product of complex unipotents, so ``det P = 1``."""
    z, w = _rand_c(rng), _rand_c(rng)
    up, up_inv = cm([[(1, 0), z], [(0, 0), (1, 0)]]), cm([[(1, 0), (-z[0], -z[1])], [(0, 0), (1, 0)]])
    lo, lo_inv = cm([[(1, 0), (0, 0)], [w, (1, 0)]]), cm([[(1, 0), (0, 0)], [(-w[0], -w[1]), (1, 0)]])
    return up @ lo, lo_inv @ up_inv


def family(kind: str, rng: random.Random) -> list[ComplexMatrix]:
    if kind == "generic":
        return [cm([[_rand_c(rng) for _ in range(2)] for _ in range(2)]) for _ in range(rng.randint(1, 3))]
    p, p_inv = _conj_pair(rng)
    if kind == "triangular":
        gens = [cm([[_rand_c(rng), _rand_c(rng)], [(0, 0), _rand_c(rng)]]) for _ in range(rng.randint(1, 3))]
    elif kind == "real-form":
        a, b = rng.sample(range(-3, 4), 2)
        gens = [cm([[(a, 0), (0, 0)], [(0, 0), (b, 0)]])]
        gens += [cm([[(rng.randint(-2, 2), 0) for _ in range(2)] for _ in range(2)])
                 for _ in range(rng.randint(1, 2))]
    else:
        qi = cm([[(0, 1), (0, 0)], [(0, 0), (0, -1)]])
        qj = cm([[(0, 0), (1, 0)], [(-1, 0), (0, 0)]])
        gens = [qi, qj] if rng.random() < 0.5 else [qi @ qj, qi.scale(1) + qj.scale(2)]
    return [p @ g @ p_inv for g in gens]


FAMILIES = ("generic", "triangular", "real-form", "quaternionic")


@given(st.integers(0, 2 ** 32), st.sampled_from(FAMILIES))
@settings(max_examples=50)
def test_verdict_never_contradicts_complex_oracle(seed, kind):
    rng = random.Random(seed)
    cgens = family(kind, rng)
    gens = [phi_inv(c) for c in cgens]
    expected = oracle([c.to_numpy() for c in cgens])
    v = irreducibility_verdict(gens)
    if v.outcome is not Outcome.UNKNOWN:
        assert v.outcome is expected
    # triangular and real-form sets have invariant planes defined over Q(i), so an
    # exact witness exists; a generic reducible set may need a field extension
    if kind in ("triangular", "real-form") or (kind == "generic" and expected is Outcome.IRREDUCIBLE):
        assert v.outcome is expected
    if v.reducible:
        assert all(is_invariant(g, v.witness) for g in gens)


@given(st.integers(0, 2 ** 32))
@settings(max_examples=30)
def test_quaternionic_sets_are_irreducible_or_unknown(seed):
    cgens = family("quaternionic", random.Random(seed))
    assert oracle([c.to_numpy() for c in cgens]) is Outcome.IRREDUCIBLE
    assert irreducibility_verdict([phi_inv(c) for c in cgens]).outcome is not Outcome.REDUCIBLE


@given(st.integers(0, 2 ** 32), st.sampled_from(FAMILIES[:3]))
@settings(max_examples=15)
def test_outcome_independent_of_generator_order(seed, kind):
    rng = random.Random(seed)
    gens = [phi_inv(c) for c in family(kind, rng)]
    base = irreducibility_verdict(gens).outcome
    shuffled = gens[::-1]
    v = irreducibility_verdict(shuffled)
    assert v.outcome is base
    a, b = generate_algebra(shuffled), generate_algebra(gens)
    assert a.dim == b.dim
    assert all(a.contains(m) for m in b.basis) and all(b.contains(m) for m in a.basis)
