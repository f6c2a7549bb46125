from __future__ import annotations

import numpy as np
import pytest

from app.errors import DegreeTooSmall, QuadratureNotConverged
from app.models import RepKind, SchottkyData
from app.permutations.permrep import fixed_points, sample_rep
from app.spectral.representations import (
    RepProvider,
    StandardRep,
    StdZeroRep,
    TrivialRep,
    complement_basis,
    make_rep,
)
from app.spectral.transfer import (
    TransferGeometry,
    TransferOperator,
    assemble,
    hs_norm_factored,
    hs_norm_kernel,
    hs_norm_matrix,
    read_matrix_dump,
    write_matrix_dump,
)
from app.words.intervals import mirror_partition, standard_words

from conftest import TEST_DEGREE


# ── Representations ──────────────────────────────────────────────────────────

def test_complement_basis_is_orthonormal_and_balanced() -> None:
    q = complement_basis(5)
    assert np.allclose(q.T @ q, np.eye(4))
    assert np.allclose(q.sum(axis=0), 0.0)


def test_std0_is_orthogonal_with_shifted_trace() -> None:
    perm = sample_rep(5, 2, 4)
    rep = StdZeroRep(perm)
    m = rep.matrix((1, 2, 4))
    assert m.shape == (4, 4)
    assert np.allclose(m.T @ m, np.eye(4))
    assert rep.trace((1, 2, 4)) == pytest.approx(fixed_points(perm, (1, 2, 4)) - 1)


@pytest.mark.parametrize("cls", [StandardRep, StdZeroRep])
def test_gram_shortcuts_match_the_matrix_pairing(cls) -> None:
    rep = cls(sample_rep(4, 2, 8))
    words = [(1,), (2, 1), (3, 3), (4, 1, 2)]
    assert np.allclose(rep.gram(words), RepProvider.gram(rep, words))


def test_make_rep() -> None:
    assert isinstance(make_rep(RepKind.TRIVIAL), TrivialRep)
    assert make_rep(RepKind.STD0, sample_rep(3, 2, 0)).dimension == 2
    with pytest.raises(ValueError):
        make_rep(RepKind.STD)


# ── Operator ─────────────────────────────────────────────────────────────────

def test_matrix_dimensions(group: SchottkyData) -> None:
    T = assemble(group, standard_words(group), 0.5, TrivialRep(), TEST_DEGREE)
    assert T.size == group.size * (TEST_DEGREE + 1)
    rep = StdZeroRep(sample_rep(3, 2, 1))
    T = assemble(group, standard_words(group), 0.5, rep, TEST_DEGREE)
    assert T.size == group.size * (TEST_DEGREE + 1) * 2


def test_constant_function_has_eigenvalue_three_at_zero(group: SchottkyData) -> None:
    T = assemble(group, standard_words(group), 0.0, TrivialRep(), TEST_DEGREE)
    eig = np.linalg.eigvals(T.matrix)
    assert np.max(np.abs(eig)) == pytest.approx(3.0, rel=1e-10)


def test_truncation_mass_is_small_at_test_degree(group: SchottkyData) -> None:
    T = assemble(group, standard_words(group), 0.5 + 2j, TrivialRep(), TEST_DEGREE)
    assert T.truncation_mass < 1e-8
    assert T.warnings == []


def test_tiny_degree_warns_or_raises(group: SchottkyData) -> None:
    geometry = TransferGeometry(group, standard_words(group), 1, strict=False)
    T = TransferOperator(geometry, TrivialRep()).matrix(0.5)
    assert T.warnings
    strict = TransferGeometry(group, standard_words(group), 1, strict=True)
    with pytest.raises(DegreeTooSmall):
        TransferOperator(strict, TrivialRep()).matrix(0.5)


def test_zero_dimensional_rep_gives_empty_operator(group: SchottkyData) -> None:
    T = assemble(group, standard_words(group), 0.5, StdZeroRep(sample_rep(1, 2, 0)), TEST_DEGREE)
    assert T.size == 0
    assert hs_norm_matrix(T) == 0.0


def test_factored_norm_equals_matrix_norm(group: SchottkyData) -> None:
    geometry = TransferGeometry(group, mirror_partition(0.1, group), TEST_DEGREE)
    operator = TransferOperator(geometry, StdZeroRep(sample_rep(4, 2, 2)))
    s = 0.6 + 1.5j
    assert hs_norm_factored(operator, s) == pytest.approx(hs_norm_matrix(operator.matrix(s)), rel=1e-9)


def test_kernel_norm_agrees_with_truncated_matrix(group: SchottkyData) -> None:
    tau, s = 0.3, complex(1.0, 0.5)
    T = assemble(group, mirror_partition(tau, group), s, TrivialRep(), 16)
    kernel_norm = hs_norm_kernel(group, tau, s, TrivialRep(), strict=False)
    assert kernel_norm == pytest.approx(hs_norm_matrix(T), rel=1e-2)


def test_derivative_matches_finite_difference(group: SchottkyData) -> None:
    words, s, h = standard_words(group), 0.4 + 0.3j, 1e-6
    dT = assemble(group, words, s, TrivialRep(), TEST_DEGREE, derivative=True).matrix
    plus = assemble(group, words, s + h, TrivialRep(), TEST_DEGREE).matrix
    minus = assemble(group, words, s - h, TrivialRep(), TEST_DEGREE).matrix
    assert np.allclose(dT, (plus - minus) / (2 * h), atol=1e-6)


def test_matrix_dump_layout(tmp_path, group: SchottkyData) -> None:
    T = assemble(group, standard_words(group), 0.7 + 0.1j, TrivialRep(), 4)
    path = tmp_path / "transfer.bin"
    write_matrix_dump(T, path)
    assert path.stat().st_size == 32 + 16 * T.size ** 2
    data, degree, dim = read_matrix_dump(path)
    assert (degree, dim) == (4, 1)
    assert np.array_equal(data, T.matrix)


def test_standard_norm_splits_into_trivial_and_std0(group: SchottkyData) -> None:
    words, s = mirror_partition(0.1, group), 0.7 + 2.0j
    rep = sample_rep(5, 2, 11)
    norms = {name: hs_norm_matrix(assemble(group, words, s, provider, TEST_DEGREE))
             for name, provider in [("std", StandardRep(rep)), ("triv", TrivialRep()),
                                    ("std0", StdZeroRep(rep))]}
    assert norms["std"] ** 2 == pytest.approx(norms["triv"] ** 2 + norms["std0"] ** 2, rel=1e-6)


def test_imaginary_kernel_residual_fails_in_strict_mode(monkeypatch: pytest.MonkeyPatch,
                                                        group: SchottkyData) -> None:
    monkeypatch.setattr("app.spectral.transfer._kernel_sum", lambda *args: 4.0 + 1e-3j)
    with pytest.raises(QuadratureNotConverged, match="imaginary residual"):
        hs_norm_kernel(group, 0.3, 1.0, TrivialRep(), strict=True)


def test_imaginary_kernel_residual_is_reported(monkeypatch: pytest.MonkeyPatch,
                                               group: SchottkyData) -> None:
    monkeypatch.setattr("app.spectral.transfer._kernel_sum", lambda *args: 4.0 + 1e-3j)
    warnings: list[str] = []
    assert hs_norm_kernel(group, 0.3, 1.0, TrivialRep(), strict=False, warnings=warnings) == 2.0
    assert len(warnings) == 1 and "imaginary residual" in warnings[0]
