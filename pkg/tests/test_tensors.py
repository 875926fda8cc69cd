import itertools
import math
import warnings
from math import comb

import numpy as np
import pytest

from fcireduce import (
    CIFileError,
    CITensor,
    Seed,
    distance_from_norm,
    load_ci_file,
    make_tensor,
    random_tensor,
    retained_weight,
    save_ci_file,
    tensor_element,
    truncate_and_renormalize,
)
from fcireduce.subsets import colex_rank

from oracles import dense_tensor, sign_of


def test_make_tensor_places_coefficients_in_colex_order(t_overlap):
    assert t_overlap.coeffs.shape == (comb(3, 2),)
    np.testing.assert_allclose(t_overlap.coeffs[colex_rank((0, 1))], 0.8)
    np.testing.assert_allclose(t_overlap.coeffs[colex_rank((1, 2))], 0.6)
    np.testing.assert_allclose(t_overlap.coeffs[colex_rank((0, 2))], 0.0)


def test_make_tensor_normalizes():
    t = make_tensor(3, 2, {(1, 2): 3.0, (1, 3): 4.0})
    np.testing.assert_allclose(np.sum(t.coeffs ** 2), 1.0, rtol=1e-15)
    np.testing.assert_allclose(t.coeffs[colex_rank((0, 1))], 0.6)


def test_make_tensor_accepts_pair_iterable():
    t = make_tensor(3, 2, [((1, 2), 1.0)])
    assert t == make_tensor(3, 2, {(1, 2): 1.0})


def test_items_yields_lexicographic_one_based_tuples(t_two_pair):
    assert list(t_two_pair.items()) == [
        ((1, 2), pytest.approx(math.sqrt(0.5))),
        ((3, 4), pytest.approx(math.sqrt(0.5))),
    ]


@pytest.mark.parametrize("bad,msg", [
    ({(1, 2, 3): 1.0}, "wrong length"),
    ({(0, 1): 1.0}, "out of range"),
    ({(1, 4): 1.0}, "out of range"),
    ({(2, 1): 1.0}, "strictly increasing"),
    ({(2, 2): 1.0}, "strictly increasing"),
    ({(1, 2): 0.0}, "zero"),
])
def test_make_tensor_rejects_bad_entries(bad, msg):
    with pytest.raises(ValueError, match=msg):
        make_tensor(3, 2, bad)


def test_make_tensor_rejects_duplicates():
    with pytest.raises(ValueError, match="duplicate"):
        make_tensor(3, 2, [((1, 2), 0.5), ((1, 2), 0.5)])


def test_more_particles_than_orbitals_rejected():
    with pytest.raises(ValueError):
        make_tensor(2, 3, {(1, 2, 3): 1.0})


def test_citensor_rejects_wrong_vector_length():
    with pytest.raises(ValueError, match="length"):
        CITensor(4, 2, np.ones(5))


def test_tensor_element_signs_and_scaling(t_overlap):
    s = 1.0 / math.sqrt(2.0)
    np.testing.assert_allclose(tensor_element(t_overlap, (1, 2)), 0.8 * s)
    np.testing.assert_allclose(tensor_element(t_overlap, (2, 1)), -0.8 * s)
    np.testing.assert_allclose(tensor_element(t_overlap, (3, 2)), -0.6 * s)
    assert tensor_element(t_overlap, (2, 2)) == 0.0
    with pytest.raises(ValueError):
        tensor_element(t_overlap, (1, 2, 3))
    with pytest.raises(ValueError):
        tensor_element(t_overlap, (0, 2))


def test_tensor_element_matches_dense_expansion():
    t = random_tensor(5, 3, Seed(101))
    c = dense_tensor(t)
    for idx in itertools.product(range(1, 6), repeat=3):
        zero_based = tuple(i - 1 for i in idx)
        np.testing.assert_allclose(
            tensor_element(t, idx), c[zero_based], atol=1e-15)


def test_full_tensor_is_antisymmetric():
    t = random_tensor(5, 3, Seed(7))
    c = dense_tensor(t)
    for perm in itertools.permutations(range(3)):
        swapped = np.transpose(c, perm)
        np.testing.assert_allclose(swapped, sign_of(perm) * c, atol=1e-15)


def test_seed_rejects_negative_components():
    with pytest.raises(ValueError):
        Seed(-1)
    with pytest.raises(ValueError):
        Seed(3, -2)


def test_seed_generator_is_pure_function_of_pair():
    a = Seed(42, 5).generator().random(8)
    b = Seed(42, 5).generator().random(8)
    c = Seed(42, 6).generator().random(8)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    np.testing.assert_array_equal(
        a, np.random.default_rng([42, 5]).random(8))


def test_random_tensor_deterministic_and_normalized():
    t1 = random_tensor(6, 3, Seed(9, 4))
    t2 = random_tensor(6, 3, Seed(9, 4))
    assert t1 == t2
    np.testing.assert_allclose(np.sum(t1.coeffs ** 2), 1.0, rtol=1e-14)
    assert random_tensor(6, 3, 9) == random_tensor(6, 3, Seed(9))


def test_random_tensor_draw_order_is_lexicographic():
    # reconstruct the draws by hand: four uniforms per tuple, lex order
    rng = np.random.default_rng([13, 0])
    values = []
    for _ in range(comb(4, 2)):
        r = rng.random(4)
        assert r[2] != r[3]
        values.append((r[0] - r[1]) / (r[2] - r[3]))
    values = np.asarray(values)
    values /= np.linalg.norm(values)

    t = random_tensor(4, 2, Seed(13))
    got = dict(t.items())
    for tup, want in zip(itertools.combinations(range(1, 5), 2), values):
        np.testing.assert_allclose(got[tup], want, rtol=1e-15)


def test_retained_weight_prefix_sums(t_overlap):
    np.testing.assert_allclose(retained_weight(t_overlap, 2), 0.64)
    np.testing.assert_allclose(retained_weight(t_overlap, 3), 1.0)
    with pytest.raises(ValueError):
        retained_weight(t_overlap, 1)
    with pytest.raises(ValueError):
        retained_weight(t_overlap, 4)


def test_truncate_and_renormalize(t_overlap):
    small, norm = truncate_and_renormalize(t_overlap, 2)
    np.testing.assert_allclose(norm, 0.64)
    assert small.num_orbitals == 2
    assert small.num_particles == 2
    np.testing.assert_allclose(small.coeffs, [1.0])

    # overlap with the original equals sqrt(norm), so norm = (1 - lam)**2
    overlap = float(t_overlap.coeffs[:1] @ small.coeffs)
    lam = 1.0 - overlap
    np.testing.assert_allclose(norm, (1.0 - lam) ** 2, rtol=1e-15)


def test_truncation_with_no_survivors_raises():
    t = make_tensor(3, 2, {(2, 3): 1.0})
    with pytest.raises(ValueError, match="survives"):
        truncate_and_renormalize(t, 2)


def test_distance_from_norm_values():
    np.testing.assert_allclose(distance_from_norm(1.0), 0.0)
    np.testing.assert_allclose(distance_from_norm(0.0), 2.0)
    np.testing.assert_allclose(distance_from_norm(0.64), 0.4)
    # tiny float excursions past the boundary are clamped
    assert distance_from_norm(1.0 + 1e-12) == 0.0
    with pytest.raises(ValueError):
        distance_from_norm(1.1)
    with pytest.raises(ValueError):
        distance_from_norm(-0.5)


def test_save_load_roundtrip(tmp_path):
    t = random_tensor(6, 3, Seed(2024))
    path = tmp_path / "state.json"
    save_ci_file(t, path)
    with warnings.catch_warnings():
        warnings.simplefilter("error")  # a clean roundtrip must not warn
        back = load_ci_file(path)
    assert back.num_orbitals == t.num_orbitals
    assert back.num_particles == t.num_particles
    # %.17g preserves every bit; only the final renormalization may move
    # the last ulp
    np.testing.assert_allclose(back.coeffs, t.coeffs, rtol=0, atol=2e-16)


def test_save_load_roundtrip_is_exact_for_simple_values(tmp_path, t_overlap):
    path = tmp_path / "exact.json"
    save_ci_file(t_overlap, path)
    assert load_ci_file(path) == t_overlap


def test_save_omits_zero_coefficients(tmp_path, t_overlap):
    path = tmp_path / "sparse.json"
    save_ci_file(t_overlap, path)
    text = path.read_text()
    assert '"orbitals": [1, 3]' not in text
    assert text.count('"orbitals"') == 2


def test_load_warns_on_unnormalized_input(tmp_path):
    path = tmp_path / "unnorm.json"
    path.write_text(
        '{"format_version": 1, "num_orbitals": 3, "num_particles": 2,\n'
        ' "coefficients": [{"orbitals": [1, 2], "value": 2.0}]}\n')
    with pytest.warns(UserWarning, match="normalizing"):
        t = load_ci_file(path)
    np.testing.assert_allclose(t.coeffs[colex_rank((0, 1))], 1.0)


@pytest.mark.parametrize("text,msg", [
    ("not json", "not valid JSON"),
    ("[1, 2]", "top level"),
    ('{"format_version": 2, "num_orbitals": 3, "num_particles": 2,'
     ' "coefficients": []}', "format_version"),
    ('{"format_version": 1, "num_particles": 2, "coefficients": []}',
     "missing key"),
    ('{"format_version": 1, "num_orbitals": 3, "num_particles": 4,'
     ' "coefficients": []}', "invalid counts"),
    ('{"format_version": 1, "num_orbitals": 3, "num_particles": 2,'
     ' "coefficients": [[1, 2]]}', "orbitals/value"),
    ('{"format_version": 1, "num_orbitals": 3, "num_particles": 2,'
     ' "coefficients": [{"orbitals": [2, 1], "value": 1.0}]}',
     "ascending"),
    ('{"format_version": 1, "num_orbitals": 3, "num_particles": 2,'
     ' "coefficients": [{"orbitals": [1, 4], "value": 1.0}]}',
     "out of range"),
    ('{"format_version": 1, "num_orbitals": 3, "num_particles": 2,'
     ' "coefficients": [{"orbitals": [1, 2], "value": true}]}',
     "real number"),
    ('{"format_version": 1, "num_orbitals": 3, "num_particles": 2,'
     ' "coefficients": [{"orbitals": [1, 2], "value": 1.0},'
     ' {"orbitals": [1, 2], "value": 0.5}]}', "duplicate"),
    ('{"format_version": 1, "num_orbitals": 3, "num_particles": 2,'
     ' "coefficients": []}', "zero"),
])
def test_load_rejects_malformed_files(tmp_path, text, msg):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(CIFileError, match=msg):
        load_ci_file(path)


def test_cifileerror_is_a_valueerror():
    assert issubclass(CIFileError, ValueError)
