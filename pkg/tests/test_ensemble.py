"""Instance generation: Gaussian matrices, sparse errors, fixture I/O."""

import numpy as np
import pytest

from lpdecode import (
    DomainError,
    ErrorSpec,
    SeedSpec,
    apply_decoder_success,
    ceil_count,
    floor_count,
    gaussian_matrix,
    make_instance,
    read_instance,
    write_instance,
)


def test_floor_count_guards_float_droop():
    # 0.29 * 100 evaluates to 28.999999999999996 in binary floats
    assert floor_count(0.29, 100) == 29
    assert floor_count(0.2, 10) == 2
    assert floor_count(0.25, 10) == 2
    assert floor_count(0.0, 50) == 0


def test_ceil_count_guards_float_droop():
    assert ceil_count(0.29, 100) == 29
    assert ceil_count(0.25, 10) == 3
    assert ceil_count(0.3, 10) == 3
    assert ceil_count(0.0, 50) == 0


def test_gaussian_matrix_reproducible():
    a = gaussian_matrix(20, 5, SeedSpec(7, 1))
    b = gaussian_matrix(20, 5, SeedSpec(7, 1))
    np.testing.assert_array_equal(a, b)
    c = gaussian_matrix(20, 5, SeedSpec(7, 2))
    assert not np.array_equal(a, c)


def test_gaussian_matrix_moments():
    a = gaussian_matrix(1000, 100, SeedSpec(3, 0))
    assert abs(a.mean()) <= 0.01
    assert abs(a.var() - 1.0) <= 0.02


def test_gaussian_matrix_rejects_wide():
    with pytest.raises(DomainError):
        gaussian_matrix(5, 6, SeedSpec(0, 0))
    with pytest.raises(DomainError):
        gaussian_matrix(5, 0, SeedSpec(0, 0))


def test_make_instance_noiseless():
    inst = make_instance(30, 4, ErrorSpec(rho=0.0), SeedSpec(1, 0))
    assert inst.support.size == 0
    np.testing.assert_array_equal(inst.e, np.zeros(30))
    np.testing.assert_array_equal(inst.y, inst.a @ inst.f)
    inst.validate()


def test_make_instance_support_size_and_sparsity():
    inst = make_instance(100, 10, ErrorSpec(rho=0.3), SeedSpec(2, 0))
    assert inst.support.size == 30
    off = np.setdiff1d(np.arange(100), inst.support)
    assert np.all(inst.e[off] == 0)
    assert np.all(inst.e[inst.support] != 0)
    inst.validate()


def test_make_instance_exact_measurement_identity():
    inst = make_instance(50, 5, ErrorSpec(rho=0.2), SeedSpec(3, 0))
    np.testing.assert_array_equal(inst.y, inst.a @ inst.f + inst.e)


def test_make_instance_deterministic():
    spec = ErrorSpec(rho=0.2)
    a = make_instance(40, 6, spec, SeedSpec(9, 4))
    b = make_instance(40, 6, spec, SeedSpec(9, 4))
    np.testing.assert_array_equal(a.a, b.a)
    np.testing.assert_array_equal(a.f, b.f)
    np.testing.assert_array_equal(a.e, b.e)
    np.testing.assert_array_equal(a.support, b.support)
    assert a.signs == b.signs


def test_make_instance_zero_message_shares_draws():
    # zeroing f must not disturb the matrix, support, or error draws
    g = make_instance(40, 6, ErrorSpec(rho=0.2), SeedSpec(11, 0), f_mode="gaussian")
    z = make_instance(40, 6, ErrorSpec(rho=0.2), SeedSpec(11, 0), f_mode="zero")
    np.testing.assert_array_equal(g.a, z.a)
    np.testing.assert_array_equal(g.e, z.e)
    np.testing.assert_array_equal(g.support, z.support)
    np.testing.assert_array_equal(z.f, np.zeros(6))
    np.testing.assert_array_equal(z.y, z.a @ z.f + z.e)


def test_make_instance_fixed_signs():
    pattern = {3: 1, 7: -1, 12: 1}
    spec = ErrorSpec(rho=0.2, sign_policy="fixed", fixed_signs=pattern)
    inst = make_instance(20, 3, spec, SeedSpec(5, 0))
    np.testing.assert_array_equal(inst.support, [3, 7, 12])
    assert inst.signs == pattern
    for i, s in pattern.items():
        assert np.sign(inst.e[i]) == s
    inst.validate()


def test_make_instance_constant_magnitudes():
    spec = ErrorSpec(rho=0.25, magnitude_law="constant", constant=2.5)
    inst = make_instance(40, 4, spec, SeedSpec(6, 0))
    np.testing.assert_allclose(np.abs(inst.e[inst.support]), 2.5)


def test_make_instance_from_direction():
    z = np.array([1.0, -2.0, 0.5])
    spec = ErrorSpec(rho=0.3, magnitude_law="from_direction", direction=z)
    inst = make_instance(30, 3, spec, SeedSpec(8, 0))
    az = inst.a @ z
    np.testing.assert_array_equal(inst.e[inst.support], az[inst.support])
    off = np.setdiff1d(np.arange(30), inst.support)
    assert np.all(inst.e[off] == 0)
    inst.validate()


def test_from_direction_rejects_wrong_length():
    spec = ErrorSpec(rho=0.3, magnitude_law="from_direction", direction=np.ones(4))
    with pytest.raises(DomainError):
        make_instance(30, 3, spec, SeedSpec(8, 0))


def test_error_spec_validation():
    with pytest.raises(DomainError):
        ErrorSpec(rho=1.0)
    with pytest.raises(DomainError):
        ErrorSpec(rho=-0.1)
    with pytest.raises(DomainError):
        ErrorSpec(rho=0.2, magnitude_law="unknown")
    with pytest.raises(DomainError):
        ErrorSpec(rho=0.2, magnitude_law="constant")
    with pytest.raises(DomainError):
        ErrorSpec(rho=0.2, magnitude_law="constant", constant=-1.0)
    with pytest.raises(DomainError):
        ErrorSpec(rho=0.2, sign_policy="fixed")
    with pytest.raises(DomainError):
        ErrorSpec(rho=0.2, sign_policy="fixed", fixed_signs={1: 2})
    with pytest.raises(DomainError):
        ErrorSpec(rho=0.2, magnitude_law="from_direction")
    with pytest.raises(DomainError):
        ErrorSpec(
            rho=0.2,
            magnitude_law="from_direction",
            direction=np.ones(3),
            sign_policy="fixed",
            fixed_signs={1: 1},
        )


def test_make_instance_rejects_bad_shapes():
    with pytest.raises(DomainError):
        make_instance(3, 5, ErrorSpec(rho=0.1), SeedSpec(0, 0))
    with pytest.raises(DomainError):
        make_instance(10, 2, ErrorSpec(rho=0.1), SeedSpec(0, 0), f_mode="other")


def test_fixed_signs_out_of_range_rejected():
    spec = ErrorSpec(rho=0.2, sign_policy="fixed", fixed_signs={25: 1})
    with pytest.raises(DomainError):
        make_instance(20, 3, spec, SeedSpec(0, 0))


def test_seed_spec_rejects_negative_stream():
    with pytest.raises(DomainError):
        SeedSpec(1, -1)


def test_apply_decoder_success():
    f = np.array([1.0, -2.0, 3.0])
    assert apply_decoder_success(f.copy(), f)
    assert apply_decoder_success(f + 0.5e-4, f)
    assert not apply_decoder_success(f + 10 * 1e-4, f)
    with pytest.raises(DomainError):
        apply_decoder_success(np.ones(2), f)


def test_instance_validate_catches_corruption():
    inst = make_instance(20, 3, ErrorSpec(rho=0.2), SeedSpec(4, 0))
    inst.y = inst.y + 1.0
    with pytest.raises(DomainError):
        inst.validate()


def test_instance_roundtrip(tmp_path):
    inst = make_instance(25, 4, ErrorSpec(rho=0.2), SeedSpec(13, 2))
    prefix = tmp_path / "fixture"
    csv_path, json_path = write_instance(inst, prefix)
    assert csv_path.exists() and json_path.exists()
    back = read_instance(prefix)
    np.testing.assert_array_equal(back.a, inst.a)
    np.testing.assert_array_equal(back.f, inst.f)
    np.testing.assert_array_equal(back.e, inst.e)
    np.testing.assert_array_equal(back.y, inst.y)
    np.testing.assert_array_equal(back.support, inst.support)
    assert back.signs == inst.signs
    assert back.seed == SeedSpec(13, 2)


def test_roundtrip_bytes_stable(tmp_path):
    inst = make_instance(10, 2, ErrorSpec(rho=0.3), SeedSpec(21, 0))
    write_instance(inst, tmp_path / "a")
    write_instance(inst, tmp_path / "b")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_read_instance_rejects_shape_mismatch(tmp_path):
    inst = make_instance(10, 2, ErrorSpec(rho=0.3), SeedSpec(21, 0))
    write_instance(inst, tmp_path / "bad")
    csv_file = tmp_path / "bad.csv"
    lines = csv_file.read_text().splitlines()
    csv_file.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(DomainError):
        read_instance(tmp_path / "bad")
