"""Text-format instance archives round-trip exactly."""

import numpy as np
import pytest

from rial.problems import CcaInstance, PcaInstance, generate_cca_data, generate_pca_data
from rial.textio import load_instance, save_instance


def test_pca_roundtrip(tmp_path):
    inst = PcaInstance(generate_pca_data(12, 7, 0), 0.55, 3)
    path = tmp_path / "inst.txt"
    save_instance(path, inst)
    back = load_instance(path)
    assert isinstance(back, PcaInstance)
    assert back.mu == inst.mu
    assert back.r == inst.r
    np.testing.assert_array_equal(back.data, inst.data)


def test_cca_roundtrip(tmp_path):
    a, b = generate_cca_data(25, 4, 6, 1)
    inst = CcaInstance(a, b, mu1=0.1, mu2=0.25, r=2)
    path = tmp_path / "inst.txt"
    save_instance(path, inst)
    back = load_instance(path)
    assert isinstance(back, CcaInstance)
    assert (back.mu1, back.mu2, back.r) == (0.1, 0.25, 2)
    np.testing.assert_array_equal(back.a, a)
    np.testing.assert_array_equal(back.b, b)
    np.testing.assert_array_equal(back.cov_ab, inst.cov_ab)


def test_file_is_plain_text(tmp_path):
    inst = PcaInstance(generate_pca_data(3, 2, 2), 0.5, 1)
    path = tmp_path / "inst.txt"
    save_instance(path, inst)
    content = path.read_text(encoding="ascii")
    assert content.startswith("rial-instance v1 pca\n")
    assert "matrix data 3 2" in content


def test_rejects_foreign_file(tmp_path):
    path = tmp_path / "bogus.txt"
    path.write_text("not an instance\n")
    with pytest.raises(ValueError):
        load_instance(path)
