import math
import os

import pytest

import acq

DATA = os.environ.get(
    "ACQ_TEST_DATA_DIR",
    os.path.join(os.path.dirname(__file__), "..", "..", "tests", "data"),
)


@pytest.fixture
def english():
    return acq.SymbolModel.load(os.path.join(DATA, "english27.json"))


def test_model_basics(english):
    assert len(english) == 27
    assert english.alphabet[26] == " "
    assert math.isclose(sum(english.probs), 1.0)
    assert acq.renyi_entropy(english, 0.0) == pytest.approx(math.log2(27))
    assert acq.renyi_entropy(english, 1.0) == pytest.approx(acq.shannon_entropy(english))
    assert acq.campbell_q(0.8) == pytest.approx(5 / 9)


def test_dyadic_example():
    m = acq.SymbolModel(["a", "b", "c"], [2, 1, 1])
    assert acq.codeword_length(m, "abc") == 6
    assert acq.analytic_length(m, "abc") == 6
    assert acq.quantize(m, 1.0, 8) == [128, 64, 64]
    assert acq.quantize(m, 0.5, 8) == [106, 75, 75]


def test_roundtrip(english):
    text = "the quick brown fox jumps over the lazy dog"
    for q in (0.0, 0.5, 1.0, 1.5):
        blob = acq.encode(english, text, q=q)
        assert blob[:4] == b"ACQ1"
        assert acq.decode(english, blob) == text


def test_errors(english):
    other = acq.SymbolModel.from_text("abc abc cab", "fil9_27")
    blob = acq.encode(english, "hello world")
    with pytest.raises(acq.DataError, match="model mismatch"):
        acq.decode(other, blob)
    with pytest.raises(acq.DataError):
        acq.decode(english, blob[:-1])
    with pytest.raises(acq.DataError):
        acq.encode(english, "digits 123")
    with pytest.raises(ValueError):
        acq.campbell_q(-1.0)


def test_sweep_and_threshold(english):
    strings = acq.simulate(english, 2000, 20, seed=7)
    assert len(strings) == 2000 and all(len(s) == 20 for s in strings)
    results = acq.sweep(english, strings, t=[0.8])
    (r,) = results
    assert r["q_t"] == pytest.approx(5 / 9)
    assert len(r["l_emp"]) == 21
    assert 0.0 < r["gap"] < 3.0

    h0 = acq.renyi_entropy(english, 0.0)
    h1 = acq.renyi_entropy(english, 1.0)
    plan = acq.plan_threshold(english, 0.5 * (h0 + h1), 20)
    assert plan["regime"] == "between"
    assert 0.0 < plan["q_star"] < 1.0
    assert plan["ub"] == pytest.approx(
        acq.chernoff_ub(english, plan["a"], plan["q_star"], 20))
    assert acq.plan_threshold(english, h0 + 0.1, 20)["regime"] == "above_H0"


def test_er_q(english):
    other = acq.SymbolModel.from_weights([1] * 27)
    assert abs(acq.er_q(english, english, 0.5)) < 1e-10
    assert acq.er_q(english, other, 1.0) == pytest.approx(acq.kl_divergence(english, other))
    assert acq.exp_avg_length([1.0, 2.0], 1.0) == pytest.approx(math.log2(3))
