import numpy as np
import pytest
from mpmath import iv, mp

from lab.presets import PresetLibrary, resolve_field
from numfield.ball import (
    PrecisionExhausted,
    ball_json,
    interval_precision,
    is_real,
    overlaps,
    radius,
    refine_until,
    symmetric,
)
from numfield.element import FieldElement, FieldMismatch, elem_arith, embed, norm
from numfield.number_field import (
    CLASS_INTEGER,
    CLASS_OTHER,
    CLASS_PISOT,
    CLASS_SALEM,
    ReducibleError,
    parse_field,
    threshold_check,
    trace_polynomial,
)

GOLDEN = [-1, -1, 1]
PLASTIC = [-1, -1, 0, 1]
LEHMER = [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]


def _encloses(ball, reference):
    """The certified ball meets a 256-bit enclosure of the reference value."""
    with interval_precision(256):
        return overlaps(ball, reference())


def test_golden_field():
    nf = parse_field(GOLDEN)
    assert nf.degree == 2
    assert nf.classification == CLASS_PISOT
    assert _encloses(nf.beta_ball(64), lambda: (1 + iv.sqrt(5)) / 2)
    conjugate = nf.root_ball(nf.conjugate_indices()[0], 64)
    assert _encloses(conjugate, lambda: (1 - iv.sqrt(5)) / 2)
    assert threshold_check(nf)


def test_plastic_and_lehmer():
    plastic = parse_field(PLASTIC)
    assert plastic.classification == CLASS_PISOT
    assert threshold_check(plastic)
    assert abs(mp.mpf(plastic.beta_ball(64).a) - mp.mpf("1.3247179572")) < 1e-9

    lehmer = parse_field(LEHMER)
    assert lehmer.classification == CLASS_SALEM
    assert abs(mp.mpf(lehmer.beta_ball(64).a) - mp.mpf("1.17628081826")) < 1e-10
    assert not threshold_check(lehmer)


def test_integer_field_and_threshold_boundary():
    two = parse_field([-2, 1])
    assert two.classification == CLASS_INTEGER
    assert two.beta_ball(64) == iv.mpf(2)
    assert not threshold_check(parse_field([-1, 0, -1, 0, 1]))


def test_parse_field_rejections():
    with pytest.raises(ValueError, match="monic"):
        parse_field([-1, -1, 2])
    with pytest.raises(ReducibleError) as info:
        parse_field([1, -2, 1])
    assert "x - 1" in info.value.factor
    with pytest.raises(ValueError):
        parse_field([-1, 1])


def test_trace_polynomial_of_lehmer_is_degree_five():
    assert trace_polynomial(LEHMER).degree() == 5


def test_ring_arithmetic_in_golden_field():
    nf = parse_field(GOLDEN)
    beta = FieldElement.generator(nf)
    assert (beta * beta).coords == (1, 1)
    assert ((beta - 1) * beta).coords == (1, 0)
    a = FieldElement.from_coords(nf, [3, -2])
    assert a + 0 == a
    assert elem_arith(a, beta, "mul") == a * beta
    assert beta.times_beta() == beta ** 2
    assert FieldElement.from_coords(nf, [0, 0, 1]).coords == (1, 1)
    with pytest.raises(FieldMismatch):
        a + FieldElement.from_int(parse_field(PLASTIC), 1)


def test_embeddings():
    nf = parse_field(GOLDEN)
    value = embed(FieldElement.generator(nf), nf.beta_index, 64)
    assert _encloses(value, lambda: (1 + iv.sqrt(5)) / 2)
    conj = nf.conjugate_indices()[0]
    one = embed(FieldElement.from_int(nf, 1), conj, 64)
    assert _encloses(one, lambda: iv.mpf(1))
    shifted = embed(FieldElement.from_coords(nf, [1, 1]), conj, 64)
    assert _encloses(shifted, lambda: (3 - iv.sqrt(5)) / 2)
    assert radius(shifted) <= mp.ldexp(1, -64)


def test_norms():
    nf = parse_field(GOLDEN)
    assert norm(FieldElement.generator(nf)) == -1
    assert norm(FieldElement.from_int(nf, 1)) == 1
    assert norm(FieldElement.from_coords(nf, [-1, 1])) == -1
    assert norm(FieldElement.zero(nf)) == 0
    assert norm(FieldElement.from_int(parse_field([-2, 1]), 5)) == 5


def test_ball_helpers():
    with interval_precision(64):
        x = iv.mpf((1, 2))
        assert overlaps(x, iv.mpf((2, 3)))
        assert not overlaps(x, iv.mpf((3, 4)))
        assert symmetric(x) == iv.mpf((-2, 2))
        assert ball_json(iv.mpf(3))["center"] == "3.0"


def test_refine_until_gives_up_at_ceiling():
    with pytest.raises(PrecisionExhausted, match="the impossible"):
        refine_until(lambda bits: None, 32, 128, "the impossible")
    assert refine_until(lambda bits: bits if bits >= 128 else None, 32, 1024, "x") == 128


def test_preset_library(tmp_path):
    library = PresetLibrary()
    assert library.get("golden").coefficients == GOLDEN
    assert library.get("lehmer").coefficients == LEHMER
    assert "sqrt-golden" in library.names()
    with pytest.raises(KeyError):
        library.get("silver")
    assert resolve_field("plastic") == PLASTIC
    assert resolve_field("2") == [-2, 1]
    assert resolve_field("-1,-1,1") == GOLDEN

    (tmp_path / "fields.json").write_text('{"presets": [{"name": "three", "coefficients": [-3, 1]}]}')
    assert PresetLibrary(tmp_path).get("three").coefficients == [-3, 1]
    with pytest.raises(FileNotFoundError):
        PresetLibrary(tmp_path / "missing").presets()


@pytest.mark.parametrize("coeffs", [[1, -3, 1], [1, -4, 1]])
def test_reciprocal_quadratic_units_are_pisot(coeffs):
    nf = parse_field(coeffs)
    assert nf.classification == CLASS_PISOT
    assert threshold_check(nf)


def test_classification_of_non_pisot_fields():
    assert parse_field([-1, 0, -1, 0, 1]).classification == CLASS_OTHER
    assert parse_field(LEHMER).classification == CLASS_SALEM


def test_root_balls_keep_their_precision():
    nf = parse_field(GOLDEN)
    saved = iv.prec
    ball = nf.root_ball(nf.beta_index, 200)
    assert iv.prec == saved
    assert radius(ball) < mp.ldexp(1, -190)
    assert nf.root_disk(nf.beta_index, 200) is nf.root_disk(nf.beta_index, 200)


def _random_elements(nf, rng, count):
    elements = []
    while len(elements) < count:
        coords = rng.integers(-20, 21, size=nf.degree).tolist()
        if any(coords):
            elements.append(FieldElement.from_coords(nf, coords))
    return elements


@pytest.mark.parametrize("coeffs", [GOLDEN, PLASTIC, LEHMER])
def test_norm_is_multiplicative_and_integral(coeffs):
    nf = parse_field(coeffs)
    rng = np.random.default_rng(11)
    elements = _random_elements(nf, rng, 12)
    for a, b in zip(elements[::2], elements[1::2]):
        assert norm(a * b) == norm(a) * norm(b)
    assert all(abs(norm(a)) >= 1 for a in elements)


@pytest.mark.parametrize("coeffs", [GOLDEN, PLASTIC])
def test_embeddings_multiply_to_the_norm(coeffs):
    nf = parse_field(coeffs)
    for a in _random_elements(nf, np.random.default_rng(3), 5):
        balls = [embed(a, i, 64) for i in range(nf.degree)]
        with interval_precision(128):
            product = iv.mpf(1)
            for ball in balls:
                product = product * ball
            real, imag = (product, iv.mpf(0)) if is_real(product) else (product.real, product.imag)
            assert overlaps(real, iv.mpf(norm(a)))
            assert overlaps(imag, iv.mpf(0))


@pytest.mark.parametrize("coeffs", [GOLDEN, PLASTIC, LEHMER, [-2, 1], [1, -3, 1]])
def test_threshold_verdict_is_stable_under_precision(coeffs):
    nf = parse_field(coeffs)
    verdict = threshold_check(nf)
    for bits in (64, 128, 256, 512):
        with interval_precision(bits):
            beta = nf.beta_ball(bits)
            assert (beta ** 4 - beta ** 2 - 1 > 0) in (None, verdict)
