"""Boxed-answer extraction, tolerance comparison, and the total
verify_response / verify_program reward pipeline."""

import random

import pytest

from geoformal import (
    DiagnosticCode,
    compare_answer,
    extract_boxed,
    verify_program,
    verify_response,
)
from geoformal.errors import NoBoxedAnswerError, UnbalancedBracesError

HEX_RESPONSE = (
    "The shaded area is the circle minus the hexagon.\n"
    "\\boxed{Circle_R_Area N0 V0 RNgon_L_Area C6 N0 V1 Sum V1 V2 V0 Get V2}\n"
    "\\boxed{N0=7}"
)
ANGLE_RESPONSE = (
    "Setting up the straight angle:\n"
    "\\boxed{Sum N0 N1 C180 Sum N1 V0 C180 Get V0}\n"
    "\\boxed{N0 = 3*x  N1 = 4*x + 61}"
)
UNDEFINED_OPS_RESPONSE = (
    "Using equations: \\boxed{Solve 7y-2 Set V0 Get V0} \\boxed{N0=12}"
)


# --- extract_boxed ---

def test_extract_single_pair():
    extracted = extract_boxed("\\boxed{Get V0} and \\boxed{N0=7}")
    assert extracted.program_text == "Get V0"
    assert extracted.params_text == "N0=7"
    assert extracted.box_count == 2


def test_extract_concatenates_split_program_boxes():
    response = ("\\boxed{Circle_R_Area N0 V0 RNgon_L_Area C3 N0 V1}\n"
                "\\boxed{Sum V1 V2 V0 Get V2}\n"
                "\\boxed{N0=8}")
    extracted = extract_boxed(response)
    assert extracted.program_text == (
        "Circle_R_Area N0 V0 RNgon_L_Area C3 N0 V1 Sum V1 V2 V0 Get V2"
    )
    assert extracted.params_text == "N0=8"


def test_extract_no_box():
    with pytest.raises(NoBoxedAnswerError):
        extract_boxed("the answer is 42")


def test_extract_unbalanced_braces():
    with pytest.raises(UnbalancedBracesError):
        extract_boxed("\\boxed{Get V0")


def test_extract_nested_braces():
    extracted = extract_boxed("\\boxed{N0=(1+2)} text {unrelated}")
    assert extracted.params_text == "N0=(1+2)"


def test_extract_ignores_box_order():
    extracted = extract_boxed("\\boxed{N0=7} then \\boxed{Get V0}")
    assert extracted.program_text == "Get V0"
    assert extracted.params_text == "N0=7"


# --- compare_answer ---

def test_compare_exact_match():
    assert compare_answer(26.632, 26.632)
    assert compare_answer(5.0, 5.0)


def test_compare_rejects_wrong_area():
    assert not compare_answer(26.764, 26.632)


def test_compare_tolerance_bounds():
    assert compare_answer(26.632 + 0.009, 26.632)
    assert compare_answer(1000.0, 1000.9)
    assert not compare_answer(1000.0, 1002.0)


def test_compare_non_finite():
    assert not compare_answer(float("nan"), 1.0)
    assert not compare_answer(float("inf"), 1.0)


def test_compare_monotone_in_tolerance():
    # widening the tolerance can only keep accepted pairs accepted
    rng = random.Random(5)
    for _ in range(200):
        truth = rng.uniform(-100, 100)
        computed = truth + rng.uniform(-0.2, 0.2)
        base = abs(computed - truth) <= max(1e-2, 1e-3 * abs(truth))
        widened = abs(computed - truth) <= max(2e-2, 2e-3 * abs(truth))
        assert compare_answer(computed, truth) == base
        if base:
            assert widened


# --- verify_program ---

def test_verify_program_angle():
    verdict = verify_program("Sum N0 N1 C180 Sum N1 V0 C180 Get V0",
                             "N0=3*x N1=4*x+61", 51)
    assert verdict.reward == 1 and verdict.diagnostic is DiagnosticCode.MATCH


def test_verify_program_pythagorean_triple():
    verdict = verify_program("Gougu N0 N1 V0 Get V0", "N0=3 N1=4", 5)
    assert verdict.reward == 1


def test_verify_program_vacuous_get():
    verdict = verify_program("Get V0", "", 1)
    assert verdict.reward == 0
    assert verdict.diagnostic is DiagnosticCode.UNSOLVED_SYSTEM


@pytest.mark.parametrize("program,params,truth,code", [
    ("Solve x Get V0", "", 1, DiagnosticCode.UNKNOWN_OPERATOR),
    ("Gougu N0 N1", "", 1, DiagnosticCode.ARITY_MISMATCH),
    ("Gougu N0 C1.2.3 V0 Get V0", "", 1, DiagnosticCode.PARSE_ERROR),
    ("Gougu N0 N1 V0 Get V0", "N0=3", 5, DiagnosticCode.UNBOUND_OPERAND),
    ("Gougu N0 N1 V0 Get V0", "N0=bad@expr", 5, DiagnosticCode.PARSE_ERROR),
    ("Gougu N0 N1 V0", "N0=3 N1=4", 5, DiagnosticCode.NO_GET),
    ("Gougu V0 N0 N1 Get V0", "N0=13 N1=5", 1, DiagnosticCode.DOMAIN_ERROR),
])
def test_verify_program_diagnostic_codes(program, params, truth, code):
    verdict = verify_program(program, params, truth)
    assert verdict.reward == 0 and verdict.diagnostic is code


def test_verify_program_numeric_mismatch():
    verdict = verify_program("Sum N0 N1 C180 Sum N1 V0 C180 Get V0",
                             "N0=3*x N1=4*x+60", 51)
    assert verdict.reward == 0
    assert verdict.diagnostic is DiagnosticCode.NUMERIC_MISMATCH
    assert verdict.value == pytest.approx(360 / 7)


# --- verify_response ---

def test_verify_response_hexagon():
    verdict = verify_response(HEX_RESPONSE, 26.632)
    assert verdict.reward == 1 and verdict.diagnostic is DiagnosticCode.MATCH


def test_verify_response_angle():
    assert verify_response(ANGLE_RESPONSE, 51).reward == 1


def test_verify_response_undefined_operators():
    verdict = verify_response(UNDEFINED_OPS_RESPONSE, 12)
    assert verdict.reward == 0
    assert verdict.diagnostic is DiagnosticCode.UNKNOWN_OPERATOR


def test_verify_response_no_box():
    verdict = verify_response("no formal answer here", 1)
    assert verdict.reward == 0
    assert verdict.diagnostic is DiagnosticCode.NO_BOXED_ANSWER


def test_verify_response_wrong_params():
    response = ANGLE_RESPONSE.replace("4*x + 61", "4*x + 68")
    verdict = verify_response(response, 51)
    assert verdict.reward == 0
    assert verdict.diagnostic is DiagnosticCode.NUMERIC_MISMATCH


def test_reward_soundness_reexecution():
    verdict = verify_response(HEX_RESPONSE, 26.632)
    assert verdict.reward == 1
    again = verify_program(verdict.program_text, verdict.params_text, 26.632)
    assert again.reward == 1
    assert compare_answer(again.value, 26.632)


# --- totality fuzz ---

def _fuzz_strings(count):
    rng = random.Random(0xF02)
    fragments = ["\\boxed{", "}", "Get V0", "N0=", "Gougu", "=", "{", "C1.5",
                 "Sum N0 N1 V0", "x", "\\boxed{N0=3}", "/", "**"]
    for _ in range(count):
        if rng.random() < 0.5:
            yield bytes(rng.randrange(256) for _ in range(rng.randrange(80))).decode(
                "latin-1")
        else:
            yield "".join(rng.choice(fragments) for _ in range(rng.randrange(10)))


def test_verify_response_total_over_10k_random_strings():
    for text in _fuzz_strings(10_000):
        verdict = verify_response(text, 1.0)
        assert verdict.reward in (0, 1)
        assert isinstance(verdict.diagnostic, DiagnosticCode)


def test_ground_truth_self_verification_over_fixture():
    from geoformal.harness import bundled_fixture_path, load_dataset

    for record in load_dataset(bundled_fixture_path()):
        verdict = verify_program(record.program, record.params, record.answer)
        assert verdict.reward == 1, (record.id, verdict.diagnostic)
