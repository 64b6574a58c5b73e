"""Unit tests for operations on H*(C_n × C_m)."""

import pytest

from ainfdiag.ainf_core import Element, parse_tensor_monomial
from ainfdiag.cyclic_products import (
    M6_REFERENCE_ARGS,
    X1,
    X1X2,
    X2,
    SnakeSpec,
    arity_support,
    c4c4_example,
    evaluate_witness,
    expected_m4,
    expected_support,
    live_arity_possible,
    mixed_term_arities,
    snake_corolla_profile,
    snake_matrix,
    snake_step_matrix,
    snake_trees,
    verify_snake_derived,
    witness_argument,
)
from ainfdiag.exceptions import (
    ContractViolation,
    ResourceLimitError,
)

SNAKE = SnakeSpec(4, 4, 1)
SWEEP = [
    SnakeSpec(n, m, k, variant)
    for n in range(4, 7)
    for m in range(4, n + 1)
    for variant in ("full", "drop-right", "drop-down")
    for k in range(0 if variant == "full" else 1, 4)
]


def rendered(elements):
    return [e.render() for e in elements]


class TestSnakeSpec:
    """Test cases for snake parameters."""

    @pytest.mark.parametrize(
        "spec,arity",
        [
            (SnakeSpec(4, 4, 1), 6),
            (SnakeSpec(4, 4, 2), 10),
            (SnakeSpec(4, 4, 1, "drop-right"), 4),
            (SnakeSpec(5, 4, 1, "drop-down"), 4),
            (SnakeSpec(6, 5, 2, "drop-down"), 12),
            (SnakeSpec(5, 5, 0), 2),
        ],
    )
    def test_arity(self, spec, arity):
        """Test the arity formula."""
        assert spec.arity == arity

    @pytest.mark.parametrize(
        "args",
        [(3, 3, 1), (4, 5, 1), (4, 4, 0, "drop-right"), (4, 4, 1, "sideways")],
    )
    def test_invalid(self, args):
        """Test rejected parameters."""
        with pytest.raises(ContractViolation):
            SnakeSpec(*args)

    def test_render(self):
        """Test the text form."""
        assert SnakeSpec(6, 5, 2, "drop-down").render() == "(6,5,k=2,drop-down)"


class TestSnakeMatrices:
    """Test cases for snake matrices and their derivation."""

    def test_snake_and_step_matrix(self):
        """Test the zigzag and the step matrix it comes from."""
        assert snake_matrix(SNAKE).to_rows() == [[1, 0, 0], [2, 0, 0], [3, 4, 5]]
        assert snake_step_matrix(SNAKE).to_rows() == [[1, 4, 5], [2, 0, 0], [3, 0, 0]]

    def test_replay(self):
        """Test the recorded shift sequence."""
        witness = verify_snake_derived(SNAKE)
        moves = [m.render() for m in witness.derivation.moves]
        assert moves == ["D1{4,5}", "D2{4,5}"]
        assert witness.derivation.replay() == witness.matrix
        assert witness.enumerated is None
        assert witness.to_json()["arity"] == 6

    @pytest.mark.parametrize(
        "spec",
        [
            SnakeSpec(4, 4, 1),
            SnakeSpec(5, 4, 1),
            SnakeSpec(4, 4, 1, "drop-right"),
            SnakeSpec(4, 4, 1, "drop-down"),
        ],
    )
    def test_cross_check(self, spec):
        """Test that small snakes are in the enumerated derived set."""
        assert verify_snake_derived(spec, cross_check=True).enumerated is True

    @pytest.mark.parametrize(
        "spec", [SnakeSpec(4, 4, 2), SnakeSpec(6, 5, 2, "drop-down")]
    )
    def test_larger_replays(self, spec):
        """Test replays beyond the enumeration range."""
        witness = verify_snake_derived(spec)
        assert witness.derivation.replay() == snake_matrix(spec)
        assert witness.matrix.size == spec.arity - 1

    @pytest.mark.slow
    @pytest.mark.parametrize("spec", SWEEP, ids=lambda s: s.render())
    def test_sweep(self, spec):
        """Test every family member up to n = 6 and k = 3."""
        small = spec.arity <= 7
        witness = verify_snake_derived(spec, cross_check=small)
        assert witness.derivation.replay() == snake_matrix(spec)
        assert witness.enumerated is (True if small else None)

    def test_trees(self):
        """Test the diagonal term read off the snake."""
        left, right = snake_trees(SNAKE)
        assert left.render() == "(((1 2 3 4) 5) 6)"
        assert right.render() == "(1 (2 (3 4 5 6)))"
        assert snake_corolla_profile(SNAKE) == ([4], [4])


class TestWitnesses:
    """Test cases for witness arguments and their values."""

    def test_witness_argument(self):
        """Test which leaves carry x in each factor."""
        args = witness_argument(SNAKE)
        assert rendered(args) == ["x1", "x1", "x1*x2", "x1*x2", "x2", "x2"]

    def test_snake_value(self):
        """Test the value of m6 on the witness."""
        assert evaluate_witness(SNAKE).render() == "y1*y2"

    def test_modes_agree(self):
        """Test that the snake term alone gives the full value."""
        full = evaluate_witness(SNAKE, mode="full-diagonal")
        assert full == evaluate_witness(SNAKE, mode="snake-only")

    def test_drop_variants(self):
        """Test the single-corolla snakes."""
        assert evaluate_witness(SnakeSpec(4, 4, 1, "drop-right")).render() == "y1"
        assert rendered(witness_argument(SnakeSpec(5, 4, 1, "drop-down"))) == [
            "x2"
        ] * 4
        assert evaluate_witness(SnakeSpec(5, 4, 1, "drop-down")).render() == "y2"

    @pytest.mark.slow
    @pytest.mark.parametrize("k,value", [(2, "y1^2*y2^2"), (3, "y1^3*y2^3")])
    def test_longer_snakes(self, k, value):
        """Test the snake-only value in arities 10 and 14."""
        assert evaluate_witness(SnakeSpec(4, 4, k)).render() == value

    @pytest.mark.parametrize("variant", ["full", "drop-right", "drop-down"])
    def test_c5_c4_witnesses(self, variant):
        """Test that each (5,4,k=1) variant has a non-zero witness."""
        assert not evaluate_witness(SnakeSpec(5, 4, 1, variant)).is_zero()

    def test_scrambled_witness(self):
        """Test that moving arguments around kills the value."""
        args = witness_argument(SNAKE)
        args[0], args[-1] = args[-1], args[0]
        assert evaluate_witness(SNAKE, arguments=args).is_zero()

    def test_contracts(self):
        """Test mode, argument count and cap checks."""
        with pytest.raises(ContractViolation):
            evaluate_witness(SNAKE, mode="sometimes")
        with pytest.raises(ContractViolation):
            evaluate_witness(SNAKE, arguments=[Element.basis(X1, 2)])
        with pytest.raises(ResourceLimitError):
            evaluate_witness(SnakeSpec(4, 4, 2), mode="full-diagonal")
        with pytest.raises(ContractViolation):
            witness_argument(SNAKE, p=3)


class TestAritySupport:
    """Test cases for the arity scan."""

    @pytest.mark.parametrize(
        "n,m,dead",
        [(4, 4, [3, 5, 7]), (4, 5, [6, 8]), (5, 5, [3, 4, 6, 7, 9])],
    )
    def test_live_arities(self, n, m, dead):
        """Test arities no diagonal term can use."""
        for k in dead:
            assert not live_arity_possible(k, n, m)
        assert live_arity_possible(n + m - 2, n, m)

    def test_expected_support(self):
        """Test the predicted arities."""
        assert expected_support(4, 4, 7) == [2, 4, 6]
        assert expected_support(4, 5, 8) == [2, 4, 5, 7]
        assert expected_support(5, 5, 9) == [2, 5, 8]

    def test_mixed_terms(self):
        """Test that an n- and an m-corolla first meet in arity n + m - 2."""
        assert mixed_term_arities(4, 4, 6) == [6]
        assert mixed_term_arities(4, 4, 5) == []

    def test_c4_c4(self):
        """Test the scan on two copies of C_4."""
        report = arity_support(4, 4, 7)
        assert report.support == [2, 4, 6]
        assert report.matches
        assert report.skipped == [3, 5, 7]
        pattern, value = report.witnesses[4]
        assert len(pattern) == 4 and not value.is_zero()
        payload = report.to_json()
        assert payload["support"] == payload["expected"]

    @pytest.mark.slow
    def test_c4_c5(self):
        """Test the scan on C_4 × C_5."""
        report = arity_support(5, 4, 8)
        assert report.support == [2, 4, 5, 7]
        assert report.matches

    @pytest.mark.slow
    def test_c5_c5(self):
        """Test the scan on two copies of C_5."""
        report = arity_support(5, 5, 9, ycap=4)
        assert report.support == [2, 5, 8]
        assert report.matches
        assert report.scanned == [2, 5, 8]

    def test_skipped_arities_are_not_scanned(self):
        """Test that ruled-out arities are reported apart from scanned ones."""
        report = arity_support(4, 4, 7)
        assert report.scanned == [2, 4, 6]
        assert not set(report.scanned) & set(report.skipped)
        payload = report.to_json()
        assert payload["skipped"] == [3, 5, 7]
        assert "counting bound" in payload["skip_reason"]

    def test_contracts(self):
        """Test characteristic and cap checks."""
        with pytest.raises(ContractViolation):
            arity_support(4, 4, 4, p=3)
        with pytest.raises(ResourceLimitError):
            arity_support(4, 4, 10)


class TestC4C4Example:
    """Test cases for the worked C_4 × C_4 example."""

    def test_m4_formula(self):
        """Test the closed formula on a few patterns."""
        assert expected_m4((X1, X1, X1, X1), 4).render() == "y1"
        assert expected_m4((X1X2, X1, X1, X1), 4).render() == "x2*y1"
        assert expected_m4((X1X2, X1X2, X1, X1), 4).is_zero()
        assert expected_m4((X2, X2, X2, X2), 4).render() == "y2"

    def test_report(self):
        """Test the m4 table and the m6 value without the full count."""
        report = c4c4_example(ycap=4, count_m6=False)
        assert len(report.m4_nonzero_patterns) == 10
        assert not report.m4_failures
        assert not report.m4_unexpected
        assert report.m6_reference_ok
        assert report.passed
        assert report.to_json()["m6"]["reference_value"] == [
            {"monomial": "y1*y2", "coeff": 1}
        ]
        assert report.m6_discrepancy is None
        assert report.to_json()["m6"]["counted"] is False

    def test_m6_value(self, c4c4):
        """Test m6 on the documented argument."""
        assert c4c4.op(6, M6_REFERENCE_ARGS) == Element.basis(
            parse_tensor_monomial("y1*y2"), 2
        )

    @pytest.mark.slow
    def test_m6_count(self):
        """Test the eps-pattern scan for m6."""
        report = c4c4_example(ycap=4)
        assert report.m6_some_decoration == 100
        assert report.m6_single_decorations == 100
        assert not report.matches_claimed_count
        assert "≠ claimed 102" in report.m6_discrepancy
        payload = report.to_json()["m6"]
        assert len(payload["patterns"]) == 100
        assert payload["discrepancy"] == report.m6_discrepancy
        assert M6_REFERENCE_ARGS in report.m6_patterns

    def test_small_cap(self):
        """Test that the example needs room for y-powers."""
        with pytest.raises(ContractViolation):
            c4c4_example(ycap=2)
