"""Unit tests for step matrices, shifts and the permutahedral diagonal."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ainfdiag.exceptions import (
    ContractViolation,
    ResourceLimitError,
    VerificationError,
)
from ainfdiag.su_diagonal import (
    DerivationWitness,
    DiagonalTermP,
    OrderedPartition,
    ShiftMove,
    SparseIntMatrix,
    complementary_pairing,
    complementary_pairings,
    delta_P_top,
    derived_matrices,
    derived_matrices_with_witnesses,
    down_shift,
    enumerate_step_matrices,
    is_step_matrix,
    matrix_from_pairing,
    permutation_to_step_matrix,
    render_matrices,
    right_shift,
    step_matrix_to_permutation,
)

# step matrix of the snake with n = m = 4, k = 1
ELL = SparseIntMatrix.from_rows([[1, 4, 5], [2, 0, 0], [3, 0, 0]])

permutations = st.integers(1, 7).flatmap(
    lambda n: st.permutations(list(range(1, n + 1)))
)


class TestSparseIntMatrix:
    """Test cases for the sparse matrix type."""

    def test_from_rows_and_render(self):
        """Test dense construction and the text form."""
        assert ELL.shape == (3, 3)
        assert ELL.size == 5
        assert ELL.render() == "1 4 5\n2 0 0\n3 0 0"
        assert str(ELL) == ELL.render()

    def test_from_cells_drops_empty_lines(self):
        """Test that empty rows and columns are trimmed."""
        matrix = SparseIntMatrix.from_cells({(1, 1): 1, (3, 4): 2})
        assert matrix.shape == (2, 2)
        assert matrix.to_rows() == [[1, 0], [0, 2]]

    def test_lines(self):
        """Test row and column views."""
        assert ELL.column(1) == [(1, 1), (2, 2), (3, 3)]
        assert ELL.row(1) == [(1, 1), (2, 4), (3, 5)]
        assert ELL.column_values(2) == [4]
        assert ELL.row_values(3) == [3]
        assert ELL.positions[5] == (1, 3)

    def test_transpose(self):
        """Test that transposition swaps rows and columns."""
        assert ELL.transpose().to_rows() == [[1, 2, 3], [4, 0, 0], [5, 0, 0]]
        assert ELL.transpose().transpose() == ELL

    def test_rejects_missing_values(self):
        """Test that values must be exactly 1..N."""
        with pytest.raises(ContractViolation):
            SparseIntMatrix(1, 2, ((1, 1, 1), (1, 2, 3)))

    def test_rejects_shared_cell(self):
        """Test that a cell holds one value."""
        with pytest.raises(ContractViolation, match="used twice"):
            SparseIntMatrix(1, 1, ((1, 1, 1), (1, 1, 2)))

    def test_rejects_loose_frame(self):
        """Test that every row and column is occupied."""
        with pytest.raises(ContractViolation, match="every row and column"):
            SparseIntMatrix(2, 1, ((1, 1, 1),))

    def test_json(self):
        """Test the JSON form and malformed payloads."""
        assert SparseIntMatrix.from_json(ELL.to_json()) == ELL
        with pytest.raises(ContractViolation, match="malformed"):
            SparseIntMatrix.from_json({"rows": 1})


class TestOrderedPartition:
    """Test cases for ordered partitions."""

    def test_parse_and_render(self):
        """Test the ``1,3|2`` text form."""
        partition = OrderedPartition.parse("1,3|2")
        assert partition.ground == 3
        assert partition.block_count == 2
        assert partition.block_of(3) == 1
        assert partition.render() == "1,3|2"

    def test_empty(self):
        """Test the empty partition."""
        assert OrderedPartition.parse("").block_count == 0

    def test_rejects_overlap(self):
        """Test that blocks must be disjoint."""
        with pytest.raises(ContractViolation):
            OrderedPartition.of(2, [1, 2], [2])

    def test_block_of_unknown(self):
        """Test lookup outside the ground set."""
        with pytest.raises(ContractViolation):
            OrderedPartition.parse("1|2").block_of(3)


class TestStepMatrices:
    """Test cases for step matrices and the permutation bijection."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_count_is_factorial(self, n):
        """Test that there are N! step matrices."""
        matrices = enumerate_step_matrices(n)
        assert len(matrices) == math.factorial(n)
        assert len(set(matrices)) == len(matrices)
        assert all(is_step_matrix(m) for m in matrices)

    def test_layouts(self):
        """Test the lattice path for a few permutations."""
        assert permutation_to_step_matrix([1, 2, 3]).to_rows() == [[1], [2], [3]]
        assert permutation_to_step_matrix([3, 2, 1]).to_rows() == [[1, 2, 3]]
        assert permutation_to_step_matrix([2, 3, 1]).to_rows() == [[0, 2], [1, 3]]
        assert permutation_to_step_matrix([3, 1, 2]).to_rows() == [[1, 3], [2, 0]]

    @given(permutations)
    @settings(max_examples=60, deadline=None)
    def test_bijection(self, permutation):
        """Test that reading the path gives the permutation back."""
        matrix = permutation_to_step_matrix(permutation)
        assert is_step_matrix(matrix)
        assert step_matrix_to_permutation(matrix) == tuple(permutation)
        assert matrix.rows + matrix.cols == len(permutation) + 1

    def test_is_step_matrix_rejects(self):
        """Test matrices that fail the step conditions."""
        assert not is_step_matrix(SparseIntMatrix.from_rows([[2, 1]]))
        assert not is_step_matrix(SparseIntMatrix.from_rows([[1, 0], [0, 2]]))

    def test_not_a_permutation(self):
        """Test the bijection contract."""
        with pytest.raises(ContractViolation):
            permutation_to_step_matrix([1, 1])
        with pytest.raises(ContractViolation):
            step_matrix_to_permutation(SparseIntMatrix.from_rows([[2, 1]]))

    def test_caps(self):
        """Test size limits."""
        with pytest.raises(ContractViolation):
            enumerate_step_matrices(0)
        with pytest.raises(ResourceLimitError):
            enumerate_step_matrices(10)


class TestShifts:
    """Test cases for right and down shifts."""

    def test_down_shift_moves_block(self):
        """Test an admissible down shift."""
        moved = down_shift(ELL, 1, {4, 5})
        assert moved.to_rows() == [[1, 0, 0], [2, 4, 5], [3, 0, 0]]

    def test_inadmissible_returns_input(self):
        """Test that a refused move leaves the matrix unchanged."""
        assert right_shift(ELL, 1, {2, 3}) is ELL
        assert down_shift(ELL, 1, {4, 5}, extend=False) is not ELL

    def test_extend(self):
        """Test moving out of the last column."""
        matrix = SparseIntMatrix.from_rows([[1, 2], [0, 3]])
        grown = right_shift(matrix, 2, {3})
        assert grown.to_rows() == [[1, 2, 0], [0, 0, 3]]
        assert right_shift(matrix, 2, {3}, extend=False) is matrix

    def test_bad_subset(self):
        """Test that values must come from the column."""
        with pytest.raises(ContractViolation):
            right_shift(ELL, 1, {4})
        with pytest.raises(ContractViolation):
            right_shift(ELL, 1, set())

    def test_down_is_transposed_right(self):
        """Test the duality between the two shifts."""
        expected = right_shift(ELL.transpose(), 1, {4, 5}).transpose()
        assert down_shift(ELL, 1, {4, 5}) == expected


class TestDerivedMatrices:
    """Test cases for the derived matrix enumeration."""

    def test_small_counts(self):
        """Test the sizes for N = 1, 2, 3."""
        assert derived_matrices(1) == {SparseIntMatrix.from_rows([[1]])}
        assert len(derived_matrices(2)) == 2
        assert len(derived_matrices(3)) == 8

    def test_contains_step_matrices(self):
        """Test that every step matrix is derived."""
        assert set(enumerate_step_matrices(4)) <= derived_matrices(4)

    def test_known_members(self):
        """Test matrices obtained by one right or down shift."""
        found = derived_matrices(3)
        assert SparseIntMatrix.from_rows([[1, 2], [0, 3]]) in found
        assert SparseIntMatrix.from_rows([[1, 0], [2, 3]]) in found

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_frame_is_kept(self, n):
        """Test that every derived matrix has rows + cols = N + 1."""
        assert all(m.rows + m.cols == n + 1 for m in derived_matrices(n))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_witnesses_replay(self, n):
        """Test that every recorded derivation replays to its matrix."""
        for matrix, witness in derived_matrices_with_witnesses(n).items():
            assert is_step_matrix(witness.step_matrix)
            assert witness.replay() == matrix

    def test_threads_do_not_change_output(self):
        """Test determinism across worker counts."""
        single = derived_matrices_with_witnesses(4, threads=1)
        pooled = derived_matrices_with_witnesses(4, threads=3)
        assert single == pooled

    def test_replay_rejects_bad_move(self):
        """Test that an inadmissible recorded move is reported."""
        witness = DerivationWitness(ELL, (ShiftMove("R", 1, frozenset({2, 3})),))
        with pytest.raises(VerificationError, match="not admissible"):
            witness.replay()

    def test_caps(self):
        """Test size limits."""
        with pytest.raises(ContractViolation):
            derived_matrices(0)
        with pytest.raises(ResourceLimitError):
            derived_matrices(9)

    def test_render_matrices(self):
        """Test the blank-line separated listing."""
        text = render_matrices([ELL, ELL.transpose()])
        assert text.split("\n\n")[0] == ELL.render()


class TestComplementaryPairings:
    """Test cases for the pairing read off a derived matrix."""

    def test_reading(self):
        """Test columns left to right and rows bottom-up."""
        term = complementary_pairing(SparseIntMatrix.from_rows([[1, 2], [0, 3]]))
        assert term.left.render() == "1|2,3"
        assert term.right.render() == "3|1,2"
        assert term.render() == "1|2,3 ⊗ 3|1,2"

    def test_two_terms(self):
        """Test the diagonal on two elements."""
        rendered = {t.render() for t in complementary_pairings(2)}
        assert rendered == {"1,2 ⊗ 2|1", "1|2 ⊗ 1,2"}

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_matrix_round_trip(self, n):
        """Test that the pairing determines the matrix."""
        for matrix in derived_matrices(n):
            assert matrix_from_pairing(complementary_pairing(matrix)) == matrix

    def test_collision(self):
        """Test that two elements in one cell are rejected."""
        term = DiagonalTermP(
            OrderedPartition.parse("1,2|3"), OrderedPartition.parse("1,2|3")
        )
        with pytest.raises(ContractViolation, match="share cell"):
            matrix_from_pairing(term)

    def test_block_count_contract(self):
        """Test that s + r = N + 1 is enforced."""
        with pytest.raises(ContractViolation):
            DiagonalTermP(OrderedPartition.parse("1,2"), OrderedPartition.parse("1,2"))

    def test_empty_ground(self):
        """Test the base case of the diagonal."""
        (term,) = delta_P_top(0)
        assert term.render() == "e0 ⊗ e0"

    def test_top_cell_count(self):
        """Test that each derived matrix gives one term."""
        assert len(delta_P_top(3)) == 8
        with pytest.raises(ContractViolation):
            delta_P_top(-1)
