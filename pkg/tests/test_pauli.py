import pytest
from hypothesis import given
from hypothesis import strategies as st

from dyncode.pauli import (
    PauliOperator,
    decode,
    encode,
    format_pauli,
    identity,
    parse_pauli,
    product,
    symplectic_partner,
    symplectic_product,
    weight,
)


def paulis(max_n=8):
    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(
            st.just(n), st.integers(0, (1 << n) - 1), st.integers(0, (1 << n) - 1)
        )
    ).map(lambda t: PauliOperator(*t))


class TestParseFormat:
    def test_dense_round_trip(self):
        op = parse_pauli("XIZYI", 5)
        assert format_pauli(op) == "XIZYI"

    def test_sparse_one_based(self):
        assert parse_pauli("X1 Z3", 4) == parse_pauli("XIZI", 4)

    def test_sparse_rejects_duplicate_index(self):
        with pytest.raises(ValueError):
            parse_pauli("X2 Z2", 3)

    def test_rejects_sign_prefix(self):
        with pytest.raises(ValueError):
            parse_pauli("-X1", 2)

    def test_identity_text(self):
        assert parse_pauli("IIII", 4).is_identity()

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            parse_pauli("XX", 3)

    def test_rejects_bad_letter(self):
        with pytest.raises(ValueError):
            parse_pauli("XQ", 2)

    def test_rejects_out_of_range_index(self):
        with pytest.raises(ValueError):
            parse_pauli("X5", 4)

    @given(paulis())
    def test_round_trip_everything(self, op):
        assert parse_pauli(format_pauli(op), op.n) == op


class TestAlgebra:
    def test_product_is_xor(self):
        # X * Z = Y up to phase, which is dropped.
        assert product(parse_pauli("X", 1), parse_pauli("Z", 1)) == parse_pauli("Y", 1)

    def test_product_rejects_size_mismatch(self):
        with pytest.raises(ValueError):
            product(identity(2), identity(3))

    @given(paulis())
    def test_self_product_is_identity(self, op):
        assert product(op, op).is_identity()

    @given(paulis())
    def test_identity_is_neutral(self, op):
        assert product(op, identity(op.n)) == op

    def test_anticommuting_pair(self):
        assert symplectic_product(parse_pauli("X1", 2), parse_pauli("Z1", 2)) == 1

    def test_commuting_pair(self):
        assert symplectic_product(parse_pauli("X1 X2", 2), parse_pauli("Z1 Z2", 2)) == 0

    @given(paulis(), st.data())
    def test_symplectic_symmetry(self, a, data):
        b = data.draw(
            st.tuples(
                st.integers(0, (1 << a.n) - 1), st.integers(0, (1 << a.n) - 1)
            ).map(lambda t: PauliOperator(a.n, *t))
        )
        assert symplectic_product(a, b) == symplectic_product(b, a)

    @given(paulis(), st.data())
    def test_symplectic_bilinear(self, a, data):
        ints = st.tuples(
            st.integers(0, (1 << a.n) - 1), st.integers(0, (1 << a.n) - 1)
        ).map(lambda t: PauliOperator(a.n, *t))
        b, c = data.draw(ints), data.draw(ints)
        assert symplectic_product(a, product(b, c)) == (
            symplectic_product(a, b) ^ symplectic_product(a, c)
        )

    def test_weight_counts_support(self):
        assert weight(parse_pauli("XYZII", 5)) == 3
        assert weight(identity(4)) == 0


class TestEncoding:
    @given(paulis())
    def test_encode_decode(self, op):
        assert decode(encode(op), op.n) == op

    @given(paulis(), st.data())
    def test_partner_computes_commutation(self, a, data):
        b = data.draw(
            st.tuples(
                st.integers(0, (1 << a.n) - 1), st.integers(0, (1 << a.n) - 1)
            ).map(lambda t: PauliOperator(a.n, *t))
        )
        parity = (encode(a) & symplectic_partner(encode(b), a.n)).bit_count() & 1
        assert parity == symplectic_product(a, b)
