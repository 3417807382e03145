import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from blocktype.errors import UnboundWire, UndefinedOp
from blocktype.symbolic import (
    BinOp, Call, Conv, If, Lit, Param, SBool, UnOp, WireVar, coerce, convert, eval_sym, free_wires, node_count,
    show, substitute,
)
from blocktype.terms import BOOL, INT, REAL

x, y, s = WireVar("x"), WireVar("y"), WireVar("s")


class TestShow:
    def test_integrator_step(self):
        assert show(BinOp("+", s, BinOp("·", x, Param("dt")))) == "s + x·dt"

    def test_parenthesizes_lower_precedence(self):
        assert show(BinOp("·", BinOp("+", Lit(1), Lit(3)), Param("dt"))) == "(1 + 3)·dt"

    def test_right_nested_minus(self):
        assert show(BinOp("-", x, BinOp("-", y, s))) == "x - (y - s)"

    def test_comparison_inside_negation(self):
        assert show(UnOp("¬", BinOp("≠", x, Lit(0)))) == "¬x ≠ 0"

    def test_typed_conversion(self):
        assert show(Conv(x, REAL)) == "(conv(x):real)"
        assert show(Conv(x, None)) == "conv(x)"

    def test_bool_literals(self):
        assert show(Lit(True)) == "True"

    def test_float_integral_printed_plainly(self):
        assert show(Lit(4.0)) == "4"
        assert show(Lit(2.5)) == "2.5"

    def test_generic_calls(self):
        assert show(Call("s_or", (x, y))) == "s_or(x, y)"
        assert show(SBool(Lit(2))) == "s_bool(2)"
        assert show(If(BinOp("<", x, y), Lit(1), Lit(0))) == "if x < y then 1 else 0"

    def test_bad_arity_call(self):
        with pytest.raises(ValueError):
            Call("s_not", (x, y))


class TestStructure:
    def test_free_wires(self):
        assert free_wires(BinOp("+", x, BinOp("·", y, Param("dt")))) == {"x", "y"}

    def test_substitute(self):
        e = substitute(BinOp("+", x, y), {"x": Lit(2)})
        assert show(e) == "2 + y"

    def test_node_count(self):
        assert node_count(BinOp("+", x, UnOp("-", y))) == 4


class TestEvaluation:
    def test_arithmetic(self):
        e = BinOp("+", s, BinOp("·", x, Param("dt")))
        assert eval_sym(e, {"s": 1.0, "x": 2.0}, params={"dt": 0.5}) == 2.0

    def test_literal_coerced_by_type(self):
        assert eval_sym(Lit(2, ty=BOOL), {}) is True
        assert eval_sym(Lit(2, ty=REAL), {}) == 2.0

    def test_non_integral_int_literal(self):
        with pytest.raises(UndefinedOp):
            eval_sym(Lit(1.5, ty=INT), {})

    def test_plus_undefined_at_bool(self):
        with pytest.raises(UndefinedOp):
            eval_sym(BinOp("+", x, y, BOOL), {"x": True, "y": False})

    def test_dynamic_bool_arith_rejected(self):
        with pytest.raises(UndefinedOp):
            eval_sym(BinOp("·", x, y), {"x": True, "y": 2})

    def test_unbound_wire(self):
        with pytest.raises(UnboundWire):
            eval_sym(x, {})

    def test_unbound_param(self):
        with pytest.raises(UnboundWire):
            eval_sym(Param("dt"), {})

    def test_conv_by_target(self):
        assert eval_sym(Conv(x, BOOL), {"x": 0.0}) is False
        assert eval_sym(Conv(x, INT), {"x": -2.7}) == -2

    def test_conv_by_result_type(self):
        assert eval_sym(Conv(x, None, REAL), {"x": True}) == 1.0

    def test_sbool_overloads(self):
        assert eval_sym(SBool(Lit(2), REAL), {}) == 1.0
        assert eval_sym(SBool(Lit(0), BOOL), {}) is False

    def test_generic_connectives_at_real(self):
        assert eval_sym(Call("s_and", (x, y), REAL), {"x": 2.0, "y": 0.0}) == 0.0
        assert eval_sym(Call("s_or", (x, y), REAL), {"x": 2.0, "y": 0.0}) == 1.0
        assert eval_sym(Call("s_not", (x,), BOOL), {"x": False}) is True

    def test_transcendental_only_at_real(self):
        assert eval_sym(Call("s_exp", (x,), REAL), {"x": 0.0}) == 1.0
        with pytest.raises(UndefinedOp):
            eval_sym(Call("s_sin", (x,), INT), {"x": 1})

    def test_if(self):
        e = If(BinOp("≥", x, y), Lit(1, ty=REAL), Lit(0, ty=REAL))
        assert eval_sym(e, {"x": 3.0, "y": 1.0}) == 1.0

    def test_unary_minus_at_bool(self):
        with pytest.raises(UndefinedOp):
            eval_sym(UnOp("-", x), {"x": True})

    def test_coerce_unit(self):
        with pytest.raises(UndefinedOp):
            coerce(1, "unit")


class TestConversionProperties:
    @given(st.floats(allow_nan=False, allow_infinity=False, min_value=-1e9, max_value=1e9))
    def test_real_to_int_truncates(self, v):
        assert convert(v, "real", "int") == math.trunc(v)

    @given(st.integers(-10**6, 10**6))
    def test_int_round_trip_through_real(self, n):
        assert convert(convert(n, "int", "real"), "real", "int") == n

    @given(st.booleans())
    def test_bool_round_trip_through_real(self, b):
        assert convert(convert(b, "bool", "real"), "real", "bool") == b
