import pytest
from hypothesis import given, settings, strategies as st

from reconflow.bundled import face_model
from reconflow.errors import ModelError, ModelSyntaxError, SemanticError
from reconflow.model import ast, parse_model, print_model, validate

from conftest import PRODUCER_CONSUMER


def test_producer_consumer_shape():
    m = parse_model(PRODUCER_CONSUMER)
    assert [x.name for x in m.modules] == ["P", "C"]
    assert len(m.channels) == 1
    assert m.bus is None


def test_fpga_placement_without_config_map():
    src = """
    system s
    bus b
    module K { kernel (a) -> y { y = a } }
    place K fpga
    """
    with pytest.raises(SemanticError) as ei:
        parse_model(src)
    assert any("FPGA placement requires configuration map" in d.message for d in ei.value.diagnostics)


def test_bundled_shape():
    m = face_model(10)
    assert len(m.modules) == 10
    assert {"CAMERA", "DATABASE", "DISTANCE", "ROOT"} <= {x.name for x in m.modules}
    assert m.config_map.names() == ["config1", "config2"]


def test_syntax_error_position():
    with pytest.raises(ModelSyntaxError) as ei:
        parse_model("system s\nmodule M {\n  behavior { x = }\n}\n")
    d = ei.value.diagnostics[0]
    assert (d.line, d.col) == (3, 18)
    assert d.format("m.rsm").startswith("m.rsm:3:18: error:")


@pytest.mark.parametrize("body, needle", [
    ("write o <- y", "before"),
    ("read o -> x", "no input port"),
    ("reconfigure nowhere", "context"),
    ("callfpga NOPE() -> r", "NOPE"),
])
def test_semantic_errors(body, needle):
    src = "system s module M { port out o behavior { %s } }" % body
    with pytest.raises(SemanticError) as ei:
        parse_model(src)
    assert any(needle in d.message for d in ei.value.diagnostics)


def test_duplicate_names():
    src = "system s module M { behavior { } } module M { behavior { } }"
    with pytest.raises(SemanticError):
        parse_model(src)


def test_procedures_inline_and_recursion():
    ok = parse_model("system s module M { port out o proc p { x = 1 write o <- x } behavior { call p call p } }")
    body = ok.module("M").behavior.body
    assert [type(s).__name__ for s in body] == ["Assign", "Write", "Assign", "Write"]
    with pytest.raises(SemanticError) as ei:
        parse_model("system s module M { proc a { call b } proc b { call a } behavior { call a } }")
    assert any("recurs" in d.message for d in ei.value.diagnostics)


def test_else_if_and_definite_assignment():
    m = parse_model("""system s module M { port in i port out o behavior {
        read i -> v
        if v > 0 { y = 1 } else if v < 0 { y = 2 } else { y = 3 }
        write o <- y } }""")
    assert isinstance(m.module("M").behavior.body[1].orelse[0], ast.If)
    with pytest.raises(SemanticError):
        parse_model("system s module M { port in i port out o behavior { read i -> v if v { y = 1 } write o <- y } }")


def test_repeat_needs_positive_literal():
    with pytest.raises(ModelError):
        parse_model("system s module M { behavior { repeat 0 { x = 1 } } }")


def test_level_gating():
    m = parse_model(PRODUCER_CONSUMER)
    assert validate(m, 1) == []
    diags = validate(m, 2)
    assert len(diags) == 2  # neither module placed
    one = parse_model(PRODUCER_CONSUMER + "place P hw\n")
    diags = validate(one, 2)
    assert len(diags) == 1 and "C" in diags[0].message


def test_level3_missing_function():
    from reconflow.bundled import face_source, level2, level3
    m = level3(level2(face_model(2)))
    assert validate(m, 3) == []
    src = face_source(2).replace("  fn ROOT latency 20\n", "")
    with pytest.raises(SemanticError) as ei:
        parse_model(src)
    assert len(ei.value.diagnostics) == 1
    assert "ROOT" in ei.value.diagnostics[0].message


def test_validate_levels_nest():
    from reconflow.bundled import level2, level3
    m = level3(level2(face_model(1)))
    assert validate(m, 3) == validate(m, 2) == validate(m, 1) == []


def _literal(text):
    m = parse_model("system s module M { port out o behavior { write o <- %s } }" % text)
    return m.module("M").behavior.body[0].expr


def test_int_literals_wrap_and_fold():
    assert _literal("-2147483648") == ast.Const(-2147483648)
    assert _literal("2147483648") == ast.Const(-2147483648)
    assert _literal("-(0)") == ast.Const(0)


# -- round trip ----------------------------------------------------------------

def test_bundled_round_trip():
    from reconflow.bundled import level2, level3
    for m in (face_model(3), level3(level2(face_model(3)))):
        assert parse_model(print_model(m)) == m


names = st.sampled_from(["a", "b", "c", "d"])
consts = st.integers(-(2**31), 2**31 - 1).map(ast.Const)


def exprs(depth=3):
    base = st.one_of(consts, names.map(ast.Var))
    if depth == 0:
        return base
    sub = exprs(depth - 1)
    # the parser folds a negated literal into a constant, so the generator
    # only produces that canonical form
    neg = sub.filter(lambda e: not isinstance(e, ast.Const)).map(lambda e: ast.Unary("-", e))
    return st.one_of(
        base,
        neg,
        st.builds(ast.Unary, st.just("not"), sub),
        st.builds(ast.Binary, st.sampled_from(ast.ARITH_OPS + ast.COMPARE_OPS + ast.BOOL_OPS), sub, sub),
    )


def stmts(depth=2):
    # every statement writes its variable first, so definite assignment holds
    simple = st.one_of(
        st.builds(ast.Assign, names, exprs()),
        st.builds(ast.Compute, st.sampled_from(["w", "z"]), st.integers(0, 50)),
        st.builds(ast.Write, st.just("o"), st.integers(-5, 5).map(ast.Const)),
    )
    if depth == 0:
        return simple
    body = st.lists(stmts(depth - 1), min_size=1, max_size=3).map(tuple)
    return st.one_of(
        simple,
        st.builds(ast.If, exprs(1), body, st.lists(stmts(depth - 1), max_size=2).map(tuple)),
        st.builds(ast.Repeat, st.integers(1, 4), body),
    )


def _define_all(body):
    init = tuple(ast.Assign(v, ast.Const(0)) for v in "abcd")
    return init + tuple(body)


@settings(max_examples=150, deadline=None)
@given(st.lists(stmts(), max_size=5))
def test_print_parse_round_trip(body):
    mod = ast.ModuleDef("M", out_ports=("o",), behavior=ast.Program((), _define_all(body)))
    model = ast.SystemModel("s", (mod,))
    text = print_model(model)
    assert parse_model(text) == model


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet=st.sampled_from(list("system module{}()->=<+-*/ \n0123456789abxyzifrepeatwrite#;")), max_size=120))
def test_parse_is_total(text):
    try:
        parse_model(text)
    except ModelError:
        pass


@settings(max_examples=100, deadline=None)
@given(st.text(max_size=200))
def test_parse_is_total_unicode(text):
    try:
        parse_model(text)
    except ModelError:
        pass


def test_deep_nesting_is_reported_not_crashed():
    src = "system s module M { behavior { x = " + "(" * 5000 + "1" + ")" * 5000 + " } }"
    with pytest.raises(ModelError):
        parse_model(src)
