import pytest

from lineage_forge.frontend.errors import UnterminatedComment, UnterminatedString
from lineage_forge.frontend.lexer import tokenize


def kinds(sql):
    return [t.kind for t in tokenize(sql) if t.kind != "eof"]


def values(sql):
    return [t.value for t in tokenize(sql) if t.kind != "eof"]


def test_basic_select():
    toks = tokenize("SELECT a FROM t")
    assert [t.kind for t in toks] == ["ident", "ident", "ident", "ident", "eof"]
    assert [t.value for t in toks[:-1]] == ["SELECT", "a", "FROM", "t"]


def test_positions_point_into_source():
    sql = "SELECT  a,b FROM t"
    for tok in tokenize(sql):
        if tok.kind in ("ident", "op"):
            assert sql[tok.position : tok.position + len(tok.value)] == tok.value


def test_keyword_check_is_case_insensitive():
    toks = tokenize("select A From t")
    assert toks[0].is_kw("SELECT")
    assert toks[2].is_kw("from")
    # identifiers keep their original spelling
    assert toks[1].value == "A"


def test_string_literal_with_escaped_quote():
    toks = tokenize("SELECT 'it''s'")
    assert toks[1].kind == "string"
    assert toks[1].value == "it's"


def test_unterminated_string_raises():
    with pytest.raises(UnterminatedString):
        tokenize("SELECT 'oops")


def test_quoted_identifier():
    toks = tokenize('SELECT "weird name" FROM "t""x"')
    assert toks[1].kind == "quoted_ident"
    assert toks[1].value == "weird name"
    assert toks[3].value == 't"x'


def test_numbers():
    # token values stay raw text; the parser is what converts to numbers
    assert values("1 2.5 0.25") == ["1", "2.5", "0.25"]
    assert kinds("1 2.5") == ["number", "number"]


def test_number_does_not_eat_dot_before_ident():
    # "1." followed by an identifier must not absorb the dot
    toks = tokenize("SELECT t.a FROM t")
    assert [t.value for t in toks if t.kind == "op"] == ["."]


def test_line_comment_skipped():
    assert values("SELECT a -- trailing ; not a split\nFROM t") == [
        "SELECT",
        "a",
        "FROM",
        "t",
    ]


def test_nested_block_comment_skipped():
    assert values("SELECT /* outer /* inner */ still */ a") == ["SELECT", "a"]


def test_unterminated_block_comment_raises():
    with pytest.raises(UnterminatedComment):
        tokenize("SELECT /* nope")


def test_multichar_operators_are_greedy():
    assert values("a <= b >= c <> d != e || f") == [
        "a", "<=", "b", ">=", "c", "<>", "d", "!=", "e", "||", "f",
    ]


def test_single_char_operators():
    assert values("(a, b) = c.d * 2") == [
        "(", "a", ",", "b", ")", "=", "c", ".", "d", "*", "2",
    ]
