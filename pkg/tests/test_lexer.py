import pytest

from conftest import POLYMORPHISM_SRC
from minibmc.errors import LexError
from minibmc.lexer import lex


def test_smallest_program_has_nine_tokens():
    tokens = lex("int main(){return 0;}")
    assert len(tokens) == 9
    assert [t.kind for t in tokens] == [
        "int", "ident", "(", ")", "{", "return", "number", ";", "}"]
    assert tokens[-1].text == "}"


def test_polymorphism_source_keywords():
    kinds = {t.kind for t in lex(POLYMORPHISM_SRC)}
    assert {"virtual", "override", "new", "delete"} <= kinds


def test_whitelisted_includes_produce_no_tokens():
    assert lex("#include <cassert>\n#include <utility>\n") == []


def test_unsupported_header_rejected():
    with pytest.raises(LexError, match="unsupported header"):
        lex("#include <iostream>\n")


def test_unknown_character():
    with pytest.raises(LexError, match="unknown character"):
        lex("int x = `;")


def test_locations_are_one_based():
    tokens = lex("int a;\n  int b;", "f.cpp")
    assert tokens[0].loc.line == 1 and tokens[0].loc.column == 1
    b_decl = tokens[3]
    assert b_decl.loc.line == 2 and b_decl.loc.column == 3
    assert tokens[0].loc.file == "f.cpp"


def test_comments_are_skipped():
    tokens = lex("int a; // trailing\n/* block\ncomment */ int b;")
    assert [t.text for t in tokens] == ["int", "a", ";", "int", "b", ";"]


def test_char_literals_and_escapes():
    tokens = lex(r"'x' '\n' '\0'")
    assert [t.kind for t in tokens] == ["charlit"] * 3
    assert [t.text for t in tokens] == ["x", "\n", "\0"]


def test_no_shift_token_for_nested_templates():
    tokens = lex("R<R<5>> x;")
    assert [t.kind for t in tokens].count(">") == 2


def test_ellipsis_token():
    assert lex("...")[0].kind == "..."


def test_lexer_is_total_on_random_input():
    import random

    from minibmc.errors import MiniCxxError
    rng = random.Random(5)
    alphabet = "abcXY019 \t\n{}()[]<>;:,.*&|!+-=~'\"#/\\%^?"
    for _ in range(300):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 80)))
        try:
            lex(text)
        except MiniCxxError:
            pass  # diagnostics are the only acceptable failure
