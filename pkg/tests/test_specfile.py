import pytest
from hypothesis import given
from hypothesis import strategies as st

from twistlab.specfile import SpecError, format_twist, load_group, parse_cycles, parse_group, parse_twist

S3_TEXT = """# the symmetric group on three points
group S3
perm (0 1 2)
perm (0 1)
"""


def test_permutation_group_file():
    g = parse_group(S3_TEXT)
    assert g.group.order == 6 and g.group.name == "S3"
    again = parse_group(g.text)
    assert again.group.order == 6 and again.text == g.text


def test_builtin_and_abelian_forms():
    assert parse_group("builtin heisenberg p=3").group.order == 27
    assert parse_group("builtin asp n=2").group.order == 24
    assert parse_group("abelian 5 5").group.order == 25
    assert parse_group("builtin mcc divisors=3").group.order == 27


def test_table_form():
    text = "table 3\n0 1 2\n1 2 0\n2 0 1\n"
    assert parse_group(text).group.order == 3


@pytest.mark.parametrize("text,line", [
    ("group G\nperm (0 1\n", 2),
    ("group G\nperm (0 0)\n", 2),
    ("\n\nfrobnicate 3\n", 3),
    ("builtin heisenberg p=4\n", 1),
    ("builtin heisenberg p=x\n", 1),
    ("builtin nosuch\n", 1),
    ("table 2\n0 1\n1\n", 3),
    ("table 2\n0 1\n0 1\n", 1),
    ("abelian 5 0\n", 1),
])
def test_group_errors_carry_line_numbers(text, line):
    with pytest.raises(SpecError) as exc:
        parse_group(text, source="g.txt")
    assert exc.value.line == line
    assert str(exc.value).startswith(f"g.txt:{line}: ")


def test_empty_group_file():
    with pytest.raises(SpecError, match="no group"):
        parse_group("# nothing\n")


def test_missing_file(tmp_path):
    with pytest.raises(SpecError, match="cannot read"):
        load_group(tmp_path / "absent.txt")


@given(st.lists(st.permutations(range(5)).map(list), min_size=1, max_size=3))
def test_cycle_notation_round_trip(perms):
    from twistlab.groups import cycle_notation

    for p in perms:
        cycles = parse_cycles(cycle_notation(p))
        q = list(range(5))
        for c in cycles:
            for i, a in enumerate(c):
                q[a] = c[(i + 1) % len(c)]
        assert q == p


TWIST = """builtin heisenberg p=5
twist
basis x c
form
0 1
4 0
"""


def test_twist_file_and_round_trip():
    g, T = parse_twist(TWIST)
    H = g.builtin
    assert T.realized == H.twist_x.realized
    text = format_twist(T, g)
    g2, T2 = parse_twist(text, g)
    assert g2 is g and T2.realized == T.realized


def test_twist_with_separate_group():
    g = parse_group("abelian 5 5")
    _, T = parse_twist("twist\nsubgroup 1 5\nform\n0 1\n4 0\n", g)
    assert T.support.order == 25
    assert T.flags().nondegenerate and T.flags().alternating


@pytest.mark.parametrize("text,line", [
    ("builtin heisenberg p=5\ntwist\nbasis x c\nform\n0 1\n", 4),
    ("builtin heisenberg p=5\ntwist\nbasis x q\nform\n0 1\n4 0\n", 3),
    ("builtin heisenberg p=5\ntwist\nbasis x c\nform\n0 a\n4 0\n", 5),
    ("builtin heisenberg p=5\ntwist\nbasis x 999\nform\n0 1\n4 0\n", 3),
    ("builtin heisenberg p=5\ntwist\nwhat\n", 3),
])
def test_twist_errors_carry_line_numbers(text, line):
    with pytest.raises(SpecError) as exc:
        parse_twist(text, source="t.txt")
    assert exc.value.line == line


def test_twist_needs_commuting_basis():
    with pytest.raises(SpecError, match="commute"):
        parse_twist("builtin heisenberg p=5\ntwist\nbasis x y\nform\n0 1\n4 0\n")


def test_twist_without_group():
    with pytest.raises(SpecError, match="no group"):
        parse_twist("twist\nbasis 1\nform\n0\n")
