import numpy as np
import pytest

from crownlab.caps import CapExceeded
from crownlab.census import (
    census,
    format_group,
    group_name,
    minimally_transitive_classes,
    parse_group_block,
    read_catalog,
    read_group_file,
)
from crownlab.elements import ElementIndex
from crownlab.lattice import enumerate_subgroups
from crownlab.mintrans import is_minimally_transitive

from conftest import alternating, cyclic, dihedral, grp, symmetric


def oracle_classes(n: int) -> list[int]:
    """Orders of minimally transitive classes from the full lattice of S_n."""
    lattice = enumerate_subgroups(symmetric(n))
    trans = [(node, lattice.group(node)) for node in lattice.nodes]
    trans = [(node, G) for node, G in trans if G.is_transitive()]
    minimal = [node for node, G in trans
               if not any(o.order < node.order and o in node for o, _ in trans)]
    one_per_class = {node.class_id: node for node in minimal}
    return sorted(node.order for node in one_per_class.values())


def test_degree_four_is_c4_and_v4():
    names = sorted(group_name(G) for G in minimally_transitive_classes(4))
    assert names == ["C2^2", "C4"]


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_prime_degree_gives_only_the_cycle(p):
    classes = minimally_transitive_classes(p)
    assert [group_name(G) for G in classes] == [f"C{p}"]


def test_degree_six_contents():
    names = [group_name(G) for G in minimally_transitive_classes(6)]
    assert {"C6", "S3", "A4"} <= set(names)
    assert len(names) == 4


@pytest.mark.parametrize("n", [3, 4, 5])
def test_census_matches_lattice_oracle(n):
    assert sorted(G.order() for G in minimally_transitive_classes(n)) == oracle_classes(n)


@pytest.mark.parametrize("n", [4, 6])
def test_census_closure(n):
    classes = minimally_transitive_classes(n)
    index = ElementIndex.symmetric(n)
    masks = []
    for G in classes:
        assert G.degree == n and G.is_transitive()
        assert is_minimally_transitive(G).minimally_transitive is True
        mask = np.zeros(index.m, dtype=bool)
        for g in G.element_images():
            mask[index.index_of(g)] = True
        masks.append(mask)
    for i, G in enumerate(classes):
        gens = [index.index_of(g) for g in G.generators]
        for j, H in enumerate(classes):
            if i != j and G.order() == H.order():
                assert index.find_conjugator(gens, masks[j]) is None


def test_census_records_all_pass():
    for n in range(2, 7):
        for rec in census(n):
            assert rec.status == "pass", rec


def test_census_degree_cap():
    with pytest.raises(CapExceeded):
        minimally_transitive_classes(9)


def test_canonical_ordering():
    classes = minimally_transitive_classes(6)
    keys = [(G.order(), sorted(g.cycle_type() for g in G.generators)) for G in classes]
    assert keys == sorted(keys)


def test_group_names():
    assert group_name(cyclic(6)) == "C6"
    assert group_name(symmetric(3)) == "S3"
    assert group_name(alternating(4)) == "A4"
    assert group_name(dihedral(4)) == "D4"
    assert group_name(dihedral(5)) == "D5"
    assert group_name(grp("(1,2,4,7)(3,6,8,5)", "(1,3,4,8)(2,5,7,6)")) == "Q8"


def test_group_file_roundtrip(tmp_path):
    G = symmetric(4)
    path = tmp_path / "s4.grp"
    path.write_text(format_group(G, name="S4", meta={"source": "test"}))
    H = read_group_file(path)
    assert H.degree == 4 and H.order() == 24
    meta, _ = parse_group_block(path.read_text().splitlines())
    assert meta == {"name": "S4", "source": "test"}


def test_group_file_comments_and_identity():
    meta, G = parse_group_block(["# a comment", "degree 3", "() # the identity", "(1,2,3)"])
    assert G.order() == 3 and meta == {}


@pytest.mark.parametrize("lines", [["(1,2)"], ["degree x"], ["degree 2", "(1,3)"], []])
def test_group_file_errors(lines):
    with pytest.raises(ValueError):
        parse_group_block(lines)


def test_catalog(tmp_path):
    path = tmp_path / "cat.grp"
    path.write_text("# name: C4\ndegree 4\n(1,2,3,4)\n---\ndegree 4\n(1,2)\n(1,2,3,4)\n")
    entries = read_catalog(path)
    assert [name for name, _ in entries] == ["C4", "group2"]
    records = census(catalog=path)
    assert [r.status for r in records] == ["pass", "not-applicable"]
