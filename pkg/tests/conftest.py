import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from xtypes.fixtures import FixtureSpec, generate_fixture


@pytest.fixture(scope="session")
def default_fixture(tmp_path_factory):
    """The default synthetic dataset, generated once per test session."""
    root = tmp_path_factory.mktemp("fixture_default")
    return generate_fixture(FixtureSpec(), root)


@pytest.fixture()
def tiny_kg(tmp_path):
    """Minimal 5-type KG: chain A <- B <- C plus roots A, X; Y unreachable."""
    kg = tmp_path / "kg"
    kg.mkdir()
    (kg / "type_hierarchy.tsv").write_text("B\tA\nC\tB\nXchild\tX\n")
    (kg / "type_labels.tsv").write_text(
        "A\tAlpha\nB\tBeta\nC\tGamma\nX\tXray\nXchild\tXray child\nY\tYankee\n"
    )
    (kg / "type_descriptions.tsv").write_text("A\tthe base class\nY\tisolated class\n")
    (kg / "entity_types.tsv").write_text(
        "e1\tA\ne1\tB\ne2\tB\ne3\tC\ne4\tX\ne5\tY\n"
    )
    (kg / "entity_descriptions.tsv").write_text(
        "e1\tfirst entity\ne2\tsecond entity\ne3\tthird entity\n"
    )
    return kg
