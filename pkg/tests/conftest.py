"""Pytest configuration and fixtures."""

import pytest

from dowling_reps.core.config import Config
from dowling_reps.entropy.distribution import JointDistribution, parity_distribution
from dowling_reps.matroids.matroid import UniformMatroid
from dowling_reps.presentations.model import Presentation
from dowling_reps.presentations.parser import parse_presentation
from dowling_reps.presentations.triangular import normalize_symmetric_triangular


@pytest.fixture
def cyclic3() -> Presentation:
    """⟨a | a a a⟩ as parsed, not yet triangular."""
    return parse_presentation("gens: a\nrels:\na a a\n")


@pytest.fixture
def z3(cyclic3: Presentation) -> Presentation:
    """Symmetric triangular presentation of Z/3 with S = {e, a, a'}."""
    return normalize_symmetric_triangular(cyclic3)


@pytest.fixture
def z2() -> Presentation:
    """Z/2 with the involution a, S = {e, a}."""
    p = Presentation.build(["a"], [("a", "a", "e")], involutions=["a"])
    return normalize_symmetric_triangular(p)


@pytest.fixture
def trivial() -> Presentation:
    """⟨e | e e e⟩."""
    return normalize_symmetric_triangular(Presentation.build([], []))


@pytest.fixture
def free_z() -> Presentation:
    """Z with S = {e, a, a'} and only the trivial relators."""
    return normalize_symmetric_triangular(Presentation.build(["a"], []))


@pytest.fixture
def u23() -> UniformMatroid:
    """The uniform matroid U_{2,3} on 1, 2, 3."""
    return UniformMatroid(2, ["1", "2", "3"])


@pytest.fixture
def parity() -> JointDistribution:
    """Two fair bits and their XOR."""
    return parity_distribution()


@pytest.fixture
def small_config() -> Config:
    """Defaults with a fixed seed and small bounds for fast pipelines."""
    return Config.model_validate(
        {
            "field": {"seed": 7, "trials": 4},
            "search": {"n_max": 4},
            "pipeline": {"family_budget": 3, "relation_budget": 1},
        }
    )
