import pytest

from asktable.annotate import AnnotatorConfig
from asktable.dataset import (
    bundled_dataset_path,
    bundled_schema_path,
    load_dataset,
    load_gazetteer,
)
from asktable.embeddings import bundled_embeddings_path, load_embeddings
from asktable.engine import Engine, EngineConfig
from asktable.registry import builtin_registry
from asktable.viz import VizModel, bundled_model_path

REFERENCE_YEAR = 2020  # makes "ten years ago" resolve to 2010


@pytest.fixture(scope="session")
def gazetteer():
    return load_gazetteer()


@pytest.fixture(scope="session")
def dataset():
    return load_dataset(bundled_dataset_path(), bundled_schema_path())


@pytest.fixture(scope="session")
def embeddings():
    return load_embeddings(bundled_embeddings_path())


@pytest.fixture(scope="session")
def registry():
    return builtin_registry()


@pytest.fixture(scope="session")
def annotator_config(embeddings):
    return AnnotatorConfig(reference_year=REFERENCE_YEAR, embeddings=embeddings)


@pytest.fixture(scope="session")
def viz_model():
    return VizModel.from_file(bundled_model_path())


@pytest.fixture(scope="session")
def engine():
    return Engine(EngineConfig(reference_year=REFERENCE_YEAR))
