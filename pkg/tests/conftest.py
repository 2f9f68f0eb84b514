import numpy as np
import pytest

from mlc.types import Image, LabelVector, Sample


@pytest.fixture
def rng():
    return np.random.default_rng(20240831)


def random_image(rng: np.random.Generator, height: int = 8, width: int = 8) -> Image:
    return Image(rng.random((height, width, 3)))


def random_sample(rng: np.random.Generator, height: int = 8, width: int = 8, num_classes: int = 6) -> Sample:
    labels = (rng.random(num_classes) < 0.4).astype(np.int8)
    return Sample(random_image(rng, height, width), LabelVector(labels))
