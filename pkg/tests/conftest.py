from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from torpedo.schemas import BehaviourModel
from torpedo.tasks import torpedo_task, behaviour_from_quantum, perfect_torpedo_strategy


DATA_DIR = Path(__file__).resolve().parent / 'data'


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240617)


@pytest.fixture
def perfect_d3_behaviour_file(tmp_path: Path) -> Path:
    task = torpedo_task(3)
    e = behaviour_from_quantum(perfect_torpedo_strategy(3), task)
    path = tmp_path / 'perfect_d3.json'
    model = BehaviourModel.from_behaviour(e, source='perfect-quantum')
    path.write_text(model.model_dump_json(), encoding='utf-8')
    return path
