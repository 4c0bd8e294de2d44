import json
import os
import sys

import pytest

HERE = os.path.dirname(__file__)
sys.path.insert(0, HERE)

from tempora.document import relation_from_dict, system_from_dict  # noqa: E402

FIXTURES = os.path.join(HERE, "fixtures")


def load_pair_fixture(name):
    with open(os.path.join(FIXTURES, name + ".json")) as fh:
        doc = json.load(fh)
    return (system_from_dict(doc["sys1"]), system_from_dict(doc["sys2"]),
            relation_from_dict(doc["relation"]))


@pytest.fixture
def pair_fixture():
    return load_pair_fixture
