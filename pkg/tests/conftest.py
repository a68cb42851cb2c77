import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import helpers  # noqa: E402


@pytest.fixture
def xor0_lang():
    return helpers.lang_xor0()


@pytest.fixture
def mixed_lang():
    return helpers.lang_mixed2()


@pytest.fixture
def dom3_lang():
    return helpers.lang_dom3()


@pytest.fixture
def one_in_three_lang():
    from qcsp import ConstraintLanguage

    return ConstraintLanguage.of(2, helpers.ONE_IN_THREE)
