import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from fcireduce import make_tensor


@pytest.fixture
def t_single():
    """One determinant, N=2, M=3."""
    return make_tensor(3, 2, {(1, 2): 1.0})


@pytest.fixture
def t_two_pair():
    """Two disjoint pairs with equal weight, N=2, M=4."""
    v = math.sqrt(0.5)
    return make_tensor(4, 2, {(1, 2): v, (3, 4): v})


@pytest.fixture
def t_overlap():
    """Two configurations sharing orbital 2, N=2, M=3."""
    return make_tensor(3, 2, {(1, 2): 0.8, (2, 3): 0.6})
