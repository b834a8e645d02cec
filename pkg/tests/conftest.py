import math

import pytest

from focalrenorm import make_potential

BUILTINS = ["quartic:+1", "quartic:-1", "pendulum", "perturbed:+1:c5=0.1", "perturbed:-1:c5=0.1"]


@pytest.fixture(params=BUILTINS)
def builtin(request):
    return make_potential(request.param)


def ratio_bounded(ratios, slack=1.2):
    """Big-O check: constant fitted on the first (coarsest) entry, later ones within ``slack``."""
    c = ratios[0]
    return all(r <= slack * c for r in ratios[1:]), c


TWO_PI = 2 * math.pi
