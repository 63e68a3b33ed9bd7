import math
import os

from pytest import fixture

from lpbernstein.equilibrium import density_model_for
from lpbernstein.trigpoly import TrigPoly
from lpbernstein.tset import build, single_arc

CONFIGS = os.path.join(os.path.dirname(os.path.dirname(__file__)), "configs")

# (cos 2t - 0.2)/0.7: four arcs where cos 2t lies in [-0.5, 0.9]
FOUR_ARC_U = TrigPoly([-0.2 / 0.7, 0.0, 1 / 0.7])


@fixture(scope="session")
def four_arc():
    return build(FOUR_ARC_U)


@fixture(scope="session")
def four_arc_density(four_arc):
    return density_model_for(four_arc)


@fixture(scope="session")
def right_angle_arc():
    return single_arc(math.pi / 2)


@fixture(scope="session")
def cos2t():
    return build(TrigPoly([0.0, 0.0, 1.0]))


@fixture
def config_path():

    def path(name):
        return os.path.join(CONFIGS, name)

    return path
