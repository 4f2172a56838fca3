import dataclasses

import pytest

from extruder.params import HDPE, MaterialParams, ProcessParams


@pytest.fixture
def hdpe() -> MaterialParams:
    return HDPE


@pytest.fixture
def proc() -> ProcessParams:
    # data-sheet scenario: 10 cm barrel, hot barrel, nozzle flux 100 W/m2
    return ProcessParams(L=0.1, b=0.002, T_b=145.0, q_m_star=100.0,
                         s_r=0.07, s_0=0.03)


@pytest.fixture
def hdpe_exchange() -> MaterialParams:
    # variant with nonzero barrel heat exchange (needed for nontrivial
    # steady profiles and finite validity bounds)
    return dataclasses.replace(HDPE, hbar_s=1e4, hbar_l=1e4)


def make_proc(**kw) -> ProcessParams:
    base = dict(L=0.1, b=0.002, T_b=145.0, q_m_star=100.0,
                s_r=0.07, s_0=0.03)
    base.update(kw)
    return ProcessParams(**base)
