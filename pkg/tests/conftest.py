import math

import pytest

from sshcsim import FixedVoltage, PiezoSource, RectifierStage, SshcNetwork, SimConfig


def make_source(ip=50e-6, f=100.0, cp=10e-9, rp=math.inf):
    return PiezoSource(amplitude_ip=ip, frequency=f, cap_cp=cp, res_rp=rp)


def make_stage(vs=2.0, vd=0.2, storage=None):
    return RectifierStage(diode_drop_vd=vd, storage=storage or FixedVoltage(vs))


def make_sim_config(ct=10e-9, **kwargs):
    src = kwargs.pop("src", make_source())
    stage = kwargs.pop("stage", make_stage())
    sshc = SshcNetwork(cap_ct=ct) if ct is not None else None
    return SimConfig(src=src, stage=stage, sshc=sshc, **kwargs)


@pytest.fixture
def default_source():
    return make_source()


@pytest.fixture
def default_stage():
    return make_stage()
