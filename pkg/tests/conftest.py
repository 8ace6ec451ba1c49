import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ecoevo.model import ModelParams, State, SystemKind, benchmark_params

settings.register_profile("default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

KINDS = [SystemKind.SELF_RENEWING, SystemKind.EXTERNALLY_SUPPLIED]

payoff = st.floats(-1.0, 1.0, allow_nan=False)
unit_open = st.floats(0.01, 0.99)


@st.composite
def params(draw, eps=None):
    q = draw(st.floats(0.5, 2.0))
    e1 = draw(st.floats(0.01, 0.45)) / q
    e2 = e1 + draw(st.floats(0.05, 0.5)) / q
    return ModelParams.from_values(
        draw(payoff), draw(payoff), draw(payoff), draw(payoff),
        q=q, e1=e1, e2=min(e2, 0.99 / q), w=draw(st.floats(0.1, 3.0)),
        epsilon=eps if eps is not None else draw(st.floats(0.01, 1.0)),
    )


states = st.builds(State, unit_open, unit_open)
kinds = st.sampled_from(KINDS)


def random_params(rng: np.random.Generator, n: int, benchmark_ecology: bool = False) -> list[ModelParams]:
    out = []
    for _ in range(n):
        a, b, c, d = rng.uniform(-1, 1, 4)
        if benchmark_ecology:
            out.append(ModelParams.from_values(a, b, c, d, epsilon=float(rng.uniform(0.01, 1))))
            continue
        q = rng.uniform(0.5, 2.0)
        e1 = rng.uniform(0.01, 0.45) / q
        e2 = min(e1 + rng.uniform(0.05, 0.5) / q, 0.99 / q)
        out.append(ModelParams.from_values(a, b, c, d, q=q, e1=e1, e2=e2, w=rng.uniform(0.1, 3), epsilon=rng.uniform(0.01, 1)))
    return out


@pytest.fixture
def bench():
    return benchmark_params()
