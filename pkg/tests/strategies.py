import numpy as np
from hypothesis import strategies as st

finite = dict(allow_nan=False, allow_infinity=False)


@st.composite
def unit_vectors(draw, n):
    v = np.array(draw(st.lists(st.floats(-1, 1, **finite), min_size=n, max_size=n)))
    norm = np.linalg.norm(v)
    if norm < 1e-3:
        v = np.eye(n)[0]
        norm = 1.0
    return v / norm


@st.composite
def ball_points(draw, n, r_max=0.9):
    radius = draw(st.floats(0.0, r_max, **finite))
    return radius * draw(unit_vectors(n))


dims = st.sampled_from([2, 3])
orders = st.sampled_from([0.25, 0.5, 0.75])
