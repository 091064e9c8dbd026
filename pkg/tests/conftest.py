import numpy as np
import pytest

import tensorgeo.homogeneous as hq
from tensorgeo import (CpShape, TtShape, TuckerShape, cp_random_horizontal,
                       cp_random_point, tt_random_horizontal, tt_random_point,
                       tucker_random_horizontal, tucker_random_point)
from tensorgeo.oracles import dense_geodesic


def rng_for(seed):
    return np.random.default_rng(seed)


MANIFOLDS = {
    "cp": {
        "shape": lambda: CpShape((8, 7, 6), 3),
        "small": lambda: CpShape((5, 4, 4), 2),
        "square": lambda: CpShape((2, 2, 2), 2),
        "nonsquare": lambda: CpShape((3, 3, 3), 2),
        "point": cp_random_point,
        "tangent": cp_random_horizontal,
        "fix_tol": 1e-13,
    },
    "tucker": {
        "shape": lambda: TuckerShape((6, 4, 4), (4, 2, 2)),
        "small": lambda: TuckerShape((5, 3, 3), (4, 2, 2)),
        "square": lambda: TuckerShape((4, 2, 2), (4, 2, 2)),
        "nonsquare": lambda: TuckerShape((5, 2, 2), (4, 2, 2)),
        "point": tucker_random_point,
        "tangent": tucker_random_horizontal,
        "fix_tol": 1e-12,
    },
    "tt": {
        "shape": lambda: TtShape((6, 8, 5), (2, 2)),
        "small": lambda: TtShape((4, 7, 4), (2, 2)),
        "square": lambda: TtShape((2, 4, 2), (2, 2)),
        "nonsquare": lambda: TtShape((3, 4, 2), (2, 2)),
        "point": tt_random_point,
        "tangent": tt_random_horizontal,
        "fix_tol": 1e-12,
    },
}


@pytest.fixture(params=sorted(MANIFOLDS))
def manifold(request):
    return request.param


def dense_geodesic_embed(point, tangent, t):
    """Embedding of the geodesic evaluated along the dense O(n^3) path."""
    g = hq.densify(point)
    x = hq.lift_tangent(point, tangent)
    factors = dense_geodesic(g, x, t)
    ks = point.shape.ks
    return point.shape.embed_columns([f[:, :k] for f, k in zip(factors, ks)])


def rel_err(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))
