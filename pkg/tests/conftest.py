from fractions import Fraction
from itertools import product

from hypothesis import strategies as st

from hypershadow.multimap import MultiMap
from hypershadow.space import FiniteMetricSpace


@st.composite
def spaces(draw, min_points=1, max_points=4):
    n = draw(st.integers(min_points, max_points))
    labels = tuple(str(i) for i in range(n))
    if draw(st.booleans()):
        return FiniteMetricSpace.discrete(labels)
    w = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w[i][j] = w[j][i] = Fraction(draw(st.integers(1, 4)), draw(st.sampled_from((1, 2, 3))))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                w[i][j] = min(w[i][j], w[i][k] + w[k][j])
    return FiniteMetricSpace(labels, tuple(tuple(r) for r in w))


@st.composite
def systems(draw, min_points=1, max_points=4, max_maps=3):
    X = draw(spaces(min_points, max_points))
    n = X.size
    m = draw(st.integers(1, max_maps))
    maps = tuple(tuple(draw(st.integers(0, n - 1)) for _ in range(n)) for _ in range(m))
    return MultiMap(X, maps)


def subsets(n):
    """All nonempty masks over n points."""
    return range(1, 1 << n)


def members(mask):
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def hausdorff_oracle(X, a, b):
    d = X.dist
    A, B = members(a), members(b)
    return max(max(min(d[i][j] for j in B) for i in A), max(min(d[i][j] for i in A) for j in B))


def image_oracle(F, a):
    out = 0
    for i in members(a):
        for f in F.maps:
            out |= 1 << f[i]
    return out


def orbit_oracle(F, y, length):
    """F^0(y), ..., F^(length-1)(y) as masks, by plain iteration."""
    out, cur = [], 1 << y
    for _ in range(length):
        out.append(cur)
        cur = image_oracle(F, cur)
    return out


def word_power(F, x, n):
    out = 0
    for word in product(F.maps, repeat=n):
        p = x
        for f in word:
            p = f[p]
        out |= 1 << p
    return out
