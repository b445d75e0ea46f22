import pytest

from unstretch import GeneratingSet, GroupContext, ToralMatrix, word_ball

# d = 2: the standard hyperbolic example, eigenvalues (3 +- sqrt(5))/2.
CAT = ((2, 1), (1, 1))
# d = 3, all-real spectrum (companion of t^3 - 3t - 1): 1.879, -1.532, -0.347.
D3_REAL = ((0, 0, 1), (1, 0, 3), (0, 1, 0))
# d = 3, complex stable pair (companion of t^3 - t - 1): 1.325, |pair| = 0.869.
D3_COMPLEX = ((0, 0, 1), (1, 0, 1), (0, 1, 0))
# d = 4: two orthogonal copies of the cat map.
D4_BLOCK = (
    (2, 1, 0, 0),
    (1, 1, 0, 0),
    (0, 0, 2, 1),
    (0, 0, 1, 1),
)


@pytest.fixture(scope="session")
def cat_matrix():
    return ToralMatrix(CAT)


@pytest.fixture(scope="session")
def ctx(cat_matrix):
    return GroupContext(cat_matrix)


@pytest.fixture(scope="session")
def gens():
    return GeneratingSet.standard(2)


@pytest.fixture(scope="session")
def ctx3():
    return GroupContext(ToralMatrix(D3_REAL))


@pytest.fixture(scope="session")
def oracle6(ctx, gens):
    return word_ball(ctx, gens, 6)


@pytest.fixture(scope="session")
def oracle8(ctx, gens):
    return word_ball(ctx, gens, 8)
