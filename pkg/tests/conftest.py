import random

import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from img_branch import img
from img_branch.levels import LeafPermutation

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")

LETTERS = ("a", "b", "c")


def portrait_perm(n: int, bits) -> LeafPermutation:
    """Tree automorphism of level n from local swap bits at the 2**n - 1
    vertices in breadth-first order."""
    images = np.empty(2**n, dtype=np.int64)
    for leaf in range(2**n):
        out, vertex = 0, 0
        for k in range(n):
            x = (leaf >> (n - 1 - k)) & 1
            flip = bits[(2**k - 1) + vertex]
            out = 2 * out + (x ^ flip)
            vertex = 2 * vertex + x
        images[leaf] = out
    return LeafPermutation(n, images)


@st.composite
def portraits(draw, n):
    return portrait_perm(n, draw(st.lists(st.integers(0, 1), min_size=2**n - 1, max_size=2**n - 1)))


g_words = st.text(alphabet="abc", max_size=14)


def random_g_word(rng: random.Random, max_len: int) -> str:
    return "".join(rng.choice(LETTERS) for _ in range(rng.randint(0, max_len)))


def element_of(word: str):
    return img.element(word) if word else img.identity()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
