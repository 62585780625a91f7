import numpy as np
import pytest

from corrnet.infotheory import SimilarityMatrix


def random_similarity(n: int, seed: int) -> SimilarityMatrix:
    """Random symmetric similarity matrix with zero diagonal, entries in (0, 1)."""
    rng = np.random.default_rng(seed)
    m = rng.random((n, n))
    s = (m + m.T) / 2
    np.fill_diagonal(s, 0.0)
    return SimilarityMatrix(tuple(f"S{i:03d}" for i in range(n)), s)


def planted_blocks(n_blocks: int, block_size: int, p_in: float, p_out: float, seed: int):
    """0/1 adjacency with planted communities; returns (weights, true labels)."""
    rng = np.random.default_rng(seed)
    n = n_blocks * block_size
    labels = np.repeat(np.arange(n_blocks), block_size)
    w = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            p = p_in if labels[i] == labels[j] else p_out
            if rng.random() < p:
                w[i, j] = w[j, i] = 1.0
    return w, labels


@pytest.fixture
def wide_csv(tmp_path):
    def write(text: str, name: str = "prices.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
