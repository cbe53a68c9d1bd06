import pytest

from litgraph_testutil import FakeFetcher, rec


@pytest.fixture
def diamond_fetcher():
    """A -> {B, C}, B -> {D}; the hand-enumerable expansion fixture."""
    records = {
        "A": rec("A", refs=("B", "C"), year=2010, url="http://x/a.pdf"),
        "B": rec("B", refs=("D",), year=2011),
        "C": rec("C", year=2012),
        "D": rec("D", year=2013),
    }
    return FakeFetcher(records, texts={"A": "the PoW consensus"})
