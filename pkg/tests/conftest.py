import pytest

from truthfuse import Claim, FusionConfig, build_dataset

# Five sources assert the affiliations of five researchers. S1 is
# entirely correct; S4 and S5 copy from S3, S5 with one copy error.
TABLE1_ROWS = {
    "S1": {"Stonebraker": "MIT", "Dewitt": "MSR", "Bernstein": "MSR", "Carey": "UCI", "Halevy": "Google"},
    "S2": {"Stonebraker": "Berkeley", "Dewitt": "MSR", "Bernstein": "MSR", "Carey": "AT&T", "Halevy": "Google"},
    "S3": {"Stonebraker": "MIT", "Dewitt": "UWisc", "Bernstein": "MSR", "Carey": "BEA", "Halevy": "UW"},
    "S4": {"Stonebraker": "MIT", "Dewitt": "UWisc", "Bernstein": "MSR", "Carey": "BEA", "Halevy": "UW"},
    "S5": {"Stonebraker": "MS", "Dewitt": "UWisc", "Bernstein": "MSR", "Carey": "BEA", "Halevy": "UW"},
}

# Ground truth is S1's column.
TABLE1_TRUTHS = dict(TABLE1_ROWS["S1"])


def table1_claims() -> list[Claim]:
    return [
        Claim(source, obj, value)
        for source, row in TABLE1_ROWS.items()
        for obj, value in row.items()
    ]


@pytest.fixture(scope="session")
def table1_dataset():
    return build_dataset(table1_claims())


@pytest.fixture()
def table1_config():
    # five false values per domain, even prior on independence
    return FusionConfig(n=5, alpha=0.5, c=0.8, eps=0.2, min_overlap=1)
