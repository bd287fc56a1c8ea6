import pytest

from lahja.corpus import Document, LabeledCorpus
from lahja.synthetic import synthetic_corpus


@pytest.fixture
def tiny_corpus():
    docs = [
        Document("شن حالك يا خوي", "LY"),
        Document("هلبا باهي", "LY"),
        Document("نبي نمشي للسوق", "LY"),
        Document("شنو الاخبار", "LY"),
        Document("برشا باهي", "TN"),
        Document("شنوه عامل", "TN"),
        Document("ازيك عامل ايه", "EG"),
        Document("كيفك شو عم تعمل", "LB"),
    ]
    return LabeledCorpus(docs)


@pytest.fixture(scope="session")
def separable_corpus():
    # disjoint vocabularies: trivially separable
    return synthetic_corpus(200, overlap=0.0, vocab_size=60, seed=3)


# acceptance criteria append (number, title, status, detail) here
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"[{status}] {number}. {title}: {detail}")
