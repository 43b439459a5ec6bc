import json

import pytest

from xlfact.records import parse_sample

# Hand-annotated CoNLL-U for the date-masked fixture sentence
#   "Sindhu is the second Indian after Saina Nehwal to win in
#    badminton after 2012."
# Dummy date tokens are tagged PROPN by convention.
FIXTURE_CONLLU = """\
# text = Sindhu is the second Indian after Saina Nehwal to win in badminton after __DATE_0__ .
1\tSindhu\t_\tPROPN\t_\t_\t5\tnsubj\t_\t_
2\tis\t_\tAUX\t_\t_\t5\tcop\t_\t_
3\tthe\t_\tDET\t_\t_\t5\tdet\t_\t_
4\tsecond\t_\tADJ\t_\t_\t5\tamod\t_\t_
5\tIndian\t_\tNOUN\t_\t_\t0\troot\t_\t_
6\tafter\t_\tADP\t_\t_\t7\tcase\t_\t_
7\tSaina\t_\tPROPN\t_\t_\t5\tnmod\t_\t_
8\tNehwal\t_\tPROPN\t_\t_\t7\tflat\t_\t_
9\tto\t_\tPART\t_\t_\t10\tmark\t_\t_
10\twin\t_\tVERB\t_\t_\t5\tacl\t_\t_
11\tin\t_\tADP\t_\t_\t12\tcase\t_\t_
12\tbadminton\t_\tNOUN\t_\t_\t10\tobl\t_\t_
13\tafter\t_\tADP\t_\t_\t14\tcase\t_\t_
14\t__DATE_0__\t_\tPROPN\t_\t_\t10\tobl\t_\t_
15\t.\t_\tPUNCT\t_\t_\t5\tpunct\t_\t_
"""

FIXTURE_SENTENCE = "Sindhu is the second Indian after Saina Nehwal to win in badminton after 2012."
FIXTURE_HEAD = "P. V. Sindhu"


def make_record(sample_id="s1", language="en", sentence="some text", head="X",
                facts=(), split="train"):
    return parse_sample(json.dumps({
        "sample_id": sample_id,
        "language": language,
        "sentence": sentence,
        "head": head,
        "facts": [{"relation": r, "tail": t} for r, t in facts],
        "split": split,
    }))


@pytest.fixture
def fixture_conllu():
    return FIXTURE_CONLLU


@pytest.fixture
def embeddings_file(tmp_path):
    """3-dim store with axis-aligned vectors for hand-checkable cosines."""
    path = tmp_path / "vectors.txt"
    path.write_text(
        "delhi 0 1 0\n"
        "new 1 0 0\n"
        "india 0 0 1\n"
        "writer 0.6 0.8 0\n"
        "author 0.6 0.8 0\n",
        encoding="utf-8",
    )
    return path
