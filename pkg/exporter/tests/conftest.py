import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizer

PIECES = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]",
    "good", "movie", "bank", "##ing", "bad", "film",
]


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory):
    """Tiny randomly initialized BERT checkpoint saved to disk, so the
    suite never touches the network."""
    d = tmp_path_factory.mktemp("tiny-checkpoint")
    (d / "vocab.txt").write_text("\n".join(PIECES) + "\n", encoding="utf-8")
    torch.manual_seed(0)
    config = BertConfig(
        vocab_size=len(PIECES),
        hidden_size=8,
        num_hidden_layers=1,
        num_attention_heads=2,
        intermediate_size=16,
        max_position_embeddings=16,
    )
    BertModel(config).save_pretrained(d)
    BertTokenizer(str(d / "vocab.txt")).save_pretrained(d)
    return str(d)


@pytest.fixture(scope="session")
def token_table(checkpoint):
    from embexport.extract import load_token_table

    return load_token_table(checkpoint)
