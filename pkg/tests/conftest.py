import pytest

from aexpand.dialogdata import Dialog, Turn

SIX_TURN_TEXTS = [
    "Would you like to sit down?",
    "No, I'm fine standing up",
    "Are you sure you don't want to sit down?",
    "Been sitting all day. Work was just one meeting after another.",
    "Oh, I'm sorry. I don't enjoy work days like that.",
    "It feels good to stretch my legs a bit.",
]


def make_dialog(texts, dialog_id="d"):
    return Dialog(
        id=dialog_id,
        turns=tuple(Turn(speaker=i % 2, text=t) for i, t in enumerate(texts)),
    )


@pytest.fixture
def six_turn_dialog():
    return make_dialog(SIX_TURN_TEXTS, "six")
