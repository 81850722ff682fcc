"""Regenerate the shipped example game files from their builders."""

from pathlib import Path

from coordgames.instances import EXAMPLE_NAMES, named_example
from coordgames.io import dumps_game

OUT = Path(__file__).resolve().parents[1] / "src" / "coordgames" / "fixtures"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    for name in EXAMPLE_NAMES:
        inst = named_example(name)
        (OUT / f"{name}.json").write_text(dumps_game(inst.game, inst.initial))
        print(f"wrote {name}.json")


if __name__ == "__main__":
    main()
