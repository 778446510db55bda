"""Shared helpers for the demo scripts: input loading and an output folder."""

import sys
from pathlib import Path

from patchswd import load_image, textures

OUT = Path(__file__).with_name("output")


def target_image(default_size=(64, 64)):
    """The image given on the command line, or a procedural texture."""
    if len(sys.argv) > 1:
        return load_image(sys.argv[1])
    return textures.blobs(*default_size, seed=1)


def out_path(name):
    OUT.mkdir(exist_ok=True)
    return OUT / name
