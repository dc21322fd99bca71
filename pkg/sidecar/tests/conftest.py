from __future__ import annotations

import cv2
import numpy as np
import pytest


def write_image(path, array):
    cv2.imwrite(str(path), array)
    return path


def solid_image(path, value=128, size=256):
    return write_image(path, np.full((size, size, 3), value, np.uint8))


def shapes_image(path):
    img = np.full((256, 256, 3), 255, np.uint8)
    cv2.rectangle(img, (20, 20), (100, 100), (200, 80, 40), -1)
    cv2.circle(img, (180, 70), 40, (60, 180, 90), -1)
    cv2.rectangle(img, (130, 150), (230, 230), (30, 30, 200), 3)
    cv2.putText(img, "cell body", (30, 200), cv2.FONT_HERSHEY_SIMPLEX, 0.7, (0, 0, 0), 2)
    return write_image(path, img)


def text_image(path, color=(0, 0, 0), size=(128, 320)):
    img = np.full((*size, 3), 255, np.uint8)
    cv2.putText(img, "cell body", (20, 70), cv2.FONT_HERSHEY_SIMPLEX, 1.0, color, 2)
    return write_image(path, img)


# Approximate pixel window of the rendered "cell body" string above.
TEXT_WINDOW = (20, 45, 125, 30)


def gradient_image(path, size=256):
    ramp = np.linspace(0, 255, size, dtype=np.uint8)
    img = np.stack([np.tile(ramp, (size, 1))] * 3, axis=-1)
    return write_image(path, img)


def fixture_set(directory):
    """Ten varied deterministic images: shapes, text, gradients, mixtures."""
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    paths.append(solid_image(directory / "img00.png", 128))
    paths.append(solid_image(directory / "img01.png", 30))
    paths.append(shapes_image(directory / "img02.png"))
    paths.append(text_image(directory / "img03.png"))
    paths.append(gradient_image(directory / "img04.png"))
    for k in range(5):
        img = np.full((200, 200, 3), 245, np.uint8)
        for b in range(k + 2):
            x = 15 + 36 * b
            color = (40 * b % 256, 200 - 30 * b, 60 + 25 * k)
            cv2.rectangle(img, (x, 20 + 10 * k), (x + 28, 60 + 10 * k), color, -1)
        cv2.putText(
            img, f"figure {k}", (20, 170), cv2.FONT_HERSHEY_SIMPLEX, 0.6, (10, 10, 10), 2
        )
        paths.append(write_image(directory / f"img{5 + k:02d}.png", img))
    return paths


@pytest.fixture
def shapes_path(tmp_path):
    return shapes_image(tmp_path / "shapes.png")
