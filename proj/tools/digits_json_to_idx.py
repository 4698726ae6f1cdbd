#!/usr/bin/env python3
"""Convert the digit JSON files shipped with the `mnist` npm package into
gzipped IDX files (the format of the MNIST distribution).

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/digits_json_to_idx.py package/src/digits data/

Pixel intensities in the JSON are stored as fractions in [0, 1] with three
decimals; they are mapped back to bytes by round(255 * v). Digits of all
classes are interleaved with a fixed-seed shuffle so that file order is not
grouped by label.
"""
import gzip
import json
import random
import struct
import sys
from pathlib import Path


def main():
    src, dst = Path(sys.argv[1]), Path(sys.argv[2])
    images, labels = [], []
    for digit in range(10):
        data = json.loads((src / f"{digit}.json").read_text())["data"]
        n = len(data) // 784
        for k in range(n):
            pixels = data[k * 784:(k + 1) * 784]
            images.append(bytes(min(255, max(0, round(255 * v))) for v in pixels))
            labels.append(digit)
    order = list(range(len(images)))
    random.Random(20170831).shuffle(order)
    n = len(order)
    dst.mkdir(parents=True, exist_ok=True)
    with gzip.GzipFile(dst / "mnist10k-images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 2051, n, 28, 28))
        for i in order:
            f.write(images[i])
    with gzip.GzipFile(dst / "mnist10k-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">II", 2049, n))
        f.write(bytes(labels[i] for i in order))
    print(f"wrote {n} images to {dst}")


if __name__ == "__main__":
    main()
