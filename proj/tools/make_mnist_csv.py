#!/usr/bin/env python3
"""Build a 10k-row MNIST CSV from the `mnist` npm package.

The npm package ships 10,000 real MNIST digits (pixels already scaled to
[0, 1]) grouped by class. Rows are interleaved with a fixed-seed shuffle so
the resulting file is a plausible stream order.

Usage:
    python3 tools/make_mnist_csv.py --out data/mnist_10k.csv
    python3 tools/make_mnist_csv.py --tarball mnist-1.1.0.tgz --out ...
"""
import argparse
import json
import pathlib
import subprocess
import tarfile
import tempfile

import numpy as np

SHUFFLE_SEED = 20200101
PIXELS = 784


def fetch_tarball(workdir: pathlib.Path) -> pathlib.Path:
    subprocess.run(["npm", "pack", "mnist@1.1.0"], cwd=workdir, check=True,
                   stdout=subprocess.DEVNULL)
    return next(workdir.glob("mnist-*.tgz"))


def load_digits(tarball: pathlib.Path):
    images, labels = [], []
    with tarfile.open(tarball) as tar:
        for digit in range(10):
            member = tar.extractfile(f"package/src/digits/{digit}.json")
            flat = np.asarray(json.load(member)["data"], dtype=np.float64)
            rows = flat.reshape(-1, PIXELS)
            images.append(rows)
            labels.append(np.full(len(rows), digit, dtype=np.int64))
    return np.concatenate(images), np.concatenate(labels)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data/mnist_10k.csv")
    parser.add_argument("--tarball", help="use an already downloaded npm tarball")
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        tarball = pathlib.Path(args.tarball) if args.tarball else fetch_tarball(pathlib.Path(tmp))
        images, labels = load_digits(tarball)

    order = np.random.default_rng(SHUFFLE_SEED).permutation(len(labels))
    images, labels = images[order], labels[order]

    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        fh.write("label," + ",".join(f"pixel{i}" for i in range(PIXELS)) + "\n")
        for label, row in zip(labels, images):
            fh.write(str(label) + "," + ",".join(f"{v:g}" for v in row) + "\n")
    print(f"wrote {len(labels)} rows to {out}")


if __name__ == "__main__":
    main()
