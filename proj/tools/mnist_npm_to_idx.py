#!/usr/bin/env python3
"""Convert the digits bundled with the npm `mnist` package into IDX files.

The package ships 10,000 MNIST digits as src/digits/<d>.json, each a flat
array of 28x28 intensities in [0, 1]. Pixels are written as round(255 * v).

    python3 tools/mnist_npm_to_idx.py --out data/mnist
    python3 tools/mnist_npm_to_idx.py --package /path/to/mnist --out data/mnist
"""

import argparse
import json
import pathlib
import struct
import subprocess
import tarfile
import tempfile

SIDE = 28


def fetch_package(workdir: pathlib.Path) -> pathlib.Path:
    tgz = subprocess.run(
        ["npm", "pack", "mnist", "--silent"],
        cwd=workdir, check=True, capture_output=True, text=True,
    ).stdout.strip().splitlines()[-1]
    with tarfile.open(workdir / tgz) as tar:
        tar.extractall(workdir, filter="data")
    return workdir / "package"


def load_digits(package: pathlib.Path):
    images, labels = [], []
    per_digit = []
    for d in range(10):
        doc = json.loads((package / "src" / "digits" / f"{d}.json").read_text())
        flat = doc["data"]
        count = len(flat) // (SIDE * SIDE)
        per_digit.append([flat[k * SIDE * SIDE:(k + 1) * SIDE * SIDE]
                          for k in range(count)])
    # Interleave classes so any prefix of the file stays roughly balanced.
    longest = max(len(p) for p in per_digit)
    for k in range(longest):
        for d in range(10):
            if k < len(per_digit[d]):
                images.append(per_digit[d][k])
                labels.append(d)
    return images, labels


def write_idx(images, labels, out: pathlib.Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "images.idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x803, len(images), SIDE, SIDE))
        for img in images:
            f.write(bytes(min(255, max(0, round(255 * v))) for v in img))
    with open(out / "labels.idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x801, len(labels)))
        f.write(bytes(labels))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--package", type=pathlib.Path,
                        help="unpacked npm `mnist` package (fetched if omitted)")
    parser.add_argument("--out", type=pathlib.Path, default=pathlib.Path("data/mnist"))
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        package = args.package or fetch_package(pathlib.Path(tmp))
        images, labels = load_digits(package)
    write_idx(images, labels, args.out)
    print(f"wrote {len(labels)} digits to {args.out}")


if __name__ == "__main__":
    main()
