#!/usr/bin/env python3
"""Build IDX fixtures from the 5000-digit MNIST subset shipped in the mlxtend wheel.

usage: make_mnist_fixture.py <mlxtend.whl> <out_dir>

Rows are shuffled with a fixed seed so any prefix is class-balanced in
expectation. Output: images-idx3-ubyte.gz, labels-idx1-ubyte.gz.
"""
import gzip
import random
import struct
import sys
import zipfile


def main():
    wheel, out = sys.argv[1], sys.argv[2]
    raw = zipfile.ZipFile(wheel).read("mlxtend/data/data/mnist_5k.csv.gz")
    rows = [list(map(int, l.split(","))) for l in gzip.decompress(raw).decode().split("\n") if l]
    random.Random(20180101).shuffle(rows)
    n = len(rows)
    img = bytearray(struct.pack(">IIII", 0x803, n, 28, 28))
    lab = bytearray(struct.pack(">II", 0x801, n))
    for r in rows:
        img += bytes(r[:784])
        lab.append(r[784])
    # mtime=0 keeps the archives byte-stable
    with open(f"{out}/images-idx3-ubyte.gz", "wb") as f:
        f.write(gzip.compress(bytes(img), mtime=0))
    with open(f"{out}/labels-idx1-ubyte.gz", "wb") as f:
        f.write(gzip.compress(bytes(lab), mtime=0))


if __name__ == "__main__":
    main()
