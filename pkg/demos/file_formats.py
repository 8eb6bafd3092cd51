"""The two on-disk sample formats and the stratified splitter.

Dense CSV carries an optional integer label column plus float features;
the sparse line format is label then index:value pairs with strictly
increasing indices, suited to bag-of-words data.  Both round-trip
bitwise because floats are written with shortest round-trip repr.
"""

import os
import tempfile

import numpy as np

from momentalign import (
    ArtificialSpec,
    Sample,
    SparseRowMatrix,
    generate_artificial,
    load_dense_csv,
    load_sparse,
    one_hot,
    save_dense_csv,
    save_sparse,
    split,
)


def main():
    workdir = tempfile.mkdtemp(prefix="momentalign-demo-")

    src, _ = generate_artificial(ArtificialSpec(total=12, seed=1))
    dense_path = os.path.join(workdir, "blobs.csv")
    save_dense_csv(src, dense_path)
    print(f"dense CSV ({dense_path}):")
    with open(dense_path) as fh:
        for line in list(fh)[:4]:
            print("  " + line.rstrip())
    print("  ...")
    back = load_dense_csv(dense_path)
    print(f"  round trip bitwise: {np.array_equal(back.features, src.features)}")
    print()

    rows = [[(0, 2.0), (5, 1.0)], [(3, 4.0)], [(1, 1.0), (2, 1.0), (6, 3.0)]]
    bow = Sample(SparseRowMatrix.from_rows(rows, cols=8),
                 one_hot(np.array([0, 1, 0]), 2))
    sparse_path = os.path.join(workdir, "bow.sparse")
    save_sparse(bow, sparse_path)
    print(f"sparse lines ({sparse_path}):")
    with open(sparse_path) as fh:
        for line in fh:
            print("  " + line.rstrip())
    back = load_sparse(sparse_path)
    print(f"  round trip bitwise: "
          f"{np.array_equal(back.features.toarray(), bow.features.toarray())}")
    print()

    train, test = split(src, 2.0 / 3.0, seed=0)
    print(f"stratified 2/3 split of {src.n_rows} rows: "
          f"{train.n_rows} train / {test.n_rows} test")
    print(f"  train class counts {np.bincount(train.label_ints).tolist()}, "
          f"test {np.bincount(test.label_ints).tolist()}")


if __name__ == "__main__":
    main()
