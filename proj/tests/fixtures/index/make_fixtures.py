# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The evidoc Authors
"""Writes the binary index fixtures with an encoder independent of the C++ one."""
import struct


def u32(v):
    return struct.pack("<I", v)


def encode(doc_id, dim, pages, flags=0, magic=b"MVIX", version=1):
    out = magic + u32(version) + u32(dim) + u32(flags)
    raw = doc_id.encode()
    out += u32(len(raw)) + raw + u32(len(pages))
    for index, rows in pages:
        out += u32(index) + u32(len(rows))
        for row in rows:
            out += struct.pack("<%df" % dim, *row)
    return out


PAGES = [(1, [[1.0, 0.0, 0.5]]), (2, [[0.0, 1.0, -0.25], [0.5, 0.5, 0.5]])]

good = encode("fixture", 3, PAGES, flags=1)
files = {
    "good.mvi": good,
    "bad_magic.mvi": encode("fixture", 3, PAGES, magic=b"MVIY"),
    "bad_version.mvi": encode("fixture", 3, PAGES, version=2),
    "zero_dim.mvi": encode("fixture", 0, []),
    "unknown_flags.mvi": encode("fixture", 3, PAGES, flags=0x80),
    "truncated_header.mvi": good[:14],
    "truncated_vectors.mvi": good[:-5],
}
for name, data in files.items():
    with open(name, "wb") as f:
        f.write(data)
