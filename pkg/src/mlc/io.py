"""Bit-exact file formats: binary PPM images, CSV matrices, TSV manifests.

All readers/writers are pure functions over bytes or text, so callers own
every path decision and parallel per-file reads are safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BadHeader,
    BadMagic,
    IndexOutOfRange,
    MissingClassHeader,
    NonBinaryLabel,
    ParseError,
    RaggedRows,
    ShapeMismatch,
    TruncatedPixelData,
    UnsupportedMaxval,
)
from .types import Image, LabelMatrix, ScoreMatrix

_WHITESPACE = b" \t\n\r\x0b\x0c"


def read_ppm(blob: bytes) -> Image:
    """Decode a binary (P6) PPM with maxval 255 into an Image.

    Pixel value = byte / 255 exactly. The grammar is strict: "P6", ASCII
    width/height/maxval separated by whitespace, one whitespace byte, then
    width*height*3 raw bytes.
    """
    if blob[:2] != b"P6":
        raise BadMagic(f"expected P6 magic, got {blob[:2]!r}")
    pos = 2
    fields = []
    while len(fields) < 3:
        while pos < len(blob) and blob[pos : pos + 1] in (b" ", b"\t", b"\n", b"\r"):
            pos += 1
        start = pos
        while pos < len(blob) and blob[pos : pos + 1].isdigit():
            pos += 1
        if pos == start:
            raise BadHeader("header field is not an ASCII integer")
        fields.append(int(blob[start:pos]))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise BadHeader(f"non-positive dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxval(f"maxval {maxval} unsupported, need 255")
    if pos >= len(blob) or blob[pos : pos + 1] not in (b" ", b"\t", b"\n", b"\r"):
        raise BadHeader("missing whitespace after maxval")
    pos += 1
    need = width * height * 3
    payload = blob[pos : pos + need]
    if len(payload) < need:
        raise TruncatedPixelData(f"expected {need} pixel bytes, got {len(payload)}")
    data = np.frombuffer(payload, dtype=np.uint8).astype(np.float64) / 255.0
    return Image(data.reshape(height, width, 3))


def write_ppm(image: Image) -> bytes:
    """Encode an Image as binary PPM, quantizing half away from zero."""
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    quantized = np.floor(image.data * 255.0 + 0.5).astype(np.uint8)
    return header + quantized.tobytes()


def read_csv_matrix(text: str, kind: str = "scores") -> ScoreMatrix | LabelMatrix:
    """Parse a headerless CSV of decimal numbers into a matrix.

    kind="labels" additionally enforces binary entries and returns a
    LabelMatrix; kind="scores" returns a ScoreMatrix.
    """
    if kind not in ("scores", "labels"):
        raise ValueError(f"kind must be 'scores' or 'labels', got {kind!r}")
    rows = []
    width = None
    for lineno, line in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        if line == "":
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise RaggedRows(f"line {lineno} has {len(cells)} cells, expected {width}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    if not rows:
        raise ParseError("matrix text contains no rows")
    data = np.asarray(rows, dtype=np.float64)
    if kind == "labels":
        if not np.isin(data, (0.0, 1.0)).all():
            raise NonBinaryLabel("label CSV contains entries other than 0 and 1")
        return LabelMatrix(data.astype(np.int8))
    return ScoreMatrix(data)


def write_csv_matrix(matrix: ScoreMatrix | LabelMatrix) -> str:
    """Serialize a matrix to CSV. Scores keep full float64 precision."""
    if isinstance(matrix, LabelMatrix):
        return "".join(",".join(str(int(v)) for v in row) + "\n" for row in matrix.data)
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in matrix.data)


@dataclass(frozen=True)
class DatasetManifest:
    """Ordered image paths with their label index sets; order defines row order."""

    entries: tuple[tuple[str, tuple[int, ...]], ...]
    num_classes: int

    def __post_init__(self):
        if self.num_classes < 1:
            raise ShapeMismatch("num_classes must be positive")
        for path, indices in self.entries:
            if not path:
                raise ParseError("manifest entry with empty path")
            for idx in indices:
                if not 0 <= idx < self.num_classes:
                    raise IndexOutOfRange(f"label index {idx} outside [0, {self.num_classes})")

    def __len__(self) -> int:
        return len(self.entries)

    def label_matrix(self) -> LabelMatrix:
        out = np.zeros((len(self.entries), self.num_classes), dtype=np.int8)
        for row, (_, indices) in enumerate(self.entries):
            out[row, list(indices)] = 1
        return LabelMatrix(out)


def read_manifest(text: str) -> DatasetManifest:
    """Parse 'path<TAB>i1 i2 ...' lines under a '#classes=C' header."""
    lines = text.replace("\r\n", "\n").split("\n")
    if not lines or not lines[0].startswith("#classes="):
        raise MissingClassHeader("manifest must start with '#classes=C'")
    try:
        num_classes = int(lines[0][len("#classes="):])
    except ValueError:
        raise MissingClassHeader(f"bad class count in {lines[0]!r}") from None
    entries = []
    for line in lines[1:]:
        if line == "":
            continue
        path, _, index_part = line.partition("\t")
        try:
            indices = tuple(sorted(int(tok) for tok in index_part.split()))
        except ValueError as exc:
            raise ParseError(f"bad label index list {index_part!r}: {exc}") from None
        entries.append((path, indices))
    return DatasetManifest(tuple(entries), num_classes)


def write_manifest(manifest: DatasetManifest) -> str:
    lines = [f"#classes={manifest.num_classes}"]
    for path, indices in manifest.entries:
        lines.append(path + "\t" + " ".join(str(i) for i in sorted(indices)))
    return "\n".join(lines) + "\n"
