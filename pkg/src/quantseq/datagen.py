"""Synthetic sequential-image dataset, PGM image I/O, and the dataset manifest.

Each synthetic patient is a short sequence of square grayscale frames holding
one Gaussian bright blob over a low noise floor.  Positive-label patients get
a blob whose integrated intensity grows frame over frame; negative-label
patients get a static (or slowly drifting) blob.  The temporal growth is the
learnable signal, and the generator checks it survives 8-bit quantization.

Images are binary PGM (P5, maxval 255): byte-exact, parseable anywhere, no
codec dependency.  The manifest is a UTF-8 text file: '#' metadata lines
(key=value) followed by one tab-separated record per patient:
patient_id, label, comma-joined frame paths relative to the manifest.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, ParameterError, ShapeError

GENERATOR_VERSION = "quantseq-datagen/1"

_PGM_MAXVAL = 255


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for the synthetic cohort generator."""

    num_patients: int = 60
    class_balance: float = 0.5
    frames_min: int = 2
    frames_max: int = 8
    image_side: int = 16
    lesion_growth_pos: float = 0.6    # per-frame relative growth, positive class
    lesion_growth_neg: float = 0.0
    noise_floor: float = 0.02
    seed: int = 0

    def __post_init__(self):
        side = self.image_side
        if side < 8 or side > 256 or side & (side - 1) != 0:
            raise ParameterError(f"image_side must be a power of two in [8, 256], got {side}")
        if self.num_patients < 2:
            raise ParameterError("need at least two patients")
        if not 0.0 < self.class_balance < 1.0:
            raise ParameterError("class_balance must lie strictly between 0 and 1")
        if not 2 <= self.frames_min <= self.frames_max:
            raise ParameterError("frame counts must satisfy 2 <= frames_min <= frames_max")
        if not 0.0 <= self.noise_floor < 0.2:
            raise ParameterError("noise_floor must lie in [0, 0.2)")


@dataclass(frozen=True)
class PatientRecord:
    patient_id: str
    label: int
    frame_paths: tuple[str, ...]


@dataclass(frozen=True)
class DatasetManifest:
    records: tuple[PatientRecord, ...]
    image_side: int
    seed: int
    generator_version: str = GENERATOR_VERSION
    base_dir: str = field(default=".", compare=False)


def save_pgm(pixels: np.ndarray, side: int, path: str) -> None:
    """Write a flat [0, 1] pixel vector as a binary 8-bit PGM."""
    pixels = np.asarray(pixels, dtype=np.float64).reshape(-1)
    if pixels.shape[0] != side * side:
        raise ShapeError(f"expected {side * side} pixels for side {side}, got {pixels.shape[0]}")
    data = np.clip(np.rint(pixels * _PGM_MAXVAL), 0, _PGM_MAXVAL).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{side} {side}\n{_PGM_MAXVAL}\n".encode("ascii"))
        fh.write(data.tobytes())


def load_pgm(path: str) -> tuple[np.ndarray, int]:
    """Read a binary PGM; returns (row-major pixel vector scaled to [0, 1], side)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4 and pos < len(blob):
        while pos < len(blob) and blob[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(blob) and not blob[pos : pos + 1].isspace():
            pos += 1
        tokens.append(blob[start:pos])
    if len(tokens) < 4 or tokens[0] != b"P5":
        raise FormatError(f"{path}: not a binary (P5) PGM file")
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as exc:
        raise FormatError(f"{path}: malformed PGM header") from exc
    if maxval != _PGM_MAXVAL:
        raise FormatError(f"{path}: expected maxval {_PGM_MAXVAL}, got {maxval}")
    if width != height:
        raise FormatError(f"{path}: expected a square image, got {width}x{height}")
    payload = blob[pos + 1 :]
    if len(payload) != width * height:
        raise FormatError(
            f"{path}: expected {width * height} payload bytes, got {len(payload)}"
        )
    pixels = np.frombuffer(payload, dtype=np.uint8).astype(np.float64) / _PGM_MAXVAL
    return pixels, width


def frame_to_vector(pixels: np.ndarray, side: int) -> np.ndarray:
    """Row-major flattening of a (side, side) frame into a length side**2 vector."""
    pixels = np.asarray(pixels, dtype=np.float64)
    if pixels.size != side * side:
        raise ShapeError(f"expected {side * side} pixels, got {pixels.size}")
    return pixels.reshape(-1)


def _gaussian_blob(side: int, cx: float, cy: float, sigma: float) -> np.ndarray:
    ys, xs = np.mgrid[0:side, 0:side]
    return np.exp(-((xs - cx) ** 2 + (ys - cy) ** 2) / (2.0 * sigma**2))


def _patient_frames(config: SynthConfig, label: int, rng: np.random.Generator) -> list[np.ndarray]:
    side = config.image_side
    frames = int(rng.integers(config.frames_min, config.frames_max + 1))
    cx = side / 2.0 + rng.uniform(-side / 8.0, side / 8.0)
    cy = side / 2.0 + rng.uniform(-side / 8.0, side / 8.0)
    sigma = rng.uniform(side / 7.0, side / 5.0)
    base_peak = rng.uniform(0.28, 0.38)
    rate = config.lesion_growth_pos if label == 1 else config.lesion_growth_neg
    out = []
    for t in range(frames):
        # growth widens the blob and mildly brightens it; peaks stay below
        # ~0.76 for the default config so nothing saturates or clips
        peak = base_peak * (1.0 + 0.3 * rate * t)
        spread = sigma * np.sqrt(1.0 + rate * t)
        img = config.noise_floor * rng.random((side, side)) + peak * _gaussian_blob(
            side, cx, cy, spread
        ).reshape(side, side)
        out.append(np.clip(img, 0.0, 1.0).reshape(-1))
    return out


def generate(config: SynthConfig, out_dir: str) -> DatasetManifest:
    """Write the synthetic cohort to ``out_dir`` and return its manifest.

    Fully reproducible: every patient draws from a child generator keyed by
    (config.seed, patient index).  For positive-label patients the per-frame
    pixel sums are verified to increase strictly after 8-bit quantization.
    """
    os.makedirs(out_dir, exist_ok=True)
    n_pos = round(config.num_patients * config.class_balance)
    records = []
    for idx in range(config.num_patients):
        label = 1 if idx < n_pos else 0
        rng = np.random.default_rng([config.seed, idx])
        frames = _patient_frames(config, label, rng)
        patient_id = f"p{idx:03d}"
        paths = []
        sums = []
        for t, frame in enumerate(frames):
            name = f"{patient_id}_f{t}.pgm"
            save_pgm(frame, config.image_side, os.path.join(out_dir, name))
            quantized, _ = load_pgm(os.path.join(out_dir, name))
            sums.append(float(quantized.sum()))
            paths.append(name)
        if label == 1 and any(b <= a for a, b in zip(sums, sums[1:])):
            raise ParameterError(
                f"{patient_id}: growth rate too small to survive quantization; "
                "raise lesion_growth_pos or lower noise_floor"
            )
        records.append(PatientRecord(patient_id, label, tuple(paths)))
    manifest = DatasetManifest(
        records=tuple(records),
        image_side=config.image_side,
        seed=config.seed,
        base_dir=out_dir,
    )
    write_manifest(manifest, os.path.join(out_dir, "manifest.tsv"))
    return manifest


def write_manifest(manifest: DatasetManifest, path: str) -> None:
    lines = [
        f"# image_side={manifest.image_side}",
        f"# seed={manifest.seed}",
        f"# generator={manifest.generator_version}",
    ]
    for rec in manifest.records:
        lines.append(f"{rec.patient_id}\t{rec.label}\t{','.join(rec.frame_paths)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_manifest(path: str) -> DatasetManifest:
    """Parse a manifest and verify every referenced frame file exists."""
    base_dir = os.path.dirname(os.path.abspath(path))
    meta = {}
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(f"{path}:{lineno}: expected 3 tab-separated fields")
            patient_id, label_text, paths_text = parts
            if label_text not in ("0", "1"):
                raise FormatError(f"{path}:{lineno}: label must be 0 or 1")
            frame_paths = tuple(p for p in paths_text.split(",") if p)
            if len(frame_paths) < 2:
                raise FormatError(f"{path}:{lineno}: need at least two frames")
            for rel in frame_paths:
                if not os.path.exists(os.path.join(base_dir, rel)):
                    raise FormatError(f"{path}:{lineno}: missing frame file {rel}")
            records.append(PatientRecord(patient_id, int(label_text), frame_paths))
    for key in ("image_side", "seed", "generator"):
        if key not in meta:
            raise FormatError(f"{path}: missing '# {key}=' metadata line")
    try:
        side = int(meta["image_side"])
        seed = int(meta["seed"])
    except ValueError as exc:
        raise FormatError(f"{path}: malformed metadata") from exc
    return DatasetManifest(
        records=tuple(records),
        image_side=side,
        seed=seed,
        generator_version=meta["generator"],
        base_dir=base_dir,
    )


def load_frames(manifest: DatasetManifest, record: PatientRecord) -> list[np.ndarray]:
    """Load one patient's frames as flat [0, 1] vectors, in sequence order."""
    frames = []
    for rel in record.frame_paths:
        pixels, side = load_pgm(os.path.join(manifest.base_dir, rel))
        if side != manifest.image_side:
            raise FormatError(
                f"{rel}: frame side {side} does not match manifest side {manifest.image_side}"
            )
        frames.append(pixels)
    return frames
