"""Raster container, binary Netpbm (P5/P6) codecs and a synthetic image source."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import SplitMix64

MAX_SAMPLES = 2**31 - 1


class PnmDecodeError(ValueError):
    """Malformed Netpbm input. ``field`` names the offending header field or payload."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class ImageSizeError(ValueError):
    pass


@dataclass(frozen=True)
class Dims:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"dimensions must be >= 1, got {self.width}x{self.height}")

    @property
    def area(self) -> int:
        return self.width * self.height

    def __str__(self) -> str:
        return f"{self.width}x{self.height}"


def _dtype_for(maxval: int):
    return np.uint8 if maxval <= 255 else np.uint16


@dataclass(frozen=True, eq=False)
class Image:
    """Immutable raster. ``samples`` has shape (height, width, channels)."""

    width: int
    height: int
    channels: int
    maxval: int
    samples: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dimensions must be >= 1, got {self.width}x{self.height}")
        if self.channels not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {self.channels}")
        if self.maxval not in (255, 65535):
            raise ValueError(f"maxval must be 255 or 65535, got {self.maxval}")
        n = self.width * self.height * self.channels
        if n > MAX_SAMPLES:
            raise ImageSizeError(f"{n} samples exceeds the limit of {MAX_SAMPLES}")
        arr = np.asarray(self.samples)
        if arr.size != n:
            raise ValueError(f"expected {n} samples, got {arr.size}")
        if arr.size and (arr.min() < 0 or arr.max() > self.maxval):
            raise ValueError(f"samples outside [0, {self.maxval}]")
        arr = np.array(arr, dtype=_dtype_for(self.maxval)).reshape(
            self.height, self.width, self.channels
        )
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def dims(self) -> Dims:
        return Dims(self.width, self.height)

    def flat(self) -> list[int]:
        return self.samples.ravel().tolist()

    def pixel(self, x: int, y: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.samples[y, x])

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return (
            (self.width, self.height, self.channels, self.maxval)
            == (other.width, other.height, other.channels, other.maxval)
            and np.array_equal(self.samples, other.samples)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Image({self.width}x{self.height}x{self.channels}, maxval={self.maxval})"


def _header_tokens(data: bytes, count: int, pos: int) -> tuple[list[bytes], int]:
    tokens = []
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos] == ord("#"):
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace() and data[pos] != ord("#"):
            pos += 1
        if start == pos:
            break
        tokens.append(data[start:pos])
    return tokens, pos


def decode_pnm(data: bytes) -> Image:
    magic = bytes(data[:2])
    if magic not in (b"P5", b"P6"):
        raise PnmDecodeError("magic", f"unsupported magic {magic!r}")
    channels = 1 if magic == b"P5" else 3

    names = ("width", "height", "maxval")
    tokens, pos = _header_tokens(data, 3, 2)
    values = {}
    for i, name in enumerate(names):
        if i >= len(tokens):
            raise PnmDecodeError(name, "missing header value")
        try:
            values[name] = int(tokens[i])
        except ValueError:
            raise PnmDecodeError(name, f"not an integer: {tokens[i]!r}") from None
    width, height, maxval = values["width"], values["height"], values["maxval"]
    if width <= 0:
        raise PnmDecodeError("width", f"must be positive, got {width}")
    if height <= 0:
        raise PnmDecodeError("height", f"must be positive, got {height}")
    if not 1 <= maxval <= 65535:
        raise PnmDecodeError("maxval", f"must be in [1, 65535], got {maxval}")
    if maxval not in (255, 65535):
        raise PnmDecodeError("maxval", f"only 255 and 65535 are supported, got {maxval}")
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise PnmDecodeError("header", "expected a single whitespace byte before the payload")
    pos += 1

    count = width * height * channels
    if count > MAX_SAMPLES:
        raise ImageSizeError(f"{count} samples exceeds the limit of {MAX_SAMPLES}")
    bps = 1 if maxval <= 255 else 2
    payload = data[pos : pos + count * bps]
    if len(payload) < count * bps:
        raise PnmDecodeError(
            "payload", f"need {count * bps} bytes of samples, got {len(payload)}"
        )
    arr = np.frombuffer(payload, dtype=np.uint8 if bps == 1 else ">u2")
    return Image(width, height, channels, maxval, arr)


def encode_pnm(img: Image) -> bytes:
    if not isinstance(img, Image):
        raise TypeError("encode_pnm expects an Image")
    magic = "P5" if img.channels == 1 else "P6"
    header = f"{magic}\n{img.width} {img.height}\n{img.maxval}\n".encode("ascii")
    if img.maxval <= 255:
        body = img.samples.astype(np.uint8).tobytes()
    else:
        body = img.samples.astype(">u2").tobytes()
    return header + body


def generate_synthetic(
    dims: Dims,
    channels: int,
    num_regions: int,
    noise_amplitude: int,
    seed: int,
) -> Image:
    """Piecewise-constant test image: rectangles of distinct colors plus uniform noise.

    Region 0 fills the frame; each further region is a random rectangle painted
    on top. Output is a pure function of the arguments.
    """
    if channels not in (1, 3):
        raise ValueError(f"channels must be 1 or 3, got {channels}")
    if num_regions < 1:
        raise ValueError("num_regions must be >= 1")
    if not 0 <= noise_amplitude <= 64:
        raise ValueError("noise_amplitude must be in [0, 64]")
    rng = SplitMix64(seed)
    palette_size = 256**channels

    colors: list[tuple[int, ...]] = []
    seen = set()
    for _ in range(num_regions):
        for _attempt in range(64):
            color = tuple(rng.below(256) for _ in range(channels))
            if color not in seen or len(seen) >= palette_size:
                break
        seen.add(color)
        colors.append(color)

    canvas = np.empty((dims.height, dims.width, channels), dtype=np.int32)
    canvas[:, :] = colors[0]
    for color in colors[1:]:
        x0, x1 = sorted((rng.below(dims.width + 1), rng.below(dims.width + 1)))
        y0, y1 = sorted((rng.below(dims.height + 1), rng.below(dims.height + 1)))
        if x1 == x0:
            x1 = min(x0 + 1, dims.width)
            x0 = x1 - 1
        if y1 == y0:
            y1 = min(y0 + 1, dims.height)
            y0 = y1 - 1
        canvas[y0:y1, x0:x1] = color

    if noise_amplitude:
        span = 2 * noise_amplitude + 1
        raw = rng.stream(canvas.size) % np.uint64(span)
        noise = raw.astype(np.int32).reshape(canvas.shape) - noise_amplitude
        canvas = np.clip(canvas + noise, 0, 255)
    return Image(dims.width, dims.height, channels, 255, canvas.astype(np.uint8))
