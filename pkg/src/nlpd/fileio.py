"""Lossless image file I/O: PNG (8/16-bit gray and RGB) plus binary PGM/PPM.

The PNG codec is self-contained on stdlib zlib and deliberately covers only
the subset the library needs: bit depth 8 or 16, color type 0 (gray) or
2 (RGB), no interlacing, no alpha. Files are sniffed by magic bytes on
load; the save format is chosen by file extension.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from .errors import CorruptFileError, UnsupportedFormatError
from .image import Image

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_WHITESPACE = b" \t\r\n\x0b\x0c"


def load_image(path) -> Image:
    """Decode a PNG, PGM (P5), or PPM (P6) file into an Image.

    8-bit samples map to [0, 1] as v/255, 16-bit as v/65535. Grayscale
    files yield a 1-channel image, RGB files a 3-channel one.
    """
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such image file: {p}")
    data = p.read_bytes()
    if data[:8] == _PNG_SIGNATURE:
        return _decode_png(data, p)
    if data[:2] in (b"P5", b"P6"):
        return _decode_netpbm(data, p)
    if data[:2] in (b"P1", b"P2", b"P3", b"P4"):
        raise UnsupportedFormatError(
            f"{p}: only binary PGM (P5) and PPM (P6) variants are supported"
        )
    raise UnsupportedFormatError(f"{p}: not a PNG, PGM (P5), or PPM (P6) file")


def save_image(img: Image, path, depth: int = 8) -> None:
    """Encode an Image at the given bit depth (8 or 16).

    Samples are quantized as round-half-up of v * (2^depth - 1). The
    container comes from the extension: .png, .pgm (1 channel), or
    .ppm (3 channels).
    """
    if depth not in (8, 16):
        raise ValueError(f"depth must be 8 or 16, got {depth}")
    p = Path(path)
    suffix = p.suffix.lower()
    if suffix == ".png":
        payload = _encode_png(img, depth)
    elif suffix == ".pgm":
        if img.channels != 1:
            raise UnsupportedFormatError(
                f"{p}: PGM stores one channel, image has {img.channels}"
            )
        payload = _encode_netpbm(img, depth)
    elif suffix == ".ppm":
        if img.channels != 3:
            raise UnsupportedFormatError(
                f"{p}: PPM stores three channels, image has {img.channels}"
            )
        payload = _encode_netpbm(img, depth)
    else:
        raise UnsupportedFormatError(f"{p}: unknown extension {suffix!r}")
    p.write_bytes(payload)


def _quantize(img: Image, depth: int) -> np.ndarray:
    maxval = (1 << depth) - 1
    q = np.floor(img.to_array() * maxval + 0.5)
    return q.astype(np.uint8 if depth == 8 else np.uint16)


def _samples_to_image(samples: np.ndarray, maxval: int) -> Image:
    arr = samples.astype(np.float64) / float(maxval)
    return Image.from_array(arr)


# ---------------------------------------------------------------------------
# PNG


def _decode_png(data: bytes, path: Path) -> Image:
    pos = 8
    header = None
    idat = bytearray()
    seen_end = False
    while pos < len(data):
        if pos + 8 > len(data):
            raise CorruptFileError(f"{path}: truncated chunk header")
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        ctype = data[pos + 4 : pos + 8]
        body = data[pos + 8 : pos + 8 + length]
        if len(body) != length or pos + 12 + length > len(data):
            raise CorruptFileError(f"{path}: truncated {ctype!r} chunk")
        (crc,) = struct.unpack(">I", data[pos + 8 + length : pos + 12 + length])
        if zlib.crc32(ctype + body) & 0xFFFFFFFF != crc:
            raise CorruptFileError(f"{path}: CRC mismatch in {ctype!r} chunk")
        pos += 12 + length

        if ctype == b"IHDR":
            if header is not None:
                raise CorruptFileError(f"{path}: duplicate IHDR")
            header = _parse_ihdr(body, path)
        elif ctype == b"IDAT":
            if header is None:
                raise CorruptFileError(f"{path}: IDAT before IHDR")
            idat.extend(body)
        elif ctype == b"tRNS":
            raise UnsupportedFormatError(f"{path}: transparency (alpha) not supported")
        elif ctype == b"IEND":
            seen_end = True
            break
        elif ctype[0:1].isupper():
            raise UnsupportedFormatError(
                f"{path}: unsupported critical chunk {ctype.decode('latin1')}"
            )
        # ancillary chunks (gAMA, tEXt, pHYs, ...) are skipped
    if header is None:
        raise CorruptFileError(f"{path}: missing IHDR")
    if not seen_end:
        raise CorruptFileError(f"{path}: missing IEND")
    if not idat:
        raise CorruptFileError(f"{path}: no IDAT data")

    width, height, depth, channels = header
    try:
        raw = zlib.decompress(bytes(idat))
    except zlib.error as exc:
        raise CorruptFileError(f"{path}: bad IDAT stream ({exc})") from exc

    sample_bytes = depth // 8
    bpp = channels * sample_bytes
    stride = width * bpp
    if len(raw) != height * (stride + 1):
        raise CorruptFileError(
            f"{path}: decompressed size {len(raw)} != expected {height * (stride + 1)}"
        )
    recon = _unfilter(raw, height, stride, bpp, path)
    dtype = np.dtype(">u2") if depth == 16 else np.dtype("u1")
    samples = np.frombuffer(recon, dtype=dtype).reshape(height, width, channels)
    if channels == 1:
        samples = samples[:, :, 0]
    return _samples_to_image(samples, (1 << depth) - 1)


def _parse_ihdr(body: bytes, path: Path) -> tuple[int, int, int, int]:
    if len(body) != 13:
        raise CorruptFileError(f"{path}: IHDR has {len(body)} bytes, expected 13")
    width, height, depth, color, compression, filt, interlace = struct.unpack(
        ">IIBBBBB", body
    )
    if width < 1 or height < 1:
        raise CorruptFileError(f"{path}: bad dimensions {width}x{height}")
    if compression != 0 or filt != 0:
        raise CorruptFileError(f"{path}: nonstandard compression/filter method")
    if interlace != 0:
        raise UnsupportedFormatError(f"{path}: interlaced PNG not supported")
    if color in (4, 6):
        raise UnsupportedFormatError(f"{path}: alpha channel not supported")
    if color == 3:
        raise UnsupportedFormatError(f"{path}: palette PNG not supported")
    if color not in (0, 2):
        raise UnsupportedFormatError(f"{path}: unknown color type {color}")
    if depth not in (8, 16):
        raise UnsupportedFormatError(f"{path}: bit depth {depth} not supported")
    channels = 1 if color == 0 else 3
    return width, height, depth, channels


def _paeth(left: int, above: int, upleft: int) -> int:
    estimate = left + above - upleft
    pa = abs(estimate - left)
    pb = abs(estimate - above)
    pc = abs(estimate - upleft)
    if pa <= pb and pa <= pc:
        return left
    if pb <= pc:
        return above
    return upleft


def _unfilter(raw: bytes, height: int, stride: int, bpp: int, path: Path) -> bytes:
    out = bytearray(height * stride)
    prior = bytes(stride)
    pos = 0
    for y in range(height):
        ftype = raw[pos]
        pos += 1
        line = bytearray(raw[pos : pos + stride])
        pos += stride
        if ftype == 0:
            pass
        elif ftype == 1:
            for x in range(bpp, stride):
                line[x] = (line[x] + line[x - bpp]) & 0xFF
        elif ftype == 2:
            for x in range(stride):
                line[x] = (line[x] + prior[x]) & 0xFF
        elif ftype == 3:
            for x in range(stride):
                left = line[x - bpp] if x >= bpp else 0
                line[x] = (line[x] + ((left + prior[x]) >> 1)) & 0xFF
        elif ftype == 4:
            for x in range(stride):
                left = line[x - bpp] if x >= bpp else 0
                upleft = prior[x - bpp] if x >= bpp else 0
                line[x] = (line[x] + _paeth(left, prior[x], upleft)) & 0xFF
        else:
            raise CorruptFileError(f"{path}: unknown scanline filter {ftype}")
        out[y * stride : (y + 1) * stride] = line
        prior = bytes(line)
    return bytes(out)


def _chunk(ctype: bytes, body: bytes) -> bytes:
    return (
        struct.pack(">I", len(body))
        + ctype
        + body
        + struct.pack(">I", zlib.crc32(ctype + body) & 0xFFFFFFFF)
    )


def _encode_png(img: Image, depth: int) -> bytes:
    q = _quantize(img, depth)
    if depth == 16:
        q = q.astype(">u2")
    color = 0 if img.channels == 1 else 2
    ihdr = struct.pack(">IIBBBBB", img.width, img.height, depth, color, 0, 0, 0)
    row_bytes = q.reshape(img.height, -1).tobytes()
    stride = img.width * img.channels * (depth // 8)
    raw = b"".join(
        b"\x00" + row_bytes[y * stride : (y + 1) * stride] for y in range(img.height)
    )
    idat = zlib.compress(raw, 6)
    return (
        _PNG_SIGNATURE
        + _chunk(b"IHDR", ihdr)
        + _chunk(b"IDAT", idat)
        + _chunk(b"IEND", b"")
    )


# ---------------------------------------------------------------------------
# Netpbm (binary PGM / PPM)


def _next_token(data: bytes, pos: int, path: Path) -> tuple[bytes, int]:
    while pos < len(data):
        ch = data[pos]
        if ch in _WHITESPACE:
            pos += 1
        elif ch == ord("#"):
            while pos < len(data) and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < len(data) and data[pos] not in _WHITESPACE:
        pos += 1
    if start == pos:
        raise CorruptFileError(f"{path}: truncated header")
    return data[start:pos], pos


def _decode_netpbm(data: bytes, path: Path) -> Image:
    magic = data[:2]
    channels = 1 if magic == b"P5" else 3
    pos = 2
    fields = []
    for _ in range(3):
        token, pos = _next_token(data, pos, path)
        try:
            fields.append(int(token))
        except ValueError as exc:
            raise CorruptFileError(f"{path}: non-numeric header field {token!r}") from exc
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise CorruptFileError(f"{path}: bad dimensions {width}x{height}")
    if maxval not in (255, 65535):
        raise UnsupportedFormatError(f"{path}: maxval {maxval} (only 255 or 65535)")
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise CorruptFileError(f"{path}: malformed header")
    pos += 1

    dtype = np.dtype("u1") if maxval == 255 else np.dtype(">u2")
    expected = width * height * channels * dtype.itemsize
    raster = data[pos : pos + expected]
    if len(raster) != expected:
        raise CorruptFileError(
            f"{path}: raster has {len(raster)} bytes, expected {expected}"
        )
    samples = np.frombuffer(raster, dtype=dtype).reshape(height, width, channels)
    if channels == 1:
        samples = samples[:, :, 0]
    return _samples_to_image(samples, maxval)


def _encode_netpbm(img: Image, depth: int) -> bytes:
    q = _quantize(img, depth)
    if depth == 16:
        q = q.astype(">u2")
    magic = b"P5" if img.channels == 1 else b"P6"
    maxval = (1 << depth) - 1
    header = magic + f"\n{img.width} {img.height}\n{maxval}\n".encode("ascii")
    return header + q.tobytes()
