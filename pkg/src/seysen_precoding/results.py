"""CSV tables for BER sweeps and condition-number CDFs."""

from __future__ import annotations

import csv
import io
import os

from .errors import ConfigError
from .precoding import SchemeId
from .simulator import BerPoint, CdfPoint

BER_HEADER = ("scheme", "snr_db", "bits", "errors", "ber", "ci95")
CDF_HEADER = ("reducer", "kappa", "cdf")


def format_ber_csv(points: list[BerPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BER_HEADER)
    for p in points:
        w.writerow([str(p.scheme), repr(p.snr_db), p.bits_sent, p.bit_errors,
                    repr(p.ber), repr(p.ci95_halfwidth)])
    return buf.getvalue()


def format_cdf_csv(points: list[CdfPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CDF_HEADER)
    for p in points:
        w.writerow([p.reducer, repr(p.kappa), repr(p.cdf)])
    return buf.getvalue()


def _rows(text: str, header: tuple[str, ...]) -> list[list[str]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != header:
        raise ConfigError(f"expected header {','.join(header)}")
    body = rows[1:]
    if any(len(r) != len(header) for r in body):
        raise ConfigError("ragged CSV row")
    return body


def parse_ber_csv(text: str) -> list[BerPoint]:
    try:
        return [
            BerPoint(SchemeId(s), float(snr), int(bits), int(err), float(ber), float(ci))
            for s, snr, bits, err, ber, ci in _rows(text, BER_HEADER)
        ]
    except ValueError as exc:
        raise ConfigError(f"bad BER table: {exc}") from exc


def parse_cdf_csv(text: str) -> list[CdfPoint]:
    try:
        return [CdfPoint(r, float(k), float(c)) for r, k, c in _rows(text, CDF_HEADER)]
    except ValueError as exc:
        raise ConfigError(f"bad CDF table: {exc}") from exc


def write_text(path: str | os.PathLike, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_text(path: str | os.PathLike) -> str:
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()
