"""Steganalysis battery and simulator verification statistics.

The warden's question is a hypothesis test: is this image an ordinary
photograph? The battery answers with four statistics,

  * KL divergence of the pixel-value histogram against a calibrated clean
    reference (relative entropy in bits),
  * a pairs-of-values chi-square test for least-significant-bit artifacts,
  * the lag autocorrelation of a capture difference (pixel independence),
  * the normalized pixel deviation of a capture pair (shot-noise scaling),

and a composite verdict: suspicious iff any statistic exceeds its 99th
percentile under a null distribution calibrated from clean simulated
captures. No fixed thresholds; the simulator is its own control.

The chi-square test deserves a note. Replacing every least-significant bit
equalizes the counts of each value pair (2k, 2k+1) while leaving the pair
totals untouched. A genuine photon-noise histogram is smooth but not
pair-balanced, so the test predicts each within-pair split from the
neighboring pair totals (local geometric interpolation, which LSB
embedding cannot alter) and chi-squares the observed even counts against
that prediction. Under a smooth clean image the statistic is chi-square
distributed and the returned p-value is uniform; under LSB replacement the
forced 50/50 splits contradict the prediction and the p-value collapses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats as sps

from .camera import SceneRadiance, SensorConfig, capture
from .imageio import PGM_MAXVAL, RawImage

AUTOCORR_LAGS = 8
_CHI2_MIN_PAIR = 32
_NVALUES = PGM_MAXVAL + 1


class CalibrationError(ValueError):
    """Missing or undersized calibration data."""


@dataclass
class Region:
    """Rectangular pixel region, origin at the top-left corner."""

    x: int
    y: int
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("region must have positive size")

    @property
    def area(self) -> int:
        return self.width * self.height


def full_region(img: RawImage) -> Region:
    return Region(0, 0, img.width, img.height)


def _region_values(img: RawImage, region: Region) -> np.ndarray:
    if region.x < 0 or region.y < 0 \
            or region.x + region.width > img.width \
            or region.y + region.height > img.height:
        raise ValueError("region out of image bounds")
    return img.pixels[region.y:region.y + region.height,
                      region.x:region.x + region.width].reshape(-1)


# ---------------------------------------------------------------------------
# Histograms and KL divergence
# ---------------------------------------------------------------------------

@dataclass
class Histogram:
    """Counts of pixel values over contiguous fixed-width bins covering the
    whole 16-bit range, so any two histograms with equal bin_width share
    identical binning."""

    bin_edges: np.ndarray
    counts: np.ndarray
    total: int

    @property
    def bin_width(self) -> int:
        return int(self.bin_edges[1] - self.bin_edges[0])

    def mean(self) -> float:
        centers = (self.bin_edges[:-1] + self.bin_edges[1:] - 1) / 2.0
        return float(np.sum(centers * self.counts) / self.total)

    def std(self) -> float:
        centers = (self.bin_edges[:-1] + self.bin_edges[1:] - 1) / 2.0
        m = self.mean()
        return float(math.sqrt(np.sum((centers - m) ** 2 * self.counts)
                               / max(self.total - 1, 1)))


def histogram(img: RawImage, region: Region, bin_width: int = 1) -> Histogram:
    """Histogram of pixel values in the region; bins of bin_width counts."""
    if bin_width < 1:
        raise ValueError("bin_width must be >= 1")
    vals = _region_values(img, region)
    nbins = -(-_NVALUES // bin_width)
    counts = np.bincount(vals // bin_width, minlength=nbins).astype(np.int64)
    edges = np.arange(nbins + 1, dtype=np.int64) * bin_width
    return Histogram(bin_edges=edges, counts=counts, total=int(vals.size))


def kl_divergence(p_hist: Histogram, q_hist: Histogram, smoothing: float = 0.5) -> float:
    """D(P || Q) in bits over additively smoothed bin probabilities.

    Zero iff the smoothed distributions coincide; always >= 0 (Gibbs).
    """
    if smoothing <= 0:
        raise ValueError("smoothing must be > 0")
    if not np.array_equal(p_hist.bin_edges, q_hist.bin_edges):
        raise ValueError("histograms use different binning")
    nbins = len(p_hist.counts)
    p = (p_hist.counts + smoothing) / (p_hist.total + smoothing * nbins)
    q = (q_hist.counts + smoothing) / (q_hist.total + smoothing * nbins)
    return float(np.sum(p * np.log2(p / q)))


def histogram_csv(hist: Histogram) -> bytes:
    """CSV dump (bin_low, bin_high, count), populated bins only."""
    lines = ["bin_low,bin_high,count"]
    nz = np.flatnonzero(hist.counts)
    for i in nz:
        lines.append(f"{hist.bin_edges[i]},{hist.bin_edges[i + 1]},{hist.counts[i]}")
    return ("\n".join(lines) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# Baseline embedding for contrast: LSB replacement
# ---------------------------------------------------------------------------

def lsb_embed(img: RawImage, bits: np.ndarray) -> RawImage:
    """Replace each pixel's least-significant bit (replacement, not
    matching); the distortion this introduces is what the battery is
    calibrated to catch."""
    bits = np.asarray(bits, dtype=np.uint16).reshape(-1)
    if bits.size != img.pixel_count:
        raise ValueError("bit vector length must equal pixel count")
    out = (img.pixels.reshape(-1) & np.uint16(0xFFFE)) | bits
    return RawImage(width=img.width, height=img.height,
                    pixels=out.reshape(img.height, img.width))


# ---------------------------------------------------------------------------
# Pair statistics: autocorrelation and normalized deviation
# ---------------------------------------------------------------------------

def autocorrelation(key: RawImage, cover: RawImage, max_lag: int = AUTOCORR_LAGS) -> np.ndarray:
    """Normalized autocovariance of the capture difference at horizontal
    lags 1..max_lag, rows pooled. Subtracting the two captures cancels the
    static scene, leaving pure noise whose correlation should vanish."""
    if (key.width, key.height) != (cover.width, cover.height):
        raise ValueError("image dimensions do not match")
    if not (1 <= max_lag < key.width):
        raise ValueError("max_lag must be in [1, width)")
    d = key.pixels.astype(np.int64) - cover.pixels.astype(np.int64)
    mu = d.mean()
    var = np.mean((d - mu) ** 2)
    if var == 0:
        raise ValueError("difference image is constant; identical captures?")
    rho = np.empty(max_lag, dtype=np.float64)
    for lag in range(1, max_lag + 1):
        a = d[:, :-lag] - mu
        b = d[:, lag:] - mu
        rho[lag - 1] = np.mean(a * b) / var
    return rho


def normalized_deviation(key: RawImage, cover: RawImage) -> float:
    """Root mean square of (K - C) / sqrt(K + C) over pixels with
    K + C >= 16. Pure shot noise gives exactly 1 in expectation; identical
    captures give 0; exposure drift pushes it above 1."""
    if (key.width, key.height) != (cover.width, cover.height):
        raise ValueError("image dimensions do not match")
    k = key.pixels.astype(np.float64)
    c = cover.pixels.astype(np.float64)
    s = k + c
    ok = s >= 16
    if not ok.any():
        raise ValueError("no pixels with K + C >= 16")
    r = (k[ok] - c[ok]) / np.sqrt(s[ok])
    return float(np.sqrt(np.mean(r ** 2)))


# ---------------------------------------------------------------------------
# Chi-square pairs-of-values attack
# ---------------------------------------------------------------------------

def chi_square_attack(img: RawImage, region: Region) -> float:
    """P-value of the clean hypothesis from the pairs-of-values statistic.

    For each value pair (2k, 2k+1) whose neighborhood is well populated,
    predict the within-pair even fraction from the pair totals of the two
    neighboring pairs (totals are invariant under LSB replacement), then
    form the chi-square of observed even counts against the prediction.
    The denominator includes the predictor's own sampling variance (delta
    method), which keeps the statistic chi-square distributed under the
    null. Small p-value: the splits are too balanced for a genuine smooth
    histogram, the signature of full LSB embedding.
    """
    vals = _region_values(img, region)
    if vals.size < 10_000:
        raise ValueError("chi-square attack needs a region of >= 1e4 pixels")
    counts = np.bincount(vals, minlength=_NVALUES).astype(np.float64)
    even = counts[0::2]
    odd = counts[1::2]
    m = even + odd
    ok = m >= _CHI2_MIN_PAIR
    ok &= np.roll(m, 1) >= _CHI2_MIN_PAIR
    ok &= np.roll(m, -1) >= _CHI2_MIN_PAIR
    ok[0] = ok[-1] = False
    kk = np.flatnonzero(ok)
    if kk.size == 0:
        raise ValueError("insufficient samples: no well-populated value pairs")
    rho = (m[kk + 1] / m[kk - 1]) ** 0.25
    q = 1.0 / (1.0 + rho)
    expected = m[kk] * q
    var_log_rho = (1.0 / m[kk + 1] + 1.0 / m[kk - 1]) / 16.0
    var_q = (rho / (1.0 + rho) ** 2) ** 2 * var_log_rho
    variance = m[kk] * q * (1.0 - q) + m[kk] ** 2 * var_q
    stat = float(np.sum((even[kk] - expected) ** 2 / variance))
    return float(sps.chi2.sf(stat, df=kk.size))


# ---------------------------------------------------------------------------
# Calibration and the composite warden verdict
# ---------------------------------------------------------------------------

@dataclass
class AnalysisReport:
    """Every statistic with the sample size it was computed from."""

    kl_bits: float
    autocorr: tuple
    norm_dev: float
    chi2_pvalue: float
    verdict: str
    sample_sizes: dict = field(default_factory=dict)


@dataclass
class Calibration:
    """Null distributions of the battery statistics over clean captures.

    Thresholds are the 99th percentiles of each null sample set; nothing
    here is a hand-picked constant.
    """

    scene_desc: str
    n_runs: int
    bin_width: int
    reference_counts: np.ndarray
    reference_total: int
    kl_null: np.ndarray
    chi2_logp_null: np.ndarray
    autocorr_max_null: np.ndarray
    normdev_dev_null: np.ndarray

    def reference_hist(self) -> Histogram:
        nbins = len(self.reference_counts)
        edges = np.arange(nbins + 1, dtype=np.int64) * self.bin_width
        return Histogram(bin_edges=edges, counts=self.reference_counts,
                         total=self.reference_total)

    def threshold(self, name: str) -> float:
        null = {
            "kl": self.kl_null,
            "chi2_logp": self.chi2_logp_null,
            "autocorr_max": self.autocorr_max_null,
            "normdev_dev": self.normdev_dev_null,
        }[name]
        return float(np.percentile(null, 99))


def _chi2_logp(p: float) -> float:
    return -math.log10(max(p, 1e-300))


def build_calibration(scene: SceneRadiance, sensor: SensorConfig,
                      runs: int = 100, bin_width: int = 1) -> Calibration:
    """Calibrate the battery's null distributions from clean captures.

    Capture 0 becomes the KL reference; captures 1..runs provide the KL
    null; every capture feeds the chi-square null; consecutive capture
    pairs feed the pair-statistic nulls.
    """
    if runs < 2:
        raise CalibrationError("calibration needs at least 2 runs")
    images = [capture(scene, sensor, i) for i in range(runs + 1)]
    region = full_region(images[0])
    ref = histogram(images[0], region, bin_width)
    kl_null = np.array([
        kl_divergence(histogram(im, region, bin_width), ref) for im in images[1:]
    ])
    chi2_null = np.array([_chi2_logp(chi_square_attack(im, region)) for im in images[1:]])
    ac_null, nd_null = [], []
    for i in range(1, runs, 2):
        a, b = images[i], images[i + 1]
        ac_null.append(float(np.max(np.abs(autocorrelation(a, b, AUTOCORR_LAGS)))))
        nd_null.append(abs(normalized_deviation(a, b) - 1.0))
    desc = f"{scene.width}x{scene.height} mean_lambda={scene.lam.mean():.6g}"
    return Calibration(
        scene_desc=desc, n_runs=runs, bin_width=bin_width,
        reference_counts=ref.counts, reference_total=ref.total,
        kl_null=kl_null, chi2_logp_null=chi2_null,
        autocorr_max_null=np.array(ac_null), normdev_dev_null=np.array(nd_null),
    )


def ward_test(img: RawImage, calibration: Optional[Calibration],
              reference: Optional[RawImage] = None) -> AnalysisReport:
    """Run the battery against calibrated thresholds and render a verdict.

    The KL and chi-square statistics always run; the pair statistics run
    when a second capture of the same scene is provided. Suspicious iff any
    statistic exceeds its calibrated 99th percentile.
    """
    if calibration is None:
        raise CalibrationError("ward_test requires calibration data")
    if calibration.n_runs < 100:
        raise CalibrationError(
            f"calibration built from {calibration.n_runs} runs; need >= 100"
        )
    region = full_region(img)
    hist = histogram(img, region, calibration.bin_width)
    kl = kl_divergence(hist, calibration.reference_hist())
    chi2_p = chi_square_attack(img, region)
    sizes = {"kl": hist.total, "chi2": region.area}
    exceed = [
        kl > calibration.threshold("kl"),
        _chi2_logp(chi2_p) > calibration.threshold("chi2_logp"),
    ]
    ac: tuple = ()
    nd = math.nan
    if reference is not None:
        rho = autocorrelation(img, reference, AUTOCORR_LAGS)
        ac = tuple(float(v) for v in rho)
        nd = normalized_deviation(img, reference)
        sizes["autocorr"] = img.pixel_count
        sizes["norm_dev"] = img.pixel_count
        exceed.append(float(np.max(np.abs(rho))) > calibration.threshold("autocorr_max"))
        exceed.append(abs(nd - 1.0) > calibration.threshold("normdev_dev"))
    verdict = "suspicious" if any(exceed) else "clean"
    return AnalysisReport(kl_bits=kl, autocorr=ac, norm_dev=nd,
                          chi2_pvalue=chi2_p, verdict=verdict, sample_sizes=sizes)


# ---------------------------------------------------------------------------
# Calibration file format
# ---------------------------------------------------------------------------

def write_calibration(cal: Calibration) -> bytes:
    """Versioned structured text: header lines, then one line per
    statistic's null samples, then the sparse reference histogram."""
    lines = [
        "shotstego-calibration v1",
        f"scene {cal.scene_desc}",
        f"runs {cal.n_runs}",
        f"bin_width {cal.bin_width}",
        f"reference_total {cal.reference_total}",
    ]
    for name, arr in (
        ("kl_null", cal.kl_null),
        ("chi2_logp_null", cal.chi2_logp_null),
        ("autocorr_max_null", cal.autocorr_max_null),
        ("normdev_dev_null", cal.normdev_dev_null),
    ):
        lines.append(name + " " + " ".join(f"{v:.9g}" for v in arr))
    nz = np.flatnonzero(cal.reference_counts)
    lines.append("reference_counts " + " ".join(
        f"{i}:{cal.reference_counts[i]}" for i in nz
    ))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _parse_floats(text: str) -> np.ndarray:
    return np.array([float(tok) for tok in text.split()], dtype=np.float64)


def read_calibration(data: bytes) -> Calibration:
    lines = data.decode("utf-8").splitlines()
    if not lines or lines[0] != "shotstego-calibration v1":
        raise CalibrationError("not a calibration file (bad version header)")
    fields: dict[str, str] = {}
    for line in lines[1:]:
        if line.strip():
            key, _, rest = line.partition(" ")
            fields[key] = rest
    try:
        bin_width = int(fields["bin_width"])
        nbins = -(-_NVALUES // bin_width)
        counts = np.zeros(nbins, dtype=np.int64)
        for item in fields["reference_counts"].split():
            i, _, v = item.partition(":")
            counts[int(i)] = int(v)
        return Calibration(
            scene_desc=fields["scene"],
            n_runs=int(fields["runs"]),
            bin_width=bin_width,
            reference_counts=counts,
            reference_total=int(fields["reference_total"]),
            kl_null=_parse_floats(fields["kl_null"]),
            chi2_logp_null=_parse_floats(fields["chi2_logp_null"]),
            autocorr_max_null=_parse_floats(fields["autocorr_max_null"]),
            normdev_dev_null=_parse_floats(fields["normdev_dev_null"]),
        )
    except KeyError as exc:
        raise CalibrationError(f"calibration file missing field {exc}") from exc
