"""Per-document entity content density and the three-stage percentile filter.

Densities are exact rationals: (entity count) / (token count). The filter
drops short documents first, then keeps documents strictly above the
configured DLT and ESG density percentiles, and finally unions the seeds
back in.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .annotations import AnnotationSet
from .records import TextDocument
from .taxonomy import Taxonomy


class DensityError(Exception):
    """Domain errors: empty inputs, zero token counts."""


_WORD = re.compile(r"\w+")


def count_tokens(doc: TextDocument | str) -> int:
    """Word token count: whitespace split with punctuation stripped, so
    hyphenated compounds count per part and bare punctuation counts zero."""
    text = doc.text if isinstance(doc, TextDocument) else doc
    return len(_WORD.findall(text))


def content_density(n_dlt: int, n_esg: int, n_tokens: int) -> Fraction:
    """(n_dlt + n_esg) / n_tokens, exactly."""
    if n_tokens <= 0:
        raise DensityError("token count must be positive; exclude the document upstream")
    if n_dlt < 0 or n_esg < 0:
        raise DensityError("entity counts must be non-negative")
    return Fraction(n_dlt + n_esg, n_tokens)


@dataclass(frozen=True)
class DensityReport:
    publication_id: str
    n_tokens: int
    n_dlt: int
    n_esg: int

    @property
    def density(self) -> Fraction:
        return content_density(self.n_dlt, self.n_esg, self.n_tokens)

    @property
    def dlt_density(self) -> Fraction:
        return Fraction(self.n_dlt, self.n_tokens)

    @property
    def esg_density(self) -> Fraction:
        return Fraction(self.n_esg, self.n_tokens)


def build_report(doc: TextDocument, annotation_set: AnnotationSet,
                 taxonomy: Taxonomy) -> DensityReport:
    """Count disjoint DLT and ESG entities against the document's tokens."""
    dlt = set(taxonomy.dlt_categories)
    n_dlt = sum(1 for e in annotation_set.entities if e.label in dlt)
    n_esg = sum(1 for e in annotation_set.entities if e.label == taxonomy.esg_category)
    return DensityReport(publication_id=doc.publication_id,
                         n_tokens=count_tokens(doc), n_dlt=n_dlt, n_esg=n_esg)


def percentile(values, p) -> Fraction:
    """Linear interpolation on the order statistics: h = (n-1)*p/100,
    result = x[floor(h)] + frac(h) * (x[floor(h)+1] - x[floor(h)]).

    Exact when given integer or Fraction inputs.
    """
    if not values:
        raise DensityError("percentile of empty input")
    if not 0 <= p <= 100:
        raise DensityError(f"percentile {p} out of [0, 100]")
    xs = sorted(Fraction(v) for v in values)
    h = Fraction(len(xs) - 1) * Fraction(p) / 100
    lo = int(h)  # floor; h >= 0
    if lo == len(xs) - 1:
        return xs[-1]
    return xs[lo] + (h - lo) * (xs[lo + 1] - xs[lo])


@dataclass
class FilterConfig:
    token_floor_pct: float = 10.0
    dlt_pct: float = 90.0
    esg_pct: float = 70.0
    token_abs_floor: int = 100
    seeds: frozenset[str] = frozenset()

    def __post_init__(self):
        for name in ("token_floor_pct", "dlt_pct", "esg_pct"):
            v = getattr(self, name)
            if not 0 <= v <= 100:
                raise DensityError(f"{name}={v} out of [0, 100]")
        self.seeds = frozenset(self.seeds)


@dataclass
class StageCount:
    name: str
    input: int
    excluded: int
    retained: int


@dataclass
class FilteredCorpus:
    kept: frozenset[str]
    stage_log: list[StageCount] = field(default_factory=list)
    thresholds: dict[str, Fraction | None] = field(default_factory=dict)
    missing_seeds: frozenset[str] = frozenset()


def filter_corpus(reports: list[DensityReport], config: FilterConfig) -> FilteredCorpus:
    """Three-stage percentile filter with seed union.

    Stage 1 keeps documents at or above max(token-count percentile,
    absolute floor). Stages 2 and 3 keep documents with DLT-only / ESG-only
    density strictly above the percentile computed over the prior stage's
    survivors. Seeds are always in the final set when present in the input.
    """
    if not reports:
        raise DensityError("filter_corpus needs at least one report")
    ids = {r.publication_id for r in reports}
    if len(ids) != len(reports):
        raise DensityError("duplicate publication ids among reports")
    missing_seeds = config.seeds - ids

    token_threshold = max(
        percentile([r.n_tokens for r in reports], config.token_floor_pct),
        Fraction(config.token_abs_floor),
    )
    stage1 = [r for r in reports if r.n_tokens >= token_threshold]
    log = [StageCount("token_floor", len(reports), len(reports) - len(stage1), len(stage1))]

    if stage1:
        dlt_threshold = percentile([r.dlt_density for r in stage1], config.dlt_pct)
        stage2 = [r for r in stage1 if r.dlt_density > dlt_threshold]
    else:
        dlt_threshold = None
        stage2 = []
    log.append(StageCount("dlt_density", len(stage1), len(stage1) - len(stage2), len(stage2)))

    if stage2:
        esg_threshold = percentile([r.esg_density for r in stage2], config.esg_pct)
        stage3 = [r for r in stage2 if r.esg_density > esg_threshold]
    else:
        esg_threshold = None
        stage3 = []
    log.append(StageCount("esg_density", len(stage2), len(stage2) - len(stage3), len(stage3)))

    kept = frozenset(r.publication_id for r in stage3) | (config.seeds & ids)
    return FilteredCorpus(
        kept=kept,
        stage_log=log,
        thresholds={
            "token_floor": token_threshold,
            "dlt_density": dlt_threshold,
            "esg_density": esg_threshold,
        },
        missing_seeds=frozenset(missing_seeds),
    )


REPORT_CSV_HEADER = ["id", "n_tokens", "n_dlt", "n_esg", "d_dlt", "d_esg", "d_combined"]


def write_reports_csv(reports: list[DensityReport], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_CSV_HEADER)
        for r in sorted(reports, key=lambda r: r.publication_id):
            writer.writerow([
                r.publication_id, r.n_tokens, r.n_dlt, r.n_esg,
                f"{float(r.dlt_density):.6f}",
                f"{float(r.esg_density):.6f}",
                f"{float(r.density):.6f}",
            ])
    return path


def read_reports_csv(path: str | Path) -> list[DensityReport]:
    reports = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            reports.append(DensityReport(
                publication_id=row["id"],
                n_tokens=int(row["n_tokens"]),
                n_dlt=int(row["n_dlt"]),
                n_esg=int(row["n_esg"]),
            ))
    if not reports:
        raise DensityError(f"no reports in {path}")
    return reports
