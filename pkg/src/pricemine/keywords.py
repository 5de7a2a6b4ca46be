"""Keyword tables and per-token highlighting from stage-2 weights.

A term with a positive weight pushes the predicted price up, a negative one
pulls it down. The highlighter colours every token of a classified by the
summed weights of the kept vocabulary terms covering it: negative scores use
the red channel, positive scores the blue channel, and intensity is scaled
so the strongest token in the document saturates its channel.
"""

from __future__ import annotations

import html
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import NotFittedError
from .pipeline import TwoStageModel
from .records import ClassifiedRecord
from .text import TOKEN_RE, tfidf_encode


@dataclass(frozen=True)
class KeywordTable:
    """Top positive and top negative terms, strongest first."""

    positive: tuple[tuple[str, float], ...]
    negative: tuple[tuple[str, float], ...]
    top_k: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "positive": [{"term": t, "weight": w} for t, w in self.positive],
            "negative": [{"term": t, "weight": w} for t, w in self.negative],
            "top_k": self.top_k,
        }


def keyword_table(model: TwoStageModel, top_k: int) -> KeywordTable:
    """Rank stage-2 weights; ties break lexicographically by term."""
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    if not isinstance(model, TwoStageModel):
        raise NotFittedError("keyword_table needs a fitted two-stage model")
    weights = list(zip(model.stage2.column_names, (float(w) for w in model.stage2.weights)))
    positive = sorted(
        ((t, w) for t, w in weights if w > 0), key=lambda item: (-item[1], item[0])
    )
    negative = sorted(
        ((t, w) for t, w in weights if w < 0), key=lambda item: (item[1], item[0])
    )
    return KeywordTable(
        positive=tuple(positive[:top_k]),
        negative=tuple(negative[:top_k]),
        top_k=top_k,
    )


@dataclass(frozen=True)
class HighlightToken:
    text: str
    color: tuple[float, float, float]
    score: float


@dataclass(frozen=True)
class HighlightedDocument:
    tokens: tuple[HighlightToken, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "tokens": [
                {"text": t.text, "color": list(t.color), "score": t.score}
                for t in self.tokens
            ]
        }

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "HighlightedDocument":
        return cls(
            tuple(
                HighlightToken(
                    text=item["text"],
                    color=(item["color"][0], item["color"][1], item["color"][2]),
                    score=float(item["score"]),
                )
                for item in payload["tokens"]
            )
        )


def highlight(
    model: TwoStageModel,
    record: ClassifiedRecord,
    *,
    attribution: str = "full",
    use_feature_values: bool = False,
) -> HighlightedDocument:
    """Colour every token of the record's title + description.

    Short tokens and stop words are rendered (nothing is dropped) but only
    tokens that survive the text pipeline can be covered by a weighted term.
    With ``attribution="full"`` each covered token receives the whole term
    weight; ``"split_evenly"`` divides it across the term's tokens. Scores
    use the raw term weight by default, so a word keeps one colour wherever
    it appears; ``use_feature_values=True`` multiplies each weight by the
    term's TF-IDF value in this document instead.
    """
    if attribution not in ("full", "split_evenly"):
        raise ValueError(f"unknown attribution: {attribution!r}")
    if not isinstance(model, TwoStageModel):
        raise NotFittedError("highlight needs a fitted two-stage model")
    config = model.text_config
    weights = dict(zip(model.stage2.column_names, (float(w) for w in model.stage2.weights)))
    if use_feature_values:
        encoded = tfidf_encode(
            [(record.title, record.description)], model.vocabulary, config
        ).select(list(model.stage2.column_names))
        weights = {
            term: weight * float(encoded.values[0, column])
            for column, (term, weight) in enumerate(weights.items())
        }

    raw_tokens = TOKEN_RE.findall(record.title + " " + record.description)
    surviving: list[int] = [
        position
        for position, token in enumerate(raw_tokens)
        if len(token) >= config.min_token_length and token.lower() not in config.stopwords
    ]
    scores = [0.0] * len(raw_tokens)
    lowered = [raw_tokens[position].lower() for position in surviving]
    for n in range(1, config.ngram_max + 1):
        for start in range(len(surviving) - n + 1):
            term = "_".join(lowered[start : start + n])
            weight = weights.get(term)
            if weight is None:
                continue
            share = weight if attribution == "full" else weight / n
            for covered in surviving[start : start + n]:
                scores[covered] += share

    peak = max((abs(s) for s in scores), default=0.0)
    tokens: list[HighlightToken] = []
    for token, score in zip(raw_tokens, scores):
        if score == 0.0 or peak == 0.0:
            color = (0.0, 0.0, 0.0)
        else:
            intensity = abs(score) / peak
            color = (intensity, 0.0, 0.0) if score < 0 else (0.0, 0.0, intensity)
        tokens.append(HighlightToken(token, color, score))
    return HighlightedDocument(tuple(tokens))


def _channel(value: float) -> int:
    # 0..1 -> 0..255, rounding half up.
    return int(value * 255.0 + 0.5)


_HTML_HEAD = (
    "<!DOCTYPE html>\n"
    "<html>\n"
    "<head>\n"
    '<meta charset="utf-8">\n'
    "<title>classified highlight</title>\n"
    "</head>\n"
    "<body>\n"
    "<p>"
)
_HTML_TAIL = "</p>\n</body>\n</html>\n"


def render_html(doc: HighlightedDocument, path: str | Path) -> None:
    """Write a self-contained HTML page, one coloured span per token.

    Output bytes are deterministic for a given document.
    """
    spans = []
    for token in doc.tokens:
        r, g, b = (_channel(v) for v in token.color)
        spans.append(
            f'<span style="color:rgb({r},{g},{b})">{html.escape(token.text)}</span>'
        )
    body = " ".join(spans)
    Path(path).write_bytes((_HTML_HEAD + body + _HTML_TAIL).encode("utf-8"))


def render_keyword_table(table: dict[str, Any]) -> str:
    """Side-by-side text table of positive and negative terms."""
    positive = table["positive"]
    negative = table["negative"]
    rows = max(len(positive), len(negative))
    lines = [f"top {table['top_k']} terms by stage-2 weight"]
    header = f"{'Positive term':<24}{'Weight':>12}   {'Negative term':<24}{'Weight':>12}"
    lines.append(header)
    for i in range(rows):
        left = positive[i] if i < len(positive) else None
        right = negative[i] if i < len(negative) else None
        left_text = f"{left['term']:<24}{left['weight']:>12.3f}" if left else " " * 36
        right_text = f"{right['term']:<24}{right['weight']:>12.3f}" if right else ""
        lines.append(f"{left_text}   {right_text}".rstrip())
    return "\n".join(lines)
