from __future__ import annotations

import html

from src.explain.attention import AttentionReport

_STYLE = """body { font-family: sans-serif; margin: 2em; }
.tweet { margin-bottom: 1em; padding: 0.5em; border-left: 4px solid #1da1f2; }
.tweet-weight { color: #555555; font-size: 0.8em; }
.token { padding: 0 2px; border-radius: 2px; }
.empty { color: #888888; font-style: italic; }"""


def _token_span(token: str, weight: float) -> str:
    return (f'<span class="token" style="background-color: rgba(255, 0, 0, {weight:.4f})" '
            f'title="{weight:.6f}">{html.escape(token)}</span>')


def render_html(report: AttentionReport) -> str:
    """
    Static page with one block per tweet (highest tweet weight first) whose tokens are highlighted with
    an opacity equal to their word weight. Tokens are shown in their original order. The page is a pure
    function of the report and references no external resource
    """

    title = html.escape(f"Attention report for {report.user_id}")

    lines = ["<!DOCTYPE html>",
             "<html>",
             "<head>",
             '<meta charset="utf-8">',
             f"<title>{title}</title>",
             f"<style>\n{_STYLE}\n</style>",
             "</head>",
             "<body>",
             f"<h1>{title}</h1>",
             f"<p>Predicted probability of depression: {report.y_hat:.4f} "
             f"(prediction {report.prediction}, label {report.label})</p>"]

    blocks = 0
    for tweet in report.tweets:
        if len(tweet.tokens) == 0:
            continue

        in_order = sorted(tweet.tokens, key=lambda token_weight: token_weight.position)
        spans = " ".join(_token_span(token_weight.token, token_weight.weight) for token_weight in in_order)

        lines.append(f'<div class="tweet">'
                     f'<div class="tweet-weight" style="opacity: {max(tweet.weight, 0.1):.4f}">'
                     f"tweet {tweet.position}, weight {tweet.weight:.6f}</div>"
                     f"<div>{spans}</div></div>")
        blocks += 1

    if blocks == 0:
        lines.append('<p class="empty">no content</p>')

    lines.extend(["</body>", "</html>"])

    return "\n".join(lines) + "\n"
