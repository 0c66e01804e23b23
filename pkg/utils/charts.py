"""
Plain-text rendering of coverage curves.
"""

from config import ASCII_CHART_WIDTH


def render_coverage_chart(curve: list[tuple[int, int]], total: int, width: int = ASCII_CHART_WIDTH) -> str:
    """
    Horizontal bar chart of a coverage curve, one line per chart time.

    Bar lengths are proportional to the number of covered peers out of
    `total`, so a non-decreasing curve always yields non-decreasing bars.

    Args:
        curve: (chart time, peers covered) pairs
        total: Group size the bars are scaled against
        width: Length of a full bar in characters

    Returns:
        The chart, ending with a single newline
    """
    if not curve or total <= 0:
        return "no peers to cover\n"

    label_width = max(len(str(t)) for t, _ in curve)
    lines = []
    for t, covered in curve:
        bar = covered * width // total
        if covered and not bar:
            bar = 1
        lines.append(f"t={t:<{label_width}} | {'#' * bar:<{width + 8}}{covered}/{total}")
    return "\n".join(lines) + "\n"
