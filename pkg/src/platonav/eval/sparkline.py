import math

BARS = "▁▂▃▄▅▆▇█"


def sparkline(values):
    """One bar character per value, scaled between the finite min and max; '·' for NaN"""
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return "·" * len(values)
    low, high = min(finite), max(finite)
    span = high - low
    chars = []
    for v in values:
        if not math.isfinite(v):
            chars.append("·")
        elif span == 0.0:
            chars.append(BARS[len(BARS) // 2])
        else:
            chars.append(BARS[min(len(BARS) - 1, int((v - low) / span * len(BARS)))])
    return "".join(chars)


def summarize_metrics(rows, columns=("mttf", "training_crashes")):
    """Plain-text lines 'column  sparkline  first -> last' for metrics rows"""
    lines = []
    for name in columns:
        values = [row[name] for row in rows]
        if not values:
            continue
        lines.append(f"{name:<18} {sparkline(values)}  {values[0]:.3g} -> {values[-1]:.3g}")
    return "\n".join(lines)
