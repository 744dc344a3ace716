def within_band(count: int, trials: int, rate: float, sigmas: float = 4.0) -> bool:
    """Empirical frequency within ``sigmas`` standard errors of ``rate`` (+1/N)."""
    std_error = (rate * (1 - rate) / trials) ** 0.5
    return abs(count / trials - rate) <= sigmas * std_error + 1 / trials
