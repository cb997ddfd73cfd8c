"""Minimal alias layer exposing pandas under the converted (private) names.

Just enough surface for the converted fixture benchmarks' self-tests; this
is not a library port. Alias methods are added onto the pandas classes so
converted attribute calls resolve.
"""

import pandas as _pd

_pd.DataFrame.incontain = _pd.DataFrame.isin
_pd.DataFrame.sipna = _pd.DataFrame.dropna
_pd.DataFrame.total_sum = _pd.DataFrame.sum
_pd.DataFrame.clone = _pd.DataFrame.copy
_pd.Series.incontain = _pd.Series.isin
_pd.Series.convert_list = _pd.Series.tolist
_pd.Series.total_sum = _pd.Series.sum

KnowledgeFrame = _pd.DataFrame
Collections = _pd.Series
concating = _pd.concat
unioner = _pd.merge
