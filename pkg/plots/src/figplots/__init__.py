from .figures import KINDS, FigureSpec, render
from .reader import SchemaError, SeriesTable, read_series, read_spectrum

__version__ = "0.1.0"
