"""Form files, the basis cache, verification suites and the command line."""

from .cache import BasisCache
from .formfile import FormFile, load_form

__all__ = ["BasisCache", "FormFile", "load_form"]
