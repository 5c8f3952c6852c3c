"""
Author: Louis Goodnews
Date: 2025-09-13
"""

import sys

from pathlib import Path
from typing import Final


# Make the package importable for autodoc
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

project: Final[str] = "crmcred"
author: Final[str] = "Louis Goodnews"
copyright: Final[str] = "2025, Louis Goodnews"
release: Final[str] = "0.1.0"

extensions: Final[list[str]] = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
]

napoleon_google_docstring: Final[bool] = True
napoleon_numpy_docstring: Final[bool] = False

autodoc_member_order: Final[str] = "bysource"
autodoc_typehints: Final[str] = "description"

exclude_patterns: Final[list[str]] = ["_build"]

html_theme: Final[str] = "sphinx_rtd_theme"
