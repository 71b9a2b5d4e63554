# Copyright (c) Microsoft Corporation. All rights reserved.
# Licensed under the MIT license.


# Configuration file for the Sphinx documentation builder.
# http://www.sphinx-doc.org/en/master/config

import os
import sys
import sphinx_rtd_theme

sys.path.insert(0, os.path.abspath(os.path.join("..", "..")))

from dtnres.version import __version__  # noqa: E402

# -- Project information -----------------------------------------------------

project = 'dtnres'
copyright = '2021, Microsoft'
authors = "dtnres developers"
version = release = __version__

# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx_autodoc_typehints',
    'sphinxarg.ext',
]

autoclass_content = "both"
autodoc_member_order = 'groupwise'
default_role = "py:obj"

# notes/method.md is Markdown.
source_suffix = ['.rst', '.md']
source_parsers = {
    '.md': 'recommonmark.parser.CommonMarkParser',
}

master_doc = 'index'
exclude_patterns = []
pygments_style = 'sphinx'

# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
htmlhelp_basename = 'dtnresdoc'
