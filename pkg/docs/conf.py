# -*- coding: utf-8 -*-
#
# ellorder documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import sys, os

# The package lives one directory up.
sys.path.insert(0, os.path.abspath('..'))

# -- General configuration -----------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.napoleon']

# Add any paths that contain templates here, relative to this directory.
templates_path = ['_templates']

# The suffix of source filenames.
source_suffix = '.rst'

# The master toctree document.
master_doc = 'index'

# General information about the project.
project = u'ellorder'
copyright = u'2020, Thomas Angeland'

# The short X.Y version.
version = 'v0.1.0'
# The full version, including alpha/beta/rc tags.
release = 'v0.1.0'

# List of patterns, relative to source directory, that match files and
# directories to ignore when looking for source files.
exclude_patterns = ['_build']

# The name of the Pygments (syntax highlighting) style to use.
pygments_style = 'sphinx'

autodoc_member_order = 'bysource'

# -- Options for HTML output ---------------------------------------------------

html_theme = 'default'
html_static_path = ['_static']
htmlhelp_basename = 'ellorderdoc'

# -- Options for LaTeX output --------------------------------------------------

latex_elements = {
}

latex_documents = [
  ('index', 'ellorder.tex', u'ellorder Documentation',
   u'Thomas Angeland', 'manual'),
]
